import json
import textwrap

import pytest

from ltcycles.cli import run
from ltcycles.linalg import matrix
from ltcycles.localfield import FieldDesc
from ltcycles.orbital import derivative_at_zero, orbital_h1

PAIR = """
p = 3
h = 1
seed = 7

[extension]
kind = "unramified"
"""


def write(tmp_path, body, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body))
    return str(path)


def records(out, command):
    with open(f"{out}/{command}.jsonl") as fh:
        return [json.loads(line) for line in fh]


def test_constants(tmp_path):
    cfg = write(tmp_path, "p = 3\nh = 1\n")
    assert run(["constants", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    recs = records(tmp_path / "o", "constants")
    vals = {r["inputs"]["kind"]: r["value"] for r in recs}
    assert vals["unramified"] == {"num": "3", "den": "4"}
    assert vals["ramified"] == {"num": "4", "den": "3"}
    assert all(r["agree"] for r in recs)
    assert all(r["wall_ms"] is None for r in recs)
    csv_text = (tmp_path / "o" / "constants.csv").read_text()
    assert "3/4" in csv_text and recs[0]["fingerprint"] in csv_text


def test_oracle_compare_matches(tmp_path):
    cfg = write(tmp_path, PAIR + "\n[oracle_compare]\nm = 2\ncount = 3\nmax_b_val = 1\n")
    assert run(["oracle-compare", "--config", cfg, "--out", str(tmp_path)]) == 0
    recs = records(tmp_path, "oracle-compare")
    assert len(recs) == 3
    assert all(r["status"] == "MATCH" and r["exhaustive"] == r["value"] for r in recs)


def test_verify_afl_ratio_column(tmp_path):
    cfg = write(tmp_path, PAIR + "\n[verify_afl]\ncount = 10\nmax_b_val = 1\n")
    assert run(["verify-afl", "--config", cfg, "--out", str(tmp_path)]) == 0
    recs = records(tmp_path, "verify-afl")
    assert len(recs) == 10
    assert {r["ratio"] for r in recs} == {"1/1"}


def test_invariant_and_orbital(tmp_path):
    cfg = write(tmp_path, PAIR + '\n[j]\ncoeffs = [["1", "2"], ["2", "1"]]\n')
    assert run(["invariant", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert records(tmp_path, "invariant")[0]["coefficients"] == ["1/2", "1/1"]
    cfg = write(tmp_path, 'p = 3\n[orbital]\ng = [["3", "1"], ["6", "1"]]\n', "orb.toml")
    assert run(["orbital", "--config", cfg, "--out", str(tmp_path)]) == 0
    rec = records(tmp_path, "orbital")[0]
    S = orbital_h1(matrix(FieldDesc(3), [[3, 1], [6, 1]]))
    d = derivative_at_zero(S)
    assert rec["value"] == {"num": str(d.numerator), "den": str(d.denominator)}


def test_intersect_hecke_two_fields(tmp_path):
    body = PAIR + '\n[j]\ncoeffs = [["1", "2"], ["2", "1"]]\n[test_function]\nn = 0\n'
    cfg = write(tmp_path, body)
    assert run(["intersect", "--config", cfg, "--out", str(tmp_path)]) == 0
    rec = records(tmp_path, "intersect")[0]
    assert rec["value"] == {"num": "1", "den": "1"}
    assert rec["q_power_form"] == {"q": 3, "exp": 0}
    cfg = write(tmp_path, body + 'g0 = [["3", "0"], ["0", "1"]]\n', "hecke.toml")
    assert run(["hecke", "--config", cfg, "--out", str(tmp_path)]) == 0
    cfg = write(tmp_path, PAIR + '\n[extension2]\nkind = "ramified"\n[pair2]\nphi = "auto-height"\n'
                '[test_function]\nn = 1\n', "two.toml")
    assert run(["two-fields", "--config", cfg, "--out", str(tmp_path)]) == 0


def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path)
    assert run(["constants", "--config", write(tmp_path, "h = 1\n"), "--out", out]) == 1
    assert "'p'" in capsys.readouterr().err
    bad = write(tmp_path, "p = 3\nh = = 1\nseed = 2\n", "bad.toml")
    assert run(["constants", "--config", bad, "--out", out]) == 1
    assert "line" in capsys.readouterr().err
    cfg = write(tmp_path, PAIR + '\n[j]\ncoeffs = [["0"], ["1"]]\n', "pi.toml")
    assert run(["intersect", "--config", cfg, "--out", out]) == 2
    assert "NotIrreducible" in capsys.readouterr().err
    cfg = write(tmp_path, PAIR + "\n[verify_afl]\ncount = 3\nmax_b_val = 2\n", "afl.toml")
    assert run(["verify-afl", "--config", cfg, "--out", out, "--cell-budget", "50"]) == 3
    with pytest.raises(SystemExit) as exc:
        run(["nonsense", "--config", cfg])
    assert exc.value.code == 1


def test_byte_identical_reruns(tmp_path):
    cfg = write(tmp_path, PAIR + "\n[verify_afl]\ncount = 4\nmax_b_val = 2\n")
    blobs = []
    for threads in ("1", "1", "8"):
        out = tmp_path / f"run{len(blobs)}"
        assert run(["verify-afl", "--config", cfg, "--out", str(out), "--threads", threads]) == 0
        blobs.append(((out / "verify-afl.jsonl").read_bytes(), (out / "verify-afl.csv").read_bytes()))
    assert blobs[0] == blobs[1] == blobs[2]


def test_timings_flag(tmp_path):
    cfg = write(tmp_path, "p = 3\n")
    assert run(["constants", "--config", cfg, "--out", str(tmp_path), "--timings"]) == 0
    assert all(isinstance(r["wall_ms"], int) for r in records(tmp_path, "constants"))
