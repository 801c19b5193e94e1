"""Command-line front end: a TOML experiment config in, JSON-lines and CSV tables out.

Exit codes: 0 success, 1 bad config or usage, 2 mathematical error,
3 resource limit (cell budget, enumeration size, precision).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import sys
import time
from fractions import Fraction

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import samples
from .cda import CyclicAlgebra
from .cycles import height_tau, invariant_poly_j, make_equi_pair, standard_tau
from .errors import ConfigError, MathError, ResourceLimit
from .formula import (hecke_intersection, intersection_number, intersection_two_fields,
                      resultant_integrand)
from .integrate import (DEFAULT_CELL_BUDGET, ResFormIntegrand, TestFunction, adaptive_integrate,
                        c_closed, c_pair, deg_level_F, deg_level_K, exhaustive_integrate)
from .linalg import Poly, matrix
from .localfield import FieldDesc, QuadExt, is_prime
from .orbital import derivative_at_zero, orbital_h1, verify_afl_h1

COMMANDS = ("constants", "invariant", "intersect", "two-fields", "hecke", "orbital",
            "verify-afl", "oracle-compare")


# ---------------------------------------------------------------------------
# config reading

def _get(cfg, path, default=None, required=False):
    cur = cfg
    for key in path.split("."):
        if not isinstance(cur, dict) or key not in cur:
            if required:
                raise ConfigError(f"config field '{path}' is required")
            return default
        cur = cur[key]
    return cur


def _int(cfg, path, default=None, required=False):
    x = _get(cfg, path, default, required)
    if isinstance(x, bool) or x is None:
        raise ConfigError(f"config field '{path}' must be an integer")
    try:
        return int(str(x).strip())
    except ValueError as exc:
        raise ConfigError(f"config field '{path}': {x!r} is not an integer") from exc


def _rat(x, path):
    try:
        return Fraction(str(x).strip()) if not isinstance(x, int) else Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"config field '{path}': {x!r} is not an exact rational") from exc


def _rat_matrix(rows, path, size):
    if not isinstance(rows, list) or len(rows) != size or any(
            not isinstance(r, list) or len(r) != size for r in rows):
        raise ConfigError(f"config field '{path}' must be a {size}x{size} matrix")
    return [[_rat(x, f"{path}[{i}][{k}]") for k, x in enumerate(r)] for i, r in enumerate(rows)]


def _extension(cfg, key, F):
    kind = _get(cfg, f"{key}.kind", "unramified")
    if kind not in ("unramified", "ramified"):
        raise ConfigError(f"config field '{key}.kind' must be 'unramified' or 'ramified'")
    return QuadExt(F, kind, _int(cfg, f"{key}.u", 1))


def _cda(D, spec, path):
    if not isinstance(spec, list) or len(spec) > D.n:
        raise ConfigError(f"config field '{path}' must list at most {D.n} coefficients")
    coeffs = []
    for i, c in enumerate(spec):
        if isinstance(c, list):
            if len(c) > D.n:
                raise ConfigError(f"config field '{path}[{i}]' has too many entries")
            coeffs.append([_rat(x, f"{path}[{i}]") for x in c])
        else:
            coeffs.append([_rat(c, f"{path}[{i}]")])
    return D.element(coeffs)


def _pair(cfg, key, K, D, h):
    tau_spec = _get(cfg, f"{key}.tau", "standard")
    if tau_spec == "standard":
        tau = standard_tau(K, h)
    else:
        if not isinstance(tau_spec, list) or len(tau_spec) != 2 * h:
            raise ConfigError(f"config field '{key}.tau' must have 2h rows")
        tau = []
        for i, row in enumerate(tau_spec):
            if not isinstance(row, list) or len(row) != h:
                raise ConfigError(f"config field '{key}.tau[{i}]' must have h entries")
            tau.append([K(*[_rat(x, f"{key}.tau[{i}]") for x in e]) if isinstance(e, list)
                        else K(_rat(e, f"{key}.tau[{i}]")) for e in row])
    phi_spec = _get(cfg, f"{key}.phi", "1")
    if phi_spec == "auto-height":
        ht = height_tau(tau)
        phi = D.Pi_power(ht)
    elif isinstance(phi_spec, list):
        phi = _cda(D, phi_spec, f"{key}.phi")
    else:
        phi = D.scalar(_rat(phi_spec, f"{key}.phi"))
    return make_equi_pair(K, tau, phi, h=h, D=D)


def _j(cfg, D, allow_poly=False):
    coeffs = _get(cfg, "j.coeffs")
    poly = _get(cfg, "j.poly")
    if coeffs is None and poly is None:
        raise ConfigError("config field 'j.coeffs' or 'j.poly' is required")
    if coeffs is not None:
        return _cda(D, coeffs, "j.coeffs")
    if not allow_poly:
        raise ConfigError("this command needs j as an element ('j.coeffs'), not 'j.poly'")
    P = Poly([D.F(_rat(x, "j.poly")) for x in poly])
    if not P.is_monic():
        raise ConfigError("config field 'j.poly' must be monic (ascending coefficients)")
    return P


def _test_function(cfg, h):
    n = _int(cfg, "test_function.n", 0)
    g0 = _get(cfg, "test_function.g0")
    g0 = _rat_matrix(g0, "test_function.g0", 2 * h) if g0 is not None else None
    kind = _get(cfg, "test_function.kind", "single_coset")
    return TestFunction(h, n, g0, kind)


# ---------------------------------------------------------------------------
# records

def _qpow(x: Fraction, q: int):
    """(q, e) when x = q^e, else None."""
    if x <= 0:
        return None
    e = 0
    num, den = x.numerator, x.denominator
    while num % q == 0:
        num //= q
        e += 1
    while den % q == 0:
        den //= q
        e -= 1
    return {"q": q, "exp": e} if num == 1 and den == 1 else None


def _ratjson(x):
    if x is None:
        return None
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _ratstr(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _coeffs_str(P):
    out = []
    for c in P.coeffs:
        try:
            out.append(_ratstr(c.to_rational()))
        except Exception:
            out.append(repr(c))
    return out


class Emitter:
    def __init__(self, command, fingerprint, q, timings):
        self.command = command
        self.fingerprint = fingerprint
        self.q = q
        self.timings = timings
        self.records = []
        self._t = time.perf_counter()

    def emit(self, inputs, value, cells=None, **extra):
        now = time.perf_counter()
        wall = round((now - self._t) * 1000) if self.timings else None
        self._t = now
        rec = {"command": self.command, "inputs": inputs, "value": _ratjson(value),
               "q_power_form": _qpow(Fraction(value), self.q) if value is not None else None,
               "cells_used": cells, "wall_ms": wall, "fingerprint": self.fingerprint}
        rec.update(extra)
        self.records.append(rec)


# ---------------------------------------------------------------------------
# commands

def cmd_constants(cfg, ctx, out: Emitter):
    p, h = ctx["p"], ctx["h"]
    F = ctx["F"]
    hs = _get(cfg, "constants.h", [h])
    for hh in hs:
        for kind in ("unramified", "ramified"):
            K = QuadExt(F, kind)
            cc = c_closed(K, hh)
            cp = c_pair(K, K, hh)
            out.emit({"p": p, "h": hh, "kind": kind}, cc,
                     c_pair={"num": str(cp.numerator), "den": str(cp.denominator)},
                     agree=cc == cp, deg_F_1=deg_level_F(hh, 1, p), deg_K_1=deg_level_K(K, hh, 1))


def cmd_invariant(cfg, ctx, out: Emitter):
    D, pair = ctx["D"], ctx["pair"]
    j = _j(cfg, D, allow_poly=True)
    P = invariant_poly_j(j, pair, strict=ctx["strict"])
    const = None
    try:
        const = P.coeffs[0].to_rational()
    except Exception:
        pass
    out.emit({"j": _get(cfg, "j")}, const, coefficients=_coeffs_str(P), degree=P.degree)


def cmd_intersect(cfg, ctx, out: Emitter):
    D, pair = ctx["D"], ctx["pair"]
    j = _j(cfg, D)
    f = _test_function(cfg, ctx["h"])
    r = intersection_number(j, pair, f, strict=ctx["strict"], budget=ctx["budget"],
                            threads=ctx["threads"])
    out.emit({"j": _get(cfg, "j"), "n": f.n}, r.value, r.cells_used,
             constant_C=_ratjson(r.constant_C), disc_factor=_ratjson(r.disc_factor),
             integral=_ratjson(r.integral))


def cmd_two_fields(cfg, ctx, out: Emitter):
    F, D, h = ctx["F"], ctx["D"], ctx["h"]
    K2 = _extension(cfg, "extension2", F)
    pair2 = _pair(cfg, "pair2", K2, D, h)
    n = _int(cfg, "test_function.n", 1)
    r = intersection_two_fields(ctx["pair"], pair2, n, budget=ctx["budget"], threads=ctx["threads"])
    out.emit({"n": n, "K1": ctx["pair"].K.kind, "K2": K2.kind}, r.value, r.cells_used,
             constant_C=_ratjson(r.constant_C), disc_factor=_ratjson(r.disc_factor),
             integral=_ratjson(r.integral))


def cmd_hecke(cfg, ctx, out: Emitter):
    D, pair, h = ctx["D"], ctx["pair"], ctx["h"]
    j = _j(cfg, D)
    n = _int(cfg, "test_function.n", 0)
    g0 = _rat_matrix(_get(cfg, "test_function.g0", required=True), "test_function.g0", 2 * h)
    r = hecke_intersection(j, pair, n, g0, strict=ctx["strict"], budget=ctx["budget"],
                           threads=ctx["threads"])
    out.emit({"j": _get(cfg, "j"), "n": n, "g0": [[_ratstr(x) for x in row] for row in g0]},
             r.value, r.cells_used, constant_C=_ratjson(r.constant_C),
             disc_factor=_ratjson(r.disc_factor), integral=_ratjson(r.integral))


def cmd_orbital(cfg, ctx, out: Emitter):
    F = ctx["F"]
    g = _rat_matrix(_get(cfg, "orbital.g", required=True), "orbital.g", 2)
    S = orbital_h1(matrix(F, g))
    out.emit({"g": [[_ratstr(x) for x in row] for row in g]}, derivative_at_zero(S),
             series={str(k): _ratstr(v) for k, v in sorted(S.coeffs.items())},
             at_zero=_ratjson(S.at_zero()))


def _j_family(cfg, ctx, section):
    rng = random.Random(ctx["seed"])
    count = _int(cfg, f"{section}.count", 10)
    max_b = _int(cfg, f"{section}.max_b_val", 1)
    D = ctx["D"]
    fam = []
    for i in range(count):
        bv = i % (max_b + 1)
        fam.append((bv, samples.random_quaternion(D, rng, bv)))
    return fam


def _j_label(j):
    out = []
    for a in j.coeffs:
        try:
            out.append([_ratstr(c.to_rational()) for c in a.coordinates()])
        except Exception:
            out.append(repr(a))
    return out


def cmd_verify_afl(cfg, ctx, out: Emitter):
    if ctx["h"] != 1:
        raise ConfigError("verify-afl requires h = 1")
    for i, (bv, j) in enumerate(_j_family(cfg, ctx, "verify_afl")):
        r = verify_afl_h1(j, ctx["pair"], budget=ctx["budget"], threads=ctx["threads"])
        out.emit({"case": i, "j": _j_label(j), "b_val": bv}, r.ratio, r.cells,
                 ratio=_ratstr(r.ratio), lhs=_ratjson(r.lhs), rhs=_ratjson(r.rhs))


def cmd_oracle_compare(cfg, ctx, out: Emitter):
    if ctx["h"] != 1:
        raise ConfigError("oracle-compare requires h = 1")
    m = _int(cfg, "oracle_compare.m", 2)
    pair = ctx["pair"]
    f = TestFunction(1, 0)
    for i, (bv, j) in enumerate(_j_family(cfg, ctx, "oracle_compare")):
        adaptive = adaptive_integrate(resultant_integrand(j, pair), f, ctx["p"],
                                      budget=ctx["budget"], threads=ctx["threads"])
        # the exhaustive sum is exact once the level reaches the deepest certified cell
        depth = max(m, adaptive.max_depth)
        alpha = -invariant_poly_j(j, pair, strict=True).coeffs[0]
        exhaustive = exhaustive_integrate(ResFormIntegrand(alpha, pair), f, depth, ctx["p"],
                                          budget=ctx["budget"], threads=ctx["threads"])
        status = "MATCH" if adaptive.value == exhaustive else "MISMATCH"
        out.emit({"case": i, "j": _j_label(j), "b_val": bv, "m": depth}, adaptive.value,
                 adaptive.cells, exhaustive=_ratjson(exhaustive), status=status)


HANDLERS = {
    "constants": cmd_constants,
    "invariant": cmd_invariant,
    "intersect": cmd_intersect,
    "two-fields": cmd_two_fields,
    "hecke": cmd_hecke,
    "orbital": cmd_orbital,
    "verify-afl": cmd_verify_afl,
    "oracle-compare": cmd_oracle_compare,
}


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    ap = _Parser(prog="ltcycles", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="TOML experiment config")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--precision", type=int, help="p-adic digits kept (default 64)")
    ap.add_argument("--cell-budget", type=int, default=None)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--strict", dest="strict", action="store_true", default=None)
    ap.add_argument("--no-strict", dest="strict", action="store_false")
    ap.add_argument("--timings", action="store_true",
                    help="record wall-clock times (outputs are then not byte-reproducible)")
    return ap


def load_config(path):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def fingerprint(cfg, effective) -> str:
    blob = json.dumps({"config": cfg, "effective": effective}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _csv_text(records):
    cols = ["command", "case", "value", "q_exp", "decimal", "cells_used", "status", "fingerprint"]
    rows = []
    for r in records:
        v = r["value"]
        frac = Fraction(int(v["num"]), int(v["den"])) if v else None
        rows.append([r["command"], str(r["inputs"].get("case", r["inputs"].get("kind", ""))),
                     _ratstr(frac) if frac is not None else "",
                     str(r["q_power_form"]["exp"]) if r["q_power_form"] else "",
                     f"{float(frac):.12g}" if frac is not None else "",
                     "" if r["cells_used"] is None else str(r["cells_used"]),
                     str(r.get("status", "")), r["fingerprint"]])
    widths = [max(len(c), *(len(row[i]) for row in rows)) if rows else len(c)
              for i, c in enumerate(cols)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([c.ljust(widths[i]) for i, c in enumerate(cols)])
    for row in rows:
        w.writerow([x.ljust(widths[i]) for i, x in enumerate(row)])
    return buf.getvalue()


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        p = _int(cfg, "p", required=True)
        h = _int(cfg, "h", 1)
        if p == 2 or not is_prime(p):
            raise ConfigError(f"config field 'p' must be an odd prime, got {p}")
        if h < 1:
            raise ConfigError("config field 'h' must be positive")
        N = args.precision or _int(cfg, "precision", 64)
        seed = args.seed if args.seed is not None else _int(cfg, "seed", 0)
        budget = args.cell_budget or _int(cfg, "cell_budget", DEFAULT_CELL_BUDGET)
        strict = args.strict if args.strict is not None else bool(_get(cfg, "strict", True))
        effective = {"command": args.command, "precision": N, "seed": seed, "budget": budget,
                     "strict": strict}
        fp = fingerprint(cfg, effective)
        F = FieldDesc(p, N)
        ctx = {"p": p, "h": h, "F": F, "seed": seed, "budget": budget, "strict": strict,
               "threads": max(1, args.threads)}
        if args.command not in ("constants", "orbital"):
            D = CyclicAlgebra(F, h)
            K = _extension(cfg, "extension", F)
            ctx.update(D=D, K=K, pair=_pair(cfg, "pair", K, D, h))
        out = Emitter(args.command, fp, p, args.timings)
        HANDLERS[args.command](cfg, ctx, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except MathError as exc:
        print(f"mathematical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2
    except ResourceLimit as exc:
        print(f"resource limit ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3
    os.makedirs(args.out, exist_ok=True)
    stem = os.path.join(args.out, args.command)
    with open(stem + ".jsonl", "w") as fh:
        for rec in out.records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    with open(stem + ".csv", "w") as fh:
        fh.write(_csv_text(out.records))
    for rec in out.records:
        v = rec["value"]
        shown = f"{v['num']}/{v['den']}" if v else "-"
        extra = f" {rec['status']}" if "status" in rec else ""
        print(f"{args.command}: {shown}{extra}")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
