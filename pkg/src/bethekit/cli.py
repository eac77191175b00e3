"""Command-line front end.

Every subcommand prints one JSON document (or a CSV table) and exits with
0 on success, 1 on a usage error, 2 on a precondition error and 3 when a
computed residual misses its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import detformulas as det
from . import observables as obs
from .betheroots import four_site_homotopy, ground_state_roots, homotopy_all, ratio_residual
from .chain import ChainSpec, hamiltonian, scalar_data, xxx_chain, xxz_chain
from .rmatrix import Normalization, random_points, yang_baxter_residual
from .tensoralg import BetheKitError, PreconditionError
from .vectors import sandwich

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_TOLERANCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(np.real(x)), float(np.imag(x))]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def _emit(result: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(_jsonable(result), sort_keys=True) + "\n")
        return
    rows = result.get("rows")
    if rows is None:
        rows = [{k: v for k, v in result.items()}]
    rows = [_jsonable(r) for r in rows]
    keys = sorted({k for r in rows for k in r})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    out.write(buf.getvalue())


def _check(value: float, tolerance: float) -> dict:
    return {"achieved": float(value), "target": float(tolerance), "passed": bool(value < tolerance)}


# ----------------------------------------------------------------------------
# configuration


def _parse_xi_inline(text: str) -> list[complex]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if item:
            out.append(complex(item.replace(" ", "")))
    return out


def _read_xi_file(path: str) -> list[complex]:
    out = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise UsageError(f"bad inhomogeneity line: {line.strip()}")
            out.append(complex(float(parts[0]), float(parts[1])))
    return out


def _offsets(args) -> list[complex] | None:
    if getattr(args, "xi", None):
        return _parse_xi_inline(args.xi)
    if getattr(args, "xi_file", None):
        return _read_xi_file(args.xi_file)
    return None


def build_spec(args, norm: Normalization | None = None) -> ChainSpec:
    offsets = _offsets(args)
    if offsets is not None and len(offsets) != args.N:
        raise UsageError("number of inhomogeneity offsets must equal N")
    if args.model == "xxx":
        return xxx_chain(args.N, c=complex(args.c), norm=norm or Normalization.SINH, offsets=offsets)
    return xxz_chain(args.N, delta=args.delta, norm=norm or Normalization.SINH, offsets=offsets)


def _kind(args):
    from .rmatrix import eta_from_delta, rational, trigonometric

    return rational(complex(args.c)) if args.model == "xxx" else trigonometric(eta_from_delta(args.delta))


def _spread_offsets(n: int, rng: np.random.Generator) -> np.ndarray:
    """Well-separated random offsets (homotopy starts stay distinct)."""
    return np.linspace(-0.6, 0.6, n) + 0.05 * rng.standard_normal(n)


# ----------------------------------------------------------------------------
# subcommands


def cmd_yb_check(args) -> dict:
    rng = np.random.default_rng(args.seed)
    kind = _kind(args)
    worst = 0.0
    for _ in range(args.trials):
        u1, u2, u3 = random_points(rng, 3)
        for norm in Normalization:
            worst = max(worst, yang_baxter_residual(kind, norm, u1, u2, u3, relative=True))
    return {"model": args.model, "trials": args.trials, "seed": args.seed, "residual": _check(worst, args.tol or 1e-12)}


def cmd_spectrum(args) -> dict:
    spec = build_spec(args)
    pauli, trace = hamiltonian(spec)
    evals = np.linalg.eigvalsh(pauli)
    diff = float(np.max(np.abs(pauli - trace)))
    rows = [{"index": i, "energy": float(e)} for i, e in enumerate(evals)]
    return {"N": args.N, "model": args.model, "rows": rows,
            "trace_identity": _check(diff, args.tol or 1e-6)}


def cmd_solve_bethe(args) -> dict:
    spec = build_spec(args)
    n = args.n if args.n is not None else args.N // 2
    kappa = complex(args.kappa)
    if args.method == "log":
        sets = [ground_state_roots(spec, n, kappa)]
    elif spec.homogeneous and spec.kind.trigonometric and spec.n_sites == 4 and n == 2:
        sets = four_site_homotopy(spec, kappa)
    elif spec.homogeneous and n > 1:
        raise PreconditionError("homotopy starts coincide on a homogeneous chain; pass distinct --xi offsets")
    else:
        sets = homotopy_all(spec, n, kappa)
    rows = []
    worst = 0.0
    for i, rs in enumerate(sets):
        res = ratio_residual(spec, rs.roots, kappa) if len(rs.roots) else 0.0
        if rs.admissible and not rs.infinite:
            worst = max(worst, res)
        rows.append({"index": i, "roots": list(rs.roots), "admissible": rs.admissible, "reason": rs.reason,
                     "infinite": rs.infinite, "residual": res})
    return {"N": args.N, "n": n, "kappa": kappa, "method": args.method, "rows": rows,
            "bethe_residual": _check(worst, args.tol or 1e-10)}


def _onshell_sets(spec: ChainSpec, n: int) -> list[np.ndarray]:
    sets = []
    for rs in homotopy_all(spec, n):
        if rs.admissible and not rs.infinite and len(rs.roots) == n:
            sets.append(rs.roots)
    return sets


def cmd_scalar_product(args) -> dict:
    rng = np.random.default_rng(args.seed)
    args.xi = args.xi or ",".join(repr(complex(x)) for x in _spread_offsets(args.N, rng))
    spec = build_spec(args)
    data = scalar_data(spec)
    u = _onshell_sets(spec, args.n)[0]
    v = random_points(rng, args.n, 0.5)
    dd = np.prod([data.d(x) for x in v]) * np.prod([data.d(x) for x in u])
    slav = dd * det.slavnov_determinant(spec.kind, v, u, data.r)
    summed = dd * det.scalar_product_sum(spec.kind, v, u, data.r)
    direct = sandwich(spec, v, u)
    err = max(abs(slav - direct), abs(summed - direct)) / abs(direct)
    return {"N": args.N, "n": args.n, "seed": args.seed, "onshell": u, "free": v,
            "slavnov": slav, "partition_sum": summed, "sandwich": direct, "rel_err": _check(err, args.tol or 1e-8)}


def cmd_norm(args) -> dict:
    rng = np.random.default_rng(args.seed)
    args.xi = args.xi or ",".join(repr(complex(x)) for x in _spread_offsets(args.N, rng))
    spec = build_spec(args)
    data = scalar_data(spec)
    rows = []
    worst = 0.0
    for u in _onshell_sets(spec, args.n):
        dd = np.prod([data.d(x) for x in u]) ** 2
        gaudin = dd * det.gaudin_norm(spec.kind, u, 1.0, data.dlog_r)
        direct = sandwich(spec, u, u)
        err = abs(gaudin - direct) / abs(direct)
        worst = max(worst, err)
        rows.append({"roots": u, "gaudin": gaudin, "sandwich": direct, "rel_err": err})
    return {"N": args.N, "n": args.n, "rows": rows, "rel_err": _check(worst, args.tol or 1e-8)}


def cmd_dwpf(args) -> dict:
    rng = np.random.default_rng(args.seed)
    kind = _kind(args)
    rows = []
    worst = 0.0
    for i in range(args.trials):
        x = random_points(rng, args.n)
        y = random_points(rng, args.n)
        a = det.dwpf_izergin(kind, x, y)
        b = det.dwpf_bruteforce(kind, x, y)
        err = abs(a - b) / abs(b)
        worst = max(worst, err)
        rows.append({"trial": i, "izergin": a, "bruteforce": b, "rel_err": err})
    return {"n": args.n, "model": args.model, "rows": rows, "rel_err": _check(worst, args.tol or 1e-10)}


def _big_int_str(value: int) -> str:
    """Decimal string of an arbitrarily large integer (lifts the interpreter's digit cap)."""
    limit = getattr(sys, "get_int_max_str_digits", lambda: 0)()
    if limit:
        sys.set_int_max_str_digits(0)
    try:
        return str(value)
    finally:
        if limit:
            sys.set_int_max_str_digits(limit)


def cmd_asm_count(args) -> dict:
    if args.m < 1:
        raise PreconditionError("m must be a positive integer")
    return {"m": args.m, "count": _big_int_str(det.asm_count(args.m))}


def cmd_inverse_problem_check(args) -> dict:
    spec = build_spec(args, Normalization.PUNIT)
    worst = 0.0
    rows = []
    for m in range(1, spec.n_sites + 1):
        for a in (1, 2):
            for b in (1, 2):
                res = obs.inverse_problem_residual(spec, obs.LocalOperator("E", m, a, b))
                worst = max(worst, res)
                rows.append({"site": m, "a": a, "b": b, "residual": res})
    return {"N": args.N, "model": args.model, "rows": rows, "max_abs": _check(worst, args.tol or 1e-10)}


def cmd_form_factor(args) -> dict:
    spec = build_spec(args, Normalization.PUNIT)
    op = obs.LocalOperator(args.op, args.site)
    n = args.n if args.n is not None else args.N // 2
    ket = ground_state_roots(spec, n).roots
    bra = ground_state_roots(spec, n + op.magnon_change).roots
    ff = obs.form_factor(spec, op, bra, ket)
    return {"N": args.N, "n": n, "operator": args.op, "site": args.site, "bra": bra, "ket": ket,
            "direct": ff.direct, "determinant": ff.determinant, "rel_err": _check(ff.rel_err, args.tol or 1e-8)}


def cmd_szz(args) -> dict:
    gs = obs.ground_state(args.N, args.delta)
    value = obs.szz(gs, args.m)
    second = obs.szz_from_generating_functional(gs, args.m)
    out = obs.correlator_record("szz", args.N, args.delta, args.m, value,
                                obs.szz_free_fermion_thermo(args.m) if args.delta == 0 else None)
    out["generating_functional_route"] = second
    out["route_agreement"] = _check(abs(second - value), args.tol or 1e-6)
    if args.delta == 0:
        out["free_fermion_limit"] = obs.szz_free_fermion_exact(args.m)
    return out


def cmd_efp(args) -> dict:
    gs = obs.ground_state(args.N, args.delta)
    value = obs.efp(gs, args.m)
    out = obs.correlator_record("efp", args.N, args.delta, args.m, value, None)
    if args.delta == 0.5:
        closed = obs.efp_delta_half_closed(args.m)
        out["closed_form"] = float(closed)
        out["closed_form_exact"] = f"{closed.numerator}/{closed.denominator}"
        out["thermo_target"] = float(closed)
        out["rel_dev"] = abs(value - float(closed)) / float(closed)
    return out


def cmd_identity_suite(args) -> dict:
    from .rmatrix import rational, trigonometric

    rng = np.random.default_rng(args.seed)
    tol = args.tol or 1e-10
    rows = []
    for name, kind in (("xxx", rational(1j)), ("xxz", trigonometric(0.7 - 0.3j))):
        xi, u, v = random_points(rng, 5, 0.6), random_points(rng, 2, 0.6), random_points(rng, 3, 0.6)
        r1, r2 = det.summation_lemma_residuals(kind, xi, u, v)
        rows.append({"identity": "summation_lemma_1", "kind": name, "residual": r1})
        rows.append({"identity": "summation_lemma_2", "kind": name, "residual": r2})
        rows.append({"identity": "vandermonde_split", "kind": name,
                     "residual": det.vandermonde_split_residual(kind, random_points(rng, 4, 0.6))})
        phi1, phi2 = rng.standard_normal((2, 3, 3)) + 1j * rng.standard_normal((2, 3, 3))
        rows.append({"identity": "delta_weighted_expansion", "kind": name,
                     "residual": det.delta_weighted_expansion_residual(kind, random_points(rng, 3, 0.6), phi1, phi2)})
        a1, a2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)

        def phi(x, y, kind=kind):
            return kind.sh_const / kind.sh(x - y)

        rows.append({"identity": "shifted_sum", "kind": name, "residual": det.shifted_sum_residual(
            kind, random_points(rng, 3, 0.6), random_points(rng, 3, 0.6), phi,
            lambda x, a=a1: np.exp(a * x), lambda x, a=a2: np.exp(a * x))})
        left, right = det.two_representation_determinants(kind, random_points(rng, 3, 0.6),
                                                          random_points(rng, 3, 0.6), 0.7 + 0.2j)
        rows.append({"identity": "two_representations", "kind": name,
                     "residual": abs(left - right) / max(abs(left), abs(right))})
    phi1, phi2 = rng.standard_normal((2, 3, 3)) + 1j * rng.standard_normal((2, 3, 3))
    rows.append({"identity": "column_expansion", "kind": "any", "residual": det.column_expansion_residual(phi1, phi2)})
    rows.append({"identity": "rational_sum", "kind": "xxx",
                 "residual": det.rational_sum_identity_residual(rational(1j), random_points(rng, 3), random_points(rng, 3))})
    worst = max(r["residual"] for r in rows)
    control = det.rational_sum_identity_residual(trigonometric(0.7 - 0.3j), random_points(rng, 3), random_points(rng, 3))
    return {"seed": args.seed, "rows": rows, "max_residual": _check(worst, tol),
            "negative_control": {"identity": "rational_sum", "kind": "xxz", "residual": control,
                                 "expected_to_fail": True, "failed": bool(control > tol)}}


COMMANDS = {
    "yb-check": cmd_yb_check,
    "spectrum": cmd_spectrum,
    "solve-bethe": cmd_solve_bethe,
    "scalar-product": cmd_scalar_product,
    "norm": cmd_norm,
    "dwpf": cmd_dwpf,
    "asm-count": cmd_asm_count,
    "inverse-problem-check": cmd_inverse_problem_check,
    "form-factor": cmd_form_factor,
    "szz": cmd_szz,
    "efp": cmd_efp,
    "identity-suite": cmd_identity_suite,
}


def _add_model(p, default_n: int = 4, default_delta: float = 0.5):
    p.add_argument("--model", choices=("xxx", "xxz"), default="xxz")
    p.add_argument("--delta", type=float, default=default_delta, help="anisotropy of the xxz model")
    p.add_argument("--c", type=complex, default=1j, help="coupling of the xxx model")
    p.add_argument("--N", type=int, default=default_n, help="number of sites")
    p.add_argument("--xi", help="comma-separated complex offsets of the inhomogeneities, e.g. 0.1+0j,-0.2+0j")
    p.add_argument("--xi-file", dest="xi_file", help="file of offsets, one 're im' pair per line")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bethekit", description="Algebraic Bethe ansatz numerics for spin-1/2 chains.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="override the default tolerance")

    p = sub.add_parser("yb-check", parents=[common], help="Yang-Baxter residual on random points")
    _add_model(p)
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("spectrum", parents=[common], help="Hamiltonian spectrum and trace-identity check")
    _add_model(p)

    p = sub.add_parser("solve-bethe", parents=[common], help="solve the (twisted) Bethe equations")
    _add_model(p)
    p.add_argument("--n", type=int, default=None, help="number of magnons (default N/2)")
    p.add_argument("--kappa", type=complex, default=1.0)
    p.add_argument("--method", choices=("log", "homotopy"), default="log")

    for name, helptext in (("scalar-product", "Slavnov determinant against sum and sandwich"),
                           ("norm", "Gaudin norm against the sandwich")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        _add_model(p, default_n=6, default_delta=0.4)
        p.add_argument("--n", type=int, default=2)

    p = sub.add_parser("dwpf", parents=[common], help="Izergin determinant against brute force")
    _add_model(p)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--trials", type=int, default=5)

    p = sub.add_parser("asm-count", parents=[common], help="number of alternating sign matrices")
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("inverse-problem-check", parents=[common], help="local operators from transfer matrices")
    _add_model(p)

    p = sub.add_parser("form-factor", parents=[common], help="local form factor by two routes")
    _add_model(p, default_n=6, default_delta=0.3)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--op", choices=("sigma_plus", "sigma_minus", "sigma_z"), default="sigma_minus")
    p.add_argument("--site", type=int, default=1)

    for name, helptext in (("szz", "two-point sigma^z correlator"), ("efp", "emptiness formation probability")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--model", choices=("xxz",), default="xxz")
        p.add_argument("--delta", type=float, default=0.0 if name == "szz" else 0.5)
        p.add_argument("--N", type=int, default=8)
        p.add_argument("--m", type=int, default=1)

    sub.add_parser("identity-suite", parents=[common], help="random-point residuals of determinant identities")
    return parser


def _passed(result) -> bool:
    if isinstance(result, dict):
        if "passed" in result and "expected_to_fail" not in result and not result["passed"]:
            return False
        return all(_passed(v) for v in result.values())
    if isinstance(result, list):
        return all(_passed(v) for v in result)
    return True


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"bethekit: {exc}\n")
        return EXIT_USAGE
    except (BetheKitError, ValueError, ZeroDivisionError) as exc:
        sys.stderr.write(f"bethekit: {exc}\n")
        return EXIT_PRECONDITION
    result = dict(result)
    result["schema"] = SCHEMA
    result["command"] = args.command
    _emit(result, args.format, out)
    return EXIT_OK if _passed(result) else EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
