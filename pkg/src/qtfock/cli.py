"""Command-line driver: ``qtfock <subcommand> [flags]``.

Results go to stdout as JSON (with a versioned ``"schema"`` key) or CSV,
diagnostics to stderr.  Exit status is 0 on success, 2 on invalid input and
1 on internal errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__
from .combin import joint_cross_nest_polynomial, perm_inv_div_polynomial
from .errors import ResourceLimitError, TruncationError, ValidationError
from .fock import (
    FockParams,
    FockSpace,
    check_adjoint,
    check_commutation,
    gram_matrix,
    matrix_to_csv,
    n_star,
    n_star_scan,
    norm_case,
    operator_norm,
    positivity_report,
    theoretical_norm,
    word_label,
    words_of_length,
)
from .moments import moment_sequence, t_catalan, touchard_riordan, traciality_gap
from .orthopoly import (
    cauchy_transform,
    orthogonality_check,
    qt_hermite,
    t_airy_mp,
    t_airy_zeros,
    t_semicircular_measure,
)
from .poly import Q, T, BivarPoly
from .wigner import ENTRY_LAWS, NORMALIZATIONS, WignerConfig, monte_carlo

SCHEMA_PREFIX = "qtfock."


# ---------------------------------------------------------------------------
# value conversion


def parse_number(text: str | None, mode: str):
    """Decimal string to ``Fraction`` (exact mode) or ``float``; ``None`` stays ``None``."""
    if text is None:
        return None
    try:
        return Fraction(text) if mode == "exact" else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse number {text!r}") from exc


def jsonable(x: Any):
    if isinstance(x, BivarPoly):
        return x.to_json()
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()] if x.dtype != object else [jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    try:
        return float(x)
    except (TypeError, ValueError):
        return str(x)


def _emit_json(kind: str, payload: dict, out) -> None:
    doc = {"schema": f"{SCHEMA_PREFIX}{kind}/1"}
    doc.update(jsonable(payload))
    out.write(json.dumps(doc) + "\n")


def _emit_csv(header: Sequence[str], rows: Sequence[Sequence], out) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_cell(c) for c in r])
    out.write(buf.getvalue())


def _csv_cell(c):
    if isinstance(c, (float, np.floating)):
        return repr(float(c))
    return str(c)


def _poly_rows(p: BivarPoly) -> list[list]:
    return [[i, j, c] for i, j, c in p.sorted_terms()]


def _emit_poly(kind: str, p: BivarPoly, extra: dict, args, out) -> None:
    if args.output == "csv":
        _emit_csv(["q", "t", "c"], _poly_rows(p), out)
    else:
        doc = dict(extra)
        doc.update({k: v for k, v in p.to_json().items() if k != "schema"})
        _emit_json(kind, doc, out)


def _qt(args, symbolic_default: bool = True):
    """``(q, t)`` from flags; the formal variables when both are omitted."""
    q = parse_number(args.q, args.mode)
    t = parse_number(args.t, args.mode)
    if q is None and t is None and symbolic_default:
        return Q, T, True
    if q is None or t is None:
        raise ValidationError("give both --q and --t (or neither for symbolic output)")
    return q, t, False


def _need(value, flag: str):
    if value is None:
        raise ValidationError(f"{flag} is required")
    return value


def _fock_params(args, allow_boundary: bool = False, default_L: int | None = None) -> FockParams:
    q = parse_number(_need(args.q, "--q"), args.mode)
    t = parse_number(_need(args.t, "--t"), args.mode)
    L = args.level if args.level is not None else default_L
    return FockParams(q, t, args.d, _need(L, "--level"), allow_boundary)


def _positional_n(args) -> int:
    n = args.n_pos if args.n_pos is not None else args.n
    return _need(n, "n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_genpoly(args, out):
    n = _positional_n(args)
    _emit_poly("poly", joint_cross_nest_polynomial(n), {"n": n, "statistic": "cross,nest"}, args, out)


def cmd_permpoly(args, out):
    n = _positional_n(args)
    _emit_poly("poly", perm_inv_div_polynomial(n), {"n": n, "statistic": "inv,coinv"}, args, out)


def cmd_moments(args, out):
    K = args.n if args.n is not None else 8
    q, t, symbolic = _qt(args)
    m = moment_sequence(K, q, t)
    if args.output == "csv":
        _emit_csv(["k", "moment"], [[k, v] for k, v in enumerate(m)], out)
        return
    _emit_json("moments", {"q": None if symbolic else q, "t": None if symbolic else t, "moments": m}, out)


def cmd_gram(args, out):
    p = _fock_params(args, allow_boundary=True, default_L=args.n)
    n = args.n if args.n is not None else p.L
    G = gram_matrix(p, n)
    labels = [word_label(w) for w in words_of_length(p.d, n)]
    if args.output == "csv":
        out.write(matrix_to_csv(G, labels))
        return
    _emit_json("gram", {"q": p.q, "t": p.t, "d": p.d, "level": n, "basis": labels, "matrix": G}, out)


def cmd_positivity(args, out):
    p = _fock_params(args, allow_boundary=True, default_L=args.n)
    n = args.n if args.n is not None else p.L
    tol = args.tol if args.tol is not None else 1e-10
    rep = positivity_report(p, n, rel_tol=tol)
    payload = {
        "q": p.q,
        "t": p.t,
        "d": p.d,
        "level": n,
        "min_eigenvalue": rep.min_eigenvalue,
        "is_positive_definite": rep.is_positive_definite,
        "is_positive_semidefinite": rep.is_positive_semidefinite,
    }
    _emit_flat("positivity", payload, args, out)


def cmd_norm(args, out):
    q = float(parse_number(_need(args.q, "--q"), args.mode))
    t = float(parse_number(_need(args.t, "--t"), args.mode))
    case = norm_case(q, t)
    payload: dict = {"norm": theoretical_norm(q, t), "case": case}
    if case == "0<q<t<1":
        payload["n_star"] = n_star(q, t)
        payload["n_star_scan"] = n_star_scan(q, t)
    if args.level is not None:
        p = FockParams(q, t, args.d, args.level)
        payload["numeric_norm"] = operator_norm(p)
        payload["level"] = args.level
    _emit_flat("norm", payload, args, out)


def cmd_check_relations(args, out):
    p = _fock_params(args, default_L=3)
    space = FockSpace(p)
    comm = 0
    for i in range(p.d):
        for j in range(p.d):
            r = check_commutation(p, space.basis_vector(i), space.basis_vector(j))
            comm = max(comm, r)
    payload = {
        "q": p.q,
        "t": p.t,
        "d": p.d,
        "level": p.L,
        "mode": "exact" if p.exact else "float",
        "adjoint_residual": check_adjoint(p),
        "commutation_residual": comm,
    }
    _emit_flat("relations", payload, args, out)


def cmd_hermite(args, out):
    K = args.n if args.n is not None else 5
    q, t, symbolic = _qt(args)
    H = qt_hermite(K, q, t)
    if args.output == "csv":
        rows = [[n, k, c] for n, p in enumerate(H) for k, c in enumerate(p)]
        _emit_csv(["n", "power", "coefficient"], rows, out)
        return
    _emit_json("hermite", {"q": None if symbolic else q, "t": None if symbolic else t, "polynomials": H}, out)


def cmd_orthocheck(args, out):
    K = args.n if args.n is not None else 8
    q, t, symbolic = _qt(args)
    rep = orthogonality_check(K, q, t)
    payload = {
        "q": None if symbolic else q,
        "t": None if symbolic else t,
        "K": K,
        "max_offdiagonal": rep.max_offdiagonal,
        "max_norm_error": rep.max_norm_error,
    }
    _emit_flat("orthocheck", payload, args, out)


def cmd_tcatalan(args, out):
    n = _positional_n(args)
    t = parse_number(args.t, args.mode)
    if t is None:
        coeffs = t_catalan(n).univariate_coefficients("t")
        if args.output == "csv":
            _emit_csv(["power", "coefficient"], list(enumerate(coeffs)), out)
            return
        _emit_json("tcatalan", {"n": n, "coefficients": coeffs}, out)
        return
    _emit_flat("tcatalan", {"n": n, "t": t, "value": t_catalan(n, t)}, args, out)


def cmd_touchard(args, out):
    n = _positional_n(args)
    coeffs = touchard_riordan(n).univariate_coefficients("q")
    if args.output == "csv":
        _emit_csv(["power", "coefficient"], list(enumerate(coeffs)), out)
        return
    _emit_json("touchard", {"n": n, "coefficients": coeffs}, out)


def _float_t(args) -> float:
    return float(parse_number(_need(args.t, "--t"), "float"))


def _digits(args) -> int:
    tol = args.tol if args.tol is not None else 1e-14
    if not tol > 0:
        raise ValidationError("--tol must be positive")
    return max(16, int(-math.log10(tol)) + 2)


def cmd_airy(args, out):
    t = _float_t(args)
    zs = [float(parse_number(z, "float")) for z in (args.z or ["0"])]
    rows = []
    for z in zs:
        v = t_airy_mp(z, t, _digits(args))
        rows.append([z, float(v.value), float(v.derivative), v.error_bound])
    if args.output == "csv":
        _emit_csv(["z", "value", "derivative", "error_bound"], rows, out)
        return
    _emit_json(
        "airy",
        {"t": t, "values": [dict(zip(["z", "value", "derivative", "error_bound"], r)) for r in rows]},
        out,
    )


def cmd_zeros(args, out):
    t = _float_t(args)
    count = args.count if args.count is not None else 5
    zeros = [float(z) for z in t_airy_zeros(t, count)]
    if args.output == "csv":
        _emit_csv(["j", "zero"], [[j + 1, z] for j, z in enumerate(zeros)], out)
        return
    _emit_json("zeros", {"t": t, "count": count, "zeros": zeros}, out)


def cmd_measure(args, out):
    t = _float_t(args)
    tol = args.tol if args.tol is not None else 1e-10
    mu = t_semicircular_measure(t, count=args.count, mass_tol=tol)
    atoms = mu.atoms()
    if args.output == "csv":
        _emit_csv(["location", "mass"], atoms, out)
        return
    _emit_json(
        "measure",
        {
            "t": t,
            "count": mu.count,
            "total_mass": mu.total_mass,
            "mass_defect": mu.mass_defect,
            "atoms": [{"location": x, "mass": m} for x, m in atoms],
        },
        out,
    )


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise ValidationError(f"cannot parse complex number {text!r}") from exc


def cmd_cauchy(args, out):
    t = _float_t(args)
    if args.z:
        points = [_parse_complex(z) for z in args.z]
    else:
        radius = args.radius if args.radius is not None else 2 / math.sqrt(1 - t)
        m = args.count if args.count is not None else 16
        if m < 1:
            raise ValidationError("--count must be positive")
        points = [radius * complex(math.cos(2 * math.pi * k / m), math.sin(2 * math.pi * k / m)) for k in range(m)]
    values = [cauchy_transform(z, t) for z in points]
    if args.output == "csv":
        _emit_csv(["z_re", "z_im", "G_re", "G_im"], [[z.real, z.imag, g.real, g.imag] for z, g in zip(points, values)], out)
        return
    _emit_json("cauchy", {"t": t, "points": [{"z": z, "G": g} for z, g in zip(points, values)]}, out)


def cmd_wigner(args, out):
    rho = float(parse_number(_need(args.rho, "--rho"), "float"))
    cfg = WignerConfig(
        N=args.N if args.N is not None else 200,
        rho=rho,
        n=args.n if args.n is not None else 4,
        trials=args.trials if args.trials is not None else 100,
        seed=args.seed if args.seed is not None else 0,
        entries=args.entries,
        normalization=args.normalization,
    )
    res = monte_carlo(cfg, workers=args.workers)
    if args.per_trial_csv:
        with open(args.per_trial_csv, "w", newline="") as fh:
            _emit_csv(["trial", "statistic"], [[i, v] for i, v in enumerate(res.per_trial)], fh)
    payload = {
        "config": cfg.to_json(),
        "estimate": res.estimate.mean,
        "std_error": res.estimate.std_error,
        "trials": res.estimate.trials,
        "prediction": res.prediction,
        "z_score": res.z_score,
    }
    if args.output == "csv":
        _emit_csv(list(payload)[1:], [[payload[k] for k in list(payload)[1:]]], out)
        return
    _emit_json("wigner", payload, out)


WITNESS_COV = [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]


def cmd_trace_gap(args, out):
    q, t, symbolic = _qt(args)
    cov = WITNESS_COV if args.cov is None else json.loads(args.cov)
    if args.mode == "exact":
        cov = [[Fraction(str(x)) for x in row] for row in cov]
    gap = traciality_gap(cov, q, t)
    payload = {
        "q": None if symbolic else q,
        "t": None if symbolic else t,
        "forward": gap.forward,
        "rotated": gap.rotated,
        "equal": gap.forward == gap.rotated,
    }
    _emit_flat("tracegap", payload, args, out)


def _emit_flat(kind: str, payload: dict, args, out) -> None:
    if args.output == "csv":
        keys = list(payload)
        _emit_csv(keys, [[_flat_cell(payload[k]) for k in keys]], out)
    else:
        _emit_json(kind, payload, out)


def _flat_cell(v):
    if isinstance(v, BivarPoly):
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    return v


COMMANDS = {
    "genpoly": (cmd_genpoly, "joint crossing/nesting polynomial of pairings of [2n]", True),
    "permpoly": (cmd_permpoly, "inversion/coinversion polynomial of S_n", True),
    "moments": (cmd_moments, "moments m_0..m_K (K = --n, default 8)", False),
    "gram": (cmd_gram, "Gram matrix of the deformed inner product on one level", False),
    "positivity": (cmd_positivity, "smallest Gram eigenvalue and definiteness", False),
    "norm": (cmd_norm, "closed-form annihilator norm; numeric value with --level", False),
    "check-relations": (cmd_check_relations, "adjointness and commutation residuals", False),
    "hermite": (cmd_hermite, "(q,t)-Hermite polynomials H_0..H_K", False),
    "orthocheck": (cmd_orthocheck, "orthogonality of H_0..H_K under the moment functional", False),
    "tcatalan": (cmd_tcatalan, "Carlitz-Riordan t-Catalan polynomial", True),
    "touchard": (cmd_touchard, "Touchard-Riordan crossing polynomial", True),
    "airy": (cmd_airy, "t-Airy function values with error bounds", False),
    "zeros": (cmd_zeros, "zeros of A_t(z/t)", False),
    "measure": (cmd_measure, "atoms of the t-semicircular measure", False),
    "cauchy": (cmd_cauchy, "Cauchy transform on points or a circle", False),
    "wigner": (cmd_wigner, "Monte Carlo trace statistic of the Wigner process", False),
    "trace-gap": (cmd_trace_gap, "four-point moments before and after rotation", False),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", help="decimal or fraction, e.g. 0.5 or 1/3")
    common.add_argument("--t", help="decimal or fraction")
    common.add_argument("--rho", help="correlation in [0, 1]")
    common.add_argument("--n", type=int, help="size parameter (order, factors, level)")
    common.add_argument("--d", type=int, default=1, help="one-particle dimension")
    common.add_argument("--level", type=int, help="truncation level L")
    common.add_argument("--N", type=int, help="matrix size")
    common.add_argument("--trials", type=int)
    common.add_argument("--count", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--mode", choices=("exact", "float"), default="exact")
    common.add_argument("--output", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=float)

    parser = argparse.ArgumentParser(prog="qtfock", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, (_, help_text, positional) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if positional:
            sp.add_argument("n_pos", type=int, nargs="?", metavar="n")
        if name == "airy":
            sp.add_argument("--z", action="append", help="evaluation point (repeatable)")
        if name == "cauchy":
            sp.add_argument("--z", action="append", help="complex point such as 3 or 1+2j (repeatable)")
            sp.add_argument("--radius", type=float, help="circle radius when no --z is given")
        if name == "wigner":
            sp.add_argument("--entries", choices=ENTRY_LAWS, default="gaussian")
            sp.add_argument("--normalization", choices=NORMALIZATIONS, default="sqrt")
            sp.add_argument("--workers", type=int)
            sp.add_argument("--per-trial-csv", metavar="PATH")
        if name == "trace-gap":
            sp.add_argument("--cov", help="4x4 covariance as JSON (default: the e1,e1,e2,e2 witness)")
    return parser


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func = COMMANDS[args.command][0]
    try:
        func(args, out)
    except (ValidationError, ResourceLimitError, TruncationError) as exc:
        err.write(f"qtfock {args.command}: error: {exc}\n")
        return 2
    except json.JSONDecodeError as exc:
        err.write(f"qtfock {args.command}: error: invalid JSON: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001
        err.write(f"qtfock {args.command}: internal error: {type(exc).__name__}: {exc}\n")
        return 1
    return 0
