"""Acceptance suite: eleven end-to-end criteria, each reporting one PASS/FAIL line."""

import io
import json
import math
import re
import time
from fractions import Fraction as F

import numpy as np
import pytest

import oracles
from qtfock.cli import main as cli_main
from qtfock.combin import joint_cross_nest_polynomial, qt_factorial
from qtfock.fock import (
    FockParams,
    FockSpace,
    check_adjoint,
    check_commutation,
    inner_product,
    n_star,
    n_star_scan,
    operator_norm,
    positivity_report,
    theoretical_norm,
    vacuum_moment,
)
from qtfock.moments import (
    dyck_moment,
    gaussian_moment,
    qt_lambdas,
    sfraction_series,
    t_catalan,
    touchard_riordan,
    traciality_gap,
)
from qtfock.orthopoly import cauchy_series, moment_functional_gram, t_semicircular_measure
from qtfock.poly import BivarPoly, Q, T
from qtfock.wigner import WignerConfig, monte_carlo

# reference literals for the fourth and sixth moments
FOURTH = "1 + q + t"
SIXTH = "1 + 2q + 2t + 2qt + q^2+ t^2+ 2q^2t + 2qt^2+ q^3+ t^3"

RATIONAL_QT = [(F(0), F(1)), (F(1, 3), F(1, 2)), (F(-1, 2), F(2, 3)), (F(3, 5), F(1)), (F(1, 7), F(1, 5)), (F(-2, 9), F(1, 3))]


def parse_literal(text: str) -> BivarPoly:
    """Parse sums like ``2q^2t + q^3`` into a polynomial."""
    total = BivarPoly()
    for term in text.replace(" ", "").split("+"):
        m = re.fullmatch(r"(\d*)((?:[qt](?:\^\d+)?)*)", term)
        assert m, term
        c = int(m.group(1) or 1)
        i = j = 0
        for var, exp in re.findall(r"([qt])(?:\^(\d+))?", m.group(2)):
            if var == "q":
                i += int(exp or 1)
            else:
                j += int(exp or 1)
        total = total + BivarPoly.monomial(i, j, c)
    return total


def report(log, number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] acceptance {number}: {title} ({detail})"
    print(line)
    log.append(line)
    assert ok, line


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main(list(argv), out=out, err=err)
    assert code == 0, err.getvalue()
    return json.loads(out.getvalue())


def test_exact_moment_polynomials(acceptance_log):
    start = time.perf_counter()
    p2 = BivarPoly.from_json(run_cli("genpoly", "2", "--output", "json"))
    p3 = BivarPoly.from_json(run_cli("genpoly", "3", "--output", "json"))
    elapsed = time.perf_counter() - start
    ok = p2 == parse_literal(FOURTH) and p3 == parse_literal(SIXTH) and len(p3.terms) == 10 and elapsed < 1.0
    report(acceptance_log, 1, "genpoly 2 and 3 match the reference literals", ok, f"{elapsed:.3f}s")


def test_triple_oracle(acceptance_log):
    start = time.perf_counter()
    fractions = sfraction_series(qt_lambdas(), 7)
    ok = all(gaussian_moment(2 * n) == dyck_moment(n) == fractions[n] == BivarPoly(oracles.genpoly(n)) for n in range(7))
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 10.0
    report(acceptance_log, 2, "pairings = Dyck DP = S-fraction for n <= 6", ok, f"{elapsed:.2f}s")


def test_fock_operator_oracle(acceptance_log):
    ok = True
    for q, t in RATIONAL_QT:
        p = FockParams(q, t, d=1, L=8)
        for n in range(1, 5):
            got = vacuum_moment(p, [([1], "s")] * (2 * n))
            ok = ok and isinstance(got, F) and got == dyck_moment(n, q, t)
    report(acceptance_log, 3, "vacuum moments on (d=1, L=8) equal the Dyck DP, exact", ok, f"{len(RATIONAL_QT)} (q,t) points, n<=4")


def _grid(kind):
    ts = [F(1, 5), F(2, 5), F(3, 5), F(4, 5), F(1)]
    fracs = [F(-4, 5), F(-2, 5), F(0), F(2, 5), F(4, 5)]
    pts = [(r * t, t) for t in ts for r in fracs]
    return pts if kind == "exact" else [(float(q), float(t)) for q, t in pts]


def _relation_residuals(q, t):
    p = FockParams(q, t, d=2, L=5)
    s = FockSpace(p)
    es = [s.basis_vector(0), s.basis_vector(1)]
    comm = max(check_commutation(p, f, g) for f in es for g in es)
    return check_adjoint(p), comm


def test_commutation_and_adjointness(acceptance_log):
    exact = [_relation_residuals(q, t) for q, t in _grid("exact")]
    flt = [_relation_residuals(q, t) for q, t in _grid("float")]
    exact_ok = all(a == 0 and c == 0 for a, c in exact)
    worst = max(max(a, c) for a, c in flt)
    ok = exact_ok and worst <= 1e-12
    report(acceptance_log, 4, "commutation/adjoint residuals on (d,L)=(2,5), 5x5 grid", ok, f"rational exact={exact_ok}, float max={worst:.2e}")


ANTISYM = {(0, 1): 1, (1, 0): -1}
SYM = {(0, 1): 1, (1, 0): 1}


def test_positivity_boundary(acceptance_log):
    samples = [(0.0, 1.0), (0.5, 0.8), (-0.7, 0.75), (0.95, 0.99), (-0.2, 0.3), (0.1, 0.15)]
    mins = [positivity_report(FockParams(q, t, d=2, L=3), 3).min_eigenvalue for q, t in samples]
    ok = all(m > 0 for m in mins)
    for q, t in [(F(1, 3), F(3, 4)), (F(-1, 2), F(1, 2)), (F(1, 2), F(1, 2)), (F(4, 5), F(4, 5))]:
        p = FockParams(q, t, d=2, L=2, allow_boundary=True)
        ok = ok and inner_product(p, ANTISYM, ANTISYM) == 2 * t - 2 * q
        ok = ok and inner_product(p, SYM, SYM) == 2 * t + 2 * q
    boundary = FockParams(F(1, 2), F(1, 2), d=2, L=2, allow_boundary=True)
    null_norm = inner_product(boundary, ANTISYM, ANTISYM)
    ok = ok and null_norm == 0
    report(acceptance_log, 5, "Gram positive for |q|<t, exact zero norm at q=t", ok, f"min eig {min(mins):.3g}, null norm {null_norm}")


NORM_GRID = [(-0.3, 0.5), (-0.5, 0.9), (0.0, 0.7), (0.0, 1.0), (0.5, 1.0), (0.3, 1.0), (0.5, 0.8), (0.1, 0.9), (0.3, 0.6), (0.7, 0.95)]


def _level_for(q, t):
    # at t = 1 the truncated norm approaches its limit like q^L
    if t == 1.0 and q > 0:
        return max(12, math.ceil(math.log(1e-9) / math.log(q)))
    return 12


def test_norm_formula(acceptance_log):
    start = time.perf_counter()
    main_val = operator_norm(FockParams(0.5, 0.8, d=1, L=12))
    main_ok = abs(main_val - math.sqrt(1.3)) < 1e-6 and n_star(0.5, 0.8) == 2 == n_star_scan(0.5, 0.8)
    worst = 0.0
    for q, t in NORM_GRID:
        num = operator_norm(FockParams(q, t, d=1, L=_level_for(q, t)))
        worst = max(worst, abs(num - theoretical_norm(q, t)))
    elapsed = time.perf_counter() - start
    ok = main_ok and worst < 1e-6 and elapsed < 30
    report(acceptance_log, 6, "norm sqrt(1.3) at (0.5,0.8), n*=2, three-case grid", ok, f"|err|={abs(main_val - math.sqrt(1.3)):.1e}, grid max {worst:.1e}, {elapsed:.1f}s")


def test_touchard_and_t_catalan(acceptance_log):
    ok = True
    for n in range(9):
        J = joint_cross_nest_polynomial(n)
        ok = ok and touchard_riordan(n) == J.subs(t=1) and t_catalan(n) == J.subs(q=0)
    catalan = [t_catalan(n, 1) for n in range(6)]
    ok = ok and catalan == [1, 1, 2, 5, 14, 42]
    report(acceptance_log, 7, "Touchard-Riordan and t-Catalan specializations, n <= 8", ok, f"C(1)={catalan}")


def test_orthogonality(acceptance_log):
    ok = True
    for q, t in RATIONAL_QT:
        G = moment_functional_gram(8, q, t)
        for m in range(9):
            for n in range(9):
                if m != n:
                    ok = ok and G[m][n] == 0
            ok = ok and G[m][m] == qt_factorial(m, q, t)
    report(acceptance_log, 8, "L(H_m H_n) = delta [n]_{q,t}! exactly, m,n <= 8", ok, f"{len(RATIONAL_QT)} rational points")


def test_measure(acceptance_log):
    start = time.perf_counter()
    t = 0.5
    mu = t_semicircular_measure(t, mass_tol=1e-10)
    moment_err = max(abs(mu.moment(2 * n) - float(t_catalan(n, F(t)))) for n in range(6))
    series = cauchy_series(t, 10)
    fraction = [float(x) for x in sfraction_series(lambda n: F(t) ** (n - 1), 10)]
    series_err = max(abs(a - b) for a, b in zip(series, fraction))
    elapsed = time.perf_counter() - start
    ok = mu.mass_defect < 1e-10 and moment_err < 1e-8 and series_err < 1e-10 and elapsed < 60
    report(
        acceptance_log,
        9,
        "t=0.5 measure: mass, moments, Cauchy series",
        ok,
        f"{mu.count} atom pairs, defect {mu.mass_defect:.1e}, moment err {moment_err:.1e}, series err {series_err:.1e}, {elapsed:.1f}s",
    )


def test_traciality_gap(acceptance_log):
    witness = [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]
    gap = traciality_gap(witness)
    at_one = traciality_gap(witness, Q, 1)
    ok = gap.forward == 1 and gap.rotated == T and at_one.forward == at_one.rotated == 1
    report(acceptance_log, 10, "four-point moments (1, t) on the witness, equal at t=1", ok, f"forward={gap.forward}, rotated={gap.rotated}")


def test_wigner_monte_carlo(acceptance_log):
    start = time.perf_counter()
    cfg = WignerConfig(N=200, rho=0.6, n=4, trials=100, seed=20240601)
    a = monte_carlo(cfg)
    b = monte_carlo(cfg, workers=4)
    one = monte_carlo(WignerConfig(N=200, rho=1.0, n=4, trials=100, seed=20240602))
    elapsed = time.perf_counter() - start
    reproducible = np.array_equal(a.per_trial, b.per_trial) and a.estimate == b.estimate
    ok = (
        abs(a.prediction - 0.4896) < 1e-12
        and abs(a.z_score) < 4
        and one.prediction == 2
        and abs(one.z_score) < 4
        and reproducible
        and elapsed < 120
    )
    report(
        acceptance_log,
        11,
        "Wigner process trace statistics",
        ok,
        f"rho=0.6 z={a.z_score:+.2f}, rho=1 z={one.z_score:+.2f}, reproducible={reproducible}, {elapsed:.1f}s",
    )


@pytest.mark.parametrize("text,expected", [(FOURTH, 1 + Q + T), ("2q^2t + q^3", 2 * Q**2 * T + Q**3)])
def test_literal_polynomial_parser(text, expected):
    assert parse_literal(text) == expected
