"""Orthogonal polynomials of the deformed Gaussian and the atomic ``q = 0`` law.

Polynomials in ``z`` are dense coefficient lists, lowest degree first, whose
entries live in the same ring as ``q`` and ``t``.

The ``q = 0`` distribution is a symmetric discrete measure built from the
zeros of the t-Airy function

    A_t(z) = sum_n t^(n^2) / ((1 - t) ... (1 - t^n)) (-z)^n.

Its even-moment generating function is ``A_t(w) / A_t(w / t)``.  If ``z_j``
are the zeros of ``A_t(z / t)``, the atoms sit at ``+-1/sqrt(z_j)`` with mass
``-t A_t(z_j) / (2 z_j A_t'(z_j / t))`` each.

The series has huge cancelling terms for large ``|z|`` (the largest term is
about ``exp(log(z)^2 / (4 log(1/t)))``), so evaluation runs in mpmath with a
working precision sized from that estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import mpmath
import numpy as np

from .combin import qt_integer
from .errors import DomainError, RootFindingError, ValidationError
from .moments import moment_sequence, t_catalan
from .poly import BivarPoly, Q, T

# ---------------------------------------------------------------------------
# three-term recurrences


def _recurrence(K: int, coeff) -> list[list]:
    if K < 0:
        raise ValidationError("K must be non-negative")
    polys: list[list] = [[1]]
    if K >= 1:
        polys.append([0, 1])
    for n in range(1, K):
        b = coeff(n)
        nxt = [0] + list(polys[n])
        for i, c in enumerate(polys[n - 1]):
            nxt[i] = nxt[i] - b * c
        polys.append(nxt)
    if any(isinstance(c, BivarPoly) for p in polys for c in p):
        polys = [[BivarPoly.coerce(c) for c in p] for p in polys]
    return polys


def qt_hermite(K: int, q=Q, t=T) -> list[list]:
    """``H_0, ..., H_K`` from ``z H_n = H_(n+1) + [n]_{q,t} H_(n-1)``."""
    return _recurrence(K, lambda n: qt_integer(n, q, t))


def t_chebyshev(K: int, t=T) -> list[list]:
    """``U_0, ..., U_K`` from ``z U_n = U_(n+1) + t^(n-1) U_(n-1)``."""
    return _recurrence(K, lambda n: t ** (n - 1))


def poly_mul(a: Sequence, b: Sequence) -> list:
    out: list = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def apply_functional(p: Sequence, moments: Sequence):
    """``L(p) = sum_k p_k m_k``."""
    if len(p) > len(moments):
        raise ValidationError(f"need {len(p)} moments, have {len(moments)}")
    total = 0
    for c, m in zip(p, moments):
        total = total + c * m
    return total


def moment_functional_gram(K: int, q=Q, t=T) -> list[list]:
    """Matrix ``L(H_m H_n)`` for ``0 <= m, n <= K``."""
    H = qt_hermite(K, q, t)
    m = moment_sequence(2 * K, q, t)
    return [[apply_functional(poly_mul(H[i], H[j]), m) for j in range(K + 1)] for i in range(K + 1)]


def _magnitude(x):
    if isinstance(x, BivarPoly):
        return max((abs(c) for c in x.terms.values()), default=0)
    return abs(x)


class OrthogonalityReport(NamedTuple):
    max_offdiagonal: object
    max_norm_error: object


def orthogonality_check(K: int, q=Q, t=T) -> OrthogonalityReport:
    """Largest ``|L(H_m H_n)|`` over ``m != n <= K`` and largest ``|L(H_n^2) - [n]_{q,t}!|``.

    Both are exact zeros for rational or symbolic ``q, t`` (polynomial
    residuals are measured by their largest coefficient).
    """
    G = moment_functional_gram(K, q, t)
    off = 0
    diag = 0
    fact = 1
    for i in range(K + 1):
        if i:
            fact = fact * qt_integer(i, q, t)
        diag = max(diag, _magnitude(G[i][i] - fact))
        for j in range(K + 1):
            if i != j:
                off = max(off, _magnitude(G[i][j]))
    return OrthogonalityReport(off, diag)


# ---------------------------------------------------------------------------
# t-Airy function


def _check_t(t) -> None:
    if not (0 < t < 1):
        raise DomainError(f"t-Airy needs 0 < t < 1, got t={t}")


def _log10_max_term(absz: float, t: float) -> tuple[float, int]:
    """Largest ``log10 |term_n|`` and the index where terms start to shrink for good."""
    if absz == 0:
        return 0.0, 0
    lz, lt = math.log(absz), math.log(t)
    logterm, best, n = 0.0, 0.0, 0
    while True:
        inc = lz + (2 * n + 1) * lt - math.log1p(-(t ** (n + 1)))
        if inc < 0 and n > 0:
            break
        logterm += inc
        n += 1
        best = max(best, logterm)
    return best / math.log(10), n


def _working_dps(absz: float, t: float, digits: int) -> int:
    return int(_log10_max_term(absz, t)[0]) + digits + 15


class AiryValue(NamedTuple):
    value: object
    derivative: object
    error_bound: float
    terms: int


def t_airy_mp(z, t, digits: int = 30) -> AiryValue:
    """``A_t(z)`` and ``A_t'(z)`` as mpmath numbers with an absolute error bound.

    Summation stops once the consecutive-term ratio
    ``r_n = |z| t^(2n+1) / (1 - t^(n+1))`` is at most 1/4, which then bounds
    every later ratio, and the geometric tail bound ``|term| / (1 - r)`` is
    below ``10^-digits``.  The bound also covers the derivative tail and the
    rounding of the cancelling partial sums.
    """
    _check_t(float(t))
    absz = float(abs(z))
    dps = _working_dps(absz, float(t), digits)
    with mpmath.workdps(dps):
        z = mpmath.mpmathify(z)
        t = mpmath.mpf(t)
        tol = mpmath.mpf(10) ** (-digits)
        term = mpmath.mpf(1)  # t^(n^2) / (t;t)_n (-z)^n
        coef = mpmath.mpf(1)  # t^(n^2) / (t;t)_n
        value, deriv = term, mpmath.mpf(0)
        n = 0
        biggest = mpmath.mpf(1)
        while True:
            ratio = t ** (2 * n + 1) / (1 - t ** (n + 1))
            coef = coef * ratio
            n += 1
            term = term * (-z) * ratio
            dterm = -n * coef * (-z) ** (n - 1) if n > 1 else -coef
            value += term
            deriv += dterm
            biggest = max(biggest, abs(term), abs(dterm))
            r_next = abs(z) * t ** (2 * n + 1) / (1 - t ** (n + 1))
            if r_next <= 0.25:
                tail = (abs(term) + abs(dterm)) * 2 * r_next / (1 - 2 * r_next)
                if tail < tol:
                    break
        rounding = biggest * n * mpmath.mpf(10) ** (-dps + 2)
        bound = float(tail + rounding)
        return AiryValue(+value, +deriv, bound, n + 1)


def t_airy(z: float, t: float, tol: float = 1e-14) -> float:
    """``A_t(z)`` for real ``z``, accurate to ``tol`` in absolute terms."""
    _check_t(t)
    if not (tol > 0):
        raise ValidationError("tol must be positive")
    digits = max(16, int(-math.log10(tol)) + 2)
    return float(t_airy_mp(z, t, digits).value)


def t_airy_derivative(z: float, t: float, tol: float = 1e-14) -> float:
    _check_t(t)
    digits = max(16, int(-math.log10(tol)) + 2)
    return float(t_airy_mp(z, t, digits).derivative)


# ---------------------------------------------------------------------------
# zeros of A_t(z / t)

MAX_MEASURE_T = 0.95


def _rescaled(z, t, digits: int = 40) -> AiryValue:
    with mpmath.workdps(_working_dps(float(z) / float(t), float(t), digits)):
        return t_airy_mp(mpmath.mpf(z) / mpmath.mpf(t), t, digits)


def _sign(z, t) -> int:
    """Certified sign of ``A_t(z / t)``; 0 when the error bound swamps the value."""
    v = _rescaled(z, t)
    if abs(v.value) <= v.error_bound:
        return 0
    return 1 if v.value > 0 else -1


def _refine(lo, hi, t, rel_tol: float) -> "mpmath.mpf":
    """Illinois regula falsi on a certified bracket, bisecting every fourth step."""
    with mpmath.workdps(60):
        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        f_lo = _rescaled(lo, t).value
        f_hi = _rescaled(hi, t).value
        kept = None
        for it in range(1, 400):
            if hi - lo <= rel_tol * hi:
                return (lo + hi) / 2
            mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
            if it % 4 == 0 or not (lo < mid < hi):
                mid = (lo + hi) / 2
            f_mid = _rescaled(mid, t).value
            if f_mid == 0:
                return mid
            if (f_mid > 0) == (f_lo > 0):
                lo, f_lo = mid, f_mid
                if kept == "hi":
                    f_hi /= 2
                kept = "hi"
            else:
                hi, f_hi = mid, f_mid
                if kept == "lo":
                    f_lo /= 2
                kept = "lo"
    raise RootFindingError(f"root refinement did not converge in [{lo}, {hi}]")


@lru_cache(maxsize=64)
def _zeros_cached(t: float, count: int, rel_tol: float) -> tuple:
    zeros: list = []
    grid_ratio = t ** -0.25
    z = 1e-3 * (1 - t)
    s_prev = _sign(z, t)
    if s_prev <= 0:
        raise RootFindingError(f"A_t(z/t) not certified positive near 0 (t={t})")
    # generous horizon: zeros grow roughly like t^(-2j)
    horizon = 1e6 * (1 / (1 - t)) * t ** (-2.5 * (count + 2))
    steps = 0
    while len(zeros) < count:
        z_next = z * grid_ratio
        s_next = _sign(z_next, t)
        nudges = 0
        while s_next == 0 and nudges < 20:
            z_next *= 1.0 + 1e-3
            s_next = _sign(z_next, t)
            nudges += 1
        if s_next == 0:
            raise RootFindingError(f"cannot certify the sign of A_t(z/t) near z={z_next:.6g} (t={t})")
        if s_next != s_prev:
            zeros.append(_refine(z, z_next, t, rel_tol))
        s_prev = s_next
        z = z_next
        steps += 1
        if z > horizon:
            raise RootFindingError(
                f"found {len(zeros)} of {count} zeros of A_t(z/t) below the search horizon {horizon:.3g} "
                f"after {steps} grid steps (t={t})"
            )
    _validate_zeros(zeros, t)
    return tuple(zeros)


def _validate_zeros(zeros: list, t: float) -> None:
    signs = []
    for j, z in enumerate(zeros):
        if z <= 0:
            raise RootFindingError(f"zero {j} is not positive: {z}")
        if j and not zeros[j - 1] < z:
            raise RootFindingError("zeros are not strictly increasing")
        d = _rescaled(z, t).derivative
        if d == 0:
            raise RootFindingError(f"zero {j} at {z} is not simple")
        signs.append(d > 0)
    if any(a == b for a, b in zip(signs, signs[1:])):
        raise RootFindingError("derivative signs at consecutive zeros do not alternate; a zero was missed")


def t_airy_zeros(t: float, count: int, rel_tol: float = 1e-20) -> list:
    """First ``count`` positive zeros of ``A_t(z / t)``, increasing, as mpmath numbers.

    A geometric grid with ratio ``t^(-1/4)`` (much finer than the zero
    spacing) is scanned for certified sign changes; each bracket is refined
    to ``rel_tol``.  Positivity, simplicity and interlacing of the zeros are
    validated.
    """
    t = float(t)
    _check_t(t)
    if t > MAX_MEASURE_T:
        raise DomainError(f"zero search is restricted to t <= {MAX_MEASURE_T}, got t={t}")
    if int(count) != count or count < 1:
        raise ValidationError("count must be a positive integer")
    return list(_zeros_cached(t, int(count), float(rel_tol)))


# ---------------------------------------------------------------------------
# the atomic measure


@dataclass(frozen=True)
class DiscreteMeasure:
    """Symmetric atomic measure; ``locations[j] > 0`` carries ``masses[j]`` at each of ``+-locations[j]``."""

    t: float
    locations: np.ndarray
    masses: np.ndarray
    zeros: tuple = field(repr=False, default=())

    @property
    def count(self) -> int:
        return len(self.locations)

    def atoms(self) -> list[tuple[float, float]]:
        """All ``(location, mass)`` pairs sorted by location."""
        pts = [(-x, m) for x, m in zip(self.locations, self.masses)]
        pts += [(x, m) for x, m in zip(self.locations, self.masses)]
        return sorted((float(x), float(m)) for x, m in pts)

    @property
    def total_mass(self) -> float:
        return float(2 * math.fsum(self.masses))

    @property
    def mass_defect(self) -> float:
        return 1.0 - self.total_mass

    def moment(self, k: int) -> float:
        if k % 2:
            return 0.0
        return float(2 * math.fsum(m * x**k for x, m in zip(self.locations, self.masses)))

    def cauchy(self, z: complex) -> complex:
        """``sum_atoms mass / (z - location)``."""
        z = complex(z)
        return complex(sum(m * (1 / (z - x) + 1 / (z + x)) for x, m in zip(self.locations, self.masses)))

    def support_radius(self) -> float:
        return float(self.locations.max()) if self.count else 0.0


def _atoms_from_zeros(zeros: Sequence, t: float) -> tuple[np.ndarray, np.ndarray]:
    locs, masses = [], []
    for z in zeros:
        with mpmath.workdps(_working_dps(float(z), t, 40)):
            a = t_airy_mp(z, t, 40).value
            d = _rescaled(z, t).derivative
            mass = -mpmath.mpf(t) * a / (2 * z * d)
            locs.append(float(1 / mpmath.sqrt(z)))
            masses.append(float(mass))
    return np.array(locs), np.array(masses)


def t_semicircular_measure(t: float, count: int | None = None, mass_tol: float = 1e-10, max_count: int = 400) -> DiscreteMeasure:
    """The ``q = 0`` law as ``2 * count`` atoms.

    With ``count=None`` atoms are added until ``1 - total_mass < mass_tol``;
    masses decay roughly like ``t^j`` which sets the next guess.
    """
    t = float(t)
    _check_t(t)
    if t > MAX_MEASURE_T:
        raise DomainError(f"measure computations are restricted to t <= {MAX_MEASURE_T}, got t={t}")
    if count is not None:
        zeros = t_airy_zeros(t, count)
        locs, masses = _atoms_from_zeros(zeros, t)
        return _checked_measure(t, locs, masses, zeros)
    n = 8
    while True:
        zeros = t_airy_zeros(t, n)
        locs, masses = _atoms_from_zeros(zeros, t)
        mu = _checked_measure(t, locs, masses, zeros)
        if mu.mass_defect < mass_tol:
            return mu
        if n >= max_count:
            raise RootFindingError(f"mass defect {mu.mass_defect:.3g} still above {mass_tol} with {n} atoms")
        extra = math.ceil(math.log(max(mu.mass_defect, 1e-300) / mass_tol) / math.log(1 / t)) + 2
        n = min(max_count, n + max(extra, 4))


def _checked_measure(t, locs, masses, zeros) -> DiscreteMeasure:
    if np.any(masses <= 0):
        raise RootFindingError("computed a non-positive atom mass")
    if 2 * masses.sum() > 1 + 1e-9:
        raise RootFindingError(f"atom masses sum to {2 * masses.sum()} > 1")
    return DiscreteMeasure(t, locs, masses, tuple(zeros))


def support_bound(t: float) -> float:
    return 2 / math.sqrt(1 - t)


# ---------------------------------------------------------------------------
# Cauchy transform


def cauchy_transform(z: complex, t: float, rel_tol: float = 1e-12) -> complex:
    """``G(z) = (1/z) A_t(1/z^2) / A_t(1/(t z^2))`` for ``z`` off the support."""
    t = float(t)
    _check_t(t)
    z = complex(z)
    if z == 0:
        raise DomainError("z = 0 lies on the support")
    w = 1 / (z * z)
    digits = max(20, int(-math.log10(rel_tol)) + 6)
    num = t_airy_mp(w, t, digits)
    den = t_airy_mp(w / t, t, digits)
    if abs(den.value) <= max(den.error_bound * 1e3, 10 ** (-digits + 6)):
        raise DomainError(f"A_t(1/(t z^2)) vanishes to working accuracy at z={z}; z is (near) an atom")
    return complex(num.value / den.value) / z


def airy_coefficients(t, K: int) -> list:
    """``t^(n^2) / (t;t)_n (-1)^n`` for ``n < K`` in the arithmetic of ``t``."""
    out, coef = [], t**0
    for n in range(K):
        if n:
            coef = coef * t ** (2 * n - 1) / (1 - t**n)
        out.append(coef * (-1) ** n)
    return out


def cauchy_series(t, K: int) -> list:
    """First ``K`` coefficients ``c_n`` of ``A_t(w)/A_t(w/t) = sum c_n w^n`` by series division.

    ``G(z) = sum_n c_n z^(-2n-1)``.  With float ``t`` the division runs in
    exact rationals of the binary value and is returned as floats.
    """
    if K < 0:
        raise ValidationError("K must be non-negative")
    as_float = isinstance(t, float)
    tt = Fraction(t) if as_float else t
    _check_t(tt)
    a = airy_coefficients(tt, K)
    b = [c / tt**n for n, c in enumerate(a)]
    out: list = []
    for n in range(K):
        acc = a[n]
        for k in range(n):
            acc = acc - out[k] * b[n - k]
        out.append(acc / b[0])
    return [float(x) for x in out] if as_float else out


def catalan_moments(t: float, K: int) -> list[float]:
    """``t_catalan(n)`` at ``t`` for ``n < K`` as floats (the even moments)."""
    return [float(t_catalan(n, Fraction(t))) for n in range(K)]
