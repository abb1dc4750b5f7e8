"""Moments of the deformed Gaussian: Wick sums, Dyck paths and continued fractions.

Every function is generic in the ring of ``q`` and ``t``: pass the formal
variables :data:`~qtfock.poly.Q` and :data:`~qtfock.poly.T` (the default) for
exact polynomials, :class:`fractions.Fraction` for exact values, or floats.

>>> from qtfock.moments import dyck_moment
>>> dyck_moment(2)
BivarPoly('1 + q + t')
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .combin import (
    crossings,
    iter_noncrossing_pair_partitions,
    iter_pair_partitions,
    joint_cross_nest_polynomial,
    matching_class,
    nestings,
    qt_integer,
)
from .errors import ValidationError
from .poly import ONE as POLY_ONE
from .poly import BivarPoly, Q, T


def validate_covariance(C, size: int | None = None, tol: float = 1e-12) -> list[list]:
    """Return ``C`` as a list of rows after checking shape, symmetry and positivity."""
    rows = [list(r) for r in C]
    k = len(rows)
    if any(len(r) != k for r in rows):
        raise ValidationError("covariance must be a square matrix")
    if size is not None and k != size:
        raise ValidationError(f"covariance must be {size}x{size}, got {k}x{k}")
    for i in range(k):
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise ValidationError(f"covariance not symmetric at ({i + 1}, {j + 1})")
    if k:
        eig = np.linalg.eigvalsh(np.array(rows, dtype=float))
        if eig[0] < -tol * max(1.0, abs(eig[-1])):
            raise ValidationError("covariance is not positive semi-definite")
    return rows


def _lift(x, q, t):
    # keep symbolic results symbolic even when they collapse to a constant
    if isinstance(q, BivarPoly) or isinstance(t, BivarPoly):
        return BivarPoly.coerce(x)
    return x


def _unit_covariance(k: int) -> list[list[int]]:
    return [[1] * k for _ in range(k)]


def wick_mixed_moment(e, C=None, q=Q, t=T):
    """Vacuum moment of ``a(h_1)^{e_1} ... a(h_k)^{e_k}``.

    ``e`` is a word over ``'*'`` (creation) and ``'1'`` (annihilation) and
    ``C[i][j] = <h_{i+1}, h_{j+1}>``.  The sum runs over pairings compatible
    with the reversed word, weighted by ``q^cross t^nest`` and the product of
    the paired inner products.  Zero when the reversed word is not Dyck.
    """
    k = len(e)
    C = _unit_covariance(k) if C is None else validate_covariance(C, size=k)
    if k % 2:
        return 0
    total = 0
    for V in matching_class(e):
        weight = q ** crossings(V) * t ** nestings(V)
        for w, z in V.pairs:
            # reading position p is original position k + 1 - p
            weight = weight * C[k - w][k - z]
        total = total + weight
    return total


def gaussian_moment(n: int, C=None, q=Q, t=T):
    """``phi(s(h_1) ... s(h_n))``: the Wick sum over all pairings of ``[n]``.

    With ``C`` omitted every ``h_i`` is the same unit vector and the result is
    the joint crossing/nesting generating polynomial evaluated at ``(q, t)``.
    """
    if n < 0:
        raise ValidationError("n must be non-negative")
    if C is None:
        if n % 2:
            return 0
        poly = joint_cross_nest_polynomial(n // 2)
        return poly if (q is Q and t is T) else poly.evaluate(q, t)
    C = validate_covariance(C, size=n)
    if n % 2:
        return 0
    total = 0
    for V in iter_pair_partitions(n // 2):
        weight = q ** crossings(V) * t ** nestings(V)
        for w, z in V.pairs:
            weight = weight * C[w - 1][z - 1]
        total = total + weight
    return total


def dyck_moment(n: int, q=Q, t=T):
    """``phi(s^{2n})`` by dynamic programming over Dyck paths of semilength ``n``.

    Up-steps weigh 1 and a down-step from height ``m`` weighs ``[m]_{q,t}``.
    """
    if n < 0:
        raise ValidationError("n must be non-negative")
    down = [qt_integer(m, q, t) for m in range(n + 1)]
    f: list = [1] + [0] * n
    for step in range(2 * n):
        g: list = [0] * (n + 1)
        for h, val in enumerate(f):
            if isinstance(val, int) and val == 0:
                continue
            if h + 1 <= n and h + 1 <= 2 * n - step - 1:
                g[h + 1] = g[h + 1] + val
            if h >= 1:
                g[h - 1] = g[h - 1] + val * down[h]
        f = g
    return _lift(f[0], q, t)


def _series_geometric(a: list, K: int) -> list:
    """``1 / (1 - a)`` for a series with zero constant term, truncated to ``K`` terms."""
    g: list = [1] + [0] * (K - 1)
    for n in range(1, K):
        acc = 0
        for k in range(1, n + 1):
            acc = acc + a[k] * g[n - k]
        g[n] = acc
    return g


def sfraction_series(lambdas: Sequence | Callable[[int], object], K: int) -> list:
    """First ``K`` power-series coefficients of ``1/(1 - l_1 z/(1 - l_2 z/(1 - ...)))``.

    The fraction is truncated at depth ``K`` and evaluated bottom-up; levels
    below depth ``j`` only influence coefficients of order ``>= j``, so the
    truncation fixes coefficients ``0..K-1``.  ``lambdas`` is a callable
    ``n -> l_n`` (1-based) or a sequence ``[l_1, l_2, ...]``.
    """
    if K < 0:
        raise ValidationError("K must be non-negative")
    if K == 0:
        return []
    if callable(lambdas):
        lam = [lambdas(j) for j in range(1, K + 1)]
    else:
        lam = list(lambdas)
        if len(lam) < K - 1:
            raise ValidationError(f"need at least {K - 1} level weights for {K} coefficients")
        lam = lam[:K] + [0] * max(0, K - len(lam))
    F: list = [1] + [0] * (K - 1)
    for j in range(K, 0, -1):
        # F_j = 1 / (1 - l_j z F_{j+1})
        a = [0] + [lam[j - 1] * c for c in F[: K - 1]]
        F = _series_geometric(a, K)
    return F


def qt_lambdas(q=Q, t=T) -> Callable[[int], object]:
    return lambda n: qt_integer(n, q, t)


def moment_sequence(K: int, q=Q, t=T) -> list:
    """``m_0, ..., m_K`` of the deformed Gaussian, zero at odd indices."""
    if K < 0:
        raise ValidationError("K must be non-negative")
    out: list = []
    for k in range(K + 1):
        out.append(_lift(0, q, t) if k % 2 else dyck_moment(k // 2, q, t))
    return out


def touchard_riordan(n: int) -> BivarPoly:
    """Crossing polynomial of pairings of ``[2n]`` from the alternating binomial sum.

    The numerator is divided by ``(1 - q)^n`` exactly; a remainder would mean
    a bug and raises :class:`~qtfock.errors.InexactDivisionError`.
    """
    if n < 0:
        raise ValidationError("n must be non-negative")
    num = BivarPoly()
    for k in range(-n, n + 1):
        num = num + BivarPoly.monomial(k * (k - 1) // 2, 0, (-1) ** (k % 2) * math.comb(2 * n, n + k))
    return num.exact_div((1 - Q) ** n)


def t_catalan(n: int, t=T):
    """Carlitz-Riordan ``C_n(t)`` from ``C_n = sum_k t^(k-1) C_(k-1) C_(n-k)``."""
    if n < 0:
        raise ValidationError("n must be non-negative")
    C: list = [1]
    for m in range(1, n + 1):
        acc = 0
        for k in range(1, m + 1):
            acc = acc + t ** (k - 1) * C[k - 1] * C[m - k]
        C.append(acc)
    return _lift(C[n], 0, t)


def t_catalan_noncrossing(n: int) -> BivarPoly:
    """``sum over non-crossing pairings of [2n] of t^nest``, by enumeration."""
    terms: dict = {}
    for V in iter_noncrossing_pair_partitions(n):
        key = (0, nestings(V))
        terms[key] = terms.get(key, 0) + 1
    return BivarPoly(terms) if terms else POLY_ONE


class TracialityGap(NamedTuple):
    forward: object
    rotated: object


def traciality_gap(C, q=Q, t=T) -> TracialityGap:
    """``phi(s_1 s_2 s_3 s_4)`` and ``phi(s_4 s_1 s_2 s_3)`` for ``C[i][j] = <h_i, h_j>``."""
    C = validate_covariance(C, size=4)
    order = [3, 0, 1, 2]
    rotated_C = [[C[i][j] for j in order] for i in order]
    return TracialityGap(gaussian_moment(4, C, q, t), gaussian_moment(4, rotated_C, q, t))
