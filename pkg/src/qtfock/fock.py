"""Finite truncations of the (q,t)-deformed Fock space.

The one-particle space is spanned by an orthonormal basis ``e_1, ..., e_d``
and tensor words are kept up to length ``L``.  Words are stored 0-based as
tuples of letters in ``range(d)``; the empty tuple is the vacuum.

Two arithmetic modes are supported.  When ``q`` and ``t`` are ``int`` or
:class:`fractions.Fraction`, every matrix is a numpy ``object`` array of
exact rationals and identity checks return exact zeros.  With floats the
matrices are ``float64`` and spectral quantities can be computed.

Creation at the top level ``L`` maps to zero.  Checks that would see this
truncation are restricted to inputs of length at most ``L - 1``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .combin import coinversions, inversions
from .config import check_limit, get_limits
from .errors import DomainError, TruncationError, ValidationError

Word = tuple[int, ...]


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


@dataclass(frozen=True)
class FockParams:
    """Deformation parameters and truncation size.

    ``|q| < t <= 1`` is required; ``allow_boundary=True`` admits ``|q| == t``
    where the form is only positive semi-definite.  ``q = t = 1`` (Bosonic,
    unbounded) is always rejected.
    """

    q: float | Fraction
    t: float | Fraction
    d: int = 1
    L: int = 4
    allow_boundary: bool = False

    def __post_init__(self):
        q, t = self.q, self.t
        if isinstance(q, bool) or isinstance(t, bool):
            raise ValidationError("q and t must be numbers")
        if not (t > 0):
            raise DomainError(f"t must be positive, got {t}")
        if t > 1:
            raise DomainError(f"t must satisfy t <= 1, got {t}")
        if q == 1 and t == 1:
            raise DomainError("q = t = 1 is the unbounded Bosonic case")
        if abs(q) > t or (abs(q) == t and not self.allow_boundary):
            raise DomainError(
                f"need |q| < t (or |q| <= t with allow_boundary), got q={q}, t={t}"
            )
        if int(self.d) != self.d or self.d < 1:
            raise ValidationError("d must be a positive integer")
        if int(self.L) != self.L or self.L < 1:
            raise ValidationError("L must be a positive integer")

    @property
    def exact(self) -> bool:
        return _is_exact(self.q) and _is_exact(self.t)

    @classmethod
    def from_strings(cls, q: str, t: str, d: int = 1, L: int = 4, mode: str = "float", allow_boundary: bool = False) -> "FockParams":
        if mode == "exact":
            return cls(Fraction(q), Fraction(t), d, L, allow_boundary)
        if mode == "float":
            return cls(float(q), float(t), d, L, allow_boundary)
        raise ValidationError(f"mode must be 'exact' or 'float', got {mode!r}")


def _zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=float)


def _scalar(x, exact: bool):
    return Fraction(x) if exact else float(x)


def words_of_length(d: int, n: int) -> list[Word]:
    return list(itertools.product(range(d), repeat=n))


def word_label(w: Word) -> str:
    return "Omega" if not w else "e" + ".e".join(str(i + 1) for i in w)


# ---------------------------------------------------------------------------
# Gram matrices


def gram_matrix(params: FockParams, n: int, method: str = "recursive") -> np.ndarray:
    """Gram matrix of ``<,>_{q,t}`` on words of length ``n`` (lexicographic order).

    ``method="permutation"`` sums ``q^inv(pi) t^coinv(pi)`` over all of
    ``S_n`` entry by entry.  ``method="recursive"`` peels off the first
    letter of the left word, which costs ``n d^{2n}`` instead of
    ``n! d^{2n}``.
    """
    if n < 0 or n > params.L:
        raise ValidationError(f"level {n} outside 0..{params.L}")
    if method == "permutation":
        return _gram_permutation(params, n)
    if method == "recursive":
        return _gram_recursive(params, n)
    raise ValidationError(f"unknown method {method!r}")


def _gram_permutation(params: FockParams, n: int) -> np.ndarray:
    d, exact = params.d, params.exact
    size = d**n
    check_limit(size * size * math.factorial(n), get_limits().max_gram_work, "Gram permutation-sum work")
    q, t = _scalar(params.q, exact), _scalar(params.t, exact)
    words = words_of_length(d, n)
    index = {w: i for i, w in enumerate(words)}
    G = _zeros((size, size), exact)
    for pi in itertools.permutations(range(n)):
        perm1 = tuple(p + 1 for p in pi)
        weight = q ** inversions(perm1) * t ** coinversions(perm1) if n > 1 else _scalar(1, exact)
        # <w, U_pi v>_0 = prod_k delta(w_k, v_{pi(k)}): nonzero iff w = v o pi
        for v in words:
            w = tuple(v[pi[k]] for k in range(n))
            G[index[w], index[v]] += weight
    return G


def _gram_recursive(params: FockParams, n: int) -> np.ndarray:
    d, exact = params.d, params.exact
    q, t = _scalar(params.q, exact), _scalar(params.t, exact)
    G = _zeros((1, 1), exact)
    G[0, 0] = _scalar(1, exact)
    for m in range(1, n + 1):
        size = d**m
        idx = np.arange(size)
        digits = np.array(words_of_length(d, m), dtype=np.int64).reshape(size, m)
        first = digits[:, 0]
        rest = idx % (d ** (m - 1))
        powers = d ** np.arange(m - 2, -1, -1, dtype=np.int64) if m > 1 else np.zeros(0, dtype=np.int64)
        new = _zeros((size, size), exact)
        for k in range(m):
            letter = digits[:, k]
            dropped = np.delete(digits, k, axis=1) @ powers if m > 1 else np.zeros(size, dtype=np.int64)
            coeff = q**k * t ** (m - 1 - k)
            mask = first[:, None] == letter[None, :]
            block = G[np.ix_(rest, dropped)]
            if exact:
                new = new + np.where(mask, block, Fraction(0)) * coeff
            else:
                new += coeff * (mask * block)
        G = new
    return G


def full_gram(params: FockParams, method: str = "recursive") -> np.ndarray:
    """Block-diagonal Gram matrix over all words of length ``0..L``."""
    space = FockSpace(params)
    G = _zeros((space.dim, space.dim), params.exact)
    for n in range(params.L + 1):
        sl = space.level_slice(n)
        G[sl, sl] = gram_matrix(params, n, method=method)
    return G


# ---------------------------------------------------------------------------
# inner product by the defining recursion (independent of the Gram matrices)


def _word_inner(params: FockParams):
    exact = params.exact
    q, t = _scalar(params.q, exact), _scalar(params.t, exact)
    one, zero = _scalar(1, exact), _scalar(0, exact)

    @lru_cache(maxsize=None)
    def inner(g: Word, h: Word):
        if len(g) != len(h):
            return zero
        n = len(g)
        if n == 0:
            return one
        total = zero
        for k in range(n):
            if g[0] == h[k]:
                total += q**k * t ** (n - 1 - k) * inner(g[1:], h[:k] + h[k + 1 :])
        return total

    return inner


FockVector = Mapping[Word, complex]


def inner_product(params: FockParams, x: FockVector, y: FockVector):
    """``<x, y>_{q,t}``, antilinear in ``x``, via the recursive definition.

    Vectors are mappings from words (tuples of 0-based letters) to
    amplitudes.
    """
    for vec in (x, y):
        for w in vec:
            if len(w) > params.L:
                raise TruncationError(f"word {w} longer than L={params.L}")
            if any(not (0 <= i < params.d) for i in w):
                raise ValidationError(f"word {w} uses letters outside 0..{params.d - 1}")
    inner = _word_inner(params)
    total = 0
    for g, a in x.items():
        for h, b in y.items():
            if len(g) == len(h):
                total = total + _conj(a) * b * inner(tuple(g), tuple(h))
    return total


def _conj(a):
    return a.conjugate() if isinstance(a, complex) else a


# ---------------------------------------------------------------------------
# operators


class PositivityReport(NamedTuple):
    min_eigenvalue: float
    is_positive_definite: bool
    is_positive_semidefinite: bool


class FockSpace:
    """Basis bookkeeping and operator matrices for one :class:`FockParams`."""

    def __init__(self, params: FockParams):
        self.params = params
        self.exact = params.exact
        self.q = _scalar(params.q, self.exact)
        self.t = _scalar(params.t, self.exact)
        self.basis: list[Word] = []
        self._offsets = [0]
        for n in range(params.L + 1):
            self.basis.extend(words_of_length(params.d, n))
            self._offsets.append(len(self.basis))
        self.index = {w: i for i, w in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def level_slice(self, n: int) -> slice:
        return slice(self._offsets[n], self._offsets[n + 1])

    def levels(self) -> np.ndarray:
        return np.array([len(w) for w in self.basis])

    def _vector(self, f: Sequence) -> list:
        f = list(f)
        if len(f) != self.params.d:
            raise ValidationError(f"one-particle vector must have length d={self.params.d}")
        return [_scalar(c, self.exact) if self.exact else c for c in f]

    def basis_vector(self, i: int) -> list:
        """Coordinates of ``e_{i+1}`` in the one-particle space."""
        return [1 if j == i else 0 for j in range(self.params.d)]

    def creation_matrix(self, f: Sequence) -> np.ndarray:
        """Matrix of ``a(f)^*``: prepend ``f``; words at level ``L`` map to 0."""
        f = self._vector(f)
        M = _zeros((self.dim, self.dim), self.exact)
        for col, w in enumerate(self.basis):
            if len(w) >= self.params.L:
                continue
            for i, c in enumerate(f):
                if c != 0:
                    M[self.index[(i,) + w], col] += c
        return M

    def annihilation_matrix(self, f: Sequence) -> np.ndarray:
        """Matrix of ``a(f)``: remove letter ``k`` with weight ``q^(k-1) t^(n-k) <f, h_k>``."""
        f = self._vector(f)
        M = _zeros((self.dim, self.dim), self.exact)
        q, t = self.q, self.t
        for col, w in enumerate(self.basis):
            n = len(w)
            for k in range(n):
                c = f[w[k]]
                if c != 0:
                    M[self.index[w[:k] + w[k + 1 :]], col] += q**k * t ** (n - 1 - k) * c
        return M

    def number_weight_matrix(self) -> np.ndarray:
        """Diagonal matrix of ``t^N``."""
        M = _zeros((self.dim, self.dim), self.exact)
        for i, w in enumerate(self.basis):
            M[i, i] = self.t ** len(w)
        return M

    def field_matrix(self, f: Sequence) -> np.ndarray:
        return self.annihilation_matrix(f) + self.creation_matrix(f)

    @cached_property
    def gram(self) -> np.ndarray:
        return full_gram(self.params)

    def vacuum(self) -> np.ndarray:
        v = _zeros(self.dim, self.exact)
        v[0] = _scalar(1, self.exact)
        return v

    def to_array(self, x: FockVector) -> np.ndarray:
        v = _zeros(self.dim, self.exact) if not any(isinstance(a, complex) for a in x.values()) else np.zeros(self.dim, dtype=complex)
        for w, a in x.items():
            v[self.index[tuple(w)]] += a
        return v


# ---------------------------------------------------------------------------
# checks


def positivity_report(params: FockParams, n: int, rel_tol: float = 1e-10) -> PositivityReport:
    """Smallest eigenvalue of the level-``n`` Gram matrix and the definiteness verdict.

    The verdict compares against ``rel_tol * ||G||``; in exact mode
    definiteness is decided by exact symmetric elimination instead.
    """
    G = gram_matrix(params, n)
    Gf = np.array(G, dtype=float)
    eig = np.linalg.eigvalsh(Gf)
    scale = max(abs(eig[0]), abs(eig[-1]), 1e-300)
    min_eig = float(eig[0])
    if params.exact:
        pivots = _ldl_pivots(G)
        pd = all(p > 0 for p in pivots)
        psd = pd or (all(p >= 0 for p in pivots) and _is_psd_exact(G))
        if not pd and abs(min_eig) <= rel_tol * scale:
            min_eig = 0.0
        return PositivityReport(min_eig, pd, psd)
    tol = rel_tol * scale
    if abs(min_eig) <= tol:
        min_eig = 0.0
    return PositivityReport(min_eig, bool(min_eig > tol), bool(min_eig >= -tol))


def _ldl_pivots(G: np.ndarray) -> list[Fraction]:
    """Pivots of exact symmetric Gaussian elimination without pivoting.

    All pivots positive iff ``G`` is positive definite; elimination stops at
    the first non-positive pivot.
    """
    A = [[Fraction(x) for x in row] for row in G]
    n = len(A)
    pivots = []
    for k in range(n):
        p = A[k][k]
        pivots.append(p)
        if p <= 0:
            break
        for i in range(k + 1, n):
            f = A[i][k] / p
            if f:
                for j in range(k + 1, n):
                    A[i][j] -= f * A[k][j]
    return pivots


def _is_psd_exact(G: np.ndarray) -> bool:
    # semidefinite iff every principal minor is >= 0; small matrices only
    A = [[Fraction(x) for x in row] for row in G]
    n = len(A)
    if n > 12:
        eig = np.linalg.eigvalsh(np.array(G, dtype=float))
        return bool(eig[0] >= -1e-10 * max(1.0, abs(eig[-1])))
    for r in range(1, n + 1):
        for rows in itertools.combinations(range(n), r):
            if _det([[A[i][j] for j in rows] for i in rows]) < 0:
                return False
    return True


def _det(M: list[list[Fraction]]) -> Fraction:
    M = [row[:] for row in M]
    n = len(M)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            det = -det
        det *= M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            for j in range(k, n):
                M[i][j] -= f * M[k][j]
    return det


def _matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``A @ B``; for exact (object) arrays only the nonzero entries are visited."""
    if A.dtype != object and B.dtype != object:
        return A @ B
    vector = B.ndim == 1
    B2 = B.reshape(-1, 1) if vector else B
    out = _zeros((A.shape[0], B2.shape[1]), True)
    nz = B2 != 0
    cols_of = [np.nonzero(nz[k])[0] for k in range(B2.shape[0])]
    for i, k in zip(*np.nonzero(A != 0)):
        cols = cols_of[k]
        if cols.size:
            out[i, cols] += A[i, k] * B2[k, cols]
    return out.ravel() if vector else out


def _max_abs(M) -> float | Fraction:
    if M.size == 0:
        return 0
    if M.dtype == object:
        return max(abs(x) for x in M.ravel())
    return float(np.max(np.abs(M)))


def check_adjoint(params: FockParams):
    """``max |<a(f)^* xi, eta> - <xi, a(f) eta>|`` over basis words and ``f in {e_i}``.

    ``xi`` ranges over words of length ``<= L - 1`` so creation is never
    truncated.  Exact zero in rational mode.
    """
    space = FockSpace(params)
    G = space.gram
    rows = np.nonzero(space.levels() <= params.L - 1)[0]
    worst = 0
    for i in range(params.d):
        e = space.basis_vector(i)
        C = space.creation_matrix(e)
        A = space.annihilation_matrix(e)
        R = (_matmul(C.T, G) - _matmul(G, A))[rows, :]
        worst = max(worst, _max_abs(R))
    return worst


def check_commutation(params: FockParams, f: Sequence, g: Sequence):
    """Residual of ``a(f) a(g)^* - q a(g)^* a(f) - <f, g> t^N`` on words of length ``<= L - 1``."""
    space = FockSpace(params)
    A = space.annihilation_matrix(f)
    C = space.creation_matrix(g)
    ff, gg = space._vector(f), space._vector(g)
    fg = sum((a * b for a, b in zip(ff, gg)), _scalar(0, space.exact))
    R = _matmul(A, C) - space.q * _matmul(C, A) - fg * space.number_weight_matrix()
    cols = np.nonzero(space.levels() <= params.L - 1)[0]
    return _max_abs(R[:, cols])


def vacuum_moment(params: FockParams, word: Sequence[tuple[Sequence, str]]):
    """``<Omega, b_1 b_2 ... b_k Omega>_{q,t}`` for operators ``b_j`` given as ``(f, kind)``.

    ``kind`` is ``"*"`` for ``a(f)^*``, ``"1"`` for ``a(f)`` and ``"s"`` for
    the field ``a(f) + a(f)^*``.  Operators act right to left.  Words longer
    than ``2L`` are refused since the result could then depend on the
    truncation.
    """
    if len(word) > 2 * params.L:
        raise TruncationError(
            f"word of length {len(word)} may climb above level L={params.L}; need L >= {math.ceil(len(word) / 2)}"
        )
    space = FockSpace(params)
    cache: dict[tuple, np.ndarray] = {}
    v = space.vacuum()
    for f, kind in reversed(list(word)):
        key = (tuple(f), kind)
        if key not in cache:
            if kind == "*":
                cache[key] = space.creation_matrix(f)
            elif kind == "1":
                cache[key] = space.annihilation_matrix(f)
            elif kind == "s":
                cache[key] = space.field_matrix(f)
            else:
                raise ValidationError(f"operator kind must be '*', '1' or 's', got {kind!r}")
        v = _matmul(cache[key], v)
    # levels are orthogonal and <Omega, Omega> = 1
    return v[0]


# ---------------------------------------------------------------------------
# norms


def n_star(q: float, t: float) -> int:
    """Level maximizing ``t^n - q^n`` (closed form), for ``0 < q < t < 1``."""
    if not (0 < q < t < 1):
        raise DomainError(f"n_star needs 0 < q < t < 1, got q={q}, t={t}")
    x = (math.log(1 - q) - math.log(1 - t)) / (math.log(t) - math.log(q))
    return max(1, math.ceil(x))


def n_star_scan(q: float, t: float, max_n: int = 100_000) -> int:
    """First ``n >= 1`` maximizing ``t^n - q^n``, by direct scan."""
    if not (0 < q < t < 1):
        raise DomainError(f"n_star needs 0 < q < t < 1, got q={q}, t={t}")
    best_n, best = 1, t - q
    for n in range(2, max_n):
        val = t**n - q**n
        if val > best:
            best_n, best = n, val
        elif val < best:
            break
    return best_n


def norm_case(q: float, t: float) -> str:
    if t > 1 or t <= 0:
        raise DomainError(f"norm formula needs 0 < t <= 1, got t={t}")
    if q == t:
        raise DomainError("norm formula needs q != t")
    if abs(q) >= t:
        raise DomainError(f"norm formula needs |q| < t, got q={q}, t={t}")
    if q <= 0:
        return "0<=-q<t<=1"
    if t == 1:
        return "0<q<t=1"
    return "0<q<t<1"


def theoretical_norm(q: float, t: float, f_norm: float = 1.0) -> float:
    """Closed-form ``||a(f)||`` in the three parameter regimes."""
    case = norm_case(q, t)
    if case == "0<=-q<t<=1":
        return float(f_norm)
    if case == "0<q<t=1":
        return float(f_norm) / math.sqrt(1 - q)
    n = n_star(q, t)
    return float(f_norm) * math.sqrt((t**n - q**n) / (t - q))


def _sqrt_and_inv_sqrt(G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, V = np.linalg.eigh(G)
    if w[0] <= 0:
        raise DomainError("Gram matrix is not positive definite; norm undefined")
    return (V * np.sqrt(w)) @ V.T, (V / np.sqrt(w)) @ V.T


def operator_norm(params: FockParams, f: Sequence | None = None) -> float:
    """Largest singular value of ``a(f)`` in the ``<,>_{q,t}`` geometry on the truncation.

    ``a(f)`` maps level ``n`` into level ``n - 1`` and the levels are
    mutually orthogonal, so the norm is the maximum over ``n`` of the norm of
    ``G_{n-1}^{1/2} A_n G_n^{-1/2}``.  Never decreases as ``L`` grows.
    """
    fl = FockParams(float(params.q), float(params.t), params.d, params.L, params.allow_boundary)
    space = FockSpace(fl)
    if f is None:
        f = space.basis_vector(0)
    A = space.annihilation_matrix(f)
    best = 0.0
    prev_half = None
    for n in range(fl.L + 1):
        half, inv_half = _sqrt_and_inv_sqrt(np.array(gram_matrix(fl, n), dtype=float))
        if n >= 1:
            block = A[space.level_slice(n - 1), space.level_slice(n)]
            s = np.linalg.norm(prev_half @ block @ inv_half, 2)
            best = max(best, float(s))
        prev_half = half
    return best


def matrix_to_csv(M: np.ndarray, labels: Sequence[str]) -> str:
    """Row-major CSV with a header of basis-word labels and a label column."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["word", *labels])
    for label, row in zip(labels, M):
        writer.writerow([label, *(str(x) for x in row)])
    return buf.getvalue()
