"""Pair partitions, permutations and Dyck paths with their statistics.

Positions are 1-based throughout, matching the usual ``[2n] = {1, ..., 2n}``
labelling of chord diagrams.  Operator words use the two letters
:data:`STAR` (creation) and :data:`ONE` (annihilation).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .config import check_limit, get_limits
from .errors import ValidationError
from .poly import ONE as POLY_ONE
from .poly import BivarPoly, Q, T

STAR = "*"
ONE = "1"

NE = 1
SE = -1


def double_factorial(k: int) -> int:
    """``k!! = k (k-2) (k-4) ...``, with ``(-1)!! = 0!! = 1``."""
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


# ---------------------------------------------------------------------------
# pair partitions


@dataclass(frozen=True)
class PairPartition:
    """A perfect matching of ``[2n]`` in canonical (opener-sorted) form.

    The constructor accepts pairs in any order and orientation and stores
    them as ``((w_1, z_1), ..., (w_n, z_n))`` with ``w_i < z_i`` and
    ``w_1 < ... < w_n``, so equality and hashing are representation-free.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        canon = tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in self.pairs))
        points = sorted(x for p in canon for x in p)
        if points != list(range(1, 2 * len(canon) + 1)):
            raise ValidationError(f"pairs {self.pairs!r} do not partition [2n]")
        if any(a == b for a, b in canon):
            raise ValidationError("a pair must join two distinct points")
        object.__setattr__(self, "pairs", canon)

    @property
    def n(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def to_json(self) -> list[list[int]]:
        return [list(p) for p in self.pairs]

    @classmethod
    def from_json(cls, data) -> "PairPartition":
        return cls(tuple((int(a), int(b)) for a, b in data))

    def opener_closer_word(self) -> tuple[str, ...]:
        """The string of openings (``*``) and closures (``1``) of the chords."""
        word = [ONE] * (2 * self.n)
        for w, _ in self.pairs:
            word[w - 1] = STAR
        return tuple(word)


def _pairings_rec(points: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1 :]
        for tail in _pairings_rec(remaining):
            yield [(first, partner)] + tail


def iter_pair_partitions(n: int, max_n: int | None = None) -> Iterator[PairPartition]:
    """Stream all ``(2n-1)!!`` pair partitions of ``[2n]``."""
    if n < 0:
        raise ValidationError("n must be non-negative")
    check_limit(n, get_limits().max_pairing_n if max_n is None else max_n, "pair partition enumeration n")
    for pairs in _pairings_rec(list(range(1, 2 * n + 1))):
        yield PairPartition(tuple(pairs))


def enumerate_pair_partitions(n: int, max_n: int | None = None) -> list[PairPartition]:
    if n < 1:
        raise ValidationError("n must be a positive integer")
    return list(iter_pair_partitions(n, max_n=max_n))


def iter_noncrossing_pair_partitions(n: int) -> Iterator[PairPartition]:
    """Non-crossing pairings of ``[2n]`` by first-pair decomposition.

    The chord through 1 ends at an even point ``beta``; the chords inside
    ``(1, beta)`` and those after ``beta`` are independent non-crossing
    pairings of the two intervals.
    """
    if n < 0:
        raise ValidationError("n must be non-negative")

    def rec(lo: int, m: int) -> Iterator[list[tuple[int, int]]]:
        # non-crossing pairings of {lo, ..., lo + 2m - 1}
        if m == 0:
            yield []
            return
        for k in range(1, m + 1):
            beta = lo + 2 * k - 1
            for inner in rec(lo + 1, k - 1):
                for outer in rec(beta + 1, m - k):
                    yield [(lo, beta)] + inner + outer

    for pairs in rec(1, n):
        yield PairPartition(tuple(pairs))


def crossings(V: PairPartition) -> int:
    """Number of chord pairs with ``w_i < w_j < z_i < z_j``."""
    p = V.pairs
    return sum(
        1
        for a in range(len(p))
        for b in range(len(p))
        if p[a][0] < p[b][0] < p[a][1] < p[b][1]
    )


def nestings(V: PairPartition) -> int:
    """Number of chord pairs with ``w_i < w_j < z_j < z_i``."""
    p = V.pairs
    return sum(
        1
        for a in range(len(p))
        for b in range(len(p))
        if p[a][0] < p[b][0] < p[b][1] < p[a][1]
    )


def alignments(V: PairPartition) -> int:
    """Number of chord pairs that neither cross nor nest (``w_i < z_i < w_j < z_j``)."""
    p = V.pairs
    return sum(
        1
        for a in range(len(p))
        for b in range(len(p))
        if p[a][0] < p[a][1] < p[b][0] < p[b][1]
    )


def rotate(V: PairPartition, r: int = 1) -> PairPartition:
    """Rotate the chord diagram by ``r`` positions (``p -> p + r mod 2n``)."""
    m = 2 * V.n
    return PairPartition(tuple(((a - 1 + r) % m + 1, (b - 1 + r) % m + 1) for a, b in V.pairs))


# ---------------------------------------------------------------------------
# vectorized statistics for generating functions


def _pairing_array(n: int) -> np.ndarray:
    """All pairings of ``[2n]`` as an ``(count, 2n)`` partner table, 0-based."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    sub = _pairing_array(n - 1)
    m = 2 * n
    blocks = []
    for j in range(1, m):
        rest = np.array([x for x in range(1, m) if x != j], dtype=np.int8)
        block = np.empty((sub.shape[0], m), dtype=np.int8)
        block[:, 0] = j
        block[:, j] = 0
        # sub holds partners in 0..m-3 relative to `rest`
        block[:, rest] = rest[sub]
        blocks.append(block)
    return np.concatenate(blocks, axis=0)


def _pairing_blocks(n: int, max_rows: int = 3_000_000) -> Iterator[np.ndarray]:
    """Partner tables in chunks small enough to hold in memory."""
    if double_factorial(2 * n - 1) <= max_rows or n <= 1:
        yield _pairing_array(n)
        return
    m = 2 * n
    for j in range(1, m):
        rest = np.array([x for x in range(1, m) if x != j], dtype=np.int8)
        for sub in _pairing_blocks(n - 1, max_rows):
            block = np.empty((sub.shape[0], m), dtype=np.int8)
            block[:, 0] = j
            block[:, j] = 0
            block[:, rest] = rest[sub]
            yield block


def _cross_nest_counts(partner: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = partner.shape[1]
    n = m // 2
    pos = np.arange(m, dtype=np.int16)
    is_open = partner > pos
    # openers in increasing order and their closers
    order = np.argsort(~is_open, axis=1, kind="stable")[:, :n]
    W = order.astype(np.int16)
    Z = np.take_along_axis(partner, order, axis=1).astype(np.int16)
    cross = np.zeros(partner.shape[0], dtype=np.int32)
    nest = np.zeros(partner.shape[0], dtype=np.int32)
    for i in range(n):
        for j in range(i + 1, n):
            cross += (W[:, j] < Z[:, i]) & (Z[:, i] < Z[:, j])
            nest += Z[:, j] < Z[:, i]
    return cross, nest


def joint_cross_nest_polynomial(n: int, max_n: int | None = None) -> BivarPoly:
    """``sum over pairings V of [2n] of q^cross(V) t^nest(V)``, by enumeration."""
    if n < 0:
        raise ValidationError("n must be non-negative")
    check_limit(n, get_limits().max_pairing_n if max_n is None else max_n, "pair partition enumeration n")
    if n == 0:
        return POLY_ONE
    width = n * (n - 1) // 2 + 1
    counts = np.zeros(width * width, dtype=np.int64)
    for block in _pairing_blocks(n):
        c, s = _cross_nest_counts(block)
        counts += np.bincount(c * width + s, minlength=width * width)
    terms = {}
    for code in np.nonzero(counts)[0]:
        terms[(int(code) // width, int(code) % width)] = int(counts[code])
    return BivarPoly(terms)


# ---------------------------------------------------------------------------
# permutations


def _check_perm(sigma: Sequence[int]) -> tuple[int, ...]:
    s = tuple(int(x) for x in sigma)
    if sorted(s) != list(range(1, len(s) + 1)):
        raise ValidationError(f"{sigma!r} is not a permutation of 1..{len(s)}")
    return s


def inversions(sigma: Sequence[int]) -> int:
    s = _check_perm(sigma)
    return sum(1 for i, j in itertools.combinations(range(len(s)), 2) if s[i] > s[j])


def coinversions(sigma: Sequence[int]) -> int:
    s = _check_perm(sigma)
    return sum(1 for i, j in itertools.combinations(range(len(s)), 2) if s[i] < s[j])


def inverse_permutation(sigma: Sequence[int]) -> tuple[int, ...]:
    s = _check_perm(sigma)
    inv = [0] * len(s)
    for i, v in enumerate(s, start=1):
        inv[v - 1] = i
    return tuple(inv)


def permutation_to_pair_partition(sigma: Sequence[int]) -> PairPartition:
    """Two-line diagram with the bottom row reversed: ``i -> 2n + 1 - sigma(i)``.

    Inversions of ``sigma`` become crossings and coinversions become nestings.
    """
    s = _check_perm(sigma)
    n = len(s)
    return PairPartition(tuple((i, 2 * n + 1 - v) for i, v in enumerate(s, start=1)))


def iter_permutations(n: int, max_n: int | None = None) -> Iterator[tuple[int, ...]]:
    if n < 0:
        raise ValidationError("n must be non-negative")
    check_limit(n, get_limits().max_perm_n if max_n is None else max_n, "permutation enumeration n")
    return itertools.permutations(range(1, n + 1))


def perm_inv_div_polynomial(n: int, max_n: int | None = None) -> BivarPoly:
    """``sum over S_n of q^inv t^coinv`` by brute force."""
    if n < 1:
        raise ValidationError("n must be a positive integer")
    terms: dict[tuple[int, int], int] = {}
    for s in iter_permutations(n, max_n=max_n):
        key = (inversions(s), coinversions(s))
        terms[key] = terms.get(key, 0) + 1
    return BivarPoly(terms)


def qt_integer(n: int, q, t):
    """``[n]_{q,t} = t^(n-1) + q t^(n-2) + ... + q^(n-1)``.

    Evaluated in summation form so ``q == t`` needs no special case; works
    for numbers, fractions and :class:`BivarPoly` arguments alike.
    """
    if n < 0:
        raise ValidationError("n must be non-negative")
    total = 0
    for i in range(n):
        total = total + q**i * t ** (n - 1 - i)
    return total


def qt_integer_poly(n: int) -> BivarPoly:
    return BivarPoly.coerce(qt_integer(n, Q, T))


def qt_factorial(n: int, q=Q, t=T):
    out = 1
    for i in range(1, n + 1):
        out = out * qt_integer(i, q, t)
    return out


# ---------------------------------------------------------------------------
# words and Dyck paths


def epsilon_word(letters) -> tuple[str, ...]:
    """Normalize an operator word given as a string like ``"1*"`` or a sequence."""
    word = tuple(str(x) for x in letters)
    bad = [x for x in word if x not in (STAR, ONE)]
    if bad:
        raise ValidationError(f"operator words use only '*' and '1', got {bad!r}")
    return word


def reading_order(e) -> tuple[str, ...]:
    """Operator words act right to left on the vacuum; combinatorics reads them reversed.

    This is the only place where the reversal happens.
    """
    return tuple(reversed(epsilon_word(e)))


def word_to_path(e) -> list[int]:
    """Map each ``*`` to a NE step (+1) and each ``1`` to a SE step (-1), as written."""
    return [NE if x == STAR else SE for x in epsilon_word(e)]


def is_dyck_path(steps: Sequence[int]) -> bool:
    h = 0
    for s in steps:
        h += s
        if h < 0:
            return False
    return h == 0


def is_dyck_moment_word(e) -> bool:
    """True iff the vacuum moment of the operator word ``e`` can be non-zero."""
    return is_dyck_path(word_to_path(reading_order(e)))


def iter_dyck_words(n: int) -> Iterator[tuple[str, ...]]:
    """All Dyck words of semilength ``n`` in reading order (``*`` = opening)."""

    def rec(prefix: list[str], opens: int, height: int):
        if len(prefix) == 2 * n:
            yield tuple(prefix)
            return
        if opens < n:
            prefix.append(STAR)
            yield from rec(prefix, opens + 1, height + 1)
            prefix.pop()
        if height > 0:
            prefix.append(ONE)
            yield from rec(prefix, opens, height - 1)
            prefix.pop()

    yield from rec([], 0, 0)


def matchings_of_reading_word(word: Sequence[str]) -> list[PairPartition]:
    """All pairings whose opener/closer string is ``word`` (already in reading order)."""
    word = epsilon_word(word)
    if not is_dyck_path(word_to_path(word)):
        return []
    out: list[PairPartition] = []

    def rec(pos: int, open_positions: list[int], pairs: list[tuple[int, int]]):
        if pos == len(word):
            out.append(PairPartition(tuple(pairs)))
            return
        if word[pos] == STAR:
            open_positions.append(pos + 1)
            rec(pos + 1, open_positions, pairs)
            open_positions.pop()
        else:
            for k in range(len(open_positions)):
                opener = open_positions.pop(k)
                pairs.append((opener, pos + 1))
                rec(pos + 1, open_positions, pairs)
                pairs.pop()
                open_positions.insert(k, opener)

    rec(0, [], [])
    return out


def matching_class(e) -> list[PairPartition]:
    """Pairings in the equivalence class of the operator word ``e``.

    Positions refer to the reversed (reading-order) word; the list is empty
    when that word is not a Dyck word.
    """
    return matchings_of_reading_word(reading_order(e))


def binomial2(n: int) -> int:
    return math.comb(n, 2)
