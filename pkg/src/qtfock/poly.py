"""Exact polynomials in two commuting formal variables ``q`` and ``t``.

Coefficients are Python ``int`` or :class:`fractions.Fraction`, so every
operation is exact.  Instances are immutable and hashable.

>>> from qtfock.poly import Q, T
>>> (1 + Q + T) * (1 - Q)
BivarPoly('1 + t - q^2 - q*t')
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

from .errors import InexactDivisionError, ValidationError

Coeff = Union[int, Fraction]
Exponent = tuple[int, int]

SCHEMA = "qtfock.poly/1"


def _norm_coeff(c) -> Coeff:
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _norm_coeff(Fraction(c.numerator, c.denominator))
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


class BivarPoly:
    """Sparse polynomial ``sum c[i, j] q^i t^j`` with exact coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, Coeff] | None = None):
        clean: dict[Exponent, Coeff] = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValidationError("exponents must be non-negative")
            c = _norm_coeff(c)
            if c != 0:
                key = (int(i), int(j))
                clean[key] = clean.get(key, 0) + c
                if clean[key] == 0:
                    del clean[key]
        self._terms = clean
        self._hash = None

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, c: Coeff) -> "BivarPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c: Coeff = 1) -> "BivarPoly":
        return cls({(i, j): c})

    @staticmethod
    def coerce(x) -> "BivarPoly":
        if isinstance(x, BivarPoly):
            return x
        return BivarPoly.constant(_norm_coeff(x))

    # inspection -----------------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, Coeff]:
        return dict(self._terms)

    def coeff(self, i: int, j: int) -> Coeff:
        return self._terms.get((i, j), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((i + j for i, j in self._terms), default=-1)

    def degree_q(self) -> int:
        return max((i for i, _ in self._terms), default=-1)

    def degree_t(self) -> int:
        return max((j for _, j in self._terms), default=-1)

    def coefficient_sum(self) -> Coeff:
        return sum(self._terms.values())

    def sorted_terms(self) -> list[tuple[int, int, Coeff]]:
        """Terms in graded order: total degree, then decreasing power of q."""
        return [(i, j, self._terms[(i, j)]) for i, j in sorted(self._terms, key=lambda k: (k[0] + k[1], k[1]))]

    def univariate_coefficients(self, var: str = "t") -> list[Coeff]:
        """Dense coefficient list of a polynomial in one variable only."""
        if var not in ("q", "t"):
            raise ValidationError("var must be 'q' or 't'")
        other = 0 if var == "t" else 1
        if any(k[other] != 0 for k in self._terms):
            raise ValidationError(f"polynomial depends on a variable other than {var}")
        idx = 1 - other
        deg = max((k[idx] for k in self._terms), default=-1)
        out: list[Coeff] = [0] * (deg + 1)
        for k, c in self._terms.items():
            out[k[idx]] = c
        return out

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        try:
            other = BivarPoly.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return BivarPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly({k: -c for k, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            other = BivarPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return BivarPoly.coerce(other) - self

    def __mul__(self, other):
        try:
            other = BivarPoly.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[Exponent, Coeff] = {}
        for (a, b), c in self._terms.items():
            for (x, y), d in other._terms.items():
                key = (a + x, b + y)
                out[key] = out.get(key, 0) + c * d
        return BivarPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValidationError("only non-negative integer powers are supported")
        result = BivarPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, BivarPoly):
            return self.exact_div(other)
        c = _norm_coeff(other)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return BivarPoly({k: Fraction(v) / c for k, v in self._terms.items()})

    def exact_div(self, divisor: "BivarPoly") -> "BivarPoly":
        """Quotient of an exact division, by lex-ordered long division.

        Raises :class:`InexactDivisionError` if ``divisor`` does not divide
        ``self``.
        """
        divisor = BivarPoly.coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead = max(divisor._terms)
        lead_c = divisor._terms[lead]
        rem = dict(self._terms)
        quot: dict[Exponent, Coeff] = {}
        while rem:
            top = max(rem)
            if top[0] < lead[0] or top[1] < lead[1]:
                raise InexactDivisionError("divisor does not divide the polynomial")
            shift = (top[0] - lead[0], top[1] - lead[1])
            factor = _norm_coeff(Fraction(rem[top]) / lead_c)
            quot[shift] = quot.get(shift, 0) + factor
            for (a, b), c in divisor._terms.items():
                key = (a + shift[0], b + shift[1])
                val = rem.get(key, 0) - factor * c
                if val == 0:
                    rem.pop(key, None)
                else:
                    rem[key] = val
        return BivarPoly(quot)

    # substitution ---------------------------------------------------------

    def __call__(self, q, t):
        return self.evaluate(q, t)

    def evaluate(self, q, t):
        """Evaluate at ring elements ``q`` and ``t`` (numbers or polynomials)."""
        total = 0
        qpow: dict[int, object] = {0: 1}
        tpow: dict[int, object] = {0: 1}
        for (i, j), c in self._terms.items():
            if i not in qpow:
                qpow[i] = q**i
            if j not in tpow:
                tpow[j] = t**j
            total = total + c * qpow[i] * tpow[j]
        return total

    def subs(self, q=None, t=None) -> "BivarPoly":
        """Substitute numbers for one or both variables, keeping the result a polynomial."""
        qq = Q if q is None else q
        tt = T if t is None else t
        return BivarPoly.coerce(self.evaluate(qq, tt))

    def swap(self) -> "BivarPoly":
        return BivarPoly({(j, i): c for (i, j), c in self._terms.items()})

    # comparison / hashing -------------------------------------------------

    def __eq__(self, other):
        try:
            other = BivarPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # formatting / serialization -------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for i, j, c in self.sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in (("q", i), ("t", j)) if e
            )
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"BivarPoly('{self}')"

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "var_order": ["q", "t"],
            "terms": [{"q": i, "t": j, "c": str(c)} for i, j, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "BivarPoly":
        order = list(data.get("var_order", ["q", "t"]))
        if order != ["q", "t"]:
            raise ValidationError(f"unsupported var_order {order!r}")
        terms: dict[Exponent, Coeff] = {}
        for term in data["terms"]:
            c = Fraction(term["c"])
            key = (int(term["q"]), int(term["t"]))
            terms[key] = terms.get(key, 0) + c
        return cls(terms)


Q = BivarPoly.monomial(1, 0)
T = BivarPoly.monomial(0, 1)
ONE = BivarPoly.constant(1)
ZERO = BivarPoly()


def poly_sum(items: Iterable) -> BivarPoly:
    out = ZERO
    for x in items:
        out = out + x
    return out
