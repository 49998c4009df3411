"""Exact coefficient ring Q[psi, log t2, pi][i, r] with i^2 = -1 and r^2 = 2.

``psi`` is the calibration constant, ``log t2`` the logarithm of the second
flat coordinate carried as an opaque symbol, ``pi`` appears only in period
vectors.  ``r`` stands for the square root of two.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Union

Rational = Union[int, Fraction]

# key layout: (psi, log_t2, pi, i, r)
_SYMBOLS = ("psi", "log_t2", "pi")
_ZERO_KEY = (0, 0, 0, 0, 0)


def _mul_keys(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Product of two basis monomials, returned as (key, integer factor)."""
    factor = 1
    i = a[3] + b[3]
    if i == 2:
        i, factor = 0, -factor
    r = a[4] + b[4]
    if r == 2:
        r, factor = 0, factor * 2
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], i, r), factor


class ExactScalar:
    """Immutable element of the coefficient ring, stored in normalized form."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, value: Rational | ExactScalar | Mapping[tuple[int, ...], Rational] = 0) -> None:
        if isinstance(value, ExactScalar):
            self._terms = value._terms
        elif isinstance(value, Mapping):
            terms = {}
            for key, c in value.items():
                c = Fraction(c)
                if c:
                    if len(key) != 5 or key[3] not in (0, 1) or key[4] not in (0, 1):
                        raise ValueError(f"malformed scalar key {key!r}")
                    terms[tuple(key)] = c
            self._terms = terms
        else:
            c = Fraction(value)
            self._terms = {_ZERO_KEY: c} if c else {}
        self._hash: int | None = None

    # constructors -------------------------------------------------------
    @classmethod
    def _mono(cls, key: tuple[int, ...], c: Rational = 1) -> ExactScalar:
        return cls({key: c})

    @classmethod
    def psi(cls) -> ExactScalar:
        return cls._mono((1, 0, 0, 0, 0))

    @classmethod
    def log_t2(cls) -> ExactScalar:
        return cls._mono((0, 1, 0, 0, 0))

    @classmethod
    def pi(cls) -> ExactScalar:
        return cls._mono((0, 0, 1, 0, 0))

    @classmethod
    def i(cls) -> ExactScalar:
        return cls._mono((0, 0, 0, 1, 0))

    @classmethod
    def sqrt2(cls) -> ExactScalar:
        return cls._mono((0, 0, 0, 0, 1))

    # structure -----------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_rational(self) -> bool:
        return all(k == _ZERO_KEY for k in self._terms)

    def is_numeric(self) -> bool:
        """True when no psi, log t2 or pi symbol occurs."""
        return all(k[:3] == (0, 0, 0) for k in self._terms)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._terms.get(_ZERO_KEY, Fraction(0))

    def has_imaginary_or_root_part(self) -> bool:
        return any(k[3] or k[4] for k in self._terms)

    def psi_degree(self) -> int:
        return max((k[0] for k in self._terms), default=0)

    def psi_coefficients(self) -> dict[int, ExactScalar]:
        """Split as a polynomial in psi."""
        out: dict[int, dict] = {}
        for k, c in self._terms.items():
            out.setdefault(k[0], {})[(0,) + k[1:]] = c
        return {p: ExactScalar(t) for p, t in sorted(out.items())}

    def subs(self, *, psi: Rational | ExactScalar | None = None,
             log_t2: Rational | ExactScalar | None = None) -> ExactScalar:
        """Substitute values for the symbols psi and/or log t2."""
        out = ExactScalar(0)
        for k, c in self._terms.items():
            term = ExactScalar._mono((0 if psi is not None else k[0],
                                      0 if log_t2 is not None else k[1], k[2], k[3], k[4]), c)
            if psi is not None and k[0]:
                term = term * ExactScalar(psi) ** k[0]
            if log_t2 is not None and k[1]:
                term = term * ExactScalar(log_t2) ** k[1]
            out = out + term
        return out

    def conjugate_i(self) -> ExactScalar:
        """Apply i -> -i."""
        return ExactScalar({k: (-c if k[3] else c) for k, c in self._terms.items()})

    def conjugate_r(self) -> ExactScalar:
        """Apply r -> -r."""
        return ExactScalar({k: (-c if k[4] else c) for k, c in self._terms.items()})

    # arithmetic ------------------------------------------------------------
    @staticmethod
    def _coerce(other: object) -> ExactScalar | None:
        if isinstance(other, ExactScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactScalar(other)
        return None

    def __add__(self, other: object) -> ExactScalar:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self._terms)
        for k, c in o._terms.items():
            v = terms.get(k, 0) + c
            if v:
                terms[k] = v
            else:
                terms.pop(k, None)
        res = ExactScalar.__new__(ExactScalar)
        res._terms, res._hash = terms, None
        return res

    __radd__ = __add__

    def __neg__(self) -> ExactScalar:
        res = ExactScalar.__new__(ExactScalar)
        res._terms, res._hash = {k: -c for k, c in self._terms.items()}, None
        return res

    def __sub__(self, other: object) -> ExactScalar:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> ExactScalar:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> ExactScalar:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms: dict[tuple[int, ...], Fraction] = {}
        for ka, ca in self._terms.items():
            for kb, cb in o._terms.items():
                k, f = _mul_keys(ka, kb)
                terms[k] = terms.get(k, 0) + f * ca * cb
        return ExactScalar(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> ExactScalar:
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ExactScalar(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> ExactScalar:
        """Inverse of a symbol-free element a + b i + c r + d ir."""
        if not self.is_numeric():
            raise ZeroDivisionError(f"cannot invert symbolic scalar {self}")
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        # multiply by the three Galois conjugates; the product is rational
        c1 = self.conjugate_i()
        c2 = self.conjugate_r()
        c3 = c1.conjugate_r()
        num = c1 * c2 * c3
        den = (self * num).to_fraction()
        return num * (1 / den)

    def __truediv__(self, other: object) -> ExactScalar:
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> ExactScalar:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # formatting ------------------------------------------------------------
    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"ExactScalar({format_scalar(self)!r})"


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_scalar(s: ExactScalar) -> str:
    """Canonical string, e.g. ``1/2+1/2*i*r+3*psi^2``."""
    if s.is_zero():
        return "0"
    parts = []
    for key, c in s.items():
        factors = []
        for name, e in zip(_SYMBOLS, key[:3]):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        if key[3]:
            factors.append("i")
        if key[4]:
            factors.append("r")
        text = _format_fraction(c)
        if factors:
            text = text + "*" + "*".join(factors) if c != 1 else "*".join(factors)
            if c == -1:
                text = "-" + "*".join(factors)
        parts.append(text)
    out = parts[0]
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


def parse_rational(text: str) -> Fraction:
    """Parse ``p`` or ``p/q`` into a Fraction."""
    return Fraction(text.strip())


def as_scalar(x: Rational | ExactScalar) -> ExactScalar:
    return x if isinstance(x, ExactScalar) else ExactScalar(x)


@lru_cache(maxsize=None)
def harmonic(n: int) -> Fraction:
    """Harmonic number h(n) = 1 + 1/2 + ... + 1/n, with h(0) = 0."""
    if n < 0:
        raise ValueError("harmonic number of a negative integer")
    return harmonic(n - 1) + Fraction(1, n) if n else Fraction(0)


def pochhammer(a: Fraction, k: int) -> Fraction:
    """Rising factorial (a)_k."""
    out = Fraction(1)
    for j in range(k):
        out *= a + j
    return out
