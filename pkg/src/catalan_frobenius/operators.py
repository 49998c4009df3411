"""Difference and pseudo-differential operators over truncated series.

Both operator kinds are finite dictionaries power → coefficient together with
the range of powers whose coefficients are known exactly.  A truncated
operator (an infinite series in Λ^{-1} or D^{-1}, or in Λ) is stored with
``low`` (resp. ``high``) set: coefficients below ``low`` (above ``high``) are
unknown, not zero.  Products propagate these bounds, so every coefficient an
operator reports is exact.

* DifferenceOperator: Σ a_s(x) Λ^s with Λ^s f(x) = f(x + sε) Λ^s; shifts are
  Taylor expansions in ε of the lattice variable, finite under the ring caps.
* PseudoDiffOperator: Σ a_k D^k with D = ε∂_X and
  D^k f = Σ_n C(k, n) ε^n f^{(n)} D^{k−n} for every integer k.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, inf
from typing import Any, Callable, Iterable, Mapping

from .series import SeriesRing, TruncatedSeries


class OperatorError(ValueError):
    pass


# ---------------------------------------------------------------------------
# series helpers


def shift(f: TruncatedSeries, var: str, s: Fraction | int, eps: str = "eps") -> TruncatedSeries:
    """f(var + sε) by Taylor expansion; terminates because f is polynomial in var."""
    s = Fraction(s)
    if not s or not f:
        return f
    out = f
    d = f
    m = 0
    while True:
        m += 1
        d = d.derivative(var)
        if not d:
            return out
        term = d.mul_monomial({eps: m}, s ** m / factorial(m))
        if not term:
            # ε^m pushed everything beyond the caps; higher m only adds more ε
            return out
        out = out + term


def falling_binomial(k: int, n: int) -> Fraction:
    """C(k, n) for any integer k and n ≥ 0."""
    if k >= 0:
        return Fraction(comb(k, n)) if n <= k else Fraction(0)
    out = Fraction(1)
    for j in range(n):
        out *= Fraction(k - j, j + 1)
    return out


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with t/(e^t − 1) = Σ B_n t^n/n! (so B_1 = −1/2)."""
    if n == 0:
        return Fraction(1)
    return -sum((comb(n + 1, k) * bernoulli(k) for k in range(n)), Fraction(0)) / (n + 1)


def inverse_difference_derivative(f: TruncatedSeries, var: str, eps: str = "eps") -> TruncatedSeries:
    """(Λ − 1)^{-1} ∂_var f realized as ε^{-1} Σ B_n/n! (ε∂)^n f."""
    out = f.mul_monomial({eps: -1})
    d = f
    n = 0
    while True:
        n += 1
        d = d.derivative(var)
        if not d:
            return out
        b = bernoulli(n)
        if b:
            out = out + d.mul_monomial({eps: n - 1}, b / factorial(n))


# ---------------------------------------------------------------------------
# shared container


class _Operator:
    __slots__ = ("ring", "terms", "low", "high")
    symbol = "?"

    def __init__(self, ring: SeriesRing, terms: Mapping[int, TruncatedSeries] | None = None,
                 low: float = -inf, high: float = inf) -> None:
        self.ring = ring
        self.low = low
        self.high = high
        self.terms: dict[int, TruncatedSeries] = {
            k: v for k, v in (terms or {}).items() if v and low <= k <= high}

    # constructors
    @classmethod
    def scalar(cls, f: TruncatedSeries) -> Any:
        return cls(f.ring, {0: f})

    @classmethod
    def generator(cls, ring: SeriesRing, k: int = 1) -> Any:
        return cls(ring, {k: ring.one()})

    def _new(self, terms: Mapping[int, TruncatedSeries], low: float, high: float) -> Any:
        return type(self)(self.ring, terms, low, high)

    # bounds of the support, with unknown regions counted as unbounded
    def top(self) -> float:
        if self.high < inf:
            return inf
        return max(self.terms, default=-inf)

    def bottom(self) -> float:
        if self.low > -inf:
            return -inf
        return min(self.terms, default=inf)

    def coefficient(self, k: int) -> TruncatedSeries:
        if not self.low <= k <= self.high:
            raise OperatorError(f"coefficient of {self.symbol}^{k} lies outside the exact range "
                                f"[{self.low}, {self.high}]")
        return self.terms.get(k, self.ring.zero())

    def is_exact_at(self, k: int) -> bool:
        return self.low <= k <= self.high

    # linear structure
    def __add__(self, other: Any) -> Any:
        if isinstance(other, TruncatedSeries):
            other = type(self).scalar(other)
        if type(other) is not type(self):
            return NotImplemented
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return self._new(terms, max(self.low, other.low), min(self.high, other.high))

    __radd__ = __add__

    def __neg__(self) -> Any:
        return self._new({k: -v for k, v in self.terms.items()}, self.low, self.high)

    def __sub__(self, other: Any) -> Any:
        return self + (-other)

    def scale(self, c: Any) -> Any:
        return self._new({k: v * c for k, v in self.terms.items()}, self.low, self.high)

    def map_coefficients(self, fn: Callable[[TruncatedSeries], TruncatedSeries]) -> Any:
        return self._new({k: fn(v) for k, v in self.terms.items()}, self.low, self.high)

    def plus(self) -> Any:
        """Part with nonnegative powers (exact wherever the operator was)."""
        if self.low > 0:
            raise OperatorError("positive part of an operator with unknown low powers")
        return self._new({k: v for k, v in self.terms.items() if k >= 0}, -inf, self.high)

    def minus(self) -> Any:
        """Part with negative powers."""
        if self.high < -1:
            raise OperatorError("negative part of an operator with unknown high powers")
        return self._new({k: v for k, v in self.terms.items() if k < 0}, self.low, inf)

    def truncate(self, low: float = -inf, high: float = inf) -> Any:
        return self._new(self.terms, max(self.low, low), min(self.high, high))

    def _product_bounds(self, other: _Operator) -> tuple[float, float]:
        low, high = -inf, inf
        if self.low > -inf:
            low = max(low, self.low + other.top())
        if other.low > -inf:
            low = max(low, other.low + self.top())
        if self.high < inf:
            high = min(high, self.high + other.bottom())
        if other.high < inf:
            high = min(high, other.high + self.bottom())
        if low == inf or high == -inf or low > high:
            raise OperatorError("product of operators truncated in opposite directions")
        return low, high

    def __mul__(self, other: Any) -> Any:
        if isinstance(other, TruncatedSeries):
            other = type(self).scalar(other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if type(other) is not type(self):
            return NotImplemented
        low, high = self._product_bounds(other)
        out: dict[int, TruncatedSeries] = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                for k, c in self._compose(i, a, j, b, low, high):
                    out[k] = out[k] + c if k in out else c
        return self._new(out, low, high)

    def __rmul__(self, other: Any) -> Any:
        if isinstance(other, TruncatedSeries):
            return type(self).scalar(other) * self
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> Any:
        if n < 0:
            return self.inverse() ** (-n)
        out = type(self).generator(self.ring, 0)
        for _ in range(n):
            out = out * self
        return out

    def commutator(self, other: Any) -> Any:
        return self * other - other * self

    def is_zero(self) -> bool:
        return not self.terms

    def _compose(self, i: int, a: TruncatedSeries, j: int, b: TruncatedSeries,
                 low: float, high: float) -> Iterable[tuple[int, TruncatedSeries]]:
        raise NotImplementedError

    def inverse(self, depth: int) -> Any:
        raise NotImplementedError

    def to_json_obj(self) -> dict:
        return {"low": None if self.low == -inf else self.low, "high": None if self.high == inf else self.high,
                "terms": {str(k): v.to_json_obj() for k, v in sorted(self.terms.items())}}

    def __repr__(self) -> str:
        parts = [f"[{v}]{self.symbol}^{k}" for k, v in sorted(self.terms.items(), reverse=True)]
        return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------


class DifferenceOperator(_Operator):
    """Σ a_s Λ^s in the lattice variable ``var``."""

    __slots__ = ()
    symbol = "Λ"
    var = "x"

    def _compose(self, i: int, a: TruncatedSeries, j: int, b: TruncatedSeries,
                 low: float, high: float) -> Iterable[tuple[int, TruncatedSeries]]:
        k = i + j
        if low <= k <= high:
            yield k, a * shift(b, self.var, i)

    def shifted(self, s: Fraction | int) -> DifferenceOperator:
        """Coefficients shifted by x ↦ x + sε."""
        return self.map_coefficients(lambda f: shift(f, self.var, s))

    def right_coefficients(self) -> dict[int, TruncatedSeries]:
        """ã_s with A = Σ Λ^s ã_s, i.e. ã_s(x) = a_s(x − sε)."""
        return {s: shift(a, self.var, -s) for s, a in self.terms.items()}

    @classmethod
    def from_right(cls, ring: SeriesRing, right: Mapping[int, TruncatedSeries],
                   low: float = -inf, high: float = inf) -> DifferenceOperator:
        return cls(ring, {s: shift(c, cls.var, s) for s, c in right.items()}, low, high)

    def inverse(self, depth: int) -> DifferenceOperator:
        """Inverse of c Λ^k (1 + N) with N of strictly one-sided order, to ``depth`` extra powers.

        A Λ^{-1}-series (``low`` set or finite) is inverted downwards, a Λ-series
        (``high`` set) upwards.
        """
        return _one_sided_inverse(self, depth)


class PseudoDiffOperator(_Operator):
    """Σ a_k D^k with D = ε ∂_var."""

    __slots__ = ()
    symbol = "D"
    var = "X"

    def _compose(self, i: int, a: TruncatedSeries, j: int, b: TruncatedSeries,
                 low: float, high: float) -> Iterable[tuple[int, TruncatedSeries]]:
        n = 0
        d = b
        while d:
            k = i + j - n
            if k < low:
                break
            if k <= high:
                c = falling_binomial(i, n)
                if c:
                    term = d.mul_monomial({"eps": n}, c)
                    if term:
                        yield k, a * term
            if i >= 0 and n >= i:
                break
            n += 1
            d = d.derivative(self.var)

    def adjoint(self) -> PseudoDiffOperator:
        """Σ (−D)^k ∘ a_k."""
        if self.high < inf:
            raise OperatorError("adjoint of an operator truncated from above")
        out = PseudoDiffOperator(self.ring, {}, self.low, inf)
        for k, a in self.terms.items():
            piece = PseudoDiffOperator(self.ring, {k: self.ring.one().scale(1 if k % 2 == 0 else -1)}) * \
                PseudoDiffOperator.scalar(a)
            out = out + piece.truncate(self.low, inf)
        return out

    def residue(self) -> TruncatedSeries:
        """Coefficient of D^{-1}."""
        return self.coefficient(-1)

    def symbol_at(self, lam: str = "lam") -> TruncatedSeries:
        """Left symbol Σ a_k λ^k inside the coefficient ring (needs a λ variable)."""
        out = self.ring.zero()
        for k, a in self.terms.items():
            out = out + a.mul_monomial({lam: k})
        return out

    def inverse(self, depth: int) -> PseudoDiffOperator:
        return _one_sided_inverse(self, depth)


def _series_inverse(c: TruncatedSeries) -> TruncatedSeries:
    from .series import series_inverse

    return series_inverse(c)


def _one_sided_inverse(A: _Operator, depth: int) -> Any:
    """Inverse of an operator whose extreme known power has an invertible coefficient."""
    cls = type(A)
    if not A.terms:
        raise OperatorError("inverse of the zero operator")
    downward = A.high == inf
    if downward:
        k = max(A.terms)
        lead = A.terms[k]
    else:
        k = min(A.terms)
        lead = A.terms[k]
    inv_lead = _series_inverse(lead)
    # A = (lead G^k) (1 + N): first factor out lead on the left, G^k on the right
    G_inv = cls.generator(A.ring, -k)
    left = cls.scalar(inv_lead) * A * G_inv
    left = left.truncate(*((A.low - k, inf) if downward else (-inf, A.high - k)))
    one = cls.generator(A.ring, 0)
    N = left - one
    if downward:
        bound = -depth
        N = N.truncate(bound, inf)
        if any(p >= 0 for p in N.terms):
            raise OperatorError("operator is not of the form lead·G^k·(1 + lower order)")
    else:
        bound = depth
        N = N.truncate(-inf, bound)
        if any(p <= 0 for p in N.terms):
            raise OperatorError("operator is not of the form lead·G^k·(1 + higher order)")
    # (1 + N)^{-1} = Σ (−N)^l
    acc = one.truncate(*((bound, inf) if downward else (-inf, bound)))
    term = acc
    for _ in range(depth):
        term = (term * (-N)).truncate(*((bound, inf) if downward else (-inf, bound)))
        if term.is_zero():
            break
        acc = acc + term
    out = G_inv * acc * cls.scalar(inv_lead)
    return out.truncate(*((bound - k, inf) if downward else (-inf, bound - k)))
