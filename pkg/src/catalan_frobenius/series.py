"""Truncated multivariate formal series with exact coefficients.

A :class:`SeriesRing` fixes an ordered list of variables and a set of linear
gradings, each with an upper cap.  Monomials whose grade exceeds a cap are
dropped on creation, so truncation is an ideal as long as every operand has
nonnegative grade in every grading (the callers arrange their gradings so).

Monomials are packed into a single Python integer: variable ``j`` occupies
bits ``[B*j, B*(j+1))`` holding ``exponent + OFFSET``.  Multiplying two
monomials is then one integer addition followed by subtracting the doubled
offset, and no field can carry as long as exponents stay in range.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

from .scalars import ExactScalar, format_scalar

_BITS = 12
_OFFSET = 1 << (_BITS - 1)
_MASK = (1 << _BITS) - 1


class SeriesError(ValueError):
    """Raised on ill-posed truncated-series operations."""


@dataclass(frozen=True)
class Grading:
    """Linear form on exponent vectors with an upper cap."""

    name: str
    weights: Mapping[str, int]
    cap: int


@dataclass(frozen=True)
class CapProfile:
    """User-facing truncation caps.

    ``to_gradings`` turns them into ring gradings: total degree in the time
    variables, the ε upper bound, the λ lower bound, and an optional ψ cap.
    """

    genus_max: int = 2
    eps_window: tuple[int, int] = (-2, 2)
    degree_max: int = 3
    index_max: int = 2
    lambda_degree_window: tuple[int, int] = (-12, 12)
    psi_degree_max: int | None = None

    def __post_init__(self) -> None:
        if self.genus_max < 0 or self.degree_max < 0 or self.index_max < 0:
            raise SeriesError("caps must be nonnegative")
        if self.eps_window[0] > self.eps_window[1]:
            raise SeriesError("eps_window.min must not exceed eps_window.max")
        if self.lambda_degree_window[0] > self.lambda_degree_window[1]:
            raise SeriesError("lambda window is empty")

    def to_gradings(self, time_vars: Iterable[str], eps: str | None = "eps",
                    psi: str | None = "psi") -> list[Grading]:
        out = [Grading("degree", {v: 1 for v in time_vars}, self.degree_max)]
        if eps is not None:
            out.append(Grading("eps", {eps: 1}, self.eps_window[1]))
        if psi is not None and self.psi_degree_max is not None:
            out.append(Grading("psi", {psi: 1}, self.psi_degree_max))
        return out


class SeriesRing:
    """Ordered variables plus capped linear gradings."""

    def __init__(self, variables: Sequence[str], gradings: Sequence[Grading] = ()) -> None:
        if len(set(variables)) != len(variables):
            raise SeriesError("duplicate variable names")
        self.variables: tuple[str, ...] = tuple(variables)
        self.index = {v: j for j, v in enumerate(self.variables)}
        for g in gradings:
            for v in g.weights:
                if v not in self.index:
                    raise SeriesError(f"grading {g.name} mentions unknown variable {v}")
        self.gradings: tuple[Grading, ...] = tuple(gradings)
        self.caps: tuple[int, ...] = tuple(g.cap for g in gradings)
        self._wvec = [tuple(g.weights.get(v, 0) for v in self.variables) for g in gradings]
        self.offset_key = sum(_OFFSET << (_BITS * j) for j in range(len(self.variables)))
        self.one_key = self.offset_key
        self._grade_cache: dict[int, tuple[int, ...]] = {self.one_key: (0,) * len(gradings)}

    # monomial encoding ------------------------------------------------------
    def encode(self, exps: Mapping[str, int] | Sequence[int]) -> int:
        if isinstance(exps, Mapping):
            vec = [0] * len(self.variables)
            for v, e in exps.items():
                if v not in self.index:
                    raise SeriesError(f"unknown variable {v!r}")
                vec[self.index[v]] = e
        else:
            vec = list(exps)
        key = 0
        for j, e in enumerate(vec):
            if not -_OFFSET <= e < _OFFSET:
                raise SeriesError("exponent out of representable range")
            key |= (e + _OFFSET) << (_BITS * j)
        return key

    def decode(self, key: int) -> tuple[int, ...]:
        return tuple(((key >> (_BITS * j)) & _MASK) - _OFFSET for j in range(len(self.variables)))

    def exponent(self, key: int, var: str) -> int:
        return ((key >> (_BITS * self.index[var])) & _MASK) - _OFFSET

    def var_unit(self, var: str, e: int = 1) -> int:
        """Key increment that multiplies a monomial by var**e."""
        return e << (_BITS * self.index[var])

    def grade(self, key: int) -> tuple[int, ...]:
        g = self._grade_cache.get(key)
        if g is None:
            vec = self.decode(key)
            g = tuple(sum(w * e for w, e in zip(wv, vec)) for wv in self._wvec)
            self._grade_cache[key] = g
        return g

    def admissible(self, key: int) -> bool:
        return all(x <= c for x, c in zip(self.grade(key), self.caps))

    def with_gradings(self, gradings: Sequence[Grading]) -> SeriesRing:
        return SeriesRing(self.variables, gradings)

    def with_caps(self, **caps: int) -> SeriesRing:
        """Same variables, caps of the named gradings replaced."""
        new = [Grading(g.name, g.weights, caps.get(g.name, g.cap)) for g in self.gradings]
        return SeriesRing(self.variables, new)

    # constructors -----------------------------------------------------------
    def zero(self) -> TruncatedSeries:
        return TruncatedSeries(self, {})

    def one(self) -> TruncatedSeries:
        return self.const(1)

    def const(self, c: Any) -> TruncatedSeries:
        return TruncatedSeries(self, {self.one_key: c} if c else {})

    def var(self, name: str, c: Any = 1) -> TruncatedSeries:
        return self.monomial({name: 1}, c)

    def monomial(self, exps: Mapping[str, int], c: Any = 1) -> TruncatedSeries:
        key = self.encode(exps)
        if not c or not self.admissible(key):
            return self.zero()
        return TruncatedSeries(self, {key: c})

    def from_terms(self, terms: Iterable[tuple[Mapping[str, int], Any]]) -> TruncatedSeries:
        out: dict[int, Any] = {}
        for exps, c in terms:
            key = self.encode(exps)
            if self.admissible(key):
                out[key] = out.get(key, 0) + c
        return TruncatedSeries(self, {k: c for k, c in out.items() if c})

    def __repr__(self) -> str:
        caps = ", ".join(f"{g.name}<={g.cap}" for g in self.gradings)
        return f"SeriesRing({list(self.variables)}; {caps})"


def _is_nonzero(c: Any) -> bool:
    return bool(c)


class TruncatedSeries:
    """Immutable truncated series: packed monomial key -> coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: SeriesRing, terms: dict[int, Any]) -> None:
        self.ring = ring
        self.terms = terms

    # basic structure -----------------------------------------------------------
    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self) -> Iterator[tuple[tuple[int, ...], Any]]:
        dec = self.ring.decode
        for k, c in self.terms.items():
            yield dec(k), c

    def monomials(self) -> list[tuple[dict[str, int], Any]]:
        out = []
        for k, c in self.terms.items():
            exps = {v: e for v, e in zip(self.ring.variables, self.ring.decode(k)) if e}
            out.append((exps, c))
        return out

    def coefficient(self, exps: Mapping[str, int] | None = None) -> Any:
        key = self.ring.encode(exps or {})
        return self.terms.get(key, 0)

    def constant_term(self) -> Any:
        return self.terms.get(self.ring.one_key, 0)

    def _check(self, other: TruncatedSeries) -> None:
        if other.ring is not self.ring:
            raise SeriesError("operands live in different rings")

    def _lift(self, other: Any) -> TruncatedSeries | None:
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.ring.const(other)
        return None

    # arithmetic ----------------------------------------------------------------
    def __add__(self, other: Any) -> TruncatedSeries:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if len(o.terms) > len(self.terms):
            a, b = o.terms, self.terms
        else:
            a, b = self.terms, o.terms
        terms = dict(a)
        for k, c in b.items():
            v = terms.get(k)
            if v is None:
                terms[k] = c
            else:
                v = v + c
                if v:
                    terms[k] = v
                else:
                    del terms[k]
        return TruncatedSeries(self.ring, terms)

    __radd__ = __add__

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: Any) -> TruncatedSeries:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> TruncatedSeries:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c: Any) -> TruncatedSeries:
        if not c:
            return self.ring.zero()
        out = {}
        for k, v in self.terms.items():
            w = v * c
            if w:
                out[k] = w
        return TruncatedSeries(self.ring, out)

    def __mul__(self, other: Any) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return _mul(self, other)
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other: Any) -> TruncatedSeries:
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other: Any) -> TruncatedSeries:
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / other)
        return NotImplemented

    def __pow__(self, n: int) -> TruncatedSeries:
        if n < 0:
            raise SeriesError("negative power of a truncated series")
        out, base = self.ring.one(), self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TruncatedSeries):
            return self.ring is other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self == self.ring.const(other)
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def mul_monomial(self, exps: Mapping[str, int], c: Any = 1) -> TruncatedSeries:
        """Multiply by c * monomial (the monomial may have negative exponents)."""
        ring = self.ring
        shift = sum(ring.var_unit(v, e) for v, e in exps.items())
        out = {}
        for k, v in self.terms.items():
            nk = k + shift
            if ring.admissible(nk):
                out[nk] = v * c
        return TruncatedSeries(ring, out)

    # calculus ------------------------------------------------------------------
    def derivative(self, var: str, n: int = 1) -> TruncatedSeries:
        ring = self.ring
        j = ring.index[var]
        unit = 1 << (_BITS * j)
        out = {}
        for k, c in self.terms.items():
            e = ((k >> (_BITS * j)) & _MASK) - _OFFSET
            f = 1
            for m in range(n):
                f *= e - m
            if f:
                out[k - n * unit] = c * f
        return TruncatedSeries(ring, out)

    def restrict(self, ring: SeriesRing | None = None, predicate: Callable[[tuple[int, ...]], bool] | None = None) -> TruncatedSeries:
        """Drop monomials outside ``ring``'s caps (same variables) or failing ``predicate``."""
        target = ring or self.ring
        if target.variables != self.ring.variables:
            raise SeriesError("restrict requires identical variable lists")
        out = {}
        for k, c in self.terms.items():
            if not target.admissible(k):
                continue
            if predicate is not None and not predicate(self.ring.decode(k)):
                continue
            out[k] = c
        return TruncatedSeries(target, out)

    def embed(self, ring: SeriesRing) -> TruncatedSeries:
        """Re-express in a ring whose variables include all of ours."""
        if ring is self.ring:
            return self
        names = self.ring.variables
        out: dict[int, Any] = {}
        for k, c in self.terms.items():
            vec = self.ring.decode(k)
            exps = {v: e for v, e in zip(names, vec) if e}
            nk = ring.encode(exps)
            if ring.admissible(nk):
                out[nk] = out.get(nk, 0) + c
        return TruncatedSeries(ring, {k: c for k, c in out.items() if c})

    def map_coefficients(self, fn: Callable[[Any], Any]) -> TruncatedSeries:
        out = {}
        for k, c in self.terms.items():
            v = fn(c)
            if v:
                out[k] = v
        return TruncatedSeries(self.ring, out)

    def split_by(self, var: str) -> dict[int, TruncatedSeries]:
        """Group by the exponent of ``var``; the returned pieces keep ``var`` at exponent 0."""
        ring = self.ring
        j = ring.index[var]
        unit = 1 << (_BITS * j)
        out: dict[int, dict[int, Any]] = {}
        for k, c in self.terms.items():
            e = ((k >> (_BITS * j)) & _MASK) - _OFFSET
            out.setdefault(e, {})[k - e * unit] = c
        return {e: TruncatedSeries(ring, t) for e, t in sorted(out.items())}

    def coefficient_of_power(self, var: str, e: int) -> TruncatedSeries:
        return self.split_by(var).get(e, self.ring.zero())

    def set_variable(self, var: str, value: Any) -> TruncatedSeries:
        """Evaluate ``var`` at a scalar value (exponents must be nonnegative unless value is +-1)."""
        ring = self.ring
        out = ring.zero()
        for e, piece in self.split_by(var).items():
            if e < 0 and not isinstance(value, (int, Fraction)):
                raise SeriesError("negative exponent at a symbolic value")
            factor = Fraction(value) ** e if isinstance(value, (int, Fraction)) else value ** e
            out = out + piece.scale(factor)
        return out

    # composition -----------------------------------------------------------------
    def substitute(self, values: Mapping[str, TruncatedSeries], shift_safe: Iterable[str] = ()) -> TruncatedSeries:
        """Replace each variable in ``values`` by a series of the same ring.

        A value with a nonzero constant term is accepted only for variables in
        ``shift_safe``: the caller asserts that the exponent of that variable
        is bounded by the caps so the expansion is exact.
        """
        safe = set(shift_safe)
        for v, val in values.items():
            if val.ring is not self.ring:
                raise SeriesError("substituted value must live in the same ring")
            if val.constant_term() and v not in safe:
                raise SeriesError(f"substituting a value with constant term into {v!r} requires a shift-safe slot")
        ring = self.ring
        names = list(values)
        idx = [ring.index[v] for v in names]
        powers: dict[tuple[int, int], TruncatedSeries] = {}

        def power(slot: int, e: int) -> TruncatedSeries:
            if e < 0:
                raise SeriesError("negative exponent in a substituted variable")
            key = (slot, e)
            if key not in powers:
                powers[key] = ring.one() if e == 0 else power(slot, e - 1) * values[names[slot]]
            return powers[key]

        groups: dict[tuple[int, ...], dict[int, Any]] = {}
        for k, c in self.terms.items():
            es = tuple(((k >> (_BITS * j)) & _MASK) - _OFFSET for j in idx)
            rest = k - sum(e << (_BITS * j) for e, j in zip(es, idx))
            groups.setdefault(es, {})[rest] = c
        out = ring.zero()
        for es, rest_terms in groups.items():
            factor = ring.one()
            for slot, e in enumerate(es):
                if e:
                    factor = factor * power(slot, e)
            out = out + TruncatedSeries(ring, rest_terms) * factor
        return out

    # exp / log -----------------------------------------------------------------
    def exp(self, max_terms: int = 4096) -> TruncatedSeries:
        return series_exp(self, max_terms)

    def log1p(self, max_terms: int = 4096) -> TruncatedSeries:
        return series_log1p(self, max_terms)

    # serialization ---------------------------------------------------------------
    def sorted_terms(self, eps: str | None = "eps") -> list[tuple[dict[str, int], int, Any]]:
        """Graded-lex order: by total degree of non-ε variables, then exponent vector."""
        rows = []
        names = self.ring.variables
        for k, c in self.terms.items():
            vec = self.ring.decode(k)
            e = vec[self.ring.index[eps]] if eps in self.ring.index else 0
            mono = {v: x for v, x in zip(names, vec) if x and v != eps}
            deg = sum(x for v, x in mono.items())
            order = tuple(vec[j] for j, v in enumerate(names) if v != eps)
            rows.append(((deg, tuple(-x for x in order), e), mono, e, c))
        rows.sort(key=lambda r: r[0])
        return [(m, e, c) for _, m, e, c in rows]

    def to_json_obj(self, eps: str | None = "eps") -> list[dict[str, Any]]:
        return [{"monomial": m, "eps": e, "value": format_coefficient(c)} for m, e, c in self.sorted_terms(eps)]

    def to_json(self, eps: str | None = "eps") -> str:
        return json.dumps(self.to_json_obj(eps), sort_keys=True)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, e, c in self.sorted_terms():
            mono = "*".join(f"{v}^{x}" if x != 1 else v for v, x in m.items())
            if e:
                mono = (mono + "*" if mono else "") + f"eps^{e}"
            parts.append(f"({format_coefficient(c)})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def format_coefficient(c: Any) -> str:
    if isinstance(c, ExactScalar):
        return format_scalar(c)
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    ring = a.ring
    if not a.terms or not b.terms:
        return ring.zero()
    if len(a.terms) > len(b.terms):
        a, b = b, a
    off = ring.offset_key
    caps = ring.caps
    grade = ring.grade
    cache = ring._grade_cache
    out: dict[int, Any] = {}
    if not caps:
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                k = ka + kb - off
                v = out.get(k)
                out[k] = ca * cb if v is None else v + ca * cb
        return TruncatedSeries(ring, {k: c for k, c in out.items() if c})
    # sort b by its first grading to allow an early break
    bl = sorted(((grade(kb), kb, cb) for kb, cb in b.terms.items()), key=lambda t: t[0][0])
    c0 = caps[0]
    ncap = len(caps)
    if ncap == 1:
        for ka, ca in a.terms.items():
            room = c0 - grade(ka)[0]
            for gb, kb, cb in bl:
                if gb[0] > room:
                    break
                k = ka + kb - off
                v = out.get(k)
                out[k] = ca * cb if v is None else v + ca * cb
                if k not in cache:
                    cache[k] = (c0 - room + gb[0],)
    else:
        for ka, ca in a.terms.items():
            ga = grade(ka)
            room = c0 - ga[0]
            for gb, kb, cb in bl:
                if gb[0] > room:
                    break
                ok = True
                for j in range(1, ncap):
                    if ga[j] + gb[j] > caps[j]:
                        ok = False
                        break
                if not ok:
                    continue
                k = ka + kb - off
                v = out.get(k)
                out[k] = ca * cb if v is None else v + ca * cb
                if k not in cache:
                    cache[k] = tuple(x + y for x, y in zip(ga, gb))
    return TruncatedSeries(ring, {k: c for k, c in out.items() if c})


def series_exp(s: TruncatedSeries, max_terms: int = 4096) -> TruncatedSeries:
    """exp(s) for s with vanishing constant term, expanded until the powers die."""
    if s.constant_term():
        raise SeriesError("non-nilpotent exponent")
    ring = s.ring
    out = ring.one()
    term = ring.one()
    for n in range(1, max_terms + 1):
        term = (term * s).scale(Fraction(1, n))
        if term.is_zero():
            return out
        out = out + term
    raise SeriesError("non-nilpotent exponent")


def series_log1p(s: TruncatedSeries, max_terms: int = 4096) -> TruncatedSeries:
    """log(1 + s) for s with vanishing constant term."""
    if s.constant_term():
        raise SeriesError("log requires a unit constant term")
    ring = s.ring
    out = ring.zero()
    power = ring.one()
    for n in range(1, max_terms + 1):
        power = power * s
        if power.is_zero():
            return out
        out = out + power.scale(Fraction((-1) ** (n + 1), n))
    raise SeriesError("non-nilpotent logarithm argument")


def series_log(s: TruncatedSeries) -> TruncatedSeries:
    """log(s) for s with constant term 1."""
    if s.constant_term() != 1:
        raise SeriesError("log requires constant term 1")
    return series_log1p(s - 1)


def series_inverse(s: TruncatedSeries, max_terms: int = 4096) -> TruncatedSeries:
    """1/s for s with invertible rational constant term."""
    c = s.constant_term()
    if not c:
        raise SeriesError("series with zero constant term is not invertible")
    inv_c = Fraction(1) / c if isinstance(c, (int, Fraction)) else c.inverse()
    n = s.scale(inv_c) - 1
    ring = s.ring
    out = ring.one()
    power = ring.one()
    for _ in range(max_terms):
        power = -(power * n)
        if power.is_zero():
            return out.scale(inv_c)
        out = out + power
    raise SeriesError("inverse did not terminate under the caps")


# --------------------------------------------------------------------------
# λ-Laurent objects with at most one power of log λ


class LambdaObject:
    """Finite sum of c_{m,p} λ^m (log λ)^p with p in {0, 1}.

    Coefficients may be any ring elements (ExactScalar, Fraction or
    TruncatedSeries).  Terms with m below ``window[0]`` or above
    ``window[1]`` are discarded.
    """

    __slots__ = ("terms", "window")

    def __init__(self, terms: Mapping[tuple[int, int], Any] | None = None,
                 window: tuple[int, int] = (-64, 64)) -> None:
        self.window = window
        clean: dict[tuple[int, int], Any] = {}
        for (m, p), c in (terms or {}).items():
            if p not in (0, 1):
                raise SeriesError("log-degree exceeds 1")
            if window[0] <= m <= window[1] and _is_nonzero(c):
                clean[(m, p)] = c
        self.terms = clean

    @classmethod
    def monomial(cls, m: int, c: Any = 1, p: int = 0, window: tuple[int, int] = (-64, 64)) -> LambdaObject:
        return cls({(m, p): c}, window)

    def log_degree(self) -> int:
        return max((p for (_, p) in self.terms), default=0)

    def coefficient(self, m: int, p: int = 0) -> Any:
        return self.terms.get((m, p), 0)

    def _merge(self, other: LambdaObject) -> tuple[int, int]:
        return (max(self.window[0], other.window[0]), min(self.window[1], other.window[1]))

    def __add__(self, other: LambdaObject) -> LambdaObject:
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return LambdaObject(terms, self._merge(other))

    def __neg__(self) -> LambdaObject:
        return LambdaObject({k: -c for k, c in self.terms.items()}, self.window)

    def __sub__(self, other: LambdaObject) -> LambdaObject:
        return self + (-other)

    def scale(self, c: Any) -> LambdaObject:
        return LambdaObject({k: v * c for k, v in self.terms.items()}, self.window)

    def __mul__(self, other: Any) -> LambdaObject:
        if not isinstance(other, LambdaObject):
            return self.scale(other)
        window = self._merge(other)
        terms: dict[tuple[int, int], Any] = {}
        for (m1, p1), c1 in self.terms.items():
            for (m2, p2), c2 in other.terms.items():
                m = m1 + m2
                if not window[0] <= m <= window[1]:
                    continue
                if p1 + p2 > 1:
                    raise SeriesError("log-degree exceeds 1")
                k = (m, p1 + p2)
                terms[k] = terms[k] + c1 * c2 if k in terms else c1 * c2
        return LambdaObject(terms, window)

    __rmul__ = scale

    def shift(self, m: int) -> LambdaObject:
        """Multiply by λ^m."""
        return LambdaObject({(k + m, p): c for (k, p), c in self.terms.items()},
                            (self.window[0] + min(m, 0), self.window[1] + max(m, 0)))

    def derivative(self) -> LambdaObject:
        terms: dict[tuple[int, int], Any] = {}

        def put(k: tuple[int, int], c: Any) -> None:
            terms[k] = terms[k] + c if k in terms else c

        for (m, p), c in self.terms.items():
            if m:
                put((m - 1, p), c * m)
            if p:
                put((m - 1, 0), c)
        return LambdaObject(terms, self.window)

    def integral(self) -> LambdaObject:
        """Formal antiderivative with zero integration constant.

        λ^{-1} integrates to log λ and λ^m log λ to
        λ^{m+1}/(m+1) (log λ − 1/(m+1)).
        """
        terms: dict[tuple[int, int], Any] = {}

        def put(k: tuple[int, int], c: Any) -> None:
            terms[k] = terms[k] + c if k in terms else c

        for (m, p), c in self.terms.items():
            if p == 0:
                if m == -1:
                    put((0, 1), c)
                else:
                    put((m + 1, 0), c * Fraction(1, m + 1))
            else:
                if m == -1:
                    raise SeriesError("integral of log(λ)/λ leaves the log-degree-one class")
                put((m + 1, 1), c * Fraction(1, m + 1))
                put((m + 1, 0), c * Fraction(-1, (m + 1) ** 2))
        lo, hi = self.window
        return LambdaObject(terms, (lo, hi + 1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LambdaObject):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(_is_zero_any(self.coefficient(*k) - other.coefficient(*k)) for k in keys)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        parts = []
        for (m, p), c in sorted(self.terms.items()):
            parts.append(f"({c})*lam^{m}" + ("*log(lam)" if p else ""))
        return " + ".join(parts) or "0"


def _is_zero_any(c: Any) -> bool:
    if isinstance(c, TruncatedSeries):
        return c.is_zero()
    return not c


def lambda_residue_at_infinity(f: LambdaObject) -> Any:
    """res_{λ=∞} f dλ = −[λ^{-1}] f."""
    if f.log_degree() > 0:
        raise SeriesError("logarithmic residue undefined")
    c = f.coefficient(-1)
    return -c


def lambda_object_from_series(s: TruncatedSeries, lam: str = "lam",
                              window: tuple[int, int] = (-512, 511)) -> LambdaObject:
    """View a series containing the variable ``lam`` as a λ-Laurent object."""
    return LambdaObject({(m, 0): piece for m, piece in s.split_by(lam).items()}, window)


def polynomial_ring(variables: Sequence[str], degree_max: int) -> SeriesRing:
    """Convenience ring with a single total-degree cap."""
    return SeriesRing(variables, [Grading("degree", {v: 1 for v in variables}, degree_max)])


__all__ = [
    "CapProfile",
    "Grading",
    "LambdaObject",
    "SeriesError",
    "SeriesRing",
    "TruncatedSeries",
    "format_coefficient",
    "lambda_object_from_series",
    "lambda_residue_at_infinity",
    "polynomial_ring",
    "series_exp",
    "series_inverse",
    "series_log",
    "series_log1p",
]
