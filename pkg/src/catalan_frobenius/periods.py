"""Period vectors at the point (t^1, t^2) = (0, 1), where u^1 = −u^2 = 2.

At this point I^{(0)}_{e_1} = I^{(0)}_{e_2} = (1, λ/2)ᵗ (λ² − 4)^{-1/2}.  Three
representations are produced:

* ``closed``: the λ^{-1}-expansion of that closed form, differentiated l times
  (l ≥ 0) or formally integrated −l times (l < 0, no integration constants),
  plus the polynomial part P_i^{(l)};
* ``infty``: the explicit coefficient formulas of the same expansions;
* ``u1``/``u2``: Puiseux expansions in (λ − u^i)^{1/2}.

Branches: √(λ ∓ 2) are principal near ±2 on the plane cut along ±2 + iR_+.
Consequently √(λ − 2) = −2i·(1 − (λ+2)/4)^{1/2} near λ = −2, which is where the
factor i of the u2 expansion comes from.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Mapping, Sequence

from .frobenius import SPECIAL_POINT
from .linalg import Matrix
from .scalars import ExactScalar, Rational, as_scalar, harmonic, pochhammer
from .series import LambdaObject

HALF = Fraction(1, 2)
REPRESENTATIONS = ("closed", "infty", "u1", "u2")

Vec = tuple[ExactScalar, ExactScalar]


class PeriodError(ValueError):
    pass


# ---------------------------------------------------------------------------
# expansions at infinity


@dataclass(frozen=True)
class PeriodVector:
    """Two λ-Laurent components (with at most one power of log λ)."""

    level: int
    label: Vec
    representation: str
    components: tuple[LambdaObject, LambdaObject]
    window: tuple[int, int]

    def __getitem__(self, j: int) -> LambdaObject:
        return self.components[j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PeriodVector):
            return NotImplemented
        return all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None  # type: ignore[assignment]

    def derivative(self) -> PeriodVector:
        return PeriodVector(self.level + 1, self.label, self.representation,
                            (self.components[0].derivative(), self.components[1].derivative()), self.window)

    def to_json_obj(self) -> dict:
        return {"level": self.level, "representation": self.representation,
                "label": [str(x) for x in self.label],
                "components": [lambda_to_json(c) for c in self.components]}


def lambda_to_json(f: LambdaObject) -> list[dict]:
    return [{"power": m, "log": p, "coeff": str(as_scalar(c) if not isinstance(c, ExactScalar) else c)}
            for (m, p), c in sorted(f.terms.items(), key=lambda kv: (-kv[0][0], -kv[0][1]))]


def _leading_power(level: int) -> int:
    """Lowest power the first component must reach to show its leading term."""
    return -level - 1 if level >= 0 else 0


def _check_window(level: int, order: int) -> None:
    if order < 0 or -order > _leading_power(level):
        raise PeriodError(f"window λ^{-order} too small for the leading term of level {level}")


def _base_expansion(depth: int) -> tuple[LambdaObject, LambdaObject]:
    """(1, λ/2)·(λ² − 4)^{-1/2} = (1, λ/2)·Σ C(2s, s) λ^{-2s-1} down to λ^{-depth}."""
    win = (-depth, 64)
    first: dict[tuple[int, int], Fraction] = {}
    second: dict[tuple[int, int], Fraction] = {}
    s = 0
    while 2 * s + 1 <= depth + 1:
        c = Fraction(comb(2 * s, s))
        first[(-2 * s - 1, 0)] = c
        second[(-2 * s, 0)] = c / 2
        s += 1
    return LambdaObject(first, win), LambdaObject(second, win)


def _clip(f: LambdaObject, order: int) -> LambdaObject:
    return LambdaObject({k: c for k, c in f.terms.items() if k[0] >= -order}, (-order, 64))


def polynomial_part(i: int, level: int) -> tuple[LambdaObject, LambdaObject]:
    """P_i^{(l)} for l < 0 (zero for l ≥ 0); i = 2 carries the πi shifts."""
    if i not in (1, 2):
        raise PeriodError("i must be 1 or 2")
    if level >= 0:
        return LambdaObject(), LambdaObject()
    L = -level
    pi_i = ExactScalar.pi() * ExactScalar.i() if i == 2 else ExactScalar(0)
    first: dict[tuple[int, int], ExactScalar] = {}
    second: dict[tuple[int, int], ExactScalar] = {}
    for a in range((L - 1) // 2 + 1):
        j = L - 1 - 2 * a
        c = (pi_i + harmonic(a)) * Fraction(1, factorial(a) ** 2 * factorial(j))
        first[(j, 0)] = first.get((j, 0), ExactScalar(0)) + c
    for a in range(L):
        j = L - 2 - 2 * a
        if j < 0:
            break
        c = (pi_i * 2 + harmonic(a) + harmonic(a + 1)) * Fraction(-1, 2 * factorial(a) * factorial(a + 1) * factorial(j))
        second[(j, 0)] = second.get((j, 0), ExactScalar(0)) + c
    return LambdaObject(first), LambdaObject(second)


def _label_vec(label: Sequence[Rational | ExactScalar]) -> Vec:
    if len(label) != 2:
        raise PeriodError("label must have two entries")
    return as_scalar(label[0]), as_scalar(label[1])


def _combine_labels(label: Vec, level: int, parts: Mapping[int, tuple[LambdaObject, LambdaObject]],
                    order: int) -> tuple[LambdaObject, LambdaObject]:
    """a_1 (common + P_1) + a_2 (common + P_2)."""
    a1, a2 = label
    out = []
    for j in range(2):
        f = parts[0][j].scale(a1 + a2) + parts[1][j].scale(a1) + parts[2][j].scale(a2)
        out.append(_clip(LambdaObject({k: as_scalar(c) for k, c in f.terms.items()}), order))
    return out[0], out[1]


def period_special(level: int, order: int, label: Sequence[Rational | ExactScalar] = (1, 0),
                   representation: str = "closed") -> PeriodVector:
    """I^{(level)}_a at the special point, expanded at λ = ∞ down to λ^{-order}."""
    _check_window(level, order)
    if representation == "closed":
        common = _closed_expansion(level, order)
    elif representation == "infty":
        common = _explicit_expansion(level, order)
    else:
        raise PeriodError(f"representation {representation!r} is not an expansion at infinity")
    lab = _label_vec(label)
    comps = _combine_labels(lab, level, {0: common, 1: polynomial_part(1, level), 2: polynomial_part(2, level)}, order)
    return PeriodVector(level, lab, representation, comps, (-order, 64))


def _closed_expansion(level: int, order: int) -> tuple[LambdaObject, LambdaObject]:
    depth = order + abs(level) + 2
    a, b = _base_expansion(depth)
    for _ in range(max(level, 0)):
        a, b = a.derivative(), b.derivative()
    for _ in range(max(-level, 0)):
        a, b = a.integral(), b.integral()
    return _clip(a, order), _clip(b, order)


def _explicit_expansion(level: int, order: int) -> tuple[LambdaObject, LambdaObject]:
    first: dict[tuple[int, int], Fraction] = {}
    second: dict[tuple[int, int], Fraction] = {}

    def put(d: dict, key: tuple[int, int], c: Fraction) -> None:
        if key[0] >= -order and c:
            d[key] = d.get(key, Fraction(0)) + c

    if level == 0:
        return _base_expansion(order)
    if level > 0:
        l = level
        sign = 1 if l % 2 == 0 else -1
        s = 0
        while -2 * s - l - 1 >= -order:
            w = Fraction(factorial(2 * s + l), factorial(s) * factorial(s + 1)) * sign
            put(first, (-2 * s - l - 1, 0), w * (s + 1))
            put(second, (-2 * s - l - 2, 0), w * (2 * s + l + 1))
            s += 1
        return LambdaObject(first, (-order, 64)), LambdaObject(second, (-order, 64))
    L = -level
    sign = 1 if L % 2 == 0 else -1
    for s in range((L - 1) // 2 + 1):
        p = L - 2 * s - 1
        c = Fraction(1, factorial(s) ** 2 * factorial(p))
        put(first, (p, 1), c)
        put(first, (p, 0), -c * harmonic(p))
    s = (L + 1) // 2
    while L - 2 * s - 1 >= -order:
        put(first, (L - 2 * s - 1, 0), Fraction(factorial(2 * s - L), factorial(s) ** 2) * sign)
        s += 1
    put(second, (L, 0), Fraction(1, 2 * factorial(L)))
    for s in range(1, L // 2 + 1):
        p = L - 2 * s
        c = Fraction(1, factorial(s) * factorial(s - 1) * factorial(p))
        put(second, (p, 1), -c)
        put(second, (p, 0), c * harmonic(p))
    s = (L + 2) // 2
    while L - 2 * s >= -order:
        put(second, (L - 2 * s, 0), Fraction(factorial(2 * s - L - 1), factorial(s) * factorial(s - 1)) * sign)
        s += 1
    return LambdaObject(first, (-order, 64)), LambdaObject(second, (-order, 64))


def ode_residual(I: PeriodVector) -> tuple[LambdaObject, LambdaObject]:
    """(𝒰 − λ)∂_λ I − (μ + l + 1/2) I, truncated to the window of I."""
    U, mu = SPECIAL_POINT.euler_matrix, SPECIAL_POINT.mu
    lo, hi = I.window
    dI = tuple(LambdaObject(c.terms, (lo - 1, hi)).derivative() for c in I.components)
    out = []
    for a in range(2):
        f = -(dI[a].shift(1)) - I[a].scale(as_scalar(I.level + HALF))
        for b in range(2):
            if U[a, b]:
                f = f + dI[b].scale(U[a, b])
            if mu[a, b]:
                f = f - I[b].scale(mu[a, b])
        out.append(LambdaObject(f.terms, I.window))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# expansions near u^i


@dataclass(frozen=True)
class PuiseuxVector:
    """Σ_e c_e (λ − u)^e over half-integer exponents e, c_e ∈ C²."""

    level: int
    point: int  # the value of u^i
    terms: dict[Fraction, Vec]
    order: Fraction  # exponents ≤ order are exact

    def leading(self) -> tuple[Fraction, Vec]:
        e = min(self.terms)
        return e, self.terms[e]

    def derivative(self) -> PuiseuxVector:
        terms = {}
        for e, (c1, c2) in self.terms.items():
            if e:
                terms[e - 1] = (c1 * e, c2 * e)
        return PuiseuxVector(self.level + 1, self.point, terms, self.order - 1)

    def to_json_obj(self) -> dict:
        return {"level": self.level, "point": self.point,
                "terms": [{"exponent": str(e), "coeff": [str(c) for c in v]} for e, v in sorted(self.terms.items())]}


def _sqrt_derivative_coefficient(n: int) -> Fraction:
    """∂_λ^n (λ − u)^{1/2} = [this]·(λ − u)^{1/2 − n}, for every integer n (n < 0: primitives)."""
    out = Fraction(1)
    if n >= 0:
        for j in range(n):
            out *= HALF - j
    else:
        for j in range(1, -n + 1):
            out /= HALF + j
    return out


def period_near_ui(i: int, level: int, order: int) -> PuiseuxVector:
    """Expansion of I^{(level)}_{e_i} at λ = u^i with k = 0..order terms of the sum."""
    if i not in (1, 2):
        raise PeriodError("i must be 1 or 2")
    u = 2 if i == 1 else -2
    base = Fraction(-1, 4) if i == 1 else Fraction(1, 4)
    sgn = -1 if i == 1 else 1
    pref = ExactScalar(1) if i == 1 else ExactScalar.i()
    terms: dict[Fraction, Vec] = {}
    for k in range(order + 1):
        w = base ** k / factorial(k)
        c1 = w * pochhammer(HALF, k) ** 2
        c2 = w * sgn * Fraction(2, 2 * k - 1) * pochhammer(HALF, k + 1) * pochhammer(HALF, k)
        d = _sqrt_derivative_coefficient(level - k + 1)
        e = HALF - (level - k + 1)
        terms[e] = (pref * (c1 * d), pref * (c2 * d))
    return PuiseuxVector(level, u, terms, HALF - (level - order + 1))


def puiseux_from_closed_form(i: int, order: int) -> PuiseuxVector:
    """Direct expansion of (1, λ/2)(λ−2)^{-1/2}(λ+2)^{-1/2} at λ = u^i (level 0)."""
    u = 2 if i == 1 else -2
    other = u - (-u)  # (λ − (−u)) = other + x with x = λ − u
    # (other + x)^{-1/2} = other^{-1/2} Σ binom(−1/2, n) (x/other)^n; other^{-1/2} on the chosen branch
    if i == 1:
        root_inv = ExactScalar(Fraction(1, 2))  # 4^{-1/2}
    else:
        root_inv = ExactScalar.i() * Fraction(1, 2)  # (−4)^{-1/2} with √(λ−2) = −2i near −2
    series = []
    coeff = Fraction(1)
    for n in range(order + 1):
        series.append(coeff / Fraction(other) ** n)
        coeff = coeff * (-HALF - n) / (n + 1)
    terms: dict[Fraction, Vec] = {}
    for n in range(order + 1):
        e = n - HALF
        c1 = series[n]
        c2 = Fraction(u, 2) * series[n] + (Fraction(1, 2) * series[n - 1] if n else 0)
        terms[e] = (root_inv * c1, root_inv * c2)
    return PuiseuxVector(0, u, terms, order - HALF)


def puiseux_ode_residual(P: PuiseuxVector) -> dict[Fraction, Vec]:
    """(𝒰 − λ)∂I − (μ + l + 1/2)I with λ = u + x, for exponents below the exact order."""
    U, mu = SPECIAL_POINT.euler_matrix, SPECIAL_POINT.mu
    dP = P.derivative()
    res: dict[Fraction, list[ExactScalar]] = {}

    def add(e: Fraction, a: int, c: ExactScalar) -> None:
        res.setdefault(e, [ExactScalar(0), ExactScalar(0)])[a] += c

    for e, v in dP.terms.items():
        for a in range(2):
            for b in range(2):
                m = U[a, b] - (P.point if a == b else 0)
                if m:
                    add(e, a, v[b] * m)
            add(e + 1, a, -v[a])
    for e, v in P.terms.items():
        for a in range(2):
            add(e, a, -v[a] * (P.level + HALF))
            for b in range(2):
                if mu[a, b]:
                    add(e, a, -v[b] * mu[a, b])
    limit = P.order - 1
    return {e: (v[0], v[1]) for e, v in res.items() if e <= limit and (v[0] or v[1])}


def gamma_half(l: int) -> Fraction:
    """Γ(l + 1/2)/√π."""
    out = Fraction(1)
    if l >= 0:
        for j in range(l):
            out *= HALF + j
    else:
        for j in range(1, -l + 1):
            out /= HALF - j
    return out


def normalization(l: int) -> ExactScalar:
    """(−1)^l Γ(l + 1/2)/√(2π), written as a multiple of √2."""
    return ExactScalar.sqrt2() * ((1 if l % 2 == 0 else -1) * gamma_half(l) / 2)


def normalized_leading_vector(i: int, level: int) -> Vec:
    """Leading coefficient of the u^i expansion divided by the normalization constant."""
    e, v = period_near_ui(i, level, 0).leading()
    n = normalization(level).inverse()
    return v[0] * n, v[1] * n


# ---------------------------------------------------------------------------
# monodromy and W-functions

G_MATRIX = Matrix([[Fraction(-1, 2), Fraction(-1, 2)], [Fraction(-1, 2), Fraction(-1, 2)]])


def bilinear(a: Sequence, b: Sequence) -> ExactScalar:
    return sum((as_scalar(G_MATRIX[i, j]) * a[i] * b[j] for i in range(2) for j in range(2)), ExactScalar(0))


def reflection(v: Sequence, w: Sequence) -> Vec:
    """v − 2<v, w>/<w, w> w."""
    ww = bilinear(w, w)
    if not ww:
        raise PeriodError("reflection along an isotropic vector")
    c = bilinear(v, w) * 2 / ww
    return as_scalar(v[0]) - c * w[0], as_scalar(v[1]) - c * w[1]


_GEN = {1: ((1, 0)), 2: ((0, 1))}


@dataclass(frozen=True)
class MonodromyElement:
    """Word in γ_1, γ_2, read right to left (the last letter acts first)."""

    word: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(x not in (1, 2) for x in self.word):
            raise PeriodError("generators are 1 and 2")

    @classmethod
    def parse(cls, text: str) -> MonodromyElement:
        digits = [c for c in text if c in "12"]
        return cls(tuple(int(c) for c in digits))

    def matrix(self) -> Matrix:
        m = Matrix.identity(2)
        for g in self.word:
            m = m * generator_matrix(g)
        return m

    def __mul__(self, other: MonodromyElement) -> MonodromyElement:
        return MonodromyElement(self.word + other.word)


def generator_matrix(i: int) -> Matrix:
    """Matrix of γ_i on C² (columns are images of e_1, e_2), built from reflections."""
    w = _GEN[i]
    cols = [reflection((1, 0), w), reflection((0, 1), w)]
    return Matrix([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])


def monodromy_apply(g: MonodromyElement, a: Sequence) -> Vec:
    m = g.matrix()
    return (m[0, 0] * a[0] + m[0, 1] * a[1], m[1, 0] * a[0] + m[1, 1] * a[1])


@dataclass(frozen=True)
class RationalFunction:
    """numerator(λ)/denominator(λ), coefficient lists in increasing degree."""

    numerator: tuple[ExactScalar, ...]
    denominator: tuple[ExactScalar, ...]

    def is_zero(self) -> bool:
        return not any(self.numerator)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return _poly_mul(self.numerator, other.denominator) == _poly_mul(other.numerator, self.denominator)

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        return f"({_poly_str(self.numerator)})/({_poly_str(self.denominator)})"

    def expand_at_infinity(self, order: int) -> LambdaObject:
        """Laurent expansion in λ^{-1} down to λ^{-order} (long division)."""
        den = list(self.denominator)
        d = len(den) - 1
        lead = den[d].inverse()
        rem = {k: c for k, c in enumerate(self.numerator) if c}
        out: dict[tuple[int, int], ExactScalar] = {}
        m = max(rem, default=-order - d - 1) - d
        while m >= -order and rem:
            c = rem.pop(m + d, ExactScalar(0)) * lead
            if c:
                out[(m, 0)] = c
                for k in range(d):
                    if den[k]:
                        rem[m + k] = rem.get(m + k, ExactScalar(0)) - c * den[k]
            m -= 1
        return LambdaObject(out, (-order, 64))


def _poly_mul(a: Sequence[ExactScalar], b: Sequence[ExactScalar]) -> tuple[ExactScalar, ...]:
    out = [ExactScalar(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    while out and not out[-1]:
        out.pop()
    return tuple(out)


def _poly_str(p: Sequence[ExactScalar]) -> str:
    parts = [f"({c})*lam^{k}" for k, c in enumerate(p) if c]
    return " + ".join(parts) or "0"


def _period_numerator_pair(a: Sequence, b: Sequence, form: list[list[tuple[ExactScalar, ...]]]) -> RationalFunction:
    """Σ v_i(λ) form_ij(λ) v_j(λ) (a_1+a_2)(b_1+b_2)/(λ² − 4) with v = (1, λ/2).

    I^{(0)}_a = (a_1 + a_2) v(λ) (λ² − 4)^{-1/2}, so the square roots cancel.
    """
    v = [(ExactScalar(1),), (ExactScalar(0), ExactScalar(HALF))]
    num: tuple[ExactScalar, ...] = ()
    for i in range(2):
        for j in range(2):
            num = _poly_add(num, _poly_mul(_poly_mul(v[i], form[i][j]), v[j]))
    scale = (as_scalar(a[0]) + a[1]) * (as_scalar(b[0]) + b[1])
    num = tuple(c * scale for c in num)
    while num and not num[-1]:
        num = num[:-1]
    return RationalFunction(num, (ExactScalar(-4), ExactScalar(0), ExactScalar(1)))


def w_function(a: Sequence, b: Sequence) -> RationalFunction:
    """W_{a,b}(λ) = (I^{(0)}_a, I^{(0)}_b) in the flat metric, at the special point."""
    eta = SPECIAL_POINT.eta
    form = [[(eta[i, j],) for j in range(2)] for i in range(2)]
    return _period_numerator_pair(a, b, form)


def pencil_pairing(a: Sequence, b: Sequence) -> RationalFunction:
    """(η I^{(0)}_a, η I^{(0)}_b)_λ for the pencil g − λη; λ-independent and equal to <a, b>."""
    from .frobenius import intersection_form

    g = intersection_form(SPECIAL_POINT)
    eta = SPECIAL_POINT.eta
    # η (g − λη) η as a matrix of polynomials in λ
    form = []
    for i in range(2):
        row = []
        for j in range(2):
            c0 = sum((eta[i, k] * g[k, m] * eta[m, j] for k in range(2) for m in range(2)), ExactScalar(0))
            c1 = -sum((eta[i, k] * eta[k, m] * eta[m, j] for k in range(2) for m in range(2)), ExactScalar(0))
            row.append((c0, c1))
        form.append(row)
    return _period_numerator_pair(a, b, form)


def _poly_add(a: Sequence[ExactScalar], b: Sequence[ExactScalar]) -> tuple[ExactScalar, ...]:
    n = max(len(a), len(b))
    return tuple((a[k] if k < len(a) else ExactScalar(0)) + (b[k] if k < len(b) else ExactScalar(0)) for k in range(n))
