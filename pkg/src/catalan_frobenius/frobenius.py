"""The rank-two Frobenius manifold with potential F = (t1)^2 t2/2 + (t2)^2 log(t2)/2.

Metric η = [[0,1],[1,0]], unit e = ∂_1, Euler field E = t1 ∂_1 + 2 t2 ∂_2.
Only points where (t2)^{1/4} lies in Q[√2] are representable exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .linalg import ETA, Matrix
from .scalars import ExactScalar, Rational, as_scalar


class FrobeniusError(ValueError):
    pass


def _rational_root(x: Fraction, n: int) -> Fraction | None:
    if x < 0:
        return None
    num = _int_root(x.numerator, n)
    den = _int_root(x.denominator, n)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _int_root(m: int, n: int) -> int | None:
    r = round(m ** (1.0 / n)) if m else 0
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** n == m:
            return c
    return None


def quarter_root(t2: Fraction) -> ExactScalar:
    """(t2)^{1/4} in Q[√2] for t2 = s^4 or 4 s^4 with s > 0 rational."""
    s = _rational_root(t2, 4)
    if s is not None:
        return ExactScalar(s)
    s = _rational_root(t2 / 4, 4)
    if s is not None:
        return ExactScalar.sqrt2() * s
    raise FrobeniusError(f"no exact fourth root of t2 = {t2} in Q[sqrt2]")


@dataclass(frozen=True)
class FrameMatrices:
    psi: Matrix
    psi_inv: Matrix
    mu: Matrix
    U: Matrix
    V: Matrix
    delta_roots: tuple[ExactScalar, ExactScalar]


@dataclass(frozen=True)
class FrobeniusPoint:
    t1: ExactScalar
    t2: ExactScalar
    quarter_root_t2: ExactScalar = field(repr=False)

    @property
    def sqrt_t2(self) -> ExactScalar:
        return self.quarter_root_t2 * self.quarter_root_t2

    @property
    def u1(self) -> ExactScalar:
        return self.t1 + 2 * self.sqrt_t2

    @property
    def u2(self) -> ExactScalar:
        return self.t1 - 2 * self.sqrt_t2

    @property
    def canonical(self) -> tuple[ExactScalar, ExactScalar]:
        return self.u1, self.u2

    @property
    def eta(self) -> Matrix:
        return ETA

    @property
    def euler_matrix(self) -> Matrix:
        """The matrix of E• in the flat basis (columns are images of ∂_1, ∂_2)."""
        return Matrix([[self.t1, 2], [2 * self.t2, self.t1]])

    @property
    def mu(self) -> Matrix:
        return Matrix.diag([Fraction(1, 2), Fraction(-1, 2)])

    @cached_property
    def frame(self) -> FrameMatrices:
        q = self.quarter_root_t2
        qi = q.inverse()
        s = ExactScalar.sqrt2().inverse()
        i = ExactScalar.i()
        psi = Matrix([[q * s, qi * s], [-i * q * s, i * qi * s]])
        psi_inv = ETA * psi.T()
        V = Matrix([[0, i * Fraction(1, 2)], [-i * Fraction(1, 2), 0]])
        U = Matrix.diag([self.u1, self.u2])
        r2 = ExactScalar.sqrt2()
        return FrameMatrices(psi, psi_inv, self.mu, U, V, (r2 * qi, i * r2 * qi))

    def __str__(self) -> str:
        return f"({self.t1}, {self.t2})"


def make_point(t1: Rational | ExactScalar, t2: Rational | ExactScalar) -> FrobeniusPoint:
    """Build a semisimple point of the chart with t2 > 0."""
    t1s, t2s = as_scalar(t1), as_scalar(t2)
    if not (t1s.is_rational() and t2s.is_rational()):
        raise FrobeniusError("points must have rational coordinates")
    t2f = t2s.to_fraction()
    if t2f == 0:
        raise FrobeniusError("t2 must be nonzero")
    if 4 * t2f == t1s.to_fraction() ** 2:
        raise FrobeniusError("semisimplicity lost: point lies on the discriminant 4 t2 = (t1)^2")
    return FrobeniusPoint(t1s, t2s, quarter_root(t2f))


SPECIAL_POINT = make_point(0, 1)


def product_constants(p: FrobeniusPoint) -> list[list[list[ExactScalar]]]:
    """c[α][β][γ] = c_{αβ}^γ (0-based indices)."""
    z, one = ExactScalar(0), ExactScalar(1)
    c = [[[z, z], [z, z]], [[z, z], [z, z]]]
    c[0][0][0] = one
    c[0][1][1] = one
    c[1][0][1] = one
    c[1][1][0] = p.t2.inverse()
    return c


def third_derivatives(p: FrobeniusPoint) -> list[list[list[ExactScalar]]]:
    """F_{αβγ} = η_{γδ} c_{αβ}^δ."""
    c = product_constants(p)
    return [[[sum((ETA[g, d] * c[a][b][d] for d in range(2)), ExactScalar(0)) for g in range(2)]
             for b in range(2)] for a in range(2)]


def multiply(p: FrobeniusPoint, x: tuple[ExactScalar, ...], y: tuple[ExactScalar, ...]) -> tuple[ExactScalar, ExactScalar]:
    """Product of two tangent vectors given by flat components."""
    c = product_constants(p)
    out = [ExactScalar(0), ExactScalar(0)]
    for a in range(2):
        for b in range(2):
            if x[a] and y[b]:
                for g in range(2):
                    out[g] = out[g] + x[a] * y[b] * c[a][b][g]
    return out[0], out[1]


def pairing(x: tuple[ExactScalar, ...], y: tuple[ExactScalar, ...]) -> ExactScalar:
    return x[0] * y[1] + x[1] * y[0]


def intersection_form(p: FrobeniusPoint) -> Matrix:
    """g^{αβ} = E^ε c_ε^{αβ} with the upper indices raised by η."""
    c = product_constants(p)
    E = (p.t1, 2 * p.t2)
    rows = []
    for a in range(2):
        row = []
        for b in range(2):
            acc = ExactScalar(0)
            for e in range(2):
                for m in range(2):
                    acc = acc + E[e] * ETA[a, m] * c[e][m][b]
            row.append(acc)
        rows.append(row)
    return Matrix(rows)


def intersection_form_formula(p: FrobeniusPoint) -> Matrix:
    return Matrix([[2, p.t1], [p.t1, 2 * p.t2]])


def idempotents(p: FrobeniusPoint) -> tuple[tuple[ExactScalar, ExactScalar], tuple[ExactScalar, ExactScalar]]:
    """Flat components of ∂/∂u^1 and ∂/∂u^2."""
    half = ExactScalar(Fraction(1, 2))
    a = p.sqrt_t2 * half
    return (half, a), (half, -a)


def euler_vector(p: FrobeniusPoint) -> tuple[ExactScalar, ExactScalar]:
    return p.t1, 2 * p.t2


def format_point_report(p: FrobeniusPoint) -> dict:
    fr = p.frame
    c = product_constants(p)
    return {
        "point": [str(p.t1), str(p.t2)],
        "canonical": [str(p.u1), str(p.u2)],
        "eta": ETA.to_strings(),
        "product_constants": [[[str(x) for x in row] for row in plane] for plane in c],
        "intersection_form": intersection_form(p).to_strings(),
        "U_flat": p.euler_matrix.to_strings(),
        "mu": fr.mu.to_strings(),
        "Psi": fr.psi.to_strings(),
        "Psi_inv": fr.psi_inv.to_strings(),
        "V": fr.V.to_strings(),
        "U_canonical": fr.U.to_strings(),
        "delta_roots": [str(x) for x in fr.delta_roots],
    }
