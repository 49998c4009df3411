"""Residue check of the explicit Hirota quadratic equations for log 𝒟.

Both arguments of every product 𝒟(·)𝒟(·) are written around the midpoint
x̃ of q and q̄ (in t̂-coordinates), with q = x + y and q̄ = x − y:

    first term:  𝒟(x̃ + w) 𝒟(x̃ − w),   w = ŷ − σ
    second term: 𝒟(x̃ + w') 𝒟(x̃ − w'), w' = ŷ + σ

where σ collects the ε-shifts (εℓ!/λ^{ℓ+1} in the t^1_ℓ slots, ε/2 in t^2_0)
and the λ-sums Σ λ^ℓ q^2_ℓ/ℓ! are split between x̃ and ŷ.  The constraint
q^2_0 − q̄^2_0 = kε becomes y^2_0 = kε/2.

The integrand is divided by 𝒟(x̃)², which turns each product into
exp Σ_g ε^{2g−2}(F_g(x̃+w) + F_g(x̃−w) − 2F_g(x̃)).  The divisor differs from
a λ-independent factor by an element of 1 + λ·C[λ] (x̃ depends on λ only
through positive powers), so "all coefficients of λ^p, p ≤ 0, vanish" is
unaffected; that is the statement checked here for every n at once.

Gradings (all operands have nonnegative grade, so truncation is an ideal):
  weight  = ε-power + time degree ≤ K = eps_max + degree_max
  degree  = time degree ≤ degree_max
  nu      = (index_max + 1)·degree − λ-power ≤ N
The genus-g piece has weight ≥ 2g, so genus ≤ K/2 and χ ≤ K suffice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Any, Mapping

from .givental import DescendentPotential, Slot
from .scalars import ExactScalar, Rational, harmonic
from .series import (Grading, LambdaObject, SeriesRing, TruncatedSeries,
                     format_coefficient, lambda_object_from_series, series_exp)


class HirotaError(ValueError):
    pass


@dataclass(frozen=True)
class HqeInstance:
    """One family of equations: fixed k, all n ≤ n_max, caps on the q-variables."""

    k: int
    n_max: int = 2
    degree_max: int = 3
    index_max: int = 1
    eps_max: int = 2
    psi: Rational | None = None  # None → symbolic ψ

    @property
    def weight_cap(self) -> int:
        return self.eps_max + self.degree_max

    @property
    def nu_cap(self) -> int:
        return (self.index_max + 1) * self.degree_max + self.n_max + 1 + abs(self.k)

    @property
    def genus_max(self) -> int:
        return self.weight_cap // 2

    @property
    def chi_max(self) -> int:
        return self.weight_cap

    @property
    def lambda_window(self) -> tuple[int, int]:
        """Lowest and highest λ-powers that can occur."""
        return (-self.nu_cap - abs(self.k), (self.index_max + 1) * self.degree_max + abs(self.k))


def x_name(alpha: int, a: int) -> str:
    return f"x{alpha}_{a}"


def y_name(alpha: int, a: int) -> str:
    return f"y{alpha}_{a}"


def hqe_ring(inst: HqeInstance, weight_cap: int | None = None) -> SeriesRing:
    I = inst.index_max
    xs = [x_name(al, a) for al in (1, 2) for a in range(I + 1)]
    ys = [y_name(1, a) for a in range(I + 1)] + [y_name(2, a) for a in range(1, I + 1)]
    times = xs + ys
    names = ["eps", "lam", "psi"] + times
    grads = [
        Grading("weight", {"eps": 1, **{v: 1 for v in times}}, inst.weight_cap if weight_cap is None else weight_cap),
        Grading("degree", {v: 1 for v in times}, inst.degree_max),
        Grading("nu", {"lam": -1, **{v: I + 1 for v in times}}, inst.nu_cap),
    ]
    return SeriesRing(names, grads)


@dataclass
class HqeIntegrand:
    """λ^k e^{a_+} X_+ − λ^{-k} e^{a_−} X_−, with the scalar exponents a_± kept symbolic."""

    ring: SeriesRing
    plus: TruncatedSeries
    minus: TruncatedSeries
    plus_exponent: ExactScalar
    minus_exponent: ExactScalar

    def difference(self) -> TruncatedSeries:
        if self.plus_exponent != self.minus_exponent:
            raise HirotaError("the two terms carry different constant factors; the difference is not a series")
        return self.plus - self.minus

    def to_lambda_object(self) -> LambdaObject:
        return lambda_object_from_series(self.difference(), "lam")


class HqeBuilder:
    """Assembles the normalized integrand of one instance."""

    def __init__(self, inst: HqeInstance, potential: DescendentPotential | None) -> None:
        self.inst = inst
        self.D = potential
        self.ring = hqe_ring(inst)
        self.sigma_len = inst.nu_cap  # σ in slot (1, ℓ) has nu = ℓ + 1
        self._rings: dict[int, SeriesRing] = {}

    def genus_ring(self, g: int) -> SeriesRing:
        if g not in self._rings:
            self._rings[g] = hqe_ring(self.inst, self.inst.weight_cap + 2 - 2 * g)
        return self._rings[g]

    # slot values -------------------------------------------------------------
    def midpoint(self, ring: SeriesRing) -> dict[Slot, TruncatedSeries]:
        I = self.inst.index_max
        out: dict[Slot, TruncatedSeries] = {}
        for a in range(I + 1):
            out[(1, a)] = ring.var(x_name(1, a))
        x20 = ring.var(x_name(2, 0))
        for l in range(1, I + 1):
            out[(2, l)] = ring.var(x_name(2, l))
            x20 = x20 - ring.monomial({x_name(2, l): 1, "lam": l}, Fraction(1, factorial(l)))
        out[(2, 0)] = x20
        return out

    def half_difference(self, ring: SeriesRing) -> dict[Slot, TruncatedSeries]:
        """ŷ: the y-part including y^2_0 = kε/2 and its λ-sum."""
        I = self.inst.index_max
        out: dict[Slot, TruncatedSeries] = {}
        for a in range(I + 1):
            out[(1, a)] = ring.var(y_name(1, a))
        y20 = ring.monomial({"eps": 1}, Fraction(self.inst.k, 2))
        for l in range(1, I + 1):
            out[(2, l)] = ring.var(y_name(2, l))
            y20 = y20 - ring.monomial({y_name(2, l): 1, "lam": l}, Fraction(1, factorial(l)))
        out[(2, 0)] = y20
        return out

    def shift(self, ring: SeriesRing) -> dict[Slot, TruncatedSeries]:
        """σ: εℓ!/λ^{ℓ+1} in t^1_ℓ and ε/2 in t^2_0."""
        out: dict[Slot, TruncatedSeries] = {}
        for l in range(self.sigma_len):
            v = ring.monomial({"eps": 1, "lam": -(l + 1)}, factorial(l))
            if v:
                out[(1, l)] = v
        out[(2, 0)] = ring.monomial({"eps": 1}, Fraction(1, 2))
        return out

    @staticmethod
    def _combine(a: Mapping[Slot, TruncatedSeries], b: Mapping[Slot, TruncatedSeries], sign: int) -> dict[Slot, TruncatedSeries]:
        out = dict(a)
        for s, v in b.items():
            w = v if sign > 0 else -v
            out[s] = out[s] + w if s in out else w
        return {s: v for s, v in out.items() if v}

    # potential pieces ----------------------------------------------------------
    def _Q(self, g: int, t: Mapping[Slot, TruncatedSeries], ring: SeriesRing) -> TruncatedSeries:
        """Genus-g part of log 𝒟 without its linear part (which cancels in second differences)."""
        D = self.D
        assert D is not None
        T = D.transform_components(t, ring)
        out = D.ancestor_at(T, g, ring)
        if g == 0:
            out = out + D.unstable_part(t, ring, include_linear=False)
        return out + D.perturbation_at(t, g, ring)

    def second_difference(self, w_sign: int) -> TruncatedSeries:
        """Σ_g ε^{2g−2}(F_g(x̃+w) + F_g(x̃−w) − 2F_g(x̃)) for w = ŷ ∓ σ."""
        total = self.ring.zero()
        if self.D is None:
            return total
        if self.D.genus_max < self.inst.genus_max or self.D.chi_max < self.inst.chi_max:
            raise HirotaError(f"descendent potential caps too small: need genus ≤ {self.inst.genus_max}, "
                              f"χ ≤ {self.inst.chi_max}")
        for g in range(self.inst.genus_max + 1):
            R = self.genus_ring(g)
            xt = self.midpoint(R)
            w = self._combine(self.half_difference(R), self.shift(R), -w_sign)
            plus = self._combine(xt, w, +1)
            minus = self._combine(xt, w, -1)
            piece = self._Q(g, plus, R) + self._Q(g, minus, R) - self._Q(g, xt, R).scale(2)
            total = total + _lift_genus(piece, self.ring, 2 * g - 2)
        return total

    def prefactor_exponent(self, sign: int) -> TruncatedSeries:
        """±((1/ε) Σ λ^{ℓ+1}/(ℓ+1)! y^1_ℓ − (2/ε) Σ_{ℓ≥1} λ^ℓ 𝔥(ℓ)/ℓ! y^2_ℓ)."""
        ring = self.ring
        out = ring.zero()
        for l in range(self.inst.index_max + 1):
            out = out + ring.monomial({"eps": -1, "lam": l + 1, y_name(1, l): 1}, Fraction(1, factorial(l + 1)))
        for l in range(1, self.inst.index_max + 1):
            out = out - ring.monomial({"eps": -1, "lam": l, y_name(2, l): 1}, 2 * harmonic(l) / factorial(l))
        return out if sign > 0 else -out

    def integrand(self) -> HqeIntegrand:
        inst = self.inst
        psi = ExactScalar.psi() if inst.psi is None else ExactScalar(inst.psi)
        psi_half = psi * Fraction(inst.k, 2)
        parts = []
        for sign in (+1, -1):
            phi = self.prefactor_exponent(sign) + self.second_difference(sign)
            const = _psi_constant(phi)
            phi = phi - const
            expo = _psi_constant_scalar(const) + (psi_half if sign > 0 else -psi_half)
            body = series_exp(phi).mul_monomial({"lam": sign * inst.k})
            parts.append((body, expo))
        (plus, a_plus), (minus, a_minus) = parts
        return HqeIntegrand(self.ring, plus, minus, a_plus, a_minus)


def _lift_genus(piece: TruncatedSeries, ring: SeriesRing, eps_shift: int) -> TruncatedSeries:
    """Move a genus piece into the main ring, multiplying by ε^{eps_shift}."""
    out: dict[int, Any] = {}
    unit = ring.var_unit("eps", eps_shift)
    if piece.ring.variables != ring.variables:
        raise HirotaError("genus rings must share the variable list")
    for k, c in piece.terms.items():
        nk = k + unit
        if nk in out:
            raise HirotaError("key collision while lifting")
        if ring.admissible(nk):
            out[nk] = c
    return TruncatedSeries(ring, out)


def _psi_constant(phi: TruncatedSeries) -> TruncatedSeries:
    """Part of the exponent with no ε, λ or time dependence (may involve ψ)."""
    ring = phi.ring
    keep = {}
    psi_j = ring.index["psi"]
    for k, c in phi.terms.items():
        vec = ring.decode(k)
        if all(e == 0 for j, e in enumerate(vec) if j != psi_j):
            keep[k] = c
    return TruncatedSeries(ring, keep)


def _psi_constant_scalar(const: TruncatedSeries) -> ExactScalar:
    ring = const.ring
    out = ExactScalar(0)
    for k, c in const.terms.items():
        out = out + ExactScalar.psi() ** ring.exponent(k, "psi") * c
    return out


@dataclass
class HqeReport:
    k: int
    n_max: int
    checked: int = 0
    nonzero: list[dict] = field(default_factory=list)
    max_monomial: dict | None = None
    per_n: dict[int, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.nonzero

    def to_json_obj(self) -> dict:
        return {"k": self.k, "n_max": self.n_max, "ok": self.ok, "checked": self.checked,
                "per_n_checked": {str(n): c for n, c in sorted(self.per_n.items())},
                "max_monomial": self.max_monomial, "nonzero": self.nonzero[:20]}


def hqe_integrand(inst: HqeInstance, potential: DescendentPotential | None = None) -> HqeIntegrand:
    """Normalized integrand; ``potential=None`` stands for 𝒟 ≡ 1 (prefactors only)."""
    return HqeBuilder(inst, potential).integrand()


def verify_hqe(inst: HqeInstance, potential: DescendentPotential, strict: bool = False) -> HqeReport:
    """All coefficients of λ^p, p ≤ 0, of the normalized integrand vanish within the exact range."""
    H = hqe_integrand(inst, potential)
    diff = H.difference()
    ring = diff.ring
    report = HqeReport(inst.k, inst.n_max)
    I = inst.index_max
    best = None
    for key, c in diff.terms.items():
        vec = dict(zip(ring.variables, ring.decode(key)))
        p = vec["lam"]
        if p > 0:
            continue
        d = sum(e for v, e in vec.items() if v[0] in "xy")
        # both terms of the difference are exact for this monomial
        if (I + 1) * d - p + abs(inst.k) > inst.nu_cap:
            continue
        report.nonzero.append({"monomial": {v: e for v, e in vec.items() if e}, "value": format_coefficient(c)})
    # count the monomials inside the checked range (zero ones included)
    for d in range(inst.degree_max + 1):
        lowest = (I + 1) * d + abs(inst.k) - inst.nu_cap
        for p in range(0, lowest - 1, -1):
            n = -p
            report.per_n[n] = report.per_n.get(n, 0) + 1
            report.checked += 1
            best = {"lambda_power": p, "time_degree": d, "eps_max": inst.weight_cap - d}
    report.max_monomial = best
    if strict and not report.ok:
        raise HirotaError(f"nonzero HQE residue: {report.nonzero[0]}")
    return report


def residues_by_n(H: HqeIntegrand, n_max: int) -> dict[int, TruncatedSeries]:
    """res_{λ=∞} λ^{n−1} dλ (normalized integrand) = −[λ^{−n}] for n = 0..n_max."""
    diff = H.difference()
    pieces = diff.split_by("lam")
    return {n: -pieces.get(-n, diff.ring.zero()) for n in range(n_max + 1)}
