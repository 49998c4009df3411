"""Lax operators built from the descendent potential, and checks of their flows.

Everything lives in one series ring with variables

    eps, lam, psi, E, X = t̂^1_0, x = t̂^2_0, a1 = t^1_1, b1 = t^2_1

where E stands for e^{ψ/2}.  Identities polynomial in ψ and e^{ψ} that hold for
every ψ hold formally, so E is an independent Laurent variable.

Gradings:
  weight = ε-power + time degree ≤ K
  lamg   = −λ-power ≤ M           (depth of the Λ- or D-expansions)
  degree = time degree ≤ K + M    (never binding; guards exponentials)

log 𝒟 is evaluated without its genus-0 linear part and without genus-g linear
terms beyond the weight cap.  Multiplying 𝒟 by e^{ℓ(q)} with ℓ linear changes
the dressing operators by constant-coefficient factors and Q by a constant, so
L, 𝓛, log L, u, v, φ, ρ and ratios of shifted Q are unaffected.  This keeps
every exponentiated series nilpotent except the factor e^{ε^{-1}(ψx + …)} of
Q, which is never formed: Q enters through log Q and through conjugations
Q A Q^{-1}, whose coefficients involve only Q(x)/Q(x + kε).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial, inf
from typing import Any, Mapping

from .givental import DescendentPotential, Slot
from .operators import (DifferenceOperator, PseudoDiffOperator, _Operator, inverse_difference_derivative,
                        shift)
from .scalars import Rational, harmonic
from .series import Grading, SeriesRing, TruncatedSeries, format_coefficient, series_exp


class LaxError(ValueError):
    pass


TIME_SLOTS: dict[str, Slot] = {"X": (1, 0), "x": (2, 0), "a1": (1, 1), "b1": (2, 1)}
FLOW_VARIABLES: dict[tuple[int, int], str] = {slot: name for name, slot in TIME_SLOTS.items()}


@lru_cache(maxsize=8)
def cached_potential(genus_max: int, chi_max: int, psi: Rational | None) -> DescendentPotential:
    return DescendentPotential(genus_max, chi_max, psi)


def lax_ring(weight_cap: int, depth: int) -> SeriesRing:
    times = list(TIME_SLOTS)
    return SeriesRing(["eps", "lam", "psi", "E", *times], [
        Grading("weight", {"eps": 1, **{t: 1 for t in times}}, weight_cap),
        Grading("lamg", {"lam": -1}, depth),
        Grading("degree", {t: 1 for t in times}, weight_cap + depth),
    ])


@dataclass(frozen=True)
class LaxCaps:
    """K = weight cap (ε-power plus time degree), M = depth in Λ^{±1} or D^{-1}."""

    weight_cap: int = 3
    depth: int = 4
    psi: Rational | None = None

    @classmethod
    def from_windows(cls, degree_max: int, eps_max: int, depth: int, psi: Rational | None = None) -> LaxCaps:
        return cls(degree_max + eps_max, depth, psi)

    @property
    def genus_max(self) -> int:
        return self.weight_cap // 2

    @property
    def chi_max(self) -> int:
        return self.weight_cap


class TauFrame:
    """log 𝒟 at shifted arguments, and the Toda and NLS objects derived from it."""

    def __init__(self, caps: LaxCaps, potential: DescendentPotential | None = None) -> None:
        self.caps = caps
        self.ring = lax_ring(caps.weight_cap, caps.depth)
        self.D = potential or cached_potential(caps.genus_max, caps.chi_max, caps.psi)
        if self.D.genus_max < caps.genus_max or self.D.chi_max < caps.chi_max:
            raise LaxError("descendent potential caps too small for the requested weight cap")
        if self.D.psi != caps.psi:
            raise LaxError("potential and caps disagree on ψ")

    # ring helpers ----------------------------------------------------------------
    def psi(self) -> TruncatedSeries:
        if self.caps.psi is None:
            return self.ring.var("psi")
        return self.ring.const(Fraction(self.caps.psi))

    def E(self, power: int) -> TruncatedSeries:
        """e^{power·ψ/2}."""
        return self.ring.monomial({"E": power})

    def exp_with_psi_constant(self, f: TruncatedSeries, multiple: Fraction | int) -> TruncatedSeries:
        """exp(f) where f has constant part multiple·ψ; returns E^{2·multiple}·exp(f − multiple·ψ)."""
        multiple = Fraction(multiple)
        if multiple.denominator > 2:
            raise LaxError("constant is not a half-integer multiple of ψ")
        rest = f - self.psi().scale(multiple)
        if self._constant_part(rest):
            raise LaxError(f"unexpected constant in exponent: {self._constant_part(rest)}")
        return series_exp(rest).mul_monomial({"E": int(2 * multiple)})

    def _constant_part(self, f: TruncatedSeries) -> TruncatedSeries:
        ring = f.ring
        j = ring.index["psi"]
        return TruncatedSeries(ring, {k: c for k, c in f.terms.items()
                                      if all(e == 0 for i, e in enumerate(ring.decode(k)) if i != j)})

    def shift_x(self, f: TruncatedSeries, s: Fraction | int) -> TruncatedSeries:
        return shift(f, "x", s)

    # log 𝒟 ------------------------------------------------------------------------
    def _genus_ring(self, g: int) -> SeriesRing:
        return lax_ring(self.caps.weight_cap + 2 - 2 * g, self.caps.depth)

    def _slots(self, ring: SeriesRing, sign: int) -> dict[Slot, TruncatedSeries]:
        """Time variables, with t^1_ℓ shifted by sign·εℓ!/λ^{ℓ+1}."""
        out: dict[Slot, TruncatedSeries] = {slot: ring.var(name) for name, slot in TIME_SLOTS.items()}
        if sign:
            for l in range(self.caps.depth):
                v = ring.monomial({"eps": 1, "lam": -(l + 1)}, sign * factorial(l))
                if v:
                    out[(1, l)] = out[(1, l)] + v if (1, l) in out else v
        return out

    def log_tau(self, sign: int = 0) -> TruncatedSeries:
        """Σ_g ε^{2g−2} F_g at q^1 ↦ q^1 + sign·ε[λ^{-1}] (linear genus-0 part omitted)."""
        return self._log_tau(sign)

    @lru_cache(maxsize=None)
    def _log_tau(self, sign: int) -> TruncatedSeries:
        D = self.D
        out: dict[int, Any] = {}
        for g in range(self.caps.genus_max + 1):
            R = self._genus_ring(g)
            t = self._slots(R, sign)
            T = D.transform_components(t, R)
            piece = D.ancestor_at(T, g, R)
            if g == 0:
                piece = piece + D.unstable_part(t, R, include_linear=False)
            piece = piece + D.perturbation_at(t, g, R)
            lift = self.ring.var_unit("eps", 2 * g - 2)
            for k, c in piece.terms.items():
                nk = k + lift
                if self.ring.admissible(nk):
                    out[nk] = out[nk] + c if nk in out else c
        return TruncatedSeries(self.ring, {k: c for k, c in out.items() if c})

    @cached_property
    def F(self) -> TruncatedSeries:
        return self.log_tau(0)

    def F_at(self, s: Fraction | int, sign: int = 0) -> TruncatedSeries:
        """log 𝒟'(x + sε) with q^1 shifted by sign·ε[λ^{-1}]."""
        return self.shift_x(self.log_tau(sign), s)

    def _symbol(self, sign: int, s: Fraction | int) -> TruncatedSeries:
        """exp(log 𝒟'(x+sε, q^1 + sign·ε[λ^{-1}]) − log 𝒟'(x+sε))."""
        return self.exp_with_psi_constant(self.F_at(s, sign) - self.F_at(s, 0), 0)

    # Toda --------------------------------------------------------------------------
    @cached_property
    def u(self) -> TruncatedSeries:
        h = Fraction(1, 2)
        return self.F_at(h) + self.F_at(-3 * h) - self.F_at(-h).scale(2) - self.psi()

    @cached_property
    def v(self) -> TruncatedSeries:
        h = Fraction(1, 2)
        return (self.F_at(h) - self.F_at(-h)).derivative("X").mul_monomial({"eps": 1})

    @cached_property
    def exp_u(self) -> TruncatedSeries:
        return self.exp_with_psi_constant(self.u, 0)

    @cached_property
    def log_Q(self) -> TruncatedSeries:
        """log Q with Q = 𝒟'(x + ε/2)/𝒟'(x − ε/2)."""
        h = Fraction(1, 2)
        return self.F_at(h) - self.F_at(-h)

    def Q_ratio(self, k: int) -> TruncatedSeries:
        """Q(x)/Q(x + kε)."""
        return self.exp_with_psi_constant(self.log_Q - self.shift_x(self.log_Q, k), -k)

    def conjugate_by_Q(self, A: DifferenceOperator) -> DifferenceOperator:
        """Q A Q^{-1}."""
        return DifferenceOperator(self.ring, {k: a * self.Q_ratio(k) for k, a in A.terms.items()}, A.low, A.high)

    @cached_property
    def L(self) -> DifferenceOperator:
        r = self.ring
        return DifferenceOperator(r, {1: r.one(), 0: self.v, -1: self.exp_u})

    @cached_property
    def P_plus(self) -> DifferenceOperator:
        """P^+ = Σ p_k Λ^{-k}, σ_l(P^+) = 𝒫^+."""
        sym = self._symbol(-1, Fraction(-1, 2))
        return DifferenceOperator(self.ring, {-k: c for k, c in self._lam_pieces(sym).items()},
                                  low=-self.caps.depth)

    @cached_property
    def P_hat(self) -> DifferenceOperator:
        """Q^{-1} P^-: σ_l is 𝒫^{*+} at λ → λ^{-1}e^{-ψ}."""
        sym = self._symbol(+1, Fraction(1, 2))
        return DifferenceOperator(self.ring, {k: c * self.E(2 * k) for k, c in self._lam_pieces(sym).items()},
                                  high=self.caps.depth)

    def _lam_pieces(self, sym: TruncatedSeries) -> dict[int, TruncatedSeries]:
        """{k: coefficient of λ^{-k}}."""
        return {-e: piece for e, piece in sym.split_by("lam").items()}

    @cached_property
    def log_L_plus(self) -> DifferenceOperator:
        """Σ_{k≥0} w_k Λ^k = (ε/2) P^-_x (P^-)^{-1}."""
        Ph = self.P_hat
        inner = Ph.map_coefficients(lambda f: f.derivative("x")) * Ph.inverse(self.caps.depth)
        out = self.conjugate_by_Q(inner) + DifferenceOperator.scalar(self.log_Q.derivative("x"))
        return out.map_coefficients(lambda f: f.mul_monomial({"eps": 1}, Fraction(1, 2)))

    @cached_property
    def log_L_minus(self) -> DifferenceOperator:
        """Σ_{k≤−1} w_k Λ^k = −(ε/2) P^+_x (P^+)^{-1}."""
        P = self.P_plus
        out = P.map_coefficients(lambda f: f.derivative("x")) * P.inverse(self.caps.depth)
        return out.map_coefficients(lambda f: f.mul_monomial({"eps": 1}, Fraction(-1, 2)))

    @cached_property
    def log_L(self) -> DifferenceOperator:
        return self.log_L_plus + self.log_L_minus

    def toda_generator(self, alpha: int, l: int) -> DifferenceOperator:
        """A^1_ℓ = L^{ℓ+1}/(ℓ+1)!, A^2_ℓ = 2L^ℓ(log L − 𝔥(ℓ))/ℓ!."""
        L = self.L
        if alpha == 1:
            return (L ** (l + 1)).scale(Fraction(1, factorial(l + 1)))
        shifted = self.log_L - DifferenceOperator.scalar(self.ring.const(harmonic(l)))
        return ((L ** l) * shifted).scale(Fraction(2, factorial(l)))

    def toda_flow_residual(self, alpha: int, l: int) -> DifferenceOperator:
        """ε ∂L/∂q^α_ℓ − [(A^α_ℓ)_+, L]."""
        var = self._flow_var(alpha, l)
        lhs = self.L.map_coefficients(lambda f: f.derivative(var).mul_monomial({"eps": 1}))
        A = self.toda_generator(alpha, l).plus()
        return lhs - A.commutator(self.L)

    # NLS ------------------------------------------------------------------------------
    @cached_property
    def phi(self) -> TruncatedSeries:
        """φ = −ε R^{-1} ∂_X R with R = 𝒟''(x − ε)/𝒟''(x)."""
        log_R = self.F_at(-1) - self.F
        return -log_R.derivative("X").mul_monomial({"eps": 1})

    @cached_property
    def rho(self) -> TruncatedSeries:
        """ρ = e^{-ψ} Q R = e^{-ψ} 𝒟''(x + ε)𝒟''(x − ε)/𝒟''(x)²."""
        return self.exp_with_psi_constant(self.F_at(1) + self.F_at(-1) - self.F.scale(2) - self.psi(), 0)

    def _psido(self, sym: TruncatedSeries, sign: int = 1) -> PseudoDiffOperator:
        terms = {-k: c.scale(sign ** k) for k, c in self._lam_pieces(sym).items()}
        return PseudoDiffOperator(self.ring, terms, low=-self.caps.depth)

    @cached_property
    def P_nls(self) -> PseudoDiffOperator:
        """P(D) with symbol 𝒟''(q^1 − ε[λ^{-1}])/𝒟''."""
        return self._psido(self._symbol(-1, 0))

    @cached_property
    def P_tilde_nls(self) -> PseudoDiffOperator:
        """P̃(−D) with P̃ = 𝒟''(q^1 + ε[λ^{-1}])/𝒟''."""
        return self._psido(self._symbol(+1, 0), sign=-1)

    def D_op(self, k: int = 1) -> PseudoDiffOperator:
        return PseudoDiffOperator.generator(self.ring, k)

    @cached_property
    def lax_nls(self) -> PseudoDiffOperator:
        """𝓛 = P D P^{-1}."""
        P = self.P_nls
        return P * self.D_op() * P.inverse(self.caps.depth)

    def S_tilde(self, s: int = 0) -> PseudoDiffOperator:
        """S̃ = D − φ with coefficients at x + sε."""
        return self.D_op() - PseudoDiffOperator.scalar(self.shift_x(self.phi, s))

    def T_tilde(self, s: int = 0) -> PseudoDiffOperator:
        """T̃ = (D − φ)² + φ(D − φ) + ρ with coefficients at x + sε."""
        S = self.S_tilde(s)
        phi = PseudoDiffOperator.scalar(self.shift_x(self.phi, s))
        rho = PseudoDiffOperator.scalar(self.shift_x(self.rho, s))
        return S * S + phi * S + rho

    def _flow_var(self, alpha: int, l: int) -> str:
        var = FLOW_VARIABLES.get((alpha, l))
        if var is None:
            raise LaxError(f"flow ({alpha},{l}) is not among the prepared times")
        return var

    def nls_sato_residual(self, l: int) -> PseudoDiffOperator:
        """ε ∂P/∂q^1_ℓ + (𝓛^{ℓ+1}/(ℓ+1)!)_− P."""
        var = self._flow_var(1, l)
        P = self.P_nls
        lhs = P.map_coefficients(lambda f: f.derivative(var).mul_monomial({"eps": 1}))
        A = (self.lax_nls ** (l + 1)).scale(Fraction(1, factorial(l + 1))).minus()
        return lhs + A * P

    def nls_lax_residual(self, l: int) -> PseudoDiffOperator:
        """ε ∂𝓛/∂q^1_ℓ + [(𝓛^{ℓ+1}/(ℓ+1)!)_−, 𝓛]."""
        var = self._flow_var(1, l)
        Lc = self.lax_nls
        lhs = Lc.map_coefficients(lambda f: f.derivative(var).mul_monomial({"eps": 1}))
        A = (Lc ** (l + 1)).scale(Fraction(1, factorial(l + 1))).minus()
        return lhs + A.commutator(Lc)

    def log_plus_negative_part(self) -> PseudoDiffOperator:
        """−ε P_x P^{-1} = Σ_{k≤−1} 2ŵ_k D^k."""
        P = self.P_nls
        Px = P.map_coefficients(lambda f: f.derivative("x").mul_monomial({"eps": 1}))
        return (Px * P.inverse(self.caps.depth)).scale(-1)

    def log_from_w(self, k_min: int = -2) -> PseudoDiffOperator:
        """Σ_{k_min ≤ k ≤ −1} 2 w_k e^{kε∂_x} S^k with w_k from the difference-operator logarithm.

        e^{−nε∂_x} S^{−n} = S̃(x − (n−1)ε)^{-1} ⋯ S̃(x − ε)^{-1} S̃^{-1}; the NLS
        symbols sit ε/2 to the right of the Toda ones, so w_k is read at x + ε/2.
        """
        M = self.caps.depth
        out = PseudoDiffOperator(self.ring, {}, low=-M)
        chain = PseudoDiffOperator.generator(self.ring, 0)
        for n in range(1, -k_min + 1):
            chain = self.S_tilde(-(n - 1)).inverse(M) * chain
            w = self.shift_x(self.log_L.coefficient(-n), Fraction(1, 2))
            out = out + PseudoDiffOperator.scalar(w.scale(2)) * chain
        return out


# ---------------------------------------------------------------------------
# comparisons and reports


@dataclass
class LaxCheck:
    name: str
    ok: bool
    detail: dict[str, Any] = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {"name": self.name, "ok": self.ok, **self.detail}


@dataclass
class LaxReport:
    caps: LaxCaps
    checks: list[LaxCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, check: LaxCheck) -> None:
        self.checks.append(check)

    def to_json_obj(self) -> dict:
        return {"ok": self.ok, "weight_cap": self.caps.weight_cap, "depth": self.caps.depth,
                "psi": "symbolic" if self.caps.psi is None else format_coefficient(Fraction(self.caps.psi)),
                "checks": [c.to_json_obj() for c in self.checks]}


def _bound(b: float) -> int | None:
    return None if b in (inf, -inf) else int(b)


def operator_zero_check(name: str, A: _Operator, required: tuple[int, int] | None = None) -> LaxCheck:
    """All exactly known coefficients of A vanish (and the exact range covers ``required``)."""
    bad = sorted(k for k, c in A.terms.items() if c)
    ok = not bad
    detail: dict[str, Any] = {"exact_low": _bound(A.low), "exact_high": _bound(A.high)}
    if required is not None:
        lo, hi = required
        covered = A.low <= lo and hi <= A.high
        detail["required"] = [lo, hi]
        ok = ok and covered
    if bad:
        detail["nonzero_powers"] = bad
        detail["first"] = A.terms[bad[0]].to_json_obj()[:3]
    return LaxCheck(name, ok, detail)


def series_zero_check(name: str, f: TruncatedSeries) -> LaxCheck:
    detail: dict[str, Any] = {"terms": len(f.terms)}
    if f:
        detail["first"] = f.to_json_obj()[:3]
    return LaxCheck(name, not f, detail)


def eps_orders(f: TruncatedSeries) -> list[int]:
    return sorted({f.ring.exponent(k, "eps") for k in f.terms})


# ---------------------------------------------------------------------------
# Toda checks


def _flow_name(alpha: int, l: int) -> str:
    return f"{alpha}:{l}"


def verify_toda(frame: TauFrame, flows: tuple[tuple[int, int], ...] = ((1, 0), (1, 1), (2, 0), (2, 1))) -> LaxReport:
    report = LaxReport(frame.caps)
    r = frame.ring
    M = frame.caps.depth
    L = frame.L
    Lam = DifferenceOperator.generator(r, 1)

    # dressing by P^+ and by P^- = Q P̂
    P = frame.P_plus
    report.add(operator_zero_check("dressing_plus", P * Lam * P.inverse(M) - L, (-M + 2, 1)))
    Ph = frame.P_hat
    minus_dressed = frame.conjugate_by_Q(Ph * DifferenceOperator.generator(r, -1) * Ph.inverse(M))
    report.add(operator_zero_check("dressing_minus", minus_dressed.scale(frame.E(-2)) - L, (-1, M - 2)))

    # e^{u+ψ} = Q/Q(x−ε) as an identity of logarithms
    report.add(series_zero_check("exp_u_from_Q", frame.log_Q - frame.shift_x(frame.log_Q, -1) - frame.u - frame.psi()))

    # w_0
    w0 = frame.log_L.coefficient(0)
    half_eps = {"eps": 1}
    direct = frame.log_Q.derivative("x").mul_monomial(half_eps, Fraction(1, 2))
    report.add(series_zero_check("w0_from_Q", w0 - direct))
    via_u = frame.psi().scale(Fraction(1, 2)) + frame.shift_x(
        inverse_difference_derivative(frame.u, "x"), 1).mul_monomial(half_eps, Fraction(1, 2))
    report.add(series_zero_check("w0_from_u", w0 - via_u))

    # w_{-1}
    w_m1 = frame.log_L.coefficient(-1)
    expected = inverse_difference_derivative(frame.v, "x").mul_monomial(half_eps, Fraction(1, 2))
    diff = w_m1 - expected
    orders = eps_orders(expected)
    low_two = orders[:2]
    low_diff = TruncatedSeries(r, {k: c for k, c in diff.terms.items() if r.exponent(k, "eps") in low_two})
    chk = series_zero_check("w_minus1_lowest_two_orders", low_diff)
    chk.detail["eps_orders"] = low_two
    report.add(chk)
    report.add(series_zero_check("w_minus1_all_orders", diff))

    # mirror relation between w_k and w_{-k}
    for k in (1, 2):
        if k >= M - 1:
            break
        wk = frame.log_L.coefficient(k)
        ratio = frame.exp_with_psi_constant(frame.log_Q - frame.shift_x(frame.log_Q, -k), k)
        mirrored = frame.shift_x(wk, -k) * ratio * frame.E(-2 * k)
        report.add(series_zero_check(f"w_mirror_{k}", frame.log_L.coefficient(-k) - mirrored))

    # coefficients of L from those of P^+
    p1 = P.coefficient(-1)
    p2 = P.coefficient(-2)
    report.add(series_zero_check("v_from_p1", frame.v - (p1 - frame.shift_x(p1, 1))))
    report.add(series_zero_check("exp_u_from_p", frame.exp_u - (p2 - frame.shift_x(p2, 1)
                                                              - p1 * (p1 - frame.shift_x(p1, 1)))))

    # Lax flows
    for alpha, l in flows:
        res = frame.toda_flow_residual(alpha, l)
        report.add(operator_zero_check(f"toda_flow_{_flow_name(alpha, l)}", res, (-1, 1)))

    # ε ∂v/∂q^2_1 from the Lax equation against the direct derivative
    if (2, 1) in flows:
        A21 = frame.toda_generator(2, 1).plus()
        from_lax = A21.commutator(L).coefficient(0)
        direct = frame.v.derivative("b1").mul_monomial({"eps": 1})
        report.add(series_zero_check("extended_flow_2:1_on_v", from_lax - direct))

    # Sato equations for P^+ along the q^1 flows
    for l in (0, 1):
        var = FLOW_VARIABLES[(1, l)]
        lhs = P.map_coefficients(lambda f: f.derivative(var).mul_monomial({"eps": 1}))
        rhs = frame.toda_generator(1, l).minus() * P
        report.add(operator_zero_check(f"toda_sato_1:{l}", lhs + rhs, (-M + l + 2, 0)))
    return report


def flow_commutator_on_v(frame: TauFrame) -> TruncatedSeries:
    """ε∂_X (flow (2,1) of v) − ε∂_{b1} (flow (1,0) of v), both flows read off their Lax equations."""
    A21 = frame.toda_generator(2, 1).plus()
    flow21_v = A21.commutator(frame.L).coefficient(0)
    flow10_v = frame.shift_x(frame.exp_u, 1) - frame.exp_u
    lhs = flow21_v.derivative("X").mul_monomial({"eps": 1})
    rhs = flow10_v.derivative("b1").mul_monomial({"eps": 1})
    return lhs - rhs


def verify_nls(frame: TauFrame, sato_levels: tuple[int, ...] = (0, 1), commute: bool = True) -> LaxReport:
    report = LaxReport(frame.caps)
    r = frame.ring
    M = frame.caps.depth
    eps = {"eps": 1}
    u, v, eu = frame.u, frame.v, frame.exp_u
    report.add(series_zero_check("eps_v_X", v.derivative("X").mul_monomial(eps) - (frame.shift_x(eu, 1) - eu)))
    report.add(series_zero_check("eps_u_X", u.derivative("X").mul_monomial(eps) - (v - frame.shift_x(v, -1))))

    Lcal = frame.lax_nls
    S = frame.S_tilde()
    S_inv = S.inverse(M)
    formula = frame.D_op() + PseudoDiffOperator.scalar(frame.rho) * S_inv
    report.add(operator_zero_check("lax_dressing_vs_rho_phi", Lcal - formula, (-M + 3, 1)))
    T = frame.T_tilde()
    report.add(operator_zero_check("lax_vs_T_S_inverse", Lcal - T * S_inv, (-M + 3, 2)))
    cross = frame.S_tilde(1).inverse(M) * frame.T_tilde(1)
    report.add(operator_zero_check("lax_vs_shifted_S_inverse_T", Lcal - cross, (-M + 3, 2)))
    minus = Lcal.minus()
    lead = PseudoDiffOperator(r, {-1: frame.rho, -2: frame.rho * frame.phi})
    report.add(operator_zero_check("lax_minus_leading", (minus - lead).truncate(-2, inf), (-2, -1)))

    adj = frame.P_tilde_nls.adjoint()
    report.add(operator_zero_check("adjoint_inverse", frame.P_nls * adj - frame.D_op(0), (-M + 1, 0)))
    for l in sato_levels:
        report.add(operator_zero_check(f"nls_sato_1:{l}", frame.nls_sato_residual(l), (-M + l + 3, 0)))
        report.add(operator_zero_check(f"nls_lax_1:{l}", frame.nls_lax_residual(l), (-M + l + 4, 1)))
    diff = frame.log_plus_negative_part() - frame.log_from_w(-2)
    report.add(operator_zero_check("log_consistency_w_minus1_minus2", diff.truncate(-2, -1), (-2, -1)))
    if commute:
        report.add(series_zero_check("flows_1:0_2:1_commute_on_v", flow_commutator_on_v(frame)))
    return report


def lax_data(frame: TauFrame) -> dict[str, Any]:
    return {name: getattr(frame, name).to_json_obj() for name in ("v", "u", "phi", "rho")}


# ---------------------------------------------------------------------------
# fundamental lemma on monomial operators


def fundamental_lemma_sides(k: int, l: int, B: Mapping[int, Fraction]) -> tuple[TruncatedSeries, TruncatedSeries]:
    """Both sides of the residue/ψDO identity for P = D^k, Q = B(X)(−D)^l, k + l < 0.

    B maps powers of X to coefficients.  Results are polynomials in X and
    u = X − X̄ with Laurent powers of ε.
    """
    if k + l >= 0:
        raise LaxError("the identity needs k + l < 0")
    deg = max(B, default=0)
    n0 = -k - l - 1
    ring = SeriesRing(["eps", "X", "u"], [Grading("deg", {"X": 1, "u": 1}, deg + n0 + 1)])
    X = ring.var("X")
    u = ring.var("u")
    Bx = ring.zero()
    Bbar = ring.zero()
    for p, c in B.items():
        Bx = Bx + (X ** p).scale(Fraction(c))
        Bbar = Bbar + ((X - u) ** p).scale(Fraction(c))
    # res_λ λ^{k+l} B(X̄) e^{uλ/ε} = B(X̄) u^{n0}/(ε^{n0} n0!)
    lhs = (Bbar * u ** n0).mul_monomial({"eps": -n0}, Fraction(1, factorial(n0)))
    # ε res_{∂_X} D^{k+l} B e^{u∂_X}
    op = PseudoDiffOperator(ring, {k + l: ring.one()}) * PseudoDiffOperator.scalar(Bx)
    rhs = ring.zero()
    for power, c in op.terms.items():
        m = -1 - power  # D^{power} D^m/ε^m u^m/m! lands on D^{-1}
        if m < 0:
            continue
        rhs = rhs + (c * u ** m).mul_monomial({"eps": -m}, Fraction(1, factorial(m)))
    return lhs, rhs


def lax_frame(weight_cap: int = 3, depth: int = 4, psi: Rational | None = None) -> TauFrame:
    return TauFrame(LaxCaps(weight_cap, depth, psi))


__all__ = ["LaxError", "LaxCaps", "TauFrame", "LaxCheck", "LaxReport", "verify_toda", "verify_nls",
           "flow_commutator_on_v", "lax_data", "fundamental_lemma_sides", "lax_frame", "lax_ring",
           "cached_potential"]
