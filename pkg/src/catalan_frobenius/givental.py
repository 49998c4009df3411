"""Quantized symplectic operators, ancestor and descendent potentials.

Pipeline (all exact):

1. ``canonical_ancestor``: log of the shift-conjugated R̂ acting on
   ∏_i τ_KdV(Δ_i^{1/2} T^i, Δ_i ε²), as a polynomial in the canonical-frame
   times T^i_a.  The exponential of the second-order operator is evaluated
   as the flow dF/ds = (ε²/2) B(∂∂F + ∂F∂F) + V(F) solved order by order in s.
2. ``flat_ancestor``: the frame change T^i_a = Ψ_{iα} T^α_a; coefficients are
   checked to be free of i and √2.
3. ``DescendentPotential``: log 𝒟(t̂) = ε^{-2}(c·t̂ + ½ V(t̂, t̂)) + log 𝒜(T(t̂))
   with T^β_b = Σ_ℓ (S_ℓ)^β_α t̂^α_{b+ℓ}; here t̂ = t − (expansion point) in
   the slots t^1_0, t^2_0.

Truncation in step 1: a term ε^{2g−2} ∏_{k≤n} T_{a_k} has χ = 2g − 2 + n and
D = Σ a_k.  Every operator in the flow keeps g nondecreasing and never lowers
μ = χ − ⌊D/2⌋, so terms with g > genus_max or μ > chi_max can be dropped.
Every operator also raises w = 3g − 3 + n − D by at least one, so the
s-expansion terminates.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product as iproduct
from math import comb, factorial
from typing import Any, Mapping, Sequence

from .calibration import SMatrixTable, r_matrix, s_matrix
from .frobenius import SPECIAL_POINT, FrobeniusPoint
from .kdv import intersection_number, partitions_for
from .linalg import ETA, Matrix
from .scalars import ExactScalar, Rational
from .series import SeriesRing, TruncatedSeries


class GiventalError(ValueError):
    pass


Slot = tuple[int, int]  # (frame index 1|2, descendant index a)
Mono = tuple[int, ...]  # sorted encoded slots, code = 2*a + (i-1)


def encode_slot(i: int, a: int) -> int:
    return 2 * a + (i - 1)


def decode_slot(code: int) -> Slot:
    return (code & 1) + 1, code >> 1


def _mono_stats(mono: Mono) -> tuple[int, int]:
    """(n, D) for a monomial."""
    return len(mono), sum(c >> 1 for c in mono)


def _mu(g: int, mono: Mono) -> int:
    n, D = _mono_stats(mono)
    return 2 * g - 2 + n - D // 2


def _remove(mono: Mono, code: int) -> Mono:
    j = mono.index(code)
    return mono[:j] + mono[j + 1:]


def _insert(mono: Mono, code: int) -> Mono:
    return tuple(sorted(mono + (code,)))


def _merge(a: Mono, b: Mono) -> Mono:
    return tuple(sorted(a + b))


Poly = dict[tuple[int, Mono], ExactScalar]


def _add_into(target: dict, key: Any, value: Any) -> None:
    v = target.get(key)
    if v is None:
        target[key] = value
    else:
        v = v + value
        if v:
            target[key] = v
        else:
            del target[key]


def matrix_series_log(R: Sequence[Matrix]) -> list[Matrix]:
    """log(Id + Σ_{k≥1} R_k z^k) as [r_0 = 0, r_1, …] truncated at the length of R."""
    K = len(R) - 1
    X = [Matrix.zeros()] + [R[k] for k in range(1, K + 1)]
    out = [Matrix.zeros() for _ in range(K + 1)]
    power = [Matrix.identity()] + [Matrix.zeros() for _ in range(K)]
    for n in range(1, K + 1):
        new = [Matrix.zeros() for _ in range(K + 1)]
        for a in range(K + 1):
            if power[a].is_zero():
                continue
            for b in range(1, K + 1 - a):
                new[a + b] = new[a + b] + power[a] * X[b]
        power = new
        coef = Fraction((-1) ** (n + 1), n)
        for k in range(K + 1):
            if not power[k].is_zero():
                out[k] = out[k] + power[k] * coef
    return out


def matrix_series_exp(r: Sequence[Matrix]) -> list[Matrix]:
    """exp(Σ_{k≥1} r_k z^k) truncated at the length of r."""
    K = len(r) - 1
    out = [Matrix.identity()] + [Matrix.zeros() for _ in range(K)]
    power = [Matrix.identity()] + [Matrix.zeros() for _ in range(K)]
    for n in range(1, K + 1):
        new = [Matrix.zeros() for _ in range(K + 1)]
        for a in range(K + 1):
            if power[a].is_zero():
                continue
            for b in range(1, K + 1 - a):
                new[a + b] = new[a + b] + power[a] * r[b]
        power = [m * Fraction(1, n) for m in new]
        for k in range(K + 1):
            out[k] = out[k] + power[k]
    return out


# ---------------------------------------------------------------------------
# canonical-frame ancestor potential


def kdv_product(genus_max: int, chi_max: int, delta_roots: Sequence[ExactScalar]) -> Poly:
    """Σ_i log τ_KdV(Δ_i^{1/2} T^i, Δ_i ε²), restricted by g ≤ genus_max and μ ≤ chi_max."""
    F: Poly = {}
    for g in range(genus_max + 1):
        n = 1
        while True:
            chi = 2 * g - 2 + n
            D = 3 * g - 3 + n
            if chi - D // 2 > chi_max:
                break
            if chi > 0 and D >= 0:
                for a in partitions_for(g, n):
                    val = intersection_number(g, a)
                    if not val:
                        continue
                    mult = 1
                    for x in set(a):
                        mult *= factorial(a.count(x))
                    for i in (1, 2):
                        mono = tuple(sorted(encode_slot(i, x) for x in a))
                        F[(g, mono)] = delta_roots[i - 1] ** chi * val * Fraction(1, mult)
            n += 1
    return F


class RAction:
    """log of the shift-conjugated R̂ on functions of the times of one frame.

    ``r`` are the matrices of log R in that frame, ``pairing_inverse`` the
    inverse metric of the frame and ``unit`` the components of the unit vector.
    The operator is
      (ε²/2) Σ (−1)^b (r_{a+b+1} η^{-1})_{ij} ∂_{i,a} ∂_{j,b}
      − Σ T^i_a (r_ℓ)_{ji} ∂_{j,a+ℓ} + Σ u_i (r_ℓ)_{ji} ∂_{j,1+ℓ}.
    """

    def __init__(self, r: Sequence[Matrix], unit: Sequence[Any], pairing_inverse: Matrix | None = None,
                 rational: bool = False) -> None:
        conv = (lambda x: x.to_fraction()) if rational else (lambda x: x)
        self.K = len(r) - 1
        self.zero = Fraction(0) if rational else ExactScalar(0)
        self.lin = [[[conv(m[i, j]) for j in range(2)] for i in range(2)] for m in r]
        kern = [m if pairing_inverse is None else m * pairing_inverse for m in r]
        self.kern = [[[conv(m[i, j]) for j in range(2)] for i in range(2)] for m in kern]
        self.unit = [conv(ExactScalar(u) if not isinstance(u, ExactScalar) else u) for u in unit]
        self._kernel_cache: dict[tuple[int, int], Any] = {}

    def _check(self, l: int) -> None:
        if l > self.K:
            raise GiventalError(f"R-matrix order {l} exceeds the prepared table ({self.K})")

    def r_entry(self, l: int, i: int, j: int) -> Any:
        if l < 1:
            return self.zero
        self._check(l)
        return self.lin[l][i - 1][j - 1]

    def kernel(self, s: int, t: int) -> Any:
        """(−1)^b (r_{a+b+1} η^{-1})_{ij} for s = (i, a), t = (j, b); the sign follows the slot r acts on."""
        v = self._kernel_cache.get((s, t))
        if v is None:
            i, a = decode_slot(s)
            j, b = decode_slot(t)
            self._check(a + b + 1)
            v = self.kern[a + b + 1][i - 1][j - 1]
            v = -v if b % 2 else v
            self._kernel_cache[(s, t)] = v
        return v


def _ancestor_order(genus_max: int, chi_max: int) -> int:
    # w = 3g − 3 + n − D ≥ 0 and μ ≤ chi_max bound n by 2 chi_max − g + 6, hence D;
    # the kernel pairs indices of two factors
    n_bound = 2 * chi_max - genus_max + 6
    return 2 * (3 * genus_max + n_bound) + 2


def _change_frame(F: Poly, M: Matrix) -> dict[tuple[int, Mono], ExactScalar]:
    """Substitute T^i_a = Σ_α M_{iα} T^α_a."""
    acc: dict[tuple[int, Mono], ExactScalar] = {}
    for (g, mono), c in F.items():
        choices = []
        for code in mono:
            i, a = decode_slot(code)
            choices.append([(encode_slot(alpha, a), M[i - 1, alpha - 1]) for alpha in (1, 2)
                            if M[i - 1, alpha - 1]])
        for pick in iproduct(*choices):
            coef = c
            for _, w in pick:
                coef = coef * w
            if coef:
                _add_into(acc, (g, tuple(sorted(code for code, _ in pick))), coef)
    return acc


def flat_kdv_product(genus_max: int, chi_max: int, point: FrobeniusPoint = SPECIAL_POINT) -> Poly:
    """The KdV product written in flat times, with rational coefficients.

    A canonical monomial ∏_a (T^i_a)^{m_a} expands into Σ ∏_a C(m_a, j_a) Ψ_{i1}^J Ψ_{i2}^{n−J}
    ∏_a (T^1_a)^{j_a} (T^2_a)^{m_a − j_a} with J = Σ j_a, so the sum over i only
    needs the scalars Σ_i (Δ_i^{1/2})^χ Ψ_{i1}^J Ψ_{i2}^{n−J}.
    """
    fr = point.frame
    scal: dict[tuple[int, int, int], Fraction] = {}

    def weight(g: int, n: int, J: int) -> Fraction:
        key = (g, n, J)
        if key not in scal:
            acc = ExactScalar(0)
            for i in (0, 1):
                acc = acc + fr.delta_roots[i] ** (2 * g - 2 + n) * fr.psi[i, 0] ** J * fr.psi[i, 1] ** (n - J)
            if not acc.is_rational():
                raise GiventalError(f"flat KdV weight {key} = {acc} is not rational")
            scal[key] = acc.to_fraction()
        return scal[key]

    F: Poly = {}
    for (g, mono), c in kdv_product(genus_max, chi_max, [ExactScalar(1), ExactScalar(1)]).items():
        if mono[0] & 1:
            continue  # one copy per frame index; the weights carry the sum over i
        parts = Counter(code >> 1 for code in mono)
        n = len(mono)
        base = c.to_fraction()
        choices = [[(j, comb(m, j)) for j in range(m + 1)] for m in parts.values()]
        idx = list(parts)
        for pick in iproduct(*choices):
            J = sum(j for j, _ in pick)
            w = weight(g, n, J)
            if not w:
                continue
            coef = base * w
            codes = []
            for a, (j, b) in zip(idx, pick):
                coef *= b
                m = parts[a]
                codes += [encode_slot(1, a)] * j + [encode_slot(2, a)] * (m - j)
            _add_into(F, (g, tuple(sorted(codes))), coef)
    return F


def _rationalize(F: Mapping[tuple[int, Mono], ExactScalar], what: str) -> dict[tuple[int, Mono], Fraction]:
    out: dict[tuple[int, Mono], Fraction] = {}
    for key, c in F.items():
        if not c.is_rational():
            raise GiventalError(f"{what} coefficient {key} = {c} is not rational")
        out[key] = c.to_fraction()
    return out


def _run_flow(op: RAction, F0: Poly, genus_max: int, chi_max: int) -> Poly:
    terms = [F0]
    derivs = [_derivatives(F0)]
    m = 0
    while True:
        nxt = _apply_step(op, terms[m], derivs, m, genus_max, chi_max)
        if not nxt:
            break
        terms.append(nxt)
        derivs.append(_derivatives(nxt))
        m += 1
        if m > 10 * (genus_max + chi_max + 4):
            raise GiventalError("R-action flow failed to terminate")
    total: Poly = {}
    for Fm in terms:
        for key, c in Fm.items():
            _add_into(total, key, c)
    return {(g, mono): c for (g, mono), c in total.items() if 2 * g - 2 + len(mono) <= chi_max}


def _log_r(point: FrobeniusPoint, genus_max: int, chi_max: int) -> list[Matrix]:
    return matrix_series_log(r_matrix(point, _ancestor_order(genus_max, chi_max)).matrices)


def canonical_ancestor(genus_max: int, chi_max: int, point: FrobeniusPoint = SPECIAL_POINT,
                       r_override: Sequence[Matrix] | None = None) -> Poly:
    """log of the R-action on the KdV product, canonical frame, terms with χ ≤ chi_max."""
    r = list(r_override) if r_override is not None else _log_r(point, genus_max, chi_max)
    fr = point.frame
    op = RAction(r, [fr.psi[0, 0], fr.psi[1, 0]])
    return _run_flow(op, kdv_product(genus_max, chi_max, fr.delta_roots), genus_max, chi_max)


def flat_ancestor(genus_max: int, chi_max: int, point: FrobeniusPoint = SPECIAL_POINT,
                  r_override: Sequence[Matrix] | None = None) -> dict[tuple[int, Mono], Fraction]:
    """Ancestor potential in flat times T^i_a = Ψ_{iα} T^α_a, computed by running the flow in the flat frame.

    The KdV product is moved to the flat frame first (its coefficients are
    rational there), so the flow runs on plain fractions with
    r̃ = Ψ^{-1} r Ψ, kernel r̃ η^{-1} and unit vector e_1.
    """
    r = list(r_override) if r_override is not None else _log_r(point, genus_max, chi_max)
    fr = point.frame
    r_flat = [fr.psi_inv * m * fr.psi for m in r]
    F0 = flat_kdv_product(genus_max, chi_max, point)
    op = RAction(r_flat, [1, 0], ETA, rational=True)
    return _run_flow(op, F0, genus_max, chi_max)


def flat_ancestor_via_canonical(genus_max: int, chi_max: int, point: FrobeniusPoint = SPECIAL_POINT
                                ) -> dict[tuple[int, Mono], Fraction]:
    """Same polynomial obtained by running the flow in the canonical frame (slow cross-check)."""
    Fc = canonical_ancestor(genus_max, chi_max, point)
    return _rationalize(_change_frame(Fc, point.frame.psi), "flat ancestor")


Grouped = dict[tuple[int, int, int], dict[Mono, Any]]


def _derivatives(F: Poly) -> dict[int, Grouped]:
    """∂F/∂T_s for every slot s occurring in F, bucketed by (genus, n, D)."""
    out: dict[int, Grouped] = defaultdict(lambda: defaultdict(dict))
    for (g, mono), c in F.items():
        n, D = _mono_stats(mono)
        prev = None
        for code in mono:
            if code == prev:
                continue
            prev = code
            _add_into(out[code][(g, n - 1, D - (code >> 1))], _remove(mono, code), c * mono.count(code))
    return out


def _keep(g: int, mono: Mono, genus_max: int, chi_max: int) -> bool:
    if g > genus_max:
        return False
    if not mono:
        return False
    return _mu(g, mono) <= chi_max


def _apply_step(op: RAction, Fm: Poly, dF: list[dict[int, Grouped]], m: int,
                genus_max: int, chi_max: int) -> Poly:
    out: Poly = {}
    half = Fraction(1, 2)
    # second-order part acting on a single term: (ε²/2) Σ K_{st} ∂_s ∂_t
    for (g, mono), c in Fm.items():
        if g + 1 > genus_max:
            continue
        codes = sorted(set(mono))
        for s in codes:
            ms = mono.count(s)
            rest = _remove(mono, s)
            for t in codes:
                mt = rest.count(t)
                if not mt:
                    continue
                k = op.kernel(s, t)
                if not k:
                    continue
                new = _remove(rest, t)
                if _keep(g + 1, new, genus_max, chi_max):
                    _add_into(out, (g + 1, new), c * k * (ms * mt) * half)
    # second-order part on products: (ε²/2) Σ_{p+q=m} Σ K_{st} ∂_s F_p ∂_t F_q
    for p in range(m + 1):
        q = m - p
        dp, dq = dF[p], dF[q]
        for s, Ps in dp.items():
            G: Grouped = defaultdict(dict)
            for t, Qt in dq.items():
                k = op.kernel(s, t)
                if not k:
                    continue
                for stats, bucket in Qt.items():
                    target = G[stats]
                    for mono, c in bucket.items():
                        _add_into(target, mono, c * k)
            for (g1, n1, D1), left in Ps.items():
                for (g2, n2, D2), right in G.items():
                    g, n = g1 + g2, n1 + n2
                    if g > genus_max or n == 0 or 2 * g - 2 + n - (D1 + D2) // 2 > chi_max:
                        continue
                    for m1, c1 in left.items():
                        c1h = c1 * half
                        for m2, c2 in right.items():
                            _add_into(out, (g, _merge(m1, m2)), c1h * c2)
    # first-order part: −Σ T^i_a (r_ℓ)_{ji} ∂_{T^j_{a+ℓ}} + Σ Ψ_{i1} (r_ℓ)_{ji} ∂_{T^j_{1+ℓ}}
    for (g, mono), c in Fm.items():
        prev = None
        for t in mono:
            if t == prev:
                continue
            prev = t
            mt = mono.count(t)
            j, b = decode_slot(t)
            rest = _remove(mono, t)
            for l in range(1, b + 1):
                for i in (1, 2):
                    v = op.r_entry(l, j, i)
                    if v:
                        new = _insert(rest, encode_slot(i, b - l))
                        if _keep(g, new, genus_max, chi_max):
                            _add_into(out, (g, new), -c * v * mt)
            if b >= 2:
                acc = op.zero
                for i in (1, 2):
                    if op.unit[i - 1]:
                        acc = acc + op.unit[i - 1] * op.r_entry(b - 1, j, i)
                if acc and _keep(g, rest, genus_max, chi_max):
                    _add_into(out, (g, rest), c * acc * mt)
    inv = Fraction(1, m + 1)
    return {k: v * inv for k, v in out.items()}


# ---------------------------------------------------------------------------
# descendent potential


def _scalar_series(c: ExactScalar | Fraction | int, ring: SeriesRing) -> TruncatedSeries:
    """Embed a Q[ψ] scalar into a ring; ψ must be a ring variable when it occurs."""
    if not isinstance(c, ExactScalar):
        return ring.const(Fraction(c))
    out = ring.zero()
    for p, piece in c.psi_coefficients().items():
        if not piece.is_rational():
            raise GiventalError(f"coefficient {c} leaves Q[psi]")
        v = piece.to_fraction()
        if p == 0:
            out = out + ring.const(v)
        else:
            if "psi" not in ring.index:
                raise GiventalError("symbolic ψ needs a 'psi' ring variable")
            out = out + ring.monomial({"psi": p}, v)
    return out


class DescendentPotential:
    """log 𝒟 around the point (0, 1) in the variables t̂^α_a (t̂^2_0 = t^2_0 − 1).

    ``psi`` is a rational value, or ``None`` for a symbolic ψ.  Terms with
    genus ≤ genus_max and 2g − 2 + n ≤ chi_max are exact.
    """

    def __init__(self, genus_max: int = 2, chi_max: int = 3, psi: Rational | None = 0,
                 point: FrobeniusPoint = SPECIAL_POINT) -> None:
        if point.t1 != 0 or point.t2 != 1:
            raise GiventalError("the descendent potential is expanded around (0, 1) only")
        self.genus_max = genus_max
        self.chi_max = chi_max
        self.psi = psi
        self.point = point
        self._perturbations: dict[tuple[int, tuple[Slot, ...]], Fraction] = {}

    # tables ------------------------------------------------------------------
    @lru_cache(maxsize=None)
    def S(self, k: int) -> Matrix:
        return self._s_table(max(k, 8))[k]

    @lru_cache(maxsize=None)
    def _s_table(self, K: int) -> SMatrixTable:
        return s_matrix(self.point, K, self.psi)

    @cached_property
    def flat(self) -> dict[tuple[int, Mono], Fraction]:
        return flat_ancestor(self.genus_max, self.chi_max, self.point)

    def flat_by_genus(self) -> dict[int, dict[Mono, Fraction]]:
        out: dict[int, dict[Mono, Fraction]] = defaultdict(dict)
        for (g, mono), c in self.flat.items():
            out[g][mono] = c
        return dict(out)

    def linear_coefficient(self, beta: int, a: int) -> ExactScalar:
        """[ε^{-2} t̂^β_a] log 𝒟 = (η S_{a+2})_{1β}, derived from the dilaton-shifted quadratic form."""
        return (ETA * self.S(a + 2))[0, beta - 1]

    def linear_coefficient_from_form(self, beta: int, a: int) -> ExactScalar:
        """Same coefficient computed from V(t̂, δ), δ = S_1 e_1 z^0 − e_1 z^1 (the shift of q)."""
        S1e1 = (self.S(1)[0, 0], self.S(1)[1, 0])
        acc = ExactScalar(0)
        for gamma in (1, 2):
            acc = acc + self.quadratic_coefficient((beta, a), (gamma, 0)) * S1e1[gamma - 1]
        acc = acc - self.quadratic_coefficient((beta, a), (1, 1))
        return acc

    def quadratic_coefficient(self, s: Slot, t: Slot) -> ExactScalar:
        """V^{αβ}_{ab} = [z^a w^b] (S(1/z)^T η S(1/w) − η)_{αβ} / (z + w)."""
        return self._quadratic(s, t)

    @lru_cache(maxsize=None)
    def _quadratic(self, s: Slot, t: Slot) -> ExactScalar:
        (alpha, a), (beta, b) = s, t
        # N(z, w) = Σ_{k,l} N_{kl} z^k w^l with N_{kl} = (S_k^T η S_l)_{αβ} − η_{αβ}δ_{k0}δ_{l0};
        # V = N/(z + w): V_{a,b} = Σ_{j≥0} (−1)^j N_{a+1+j, b−j}... solved by the recursion
        # N_{kl} = V_{k−1,l} + V_{k,l−1}.
        return self._V_table(a + b + 1)[(alpha, beta)][a][b]

    @lru_cache(maxsize=None)
    def _V_table(self, total: int) -> dict[tuple[int, int], list[list[ExactScalar]]]:
        out = {}
        for alpha in (1, 2):
            for beta in (1, 2):
                N = [[ExactScalar(0)] * (total + 2) for _ in range(total + 2)]
                for k in range(total + 2):
                    for l in range(total + 2 - k):
                        v = (self.S(k).T() * ETA * self.S(l))[alpha - 1, beta - 1]
                        if k == 0 and l == 0:
                            v = v - ETA[alpha - 1, beta - 1]
                        N[k][l] = v
                # V_{k,l} for k + l ≤ total − 1: V_{0,l} = N_{1,l}... use V_{k,l} = N_{k+1,l} − V_{k+1,l−1}
                V = [[ExactScalar(0)] * (total + 1) for _ in range(total + 1)]
                for d in range(total):
                    # along the antidiagonal k + l = d, start from l = 0: V_{d,0} = N_{d+1,0}
                    V[d][0] = N[d + 1][0]
                    for l in range(1, d + 1):
                        V[d - l][l] = N[d - l + 1][l] - V[d - l + 1][l - 1]
                    if N[0][d + 1] != V[0][d]:
                        raise GiventalError("quadratic form is not divisible by z + w")
                out[(alpha, beta)] = V
        return out

    def perturb(self, genus: int, slots: Sequence[Slot], delta: Fraction) -> None:
        """Add delta to one coefficient (used for mutation tests)."""
        key = (genus, tuple(sorted(slots)))
        self._perturbations[key] = self._perturbations.get(key, Fraction(0)) + Fraction(delta)

    @property
    def perturbations(self) -> dict[tuple[int, tuple[Slot, ...]], Fraction]:
        return dict(self._perturbations)

    # coefficient extraction ----------------------------------------------------
    def T_coefficient(self, t_slot: Slot, s: Slot) -> ExactScalar:
        """∂T^β_b/∂t̂^α_a = (S_{a−b})^β_α (zero for a < b)."""
        (beta, b), (alpha, a) = t_slot, s
        if a < b:
            return ExactScalar(0)
        return self.S(a - b)[beta - 1, alpha - 1]

    def coefficient(self, genus: int, slots: Sequence[Slot]) -> ExactScalar:
        """[ε^{2g−2} ∏ t̂^{α}_{a}] log 𝒟 for the monomial listed by ``slots``."""
        slots = tuple(sorted(slots))
        n = len(slots)
        if 2 * genus - 2 + n > self.chi_max or genus > self.genus_max:
            raise GiventalError("requested coefficient exceeds the prepared caps")
        extra = ExactScalar(self._perturbations.get((genus, slots), Fraction(0)))
        if n == 0:
            return extra
        if genus == 0 and n == 1:
            beta, a = slots[0]
            return self.linear_coefficient(beta, a) + extra
        if genus == 0 and n == 2:
            v = self.quadratic_coefficient(slots[0], slots[1])
            return (v * Fraction(1, 2) if slots[0] == slots[1] else v) + extra
        flat = self.flat
        total = ExactScalar(0)
        choices = []
        for (alpha, a) in slots:
            opts = []
            for b in range(a + 1):
                for beta in (1, 2):
                    w = self.T_coefficient((beta, b), (alpha, a))
                    if w:
                        opts.append((encode_slot(beta, b), w))
            choices.append(opts)
        for pick in iproduct(*choices):
            mono = tuple(sorted(code for code, _ in pick))
            c = flat.get((genus, mono))
            if not c:
                continue
            w = ExactScalar(c)
            for code in set(mono):
                w = w * factorial(mono.count(code))
            for _, x in pick:
                w = w * x
            total = total + w
        mult = 1
        for s in set(slots):
            mult *= factorial(slots.count(s))
        return total * Fraction(1, mult) + extra

    # evaluation at series arguments --------------------------------------------
    def transform_components(self, t: Mapping[Slot, TruncatedSeries], ring: SeriesRing) -> dict[int, TruncatedSeries]:
        """T^β_b = Σ_{α, a ≥ b} (S_{a−b})^β_α t̂^α_a for a finite set of slot values."""
        out: dict[int, TruncatedSeries] = {}
        for (alpha, a), val in t.items():
            for b in range(a + 1):
                for beta in (1, 2):
                    w = self.T_coefficient((beta, b), (alpha, a))
                    if not w:
                        continue
                    code = encode_slot(beta, b)
                    term = val * _scalar_series(w, ring)
                    out[code] = out[code] + term if code in out else term
        return {k: v for k, v in out.items() if v}

    def unstable_part(self, t: Mapping[Slot, TruncatedSeries], ring: SeriesRing,
                      include_linear: bool = True) -> TruncatedSeries:
        """c·t̂ + ½ V(t̂, t̂) (without the ε^{-2} factor)."""
        acc = ring.zero()
        slots = sorted(t)
        if include_linear:
            for s in slots:
                acc = acc + t[s] * _scalar_series(self.linear_coefficient(*s), ring)
        for i, s in enumerate(slots):
            for u in slots[i:]:
                v = self.quadratic_coefficient(s, u)
                if not v:
                    continue
                w = _scalar_series(v, ring)
                if s == u:
                    w = w * Fraction(1, 2)
                acc = acc + t[s] * t[u] * w
        return acc

    def ancestor_at(self, T: Mapping[int, TruncatedSeries], genus: int, ring: SeriesRing) -> TruncatedSeries:
        """Genus-``genus`` part of log 𝒜 (no ε factor) evaluated at T (codes → series)."""
        return evaluate_polynomial(self.flat_by_genus().get(genus, {}), T, ring)

    def perturbation_at(self, t: Mapping[Slot, TruncatedSeries], genus: int, ring: SeriesRing) -> TruncatedSeries:
        acc = ring.zero()
        for (g, slots), delta in self._perturbations.items():
            if g != genus:
                continue
            term = ring.const(delta)
            for s in slots:
                if s not in t:
                    term = ring.zero()
                    break
                term = term * t[s]
            acc = acc + term
        return acc


def evaluate_polynomial(poly: Mapping[Mono, Any], values: Mapping[int, TruncatedSeries],
                        ring: SeriesRing) -> TruncatedSeries:
    """Σ c_m ∏ values[code] with shared prefix products (monomials are sorted code tuples)."""
    cache: dict[Mono, TruncatedSeries] = {(): ring.one()}

    def prefix(m: Mono) -> TruncatedSeries:
        v = cache.get(m)
        if v is None:
            head = prefix(m[:-1])
            last = values.get(m[-1])
            v = ring.zero() if last is None or head.is_zero() else head * last
            cache[m] = v
        return v

    acc = ring.zero()
    for mono in sorted(poly):
        if any(code not in values for code in mono):
            continue
        val = prefix(mono)
        if val:
            acc = acc + val * Fraction(poly[mono]) if not isinstance(poly[mono], ExactScalar) else acc + val * poly[mono]
    return acc


def unstable_01(a: int, psi: Rational = 0) -> ExactScalar:
    """[ε^{-2} t^1_a] log 𝒟 = η_{1α} (S_{a+2})^α_1 at the point (0, 1)."""
    S = s_matrix(SPECIAL_POINT, a + 2, psi)[a + 2]
    return (ETA * S)[0, 0]


def unstable_02(a: int, b: int, psi: Rational = 0) -> ExactScalar:
    """V^{11}_{ab}, the [ε^{-2} t^1_a t^1_b] coefficient up to the symmetry factor ½ at a = b."""
    D = DescendentPotential(genus_max=0, chi_max=0, psi=psi)
    return D.quadratic_coefficient((1, a), (1, b))


def two_point_series_explicit(a: int, b: int) -> Fraction:
    """[z^a w^b] of Σ z^{2p} w^{2q+1}/((p!)² q!(q+1)!) + (z ↔ w)."""
    out = Fraction(0)
    if a % 2 == 0 and b % 2 == 1:
        p, q = a // 2, (b - 1) // 2
        out += Fraction(1, factorial(p) ** 2 * factorial(q) * factorial(q + 1))
    if b % 2 == 0 and a % 2 == 1:
        p, q = b // 2, (a - 1) // 2
        out += Fraction(1, factorial(p) ** 2 * factorial(q) * factorial(q + 1))
    return out


# ---------------------------------------------------------------------------
# linear Hamiltonians and their quantization


@dataclass(frozen=True)
class LinearHamiltonian:
    """f = Σ_l I^l (−z)^l with I^l given by flat components (upper index)."""

    vectors: Mapping[int, tuple[Fraction, Fraction]]

    def lower(self, k: int) -> tuple[Fraction, Fraction]:
        v = self.vectors.get(k, (Fraction(0), Fraction(0)))
        return v[1], v[0]  # η swaps the components

    def upper(self, k: int) -> tuple[Fraction, Fraction]:
        return self.vectors.get(k, (Fraction(0), Fraction(0)))

    def quantized(self) -> tuple[dict[Slot, Fraction], dict[Slot, Fraction]]:
        """(coefficients of ε ∂/∂q^i_l, coefficients of q^i_l / ε)."""
        d, m = {}, {}
        ks = list(self.vectors)
        lmax = max([abs(k) for k in ks] + [0]) + 1
        for l in range(lmax + 1):
            up = self.upper(l)
            low = self.lower(-(l + 1))
            for i in (1, 2):
                if up[i - 1]:
                    d[(i, l)] = (-1) ** (l + 1) * up[i - 1]
                if low[i - 1]:
                    m[(i, l)] = low[i - 1]
        return d, m


def omega(f: LinearHamiltonian, g: LinearHamiltonian) -> Fraction:
    """Ω(f, g) = res_z (f(−z), g(z)) dz with f(z) = Σ I^l (−z)^l."""
    total = Fraction(0)
    for k, u in f.vectors.items():
        m = -1 - k
        if m not in g.vectors:
            continue
        v = g.vectors[m]
        # f(−z) = Σ I^k z^k, g(z) = Σ J^m (−1)^m z^m
        pair = u[0] * v[1] + u[1] * v[0]
        total += (-1) ** (m % 2) * pair
    return total


def apply_quantized(f: LinearHamiltonian, s: TruncatedSeries) -> TruncatedSeries:
    """f̂ applied to a series in variables q{i}_{l} and eps."""
    d, m = f.quantized()
    ring = s.ring
    out = ring.zero()
    for (i, l), c in d.items():
        name = f"q{i}_{l}"
        if name in ring.index:
            out = out + s.derivative(name).mul_monomial({"eps": 1}, c)
    for (i, l), c in m.items():
        name = f"q{i}_{l}"
        if name not in ring.index:
            raise GiventalError(f"variable {name} missing from the ring")
        out = out + s.mul_monomial({name: 1, "eps": -1}, c)
    return out
