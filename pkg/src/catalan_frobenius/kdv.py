"""Witten–Kontsevich intersection numbers and the truncated KdV tau function.

Convention: log τ = Σ_{g,n} ε^{2g−2}/n! Σ_{a_1..a_n} <τ_{a_1}…τ_{a_n}>_g ∏ T_{a_i}.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Iterable, Iterator

from .scalars import ExactScalar
from .series import Grading, SeriesRing, TruncatedSeries


def double_factorial(n: int) -> int:
    """n!! with (−1)!! = 1."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _canon(parts: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(parts))


def intersection_number(g: int, partition: Iterable[int]) -> Fraction:
    """<τ_{a_1} … τ_{a_n}>_g, zero unless Σ a_i = 3g − 3 + n."""
    return _intersection(g, _canon(partition))


@lru_cache(maxsize=None)
def _intersection(g: int, a: tuple[int, ...]) -> Fraction:
    n = len(a)
    if g < 0 or n == 0 or any(x < 0 for x in a):
        return Fraction(0)
    if sum(a) != 3 * g - 3 + n:
        return Fraction(0)
    if g == 0 and a == (0, 0, 0):
        return Fraction(1)
    if g == 1 and a == (1,):
        return Fraction(1, 24)
    if a[0] == 0:
        # string equation
        rest = a[1:]
        total = Fraction(0)
        for j in range(len(rest)):
            if rest[j] > 0:
                total += _intersection(g, _canon(rest[:j] + (rest[j] - 1,) + rest[j + 1:]))
        return total
    # DVV on the last (largest) insertion τ_{k+1}
    k = a[-1] - 1
    S = a[:-1]
    total = Fraction(0)
    for j, aj in enumerate(S):
        others = S[:j] + S[j + 1:]
        total += Fraction(double_factorial(2 * k + 2 * aj + 1), double_factorial(2 * aj - 1)) * \
            _intersection(g, _canon(others + (aj + k,)))
    for r in range(k):
        s = k - 1 - r
        w = Fraction(double_factorial(2 * r + 1) * double_factorial(2 * s + 1), 2)
        total += w * _intersection(g - 1, _canon(S + (r, s)))
        idx = range(len(S))
        for size in range(len(S) + 1):
            for I in combinations(idx, size):
                J = [i for i in idx if i not in I]
                SI = tuple(S[i] for i in I)
                SJ = tuple(S[i] for i in J)
                for g1 in range(g + 1):
                    left = _intersection(g1, _canon(SI + (r,)))
                    if left:
                        total += w * left * _intersection(g - g1, _canon(SJ + (s,)))
    return total / double_factorial(2 * k + 3)


def partitions_for(g: int, n: int) -> Iterator[tuple[int, ...]]:
    """Sorted tuples a_1 ≤ … ≤ a_n with Σ a = 3g − 3 + n."""
    d = 3 * g - 3 + n
    if d < 0 or n == 0:
        return

    def rec(prefix: list[int], remaining: int, slots: int, lo: int) -> Iterator[tuple[int, ...]]:
        if slots == 0:
            if remaining == 0:
                yield tuple(prefix)
            return
        for x in range(lo, remaining + 1):
            if x * slots > remaining:
                break
            yield from rec(prefix + [x], remaining - x, slots - 1, x)

    yield from rec([], d, n, 0)


def intersection_table(genus_max: int, n_max: int) -> dict[tuple[int, tuple[int, ...]], Fraction]:
    table = {}
    for g in range(genus_max + 1):
        for n in range(1, n_max + 1):
            if 2 * g - 2 + n <= 0:
                continue
            for a in partitions_for(g, n):
                table[(g, a)] = intersection_number(g, a)
    return table


def string_residual(g: int, a: tuple[int, ...]) -> Fraction:
    lhs = intersection_number(g, (0,) + a)
    rhs = sum((intersection_number(g, a[:j] + (a[j] - 1,) + a[j + 1:]) for j in range(len(a)) if a[j] > 0),
              Fraction(0))
    if g == 0 and len(a) == 2 and a == (0, 0):
        rhs += 1
    return lhs - rhs


def dilaton_residual(g: int, a: tuple[int, ...]) -> Fraction:
    lhs = intersection_number(g, (1,) + a)
    n = len(a)
    rhs = (2 * g - 2 + n) * intersection_number(g, a)
    if g == 1 and n == 0:
        rhs = Fraction(1, 24)
    return lhs - rhs


def dilaton_shift_check(g: int, a: tuple[int, ...], m_max: int) -> bool:
    """Coefficientwise check of e^{c ∂_{T_1}} on the (g, a) family against (1 − c)^{−χ}.

    The coefficient of c^m/m! in the shifted series is <τ_1^m τ_a>_g; the
    identity holds iff it equals (χ)_m <τ_a>_g with χ = 2g − 2 + n, which is
    the Taylor expansion of (1 − c)^{−χ} = Δ^{χ/2} for c = 1 − Δ^{−1/2}.
    """
    chi = 2 * g - 2 + len(a)
    base = intersection_number(g, a)
    rising = 1
    for m in range(m_max + 1):
        if intersection_number(g, (1,) * m + a) != rising * base:
            return False
        rising *= chi + m
    return True


def tau_ring(index_max: int, genus_max: int, n_max: int) -> SeriesRing:
    names = ["eps"] + [f"T{a}" for a in range(index_max + 1)]
    return SeriesRing(names, [Grading("degree", {f"T{a}": 1 for a in range(index_max + 1)}, n_max),
                              Grading("eps", {"eps": 1}, 2 * genus_max - 2)])


def tau_log(genus_max: int, n_max: int, index_max: int,
            delta_scale: ExactScalar | None = None) -> TruncatedSeries:
    """log τ_KdV with optional rescaling T_a ↦ Δ^{1/2} T_a, ε² ↦ Δ ε².

    ``delta_scale`` is Δ^{1/2}; the (g, n) term is multiplied by (Δ^{1/2})^{2g−2+n}.
    """
    ring = tau_ring(index_max, genus_max, n_max)
    terms = []
    for g in range(genus_max + 1):
        for n in range(1, n_max + 1):
            chi = 2 * g - 2 + n
            if chi <= 0:
                continue
            weight = ExactScalar(1) if delta_scale is None else delta_scale ** chi
            for a in partitions_for(g, n):
                if max(a) > index_max:
                    continue
                val = intersection_number(g, a)
                if not val:
                    continue
                exps: dict[str, int] = {"eps": 2 * g - 2}
                for x in a:
                    exps[f"T{x}"] = exps.get(f"T{x}", 0) + 1
                mult = 1
                for x in set(a):
                    mult *= factorial(a.count(x))
                # 1/n! times the number of orderings n!/∏ m_j! gives 1/∏ m_j!
                terms.append((exps, weight * val * Fraction(1, mult)))
    return ring.from_terms(terms)
