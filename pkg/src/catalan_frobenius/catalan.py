"""Generalized Catalan numbers by brute-force gluing of polygons.

Sides of the n polygons carry global labels 0..N−1, polygon j owning a
consecutive block of k_j labels starting at its root side.  A gluing is a
perfect matching α of the labels; σ sends a side to the next side of its
polygon.  The glued surface has n faces, N/2 edges and one vertex per cycle
of σ∘α, so 2 − 2g = #cycles − N/2 + n.  Only connected gluings are counted.

Enumeration is vectorized: the matchings of the last m labels are generated
once as a template array and every chunk fixes the partners of the first few
labels.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Iterable, Sequence

import numpy as np

from .calibration import s_matrix
from .frobenius import SPECIAL_POINT

DEFAULT_BOUND = 14
_TEMPLATE_SIZE = 14  # labels covered by the precomputed matching template


class CatalanError(ValueError):
    pass


@dataclass(frozen=True)
class MapCountQuery:
    genus: int
    profile: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.genus < 0:
            raise CatalanError("genus must be nonnegative")
        if not self.profile or any(k < 1 for k in self.profile):
            raise CatalanError("every polygon needs at least one side")


@dataclass(frozen=True)
class GluingDiagram:
    profile: tuple[int, ...]
    matching: tuple[int, ...]  # matching[s] = partner of side s

    @property
    def edges(self) -> int:
        return sum(self.profile) // 2

    @property
    def faces(self) -> int:
        return len(self.profile)

    @property
    def vertices(self) -> int:
        sigma = _rotation(self.profile)
        seen = [False] * len(self.matching)
        cycles = 0
        for s in range(len(self.matching)):
            if seen[s]:
                continue
            cycles += 1
            x = s
            while not seen[x]:
                seen[x] = True
                x = sigma[self.matching[x]]
        return cycles

    @property
    def euler_characteristic(self) -> int:
        return self.vertices - self.edges + self.faces

    @property
    def genus(self) -> int:
        chi = self.euler_characteristic
        if chi % 2:
            raise CatalanError("odd Euler characteristic")
        return (2 - chi) // 2

    @property
    def connected(self) -> bool:
        owner = _owner(self.profile)
        parent = list(range(len(self.profile)))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for s, t in enumerate(self.matching):
            a, b = find(owner[s]), find(owner[t])
            if a != b:
                parent[a] = b
        return len({find(j) for j in range(len(self.profile))}) == 1


def _rotation(profile: Sequence[int]) -> list[int]:
    sigma = []
    start = 0
    for k in profile:
        sigma.extend(start + (j + 1) % k for j in range(k))
        start += k
    return sigma


def _owner(profile: Sequence[int]) -> list[int]:
    return [j for j, k in enumerate(profile) for _ in range(k)]


def iter_matchings(labels: Sequence[int]) -> Iterable[list[tuple[int, int]]]:
    """All perfect matchings, pairing the smallest remaining label first."""
    if not labels:
        yield []
        return
    first, rest = labels[0], labels[1:]
    for j, partner in enumerate(rest):
        remaining = rest[:j] + rest[j + 1:]
        for m in iter_matchings(remaining):
            yield [(first, partner)] + m


@lru_cache(maxsize=None)
def _template(m: int) -> np.ndarray:
    """Array of shape ((m−1)!!, m): row r lists the partner (in 0..m−1) of each position."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int8)
    sub = _template(m - 2)
    blocks = []
    for partner in range(1, m):
        others = [x for x in range(1, m) if x != partner]
        rows = np.empty((sub.shape[0], m), dtype=np.int8)
        rows[:, 0] = partner
        rows[:, partner] = 0
        lookup = np.array(others, dtype=np.int8)
        # sub pairs positions 0..m−3 among themselves; relabel them to ``others``
        rows[:, lookup] = lookup[sub]
        blocks.append(rows)
    return np.concatenate(blocks, axis=0)


def _prefix_choices(N: int, tail: int) -> Iterable[tuple[list[tuple[int, int]], list[int]]]:
    """Partial matchings of the labels until ``tail`` labels remain free."""

    def rec(free: list[int], acc: list[tuple[int, int]]):
        if len(free) <= tail:
            yield acc, free
            return
        first, rest = free[0], free[1:]
        for j, partner in enumerate(rest):
            yield from rec(rest[:j] + rest[j + 1:], acc + [(first, partner)])

    yield from rec(list(range(N)), [])


def _count_cycles(perm: np.ndarray) -> np.ndarray:
    """Number of cycles of each row permutation (pointer jumping on minimal labels)."""
    rows, N = perm.shape
    label = np.broadcast_to(np.arange(N, dtype=np.int16), (rows, N)).copy()
    p = perm.astype(np.int16)
    steps = 1
    while steps < N:
        label = np.minimum(label, np.take_along_axis(label, p, axis=1))
        p = np.take_along_axis(p, p, axis=1)
        steps *= 2
    return (label == np.arange(N, dtype=np.int16)).sum(axis=1)


def _components(alpha: np.ndarray, owner: np.ndarray, n: int) -> np.ndarray:
    """Boolean mask of connected gluings."""
    if n == 1:
        return np.ones(alpha.shape[0], dtype=bool)
    dst = owner[alpha]
    adj = np.zeros((alpha.shape[0], n, n), dtype=bool)
    for j in range(n):
        block = dst[:, owner == j]
        for l in range(n):
            if l != j:
                adj[:, j, l] = (block == l).any(axis=1)
    reach = adj | np.eye(n, dtype=bool)
    for _ in range(n.bit_length()):
        reach = (reach[:, :, :, None] & reach[:, None, :, :]).any(axis=2)
    return reach[:, 0, :].all(axis=1)


@lru_cache(maxsize=None)
def genus_distribution(profile: tuple[int, ...]) -> dict[int, int]:
    """Connected gluing counts by genus for the ordered polygons ``profile``."""
    N = sum(profile)
    if N % 2:
        return {}
    sigma = np.array(_rotation(profile), dtype=np.int16)
    owner = np.array(_owner(profile), dtype=np.int16)
    n = len(profile)
    tail = min(N, _TEMPLATE_SIZE)
    tmpl = _template(tail)
    hist: Counter[int] = Counter()
    for pairs, free in _prefix_choices(N, tail):
        alpha = np.empty((tmpl.shape[0], N), dtype=np.int16)
        for a, b in pairs:
            alpha[:, a] = b
            alpha[:, b] = a
        if free:
            fr = np.array(free, dtype=np.int16)
            alpha[:, fr] = fr[tmpl]
        conn = _components(alpha, owner, n)
        cycles = _count_cycles(sigma[alpha])
        chi = cycles[conn] - N // 2 + n
        genera, counts = np.unique((2 - chi) // 2, return_counts=True)
        for g, c in zip(genera.tolist(), counts.tolist()):
            hist[g] += c
    return dict(sorted(hist.items()))


def count_maps_bruteforce(q: MapCountQuery | tuple[int, Sequence[int]], bound: int = DEFAULT_BOUND) -> int:
    """C_{g; k_1, …, k_n}: rooted connected gluings of genus g."""
    if not isinstance(q, MapCountQuery):
        q = MapCountQuery(q[0], tuple(q[1]))
    N = sum(q.profile)
    if N > bound:
        raise CatalanError(f"brute-force bound {bound} exceeded by profile sum {N}")
    if N % 2:
        return 0
    return genus_distribution(tuple(q.profile)).get(q.genus, 0)


def count_maps_reference(q: MapCountQuery) -> int:
    """Unvectorized count through GluingDiagram (slow; used to cross-check small cases)."""
    N = sum(q.profile)
    if N % 2:
        return 0
    total = 0
    for m in iter_matchings(list(range(N))):
        alpha = [0] * N
        for a, b in m:
            alpha[a], alpha[b] = b, a
        d = GluingDiagram(q.profile, tuple(alpha))
        if d.connected and d.genus == q.genus:
            total += 1
    return total


def unrooted_weighted_count(q: MapCountQuery) -> Fraction:
    """D_{g; k} = C_{g; k} / ∏ k_i."""
    return Fraction(count_maps_bruteforce(q), prod(q.profile))


def catalan_number(m: int) -> int:
    return factorial(2 * m) // (factorial(m) * factorial(m + 1))


# ---------------------------------------------------------------------------
# residue identities bridging the maps and the S-matrix


def _xi_series(alpha: int, N: int) -> list[Fraction]:
    """Taylor coefficients (orders 0..N) of z/(1 − z²) (α = 1) or 1/(1 − z²) (α = 2)."""
    start = 1 if alpha == 1 else 0
    return [Fraction(1) if (j >= start and (j - start) % 2 == 0) else Fraction(0) for j in range(N + 1)]


def _minus_d_dx(f: list[Fraction]) -> list[Fraction]:
    """−d/dx with x = z + 1/z, i.e. z²/(1 − z²) d/dz on Taylor coefficients."""
    N = len(f) - 1
    df = [(j + 1) * f[j + 1] for j in range(N)] + [Fraction(0)]
    out = [Fraction(0)] * (N + 1)
    for j, c in enumerate(df):
        if not c:
            continue
        for e in range(j + 2, N + 1, 2):
            out[e] += c
    return out


def xi_residue_identity(alpha: int, k: int, a: int) -> Fraction:
    """res_{z=0} x^{k+1}/(k+1)! · d(−d/dx)^a ξ̃^α(z) with x = z + 1/z."""
    if alpha not in (1, 2):
        raise CatalanError("alpha must be 1 or 2")
    if k < -1 or a < 0:
        raise CatalanError("need k ≥ −1 and a ≥ 0")
    N = k + 3
    f = _xi_series(alpha, N)
    for _ in range(a):
        f = _minus_d_dx(f)
    df = [(j + 1) * f[j + 1] for j in range(N)]  # coefficient of z^j dz
    # x^{k+1} = Σ_i C(k+1, i) z^{k+1−2i}; residue needs z^{k+1−2i} · z^j = z^{−1}
    total = Fraction(0)
    for i in range(k + 2):
        j = 2 * i - k - 2
        if 0 <= j < len(df):
            total += Fraction(factorial(k + 1), factorial(i) * factorial(k + 1 - i)) * df[j]
    return total / factorial(k + 1)


def xi_identity_expected(alpha: int, k: int, a: int) -> Fraction:
    if a > k:
        return Fraction(0)
    entry = s_matrix(SPECIAL_POINT, max(k - a, 1), 0)[k - a][alpha - 1, 0]
    return entry.to_fraction()


# ---------------------------------------------------------------------------
# comparison of the descendent potential with the map counts


@dataclass
class TheoremReport:
    comparisons: list[dict] = field(default_factory=list)
    mismatches: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json_obj(self) -> dict:
        return {"ok": self.ok, "checked": len(self.comparisons),
                "comparisons": self.comparisons, "mismatches": self.mismatches}


class TheoremMismatch(AssertionError):
    def __init__(self, report: TheoremReport) -> None:
        super().__init__(f"{len(report.mismatches)} mismatching coefficients: {report.mismatches[:3]}")
        self.report = report


def theorem_profiles(genus_max: int, n_max: int, k_max: int, chi_max: int) -> list[tuple[int, tuple[int, ...]]]:
    out = []
    for g in range(genus_max + 1):
        for n in range(1, n_max + 1):
            if 2 * g - 2 + n > chi_max:
                continue
            ks: list[tuple[int, ...]] = [()]
            for _ in range(n):
                ks = [p + (k,) for p in ks for k in range(p[-1] if p else 0, k_max + 1)]
            out.extend((g, p) for p in ks)
    return out


def verify_potential_against_maps(genus_max: int = 2, n_max: int = 3, k_max: int = 5, chi_max: int = 3,
                     potential=None, bound: int | None = None, strict: bool = False) -> TheoremReport:
    """Compare the weighted t^1-coefficients of log 𝒟 (ψ = 0) with C_{g; k_1+1, …, k_n+1}."""
    from .givental import DescendentPotential

    D = potential if potential is not None else DescendentPotential(genus_max, chi_max, psi=0)
    bound = bound if bound is not None else n_max * (k_max + 1)
    report = TheoremReport()
    for g, ks in theorem_profiles(genus_max, n_max, k_max, chi_max):
        coef = D.coefficient(g, [(1, k) for k in ks])
        if not coef.is_rational():
            raise CatalanError(f"coefficient for {(g, ks)} is not rational: {coef}")
        mult = prod(factorial(c) for c in Counter(ks).values())
        weighted = coef.to_fraction() * mult * prod(factorial(k + 1) for k in ks)
        expected = count_maps_bruteforce((g, [k + 1 for k in ks]), bound=bound)
        row = {"genus": g, "k": list(ks), "pipeline": str(weighted), "maps": expected}
        report.comparisons.append(row)
        if weighted != expected:
            report.mismatches.append(row)
    if strict and not report.ok:
        raise TheoremMismatch(report)
    return report


def one_point_genus0(m: int) -> Fraction:
    """Closed form 1/((m+1)!(m+2)!) of the [t^1_{2m+1}] genus-0 coefficient."""
    return Fraction(1, factorial(m + 1) * factorial(m + 2))
