"""Calibration S(z), the R-matrix, the C prefactor and Hamiltonian densities."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

from .frobenius import FrobeniusPoint, SPECIAL_POINT
from .linalg import ETA, Matrix, commutator
from .scalars import ExactScalar, Rational, harmonic, pochhammer
from .series import Grading, SeriesRing, TruncatedSeries

NILPOTENT_R = Matrix([[0, 2], [0, 0]])


class CalibrationError(ValueError):
    pass


def psi_scalar(psi: Rational | ExactScalar | None) -> ExactScalar:
    """``None`` means symbolic ψ."""
    return ExactScalar.psi() if psi is None else ExactScalar(psi)


def log_t2_scalar(p: FrobeniusPoint) -> ExactScalar:
    """log t2 is an opaque symbol, annihilated at t2 = 1."""
    return ExactScalar(0) if p.t2 == 1 else ExactScalar.log_t2()


@dataclass(frozen=True)
class SMatrixTable:
    matrices: tuple[Matrix, ...]
    point: FrobeniusPoint
    psi: ExactScalar

    def __getitem__(self, k: int) -> Matrix:
        return self.matrices[k]

    def __len__(self) -> int:
        return len(self.matrices)

    def to_json_obj(self) -> dict:
        return {"point": [str(self.point.t1), str(self.point.t2)], "psi": str(self.psi),
                "S": [m.to_strings() for m in self.matrices]}


@dataclass(frozen=True)
class RMatrixTable:
    matrices: tuple[Matrix, ...]
    point: FrobeniusPoint

    def __getitem__(self, k: int) -> Matrix:
        return self.matrices[k]

    def __len__(self) -> int:
        return len(self.matrices)

    def to_json_obj(self) -> dict:
        return {"point": [str(self.point.t1), str(self.point.t2)],
                "R": [m.to_strings() for m in self.matrices]}


def s_matrix(p: FrobeniusPoint = SPECIAL_POINT, K: int = 8, psi: Rational | ExactScalar | None = None) -> SMatrixTable:
    """Solve k S_k + S_k μ − μ S_k = 𝒰 S_{k−1} − S_{k−1} R with (S_1)_{12} = ψ + log t2."""
    if K < 0:
        raise CalibrationError("order must be nonnegative")
    mu = (Fraction(1, 2), Fraction(-1, 2))
    U = p.euler_matrix
    free = psi_scalar(psi) + log_t2_scalar(p)
    mats = [Matrix.identity()]
    for k in range(1, K + 1):
        rhs = U * mats[-1] - mats[-1] * NILPOTENT_R
        rows = []
        for a in range(2):
            row = []
            for b in range(2):
                w = k + mu[b] - mu[a]
                if w == 0:
                    if (a, b) != (0, 1) or k != 1:
                        raise CalibrationError("unexpected resonance")
                    if not rhs[a, b].is_zero():
                        raise CalibrationError("resonant equation is inconsistent")
                    row.append(free)
                else:
                    row.append(rhs[a, b] * Fraction(1) / w)
            rows.append(row)
        mats.append(Matrix(rows))
    return SMatrixTable(tuple(mats), p, psi_scalar(psi))


def s_matrix_residual(table: SMatrixTable) -> list[Matrix]:
    mu = table.point.mu
    U = table.point.euler_matrix
    out = []
    for k in range(1, len(table)):
        S, Sp = table[k], table[k - 1]
        out.append(S * k + S * mu - mu * S - (U * Sp - Sp * NILPOTENT_R))
    return out


def s_special_closed_form(k: int, psi: Rational | ExactScalar | None = None) -> Matrix:
    """Closed form at the point (0, 1) (even k diagonal, odd k antidiagonal)."""
    ps = psi_scalar(psi)
    if k == 0:
        return Matrix.identity()
    m, odd = divmod(k, 2)
    if not odd:
        return Matrix([[Fraction(1, factorial(m) ** 2), 0],
                       [0, (ps + Fraction(1, m) - 2 * harmonic(m)) * Fraction(1, factorial(m) * factorial(m - 1))]])
    return Matrix([[0, (ps - 2 * harmonic(m)) * Fraction(1, factorial(m) ** 2)],
                   [Fraction(1, factorial(m + 1) * factorial(m)), 0]])


def symplectic_defect_S(table: SMatrixTable) -> list[Matrix]:
    """Coefficients of S*(−z) S(z) − Id in z^{-n}, S*(z) = η^{-1} S(z)^T η."""
    n_max = len(table) - 1
    out = []
    for n in range(n_max + 1):
        acc = Matrix.zeros()
        for a in range(n + 1):
            acc = acc + (ETA * table[a].T() * ETA) * table[n - a] * ((-1) ** a)
        if n == 0:
            acc = acc - Matrix.identity()
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# residue form through the superpotential f = ζ + t1 + t2/ζ

_RES_VARS = ("t1", "t2", "zeta")


@lru_cache(maxsize=None)
def _residue_rings(N: int) -> tuple[SeriesRing, SeriesRing, SeriesRing]:
    plain = SeriesRing(_RES_VARS)
    pos = SeriesRing(_RES_VARS, [Grading("zeta", {"zeta": 1}, N)])
    neg = SeriesRing(_RES_VARS, [Grading("zeta_inv", {"zeta": -1}, N)])
    return plain, pos, neg


def _log1p(x: TruncatedSeries) -> TruncatedSeries:
    out = x.ring.zero()
    power = x.ring.one()
    n = 1
    while True:
        power = power * x
        if power.is_zero():
            return out
        out = out + power.scale(ExactScalar(Fraction((-1) ** (n + 1), n)))
        n += 1


@lru_cache(maxsize=None)
def formal_log_superpotential(N: int) -> TruncatedSeries:
    """~log f truncated to |ζ-exponent| ≤ N, in the variables t1, t2, ζ (t2 may carry negative powers).

    For ζ ~ 0: ½ log(fζ) = ½ log t2 + ½ log(1 + (t1 ζ + ζ²)/t2); for ζ ~ ∞:
    ½ log(f/ζ) = ½ log(1 + t1/ζ + t2/ζ²).
    """
    plain, pos, neg = _residue_rings(N)
    one = ExactScalar(1)
    half = ExactScalar(Fraction(1, 2))
    xp = pos.from_terms([({"t1": 1, "t2": -1, "zeta": 1}, one), ({"t2": -1, "zeta": 2}, one)])
    xn = neg.from_terms([({"t1": 1, "zeta": -1}, one), ({"t2": 1, "zeta": -2}, one)])
    lp = _log1p(xp).scale(half).embed(plain)
    ln = _log1p(xn).scale(half).embed(plain)
    return lp + ln + plain.const(half * ExactScalar.log_t2())


def superpotential(ring: SeriesRing) -> TruncatedSeries:
    one = ExactScalar(1)
    return ring.from_terms([({"zeta": 1}, one), ({"t1": 1}, one), ({"t2": 1, "zeta": -1}, one)])


def _residue(s: TruncatedSeries) -> TruncatedSeries:
    """Formal residue in ζ: the coefficient of ζ^{-1}."""
    return s.coefficient_of_power("zeta", -1)


def _g2_factor(k: int, psi: ExactScalar, N: int) -> TruncatedSeries:
    """2 f^{k−1}/(k−1)! (~log f + ψ/2 − h(k−1))."""
    plain = _residue_rings(N)[0]
    f = superpotential(plain)
    lg = formal_log_superpotential(N) + plain.const(psi * Fraction(1, 2) - harmonic(k - 1))
    return (f ** (k - 1) * lg).scale(ExactScalar(Fraction(2, factorial(k - 1))))


def s_matrix_symbolic(K: int, psi: Rational | ExactScalar | None = None) -> list[list[list[TruncatedSeries]]]:
    """Residue-form S_k as polynomials in t1, t2 (coefficients may involve ψ and log t2)."""
    ps = psi_scalar(psi)
    N = K + 2
    plain = _residue_rings(N)[0]
    f = superpotential(plain)
    inv_zeta = plain.monomial({"zeta": -1}, ExactScalar(1))
    out = [[[plain.one(), plain.zero()], [plain.zero(), plain.one()]]]
    for k in range(1, K + 1):
        g1 = (f ** k).scale(ExactScalar(Fraction(1, factorial(k))))
        g2 = _g2_factor(k, ps, N)
        out.append([[_residue(g1 * inv_zeta), _residue(g2 * inv_zeta)],
                    [_residue(g1), _residue(g2)]])
    return out


def _evaluate_poly(s: TruncatedSeries, p: FrobeniusPoint) -> ExactScalar:
    acc = ExactScalar(0)
    t2inv = p.t2.inverse()
    for exps, c in s.monomials():
        e1, e2 = exps.get("t1", 0), exps.get("t2", 0)
        if exps.get("zeta", 0):
            raise CalibrationError("residue left a ζ-dependence")
        acc = acc + c * p.t1 ** e1 * (p.t2 ** e2 if e2 >= 0 else t2inv ** (-e2))
    return acc


def s_matrix_residue_form(p: FrobeniusPoint = SPECIAL_POINT, K: int = 8,
                          psi: Rational | ExactScalar | None = None) -> SMatrixTable:
    """Independent route to the S-matrix through formal residues of the superpotential."""
    sym = s_matrix_symbolic(K, psi)
    L = log_t2_scalar(p)
    mats = []
    for entry in sym:
        mats.append(Matrix([[_evaluate_poly(x, p).subs(log_t2=L) if L.is_zero() else _evaluate_poly(x, p)
                             for x in row] for row in entry]))
    return SMatrixTable(tuple(mats), p, psi_scalar(psi))


def hamiltonian_density(alpha: int, p_index: int, psi: Rational | ExactScalar | None = None) -> TruncatedSeries:
    """h_{α,p} = res g_{α,p} dζ as a polynomial in t1, t2 (with log t2 and ψ in the coefficients).

    g_{1,p} = f^{p+2}/(p+2)!, g_{2,p} = 2 f^{p+1}/(p+1)! (~log f − h(p+1) + ψ/2).
    """
    if alpha not in (1, 2) or p_index < -1:
        raise CalibrationError("need alpha in {1, 2} and p >= -1")
    N = p_index + 4
    plain = _residue_rings(N)[0]
    f = superpotential(plain)
    if alpha == 1:
        return _residue((f ** (p_index + 2)).scale(ExactScalar(Fraction(1, factorial(p_index + 2)))))
    return _residue(_g2_factor(p_index + 2, psi_scalar(psi), N))


# ---------------------------------------------------------------------------
# R-matrix in the normalized canonical frame


def r_matrix_closed(p: FrobeniusPoint, k: int) -> Matrix:
    pref = pochhammer(Fraction(1, 2), k - 1) if k >= 1 else Fraction(-2)
    pref = pref * pochhammer(Fraction(1, 2), k) / factorial(k)
    i = ExactScalar.i()
    sign = (-1) ** (k + 1)
    M = Matrix([[Fraction(sign, 2), i * k], [i * (sign * k), Fraction(-1, 2)]])
    d = (p.u2 - p.u1).inverse() ** k
    return M * (d * pref)


def r_matrix_recursive(p: FrobeniusPoint, K: int) -> list[Matrix]:
    """Solve [R_{k+1}, U] = (V + k) R_k with R_0 = Id; diagonals fixed at the next step."""
    fr = p.frame
    u = (p.u1, p.u2)
    V = fr.V
    mats = [Matrix.identity()]
    for k in range(K):
        rhs = (V + Matrix.identity() * k) * mats[k]
        off = [[ExactScalar(0)] * 2 for _ in range(2)]
        for i in range(2):
            for j in range(2):
                if i != j:
                    off[i][j] = rhs[i, j] * (u[j] - u[i]).inverse()
        for i in range(2):
            acc = ExactScalar(0)
            for j in range(2):
                if j != i:
                    acc = acc + V[i, j] * off[j][i]
            off[i][i] = -acc * Fraction(1, k + 1)
        mats.append(Matrix(off))
    return mats


def r_matrix(p: FrobeniusPoint = SPECIAL_POINT, K: int = 8) -> RMatrixTable:
    if p.u1 == p.u2:
        raise CalibrationError("semisimplicity lost")
    closed = [r_matrix_closed(p, k) for k in range(K + 1)]
    rec = r_matrix_recursive(p, K)
    for k, (a, b) in enumerate(zip(closed, rec)):
        if a != b:
            raise CalibrationError(f"closed form and recursion disagree at k={k}")
    return RMatrixTable(tuple(closed), p)


def r_recursion_residual(table: RMatrixTable) -> list[Matrix]:
    fr = table.point.frame
    return [commutator(table[k + 1], fr.U) - (fr.V + Matrix.identity() * k) * table[k]
            for k in range(len(table) - 1)]


def symplectic_defect_R(table: RMatrixTable) -> list[Matrix]:
    """Coefficients of R(z) R^T(−z) − Id in z^n (η = Id in the normalized canonical frame)."""
    out = []
    for n in range(len(table)):
        acc = Matrix.zeros()
        for a in range(n + 1):
            acc = acc + table[a] * table[n - a].T() * ((-1) ** (n - a))
        if n == 0:
            acc = acc - Matrix.identity()
        out.append(acc)
    return out


def c_prefactor(p: FrobeniusPoint) -> ExactScalar:
    """log C = −(1/16) log t2, the additive constant fixed to vanish at t2 = 1."""
    return log_t2_scalar(p) * Fraction(-1, 16)


def c_prefactor_consistency(p: FrobeniusPoint) -> dict[str, Fraction]:
    """Compare the log t2 coefficient of log C with ∫ (R_1)_{11} du^1 + (R_1)_{22} du^2.

    (R_1)_{ii} = ±1/(4(u2 − u1)) integrates to −¼ log(u2 − u1), and u2 − u1 = −4√t2
    gives −1/8 as the coefficient of log t2.
    """
    R1 = r_matrix_closed(p, 1) * (p.u2 - p.u1)
    a, b = R1[0, 0].to_fraction(), R1[1, 1].to_fraction()
    if a != -b:
        raise CalibrationError("diagonal of R_1 is not closed")
    # d/du1 of log(u2 − u1) is −1/(u2 − u1): the primitive is −a log(u2 − u1)
    integrated = -a * Fraction(1, 2)
    stated = Fraction(-1, 16)
    return {"stated": stated, "integrated": integrated, "residual": stated - integrated}


def matrices_close(a: Sequence[Matrix], b: Sequence[Matrix]) -> bool:
    return len(a) == len(b) and all(x == y for x, y in zip(a, b))
