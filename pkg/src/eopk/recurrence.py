"""Five- and seven-term recurrences, their coupling through the curve, and
reconstruction of a family from recurrence data.

Coefficients are stored as plain dicts index -> value.  The accessors `m5` and
`m7` expose them as the (symmetric, banded) matrices of multiplication by wp
and wp' in the orthonormal basis:

    m5(n+2, n) = a_{n+1},  m5(n+1, n) = b_{n+1},  m5(n, n) = c_n
    m7(n+3, n) = p_{n+3},  m7(n+2, n) = q_{n+2},  m7(n+1, n) = r_{n+1},  m7(n, n) = s_n

Anything touching pi_1 or a negative degree is 0, except the conventional c_1 = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eop import EllipticPolynomial, EOPFamily, degrees, mul_wp, mul_wpp, pad, pos
from .errors import (
    InconsistentCoefficients,
    IndexOutOfRange,
    InsufficientDegree,
    InvalidDegree,
)
from .quadrature import eval_weight
from .weierstrass import TorusLattice, wp, wp_prime

C1_CONVENTION = 1.0


def _get(table: dict[int, float], i: int, name: str) -> float:
    if i in table:
        return table[i]
    if not table or i < min(table):
        return 0.0
    raise IndexOutOfRange(f"{name}_{i} is beyond the extracted range")


@dataclass
class FiveTermCoefficients:
    a: dict[int, float]
    b: dict[int, float]
    c: dict[int, float]
    N: int
    max_asymmetry: float = 0.0

    def A(self, i):
        return _get(self.a, i, "a")

    def B(self, i):
        return _get(self.b, i, "b")

    def C(self, i):
        return _get(self.c, i, "c")

    def m5(self, j: int, k: int) -> float:
        d, lo = abs(j - k), min(j, k)
        if lo < 0 or d > 2:
            return 0.0
        if j == 1 or k == 1:
            return C1_CONVENTION if j == k == 1 else 0.0
        return (self.A(lo + 1), self.B(lo + 1), self.C(lo))[2 - d] if d else self.C(lo)

    def perturbed(self, name: str, index: int, delta: float) -> "FiveTermCoefficients":
        out = FiveTermCoefficients(dict(self.a), dict(self.b), dict(self.c), self.N)
        getattr(out, name)[index] = getattr(out, name).get(index, 0.0) + delta
        return out


@dataclass
class SevenTermCoefficients:
    p: dict[int, float]
    q: dict[int, float]
    r: dict[int, float]
    s: dict[int, float]
    N: int

    def P(self, i):
        return _get(self.p, i, "p")

    def Q(self, i):
        return _get(self.q, i, "q")

    def R(self, i):
        return _get(self.r, i, "r")

    def S(self, i):
        return _get(self.s, i, "s")

    def m7(self, j: int, k: int) -> float:
        d, lo = abs(j - k), min(j, k)
        if lo < 0 or d > 3 or j == 1 or k == 1:
            return 0.0
        if d == 3:
            return self.P(lo + 3)
        if d == 2:
            return self.Q(lo + 2)
        if d == 1:
            return self.R(lo + 1)
        return self.S(lo)

    def perturbed(self, name: str, index: int, delta: float) -> "SevenTermCoefficients":
        out = SevenTermCoefficients(dict(self.p), dict(self.q), dict(self.r), dict(self.s), self.N)
        getattr(out, name)[index] = getattr(out, name).get(index, 0.0) + delta
        return out


def multiplication_matrix(fam: EOPFamily, which: str = "wp") -> np.ndarray:
    """M[k, n] = int f pi_n pi_k w over gamma, f = wp or wp'; rows/cols 0..N."""
    L, rule = fam.lattice, fam.rule
    V = fam.values(rule.nodes).real
    f = wp(L, rule.nodes) if which == "wp" else wp_prime(L, rule.nodes)
    wq = eval_weight(fam.weight, L, rule.nodes) * rule.weights * np.real(f)
    return (V * wq) @ V.T


def extract_five_term(fam: EOPFamily) -> FiveTermCoefficients:
    if fam.N < 4:
        raise InsufficientDegree("five-term extraction needs N >= 4")
    M = multiplication_matrix(fam, "wp")
    N = fam.N
    a = {n + 1: float(M[n + 2, n]) for n in range(0, N - 1)}
    b = {n + 1: float(M[n + 1, n]) for n in range(0, N)}
    c = {n: float(M[n, n]) for n in range(0, N + 1)}
    c[1] = C1_CONVENTION
    return FiveTermCoefficients(a, b, c, N, float(np.max(np.abs(M - M.T))))


def extract_seven_term(fam: EOPFamily) -> SevenTermCoefficients:
    if fam.N < 5:
        raise InsufficientDegree("seven-term extraction needs N >= 5")
    M = multiplication_matrix(fam, "wpp")
    N = fam.N
    p = {n + 3: float(M[n + 3, n]) for n in range(0, N - 2)}
    q = {n + 2: float(M[n + 2, n]) for n in range(0, N - 1)}
    r = {n + 1: float(M[n + 1, n]) for n in range(0, N)}
    s = {n: float(M[n, n]) for n in range(0, N + 1)}
    return SevenTermCoefficients(p, q, r, s, N)


def lower_band_leak(fam: EOPFamily, which: str = "wp") -> float:
    """max |int f pi_n pi_k w| over k below the band (k < n-2 for wp, k < n-3 for wp')."""
    M = multiplication_matrix(fam, which)
    width = 2 if which == "wp" else 3
    leak = 0.0
    for n in range(fam.N + 1):
        for k in range(0, n - width):
            leak = max(leak, abs(M[k, n]))
    return leak


# ---------------------------------------------------------------- residuals


def _vals(fam, z):
    return fam.values(z).real if np.all(np.isreal(fam.values(z))) else fam.values(z)


def _pi(V, j):
    return V[j] if j >= 0 else np.zeros_like(V[0])


def residual_five_term(fam: EOPFamily, co: FiveTermCoefficients, n: int, z):
    """|wp pi_n - (a_{n+1} pi_{n+2} + ... + a_{n-1} pi_{n-2})| at z."""
    if n < 0 or n == 1 or n + 2 > fam.N:
        raise InvalidDegree(f"five-term residual needs n != 1 and n + 2 <= N, got n={n}")
    z = np.asarray(z, dtype=complex)
    V = fam.values(z)
    rhs = sum(co.m5(k, n) * _pi(V, k) for k in range(n - 2, n + 3))
    return np.abs(wp(fam.lattice, z) * V[n] - rhs)


def residual_seven_term(fam: EOPFamily, co: SevenTermCoefficients, n: int, z):
    if n < 0 or n == 1 or n + 3 > fam.N:
        raise InvalidDegree(f"seven-term residual needs n != 1 and n + 3 <= N, got n={n}")
    z = np.asarray(z, dtype=complex)
    V = fam.values(z)
    rhs = sum(co.m7(k, n) * _pi(V, k) for k in range(n - 3, n + 4))
    return np.abs(wp_prime(fam.lattice, z) * V[n] - rhs)


@dataclass
class MatrixRecurrence:
    A: dict[int, np.ndarray] = field(default_factory=dict)
    Bm: dict[int, np.ndarray] = field(default_factory=dict)


def build_matrix_recurrence(co: FiveTermCoefficients) -> MatrixRecurrence:
    """A_{2n} = [[a_2n, b_2n], [0, a_2n-1]], B_2n = [[c_2n+1, b_2n+1], [b_2n+1, c_2n]]."""
    M = MatrixRecurrence()
    for m in range(0, co.N + 1, 2):
        try:
            M.A[m] = np.array([[co.A(m), co.B(m)], [0.0, co.A(m - 1)]])
        except IndexOutOfRange:
            pass
        try:
            M.Bm[m] = np.array([[co.C(m + 1), co.B(m + 1)], [co.B(m + 1), co.C(m)]])
        except IndexOutOfRange:
            pass
    return M


def matrix_recurrence_residual(fam: EOPFamily, M: MatrixRecurrence, n: int, z):
    """Norm of wp Pi_2n - (A_{2n+2} Pi_{2n+2} + B_2n Pi_2n + A_2n^T Pi_{2n-2}), Pi_2n = (pi_2n+1, pi_2n)."""
    if 2 * n + 3 > fam.N or n < 0:
        raise InvalidDegree("matrix recurrence needs 2n + 3 <= N")
    if 2 * n + 2 not in M.A or 2 * n not in M.Bm:
        raise IndexOutOfRange("recurrence matrices missing for this n")
    z = np.asarray(z, dtype=complex)
    V = fam.values(z)

    def Pi(m):
        if m < 0:
            return np.zeros((2,) + z.shape, dtype=complex)
        return np.array([_pi(V, m + 1), _pi(V, m)])

    A_lo = M.A.get(2 * n, np.zeros((2, 2)))
    lhs = wp(fam.lattice, z) * Pi(2 * n)
    rhs = (
        np.tensordot(M.A[2 * n + 2], Pi(2 * n + 2), axes=1)
        + np.tensordot(M.Bm[2 * n], Pi(2 * n), axes=1)
        + np.tensordot(A_lo.T, Pi(2 * n - 2), axes=1)
    )
    return np.linalg.norm(lhs - rhs, axis=0)


# ---------------------------------------------------------------- curve coupling


def b_table_five(co: FiveTermCoefficients, n: int, g2: float, g3: float) -> dict[int, float]:
    """Coefficients of (4 wp^3 - g2 wp - g3) pi_n on pi_{n+i}, i = -6..6.

    Obtained by composing the five-term relation three times (sum over band paths).
    """
    out = {}
    for i in range(-6, 7):
        j = n + i
        tot = 0.0
        for k1 in range(n - 2, n + 3):
            m1 = co.m5(k1, n)
            if m1 == 0.0:
                continue
            for k2 in range(k1 - 2, k1 + 3):
                if abs(j - k2) > 2:
                    continue
                tot += co.m5(j, k2) * co.m5(k2, k1) * m1
        out[i] = 4.0 * tot - g2 * co.m5(j, n) - (g3 if i == 0 else 0.0)
    return out


def b_table_seven(co: SevenTermCoefficients, n: int) -> dict[int, float]:
    """Coefficients of wp'^2 pi_n on pi_{n+i}, i = -6..6 (seven-term relation applied twice)."""
    out = {}
    for i in range(-6, 7):
        j = n + i
        out[i] = sum(co.m7(j, k) * co.m7(k, n) for k in range(n - 3, n + 4) if abs(j - k) <= 3)
    return out


def coupling_range(N: int) -> list[int]:
    """Degrees n for which every B_{n+i} only needs coefficients inside 0..N."""
    return [n for n in degrees(N) if n + 6 <= N]


def verify_curve_coupling(
    co5: FiveTermCoefficients, co7: SevenTermCoefficients, n: int, lattice: TorusLattice
) -> dict[int, float]:
    """|B_{n+i}(five-term) - B_{n+i}(seven-term)| for i = -6..6."""
    if n == 1 or n < 0:
        raise IndexOutOfRange("n = 1 carries no polynomial")
    if n + 6 > min(co5.N, co7.N):
        raise IndexOutOfRange(f"B-table at n={n} needs coefficients up to degree {n + 6}")
    b5 = b_table_five(co5, n, lattice.g2, lattice.g3)
    b7 = b_table_seven(co7, n)
    return {i: abs(b5[i] - b7[i]) for i in range(-6, 7)}


# ---------------------------------------------------------------- Shohat-Favard


@dataclass
class Reconstruction:
    polys: list[EllipticPolynomial]
    consistency: float

    def coeff_matrix(self, width: int) -> np.ndarray:
        return np.array([pad(p.coeffs, width) for p in self.polys])


def shohat_favard_reconstruct(
    co5: FiveTermCoefficients,
    co7: SevenTermCoefficients,
    lambda1: float,
    N: int,
    lattice: TorusLattice,
    tol: float = 1e-5,
) -> Reconstruction:
    """Rebuild pi_0..pi_N from recurrence data alone.

    pi_0 = 1/sqrt(lambda1), pi_1 = 0; pi_2 and pi_3 come from the n = 0 instances
    of the five- and seven-term relations, every higher degree from the five-term
    relation.  The seven-term instances not used in the construction are then
    checked; their worst relative mismatch is the consistency residual.
    """
    if lambda1 <= 0:
        raise ValueError("lambda1 must be positive")
    if N < 3:
        raise InsufficientDegree("reconstruction needs N >= 3")
    g2, g3 = lattice.g2, lattice.g3
    width = len(degrees(N)) + 3
    P: dict[int, np.ndarray] = {1: np.zeros(width)}

    def pi(k):
        return P[k] if k >= 0 else np.zeros(width)

    P[0] = pad(np.array([1.0 / np.sqrt(lambda1)]), width)
    # wp pi_0 = a_1 pi_2 + c_0 pi_0  (b_1 pi_1 = 0)
    P[2] = (pad(mul_wp(P[0][:1]), width) - co5.C(0) * P[0]) / co5.A(1)
    # wp' pi_0 = p_3 pi_3 + q_2 pi_2 + s_0 pi_0  (r_1 pi_1 = 0)
    P[3] = (pad(mul_wpp(P[0][:1], g2, g3), width) - co7.Q(2) * P[2] - co7.S(0) * P[0]) / co7.P(3)
    for n in range(4, N + 1):
        j = n - 2
        rhs = pad(mul_wp(P[j][: pos(j) + 1]), width)
        for k in range(j - 2, j + 2):
            rhs = rhs - co5.m5(k, j) * pi(k)
        a = co5.m5(n, j)
        if a == 0.0:
            raise InconsistentCoefficients(f"a_{n - 1} vanishes")
        P[n] = rhs / a

    worst = 0.0
    for n in degrees(N):
        if n == 0 or n + 3 > N:
            continue
        lhs = pad(mul_wpp(P[n][: pos(n) + 1], g2, g3), width)
        rhs = sum(co7.m7(k, n) * pi(k) for k in range(n - 3, n + 4))
        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs))))
    if worst > tol:
        raise InconsistentCoefficients(
            f"seven-term relations violated by the reconstructed family (residual {worst:.2e})"
        )
    polys = [
        EllipticPolynomial(1, np.zeros(0)) if n == 1 else EllipticPolynomial(n, P[n][: pos(n) + 1])
        for n in range(N + 1)
    ]
    return Reconstruction(polys, worst)


def pentadiagonal(co: FiveTermCoefficients, size: int) -> np.ndarray:
    """Truncation J[j, k] = m5(j, k), j, k < size, with a_2 = b_1 = b_2 = 0 and c_1 = 1."""
    return np.array([[co.m5(j, k) for k in range(size)] for j in range(size)])
