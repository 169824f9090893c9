"""Specialisations for weights symmetric about (1 + tau)/2.

Such a weight makes wp even and wp' odd about the centre of gamma, so the family
splits into even members P_2k = sum_i a_i wp^i and odd members
P_2k+3 = -1/2 wp' sum_i a_i wp^i.  The even members are ordinary orthogonal
polynomials in the variable wp, which brings in Jacobi matrices, Gaussian
quadrature, Hankel determinants and Heine integrals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cd_kernel import _rows
from .eop import EOPFamily, pos
from .errors import (
    DimensionTooLarge,
    InvalidDegree,
    InversionFailure,
    NotSymmetric,
    RequiresUnityWeight,
)
from .quadrature import MomentTable, build_rule, eval_weight, hankel_matrix, lu_det
from .recurrence import FiveTermCoefficients, SevenTermCoefficients
from .weierstrass import TorusLattice, wp, wp_prime
from .zeros import find_gamma_zeros

PARITY_TOL = 1e-9
BISECTION_STEPS = 60
TENSOR_ORDER = {1: 96, 2: 96, 3: 48}


def _require_symmetric(fam: EOPFamily):
    if not fam.weight.symmetric:
        raise NotSymmetric(f"weight {fam.weight} is not symmetric about (1+tau)/2")


# ---------------------------------------------------------------- even/odd split


@dataclass(frozen=True)
class SplitFamily:
    """Monic coefficients in powers of wp: even[k][i] = a_{i,2k}, odd[k][i] = a_{i,2k+3}."""

    even: list[np.ndarray]
    odd: list[np.ndarray]
    leak: float


def split_family(fam: EOPFamily) -> SplitFamily:
    _require_symmetric(fam)
    even, odd, leak = [], [], 0.0
    for n in fam.members():
        c = fam.poly(n, monic=True).coeffs
        is_even = n % 2 == 0
        k = n // 2 if is_even else (n - 3) // 2
        mine = [pos(2 * i) for i in range(k + 1)] if is_even else [pos(2 * i + 3) for i in range(k + 1)]
        other = np.delete(c, mine)
        if other.size:
            leak = max(leak, float(np.max(np.abs(other)) / np.max(np.abs(c))))
        (even if is_even else odd).append(c[mine])
    if leak > PARITY_TOL:
        raise NotSymmetric(f"family does not split by parity (leak {leak:.2e})")
    return SplitFamily(even, odd, leak)


def three_term_check(fam: EOPFamily, co: FiveTermCoefficients, n: int, z) -> np.ndarray:
    """|wp pi_n - (a_{n+1} pi_{n+2} + c_n pi_n + a_{n-1} pi_{n-2})|."""
    _require_symmetric(fam)
    if n < 0 or n == 1 or n + 2 > fam.N:
        raise InvalidDegree("need n != 1 and n + 2 <= N")
    z = np.asarray(z, dtype=complex)
    V = fam.values(z)
    low = co.m5(n - 2, n) * V[n - 2] if n >= 2 else 0.0
    return np.abs(wp(fam.lattice, z) * V[n] - co.m5(n + 2, n) * V[n + 2] - co.m5(n, n) * V[n] - low)


def four_term_check(fam: EOPFamily, co: SevenTermCoefficients, n: int, z) -> np.ndarray:
    """|wp' pi_n - (p_{n+3} pi_{n+3} + r_{n+1} pi_{n+1} + r_n pi_{n-1} + p_n pi_{n-3})|."""
    _require_symmetric(fam)
    if n < 0 or n == 1 or n + 3 > fam.N:
        raise InvalidDegree("need n != 1 and n + 3 <= N")
    z = np.asarray(z, dtype=complex)
    V = fam.values(z)
    rhs = co.P(n + 3) * V[n + 3] + co.R(n + 1) * V[n + 1]
    if n >= 1:
        rhs = rhs + co.R(n) * V[n - 1]
    if n >= 3:
        rhs = rhs + co.P(n) * V[n - 3]
    return np.abs(wp_prime(fam.lattice, z) * V[n] - rhs)


# ---------------------------------------------------------------- Jacobi matrices


@dataclass(frozen=True)
class JacobiMatrix:
    beta: np.ndarray
    alpha: np.ndarray
    family: str = "even"

    @property
    def size(self) -> int:
        return len(self.beta)

    def dense(self) -> np.ndarray:
        return np.diag(self.beta) + np.diag(self.alpha, 1) + np.diag(self.alpha, -1)


def family_degrees(family: str, n: int) -> list[int]:
    return [2 * k for k in range(n)] if family == "even" else [2 * k + 3 for k in range(n)]


def build_jacobi(co: FiveTermCoefficients, n: int, family: str = "even") -> JacobiMatrix:
    """n x n Jacobi matrix of the even (pi_0, pi_2, ...) or odd (pi_3, pi_5, ...) members."""
    if n < 1:
        raise InvalidDegree("Jacobi matrix needs n >= 1")
    degs = family_degrees(family, n)
    beta = np.array([co.C(d) for d in degs])
    alpha = np.array([co.A(d + 1) for d in degs[:-1]])
    return JacobiMatrix(beta, alpha, family)


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    vectors: np.ndarray
    min_gap: float


def jacobi_spectrum(J: JacobiMatrix) -> Spectrum:
    vals, vecs = scipy.linalg.eigh_tridiagonal(J.beta, J.alpha, lapack_driver="stev")
    gap = float(np.min(np.diff(vals))) if len(vals) > 1 else math.inf
    return Spectrum(vals, vecs, gap)


def interlacing_check(outer: Spectrum, inner: Spectrum) -> tuple[bool, float]:
    """Strict interlacing of the n - 1 eigenvalues of J_{n-1} inside those of J_n."""
    a, b = outer.values, inner.values
    if len(a) != len(b) + 1:
        raise InvalidDegree("spectra must have sizes n and n - 1")
    if len(b) == 0:
        return True, math.inf
    margin = float(min(np.min(b - a[:-1]), np.min(a[1:] - b)))
    return margin > 0, margin


def zero_values(fam: EOPFamily, n: int) -> np.ndarray:
    """Sorted wp-values of the zeros of pi_2n lying on the half contour t in [0, 1/2]."""
    zs = find_gamma_zeros(fam, 2 * n)
    t = np.array([s for s in zs.gamma_zeros if s <= 0.5])
    return np.sort(np.real(wp(fam.lattice, 0.5j * fam.lattice.tau_im + t)))


# ---------------------------------------------------------------- Christoffel weights


def invert_wp(L: TorusLattice, value: float) -> complex:
    """The point tau/2 + t, t in [0, 1/2], with wp = value (wp increases from e3 to e2)."""
    lo, hi = 0.0, 0.5
    f = lambda t: float(np.real(wp(L, 0.5j * L.tau_im + t))) - value
    flo, fhi = f(lo), f(hi)
    slack = 1e-10 * max(1.0, abs(value))
    if flo > slack or fhi < -slack:
        raise InversionFailure(f"{value} is outside [wp(tau/2), wp((1+tau)/2)] = [{L.e3}, {L.e2}]")
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5j * L.tau_im + 0.5 * (lo + hi)


@dataclass(frozen=True)
class DiscreteMeasure:
    atoms: np.ndarray
    masses: np.ndarray
    degrees: tuple[int, ...]

    def gram(self, fam: EOPFamily) -> np.ndarray:
        """sum_k lambda_k pi_i(z_k) pi_j(z_k) over the member degrees."""
        V = _rows(fam, self.atoms)[list(self.degrees)]
        return (V * self.masses) @ V.T


def christoffel_weights(J: JacobiMatrix, fam: EOPFamily, spectrum: Spectrum | None = None) -> DiscreteMeasure:
    """Atoms at the zeros of the next even member and masses 1 / ||v_k||^2."""
    if J.family != "even":
        raise InvalidDegree("Christoffel weights are built for the even family")
    spectrum = spectrum or jacobi_spectrum(J)
    atoms = np.array([invert_wp(fam.lattice, v) for v in spectrum.values])
    degs = tuple(family_degrees("even", J.size))
    V = _rows(fam, atoms)[list(degs)]
    masses = 1.0 / np.sum(V**2, axis=0)
    return DiscreteMeasure(atoms, masses, degs)


# ---------------------------------------------------------------- Heine formulas


def nuhat_from_nu(nu: np.ndarray, g2: float, g3: float) -> np.ndarray:
    """nuhat_k = nu_{k+3} - g2/4 nu_{k+1} - g3/4 nu_k, from wp'^2/4 = wp^3 - g2/4 wp - g3/4."""
    k = np.arange(len(nu) - 3)
    return nu[k + 3] - 0.25 * g2 * nu[k + 1] - 0.25 * g3 * nu[k]


def determinant_form(mom: MomentTable, k: int, z, L: TorusLattice, mode: str = "even") -> np.ndarray:
    """Monic P_2k (mode even) or P_2k+3 (mode odd) as a bordered Hankel determinant."""
    m = mom.nu if mode == "even" else mom.nuhat
    if 2 * k > len(m) - 1:
        raise InvalidDegree("moment table too short")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    p = np.real(wp(L, z))
    lead = np.ones_like(p) if mode == "even" else -0.5 * np.real(wp_prime(L, z))
    top = np.array([[m[i + j] for j in range(k + 1)] for i in range(k)]).reshape(k, k + 1)
    denom = lu_det(hankel_matrix(m, k))
    out = np.empty(len(z))
    for idx in range(len(z)):
        last = lead[idx] * p[idx] ** np.arange(k + 1)
        out[idx] = lu_det(np.vstack([top, last])) / denom
    return out


def _tensor(L: TorusLattice, k: int, order: int):
    rule = build_rule(L, order)
    grids = np.meshgrid(*([rule.nodes] * k), indexing="ij")
    wts = np.meshgrid(*([rule.weights] * k), indexing="ij")
    X = np.array([g.ravel() for g in grids])
    W = np.prod(np.array([w.ravel() for w in wts]), axis=0)
    return X, W


def _vandermonde_sq(P: np.ndarray) -> np.ndarray:
    out = np.ones(P.shape[1])
    for i, j in itertools.combinations(range(P.shape[0]), 2):
        out = out * (P[j] - P[i]) ** 2
    return out


def heine_integral(fam: EOPFamily, mom: MomentTable, k: int, z, mode: str = "even",
                   order: int | None = None) -> np.ndarray:
    """k-fold Heine integral for monic P_2k or P_2k+3 by tensor Gauss-Legendre."""
    if k > 2:
        raise DimensionTooLarge("tensor Heine integrals are limited to k <= 2")
    L = fam.lattice
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    pz = np.real(wp(L, z))
    if mode == "even":
        lead, delta = np.ones(len(z)), mom.hankel[k]
        const = 1.0
    else:
        lead, delta = np.real(wp_prime(L, z)), lu_det(hankel_matrix(mom.nuhat, k))
        const = (-0.5) ** (2 * k + 1)
    if k == 0:
        return const * lead
    X, W = _tensor(L, k, order or TENSOR_ORDER[k])
    P = np.real(wp(L, X))
    wv = np.prod(eval_weight(fam.weight, L, X), axis=0)
    if mode == "odd":
        wv = wv * np.prod(np.real(wp_prime(L, X)) ** 2, axis=0)
    base = W * _vandermonde_sq(P) * wv
    vals = np.array([np.dot(base, np.prod(pz[i] - P, axis=0)) for i in range(len(z))])
    return const * lead * vals / (math.factorial(k) * delta)


@dataclass(frozen=True)
class HeineReport:
    k: int
    mode: str
    gs_vs_det: float
    gs_vs_integral: float | None
    det_vs_integral: float | None


def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def heine_verify(fam: EOPFamily, mom: MomentTable, k: int, mode: str = "even",
                 points: int = 10, integral: bool = True) -> HeineReport:
    """Compare Gram-Schmidt, determinant and (k <= 2) integral forms of P_2k / P_2k+3."""
    _require_symmetric(fam)
    if mode not in ("even", "odd"):
        raise InvalidDegree("mode is 'even' or 'odd'")
    if k > 4:
        raise DimensionTooLarge("determinant comparison is limited to k <= 4")
    if integral and k > 2:
        raise DimensionTooLarge("integral comparison is limited to k <= 2")
    n = 2 * k if mode == "even" else 2 * k + 3
    if n > fam.N:
        raise InvalidDegree(f"degree {n} exceeds the family")
    L = fam.lattice
    z = 0.5j * L.tau_im + (np.arange(points) + 0.37) / points
    gs = np.real(fam.poly(n, monic=True)(L, z)) if n != 0 else np.ones(points)
    det = determinant_form(mom, k, z, L, mode)
    report = HeineReport(k, mode, _rel(det, gs), None, None)
    if integral:
        hi = heine_integral(fam, mom, k, z, mode)
        report = HeineReport(k, mode, report.gs_vs_det, _rel(hi, gs), _rel(hi, det))
    return report


# ---------------------------------------------------------------- even CD kernel, partition function


def even_members(n: int) -> list[int]:
    return [2 * i for i in range(n)]


def even_kernel_sum(fam: EOPFamily, n: int, x, y):
    _require_symmetric(fam)
    L = fam.lattice
    x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    idx = even_members(n)
    s = np.sum(_rows(fam, x)[idx] * _rows(fam, y)[idx], axis=0)
    return np.sqrt(eval_weight(fam.weight, L, x) * eval_weight(fam.weight, L, y)) * s


def even_cd_kernel(fam: EOPFamily, co: FiveTermCoefficients, n: int, x, y):
    """alpha_n sqrt(w(x) w(y)) [pi_2n(x) pi_2n-2(y) - pi_2n(y) pi_2n-2(x)] / (wp(x) - wp(y)), alpha_n = a_{2n-1}."""
    _require_symmetric(fam)
    if n < 1 or 2 * n > fam.N:
        raise InvalidDegree("need 1 <= n and 2n <= N")
    L = fam.lattice
    X, Y = _rows(fam, x), _rows(fam, y)
    num = X[2 * n] * Y[2 * n - 2] - Y[2 * n] * X[2 * n - 2]
    gap = np.real(wp(L, x) - wp(L, y))
    sw = np.sqrt(eval_weight(fam.weight, L, x) * eval_weight(fam.weight, L, y))
    return co.A(2 * n - 1) * sw * num / gap


def partition_function(fam: EOPFamily, n: int, method: str = "quadrature") -> float:
    """Z_n = int_{gamma^n} prod |wp(x_i) - wp(x_j)|^2 prod w(x_i) dx.

    `quadrature` evaluates the n-fold integral; `norms` uses Z_n = n! prod_{i<n} h_2i.
    """
    _require_symmetric(fam)
    if n < 1:
        raise InvalidDegree("n >= 1")
    if method == "norms":
        if 2 * (n - 1) > fam.N:
            raise InvalidDegree("family too short")
        return float(math.factorial(n) * np.prod([fam.h[2 * i] for i in range(n)]))
    if n > 3:
        raise DimensionTooLarge("quadrature partition function is limited to n <= 3")
    L = fam.lattice
    X, W = _tensor(L, n, TENSOR_ORDER[n])
    P = np.real(wp(L, X))
    wv = np.prod(eval_weight(fam.weight, L, X), axis=0)
    return float(np.dot(W, _vandermonde_sq(P) * wv))


def determinantal_identity(fam: EOPFamily, points, Z: float) -> float:
    """Relative gap between (1/n!) det[K_n(x_i, x_j)] and prod |dwp|^2 prod w / Z_n."""
    pts = np.asarray(points, dtype=complex)
    n = len(pts)
    K = even_kernel_sum(fam, n, pts[:, None], pts[None, :])
    lhs = np.linalg.det(K) / math.factorial(n)
    L = fam.lattice
    P = np.real(wp(L, pts))[:, None]
    rhs = float(_vandermonde_sq(P)[0] * np.prod(eval_weight(fam.weight, L, pts)) / Z)
    return float(abs(lhs - rhs) / abs(rhs))


# ---------------------------------------------------------------- derivative expansion


@dataclass(frozen=True)
class DerivativeExpansion:
    n: int
    coeffs: dict[int, float]
    reconstruction: float


def curious_identity_check(fam: EOPFamily, n: int, points: int = 20) -> DerivativeExpansion:
    """Expand pi_n' in pi_0..pi_{n+1} (unit weight); only j = n-1, n, n+1 survive."""
    if not fam.weight.is_unity:
        raise RequiresUnityWeight("the derivative expansion needs w = 1")
    if n < 0 or n == 1 or n + 1 > fam.N:
        raise InvalidDegree("need n != 1 and n + 1 <= N")
    rule = fam.rule
    D = _rows(fam, rule.nodes, 1)[n]
    V = _rows(fam, rule.nodes)
    js = [j for j in range(n + 2) if j != 1]
    coeffs = {j: float(np.dot(rule.weights, D * V[j])) for j in js}
    z = 0.5j * fam.lattice.tau_im + (np.arange(points) + 0.5) / points
    Dz, Vz = _rows(fam, z, 1)[n], _rows(fam, z)
    recon = sum(coeffs[j] * Vz[j] for j in js if j >= n - 1)
    return DerivativeExpansion(n, coeffs, float(np.max(np.abs(Dz - recon))))
