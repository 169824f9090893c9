"""Riemann-Hilbert solution built from the monic family and weighted Cauchy
transforms on gamma.

    C_w(p)(z) = 1/(2 pi i) int_gamma p(s) w(s) (zeta(s - z) - zeta(s)) ds

    Y_n = [[P_n,                    C_w(P_n)              ],
           [2 pi i / h_{n-1} P_{n-1}, 2 pi i / h_{n-1} C_w(P_{n-1})]]

Evaluation splits zeta(s - z) = pi cot(pi (s - z)) + 2 eta1 (s - z) + smooth(s - z).
The smooth remainder is integrated with the family's Gauss-Legendre rule.  The
cotangent part is integrated exactly against the Fourier series of p w along
gamma, which stays accurate however close z comes to the contour.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eop import EllipticPolynomial, EOPFamily
from .errors import InvalidDegree, NearConfluent, TooCloseToContour
from .quadrature import QuadratureRule, eval_weight
from .recurrence import FiveTermCoefficients
from .weierstrass import wp, zeta_smooth_part, zeta_w

CONTOUR_GUARD = 1e-6
FOURIER_SAMPLES = 512


class CauchyEvaluator:
    """Cached evaluator of C_w(p) for one polynomial p."""

    def __init__(self, fam: EOPFamily, p: EllipticPolynomial, rule: QuadratureRule | None = None,
                 samples: int = FOURIER_SAMPLES):
        self.fam = fam
        self.L = L = fam.lattice
        self.rule = rule or fam.rule
        s = self.rule.nodes
        self.f_nodes = np.real(p(L, s)) * eval_weight(fam.weight, L, s)
        self.zeta_nodes = zeta_w(L, s)
        t = np.arange(samples) / samples
        s_eq = 0.5j * L.tau_im + t
        f_eq = np.real(p(L, s_eq)) * eval_weight(fam.weight, L, s_eq)
        fhat = np.fft.fft(f_eq) / samples
        half = samples // 2
        self.f0 = fhat[0]
        self.f_pos = fhat[1:half]          # coefficients of e^{2 pi i m t}, m >= 1
        self.f_neg = fhat[-1:-half:-1]     # coefficients of e^{-2 pi i m t}, m >= 1
        self.m = np.arange(1, half)
        self.total = float(np.dot(self.rule.weights, self.f_nodes))

    def _cot_integral(self, u: complex) -> complex:
        """int_0^1 f(t) pi cot(pi (tau/2 + t - u)) dt via the Fourier series of f."""
        c = 0.5j * self.L.tau_im - u
        if c.imag > 0:
            e = np.exp(2j * np.pi * self.m * c)
            return np.pi * (-1j * self.f0 - 2j * np.dot(self.f_neg, e))
        e = np.exp(-2j * np.pi * self.m * c)
        return np.pi * (1j * self.f0 + 2j * np.dot(self.f_pos, e))

    def _scalar(self, z: complex) -> complex:
        L = self.L
        k = np.floor(z.imag / L.tau_im)
        u = z - 1j * L.tau_im * k
        if abs(u.imag - 0.5 * L.tau_im) < CONTOUR_GUARD:
            raise TooCloseToContour("z lies within 1e-6 of gamma")
        v = self.rule.nodes - u
        regular = np.dot(
            self.rule.weights,
            self.f_nodes * (2.0 * L.eta1 * v + zeta_smooth_part(L, v) - self.zeta_nodes),
        )
        value = (regular + self._cot_integral(u)) / (2j * np.pi)
        return value - 2.0 * k * L.eta_tau * self.total / (2j * np.pi)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.array([self._scalar(complex(v)) for v in z.ravel()]).reshape(z.shape)
        return out[()] if out.ndim == 0 else out


def cauchy_transform(fam: EOPFamily, rule: QuadratureRule | None, p: EllipticPolynomial, z):
    if p.degree == 1 or not np.any(p.coeffs):
        return np.zeros_like(np.asarray(z, dtype=complex))[()]
    return CauchyEvaluator(fam, p, rule)(z)


@dataclass
class RHSolution:
    fam: EOPFamily
    n: int
    P_n: EllipticPolynomial
    P_m: EllipticPolynomial
    C_n: CauchyEvaluator
    C_m: CauchyEvaluator
    scale: complex = field(init=False)

    def __post_init__(self):
        self.scale = 2j * np.pi / self.fam.h[self.n - 1]

    def __call__(self, z) -> np.ndarray:
        """Y_n(z) as an array of shape (2, 2, *z.shape)."""
        z = np.asarray(z, dtype=complex)
        L = self.fam.lattice
        return np.array([
            [self.P_n(L, z), self.C_n(z)],
            [self.scale * self.P_m(L, z), self.scale * self.C_m(z)],
        ])

    def first_column(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        L = self.fam.lattice
        return np.array([self.P_n(L, z), self.scale * self.P_m(L, z)])


def assemble_Y(fam: EOPFamily, n: int, rule: QuadratureRule | None = None) -> RHSolution:
    if n < 3 or n > fam.N:
        raise InvalidDegree(f"Y_n needs 3 <= n <= N, got n={n}")
    P_n, P_m = fam.poly(n, monic=True), fam.poly(n - 1, monic=True)
    return RHSolution(fam, n, P_n, P_m, CauchyEvaluator(fam, P_n, rule), CauchyEvaluator(fam, P_m, rule))


def det_Y(Y: RHSolution, z):
    M = Y(z)
    return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]


def det_constant(Y: RHSolution, z) -> np.ndarray:
    """det Y_n(z) - wp(z) at each z (should not depend on z)."""
    return det_Y(Y, z) - wp(Y.fam.lattice, z)


def jump_residual(Y: RHSolution, x: float, eps: float) -> float:
    """|| Y(x + i eps) - Y(x - i eps) [[1, w(x)], [0, 1]] || at gamma point tau/2 + x."""
    L = Y.fam.lattice
    z = 0.5j * L.tau_im + x
    w = float(eval_weight(Y.fam.weight, L, z))
    plus, minus = Y(z + 1j * eps), Y(z - 1j * eps)
    J = np.array([[1.0, w], [0.0, 1.0]])
    return float(np.linalg.norm(plus - minus @ J))


def asymptotic_defect(Y: RHSolution, z) -> float:
    """|| Y_n(z) diag(z^n, z^{-(n-2)}) - I || for small z."""
    M = Y(complex(z)) @ np.diag([z**Y.n, z ** (-(Y.n - 2))])
    return float(np.linalg.norm(M - np.eye(2)))


def contour_closure(C: CauchyEvaluator, centre: complex, radius: float, points: int = 64) -> float:
    """|oint C(z) dz| over a circle (trapezoidal rule, spectrally accurate)."""
    th = 2.0 * np.pi * np.arange(points) / points
    z = centre + radius * np.exp(1j * th)
    dz = 1j * radius * np.exp(1j * th) * (2.0 * np.pi / points)
    return float(abs(np.sum(C(z) * dz)))


# ---------------------------------------------------------------- CD identity


def _adj_row2_times_col1(Yy: np.ndarray, Yx: np.ndarray) -> complex:
    """(0 1) adj(Y(y)) Y(x) (1 0)^T = -Y21(y) Y11(x) + Y11(y) Y21(x)."""
    return -Yy[1] * Yx[0] + Yy[0] * Yx[1]


def cd_rhp_value(fam: EOPFamily, co: FiveTermCoefficients, n: int, x: complex, y: complex,
                 weighted_prefactors: bool = False) -> complex:
    """Khat_n(x, y) assembled from products adj(Y_m(y)) Y_{m+1}(x).

    Only first columns enter, so no Cauchy transforms are needed.  The default
    prefactors are the ones that reproduce the closed form exactly;
    `weighted_prefactors` switches to a_{n-1} h_{n-2}, a_{n-2} h_{n-3} and
    b_{n-1} h_{n-1} over 2 pi i for comparison.
    """
    if n < 5 or n > fam.N:
        raise InvalidDegree(f"needs 5 <= n <= N, got n={n}")
    L = fam.lattice
    gap = wp(L, x) - wp(L, y)
    if abs(gap) < 1e-4:
        raise NearConfluent("wp(x) and wp(y) too close")
    Y = {m: assemble_first_columns(fam, m) for m in (n - 2, n - 1, n)}
    col = {(m, z): Y[m](z) for m in Y for z in (x, y)}
    M1 = _adj_row2_times_col1(col[n - 1, y], col[n, x]) - _adj_row2_times_col1(col[n - 1, x], col[n, y])
    M2 = _adj_row2_times_col1(col[n - 2, y], col[n - 1, x]) - _adj_row2_times_col1(col[n - 2, x], col[n - 1, y])
    M3 = _adj_row2_times_col1(col[n - 1, y], col[n - 1, x])
    h = fam.h
    if weighted_prefactors:
        k1, k2, k3 = co.A(n - 1) * h[n - 2], co.A(n - 2) * h[n - 3], co.B(n - 1) * h[n - 1]
    else:
        k1, k2, k3 = -1.0, -1.0, -co.B(n - 1) * np.sqrt(h[n - 2] / h[n - 1])
    return (k1 * M1 + k2 * M2 + k3 * M3) / (2j * np.pi * gap)


def assemble_first_columns(fam: EOPFamily, m: int):
    """z -> (P_m(z), 2 pi i / h_{m-1} P_{m-1}(z)), the Cauchy-free part of Y_m."""
    L = fam.lattice
    P_m, P_l = fam.poly(m, monic=True), fam.poly(m - 1, monic=True)
    s = 2j * np.pi / fam.h[m - 1]
    return lambda z: np.array([P_m(L, z), s * P_l(L, z)])


def cd_rhp_identity(fam: EOPFamily, co: FiveTermCoefficients, n: int, x: float, y: float,
                    eps: float = 1e-4, levels: int = 2, weighted_prefactors: bool = False) -> float:
    """|Khat_n(x, y) - RHS| with x, y gamma parameters.

    Boundary values are taken from above at offsets eps, eps/2, ..., eps/2^levels
    and combined in a Richardson table (each level removes one power of eps).
    """
    from .cd_kernel import CDKernel, kernel_sum

    L = fam.lattice
    zx, zy = 0.5j * L.tau_im + x, 0.5j * L.tau_im + y
    table = [
        cd_rhp_value(fam, co, n, zx + 1j * e, zy + 1j * e, weighted_prefactors)
        for e in eps / 2.0 ** np.arange(levels + 1)
    ]
    for k in range(1, levels + 1):
        table = [(2**k * table[i + 1] - table[i]) / (2**k - 1) for i in range(len(table) - 1)]
    return float(abs(kernel_sum(CDKernel(fam, n, co), zx, zy) - table[0]))
