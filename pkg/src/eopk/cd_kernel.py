"""Christoffel-Darboux kernel on gamma and the associated determinantal kernel.

    Khat_n(x, y) = sum_{j <= n-2} pi_j(x) pi_j(y)

The closed form follows from the five-term relation: only the pairs (n, n-2),
(n-1, n-3) and (n-1, n-2) straddle the truncation, so

    (wp(x) - wp(y)) Khat_n(x, y) =   a_{n-1} [pi_n, pi_{n-2}](x, y)
                                   + a_{n-2} [pi_{n-1}, pi_{n-3}](x, y)
                                   + b_{n-1} [pi_{n-1}, pi_{n-2}](x, y)

with [f, g](x, y) = f(x) g(y) - f(y) g(x).  Letting y -> x once (or twice where
wp' vanishes) gives the confluent and degenerate forms.

The correlation kernel K_n(x, y) = sqrt(w(x) w(y)) Khat_{n+1}(x, y) is a
projection whose rank is the number of family members of degree <= n - 1,
because pi_1 vanishes identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eop import EOPFamily, degrees
from .errors import (
    DegeneratePoint,
    DuplicatePoints,
    InvalidDegree,
    NearConfluent,
    NotDegenerate,
)
from .quadrature import QuadratureRule, _on_contour, eval_weight
from .recurrence import FiveTermCoefficients, extract_five_term, pentadiagonal
from .weierstrass import wp, wp_prime, wp_second

SWITCH_THRESHOLD = 1e-4
DEGENERATE_WP_PRIME = 1e-8
HALF_PERIOD_TOL = 1e-10


def member_count(n: int) -> int:
    """Number of nonzero members among pi_0, ..., pi_{n-1}."""
    return len(degrees(n - 1)) if n >= 1 else 0


def members_below(n: int) -> list[int]:
    """Degrees j <= n - 2 summed in Khat_n."""
    return degrees(n - 2) if n >= 2 else []


@dataclass
class CDKernel:
    fam: EOPFamily
    n: int
    coeffs: FiveTermCoefficients | None = None
    diagnostics: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 2 or self.n > self.fam.N:
            raise InvalidDegree(f"kernel degree must lie in 2..{self.fam.N}, got {self.n}")
        if self.coeffs is None and self.fam.N >= 4:
            self.coeffs = extract_five_term(self.fam)

    def _coef(self):
        if self.n < 4:
            raise InvalidDegree("the closed form needs n >= 4")
        co = self.coeffs
        return co.A(self.n - 1), co.A(self.n - 2), co.B(self.n - 1)


def _rows(fam: EOPFamily, z, deriv: int = 0) -> np.ndarray:
    return fam.values(_on_contour(fam.lattice, z), deriv).real


def _out(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def kernel_sum(K: CDKernel, x, y):
    idx = members_below(K.n)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    X = _rows(K.fam, x)[idx]
    Y = _rows(K.fam, y)[idx]
    return _out(np.sum(X * Y, axis=0))


def _numerator(K: CDKernel, X: np.ndarray, Y: np.ndarray):
    n = K.n
    a1, a2, b1 = K._coef()

    def br(f, g):
        return X[f] * Y[g] - Y[f] * X[g]

    return a1 * br(n, n - 2) + a2 * br(n - 1, n - 3) + b1 * br(n - 1, n - 2)


def kernel_cd(K: CDKernel, x, y):
    """Closed form; raises NearConfluent where |wp(x) - wp(y)| < 1e-4."""
    L = K.fam.lattice
    gap = np.real(wp(L, x) - wp(L, y))
    if np.any(np.abs(gap) < SWITCH_THRESHOLD):
        raise NearConfluent("wp(x) and wp(y) too close for the closed form")
    return _out(_numerator(K, _rows(K.fam, x), _rows(K.fam, y)) / gap)


def _wronskian_bracket(K: CDKernel, V: np.ndarray, D: np.ndarray):
    """Sum of coefficient * (f' g - f g') over the three brackets."""
    n = K.n
    a1, a2, b1 = K._coef()

    def w(f, g):
        return D[f] * V[g] - V[f] * D[g]

    return a1 * w(n, n - 2) + a2 * w(n - 1, n - 3) + b1 * w(n - 1, n - 2)


def kernel_confluent(K: CDKernel, x):
    """Khat_n(x, x) from the first derivatives: bracket / wp'(x)."""
    L = K.fam.lattice
    d = np.real(wp_prime(L, x))
    if np.any(np.abs(d) <= DEGENERATE_WP_PRIME):
        raise DegeneratePoint("wp'(x) vanishes here; use kernel_degenerate")
    V, D = _rows(K.fam, x), _rows(K.fam, x, 1)
    return _out(_wronskian_bracket(K, V, D) / d)


def _half_period_check(K: CDKernel, x):
    L = K.fam.lattice
    x = complex(x)
    targets = (0.5j * L.tau_im, 0.5 + 0.5j * L.tau_im, 1.0 + 0.5j * L.tau_im)
    if min(abs(x - t) for t in targets) > HALF_PERIOD_TOL:
        raise NotDegenerate("x is not a half period on gamma")
    return x


def kernel_degenerate(K: CDKernel, x) -> float:
    """Khat_n(x, x) where wp'(x) = 0: second-derivative bracket / wp''(x)."""
    x = _half_period_check(K, x)
    V, D2 = _rows(K.fam, x, 0), _rows(K.fam, x, 2)
    return float(_wronskian_bracket(K, V, D2) / np.real(wp_second(K.fam.lattice, x)))


def swapped_bracket_ratio(K: CDKernel, x) -> float:
    """Ratio of the degenerate-point bracket with f g'' - f'' g on the a-terms and
    f'' g - f g'' on the b-term, over wp'', to Khat_n(x, x) from the sum.

    This orientation is -1 times the correct one on the a-terms, so the ratio is
    -1 for symmetric weights (b = 0) and varies with n otherwise."""
    x = _half_period_check(K, x)
    n = K.n
    a1, a2, b1 = K._coef()
    V, D2 = _rows(K.fam, x, 0), _rows(K.fam, x, 2)
    lit = (
        a1 * (V[n] * D2[n - 2] - D2[n] * V[n - 2])
        + a2 * (V[n - 1] * D2[n - 3] - D2[n - 1] * V[n - 3])
        + b1 * (D2[n - 1] * V[n - 2] - V[n - 1] * D2[n - 2])
    ) / np.real(wp_second(K.fam.lattice, x))
    return float(lit / kernel_sum(K, x, x))


def kernel(K: CDKernel, x, y) -> float:
    """Scalar dispatcher: closed form away from the diagonal, confluent or
    degenerate form on it, direct sum at mirror pairs where wp(x) = wp(y), x != y."""
    L = K.fam.lattice
    x, y = complex(x), complex(y)
    if abs(np.real(wp(L, x) - wp(L, y))) >= SWITCH_THRESHOLD:
        return float(kernel_cd(K, x, y))
    if abs(x - y) < 1e-12:
        try:
            return float(kernel_confluent(K, x))
        except DegeneratePoint:
            K.diagnostics.append("degenerate point: second-derivative form used")
            return kernel_degenerate(K, x)
    K.diagnostics.append("near-confluent pair: direct sum used")
    return float(kernel_sum(K, x, y))


# ---------------------------------------------------------------- DPP kernel


def correlation_kernel(fam: EOPFamily, n: int, x, y):
    """K_n(x, y) = sqrt(w(x) w(y)) Khat_{n+1}(x, y)."""
    if n < 1 or n + 1 > fam.N:
        raise InvalidDegree(f"need 1 <= n and n + 1 <= N, got n={n}")
    idx = degrees(n - 1)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    X, Y = _rows(fam, x)[idx], _rows(fam, y)[idx]
    L = fam.lattice
    return _out(np.sqrt(eval_weight(fam.weight, L, x) * eval_weight(fam.weight, L, y)) * np.sum(X * Y, axis=0))


def kernel_for_points(m: int) -> int:
    """Index n such that K_n has rank m (the first m members)."""
    if m < 1:
        raise InvalidDegree("need at least one point")
    return 1 if m == 1 else m + 1


def trace(fam: EOPFamily, n: int, rule: QuadratureRule | None = None) -> float:
    rule = rule or fam.rule
    return float(np.dot(rule.weights, correlation_kernel(fam, n, rule.nodes, rule.nodes)))


def reproducing_residual(fam: EOPFamily, n: int, x, y, rule: QuadratureRule | None = None) -> float:
    """|int K_n(x, s) K_n(s, y) ds - K_n(x, y)|."""
    rule = rule or fam.rule
    s = rule.nodes
    lhs = np.dot(rule.weights, correlation_kernel(fam, n, x, s) * correlation_kernel(fam, n, s, y))
    return float(abs(lhs - correlation_kernel(fam, n, x, y)))


def kernel_matrix(fam: EOPFamily, n: int, points) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    return correlation_kernel(fam, n, pts[:, None], pts[None, :])


def gram_determinant(fam: EOPFamily, n: int, points) -> float:
    return float(np.linalg.det(kernel_matrix(fam, n, points)))


def square_determinant(fam: EOPFamily, points) -> float:
    """(det[sqrt(w(x_j)) pi_k(x_j)])^2 with k over the first len(points) members."""
    pts = np.asarray(points, dtype=complex)
    m = len(pts)
    idx = degrees(m)[:m]
    V = _rows(fam, pts)[idx] * np.sqrt(eval_weight(fam.weight, fam.lattice, pts))
    return float(np.linalg.det(V) ** 2)


def joint_pdf(fam: EOPFamily, points) -> float:
    """(1/m!) det[K(x_i, x_j)] for m distinct points, K the rank-m kernel."""
    pts = np.asarray(points, dtype=complex)
    m = len(pts)
    if len(set(np.round(pts, 14).tolist())) < m:
        raise DuplicatePoints("joint density needs distinct points")
    return gram_determinant(fam, kernel_for_points(m), pts) / math.factorial(m)


def spectral_residual(co: FiveTermCoefficients, fam: EOPFamily, n: int, x0) -> float:
    """||J_{n,n+1} v - wp(x0) P v|| with v = (pi_0, ..., pi_n)(x0), x0 a zero of pi_{n+1}."""
    J = pentadiagonal(co, n + 1)[:n, :]
    v = _rows(fam, x0)[: n + 1]
    return float(np.linalg.norm(J @ v - np.real(wp(fam.lattice, x0)) * v[:n]))


def correlation_grid(fam: EOPFamily, n: int, t) -> np.ndarray:
    """K_n on the gamma parameters t x t, exactly symmetric.

    Off-diagonal entries use the closed form for Khat_{n+1} where wp(x) and
    wp(y) are separated, the diagonal uses the confluent form (degenerate form
    at half periods) and the remaining mirror pairs use the direct sum.
    """
    if n < 1 or n + 1 > fam.N:
        raise InvalidDegree(f"need 1 <= n and n + 1 <= N, got n={n}")
    L = fam.lattice
    t = np.asarray(t, dtype=float)
    z = 0.5j * L.tau_im + t
    V = _rows(fam, z)
    idx = members_below(n + 1)
    K = CDKernel(fam, n + 1)
    direct = V[idx].T @ V[idx]
    if K.n < 4:
        out = direct
    else:
        p = np.real(wp(L, z))
        gap = p[:, None] - p[None, :]
        far = np.abs(gap) >= SWITCH_THRESHOLD
        num = _numerator(K, V[:, :, None], V[:, None, :])
        out = np.where(far, num / np.where(far, gap, 1.0), direct)
        diag = np.empty(len(t))
        flat = np.abs(np.real(wp_prime(L, z))) <= DEGENERATE_WP_PRIME
        if np.any(~flat):
            diag[~flat] = kernel_confluent(K, z[~flat])
        for i in np.nonzero(flat)[0]:
            diag[i] = kernel_degenerate(K, z[i])
        np.fill_diagonal(out, diag)
    out = np.triu(out) + np.triu(out, 1).T
    sw = np.sqrt(eval_weight(fam.weight, L, z))
    return out * (sw[:, None] * sw[None, :])
