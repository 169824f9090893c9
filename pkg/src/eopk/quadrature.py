"""Integration over the A-cycle gamma = [tau/2, 1 + tau/2] and the weight DSL.

gamma is a horizontal unit segment, parameterised by t in (0, 1) with
z = tau/2 + t and dz = dt, so every integral here is a real Gauss-Legendre sum.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import OffContour, QuadratureNotConverged, ValidationError, WeightSyntaxError
from .weierstrass import TorusLattice, wp, wp_prime

DEFAULT_ORDER = 256
MAX_ORDER = 4096
IMAG_DISCARD = 1e-9


def precision_mode() -> str:
    mode = os.environ.get("EOPK_PRECISION", "double").strip().lower()
    if mode not in ("double", "dd"):
        raise ValidationError(f"EOPK_PRECISION must be 'double' or 'dd', got {mode!r}")
    return mode


def weighted_sum(weights, values) -> float:
    """sum(weights * values), compensated when EOPK_PRECISION=dd."""
    if precision_mode() == "dd":
        return math.fsum(np.asarray(weights * values, dtype=float).tolist())
    return float(np.dot(weights, values))


# ---------------------------------------------------------------- weights


@dataclass(frozen=True)
class WeightSpec:
    """Positive weight on gamma: unity, exp(alpha wp), exp(beta wp') or a product."""

    kind: str
    param: float = 0.0
    factors: tuple["WeightSpec", ...] = ()

    def __post_init__(self):
        if self.kind not in ("unity", "exp_p", "exp_pp", "prod"):
            raise WeightSyntaxError(f"unknown weight kind {self.kind!r}")
        if self.kind == "prod" and len(self.factors) < 2:
            raise WeightSyntaxError("prod needs at least two factors")
        if not math.isfinite(self.param):
            raise WeightSyntaxError("weight parameter must be finite")

    @property
    def symmetric(self) -> bool:
        # wp is even about (1+tau)/2 on gamma, wp' is odd
        if self.kind == "exp_pp":
            return self.param == 0.0
        if self.kind == "prod":
            return all(f.symmetric for f in self.factors)
        return True

    @property
    def is_unity(self) -> bool:
        if self.kind == "unity":
            return True
        if self.kind in ("exp_p", "exp_pp"):
            return self.param == 0.0
        return all(f.is_unity for f in self.factors)

    def to_dsl(self) -> str:
        if self.kind == "unity":
            return "unity"
        if self.kind == "prod":
            return "prod(" + ",".join(f.to_dsl() for f in self.factors) + ")"
        return f"{self.kind}:{self.param!r}"

    def __str__(self):
        return self.to_dsl()


Unity = WeightSpec("unity")


def ExpP(alpha: float) -> WeightSpec:
    return WeightSpec("exp_p", float(alpha))


def ExpPPrime(beta: float) -> WeightSpec:
    return WeightSpec("exp_pp", float(beta))


def Product(*factors: WeightSpec) -> WeightSpec:
    return WeightSpec("prod", factors=tuple(factors))


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def parse_weight(text: str) -> WeightSpec:
    """Parse `unity`, `exp_p:<a>`, `exp_pp:<b>`, `prod(<spec>,<spec>,...)`."""
    s = text.strip()
    if s == "unity":
        return Unity
    m = re.fullmatch(rf"(exp_p|exp_pp):({_NUM})", s)
    if m:
        return WeightSpec(m.group(1), float(m.group(2)))
    if s.startswith("prod(") and s.endswith(")"):
        inner = s[5:-1]
        parts, depth, start = [], 0, 0
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth < 0:
                    break
            elif ch == "," and depth == 0:
                parts.append(inner[start:i])
                start = i + 1
        if depth == 0:
            parts.append(inner[start:])
            return Product(*(parse_weight(p) for p in parts))
    raise WeightSyntaxError(f"cannot parse weight spec {text!r}")


def _on_contour(L: TorusLattice, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z.imag - 0.5 * L.tau_im) > 1e-12):
        raise OffContour("weight is only defined on gamma (Im z = tau_im / 2)")
    return z


def _log_weight(w: WeightSpec, L: TorusLattice, z):
    if w.kind == "unity":
        return np.zeros(z.shape)
    if w.kind == "exp_p":
        return w.param * np.real(wp(L, z)) if w.param else np.zeros(z.shape)
    if w.kind == "exp_pp":
        return w.param * np.real(wp_prime(L, z)) if w.param else np.zeros(z.shape)
    return sum(_log_weight(f, L, z) for f in w.factors)


def eval_weight(w: WeightSpec, L: TorusLattice, z):
    z = _on_contour(L, z)
    out = np.exp(_log_weight(w, L, z))
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------- rules


@dataclass(frozen=True)
class QuadratureRule:
    t: np.ndarray
    weights: np.ndarray
    nodes: np.ndarray
    order: int

    def shuffled(self, seed: int = 0) -> "QuadratureRule":
        """Same rule with node order permuted (summation-order sensitivity checks)."""
        perm = np.random.default_rng(seed).permutation(self.order)
        return QuadratureRule(self.t[perm], self.weights[perm], self.nodes[perm], self.order)


def build_rule(L: TorusLattice, N: int = DEFAULT_ORDER) -> QuadratureRule:
    if N < 4:
        raise ValidationError("quadrature order must be >= 4")
    x, wts = np.polynomial.legendre.leggauss(N)
    t = 0.5 * (x + 1.0)
    return QuadratureRule(t, 0.5 * wts, 0.5j * L.tau_im + t, N)


@dataclass
class ResidueLog:
    """Imaginary parts discarded from real-valued integrals."""

    count: int = 0
    max_residue: float = 0.0

    def record(self, value: float):
        if value > 0:
            self.count += 1
            self.max_residue = max(self.max_residue, value)


RESIDUES = ResidueLog()


def _as_real(vals, what: str) -> np.ndarray:
    vals = np.asarray(vals)
    if np.iscomplexobj(vals):
        im = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
        if im > IMAG_DISCARD * max(1.0, float(np.max(np.abs(vals.real)))):
            raise ValidationError(f"{what} is not real on gamma (imag residue {im:.2e})")
        RESIDUES.record(im)
        vals = vals.real
    return vals


def _values(f, rule):
    return f(rule.nodes) if callable(f) else f


def integrate(rule: QuadratureRule, f: Callable | np.ndarray) -> float:
    """Plain integral of a real function over gamma."""
    return weighted_sum(rule.weights, _as_real(_values(f, rule), "integrand"))


def inner_product(rule: QuadratureRule, w: WeightSpec, L: TorusLattice, f, g) -> float:
    """<f, g> = int_gamma f g w dz.  f, g are callables on gamma or node values."""
    fv = _as_real(_values(f, rule), "f")
    gv = _as_real(_values(g, rule), "g")
    wv = eval_weight(w, L, rule.nodes)
    return weighted_sum(rule.weights, fv * gv * wv)


# ---------------------------------------------------------------- moments


@dataclass(frozen=True)
class MomentTable:
    nu: np.ndarray
    nuhat: np.ndarray
    hankel: np.ndarray
    hankel_hat: np.ndarray
    ill_conditioned: tuple[int, ...] = field(default=())

    def to_csv(self) -> str:
        rows = ["k,nu,nuhat,hankel,hankel_hat"]
        for k in range(len(self.nu)):
            h = self.hankel[k] if k < len(self.hankel) else float("nan")
            hh = self.hankel_hat[k] if k < len(self.hankel_hat) else float("nan")
            rows.append(f"{k},{self.nu[k]:.17e},{self.nuhat[k]:.17e},{h:.17e},{hh:.17e}")
        return "\n".join(rows) + "\n"


def hankel_matrix(m: Sequence[float], k: int) -> np.ndarray:
    m = np.asarray(m)
    return np.array([[m[i + j] for j in range(k)] for i in range(k)])


def lu_det(A: np.ndarray) -> float:
    """Determinant via partially pivoted LU."""
    if A.size == 0:
        return 1.0
    lu, piv = scipy.linalg.lu_factor(A)
    sign = (-1.0) ** int(np.sum(piv != np.arange(len(piv))))
    return float(sign * np.prod(np.diag(lu)))


def compute_moments(rule: QuadratureRule, w: WeightSpec, L: TorusLattice, K: int) -> MomentTable:
    """nu_k, nuhat_k for k <= 2K + 3 and Hankel determinants Delta_0..Delta_K."""
    if K < 0:
        raise ValidationError("K must be >= 0")
    p = np.real(wp(L, rule.nodes))
    pp = np.real(wp_prime(L, rule.nodes))
    wv = eval_weight(w, L, rule.nodes)
    kmax = 2 * K + 3
    nu = np.array([weighted_sum(rule.weights, p**k * wv) for k in range(kmax + 1)])
    nuhat = np.array([weighted_sum(rule.weights, 0.25 * pp**2 * p**k * wv) for k in range(kmax + 1)])

    limit = 1.0 / (100.0 * np.finfo(float).eps)
    bad = []
    hk, hh = [1.0], [1.0]
    for k in range(1, K + 1):
        for moments, out in ((nu, hk), (nuhat, hh)):
            H = hankel_matrix(moments, k)
            if np.linalg.cond(H) > limit and k not in bad:
                bad.append(k)
            out.append(lu_det(H))
    return MomentTable(nu, nuhat, np.array(hk), np.array(hh), tuple(bad))


def self_convergence(L: TorusLattice, w: WeightSpec, degree: int, N: int) -> float:
    """Largest relative change of nu_0..nu_degree, nuhat_0..nuhat_degree under N -> 2N."""
    K = max(0, (degree - 3) // 2 + 1)
    a = compute_moments(build_rule(L, N), w, L, K)
    b = compute_moments(build_rule(L, 2 * N), w, L, K)
    scale = np.maximum(1.0, np.abs(np.concatenate([b.nu, b.nuhat])))
    return float(np.max(np.abs(np.concatenate([a.nu - b.nu, a.nuhat - b.nuhat])) / scale))


def converged_rule(
    L: TorusLattice, w: WeightSpec, degree: int, N: int = DEFAULT_ORDER, tol: float = 1e-10
) -> QuadratureRule:
    """Double N until integrands of the given elliptic degree are resolved."""
    while N <= MAX_ORDER:
        if self_convergence(L, w, degree, N) < tol:
            return build_rule(L, N)
        N *= 2
    raise QuadratureNotConverged(f"no self-convergence by N={MAX_ORDER}")
