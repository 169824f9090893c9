"""Elliptic orthogonal polynomials in the Weierstrass basis.

Basis ordering is by pole order: E_0, E_2, E_3, E_4, ... with

    E_{2k}   = wp^k
    E_{2k+3} = -1/2 wp' wp^k

so every E_m has Laurent head z^{-m}.  Degree 1 has no basis element; the
public API maps pi_1 to the zero polynomial.  Coefficient vectors are indexed
by `pos(m)` (0 -> 0, m >= 2 -> m - 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DegenerateNorm, InvalidDegree, ValidationError
from .quadrature import (
    QuadratureRule,
    WeightSpec,
    build_rule,
    eval_weight,
    parse_weight,
    precision_mode,
    weighted_sum,
)
from .weierstrass import TorusLattice, build_lattice, wp_all

SCHEMA = 1
DEGENERATE_RATIO = 1e-13


def pos(m: int) -> int:
    if m < 0 or m == 1:
        raise InvalidDegree(f"no basis element of degree {m}")
    return 0 if m == 0 else m - 1


def degrees(N: int) -> list[int]:
    """Basis degrees up to N: [0, 2, 3, ..., N]."""
    return [0] + list(range(2, N + 1))


def _split(m: int) -> tuple[bool, int]:
    """(is_odd_element, power of wp)."""
    return (False, m // 2) if m % 2 == 0 else (True, (m - 3) // 2)


def basis_matrix(L: TorusLattice, N: int, z, deriv: int = 0) -> np.ndarray:
    """Values of d^deriv/dz^deriv E_m(z) for m in degrees(N); shape (len(degrees), *z.shape)."""
    z = np.asarray(z, dtype=complex)
    p, p1, p2 = wp_all(L, z)
    p3 = 12.0 * p * p1
    kmax = N // 2 + 1
    pw = [np.ones_like(z)]
    for _ in range(kmax):
        pw.append(pw[-1] * p)

    def power(k, d):
        # d^d/dz^d wp^k
        if k == 0:
            return np.zeros_like(z) if d else pw[0]
        if d == 0:
            return pw[k]
        if d == 1:
            return k * pw[k - 1] * p1
        lo = k * (k - 1) * pw[k - 2] * p1**2 if k >= 2 else 0.0
        return lo + k * pw[k - 1] * p2

    rows = []
    for m in degrees(N):
        odd, k = _split(m)
        if not odd:
            rows.append(power(k, deriv))
        elif deriv == 0:
            rows.append(-0.5 * p1 * pw[k])
        elif deriv == 1:
            rows.append(-0.5 * (p2 * pw[k] + p1 * power(k, 1)))
        else:
            rows.append(-0.5 * (p3 * pw[k] + 2.0 * p2 * power(k, 1) + p1 * power(k, 2)))
    return np.array(rows)


def basis_eval(L: TorusLattice, n: int, z):
    if n < 0 or n == 1:
        raise InvalidDegree(f"no basis element of degree {n}")
    out = basis_matrix(L, n, z)[pos(n)]
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class EllipticPolynomial:
    degree: int
    coeffs: np.ndarray
    norm_h: float | None = None

    def laurent_head(self) -> float:
        return laurent_head(self)

    def __call__(self, L: TorusLattice, z):
        if self.degree == 1 or not np.any(self.coeffs):
            return np.zeros_like(np.asarray(z, dtype=complex))
        B = basis_matrix(L, self.degree, z)
        return np.tensordot(self.coeffs, B[: len(self.coeffs)], axes=1)


def laurent_head(p: EllipticPolynomial) -> float:
    """Coefficient of z^{-n}: each E_m has unit head, so it is the leading coefficient."""
    if p.degree == 1 or len(p.coeffs) == 0:
        return 0.0
    return float(p.coeffs[pos(p.degree)])


def zero_polynomial(n: int = 1) -> EllipticPolynomial:
    return EllipticPolynomial(n, np.zeros(0))


# ---------------------------------------------------------------- shift maps


def mul_wp(c: np.ndarray) -> np.ndarray:
    """Coefficients of wp * f, given those of f (wp E_m = E_{m+2})."""
    out = np.zeros(len(c) + 2)
    for i, ci in enumerate(c):
        m = 0 if i == 0 else i + 1
        out[pos(m + 2)] = ci
    return out


def mul_wpp(c: np.ndarray, g2: float, g3: float) -> np.ndarray:
    """Coefficients of wp' * f, reducing wp'^2 = 4 wp^3 - g2 wp - g3."""
    out = np.zeros(len(c) + 3)
    for i, ci in enumerate(c):
        m = 0 if i == 0 else i + 1
        odd, k = _split(m)
        if not odd:
            out[pos(2 * k + 3)] += -2.0 * ci
        else:
            out[pos(2 * k + 6)] += -2.0 * ci
            out[pos(2 * k + 2)] += 0.5 * g2 * ci
            out[pos(2 * k)] += 0.5 * g3 * ci
    return out


def pad(c: np.ndarray, n: int) -> np.ndarray:
    """Zero-pad (or drop trailing zeros of) c to length n."""
    if np.any(c[n:]):
        raise ValueError(f"cannot fit {len(c)} coefficients into {n}")
    out = np.zeros(n)
    out[: min(len(c), n)] = c[:n]
    return out


# ---------------------------------------------------------------- family


@dataclass(frozen=True)
class EOPFamily:
    """Orthonormal pi_0, pi_2, ..., pi_N (pi_1 = 0) for one lattice and weight.

    `coeffs[n]` holds pi_n in the basis (row 1 is zero); `h[n]` the monic norm
    (NaN for n = 1).
    """

    lattice: TorusLattice
    weight: WeightSpec
    rule: QuadratureRule
    N: int
    coeffs: np.ndarray
    h: np.ndarray

    def members(self, upto: int | None = None) -> list[int]:
        top = self.N if upto is None else upto
        return [n for n in degrees(top)]

    def poly(self, n: int, monic: bool = False) -> EllipticPolynomial:
        self._check(n)
        if n == 1:
            return zero_polynomial()
        c = self.coeffs[n, : pos(n) + 1]
        if monic:
            return EllipticPolynomial(n, c * np.sqrt(self.h[n]), float(self.h[n]))
        return EllipticPolynomial(n, c.copy(), float(self.h[n]))

    def _check(self, n: int):
        if n < 0 or n > self.N:
            raise InvalidDegree(f"degree {n} outside family 0..{self.N}")

    def values(self, z, deriv: int = 0, monic: bool = False) -> np.ndarray:
        """Row n = pi_n (or a derivative) at z; row 1 is identically zero."""
        z = np.asarray(z, dtype=complex)
        B = basis_matrix(self.lattice, max(self.N, 0), z, deriv)
        C = self.coeffs if not monic else self.coeffs * np.sqrt(np.nan_to_num(self.h))[:, None]
        return np.tensordot(C, B, axes=1)

    def eval(self, n: int, z, deriv: int = 0):
        self._check(n)
        out = self.values(z, deriv)[n] if n != 1 else np.zeros_like(np.asarray(z, dtype=complex))
        return out[()] if out.ndim == 0 else out

    def eval_monic(self, n: int, z):
        self._check(n)
        if n == 1:
            return np.zeros_like(np.asarray(z, dtype=complex))
        return self.eval(n, z) * np.sqrt(self.h[n])

    def weight_at(self, z):
        return eval_weight(self.weight, self.lattice, z)

    def gram(self, rule: QuadratureRule | None = None) -> np.ndarray:
        """Gram matrix over the members [0, 2, ..., N] computed by quadrature."""
        rule = rule or self.rule
        V = self.values(rule.nodes).real[self.members()]
        wv = eval_weight(self.weight, self.lattice, rule.nodes) * rule.weights
        return (V * wv) @ V.T

    # ------------------------------------------------------------ serialisation

    def to_json(self) -> str:
        h = [None if n == 1 else float(self.h[n]) for n in range(self.N + 1)]
        data = {
            "schema": SCHEMA,
            "basis": "E_0,E_2,E_3,...; E_2k = wp^k, E_2k+3 = -wp' wp^k / 2",
            "tau_im": self.lattice.tau_im,
            "series_terms": self.lattice.series_terms,
            "weight_spec": self.weight.to_dsl(),
            "N": self.N,
            "quad_order": self.rule.order,
            "h": h,
            "coeffs": [[float(x) for x in row] for row in self.coeffs],
        }
        return json.dumps(data, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "EOPFamily":
        data = json.loads(text)
        if data.get("schema") != SCHEMA:
            raise ValidationError("unsupported family schema")
        L = build_lattice(data["tau_im"], data.get("series_terms", 32))
        h = np.array([np.nan if x is None else x for x in data["h"]], dtype=float)
        return cls(
            L,
            parse_weight(data["weight_spec"]),
            build_rule(L, data["quad_order"]),
            int(data["N"]),
            np.array(data["coeffs"], dtype=float).reshape(int(data["N"]) + 1, -1),
            h,
        )


def _candidates(n: int, prev: dict[int, np.ndarray], width: int) -> np.ndarray:
    """Coefficients of the vector to orthogonalise at degree n.

    Degrees >= 4 start from wp * pi_{n-2}; its head is the head of pi_{n-2}, so
    the monic normalisation stays exact while the candidates remain as well
    conditioned as a Stieltjes procedure.
    """
    if n in (0, 3):
        c = np.zeros(width)
        c[pos(n)] = 1.0
        return c
    return pad(mul_wp(prev[n - 2][: pos(n - 2) + 1]), width)


def gram_schmidt(
    L: TorusLattice, w: WeightSpec, rule: QuadratureRule, N: int, passes: int = 2
) -> EOPFamily:
    """Orthonormalise the basis degree by degree (modified Gram-Schmidt, twice)."""
    if N < 0:
        raise ValidationError("N must be >= 0")
    width = len(degrees(N))
    B = basis_matrix(L, N, rule.nodes).real
    wq = eval_weight(w, L, rule.nodes) * rule.weights
    dd = precision_mode() == "dd"

    def ip(f, g):
        return weighted_sum(wq, f * g) if dd else float(np.dot(wq * f, g))

    coeffs = np.zeros((N + 1, width))
    vals: dict[int, np.ndarray] = {}
    h = np.full(N + 1, np.nan)
    prev: dict[int, np.ndarray] = {}
    for n in degrees(N):
        c = _candidates(n, prev, width)
        head = c[pos(n)]
        v = c @ B
        for _ in range(passes):
            for m in vals:
                r = ip(v, vals[m])
                v = v - r * vals[m]
                c = c - r * coeffs[m]
        nrm2 = ip(v, v)
        hn = nrm2 / head**2
        if n == 0:
            h0 = hn
        if not hn > DEGENERATE_RATIO * h0:
            raise DegenerateNorm(f"h_{n} = {hn:.3e} collapsed (h_0 = {h0:.3e}); reduce N")
        s = 1.0 / np.sqrt(nrm2)
        coeffs[n] = c * s
        vals[n] = v * s
        prev[n] = coeffs[n]
        h[n] = hn
    return EOPFamily(L, w, rule, N, coeffs, h)


def build_family(
    tau_im: float = 1.0,
    weight: WeightSpec | str = "unity",
    N: int = 8,
    quad_order: int = 256,
    series_terms: int = 32,
) -> EOPFamily:
    """Convenience constructor used by the CLI, scripts and tests."""
    if isinstance(weight, str):
        weight = parse_weight(weight)
    L = build_lattice(tau_im, series_terms)
    return gram_schmidt(L, weight, build_rule(L, quad_order), N)


def family_values_on_t(fam: EOPFamily, t: Iterable[float]) -> np.ndarray:
    """Real values of all members at gamma points tau/2 + t."""
    z = 0.5j * fam.lattice.tau_im + np.asarray(list(t), dtype=float)
    return fam.values(z).real
