"""Weierstrass functions on C / (Z + tau Z) for purely imaginary tau.

Everything is evaluated from the nome expansions with q = exp(i pi tau), which
is real and < 1 here.  With periods (1, tau) and A_n = q^{2n} / (1 - q^{2n}):

    zeta(u) = 2 eta1 u + pi cot(pi u) + 4 pi sum_n A_n sin(2 pi n u)
    wp(u)   = -2 eta1 + pi^2 csc^2(pi u) - 8 pi^2 sum_n n A_n cos(2 pi n u)

Arguments are first reduced to the period parallelogram centred at 0 so the
trigonometric series converge like exp(-pi n tau_im).  The curve is in the
standard normalisation wp'^2 = 4 wp^3 - g2 wp - g3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveTau, PoleProximity, TruncationTooCoarse

POLE_GUARD = 1e-12
DEFAULT_SERIES_TERMS = 32


@dataclass(frozen=True)
class TorusLattice:
    """Lattice Z + tau Z with tau = i * tau_im and its invariants."""

    tau_im: float
    g2: float
    g3: float
    e1: float
    e2: float
    e3: float
    eta1: float
    series_terms: int
    _n: np.ndarray = field(repr=False, compare=False)
    _A: np.ndarray = field(repr=False, compare=False)

    @property
    def tau(self) -> complex:
        return 1j * self.tau_im

    @property
    def nome(self) -> float:
        return float(np.exp(-np.pi * self.tau_im))

    @property
    def eta_tau(self) -> complex:
        """zeta(tau/2); zeta(z + tau) = zeta(z) + 2 * eta_tau (Legendre relation)."""
        return self.eta1 * self.tau - 1j * np.pi

    @property
    def half_periods(self) -> tuple[complex, complex, complex]:
        """(1/2, (1+tau)/2, tau/2), matching (e1, e2, e3)."""
        return 0.5 + 0j, 0.5 + 0.5 * self.tau, 0.5 * self.tau


def build_lattice(tau_im: float, series_terms: int = DEFAULT_SERIES_TERMS) -> TorusLattice:
    if not tau_im > 0:
        raise NonPositiveTau(f"tau_im must be positive, got {tau_im}")
    if series_terms < 8:
        raise ValueError("series_terms must be at least 8")
    q2 = np.exp(-2.0 * np.pi * tau_im)
    n = np.arange(1, series_terms + 1, dtype=float)
    qn = q2**n
    A = qn / (1.0 - qn)

    # last kept term of the fastest-growing (n^5) Eisenstein sum must be negligible
    if n[-1] ** 5 * A[-1] > 1e-17:
        raise TruncationTooCoarse(
            f"{series_terms} terms too few for tau_im={tau_im} (tail ~{n[-1] ** 5 * A[-1]:.1e})"
        )

    eta1 = np.pi**2 / 6.0 * (1.0 - 24.0 * np.sum(n * A))
    g2 = 4.0 * np.pi**4 / 3.0 * (1.0 + 240.0 * np.sum(n**3 * A))
    g3 = 8.0 * np.pi**6 / 27.0 * (1.0 - 504.0 * np.sum(n**5 * A))

    proto = TorusLattice(tau_im, g2, g3, 0.0, 0.0, 0.0, eta1, series_terms, n, A)
    e1, e2, e3 = (float(_wp(proto, np.asarray(h)).real) for h in proto.half_periods)
    lat = TorusLattice(tau_im, g2, g3, e1, e2, e3, eta1, series_terms, n, A)

    scale = max(1.0, abs(g2))
    resid = max(
        abs(e1 + e2 + e3),
        abs(g2 + 4.0 * (e1 * e2 + e2 * e3 + e3 * e1)) / scale,
        abs(g3 - 4.0 * e1 * e2 * e3) / max(1.0, abs(g2) ** 1.5),
    )
    if resid > 1e-10:
        raise TruncationTooCoarse(f"lattice invariants inconsistent (residual {resid:.2e})")
    return lat


def reduce(L: TorusLattice, z):
    """Reduce z into the parallelogram |Re| <= 1/2, |Im| <= tau_im/2.

    Returns (u, m, k) with z = u + m + k * tau.
    """
    z = np.asarray(z, dtype=complex)
    k = np.round(z.imag / L.tau_im)
    u = z - 1j * L.tau_im * k
    m = np.round(u.real)
    u = u - m
    return u, m, k


def _checked(L, z):
    u, m, k = reduce(L, z)
    if np.any(np.abs(u) < POLE_GUARD):
        raise PoleProximity("argument reduces to within 1e-12 of a lattice point")
    return u, m, k


def _trig(L, u):
    """Outer-product helpers: (sin(pi u), cos(pi u), arg 2 pi n u)."""
    s = np.sin(np.pi * u)
    c = np.cos(np.pi * u)
    ang = 2.0 * np.pi * np.multiply.outer(u, L._n)
    return s, c, ang


def _wp(L, u):
    s, _, ang = _trig(L, u)
    series = np.cos(ang) @ (L._n * L._A)
    return -2.0 * L.eta1 + np.pi**2 / s**2 - 8.0 * np.pi**2 * series


def _out(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def wp(L: TorusLattice, z):
    """Weierstrass wp(z); vectorised over z."""
    u, _, _ = _checked(L, z)
    return _out(_wp(L, u))


def wp_prime(L: TorusLattice, z):
    u, _, _ = _checked(L, z)
    s, c, ang = _trig(L, u)
    series = np.sin(ang) @ (L._n**2 * L._A)
    return _out(-2.0 * np.pi**3 * c / s**3 + 16.0 * np.pi**3 * series)


def wp_second(L: TorusLattice, z):
    u, _, _ = _checked(L, z)
    s, c, ang = _trig(L, u)
    csc2 = 1.0 / s**2
    cot2 = (c / s) ** 2
    series = np.cos(ang) @ (L._n**3 * L._A)
    return _out(2.0 * np.pi**4 * (2.0 * csc2 * cot2 + csc2**2) + 32.0 * np.pi**4 * series)


def zeta_w(L: TorusLattice, z):
    """Weierstrass zeta, including the quasi-period shifts picked up by reduction."""
    u, m, k = _checked(L, z)
    s, c, ang = _trig(L, u)
    series = np.sin(ang) @ L._A
    base = 2.0 * L.eta1 * u + np.pi * c / s + 4.0 * np.pi * series
    return _out(base + 2.0 * m * L.eta1 + 2.0 * k * L.eta_tau)


def zeta_smooth_part(L: TorusLattice, u):
    """zeta(u) - pi cot(pi u) - 2 eta1 u, analytic for |Im u| < tau_im.

    No reduction is applied: callers guarantee |Im u| <= tau_im / 2.
    """
    u = np.asarray(u, dtype=complex)
    ang = 2.0 * np.pi * np.multiply.outer(u, L._n)
    return _out(4.0 * np.pi * (np.sin(ang) @ L._A))


def wp_all(L: TorusLattice, z):
    """(wp, wp', wp'') in one pass, for basis evaluation."""
    u, _, _ = _checked(L, z)
    s, c, ang = _trig(L, u)
    cs, sn = np.cos(ang), np.sin(ang)
    nA = L._n * L._A
    inv_s = 1.0 / s
    cot = c * inv_s
    csc2 = inv_s**2
    p = -2.0 * L.eta1 + np.pi**2 * csc2 - 8.0 * np.pi**2 * (cs @ nA)
    p1 = -2.0 * np.pi**3 * csc2 * cot + 16.0 * np.pi**3 * (sn @ (L._n * nA))
    p2 = 2.0 * np.pi**4 * (2.0 * csc2 * cot**2 + csc2**2) + 32.0 * np.pi**4 * (cs @ (L._n**2 * nA))
    return _out(p), _out(p1), _out(p2)
