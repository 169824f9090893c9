"""Zeros of pi_n on gamma and on the real period segment (0, 1).

pi_n is real on both curves, so zeros are located by scanning for sign changes,
bracketing with Brent's method and polishing with Newton steps that use the
analytic derivative.  Even n has n zeros on gamma; odd n has n - 1 on gamma and
one on (0, 1).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .eop import EOPFamily, gram_schmidt
from .errors import CountMismatch, IncompleteZeroSet, InvalidDegree, NotFound
from .quadrature import build_rule
from .weierstrass import TorusLattice

MAX_GRID = 65536
XTOL = 1e-12
EDGE = 1e-4


@dataclass
class ZeroSet:
    n: int
    gamma_zeros: list[float] = field(default_factory=list)
    real_zeros: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    margins: list[float] = field(default_factory=list)
    grid_size: int = 0

    @property
    def expected_gamma(self) -> int:
        return expected_gamma_count(self.n)

    def points(self, L: TorusLattice) -> list[complex]:
        return [0.5j * L.tau_im + t for t in self.gamma_zeros] + [complex(t) for t in self.real_zeros]


def expected_gamma_count(n: int) -> int:
    return n if n % 2 == 0 else n - 1


def _check(fam: EOPFamily, n: int):
    if n < 0 or n == 1 or n > fam.N:
        raise InvalidDegree(f"no member of degree {n} in this family")


def _fn(fam: EOPFamily, n: int, offset: complex):
    def f(t):
        return float(np.real(fam.eval(n, offset + t)))

    def df(t):
        return float(np.real(fam.eval(n, offset + t, deriv=1)))

    return f, df


def _refine(f, df, a: float, b: float) -> float:
    t = brentq(f, a, b, xtol=XTOL, rtol=4 * np.finfo(float).eps)
    for _ in range(3):
        d = df(t)
        if d == 0.0:
            break
        s = t - f(t) / d
        if not (a <= s <= b) or abs(f(s)) >= abs(f(t)):
            break
        t = s
    return t


def _scan_gamma(fam: EOPFamily, n: int, M: int) -> ZeroSet:
    L = fam.lattice
    f, df = _fn(fam, n, 0.5j * L.tau_im)
    t = (np.arange(M) + 0.5) / M
    v = np.real(fam.values(0.5j * L.tau_im + t)[n])
    scale = float(np.max(np.abs(v)))
    out = ZeroSet(n, grid_size=M)
    # periodic scan: the last interval wraps around t = 1 = 0
    tt = np.append(t, t[0] + 1.0)
    vv = np.append(v, v[0])
    for i in range(M):
        if vv[i] == 0.0:
            roots = [tt[i]]
        elif vv[i] * vv[i + 1] < 0:
            roots = [_refine(lambda s: f(s % 1.0), lambda s: df(s % 1.0), tt[i], tt[i + 1])]
        else:
            continue
        r = roots[0] % 1.0
        out.gamma_zeros.append(float(r))
        out.residuals.append(abs(f(r)))
        out.margins.append(abs(df(r)) / scale)
    order = np.argsort(out.gamma_zeros)
    for name in ("gamma_zeros", "residuals", "margins"):
        setattr(out, name, [getattr(out, name)[i] for i in order])
    return out


def find_gamma_zeros(fam: EOPFamily, n: int, grid_size: int = 1024) -> ZeroSet:
    """All zeros of pi_n on gamma as parameters t in [0, 1) (points tau/2 + t)."""
    _check(fam, n)
    if n == 0:
        return ZeroSet(0)
    want = expected_gamma_count(n)
    M = grid_size
    while M <= MAX_GRID:
        zs = _scan_gamma(fam, n, M)
        if len(zs.gamma_zeros) == want:
            return zs
        M *= 2
    if fam.rule.order < 4096:
        # possible near-double zero: rebuild with a finer rule and compensated sums once
        previous = os.environ.get("EOPK_PRECISION")
        os.environ["EOPK_PRECISION"] = "dd"
        try:
            finer = gram_schmidt(fam.lattice, fam.weight, build_rule(fam.lattice, 2 * fam.rule.order), fam.N)
        finally:
            if previous is None:
                os.environ.pop("EOPK_PRECISION", None)
            else:
                os.environ["EOPK_PRECISION"] = previous
        zs = _scan_gamma(finer, n, MAX_GRID)
        if len(zs.gamma_zeros) == want:
            return zs
    raise CountMismatch(
        f"pi_{n}: found {len(zs.gamma_zeros)} zeros on gamma, expected {want} "
        f"(min |pi_n| on grid {min(zs.residuals, default=float('nan')):.2e})"
    )


def find_real_zero(fam: EOPFamily, n: int, grid_size: int = 2048) -> float:
    """The zero of odd pi_n on (0, 1), away from the lattice points 0 and 1."""
    _check(fam, n)
    if n % 2 == 0 or n < 3:
        raise InvalidDegree("only odd n >= 3 has a zero on the real segment")
    f, df = _fn(fam, n, 0.0)
    t = np.linspace(EDGE, 1.0 - EDGE, grid_size)
    v = np.real(fam.values(t.astype(complex))[n])
    hits = np.nonzero(v[:-1] * v[1:] < 0)[0]
    if len(hits) == 0:
        raise NotFound(f"no sign change of pi_{n} on (0, 1)")
    return float(_refine(f, df, t[hits[0]], t[hits[0] + 1]))


def complete_zero_set(fam: EOPFamily, n: int) -> ZeroSet:
    zs = find_gamma_zeros(fam, n)
    if n % 2 == 1:
        zs = replace(zs, real_zeros=[find_real_zero(fam, n)])
    return zs


def lattice_distance(L: TorusLattice, z: complex) -> float:
    k = np.round(z.imag / L.tau_im)
    u = z - 1j * L.tau_im * k
    return float(abs(u - np.round(u.real)))


def abel_sum_check(zs: ZeroSet, L: TorusLattice) -> float:
    """Distance from the sum of all zeros to the lattice."""
    pts = zs.points(L)
    if len(pts) != zs.n:
        raise IncompleteZeroSet(f"have {len(pts)} zeros of pi_{zs.n}, need {zs.n}")
    return lattice_distance(L, complex(sum(pts)))
