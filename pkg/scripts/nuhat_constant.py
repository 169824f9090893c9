"""Moments of the odd family against nu_k: the relation that follows from
wp'^2 / 4 = wp^3 - (g2/4) wp - g3/4 versus the variant 4 (nu_{k+3} - g2 nu_{k+1} - g3 nu_k).

    python3 scripts/nuhat_constant.py --weight exp_p:0.5
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from eopk.quadrature import build_rule, compute_moments, parse_weight
from eopk.symmetric import nuhat_from_nu
from eopk.weierstrass import build_lattice


@dataclass
class Config:
    tau_im: float = 1.0
    weight: str = "unity"
    K: int = 4
    quad: int = 256


def run(cfg: Config) -> tuple[float, float]:
    L = build_lattice(cfg.tau_im)
    mom = compute_moments(build_rule(L, cfg.quad), parse_weight(cfg.weight), L, cfg.K)
    nu, direct = mom.nu, mom.nuhat
    good = nuhat_from_nu(nu, L.g2, L.g3)
    k = np.arange(len(good))
    variant = 4 * (nu[k + 3] - L.g2 * nu[k + 1] - L.g3 * nu[k])
    rel = lambda a: float(np.max(np.abs(a - direct[: len(a)]) / np.abs(direct[: len(a)])))
    print(f"{'k':>3} {'quadrature':>22} {'curve relation':>22} {'variant':>22}")
    for i in k:
        print(f"{i:>3} {direct[i]:>22.14e} {good[i]:>22.14e} {variant[i]:>22.14e}")
    r_good, r_var = rel(good), rel(variant)
    print(f"relative error: curve relation {r_good:.2e}, variant {r_var:.2e}")
    return r_good, r_var


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tau", type=float, default=Config.tau_im)
    ap.add_argument("--weight", default=Config.weight)
    ap.add_argument("--K", type=int, default=Config.K)
    a = ap.parse_args()
    run(Config(a.tau, a.weight, a.K))


if __name__ == "__main__":
    main()
