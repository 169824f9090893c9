"""Christoffel-Darboux kernel rebuilt from Riemann-Hilbert first columns.

Reports the error against the direct sum for the unit prefactors, for the
norm-weighted prefactors, and for 0..3 Richardson levels in the boundary offset.

    python3 scripts/rhp_cd_identity.py --weight exp_pp:0.3
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from eopk.eop import build_family
from eopk.recurrence import extract_five_term
from eopk.rhp import cd_rhp_identity


@dataclass
class Config:
    tau_im: float = 1.0
    weight: str = "unity"
    N: int = 8
    pairs: int = 10
    eps: float = 1e-4
    seed: int = 0


def _pairs(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    out = []
    while len(out) < cfg.pairs:
        x, y = rng.uniform(0.05, 0.95, 2)
        if abs(x - y) > 0.05 and abs(x + y - 1) > 0.05:
            out.append((x, y))
    return out


def run(cfg: Config) -> dict:
    fam = build_family(cfg.tau_im, cfg.weight, cfg.N)
    co = extract_five_term(fam)
    pairs = _pairs(cfg)
    table = {}
    for n in range(5, cfg.N):
        row = {f"levels={k}": max(cd_rhp_identity(fam, co, n, x, y, cfg.eps, k) for x, y in pairs)
               for k in range(4)}
        row["norm-weighted"] = max(cd_rhp_identity(fam, co, n, x, y, cfg.eps, 2, weighted_prefactors=True)
                                   for x, y in pairs)
        table[n] = row
    cols = list(next(iter(table.values())))
    print(f"{'n':>3} " + " ".join(f"{c:>14}" for c in cols))
    for n, row in table.items():
        print(f"{n:>3} " + " ".join(f"{row[c]:>14.2e}" for c in cols))
    return table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tau", type=float, default=Config.tau_im)
    ap.add_argument("--weight", default=Config.weight)
    ap.add_argument("--nmax", type=int, default=Config.N)
    ap.add_argument("--pairs", type=int, default=Config.pairs)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    run(Config(a.tau, a.weight, a.nmax, a.pairs, seed=a.seed))


if __name__ == "__main__":
    main()
