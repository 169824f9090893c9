"""Spread of det Y_n(z) - wp(z) on circles |z| = r around the lattice point,
showing the |z|^-n growth caused by cancellation between P_n C_{n-1} and C_n P_{n-1}.

    python3 scripts/det_near_pole.py --weight exp_pp:0.3
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

import numpy as np

from eopk.eop import build_family
from eopk.rhp import assemble_Y, det_constant


@dataclass
class Config:
    tau_im: float = 1.0
    weight: str = "exp_pp:0.3"
    N: int = 8
    radii: list[float] = field(default_factory=lambda: [0.02, 0.05, 0.1, 0.2, 0.4])
    points: int = 16


def run(cfg: Config) -> dict[int, list[float]]:
    fam = build_family(cfg.tau_im, cfg.weight, cfg.N)
    ring = np.exp(2j * np.pi * np.arange(cfg.points) / cfg.points)
    out = {}
    for n in range(3, cfg.N + 1):
        Y = assemble_Y(fam, n)
        ref = det_constant(Y, 0.3 + 0.3j * cfg.tau_im)
        out[n] = [float(np.max(np.abs(det_constant(Y, r * ring) - ref))) for r in cfg.radii]
    print(f"{'n':>3} " + " ".join(f"{'r=' + str(r):>10}" for r in cfg.radii))
    for n, row in out.items():
        print(f"{n:>3} " + " ".join(f"{v:>10.1e}" for v in row))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tau", type=float, default=Config.tau_im)
    ap.add_argument("--weight", default=Config.weight)
    ap.add_argument("--nmax", type=int, default=Config.N)
    a = ap.parse_args()
    run(Config(a.tau, a.weight, a.nmax))


if __name__ == "__main__":
    main()
