"""Khat_n at the half period (1 + tau)/2, where wp' = 0, from the second-derivative
bracket: ratio to the direct sum for the correct orientation and for the
orientation with the a-term brackets swapped.

    python3 scripts/degenerate_ratio.py
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from eopk.cd_kernel import CDKernel, kernel_degenerate, kernel_sum, swapped_bracket_ratio
from eopk.eop import build_family


@dataclass
class Config:
    tau_im: float = 1.0
    weights: list[str] = field(default_factory=lambda: ["unity", "exp_p:0.5", "exp_pp:0.3"])
    N: int = 10
    quad: int = 256


def run(cfg: Config) -> dict[str, list[tuple[int, float, float]]]:
    out = {}
    for w in cfg.weights:
        fam = build_family(cfg.tau_im, w, cfg.N, cfg.quad)
        x = 0.5 + 0.5j * cfg.tau_im
        rows = []
        for n in range(4, cfg.N + 1):
            K = CDKernel(fam, n)
            direct = float(kernel_sum(K, x, x))
            rows.append((n, kernel_degenerate(K, x) / direct, swapped_bracket_ratio(K, x)))
        out[w] = rows
        print(f"weight {w}")
        print(f"  {'n':>3} {'correct / sum':>16} {'swapped / sum':>16}")
        for n, good, bad in rows:
            print(f"  {n:>3} {good:>16.12f} {bad:>16.8f}")
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tau", type=float, default=Config.tau_im)
    ap.add_argument("--weights", nargs="+", default=None)
    ap.add_argument("--nmax", type=int, default=Config.N)
    a = ap.parse_args()
    cfg = Config(tau_im=a.tau, N=a.nmax)
    if a.weights:
        cfg.weights = a.weights
    run(cfg)


if __name__ == "__main__":
    main()
