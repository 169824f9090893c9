"""Write nu_k, nuhat_k and the Hankel determinants for one lattice and weight.

    python3 scripts/moments_csv.py --weight exp_p:0.5 --out moments.csv
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from eopk.quadrature import build_rule, compute_moments, parse_weight
from eopk.weierstrass import build_lattice


@dataclass
class Config:
    tau_im: float = 1.0
    weight: str = "unity"
    K: int = 6
    quad: int = 256
    out: str = "moments.csv"


def run(cfg: Config) -> Path:
    L = build_lattice(cfg.tau_im)
    mom = compute_moments(build_rule(L, cfg.quad), parse_weight(cfg.weight), L, cfg.K)
    path = Path(cfg.out)
    path.write_text(mom.to_csv())
    if mom.ill_conditioned:
        print(f"Hankel matrices ill-conditioned for k in {mom.ill_conditioned}")
    print(f"wrote {path}")
    return path


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tau", type=float, default=Config.tau_im)
    ap.add_argument("--weight", default=Config.weight)
    ap.add_argument("--K", type=int, default=Config.K)
    ap.add_argument("--quad", type=int, default=Config.quad)
    ap.add_argument("--out", default=Config.out)
    a = ap.parse_args()
    run(Config(a.tau, a.weight, a.K, a.quad, a.out))


if __name__ == "__main__":
    main()
