"""Compare the 13 coefficients of wp'^2 pi_n obtained from the five-term and the
seven-term relations, entry by entry, for every admissible n.

    python3 scripts/coupling_tables.py --weight exp_pp:0.3 --nmax 12
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from eopk.eop import build_family
from eopk.recurrence import (
    b_table_five,
    b_table_seven,
    coupling_range,
    extract_five_term,
    extract_seven_term,
)


@dataclass
class Config:
    tau_im: float = 1.0
    weight: str = "exp_pp:0.3"
    N: int = 12
    quad: int = 256


def run(cfg: Config) -> float:
    fam = build_family(cfg.tau_im, cfg.weight, cfg.N, cfg.quad)
    co5, co7 = extract_five_term(fam), extract_seven_term(fam)
    worst = 0.0
    for n in coupling_range(cfg.N):
        b5 = b_table_five(co5, n, fam.lattice.g2, fam.lattice.g3)
        b7 = b_table_seven(co7, n)
        print(f"n = {n}")
        print(f"  {'i':>3} {'five-term':>22} {'seven-term':>22} {'|diff|':>10}")
        for i in range(-6, 7):
            d = abs(b5[i] - b7[i])
            worst = max(worst, d)
            print(f"  {i:>3} {b5[i]:>22.14e} {b7[i]:>22.14e} {d:>10.2e}")
    print(f"largest mismatch {worst:.2e}")
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tau", type=float, default=Config.tau_im)
    ap.add_argument("--weight", default=Config.weight)
    ap.add_argument("--nmax", type=int, default=Config.N)
    ap.add_argument("--quad", type=int, default=Config.quad)
    a = ap.parse_args()
    run(Config(a.tau, a.weight, a.nmax, a.quad))


if __name__ == "__main__":
    main()
