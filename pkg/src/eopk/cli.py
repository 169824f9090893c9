"""Command-line front end: `eopk coeffs|kernel|zeros|verify`.

Exit codes: 0 success (for `verify`, every check passed), 1 a verify check
failed, 2 invalid input, 3 numerical breakdown.  Results go to files under
--out; stdout carries the human summary and stderr diagnostics only.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cd_kernel import correlation_grid, member_count
from .eop import EOPFamily, build_family, degrees
from .errors import EOPError, NumericalError, ValidationError
from .quadrature import parse_weight, precision_mode
from .recurrence import extract_five_term, extract_seven_term
from .verify import DEFAULT_WEIGHTS, SuiteConfig, run_suite
from .weierstrass import build_lattice
from .zeros import complete_zero_set

N_CAP = 20
SCHEMA = 1

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    tau_im: float = 1.0
    weight: str | None = None
    N: int = 8
    quad: int = 256
    out: str = "eopk_out"
    seed: int = 0
    n: int = 4
    grid: int = 512
    perturb: bool = False
    symmetric_suite: bool = False

    def validate(self) -> "RunConfig":
        if not 0 <= self.N <= N_CAP:
            raise ValidationError(f"--nmax must lie in 0..{N_CAP}, got {self.N}")
        if self.quad < 8:
            raise ValidationError("--quad must be at least 8")
        if self.grid < 1:
            raise ValidationError("--grid must be positive")
        build_lattice(self.tau_im)
        for w in self.weights:
            parse_weight(w)
        return self

    @property
    def weights(self) -> tuple[str, ...]:
        if self.weight is not None:
            return (self.weight,)
        return DEFAULT_WEIGHTS if self.command == "verify" else ("unity",)

    def header(self) -> dict:
        return {
            "tau_im": self.tau_im,
            "weight": self.weights[0] if len(self.weights) == 1 else list(self.weights),
            "N": self.N,
            "quad": self.quad,
            "seed": self.seed,
            "precision": precision_mode(),
        }


def _dump_json(path: Path, data: dict):
    path.write_text(json.dumps(data, sort_keys=True, indent=1) + "\n")


def _fmt(x: float) -> str:
    return f"{x:.17e}"


def _family(cfg: RunConfig) -> EOPFamily:
    return build_family(cfg.tau_im, cfg.weights[0], cfg.N, cfg.quad)


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- commands


def coefficient_tables(fam: EOPFamily) -> dict[str, dict[int, float]]:
    """h by degree plus whichever recurrence tables the family size admits."""
    tables = {"h": {n: float(fam.h[n]) for n in degrees(fam.N)}}
    if fam.N >= 4:
        co5 = extract_five_term(fam)
        tables.update(a=co5.a, b=co5.b, c=co5.c)
    if fam.N >= 5:
        co7 = extract_seven_term(fam)
        tables.update(p=co7.p, q=co7.q, r=co7.r, s=co7.s)
    return tables


def cmd_coeffs(cfg: RunConfig) -> int:
    fam = _family(cfg)
    tables = coefficient_tables(fam)
    out = _outdir(cfg)
    data = {"schema": SCHEMA, "config": cfg.header()}
    data.update({k: {str(i): float(v) for i, v in sorted(t.items())} for k, t in tables.items()})
    _dump_json(out / "coeffs.json", data)
    with open(out / "coeffs.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "index", "value"])
        for k, t in tables.items():
            for i, v in sorted(t.items()):
                w.writerow([k, i, _fmt(v)])
    print(f"wrote {out / 'coeffs.json'} and {out / 'coeffs.csv'} ({len(tables)} tables)")
    return EXIT_OK


def cmd_kernel(cfg: RunConfig) -> int:
    fam = _family(cfg)
    t = (np.arange(cfg.grid) + 0.5) / cfg.grid
    K = correlation_grid(fam, cfg.n, t)
    out = _outdir(cfg)
    path = out / f"kernel_n{cfg.n}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [_fmt(s) for s in t])
        for s, row in zip(t, K):
            w.writerow([_fmt(s)] + [_fmt(v) for v in row])
    tr = float(np.trace(K)) / cfg.grid
    print(f"wrote {path}: {cfg.grid}x{cfg.grid} grid, trace {tr:.12f} (rank {member_count(cfg.n)})")
    return EXIT_OK


def cmd_zeros(cfg: RunConfig) -> int:
    fam = _family(cfg)
    out = _outdir(cfg)
    path = out / "zeros.csv"
    rows = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "curve", "t", "residual", "margin"])
        for n in degrees(fam.N):
            if n == 0:
                continue
            zs = complete_zero_set(fam, n)
            for t, r, m in zip(zs.gamma_zeros, zs.residuals, zs.margins):
                w.writerow([n, "gamma", _fmt(t), _fmt(r), _fmt(m)])
                rows += 1
            for t in zs.real_zeros:
                w.writerow([n, "real", _fmt(t), "", ""])
                rows += 1
    print(f"wrote {path}: {rows} zeros for n = 2..{fam.N}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    suite = SuiteConfig(
        tau_im=cfg.tau_im,
        N=cfg.N,
        quad=cfg.quad,
        seed=cfg.seed,
        perturb=cfg.perturb,
        symmetric_suite=cfg.symmetric_suite,
        weights=cfg.weights,
    )
    report = run_suite(suite)
    data = report.to_dict()
    data["config"]["precision"] = precision_mode()
    out = _outdir(cfg)
    _dump_json(out / "verify.json", data)
    for c in report.checks:
        print(c.line())
    failed = sum(not c.passed for c in report.checks)
    print(f"{len(report.checks) - failed}/{len(report.checks)} checks passed; report in {out / 'verify.json'}")
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {"coeffs": cmd_coeffs, "kernel": cmd_kernel, "zeros": cmd_zeros, "verify": cmd_verify}


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tau", type=float, default=1.0, help="imaginary part of tau (tau = i * TAU)")
    common.add_argument("--weight", default=None,
                        help="weight DSL, e.g. unity, exp_p:0.5, exp_pp:0.3, prod(exp_p:1,exp_pp:0.2)")
    common.add_argument("--nmax", type=int, default=8, help=f"highest degree N (at most {N_CAP})")
    common.add_argument("--quad", type=int, default=256, help="Gauss-Legendre order on gamma")
    common.add_argument("--out", default="eopk_out", help="output directory")
    common.add_argument("--seed", type=int, default=0, help="seed for random test points")

    parser = argparse.ArgumentParser(
        prog="eopk",
        description="Elliptic orthogonal polynomials on the torus C / (Z + i TAU Z).",
        epilog="EOPK_PRECISION=double|dd selects plain or compensated accumulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("coeffs", parents=[common], help="write recurrence coefficients and norms")
    k = sub.add_parser("kernel", parents=[common], help="write the correlation kernel K_n on a grid")
    k.add_argument("--n", type=int, default=4, help="kernel index n (needs n + 1 <= N)")
    k.add_argument("--grid", type=int, default=512, help="grid points along gamma")
    sub.add_parser("zeros", parents=[common], help="write zeros of pi_2..pi_N")
    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("--perturb", action="store_true", help="perturb a_5 by 0.1 to self-test the harness")
    v.add_argument("--symmetric-suite", action="store_true",
                   help="run the symmetric-weight checks (on by default for symmetric weights)")
    return parser


def parse_config(argv: list[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    return RunConfig(
        command=ns.command,
        tau_im=ns.tau,
        weight=ns.weight,
        N=ns.nmax,
        quad=ns.quad,
        out=ns.out,
        seed=ns.seed,
        n=getattr(ns, "n", 4),
        grid=getattr(ns, "grid", 512),
        perturb=getattr(ns, "perturb", False),
        symmetric_suite=getattr(ns, "symmetric_suite", False),
    )


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except ValidationError as exc:
        print(f"eopk: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"eopk: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except EOPError as exc:
        print(f"eopk: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
