"""Invariant suite shared by `eopk verify` and the acceptance tests.

Each check yields a `Check` carrying the measured value, its tolerance and the
verdict.  Checks are grouped by area and run against one family per weight.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .cd_kernel import (
    CDKernel,
    gram_determinant,
    kernel_cd,
    kernel_confluent,
    kernel_degenerate,
    kernel_for_points,
    kernel_sum,
    member_count,
    swapped_bracket_ratio,
    reproducing_residual,
    spectral_residual,
    square_determinant,
    trace,
)
from .eop import EOPFamily, build_family
from .errors import InconsistentCoefficients
from .quadrature import compute_moments
from .recurrence import (
    coupling_range,
    build_matrix_recurrence,
    extract_five_term,
    extract_seven_term,
    lower_band_leak,
    matrix_recurrence_residual,
    residual_five_term,
    residual_seven_term,
    shohat_favard_reconstruct,
    verify_curve_coupling,
)
from .rhp import assemble_Y, cd_rhp_identity, det_constant, jump_residual
from .symmetric import (
    build_jacobi,
    christoffel_weights,
    curious_identity_check,
    determinantal_identity,
    four_term_check,
    heine_verify,
    interlacing_check,
    jacobi_spectrum,
    partition_function,
    three_term_check,
    zero_values,
)
from .weierstrass import TorusLattice, build_lattice, wp, wp_prime
from .zeros import abel_sum_check, complete_zero_set, expected_gamma_count, find_gamma_zeros

DEFAULT_WEIGHTS = ("unity", "exp_p:0.5", "exp_pp:0.3")
G2_TAU_I = 189.07272012923386


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""
    bound: str = "<"

    @classmethod
    def below(cls, name: str, value: float, tol: float, detail: str = "") -> "Check":
        value = float(value)
        return cls(name, value, tol, bool(np.isfinite(value) and value < tol), detail)

    @classmethod
    def above(cls, name: str, value: float, floor: float, detail: str = "") -> "Check":
        value = float(value)
        return cls(name, value, floor, bool(np.isfinite(value) and value > floor), detail, ">")

    @classmethod
    def truth(cls, name: str, ok: bool, detail: str = "") -> "Check":
        return cls(name, 0.0 if ok else 1.0, 0.5, bool(ok), detail, "bool")

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        if self.bound == "bool":
            return f"{mark}  {self.name}{extra}"
        return f"{mark}  {self.name}: {self.value:.3e} {self.bound} {self.tol:.0e}{extra}"


@dataclass
class SuiteConfig:
    tau_im: float = 1.0
    N: int = 8
    quad: int = 256
    seed: int = 0
    perturb: bool = False
    symmetric_suite: bool = False
    weights: tuple[str, ...] = DEFAULT_WEIGHTS


@dataclass
class Report:
    config: SuiteConfig
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "config": asdict(self.config),
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }


def _gamma_points(L: TorusLattice, rng, k: int, lo: float = 0.02, hi: float = 0.98) -> np.ndarray:
    return 0.5j * L.tau_im + rng.uniform(lo, hi, k)


# ---------------------------------------------------------------- lattice


def lattice_sum_g2(tau_im: float, R: int) -> float:
    """60 sum' omega^-4 over the lattice points inside |m|, |k| <= R (square shells)."""
    m = np.arange(-R, R + 1, dtype=float)
    total = 0.0
    for k in range(-R, R + 1):
        w = m + 1j * tau_im * k
        if k == 0:
            w = w[m != 0]
        total += float(np.sum(w**-4.0).real)
    return 60.0 * total


def g2_oracle(tau_im: float, R: int = 400) -> float:
    """Square-truncated lattice sum extrapolated in R (error of the truncation ~ R^-2)."""
    s1, s2 = lattice_sum_g2(tau_im, R), lattice_sum_g2(tau_im, 2 * R)
    return s2 + (s2 - s1) / 3.0


def lattice_checks(tau_im: float, rng) -> list[Check]:
    L = build_lattice(tau_im)
    z = rng.uniform(-0.5, 0.5, 100) + 1j * tau_im * rng.uniform(-0.5, 0.5, 100)
    z = z[np.abs(z) > 0.05]
    p, p1 = wp(L, z), wp_prime(L, z)
    curve = np.abs(p1**2 - (4 * p**3 - L.g2 * p - L.g3)) / np.maximum(1.0, np.abs(p1) ** 2)
    e1, e2, e3 = L.e1, L.e2, L.e3
    sym = max(
        abs(e1 + e2 + e3),
        abs(L.g2 + 4 * (e1 * e2 + e2 * e3 + e3 * e1)) / max(1.0, abs(L.g2)),
        abs(L.g3 - 4 * e1 * e2 * e3) / max(1.0, abs(L.g2) ** 1.5),
    )
    oracle = g2_oracle(tau_im)
    return [
        Check.below("lattice: curve equation (relative, 100 points)", float(np.max(curve)), 1e-9),
        Check.below("lattice: e1+e2+e3 and g2/g3 symmetric functions", sym, 1e-10),
        Check.below("lattice: g2 vs Eisenstein lattice sum (relative)", abs(L.g2 - oracle) / abs(oracle), 1e-8),
    ]


# ---------------------------------------------------------------- general families


def _recurrence_checks(fam: EOPFamily, tag: str, rng, perturb: bool) -> list[Check]:
    N = fam.N
    out = []
    co5, co7 = extract_five_term(fam), extract_seven_term(fam)
    if perturb:
        co5 = co5.perturbed("a", 5, 0.1)
    z = _gamma_points(fam.lattice, rng, 50)
    r5 = max(float(residual_five_term(fam, co5, n, z).max()) for n in range(2, min(7, N - 1)))
    r7 = max(float(residual_seven_term(fam, co7, n, z).max()) for n in range(2, N - 2))
    ea = max(abs(co5.A(n + 1) - np.sqrt(fam.h[n + 2] / fam.h[n])) for n in range(2, N - 1))
    ep = max(abs(co7.P(n + 3) + 2 * np.sqrt(fam.h[n + 3] / fam.h[n])) for n in [0] + list(range(2, N - 2)))
    positive = all(co5.A(n) > 0 for n in range(3, N)) and all(co7.P(n) < 0 for n in range(5, N + 1))
    M = build_matrix_recurrence(co5)
    rm = max(float(matrix_recurrence_residual(fam, M, n, z).max()) for n in range(0, (N - 3) // 2 + 1))
    ab = max(
        max(verify_curve_coupling(co5, co7, n, fam.lattice).values()) for n in coupling_range(N)
    )
    out += [
        Check.below(f"{tag} five-term: coefficient symmetry", co5.max_asymmetry, 1e-9),
        Check.below(f"{tag} five-term: band leak below n-2", lower_band_leak(fam), 1e-9),
        Check.below(f"{tag} five-term: residual, n=2..6, 50 points", r5, 1e-8),
        Check.below(f"{tag} five-term: a_(n+1) = sqrt(h_(n+2)/h_n)", ea, 1e-8),
        Check.below(f"{tag} five-term: matrix form residual", rm, 1e-8),
        Check.below(f"{tag} seven-term: band leak below n-3", lower_band_leak(fam, "wpp"), 1e-9),
        Check.below(f"{tag} seven-term: residual, 50 points", r7, 1e-8),
        Check.below(f"{tag} seven-term: p_(n+3) = -2 sqrt(h_(n+3)/h_n)", ep, 1e-8),
        Check.truth(f"{tag} signs: a_n > 0 and p_n < 0", positive),
        Check.below(f"{tag} curve coupling: 13-term tables, interior n", ab, 1e-7),
    ]
    try:
        rec = shohat_favard_reconstruct(co5, co7, fam.h[0], N, fam.lattice)
        rt = float(np.max(np.abs(rec.coeff_matrix(fam.coeffs.shape[1]) - fam.coeffs)))
        out.append(Check.below(f"{tag} reconstruction: round trip", rt, 1e-7))
    except InconsistentCoefficients as exc:
        out.append(Check(f"{tag} reconstruction: round trip", float("inf"), 1e-7, False, str(exc)))
    try:
        shohat_favard_reconstruct(co5, co7.perturbed("q", 4, 0.05), fam.h[0], N, fam.lattice)
        caught = False
    except InconsistentCoefficients:
        caught = True
    out.append(Check.truth(f"{tag} reconstruction: perturbed q_4 rejected", caught))
    return out


def _cd_checks(fam: EOPFamily, tag: str, rng) -> list[Check]:
    L = fam.lattice
    t = np.linspace(0.03, 0.97, 20)
    X, Y = np.meshgrid(0.5j * L.tau_im + t, 0.5j * L.tau_im + t)
    gap = np.abs(np.real(wp(L, X) - wp(L, Y)))
    mask = gap >= 1e-4
    co5 = extract_five_term(fam)
    cd = conf = 0.0
    for n in range(4, fam.N + 1):
        K = CDKernel(fam, n, co5)
        cd = max(cd, float(np.max(np.abs(kernel_cd(K, X[mask], Y[mask]) - kernel_sum(K, X[mask], Y[mask])))))
        xs = _gamma_points(L, rng, 20)
        conf = max(conf, float(np.max(np.abs(kernel_confluent(K, xs) - kernel_sum(K, xs, xs)))))
    centre = 0.5 + 0.5j * L.tau_im
    derived = [kernel_degenerate(CDKernel(fam, n, co5), centre) / kernel_sum(CDKernel(fam, n, co5), centre, centre)
               for n in range(4, fam.N + 1)]
    swapped = [swapped_bracket_ratio(CDKernel(fam, n, co5), centre) for n in range(4, fam.N + 1)]
    spread = float(np.max(swapped) - np.min(swapped))
    out = [
        Check.below(f"{tag} CD: closed form vs sum, 20x20 grid, n=4..8", cd, 1e-8),
        Check.below(f"{tag} CD: confluent vs sum", conf, 1e-7),
        Check.below(f"{tag} CD: degenerate-point form / sum - 1", float(np.max(np.abs(np.array(derived) - 1))), 1e-7,
                    "swapped-bracket ratios " + ", ".join(f"{r:.6g}" for r in swapped)
                    + f"; spread {spread:.2e}"),
    ]
    n = fam.N - 1
    tr = max(abs(trace(fam, m) - member_count(m)) for m in range(1, fam.N))
    rep = max(reproducing_residual(fam, n, *_gamma_points(L, rng, 2)) for _ in range(10))
    dets, sq = [], 0.0
    for _ in range(20):
        m = int(rng.integers(1, 5))
        pts = _gamma_points(L, rng, m)
        dets.append(gram_determinant(fam, n, pts))
    for _ in range(10):
        pts = _gamma_points(L, rng, 3)
        g, s = gram_determinant(fam, kernel_for_points(3), pts), square_determinant(fam, pts)
        sq = max(sq, abs(g - s) / abs(s))
    co = co5
    spec = 0.0
    for deg in (3, 5, 7):
        if deg <= fam.N:
            for t0 in find_gamma_zeros(fam, deg).gamma_zeros:
                spec = max(spec, spectral_residual(co, fam, deg - 1, 0.5j * L.tau_im + t0))
    out += [
        Check.below(f"{tag} DPP: |trace - member count|", tr, 1e-6),
        Check.below(f"{tag} DPP: reproducing property, 10 pairs", rep, 1e-7),
        Check.above(f"{tag} DPP: Gram determinant, 20 sets of size <= 4", min(dets), -1e-10),
        Check.below(f"{tag} DPP: determinant = squared determinant (relative)", sq, 1e-6),
        Check.below(f"{tag} CD: pentadiagonal compressed eigenproblem at zeros", spec, 1e-7),
    ]
    return out


def _rhp_checks(fam: EOPFamily, tag: str, rng) -> list[Check]:
    L = fam.lattice
    co5 = extract_five_term(fam)
    Y = assemble_Y(fam, 5)
    jumps = [jump_residual(Y, 0.3, e) for e in (1e-2, 1e-3, 1e-4)]
    mono = all(b < a for a, b in zip(jumps, jumps[1:]))
    # P_n C_{n-1} - C_n P_{n-1} cancels like |z|^-n near the pole, so stay |z| >= 0.1 away
    z = rng.uniform(-0.5, 0.5, 20) + 1j * L.tau_im * rng.uniform(-0.45, 0.45, 20)
    z = z[np.abs(z) > 0.1]
    dc = det_constant(Y, z)
    res = 0.0
    for n in range(5, min(7, fam.N) + 1):
        for _ in range(10):
            x, y = rng.uniform(0.05, 0.95, 2)
            while abs(x - y) < 0.05 or abs(x + y - 1) < 0.05:
                x, y = rng.uniform(0.05, 0.95, 2)
            res = max(res, cd_rhp_identity(fam, co5, n, x, y))
    return [
        Check.truth(f"{tag} RHP: jump residual decreases over eps", mono,
                    ", ".join(f"{j:.2e}" for j in jumps)),
        Check.below(f"{tag} RHP: det Y_5 - wp spread", float(np.max(np.abs(dc - dc.mean()))), 1e-8),
        Check.below(f"{tag} RHP: CD identity, n=5..7, 10 pairs", res, 1e-6),
    ]


def _zero_checks(fam: EOPFamily, tag: str) -> list[Check]:
    counts_ok, margin, abel, resid = True, np.inf, 0.0, 0.0
    for n in range(2, fam.N + 1):
        zs = complete_zero_set(fam, n)
        counts_ok &= len(zs.gamma_zeros) == expected_gamma_count(n)
        counts_ok &= len(zs.real_zeros) == n % 2
        margin = min(margin, min(zs.margins))
        resid = max(resid, max(zs.residuals))
        abel = max(abel, abel_sum_check(zs, fam.lattice))
    return [
        Check.truth(f"{tag} zeros: parity count law, n=2..{fam.N}", counts_ok),
        Check.above(f"{tag} zeros: simplicity margin |pi_n'| / max|pi_n|", margin, 1e-8),
        Check.below(f"{tag} zeros: refinement residual", resid, 1e-10),
        Check.below(f"{tag} zeros: Abel sum", abel, 1e-8),
    ]


def _symmetric_checks(fam: EOPFamily, tag: str, rng) -> list[Check]:
    L = fam.lattice
    co5, co7 = extract_five_term(fam), extract_seven_term(fam)
    z = _gamma_points(L, rng, 30)
    par = max(max(abs(v) for v in co5.b.values()), max(abs(v) for v in co7.q.values()),
              max(abs(v) for v in co7.s.values()))
    t3 = max(float(three_term_check(fam, co5, n, z).max()) for n in range(0, fam.N - 1) if n != 1)
    t4 = max(float(four_term_check(fam, co7, n, z).max()) for n in range(0, fam.N - 2) if n != 1)
    eig, inter, delta = 0.0, np.inf, 0.0
    specs = {}
    for n in range(1, fam.N // 2 + 1):
        J = build_jacobi(co5, n)
        specs[n] = jacobi_spectrum(J)
        eig = max(eig, float(np.max(np.abs(specs[n].values - zero_values(fam, n)))))
        if n > 1:
            inter = min(inter, interlacing_check(specs[n], specs[n - 1])[1])
        dm = christoffel_weights(J, fam, specs[n])
        delta = max(delta, float(np.max(np.abs(dm.gram(fam) - np.eye(n)))))
    mom = compute_moments(fam.rule, fam.weight, L, 12)
    heine_det = heine_int = 0.0
    for k in range(0, 3):
        for mode in ("even", "odd"):
            r = heine_verify(fam, mom, k, mode)
            heine_det = max(heine_det, r.gs_vs_det)
            heine_int = max(heine_int, r.gs_vs_integral, r.det_vs_integral)
    for k in (3, 4):
        if 2 * k <= fam.N:
            heine_det = max(heine_det, heine_verify(fam, mom, k, "even", integral=False).gs_vs_det)
    Z2 = partition_function(fam, 2)
    zq = abs(Z2 - partition_function(fam, 2, "norms")) / Z2
    detid = max(determinantal_identity(fam, _gamma_points(L, rng, 2), Z2) for _ in range(10))
    out = [
        Check.below(f"{tag} symmetric: b, q, s vanish", par, 1e-9),
        Check.below(f"{tag} symmetric: three-term residual", t3, 1e-8),
        Check.below(f"{tag} symmetric: four-term residual", t4, 1e-8),
        Check.below(f"{tag} symmetric: Jacobi eigenvalues vs wp(zeros)", eig, 1e-8),
        Check.truth(f"{tag} symmetric: strict interlacing up to n={fam.N // 2}", inter > 0, f"margin {inter:.3e}"),
        Check.below(f"{tag} symmetric: discrete measure delta_ij", delta, 1e-7),
        Check.below(f"{tag} symmetric: Heine determinant vs Gram-Schmidt", heine_det, 1e-6),
        Check.below(f"{tag} symmetric: Heine integral vs other routes (k<=2)", heine_int, 1e-5),
        Check.below(f"{tag} symmetric: Z_2 quadrature vs 2! h_0 h_2", zq, 1e-6),
        Check.below(f"{tag} symmetric: determinantal identity with Z_2", detid, 1e-6),
    ]
    if fam.weight.is_unity:
        worst = 0.0
        for n in range(2, fam.N):
            ce = curious_identity_check(fam, n)
            small = [abs(v) for j, v in ce.coeffs.items() if j <= n - 2]
            worst = max([worst, ce.reconstruction] + small)
        out.append(Check.below(f"{tag} symmetric: derivative expansion, j <= n-2 vanish", worst, 1e-8))
    return out


def family_checks(fam: EOPFamily, rng, perturb: bool = False, symmetric_suite: bool = False) -> list[Check]:
    tag = f"[{fam.weight}]"
    gram = float(np.max(np.abs(fam.gram() - np.eye(len(fam.members())))))
    out = [Check.below(f"{tag} orthonormality: Gram matrix", gram, 1e-8)]
    out += _recurrence_checks(fam, tag, rng, perturb)
    out += _cd_checks(fam, tag, rng)
    out += _rhp_checks(fam, tag, rng)
    out += _zero_checks(fam, tag)
    if fam.weight.symmetric or symmetric_suite:
        out += _symmetric_checks(fam, tag, rng)
    return out


def run_suite(cfg: SuiteConfig) -> Report:
    rng = np.random.default_rng(cfg.seed)
    report = Report(cfg)
    report.checks += lattice_checks(cfg.tau_im, rng)
    for w in cfg.weights:
        fam = build_family(cfg.tau_im, w, cfg.N, cfg.quad)
        report.checks += family_checks(fam, rng, cfg.perturb, cfg.symmetric_suite)
    return report
