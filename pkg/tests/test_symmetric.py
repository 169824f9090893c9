import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eopk.cd_kernel import CDKernel, kernel_sum
from eopk.eop import build_family
from eopk.errors import (
    DimensionTooLarge,
    InversionFailure,
    NotSymmetric,
    RequiresUnityWeight,
)
from eopk.quadrature import compute_moments
from eopk.symmetric import (
    build_jacobi,
    christoffel_weights,
    curious_identity_check,
    determinantal_identity,
    even_cd_kernel,
    even_kernel_sum,
    four_term_check,
    heine_integral,
    heine_verify,
    interlacing_check,
    invert_wp,
    jacobi_spectrum,
    nuhat_from_nu,
    partition_function,
    split_family,
    three_term_check,
    zero_values,
)
from eopk.weierstrass import wp
from eopk.zeros import find_gamma_zeros

from conftest import gamma_points


@pytest.fixture(scope="module")
def moments(families):
    return {w: compute_moments(f.rule, f.weight, f.lattice, 6) for w, f in families.items()}


class TestSplit:
    def test_parity_split(self, sym_fam):
        s = split_family(sym_fam)
        assert s.leak < 1e-9
        assert [len(c) for c in s.even] == [1, 2, 3, 4, 5]
        assert all(c[-1] == pytest.approx(1.0) for c in s.even + s.odd)

    def test_rejects_nonsymmetric(self, families):
        with pytest.raises(NotSymmetric):
            split_family(families["exp_pp:0.3"])

    def test_three_term(self, sym_fam, coeffs, rng):
        co5, _ = coeffs(sym_fam)
        z = gamma_points(sym_fam.lattice, rng, 30)
        for n in [0, 2, 3, 4, 5, 6]:
            assert three_term_check(sym_fam, co5, n, z).max() < 1e-8

    def test_four_term(self, sym_fam, coeffs, rng):
        _, co7 = coeffs(sym_fam)
        z = gamma_points(sym_fam.lattice, rng, 30)
        for n in [0, 2, 3, 4, 5]:
            assert four_term_check(sym_fam, co7, n, z).max() < 1e-8


class TestJacobi:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_eigenvalues_are_zero_images(self, sym_fam, coeffs, n):
        co5, _ = coeffs(sym_fam)
        spec = jacobi_spectrum(build_jacobi(co5, n))
        assert np.max(np.abs(spec.values - zero_values(sym_fam, n))) < 1e-8

    @pytest.mark.parametrize("n", [1, 2])
    def test_odd_family(self, sym_fam, coeffs, n):
        co5, _ = coeffs(sym_fam)
        spec = jacobi_spectrum(build_jacobi(co5, n, "odd"))
        t = [s for s in find_gamma_zeros(sym_fam, 2 * n + 3).gamma_zeros if 1e-9 < s < 0.5 - 1e-9]
        vals = np.sort(np.real(wp(sym_fam.lattice, 0.5j + np.array(t))))
        assert np.max(np.abs(spec.values - vals)) < 1e-8

    def test_interlacing(self, sym_fam, coeffs):
        co5, _ = coeffs(sym_fam)
        specs = [jacobi_spectrum(build_jacobi(co5, n)) for n in range(1, 5)]
        for outer, inner in zip(specs[1:], specs):
            ok, margin = interlacing_check(outer, inner)
            assert ok and margin > 0

    def test_spectrum_inside_gamma_range(self, sym_fam, coeffs):
        co5, _ = coeffs(sym_fam)
        L = sym_fam.lattice
        vals = jacobi_spectrum(build_jacobi(co5, 4)).values
        assert np.all(vals > L.e3) and np.all(vals < L.e2)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.0, 0.5))
    def test_invert_wp(self, t):
        L = build_family(1.0, "unity", 2).lattice
        v = float(np.real(wp(L, 0.5j + t))) if t > 0 else L.e3
        z = invert_wp(L, v)
        assert float(np.real(wp(L, z))) == pytest.approx(v, rel=1e-9, abs=1e-9)

    def test_invert_out_of_range(self, lattice):
        with pytest.raises(InversionFailure):
            invert_wp(lattice, lattice.e1)


class TestGaussQuadrature:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_delta_identity(self, sym_fam, coeffs, n):
        co5, _ = coeffs(sym_fam)
        dm = christoffel_weights(build_jacobi(co5, n), sym_fam)
        assert np.max(np.abs(dm.gram(sym_fam) - np.eye(n))) < 1e-7
        assert dm.masses.sum() == pytest.approx(sym_fam.h[0], rel=1e-10)

    def test_exact_for_polynomials_in_wp(self, sym_fam, coeffs):
        # n-point rule integrates wp^k exactly for k <= 2n - 1
        co5, _ = coeffs(sym_fam)
        n = 3
        dm = christoffel_weights(build_jacobi(co5, n), sym_fam)
        mom = compute_moments(sym_fam.rule, sym_fam.weight, sym_fam.lattice, 3)
        p = np.real(wp(sym_fam.lattice, dm.atoms))
        for k in range(2 * n):
            assert np.dot(dm.masses, p**k) == pytest.approx(mom.nu[k], rel=1e-9)


class TestHeine:
    def test_nuhat_relation(self, sym_fam, moments):
        mom = moments[str(sym_fam.weight)]
        L = sym_fam.lattice
        nh = nuhat_from_nu(mom.nu, L.g2, L.g3)
        assert np.max(np.abs(nh - mom.nuhat[: len(nh)]) / np.abs(mom.nuhat[: len(nh)])) < 1e-10

    @pytest.mark.parametrize("k", [0, 1, 2])
    @pytest.mark.parametrize("mode", ["even", "odd"])
    def test_three_routes(self, sym_fam, moments, k, mode):
        r = heine_verify(sym_fam, moments[str(sym_fam.weight)], k, mode)
        assert r.gs_vs_det < 1e-6
        assert r.gs_vs_integral < 1e-5 and r.det_vs_integral < 1e-5

    @pytest.mark.parametrize("k", [3, 4])
    def test_determinant_only(self, moments, families, k):
        r = heine_verify(families["unity"], moments["unity"], k, "even", integral=False)
        assert r.gs_vs_det < 1e-6 and r.gs_vs_integral is None

    def test_dimension_cap(self, unity, moments):
        with pytest.raises(DimensionTooLarge):
            heine_integral(unity, moments["unity"], 3, [0.5j + 0.2])
        with pytest.raises(DimensionTooLarge):
            heine_verify(unity, moments["unity"], 3, "even", integral=True)


class TestEnsemble:
    def test_even_cd_kernel(self, sym_fam, coeffs, rng):
        co5, _ = coeffs(sym_fam)
        for n in (1, 2, 3, 4):
            x, y = gamma_points(sym_fam.lattice, rng, 2, 0.05, 0.45)
            assert even_cd_kernel(sym_fam, co5, n, x, y) == pytest.approx(
                float(even_kernel_sum(sym_fam, n, x, y)), rel=1e-8, abs=1e-10
            )

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_partition_function(self, sym_fam, n):
        assert partition_function(sym_fam, n) == pytest.approx(partition_function(sym_fam, n, "norms"), rel=1e-6)

    def test_determinantal_identity(self, sym_fam, rng):
        Z2 = partition_function(sym_fam, 2)
        for _ in range(10):
            assert determinantal_identity(sym_fam, gamma_points(sym_fam.lattice, rng, 2), Z2) < 1e-6

    def test_determinantal_identity_three(self, sym_fam, rng):
        Z3 = partition_function(sym_fam, 3, "norms")
        assert determinantal_identity(sym_fam, gamma_points(sym_fam.lattice, rng, 3), Z3) < 1e-6

    def test_even_kernel_inside_full_kernel(self, sym_fam):
        # the even kernel is a partial sum of the full one: both reproduce on the diagonal
        x = 0.5j + 0.23
        full = float(kernel_sum(CDKernel(sym_fam, 8), x, x))
        even = float(even_kernel_sum(sym_fam, 4, x, x)) / float(sym_fam.weight_at(x))
        assert 0 < even < full


class TestDerivativeExpansion:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
    def test_only_three_terms(self, unity, n):
        ce = curious_identity_check(unity, n)
        assert all(abs(v) < 1e-8 for j, v in ce.coeffs.items() if j <= n - 2)
        assert ce.reconstruction < 1e-8

    def test_parity_pattern(self, unity):
        # differentiation flips parity about the centre, so j = n vanishes as well
        ce = curious_identity_check(unity, 4)
        assert abs(ce.coeffs[4]) < 1e-8 and abs(ce.coeffs[5]) > 1e-3

    def test_requires_unity(self, families):
        with pytest.raises(RequiresUnityWeight):
            curious_identity_check(families["exp_p:0.5"], 3)
