import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eopk.errors import OffContour, WeightSyntaxError
from eopk.quadrature import (
    ExpP,
    ExpPPrime,
    Product,
    Unity,
    build_rule,
    compute_moments,
    converged_rule,
    eval_weight,
    hankel_matrix,
    inner_product,
    integrate,
    lu_det,
    parse_weight,
    weighted_sum,
)
from eopk.weierstrass import wp, wp_prime

params = st.floats(-2.0, 2.0, allow_nan=False).map(lambda x: round(x, 6))


class TestWeightDSL:
    @pytest.mark.parametrize("text, spec", [
        ("unity", Unity),
        ("exp_p:0.5", ExpP(0.5)),
        ("exp_pp:-0.3", ExpPPrime(-0.3)),
        ("prod(exp_p:1,exp_pp:0.2)", Product(ExpP(1.0), ExpPPrime(0.2))),
        ("prod(exp_p:1,prod(unity,exp_pp:2e-1))", Product(ExpP(1.0), Product(Unity, ExpPPrime(0.2)))),
    ])
    def test_parse(self, text, spec):
        assert parse_weight(text) == spec

    @pytest.mark.parametrize("text", ["", "exp", "exp_p:", "exp_p:x", "prod(unity)", "prod(unity", "gauss:1"])
    def test_reject(self, text):
        with pytest.raises(WeightSyntaxError):
            parse_weight(text)

    @given(params, params)
    def test_round_trip(self, a, b):
        spec = Product(ExpP(a), ExpPPrime(b))
        assert parse_weight(spec.to_dsl()) == spec

    def test_symmetry_flags(self):
        assert Unity.symmetric and ExpP(0.7).symmetric
        assert not ExpPPrime(0.3).symmetric
        assert ExpPPrime(0.0).symmetric and ExpPPrime(0.0).is_unity
        assert not Product(ExpP(1.0), ExpPPrime(0.2)).symmetric


class TestWeights:
    def test_positive_and_real(self, lattice):
        z = 0.5j + np.linspace(0, 1, 101)
        for w in (Unity, ExpP(0.5), ExpPPrime(0.3), Product(ExpP(-1.0), ExpPPrime(0.2))):
            v = eval_weight(w, lattice, z)
            assert np.all(np.isreal(v)) and np.all(v > 0)

    def test_product_multiplies(self, lattice):
        z = 0.5j + np.linspace(0.1, 0.9, 9)
        prod = eval_weight(Product(ExpP(0.5), ExpPPrime(0.3)), lattice, z)
        sep = eval_weight(ExpP(0.5), lattice, z) * eval_weight(ExpPPrime(0.3), lattice, z)
        assert np.allclose(prod, sep, rtol=1e-14)

    def test_off_contour(self, lattice):
        with pytest.raises(OffContour):
            eval_weight(Unity, lattice, 0.3 + 0.1j)


class TestRules:
    def test_nodes_on_gamma(self, lattice):
        r = build_rule(lattice, 64)
        assert np.allclose(r.nodes.imag, 0.5) and r.weights.sum() == pytest.approx(1.0, abs=1e-15)

    def test_mean_of_wp(self, lattice):
        # the mean of wp over a full horizontal period is -2 eta1 (= -pi for tau = i)
        r = build_rule(lattice)
        assert integrate(r, lambda z: wp(lattice, z)) == pytest.approx(-np.pi, abs=1e-13)

    def test_exact_derivative(self, lattice):
        r = build_rule(lattice)
        assert abs(integrate(r, lambda z: wp_prime(lattice, z))) < 1e-11

    def test_spectral_convergence(self, lattice):
        w = ExpP(0.5)
        vals = [inner_product(build_rule(lattice, n), w, lattice, lambda z: wp(lattice, z) ** 3, 1.0)
                for n in (64, 128, 256)]
        assert abs(vals[1] - vals[2]) < 1e-10 * abs(vals[2])

    def test_converged_rule(self, lattice):
        r = converged_rule(lattice, ExpPPrime(0.3), 8, N=32)
        assert r.order >= 64

    def test_summation_order(self, lattice):
        r = build_rule(lattice)
        f = np.real(wp(lattice, r.nodes)) ** 4
        s = r.shuffled(3)
        g = np.real(wp(lattice, s.nodes)) ** 4
        assert weighted_sum(r.weights, f) == pytest.approx(weighted_sum(s.weights, g), rel=1e-13)


class TestMoments:
    def test_nuhat_from_curve(self, lattice):
        r = build_rule(lattice)
        mom = compute_moments(r, ExpP(0.5), lattice, 3)
        nu = mom.nu
        expect = nu[3:] - lattice.g2 / 4 * nu[1:-2] - lattice.g3 / 4 * nu[:-3]
        assert np.allclose(mom.nuhat[: len(expect)], expect, rtol=1e-10)

    def test_hankel_positive(self, lattice):
        mom = compute_moments(build_rule(lattice), Unity, lattice, 4)
        assert np.all(mom.hankel > 0) and np.all(mom.hankel_hat > 0)

    def test_hankel_ratio_is_norm(self, unity):
        mom = compute_moments(unity.rule, unity.weight, unity.lattice, 3)
        # monic even norms are ratios of consecutive Hankel determinants
        for k in (0, 1, 2):
            assert mom.hankel[k + 1] / mom.hankel[k] == pytest.approx(unity.h[2 * k], rel=1e-8)

    def test_lu_det(self):
        A = hankel_matrix([1.0, 2.0, 5.0, 14.0, 42.0], 3)
        assert lu_det(A) == pytest.approx(np.linalg.det(A))

    def test_csv(self, lattice):
        text = compute_moments(build_rule(lattice, 64), Unity, lattice, 1).to_csv()
        assert text.splitlines()[0] == "k,nu,nuhat,hankel,hankel_hat"
