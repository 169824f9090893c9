import numpy as np
import pytest

from eopk.eop import build_family
from eopk.errors import IncompleteZeroSet, InvalidDegree
from eopk.zeros import (
    ZeroSet,
    abel_sum_check,
    complete_zero_set,
    expected_gamma_count,
    find_gamma_zeros,
    find_real_zero,
    lattice_distance,
)

COUNT_WEIGHTS = ("unity", "exp_p:0.5", "exp_pp:0.3")


@pytest.fixture(scope="module")
def zero_sets(families):
    return {w: {n: complete_zero_set(families[w], n) for n in range(2, 9)} for w in COUNT_WEIGHTS}


class TestCounts:
    @pytest.mark.parametrize("w", COUNT_WEIGHTS)
    def test_parity_law(self, zero_sets, w):
        for n, zs in zero_sets[w].items():
            assert len(zs.gamma_zeros) == expected_gamma_count(n)
            assert len(zs.real_zeros) == n % 2

    @pytest.mark.parametrize("w", COUNT_WEIGHTS)
    def test_simple(self, zero_sets, w):
        assert min(min(zs.margins) for zs in zero_sets[w].values()) > 1e-8

    @pytest.mark.parametrize("w", COUNT_WEIGHTS)
    def test_refined(self, zero_sets, families, w):
        fam = families[w]
        for n, zs in zero_sets[w].items():
            assert max(zs.residuals) < 1e-10
            for t in zs.real_zeros:
                assert abs(fam.eval(n, complex(t))) < 1e-9

    def test_finer_grid_agrees(self, families, zero_sets):
        zs = find_gamma_zeros(families["exp_pp:0.3"], 8, grid_size=8192)
        assert np.allclose(zs.gamma_zeros, zero_sets["exp_pp:0.3"][8].gamma_zeros, atol=1e-11)


class TestStructure:
    @pytest.mark.parametrize("w", COUNT_WEIGHTS)
    def test_abel_sum(self, zero_sets, families, w):
        L = families[w].lattice
        for zs in zero_sets[w].values():
            assert abel_sum_check(zs, L) < 1e-8

    def test_symmetric_odd_members(self, zero_sets):
        for w in ("unity", "exp_p:0.5"):
            for n in (3, 5, 7):
                zs = zero_sets[w][n]
                g = np.array(zs.gamma_zeros)
                assert np.min(np.abs(g)) < 1e-10 and np.min(np.abs(g - 0.5)) < 1e-10
                assert zs.real_zeros[0] == pytest.approx(0.5, abs=1e-10)

    def test_symmetric_mirror_pairs(self, zero_sets):
        g = np.array(zero_sets["unity"][6].gamma_zeros)
        assert np.allclose(np.sort((1 - g) % 1), g, atol=1e-10)

    def test_lattice_distance(self, lattice):
        assert lattice_distance(lattice, 2.0 + 3j) < 1e-12
        assert lattice_distance(lattice, 0.5 + 0.5j) == pytest.approx(np.sqrt(0.5))

    def test_incomplete_set(self, lattice):
        with pytest.raises(IncompleteZeroSet):
            abel_sum_check(ZeroSet(3, gamma_zeros=[0.1, 0.2]), lattice)

    def test_invalid(self, unity):
        with pytest.raises(InvalidDegree):
            find_gamma_zeros(unity, 1)
        with pytest.raises(InvalidDegree):
            find_real_zero(unity, 4)

    def test_other_tau(self):
        fam = build_family(0.7, "exp_pp:0.3", 8)
        for n in range(2, 9):
            zs = complete_zero_set(fam, n)
            assert len(zs.points(fam.lattice)) == n
            assert abel_sum_check(zs, fam.lattice) < 1e-8
