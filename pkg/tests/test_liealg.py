import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehholonomy.liealg import (
    MAX_TWO_J,
    AlgebraCoeff,
    ColoredRep,
    build_generators,
    commutator_pair_sum,
    spectrum_iE,
    trace_exp,
    trace_exp_matrix_oracle,
)

half_integers = st.integers(min_value=0, max_value=10).map(lambda n: n / 2)


def comm(a, b):
    return a @ b - b @ a


class TestGenerators:
    def test_trivial_rep(self):
        rep = build_generators(0)
        assert rep.dim == 1
        assert np.all(rep.generators == 0)
        assert spectrum_iE(rep) == pytest.approx([0.0])

    def test_rejects_bad_spin(self):
        with pytest.raises(ValueError):
            build_generators(0.3)
        with pytest.raises(ValueError):
            build_generators(-1)
        with pytest.raises(ValueError):
            build_generators(MAX_TWO_J / 2 + 1)

    @pytest.mark.parametrize("two_j", range(0, 11))
    def test_commutation_table(self, two_j):
        g = build_generators(two_j / 2).generators
        cyclic = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
        for a, b, c in cyclic:
            assert np.max(np.abs(comm(g[a], g[b]) - g[c])) < 1e-12

    @pytest.mark.parametrize("two_j", range(0, 11))
    def test_skew_hermitian(self, two_j):
        for gk in build_generators(two_j / 2).generators:
            assert np.max(np.abs(gk + gk.conj().T)) < 1e-12

    @pytest.mark.parametrize("two_j", range(0, 11))
    def test_casimir(self, two_j):
        j = two_j / 2
        rep = build_generators(j)
        total = sum(gk @ gk for gk in rep.generators)
        expected = -j * (j + 1) * np.eye(rep.dim)
        assert np.max(np.abs(total - expected)) < 1e-12

    def test_half_spin_casimir_value(self):
        rep = build_generators(0.5)
        total = sum(gk @ gk for gk in rep.generators)
        assert np.max(np.abs(total + 0.75 * np.eye(2))) < 1e-14

    @pytest.mark.parametrize("two_j", range(1, 11))
    def test_cyclic_commutator_sum_closes(self, two_j):
        rep = build_generators(two_j / 2)
        total = rep.generators[0] + rep.generators[1] + rep.generators[2]
        assert np.max(np.abs(commutator_pair_sum(rep) - total)) < 1e-12


class TestSpectrum:
    def test_half_spin(self):
        assert spectrum_iE(build_generators(0.5)) == pytest.approx(
            [-math.sqrt(3) / 2, math.sqrt(3) / 2], abs=1e-12)

    def test_spin_one(self):
        assert spectrum_iE(build_generators(1)) == pytest.approx(
            [-math.sqrt(3), 0.0, math.sqrt(3)], abs=1e-12)

    @pytest.mark.parametrize("two_j", range(0, 11))
    def test_sqrt3_ladder(self, two_j):
        j = two_j / 2
        want = math.sqrt(3) * np.arange(-j, j + 0.5)
        assert spectrum_iE(build_generators(j)) == pytest.approx(want, abs=1e-10)

    @given(j=half_integers)
    def test_negation_symmetric(self, j):
        spec = spectrum_iE(build_generators(j))
        assert np.max(np.abs(np.sort(-spec) - spec)) < 1e-10


class TestTraceExp:
    @given(j=half_integers)
    def test_identity_at_zero(self, j):
        assert trace_exp(j, 0.0) == pytest.approx(2 * j + 1)

    def test_cosh_form_at_i(self):
        assert trace_exp(0.5, 1j) == pytest.approx(2 * math.cosh(math.sqrt(3) / 2),
                                                   rel=1e-12)

    @pytest.mark.parametrize("two_j", range(1, 11))
    def test_cosh_form_general(self, two_j):
        j = two_j / 2
        spec = spectrum_iE(build_generators(j))
        positive = spec[spec > 1e-12]
        want = 2 * np.sum(np.cosh(positive)) + (1.0 if two_j % 2 == 0 else 0.0)
        assert trace_exp(j, 1j) == pytest.approx(want, rel=1e-10)

    @given(j=half_integers)
    def test_at_least_one_at_i(self, j):
        assert trace_exp(j, 1j).real >= 1.0 - 1e-12

    def test_real_theta_half_spin(self):
        for theta in (0.1, 0.7, 2.5):
            want = 2 * math.cos(math.sqrt(3) * theta / 2)
            got = trace_exp(0.5, theta)
            assert got.real == pytest.approx(want, rel=1e-12)
            assert abs(got.imag) < 1e-12

    @given(j=half_integers,
           re=st.floats(-5, 5, allow_nan=False),
           im=st.floats(-5, 5, allow_nan=False))
    def test_even_in_theta(self, j, re, im):
        theta = complex(re, im)
        a, b = trace_exp(j, theta), trace_exp(j, -theta)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


class TestMatrixOracle:
    def test_trivial(self):
        assert trace_exp_matrix_oracle(0.5, 0.0) == pytest.approx(2.0)

    def test_spin_one_imaginary(self):
        assert trace_exp_matrix_oracle(1, 1j) == pytest.approx(
            trace_exp(1, 1j), rel=1e-10)

    def test_mixed_argument(self):
        theta = 0.3 + 0.1j
        assert trace_exp_matrix_oracle(2.5, theta) == pytest.approx(
            trace_exp(2.5, theta), rel=1e-10)

    def test_hundred_random_thetas(self, rng):
        # |theta| <= 5 disk, several spins
        for _ in range(100):
            j = rng.integers(0, 11) / 2
            r = 5 * math.sqrt(rng.uniform())
            phi = rng.uniform(0, 2 * math.pi)
            theta = r * complex(math.cos(phi), math.sin(phi))
            a = trace_exp(j, theta)
            b = trace_exp_matrix_oracle(j, theta)
            assert a == pytest.approx(b, rel=1e-10, abs=1e-10)


class TestColoredRep:
    def test_dims_and_casimirs(self):
        c = ColoredRep(0.5, 1.0)
        assert (c.dim_plus, c.dim_minus) == (2, 3)
        assert c.xi_plus == pytest.approx(0.75)
        assert c.xi_minus == pytest.approx(2.0)
        assert c.key() == (1, 2)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ColoredRep(-0.5, 0.0)


class TestAlgebraCoeff:
    def test_accepts_finite(self):
        c = AlgebraCoeff(1 + 2j, -3j)
        assert c.cplus == 1 + 2j

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            AlgebraCoeff(complex("nan"), 0j)
