import math
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hiddentime.errors import AliasingError, DomainError
from hiddentime.hopf import (
    WindingNumber,
    bw_product,
    bw_residual,
    compute_winding,
    loop_samples,
    quantization_check,
    symmetrize,
    symmetry_defect,
    transition_phase,
    winding_of_product,
    winding_turns,
)
from hiddentime.dirac_verify import dirac_residual
from hiddentime.spinors import Branch, negative_energy_spinor, plane_wave, positive_energy_spinor, spinor


def unwrap_oracle(samples):
    """Independent winding estimate via numpy's phase unwrapping."""
    phase = np.unwrap(np.angle(samples))
    return (phase[-1] - phase[0]) / (2 * math.pi)


class TestWindingNumber:
    def test_exact_fraction(self):
        assert WindingNumber.of(0.3).g == Fraction(3, 10)
        assert WindingNumber.of("1/2").admissible
        assert not WindingNumber.of(0.25).admissible
        assert WindingNumber.of(-1.5).twice == -3

    @pytest.mark.parametrize("g", [0, 0.5, 1, 1.5, 2, -0.5, -1, -1.5, 0.25, 0.3, 0.7, 1.1])
    def test_admissible_iff_quantized(self, g):
        w = WindingNumber.of(g)
        assert w.admissible == quantization_check(w)


class TestTransitionPhase:
    def test_trivial_bundle(self):
        assert transition_phase(0, 1.234) == 1.0

    def test_half_integer_single_valued(self):
        assert transition_phase(Fraction(1, 2), 2 * math.pi) == pytest.approx(1.0, abs=1e-15)

    def test_quarter_not_single_valued(self):
        assert transition_phase(Fraction(1, 4), 2 * math.pi) == pytest.approx(-1.0, abs=1e-15)

    @given(st.floats(-3, 3), st.floats(0, 2 * math.pi))
    def test_unit_modulus(self, g, phi):
        assert abs(abs(transition_phase(g, phi)) - 1.0) < 1e-15

    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 2 * math.pi))
    def test_homomorphism(self, g1, g2, phi):
        lhs = transition_phase(WindingNumber.of(g1).g + WindingNumber.of(g2).g, phi)
        assert abs(lhs - transition_phase(g1, phi) * transition_phase(g2, phi)) < 1e-12


class TestQuantization:
    @pytest.mark.parametrize("g", [Fraction(1, 2), 1, 0, -1, Fraction(-1, 2)])
    def test_allowed(self, g):
        assert quantization_check(g)

    @pytest.mark.parametrize("g", [0.3, 0.25, 0.7])
    def test_forbidden(self, g):
        assert not quantization_check(g)


class TestComputeWinding:
    def test_constant(self):
        assert compute_winding(np.ones(360)) == 0

    @pytest.mark.parametrize("g, expected", [(Fraction(1, 2), -1), (1, -2), (Fraction(3, 2), -3), (-1, 2)])
    def test_dense_loop(self, g, expected):
        samples = loop_samples(g, 360)
        assert unwrap_oracle(samples) == pytest.approx(expected, abs=1e-9)
        assert compute_winding(samples) == expected

    @pytest.mark.parametrize("g", [0.25, 0.3, 0.7])
    def test_fractional_turns_for_forbidden(self, g):
        turns = winding_turns(loop_samples(g, 360))
        assert turns == pytest.approx(unwrap_oracle(loop_samples(g, 360)), abs=1e-9)
        assert abs(turns - round(turns)) >= 0.1

    def test_aliasing(self):
        with pytest.raises(AliasingError):
            # step of exactly -pi per sample
            compute_winding(loop_samples(2, 8))

    def test_too_few_samples(self):
        with pytest.raises(AliasingError):
            compute_winding([1, 1j, -1])


class TestProductWinding:
    def test_two_halves(self):
        assert winding_of_product([Fraction(1, 2), Fraction(1, 2)]).g == 1

    @pytest.mark.parametrize("n", range(1, 6))
    def test_n_halves(self, n):
        assert winding_of_product([Fraction(1, 2)] * n).g == Fraction(n, 2)

    def test_empty(self):
        assert winding_of_product([]).g == 0

    @given(st.lists(st.sampled_from([0, 0.5, 1, 1.5, 0.25]), max_size=5), st.floats(0, 2 * math.pi))
    def test_pointwise_product(self, gs, phi):
        total = winding_of_product(gs)
        expected = np.prod([transition_phase(g, phi) for g in gs]) if gs else 1.0
        assert abs(transition_phase(total, phi) - expected) < 1e-12


class TestBargmannWigner:
    def test_order_one_is_input(self, gammas):
        u = positive_energy_spinor(1.2, (0.1, 0.2, 0.3))
        M = bw_product([u])
        np.testing.assert_array_equal(M.components, u.components)
        assert bw_residual(M, gammas, 1) == pytest.approx(dirac_residual(plane_wave(u), gammas), abs=1e-15)

    def test_rest_pair(self):
        u = positive_energy_spinor(1.0, (0, 0, 0))
        M = bw_product([u, u])
        expected = np.zeros((4, 4))
        expected[0, 0] = 1
        np.testing.assert_array_equal(M.components, expected)

    def test_boosted_pair_component(self):
        u = positive_energy_spinor(1.0, (0, 0, 0.6))
        M = bw_product([u, u])
        assert M.components[2, 2] == pytest.approx(0.125, abs=1e-15)
        np.testing.assert_allclose(M.components, np.outer(u.components, u.components), atol=0)

    def test_winding_tracks_order(self):
        u = positive_energy_spinor(1.0, (0, 0, 0.6))
        assert bw_product([u] * 3).winding.g == Fraction(3, 2)

    def test_mixed_momenta_rejected(self):
        with pytest.raises(DomainError):
            bw_product([positive_energy_spinor(1.0, (0, 0, 0.1)), positive_energy_spinor(1.0, (0, 0, 0.2))])

    def test_index_range(self, gammas):
        M = bw_product([positive_energy_spinor(1.0, (0, 0, 0))] * 2)
        with pytest.raises(IndexError):
            bw_residual(M, gammas, 3)
        with pytest.raises(IndexError):
            bw_residual(M, gammas, 0)

    def test_matrix_on_index_brute_force(self, gammas):
        u = positive_energy_spinor(1.0, (0.2, -0.1, 0.5))
        M = bw_product([u, u])
        op = gammas.slash(u.momentum.vector) - 2.0 * np.eye(4)
        brute = np.einsum("ij,jk->ik", op, M.components)
        assert bw_residual(M, gammas, 1, mass=2.0) == pytest.approx(np.linalg.norm(brute))
        brute2 = np.einsum("ij,kj->ki", op, M.components)
        assert bw_residual(M, gammas, 2, mass=2.0) == pytest.approx(np.linalg.norm(brute2))

    @pytest.mark.parametrize("n", [2, 3])
    def test_on_shell_every_index(self, gammas, kinematics_1000, n):
        for case in kinematics_1000[:50]:
            u = positive_energy_spinor(case["m"], case["v"])
            M = bw_product([u] * n)
            for k in range(1, n + 1):
                assert bw_residual(M, gammas, k) < 1e-10

    def test_off_shell_operator(self, gammas):
        u = positive_energy_spinor(1.0, (0.3, 0.0, 0.4))
        M = bw_product([u, u])
        for k in (1, 2):
            assert bw_residual(M, gammas, k, mass=2.0) > 0.5 * M.norm()

    def test_negative_factors(self, gammas):
        w = negative_energy_spinor(1.0, (0.3, 0.1, 0.4))
        M = bw_product([w, w])
        assert bw_residual(M, gammas, 1) < 1e-12 and bw_residual(M, gammas, 2) < 1e-12

    @pytest.mark.parametrize("n", [2, 3])
    def test_identical_factors_symmetric(self, n):
        u = spinor(2.0, (0.3, -0.6, 0.2), Branch.POS_DOWN)
        M = bw_product([u] * n)
        for perm in permutations(range(n)):
            np.testing.assert_allclose(np.transpose(M.components, perm), M.components, atol=1e-12)
        assert symmetry_defect(M) < 1e-12

    def test_symmetrized_mixed_product(self, gammas):
        up = spinor(1.0, (0.1, 0.5, -0.2), Branch.POS_UP)
        down = spinor(1.0, (0.1, 0.5, -0.2), Branch.POS_DOWN)
        raw = bw_product([up, down])
        assert symmetry_defect(raw) > 0.1
        S = symmetrize(raw)
        assert symmetry_defect(S) < 1e-15
        assert bw_residual(S, gammas, 1) < 1e-12 and bw_residual(S, gammas, 2) < 1e-12
