import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermowave.assembly import (
    assemble_dynamic,
    coupling_matrix,
    matrix_csv_name,
    mode_diagonal,
)
from thermowave.coefficients import ModelParameters


class TestModeDiagonal:
    def test_n3(self):
        np.testing.assert_array_equal(mode_diagonal(3), np.diag([1.0, 2.0, 3.0]))

    def test_n1(self):
        np.testing.assert_array_equal(mode_diagonal(1), [[1.0]])

    def test_n8_trace(self):
        assert mode_diagonal(8).trace() == 36.0

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            mode_diagonal(0)


class TestCouplingMatrix:
    def test_system1_entry_12(self):
        F = coupling_matrix(1, 2)
        # -4/pi * (1*2)/(1-4) = 8/(3 pi)
        assert F[0, 1] == pytest.approx(8.0 / (3.0 * np.pi), rel=1e-15)

    def test_system1_even_distance_vanishes(self):
        F = coupling_matrix(1, 4)
        assert F[0, 2] == 0.0 and F[1, 3] == 0.0
        assert np.all(np.diag(F) == 0.0)

    def test_system2_identity(self):
        np.testing.assert_array_equal(coupling_matrix(2, 4), np.eye(4))

    def test_system1_antisymmetric_exact(self):
        F = coupling_matrix(1, 17)
        assert np.array_equal(F.T, -F)

    def test_unknown_system(self):
        with pytest.raises(ValueError):
            coupling_matrix(3, 4)


class TestAssemble:
    def test_system2_n1(self):
        dyn = assemble_dynamic(ModelParameters(2, 0.5, 1))
        np.testing.assert_array_equal(
            dyn.matrix, [[0.0, 1.0, 0.0], [-1.0, 0.0, -0.5], [0.0, 0.5, -1.0]])

    def test_system1_n1_coupling_vanishes(self):
        dyn = assemble_dynamic(ModelParameters(1, 0.5, 1))
        np.testing.assert_array_equal(
            dyn.matrix, [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])

    @pytest.mark.parametrize("system", [1, 2])
    def test_zero_coupling_uncouples(self, system):
        n = 5
        dyn = assemble_dynamic(ModelParameters(system, 0.0, n))
        blocks = dyn.blocks()
        assert np.all(blocks[("v", "theta")] == 0.0)
        assert np.all(blocks[("theta", "v")] == 0.0)
        np.testing.assert_array_equal(blocks[("u", "v")], mode_diagonal(n))
        np.testing.assert_array_equal(blocks[("theta", "theta")], -mode_diagonal(n) ** 2)

    @pytest.mark.parametrize("system", [1, 2])
    def test_block_layout(self, system):
        n, g = 6, 0.3
        dyn = assemble_dynamic(ModelParameters(system, g, n))
        b = dyn.blocks()
        D = mode_diagonal(n)
        F = coupling_matrix(system, n)
        for key in (("u", "u"), ("u", "theta"), ("theta", "u"), ("v", "v")):
            assert np.all(b[key] == 0.0)
        np.testing.assert_array_equal(b[("u", "v")], D)
        np.testing.assert_array_equal(b[("v", "u")], -D)
        np.testing.assert_array_equal(b[("v", "theta")], -g * F)
        np.testing.assert_array_equal(b[("theta", "v")], g * F.T)
        np.testing.assert_array_equal(b[("theta", "theta")], -D @ D)

    def test_matrix_is_read_only(self):
        dyn = assemble_dynamic(ModelParameters(2, 0.5, 3))
        with pytest.raises(ValueError):
            dyn.matrix[0, 0] = 1.0

    def test_csv_name(self):
        dyn = assemble_dynamic(ModelParameters(1, 0.25, 8))
        assert matrix_csv_name(dyn) == "A_1_8_0.25.csv"


class TestDissipativity:
    @settings(max_examples=30)
    @given(
        system=st.sampled_from([1, 2]),
        n=st.sampled_from([1, 3, 8, 24]),
        gamma=st.floats(min_value=0.01, max_value=0.99),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_quadratic_form_identity(self, system, n, gamma, seed):
        # z^T A z must cancel to exactly -theta^T D^2 theta
        dyn = assemble_dynamic(ModelParameters(system, gamma, n))
        rng = np.random.default_rng(seed)
        z = rng.standard_normal(3 * n)
        z /= np.linalg.norm(z)
        theta = z[2 * n:]
        d2 = np.arange(1.0, n + 1.0) ** 2
        assert abs(z @ (dyn.matrix @ z) + theta @ (d2 * theta)) <= 1e-12

    def test_literal_blocks_break_the_identity(self):
        n, g = 8, 0.5
        dyn = assemble_dynamic(ModelParameters(1, g, n), paper_literal_blocks=True)
        b = dyn.blocks()
        F = coupling_matrix(1, n)
        np.testing.assert_array_equal(b[("theta", "v")], g * F)  # as printed, no transpose
        rng = np.random.default_rng(7)
        worst = 0.0
        d2 = np.arange(1.0, n + 1.0) ** 2
        for _ in range(50):
            z = rng.standard_normal(3 * n)
            z /= np.linalg.norm(z)
            theta = z[2 * n:]
            worst = max(worst, abs(z @ (dyn.matrix @ z) + theta @ (d2 * theta)))
        assert worst > 1e-3  # the printed variant is not a contraction generator
