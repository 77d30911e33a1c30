import numpy as np
import pytest

from thermowave.assembly import assemble_dynamic
from thermowave.coefficients import ModelParameters
from thermowave.spectra import (
    compute_spectrum,
    match_eigenvalues,
    min_distance_table,
    per_mode_eigenvalues,
)

# roots of x^3 + x^2 + 1.25 x + 1 (mode j=1 at coupling 0.5),
# computed independently with 50-digit polynomial root finding
MODE1_HALF_COUPLING = np.array([
    -0.8760858894420933,
    -0.0619570552789534 - 1.0665842299315189j,
    -0.0619570552789534 + 1.0665842299315189j,
])


def spectrum_of(system, n, gamma, **kw):
    return compute_spectrum(assemble_dynamic(ModelParameters(system, gamma, n), **kw))


class TestComputeSpectrum:
    def test_uncoupled_spectrum_is_wave_plus_heat(self):
        n = 5
        rep = spectrum_of(2, n, 0.0)
        expected = []
        for j in range(1, n + 1):
            expected += [1j * j, -1j * j, -float(j * j)]
        d = match_eigenvalues(rep.eigenvalues, np.array(expected))
        assert d.max() <= 1e-10

    def test_system2_single_mode_cubic_roots(self):
        rep = spectrum_of(2, 1, 0.5)
        d = match_eigenvalues(rep.eigenvalues, MODE1_HALF_COUPLING)
        assert d.max() <= 1e-12

    @pytest.mark.parametrize("gamma", [0.1, 0.5, 0.9])
    def test_system1_single_mode(self, gamma):
        rep = spectrum_of(1, 1, gamma)
        d = match_eigenvalues(rep.eigenvalues, np.array([1j, -1j, -1.0]))
        assert d.max() <= 1e-12

    def test_eigenvalue_count_and_conjugate_symmetry(self):
        rep = spectrum_of(1, 12, 0.7)
        assert len(rep.eigenvalues) == 36
        d = match_eigenvalues(rep.eigenvalues, np.conj(rep.eigenvalues))
        assert d.max() <= 1e-12

    def test_residual_certificates(self):
        rep = spectrum_of(1, 20, 0.5)
        assert np.all(rep.residuals <= rep.tol)

    @pytest.mark.parametrize("system", [1, 2])
    def test_left_half_plane(self, system):
        rep = spectrum_of(system, 16, 0.5)
        assert rep.abscissa <= 1e-10

    def test_literal_blocks_are_unstable(self):
        rep = spectrum_of(1, 8, 0.5, paper_literal_blocks=True)
        assert rep.abscissa > 0.05

    def test_tolerance_domain(self):
        dyn = assemble_dynamic(ModelParameters(2, 0.5, 2))
        with pytest.raises(ValueError):
            compute_spectrum(dyn, tol=1e-5)
        with pytest.raises(ValueError):
            compute_spectrum(dyn, tol=0.0)


class TestPerModeOracle:
    def test_uncoupled_factorization(self):
        w = per_mode_eigenvalues(1, 0.0)
        d = match_eigenvalues(w, np.array([1j, -1j, -1.0]))
        assert d.max() <= 1e-14

    def test_real_root_bracket(self):
        # sign change of the cubic between -0.9 and -0.8 at coupling 0.5
        p = lambda x: x**3 + x**2 + 1.25 * x + 1.0
        assert p(-0.8) > 0.0 > p(-0.9)
        w = per_mode_eigenvalues(1, 0.5)
        real_root = w[np.abs(w.imag) < 1e-14].real
        assert len(real_root) == 1 and -0.9 < real_root[0] < -0.8

    def test_frozen_roots(self):
        d = match_eigenvalues(per_mode_eigenvalues(1, 0.5), MODE1_HALF_COUPLING)
        assert d.max() <= 1e-13

    def test_high_mode_perturbation_rate(self):
        # oscillatory pair real part ~ -g^2 / (2 (j^2 + 1)) at j = 16
        g, j = 0.5, 16
        w = per_mode_eigenvalues(j, g)
        pair = w[np.abs(w.imag) > j - 0.5]
        approx = -g * g / (2.0 * (j * j + 1.0))
        assert pair.real.max() == pytest.approx(approx, rel=0.05)

    @pytest.mark.parametrize("n,gamma", [(4, 0.3), (8, 0.7)])
    def test_matches_dense_solver(self, n, gamma):
        d = match_eigenvalues(spectrum_of(2, n, gamma).eigenvalues,
                              per_mode_eigenvalues(n, gamma))
        assert d.max() <= 1e-10


class TestMatching:
    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        w = rng.standard_normal(20) + 1j * rng.standard_normal(20)
        shuffled = w[rng.permutation(20)]
        assert match_eigenvalues(w, shuffled).max() <= 1e-15

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            match_eigenvalues(np.ones(3, complex), np.ones(4, complex))


class TestDistanceTable:
    def test_rows_and_asymptote(self):
        rows = min_distance_table(2, 0.5, [4, 8])
        assert [r.n for r in rows] == [4, 8]
        assert all(r.asymptote == -0.125 for r in rows)

    def test_system2_distance_near_perturbation_value(self):
        row = min_distance_table(2, 0.5, [8])[0]
        assert row.min_neg_re == pytest.approx(0.125 / 65.0, rel=0.1)

    def test_distance_positive_for_dissipative_convention(self):
        for row in min_distance_table(1, 0.5, [4, 8]):
            assert row.min_neg_re > 0.0
