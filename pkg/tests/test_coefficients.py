import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermowave.coefficients import (
    CoefficientField,
    DiagonalField,
    ModelParameters,
    ThermoCoefficients,
    affine_cos,
    affine_sine,
    constant,
    field_from_descriptor,
    laminate,
    piecewise,
    sample_field,
    validate_field,
)


class TestSampling:
    def test_affine_sine_quarter(self):
        f = affine_sine(2.0, 1.0)
        assert sample_field(f, 0.25) == pytest.approx(3.0, abs=1e-14)

    def test_piecewise_periodic_wrap(self):
        f = piecewise([1.0, 3.0])
        assert sample_field(f, 1.75) == 3.0

    def test_affine_cos_at_integer(self):
        f = affine_cos(2.0, 1.0)
        assert sample_field(f, 1.0) == pytest.approx(3.0, abs=1e-14)

    def test_piecewise_left_closed_cells(self):
        f = piecewise([1.0, 3.0])
        assert f.sample(0.0) == 1.0
        assert f.sample(0.5) == 3.0  # breakpoint belongs to the right cell
        assert f.sample(1.0) == 1.0  # frac(1) = 0
        assert f.sample(-0.25) == 3.0

    def test_vectorized_sampling(self):
        f = affine_cos(2.0, 1.0)
        y = np.linspace(0, 2, 33)
        np.testing.assert_allclose(f.sample(y), 2.0 + np.cos(2 * np.pi * y), atol=1e-13)

    def test_diagonal_pair(self):
        lam = laminate(piecewise([1.0, 3.0]), affine_cos(2.0, 1.0))
        v1, v2 = sample_field(lam, 0.0)
        assert (v1, v2) == (1.0, 3.0)

    @given(st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
    def test_periodicity_property(self, y):
        for f in (affine_sine(2.0, 1.0), affine_cos(3.0, 0.5), piecewise([1.0, 2.0, 5.0])):
            assert abs(f.sample(y) - f.sample(y + 1.0)) < 2e-13

    def test_periodicity_on_grid_is_tight(self):
        y = np.arange(4096) / 4096.0
        for f in (affine_sine(2.0, 1.0), piecewise([1.0, 3.0])):
            assert np.abs(f.sample(y + 1.0) - f.sample(y)).max() <= 1e-14


class TestValidation:
    def test_constant_coupling_passes(self):
        assert validate_field(constant(0.5), role="coupling").passed

    def test_coupling_out_of_range_fails(self):
        rep = validate_field(constant(1.5), role="coupling")
        assert not rep.passed
        assert "0<gamma<1 violated" in rep.violations[0]

    def test_elliptic_with_declared_alpha(self):
        # range [1, 3] inside [1/3, 3]
        rep = validate_field(affine_cos(2.0, 1.0, alpha=1.0 / 3.0))
        assert rep.passed

    def test_elliptic_alpha_too_large_fails(self):
        rep = validate_field(affine_cos(2.0, 1.0, alpha=1.5))
        assert not rep.passed
        assert any("lower bound" in v or "upper bound" in v for v in rep.violations)

    def test_nonpositive_field_fails(self):
        rep = validate_field(affine_sine(0.5, 1.0))
        assert not rep.passed

    def test_laminate_validates_both_entries(self):
        rep = validate_field(laminate(constant(2.0), constant(-1.0, alpha=0.1)))
        assert not rep.passed
        assert any(v.startswith("[a2]") for v in rep.violations)

    def test_thermo_coefficients_joint_report(self):
        co = ThermoCoefficients(
            a=affine_cos(2.0, 1.0), b=constant(1.0),
            c=constant(1.0), d=constant(1.0), gamma=constant(1.5),
        )
        rep = co.validate()
        assert not rep.passed
        assert all(v.startswith("gamma:") for v in rep.violations)

    def test_zero_coupling_control_admitted_on_request(self):
        co = ThermoCoefficients(
            a=constant(1.0), b=constant(1.0),
            c=constant(1.0), d=constant(1.0), gamma=constant(0.0),
        )
        assert not co.validate().passed
        assert co.validate(allow_zero_coupling=True).passed


class TestDescriptors:
    def test_round_trip(self):
        f = field_from_descriptor({"kind": "affine-cos", "p": 2, "q": 1})
        assert f.sample(0.0) == pytest.approx(3.0)
        g = field_from_descriptor({"kind": "piecewise", "values": [1, 3]})
        assert g.sample(0.75) == 3.0
        h = field_from_descriptor(
            {"kind": "laminate", "a1": {"kind": "constant", "value": 2},
             "a2": {"kind": "constant", "value": 5}})
        assert isinstance(h, DiagonalField)

    def test_bad_descriptors_raise(self):
        with pytest.raises(ValueError):
            field_from_descriptor({"p": 2})
        with pytest.raises(ValueError):
            field_from_descriptor({"kind": "spline"})
        with pytest.raises(ValueError):
            CoefficientField("affine-cos", (1.0,))
        with pytest.raises(ValueError):
            CoefficientField("piecewise")


class TestHelpers:
    def test_exact_means(self):
        assert affine_sine(2.0, 1.0).exact_mean() == 2.0
        assert piecewise([1.0, 3.0]).exact_mean() == 2.0

    def test_value_range(self):
        assert affine_cos(2.0, 1.0).value_range() == (1.0, 3.0)
        assert piecewise([1.0, 3.0]).value_range() == (1.0, 3.0)

    def test_reciprocal_antiderivative_matches_quadrature(self):
        from scipy.integrate import quad

        f = piecewise([1.0, 3.0, 2.0])
        for y in (0.2, 0.5, 0.9, 1.7, 2.0):
            expected = quad(lambda s: 1.0 / f.sample(s), 0.0, y, limit=200)[0]
            assert f.reciprocal_antiderivative(y) == pytest.approx(expected, abs=1e-9)

    def test_reciprocal_antiderivative_none_for_smooth(self):
        assert affine_cos(2.0, 1.0).reciprocal_antiderivative(0.5) is None


class TestModelParameters:
    def test_valid(self):
        p = ModelParameters(1, 0.5, 8)
        assert (p.system_id, p.gamma, p.n_modes) == (1, 0.5, 8)

    def test_zero_coupling_control(self):
        assert ModelParameters(2, 0.0, 4).gamma == 0.0

    @pytest.mark.parametrize("args", [(3, 0.5, 8), (1, 1.0, 8), (1, -0.1, 8), (1, 0.5, 0)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            ModelParameters(*args)
