import math

import pytest

from hybell.model import (
    ChannelSpec,
    Coefficients,
    MeasurementSpec,
    StateSpec,
    validate,
)


def test_validate_passes_in_range_state():
    spec = StateSpec(nu=0.3, alpha_mag=2.1)
    assert validate(spec) is spec


def test_validate_rejects_t_line_above_one():
    with pytest.raises(ValueError, match=r"t_line out of \[0,1\]"):
        validate(ChannelSpec(t_line=1.2))


def test_validate_rejects_negative_nu():
    with pytest.raises(ValueError, match="nu out of"):
        validate(StateSpec(nu=-0.1, alpha_mag=1.0))


def test_validate_rejects_nu_above_half_pi():
    with pytest.raises(ValueError, match="nu out of"):
        validate(StateSpec(nu=math.pi / 2 + 0.01, alpha_mag=1.0))


def test_validate_rejects_negative_alpha():
    with pytest.raises(ValueError, match="alpha_mag out of"):
        validate(StateSpec(nu=0.1, alpha_mag=-1.0))


@pytest.mark.parametrize("field", ["t_line", "eta", "eta_a"])
def test_validate_names_offending_channel_field(field):
    with pytest.raises(ValueError, match=field):
        validate(ChannelSpec(**{field: -0.5}))


def test_validate_rejects_nan():
    with pytest.raises(ValueError):
        validate(ChannelSpec(eta=float("nan")))


def test_validate_rejects_zero_bin():
    with pytest.raises(ValueError, match="b out of"):
        validate(MeasurementSpec(gamma=0.0, b=0.0))


def test_validate_accepts_measurement():
    spec = MeasurementSpec(gamma=1.0, b=0.5, p_threshold=-2.0)
    assert validate(spec) is spec


def test_validate_rejects_unknown_type():
    with pytest.raises(TypeError):
        validate(object())


def test_equality_is_field_wise():
    assert StateSpec(0.3, 2.1) == StateSpec(0.3, 2.1)
    assert StateSpec(0.3, 2.1) != StateSpec(0.3, 2.2)
    assert Coefficients(0.1, 0.2, 0.3) == Coefficients(0.1, 0.2, 0.3)


def test_values_are_immutable():
    spec = ChannelSpec()
    with pytest.raises(AttributeError):
        spec.t_line = 0.5
