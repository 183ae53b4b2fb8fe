"""
Unit-тесты для модуля error_mapper.
"""

import pytest
from pydantic import ValidationError

from lumicell.error_mapper import EXIT_ACCEPTANCE, EXIT_IO, EXIT_VALIDATION, ErrorMapper
from lumicell.exceptions import (
    AcceptanceError,
    ConfigParseError,
    DegenerateGeometryError,
    InconsistentObservationError,
    InvalidPayloadError,
    ScenarioError,
    UnknownBeaconError,
)
from lumicell.models import GPHyperparams


class TestErrorMapper:
    """Тесты для ErrorMapper."""

    def test_map_unknown_beacon_error(self):
        """Маппинг UnknownBeaconError."""
        error = UnknownBeaconError("no map", details={"beacon_ids": [7]})
        result = ErrorMapper.map_exception(error)
        assert result.error_type == "UNKNOWN_BEACON"
        assert result.message == "no map"
        assert result.details == {"beacon_ids": [7]}

    def test_map_config_parse_error(self):
        """Маппинг ConfigParseError."""
        error = ConfigParseError("unknown config key 'mac.x'", details={"key": "mac.x"})
        result = ErrorMapper.map_exception(error)
        assert result.error_type == "CONFIG_PARSE"
        assert result.details == {"key": "mac.x"}

    def test_map_non_dict_details(self):
        """Детали не-словарь заворачиваются в value."""
        error = InvalidPayloadError("bad payload", details=70000)
        result = ErrorMapper.map_exception(error)
        assert result.details == {"value": 70000}

    def test_scenario_error_inherits_cause_type(self):
        """ScenarioError сохраняет error_type исходной ошибки."""
        cause = DegenerateGeometryError("coincide")
        error = ScenarioError("at point 3", cause=cause, details={"point_index": 3})
        result = ErrorMapper.map_exception(error)
        assert result.error_type == "DEGENERATE_GEOMETRY"
        assert result.details == {"point_index": 3}
        assert ErrorMapper.exit_code_for_exception(error) == EXIT_VALIDATION

    def test_map_value_error(self):
        """Маппинг ValueError."""
        result = ErrorMapper.map_exception(ValueError("frames must be >= 1"))
        assert result.error_type == "VALIDATION_ERROR"
        assert result.message == "frames must be >= 1"
        assert result.details["exception_type"] == "ValueError"

    def test_map_pydantic_validation_error(self):
        """ValidationError проверяется раньше ValueError."""
        with pytest.raises(ValidationError) as exc_info:
            GPHyperparams(sigma_f2=-1.0, length_scale=1.0, sigma_n2=0.1)
        result = ErrorMapper.map_exception(exc_info.value)
        assert result.error_type == "VALIDATION_ERROR"
        assert "validation error" in result.message
        assert result.details["errors"]

    def test_map_key_error(self):
        """Маппинг KeyError."""
        result = ErrorMapper.map_exception(KeyError("beacon"))
        assert result.error_type == "VALIDATION_ERROR"
        assert "beacon" in result.message

    def test_map_os_error(self):
        """Маппинг OSError."""
        error = FileNotFoundError(2, "No such file", "missing.cfg")
        result = ErrorMapper.map_exception(error)
        assert result.error_type == "IO_ERROR"
        assert result.details["filename"] == "missing.cfg"

    def test_map_generic_exception(self):
        """Маппинг неизвестного исключения."""
        result = ErrorMapper.map_exception(RuntimeError("boom"))
        assert result.error_type == "UNKNOWN"
        assert result.message == "boom"


@pytest.mark.parametrize(
    "exc, expected_type, expected_code",
    [
        (AcceptanceError("median out of range"), "ACCEPTANCE_FAILED", EXIT_ACCEPTANCE),
        (InconsistentObservationError("zero mass"), "OBSERVATION_INCONSISTENT", EXIT_VALIDATION),
        (ValueError("x"), "VALIDATION_ERROR", EXIT_VALIDATION),
        (PermissionError("denied"), "IO_ERROR", EXIT_IO),
        (RuntimeError("x"), "UNKNOWN", EXIT_VALIDATION),
    ],
)
def test_error_type_and_exit_code(exc, expected_type, expected_code):
    assert ErrorMapper.get_error_type_for_exception(exc) == expected_type
    assert ErrorMapper.exit_code_for_exception(exc) == expected_code
