import numpy as np
import pytest
from pydantic import ValidationError

from mexpand.cli.schema import LevelSpec
from mexpand.config import AnalysisConfig, ConfigModel, QuadratureConfig, get_config
from mexpand.exceptions import ConfigError
from mexpand.utils import as_complex, dumps, loads
from mexpand.validator import Failure, Success, TypeValidator


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("MEXPAND_FIT_WINDOW", "6")
    monkeypatch.setenv("MEXPAND_GL_NODES", "16")
    assert AnalysisConfig().fit_window == 6
    assert QuadratureConfig().nodes_per_panel == 16


def test_config_singleton():
    assert get_config() is get_config()
    assert get_config().to_json()["analysis"]["strang_fix_radius"] == 3


def test_dumps_is_sorted_and_encodes_complex_numbers():
    data = {"b": 1 + 2j, "a": np.float64(0.5), "c": np.array([1.0, 2.0])}
    text = dumps(data)
    assert text.index(b'"a"') < text.index(b'"b"')
    assert loads(text) == {"a": 0.5, "b": [1.0, 2.0], "c": [1.0, 2.0]}


def test_as_complex():
    assert as_complex([0.5, -1.0]) == 0.5 - 1.0j
    assert as_complex("1+2i") == 1 + 2j
    assert as_complex(3) == 3 + 0j


def test_type_validator():
    validator = TypeValidator(LevelSpec)
    assert isinstance(validator.validate_json(b'{"j_min": 1, "j_max": 4}'), Success)
    match validator.validate_object({"j_min": 3, "j_max": 1}):
        case Failure(message):
            assert "j_max" in message
        case _:
            raise AssertionError("expected a validation failure")


def test_failure_unwrap_raises_config_error():
    with pytest.raises(ConfigError) as excinfo:
        TypeValidator(LevelSpec).validate_object({"j_min": "low"}).unwrap()
    assert excinfo.value.exit_code == 1
    assert "j_min" in excinfo.value.detail


def test_config_model_requires_a_flag():
    assert ConfigModel(debug=True).model_dump(exclude_none=True) == {"debug": True}
    with pytest.raises(ValidationError):
        ConfigModel()


def test_validator_lists_every_rejected_field():
    result = TypeValidator(LevelSpec).validate_object({"j_min": "low", "j_max": "high"})
    assert isinstance(result, Failure)
    assert result.message.startswith("2 problems")
    assert 'j_min: Input should be a valid integer, unable to parse string as an integer (got "low")' in result.message
