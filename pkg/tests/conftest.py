from pathlib import Path

import pytest

from mexpand import dilation, signals
from mexpand.kernels import catalog
from mexpand.utils import dumps

RESOURCE_DIR = Path(__file__).parent / "resource"


@pytest.fixture
def resource_dir() -> Path:
    return RESOURCE_DIR


@pytest.fixture
def dyadic():
    return dilation.dyadic(1)


@pytest.fixture
def quincunx():
    return dilation.quincunx()


@pytest.fixture
def gaussian():
    return signals.gaussian(dim=1, sigma=1.0)


@pytest.fixture
def triangle():
    return catalog.triangle(1)


@pytest.fixture
def write_config(tmp_path):
    """Write an experiment document and return its path."""

    def _write(document: dict, name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_bytes(dumps(document))
        return path

    return _write
