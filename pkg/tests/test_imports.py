import subprocess
import sys

import pytest

MODULES = [
    "mexpand.signals",
    "mexpand.diffops",
    "mexpand.dilation",
    "mexpand.numerics.box",
    "mexpand.expand",
    "mexpand.kernels",
    "mexpand.kernels.catalog",
    "mexpand.analysis.compat",
    "mexpand.analysis.convergence",
    "mexpand.analysis.norms",
    "mexpand.analysis.tails",
    "mexpand.cli.main",
]


@pytest.mark.parametrize("module", MODULES)
def test_module_imports_in_fresh_interpreter(module):
    result = subprocess.run(
        [sys.executable, "-c", f"import importlib; importlib.import_module({module!r})"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert result.returncode == 0, result.stderr
