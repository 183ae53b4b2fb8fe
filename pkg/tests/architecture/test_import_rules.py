from __future__ import annotations

import os
import shutil
import subprocess
import sys
from pathlib import Path
from tempfile import TemporaryDirectory

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
_VENV_LINT_IMPORTS = Path(sys.executable).with_name("lint-imports")
LINT_IMPORTS_BIN = (
    str(_VENV_LINT_IMPORTS)
    if _VENV_LINT_IMPORTS.exists()
    else shutil.which("lint-imports")
)

COMPUTATION_CONFIG = """
[importlinter]
root_package = lumicell

[contract:computation_is_standalone]
name = computation packages must not depend on orchestration, CLI or telemetry
type = forbidden
source_modules =
    lumicell.phy
    lumicell.mac
    lumicell.channel
    lumicell.gpr
    lumicell.localization
forbidden_modules =
    lumicell.harness
    lumicell.commands
    lumicell.cli
    lumicell.telemetry
    lumicell.artifacts
"""

HARNESS_CONFIG = """
[importlinter]
root_package = lumicell

[contract:harness_below_commands]
name = lumicell.harness must not depend on commands, CLI or telemetry
type = forbidden
source_modules =
    lumicell.harness
forbidden_modules =
    lumicell.commands
    lumicell.cli
    lumicell.telemetry
"""

NO_PANDAS_CONFIG = """
[importlinter]
root_package = lumicell
include_external_packages = True

[contract:computation_no_pandas]
name = computation packages work on numpy arrays, tables live in artifacts
type = forbidden
source_modules =
    lumicell.phy
    lumicell.mac
    lumicell.channel
    lumicell.gpr
    lumicell.localization
forbidden_modules =
    pandas
"""


def _run_importlinter(config_body: str) -> None:
    if not LINT_IMPORTS_BIN:
        pytest.skip("lint-imports entrypoint not found in PATH")

    env = os.environ.copy()
    env["PYTHONPATH"] = f"{REPO_ROOT}{os.pathsep}{env.get('PYTHONPATH', '')}"

    with TemporaryDirectory() as tmpdir:
        config_path = Path(tmpdir) / ".importlinter"
        config_path.write_text(config_body)

        result = subprocess.run(
            [LINT_IMPORTS_BIN, "--config", str(config_path)],
            cwd=REPO_ROOT,
            capture_output=True,
            text=True,
            env=env,
        )

    assert result.returncode == 0, (
        "Import-linter rule violation:\n"
        f"stdout:\n{result.stdout}\n"
        f"stderr:\n{result.stderr}"
    )


def test_computation_is_isolated_from_orchestration() -> None:
    _run_importlinter(COMPUTATION_CONFIG)


def test_harness_does_not_reach_up() -> None:
    _run_importlinter(HARNESS_CONFIG)


def test_computation_does_not_use_pandas() -> None:
    _run_importlinter(NO_PANDAS_CONFIG)
