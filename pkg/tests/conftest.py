import json
import subprocess
import sys

import pytest


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario JSON file into the test's temp dir and return its path."""

    counter = {"n": 0}

    def _write(scheme, network, **overrides):
        counter["n"] += 1
        payload = {"schema_version": 1, "scheme": scheme, "network": network}
        payload.update(overrides)
        path = tmp_path / f"scenario{counter['n']}.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return _write


def run_cli(*args):
    """Run the CLI in a subprocess; returns the completed process."""
    return subprocess.run(
        [sys.executable, "-m", "anece_lab.cli", *args],
        capture_output=True,
        text=True,
    )
