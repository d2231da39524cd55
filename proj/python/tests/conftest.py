import json
import os
import pathlib
import subprocess

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
FIXTURES = pathlib.Path(os.environ.get("WIRETAP_FIXTURES", ROOT / "tests" / "fixtures"))
SCHEMAS = pathlib.Path(os.environ.get("WIRETAP_SCHEMAS", ROOT / "schemas"))


def _find_cli():
    env = os.environ.get("WIRETAP_CLI")
    if env:
        return env
    guess = ROOT / "build" / "wiretap"
    return str(guess) if guess.exists() else None


@pytest.fixture(scope="session")
def fixtures():
    return FIXTURES


@pytest.fixture(scope="session")
def schema():
    return json.loads((SCHEMAS / "report.schema.json").read_text())


@pytest.fixture(scope="session")
def cli():
    exe = _find_cli()
    if exe is None:
        pytest.skip("wiretap executable not built")

    def run(*args):
        p = subprocess.run([exe, *map(str, args)], capture_output=True, text=True)
        return p.returncode, p.stdout, p.stderr

    return run
