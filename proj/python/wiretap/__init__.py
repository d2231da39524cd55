"""Capacity-region toolkit for wiretap networks."""
import json

from . import _core

__version__ = _core.__version__


class CliError(RuntimeError):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def run(*args, check=True):
    """Run a tool command in process and return the parsed report."""
    code, out, err = _core.run_cli([str(a) for a in args])
    if check and code != 0:
        raise CliError(code, err.strip())
    return json.loads(out) if out.strip() else None


def outer_bound(network, mode="zero", weights=()):
    """network: dict or JSON text."""
    text = network if isinstance(network, str) else json.dumps(network)
    return json.loads(_core.outer_bound(text, mode, [str(w) for w in weights]))


elemental_count = _core.elemental_count
min_entropy = _core.min_entropy
total_variation = _core.total_variation
extract = _core.extract
extractor_length = _core.extractor_length
