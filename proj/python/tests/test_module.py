import json

import pytest

wiretap = pytest.importorskip("wiretap")


def test_version():
    assert wiretap.__version__


def test_in_process_cli_matches(fixtures):
    r = wiretap.run("outer", "--network", fixtures / "parallel.json")
    assert r["result"]["bounds"][0]["value"] == "1"
    with pytest.raises(wiretap.CliError) as e:
        wiretap.run("amplify", "--weak", fixtures / "weak_toy.json", "--L", "1")
    assert e.value.code == 2


def test_outer_bound_from_dict(fixtures):
    net = json.loads((fixtures / "single_edge.json").read_text())
    assert wiretap.outer_bound(net)["value"] == "0"


def test_helpers():
    assert wiretap.elemental_count(3) == 9
    assert wiretap.elemental_count(4) == 28
    bits, exact = wiretap.min_entropy(["1/2", "1/4", "1/4"])
    assert exact == "1" and bits == 1.0
    assert wiretap.total_variation(["1/2", "1/4", "1/8", "1/8"], ["1/4"] * 4) == "1/4"
    assert wiretap.extractor_length(12, "3/4", "1/8") == 3
    # [I | T] keeps the first n3 input bits when the tail is zero
    assert wiretap.extract(6, 3, 0b101, 0b10110, "identity") == 0b101
    with pytest.raises(ValueError):
        wiretap.min_entropy(["1/2", "1/3"])
