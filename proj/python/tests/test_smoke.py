import json
import math

import pytest

import finslerkit


def test_builtin_names():
    assert finslerkit.builtin_names() == [
        "euclidean", "klein", "funk", "berwald", "spherical", "bryant"]


def test_funk_value_and_curvature():
    funk = finslerkit.builtin("funk")
    # phi(0.5, 1, 0.5) = 2 at x = (0.5, 0), y = (1, 0).
    assert funk.F([0.5, 0.0], [1.0, 0.0]) == pytest.approx(2.0, rel=1e-14)
    assert funk.flag_curvature([0.2, 0.1], [0.3, -0.7]) == pytest.approx(-0.25, abs=1e-9)


def test_euclidean_tensor_is_identity():
    g = finslerkit.builtin("euclidean").fundamental_tensor([0.3, 0.4, 0.1], [1.0, 2.0, -1.0])
    for i in range(3):
        for j in range(3):
            assert g[i][j] == pytest.approx(1.0 if i == j else 0.0, abs=1e-14)


def test_bryant_parameter_is_validated():
    with pytest.raises(finslerkit.ConfigError):
        finslerkit.builtin("bryant", {"alpha": 2.0})


def test_unknown_name_suggests():
    with pytest.raises(finslerkit.ConfigError, match="funk"):
        finslerkit.builtin("fnuk")


def test_from_phi_parse_error_has_offset():
    with pytest.raises(finslerkit.ParseError):
        finslerkit.from_phi("bad", "u + s")


def test_sampling_is_deterministic_and_in_range():
    a = finslerkit.sample_domain(3, 50, 42, 1.0)
    b = finslerkit.sample_domain(3, 50, 42, 1.0)
    assert a == b
    for x, y in a:
        r = math.sqrt(sum(t * t for t in x))
        u = math.sqrt(sum(t * t for t in y))
        assert 0.05 <= r <= 0.95
        assert 0.1 <= u <= 2.0


def test_run_json_report():
    config = {
        "metric": "klein",
        "dimension": 2,
        "sampling": {"count": 40, "seed": 7},
        "checks": ["symmetry", {"name": "curvature", "params": {"lambda": -1}}],
    }
    ok, text = finslerkit.run_json(json.dumps(config))
    report = json.loads(text)
    assert ok and report["pass"]
    assert [r["check"] for r in report["records"]] == ["symmetry", "curvature"]
