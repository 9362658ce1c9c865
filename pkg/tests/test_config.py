import json

import pytest

from bergman_lab.config import (DEFAULTS, ConfigError, build_measure, build_params,
                                build_quadrature, build_weight, load_config, truncations)
from bergman_lab.errors import AdmissibilityError, ParameterError
from bergman_lab.expr import ParseError
from bergman_lab.measure import total_mass


def test_defaults_load():
    cfg = load_config()
    assert cfg == DEFAULTS
    assert cfg is not DEFAULTS


def test_overrides_and_document():
    cfg = load_config(json.dumps({"p": 3, "measure": {"variant": "standard", "alpha": 1}}),
                      {"q": 4.0, "weight.alpha": 2.0, "measure.n": None})
    assert (cfg["p"], cfg["q"], cfg["weight"]["alpha"], cfg["measure"]["n"]) == (3, 4.0, 2.0, 1)


@pytest.mark.parametrize("doc", ['{"bogus": 1}', '{"measure": {"colour": 1}}', '[1]', '{bad',
                                 '{"R": 1.0}', '{"p": "two"}', '{"quadrature": {"shells": 2.5}}',
                                 '{"measure": {"variant": "nope"}}', '{"output": {"format": "xml"}}',
                                 '{"measure": {"variant": "density"}}', '{"weight": 3}'])
def test_rejects_bad_documents(doc):
    with pytest.raises(ConfigError):
        load_config(doc)


def test_bad_expression_is_a_parse_error():
    with pytest.raises(ParseError):
        load_config('{"compop": {"phi": "z +"}}')


def test_truncations():
    assert truncations(0.999) == pytest.approx((0.9, 0.99, 0.999))


def test_builders(quad):
    cfg = load_config('{"measure": {"variant": "density", "density": "2*(1-u)"}}')
    assert total_mass(build_measure(cfg), quad) == pytest.approx(1.0, abs=1e-9)
    params = build_params(cfg)
    assert params.p == 2.0 and params.truncations[-1] == 0.999
    assert build_quadrature(cfg).radial_shells == 256
    cfg = load_config('{"measure": {"variant": "atomic", "atoms": [[0.5, 0, 2]]}}')
    assert total_mass(build_measure(cfg)) == 2.0
    cfg = load_config('{"measure": {"variant": "lebesgue", "support_radius": 0.5}}')
    assert total_mass(build_measure(cfg), quad) == pytest.approx(0.25, rel=1e-12)


def test_custom_weight_from_config():
    cfg = load_config('{"weight": {"kind": "custom", "profile": "(1-u)^2", "delta": 3}}')
    w = build_weight(cfg)
    assert w(0.5) == pytest.approx(0.75 ** 2)
    cfg = load_config('{"weight": {"kind": "custom", "profile": "1+u", "delta": 1}}')
    with pytest.raises(AdmissibilityError):
        build_weight(cfg)
    assert issubclass(ConfigError, ParameterError)


def test_pullback_and_boundary_variants(quad):
    cfg = load_config('{"measure": {"variant": "pullback", "n": 2}, "compop": {"psi": "2"}}')
    assert total_mass(build_measure(cfg), quad) == pytest.approx(16.0, rel=1e-10)
    cfg = load_config('{"measure": {"variant": "boundary_atoms", "count": 10}}')
    assert build_measure(cfg).points.size == 10
