import json

import numpy as np
import pytest

from ruelle_kit import SpanFunction, gamma, tau
from ruelle_kit.maps import is_infinity


def test_gamma_decomposes_into_tau():
    a = 0.4 + 1.3j
    for z in (0.2 + 0.1j, -3 + 2j, 5.0):
        lhs = gamma(a, z)
        rhs = (a - 1) * tau(0, z) - a * tau(1, z) + tau(a, z)
        assert abs(lhs - rhs) < 1e-14 * max(1, abs(lhs))


def test_merge_and_purge():
    f = SpanFunction.build([(2.0, 1.0), (2.0 + 1e-13, 0.5), (3.0, 1e-20)])
    assert f.gamma_terms == ((2 + 0j, 1.5 + 0j),)
    assert SpanFunction.build([(2.0, 1.0), (2.0, -1.0)]).is_zero()


def test_gamma_poles_at_zero_or_one_rejected():
    with pytest.raises(ValueError):
        SpanFunction.gamma_of(1.0)
    with pytest.raises(ValueError):
        SpanFunction.gamma_of(0.0)


def test_linear_combinations_evaluate_pointwise():
    f = SpanFunction.build([(3, 2.0)], [(0.5j, -1.0)], 0.25)
    g = SpanFunction.build([(3, -1.0), (-2, 1j)])
    z = 0.7 - 0.3j
    h = f.combine(g, 2.0, -3.0)
    expect = 2 * f(z) - 3 * g(z)
    assert abs(h(z) - expect) < 1e-13
    assert abs((f + g)(z) - (f(z) + g(z))) < 1e-13
    assert abs((f * 2j)(z) - 2j * f(z)) < 1e-13


def test_pole_evaluation_is_infinity():
    assert is_infinity(SpanFunction.gamma_of(3)(3.0))


def test_coefficient_vector_and_json_round_trip():
    f = SpanFunction.build([(2 / 3, -0.25), (4 / 3, 0.5)])
    v = f.coefficient_vector([2 / 3, 4 / 3])
    np.testing.assert_allclose(v, [-0.25, 0.5])
    with pytest.raises(KeyError):
        f.coefficient_vector([2 / 3])
    back = SpanFunction.from_json(json.loads(json.dumps(f.to_json())))
    assert back == f


def test_gamma_span_decays_like_cube():
    f = SpanFunction.build([(2.0, 1.0), (-1 + 1j, 0.3)])
    r1, r2 = abs(f(1e3)), abs(f(1e4))
    assert 900 < r1 / r2 < 1100
