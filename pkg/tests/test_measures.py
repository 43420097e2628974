import json

import numpy as np
import pytest

from conftest import random_normalized_map
from ruelle_kit import (
    AtomicMeasure, RationalMap, SpanFunction, cauchy_transform, convergence_report, measure_from_span, mu_n, nu_l,
    pair, span_iterates,
)
from ruelle_kit.errors import PreconditionError, UnsupportedMapError
from ruelle_kit.maps import is_infinity
from ruelle_kit.measures import mu_sequence


def test_gamma_three_atoms():
    m = measure_from_span(SpanFunction.gamma_of(3))
    assert [a for a, _ in m.atoms] == [0, 1, 3]
    np.testing.assert_allclose(m.masses, [2, -3, 1])
    assert pair(m, lambda z: 1) == 0
    assert pair(m, lambda z: z) == 0
    assert pair(m, lambda z: z * z) == 6
    assert cauchy_transform(m, 2) == 3
    assert is_infinity(cauchy_transform(m, 3))


def test_empty_and_single():
    assert measure_from_span(SpanFunction()).atoms == ()
    assert cauchy_transform(AtomicMeasure(), 1j) == 0
    assert cauchy_transform(AtomicMeasure.build([(0, 1)]), -1) == 1


def test_tau_terms_need_flag():
    f = SpanFunction.build([(3, 1)], [(2j, 0.5)])
    with pytest.raises(UnsupportedMapError):
        measure_from_span(f)
    m = measure_from_span(f, include_tau=True)
    assert m.mass_at(2j) == 0.5


def test_chebyshev_masses(cheb):
    for n in range(6):
        m = mu_n(cheb, 0, n)
        s = (-0.5) ** n
        assert abs(m.mass_at(0) - s / 3) < 1e-13
        assert abs(m.mass_at(1) + 4 * s / 3) < 1e-13
        assert abs(m.mass_at(4 / 3) - s) < 1e-13


def test_cesaro_consistency_and_tv(cheb):
    seq = mu_sequence(cheb, 0, 10)
    for l in range(2, 11):
        a, b = nu_l(cheb, 0, l), nu_l(cheb, 0, l - 1)
        for pt in (0, 1, 4 / 3):
            assert abs(l * a.mass_at(pt) - (l - 1) * b.mass_at(pt) - seq[l - 1].mass_at(pt)) < 1e-13
        assert a.total_variation() <= sum(m.total_variation() for m in seq[:l]) / l + 1e-14
        assert l * a.total_variation() <= 8 / 3 + 1e-12
    assert nu_l(cheb, 0, 1) == seq[0]


def test_cauchy_transform_recovers_span(rng):
    R = random_normalized_map(rng, 3)
    f = span_iterates(R, SpanFunction.gamma_of(R.critical.values[0]), 2)[2]
    m = measure_from_span(f)
    for z in rng.normal(size=20) + 1j * rng.normal(size=20):
        assert abs(cauchy_transform(m, z) + f(z)) < 1e-10 * max(1, abs(f(z)))


def test_cancellation_on_random_maps():
    rng = np.random.default_rng(21)
    for rational in (False, True):
        R = random_normalized_map(rng, 2, rational)
        for n in range(4):
            m = mu_n(R, 0, n)
            assert abs(pair(m, lambda z: 1)) < 1e-12 * max(1, m.total_variation())
            assert abs(pair(m, lambda z: z)) < 1e-12 * max(1, m.total_variation())


def test_report(cheb):
    rep = convergence_report(cheb, 0, [1, 2, 4, 8], [lambda z: 1, lambda z: z * z])
    z2 = [r.pairing for r in rep.rows if r.test == 1]
    for l, v in zip([1, 2, 4, 8], z2):
        geo = sum((-0.5) ** k for k in range(l)) / l
        assert abs(v - geo * (-4 / 3 + 16 / 9)) < 1e-13
    assert all(abs(r.pairing) < 1e-15 for r in rep.rows if r.test == 0)
    assert convergence_report(cheb, 0, [], []).rows == ()
    assert rep.to_csv().splitlines()[0] == "l,test,pairing_re,pairing_im,delta"


def test_measure_json_round_trip():
    m = measure_from_span(SpanFunction.gamma_of(3 + 1j) * 0.5)
    back = AtomicMeasure.from_json(json.loads(json.dumps(m.to_json())))
    assert back == m


def test_degenerate_critical_value():
    with pytest.raises(PreconditionError):
        mu_n(RationalMap([0, 0, 1]), 0, 1)  # z^2: the critical value is 0
