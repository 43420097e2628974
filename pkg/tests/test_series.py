import numpy as np
import pytest

from conftest import random_normalized_map
from ruelle_kit import (
    RationalMap, backward_series, cauchy_product, forward_series, identity_residuals, modified_series, rs_series,
    s_series,
)
from ruelle_kit.errors import LengthMismatchError
from ruelle_kit.series import SeriesLedger


def test_forward_series_chebyshev(z2m2):
    s = forward_series(z2m2, 0, 30)
    np.testing.assert_allclose(s.terms[:4], [1, -0.25, -1 / 16, -1 / 64])
    assert abs(s.value - 2 / 3) < 1e-15


def test_modified_series_limit(z2m2):
    # orbit of -2 is -2, 2, 2, ...: 1/2 + sum_{n>=1} 1/(2 * 4^n) = 2/3
    assert abs(modified_series(z2m2, 0, -2, 40).value - 2 / 3) < 1e-15
    assert modified_series(z2m2, 0, 0, 3).pole_index == 0


def test_s_series_first_terms(z2m2):
    s = s_series(z2m2, 2, 1)
    assert s.terms[0] == 1
    assert abs(s.terms[1] - 0.125) < 1e-15


def test_backward_series_pole_marks(z2m2):
    rs, s = backward_series(z2m2, 2, 5, 3)
    assert s.pole_index == 2  # 2 has the critical point among its second preimages
    assert np.isnan(s.partials[2])


def test_escaped_orbit_truncates():
    s = forward_series(RationalMap([1, 0, 1]), 0, 100)
    assert s.escaped and len(s.terms) < 101


def test_cauchy_product_against_power_series():
    # (1/(1-x))^2 = sum (n+1) x^n
    ones = SeriesLedger.from_terms(np.ones(8))
    prod = cauchy_product(ones, ones)
    np.testing.assert_allclose(prod.terms, np.arange(1, 9))
    short = SeriesLedger.from_terms(np.ones(3))
    with pytest.raises(LengthMismatchError):
        cauchy_product(ones, short, 8)


@pytest.mark.parametrize("L", range(0, 6))
def test_identity_residuals_fixture(cheb, L):
    r = identity_residuals(cheb, 0.3 + 0.2j, -0.6 + 0.4j, L)
    assert r.residual_forward < 1e-10
    assert r.residual_backward < 1e-10


def test_identity_residuals_random_maps():
    rng = np.random.default_rng(8)
    for rational in (False, True):
        R = random_normalized_map(rng, 2, rational)
        for L in range(5):
            r = identity_residuals(R, 0.21 + 0.37j, -0.45 + 0.61j, L)
            assert r.residual_forward < 1e-8 * max(1, abs(r.forward_lhs))
            assert r.residual_backward < 1e-8 * max(1, abs(r.backward_lhs))


def test_ledger_csv_round_trip(z2m2):
    s = forward_series(z2m2, 0, 3)
    rows = s.to_csv().strip().splitlines()
    assert rows[0].startswith("index,")
    assert len(rows) == 5
    assert float(rows[2].split(",")[1]) == -0.25


def test_rs_series_at_noncritical_point(z2m2):
    rs = rs_series(z2m2, 0.5, 0.3, 3)
    assert rs.terms[0] == pytest.approx(1 / (0.5 - 0.3))


def test_telescoping_recurrence_matches_chain_rule():
    rng = np.random.default_rng(44)
    R = RationalMap([0.3 + 0.1j, -0.2, 1])
    for x in 0.5 * (rng.normal(size=20) + 1j * rng.normal(size=20)):
        s = forward_series(R, x, 8)
        for m in range(1, len(s.terms)):
            _, dm, _ = R.iterate_jet([R(x)], m)
            expect = 1 / complex(dm[0])
            assert abs(s.terms[m] - expect) <= 1e-10 * abs(expect)
            # the recurrence itself holds to the rounding of the running sum
            gap = abs((s.partials[m] - s.partials[m - 1]) - s.terms[m])
            assert gap <= 4 * np.finfo(float).eps * abs(s.partials[m])


def test_forward_series_fixed_point():
    s = forward_series(RationalMap([0, 0, 1]), 1, 60)
    assert abs(s.value - 2) < 1e-15
    assert len(forward_series(RationalMap([0, 0, 1]), 1, 0).terms) == 1


def test_modified_series_example(z2m2):
    s = modified_series(z2m2, 1, -2, 40)
    np.testing.assert_allclose(s.terms[:3], [1 / 3, 1 / 4, 1 / 16])
    assert abs(s.value - 2 / 3) < 1e-15


def test_rs_series_against_pointwise(cheb):
    from ruelle_kit.transfer import pushforward_iterate_point
    from ruelle_kit import tau
    rs = rs_series(cheb, 5, 4 / 3, 4)
    for n in range(5):
        ref = pushforward_iterate_point(cheb, lambda y: tau(4 / 3, y), n, 5)
        assert abs(rs.terms[n] - ref) < 1e-8 * max(1, abs(ref))


def test_first_terms_coincide():
    R = RationalMap([0, 4, -3])
    x, a = 0.2 + 0.9j, -0.4 + 0.3j
    assert rs_series(R, x, a, 0).terms[0] == modified_series(R, x, a, 0).terms[0] == 1 / (x - a)


def test_cauchy_product_properties():
    rng = np.random.default_rng(2)
    A = SeriesLedger.from_terms(rng.normal(size=7) + 1j * rng.normal(size=7))
    B = SeriesLedger.from_terms(rng.normal(size=7))
    np.testing.assert_allclose(cauchy_product(A, B).terms, cauchy_product(B, A).terms)
    zero = SeriesLedger.from_terms(np.zeros(7))
    assert not np.any(cauchy_product(A, zero).terms)
    g2 = SeriesLedger.from_terms(0.5 ** np.arange(10))
    g3 = SeriesLedger.from_terms((1 / 3) ** np.arange(10))
    n = np.arange(10)
    np.testing.assert_allclose(cauchy_product(g2, g3).terms, 3 * 0.5 ** n - 2 * (1 / 3) ** n, rtol=1e-14)


def test_absolute_partials_dominate(z2m2):
    s = forward_series(z2m2, 0.3, 10)
    assert np.all(s.abs_partials >= np.abs(s.partials) - 1e-15)
    assert np.all(np.diff(s.abs_partials) >= 0)
