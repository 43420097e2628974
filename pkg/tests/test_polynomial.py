import numpy as np
import pytest

from ruelle_kit import Polynomial, RunConfig, find_roots
from ruelle_kit.errors import MalformedMapError


def test_trim_and_degree():
    p = Polynomial([1, 2, 0, 1e-20])
    assert p.degree == 1
    assert Polynomial([0]).is_zero()
    with pytest.raises(MalformedMapError):
        Polynomial([1, np.nan])


def test_arithmetic_and_compose():
    p = Polynomial([-2, 0, 1])
    q = Polynomial([0, 1, 1])
    assert (p + q) == Polynomial([-2, 1, 2])
    assert (p * q) == Polynomial([0, -2, -2, 1, 1])
    assert p.deriv() == Polynomial([0, 2])
    pp = p.compose(p)
    z = 0.3 + 0.4j
    assert abs(pp(z) - p(p(z))) < 1e-14


@pytest.mark.parametrize("coeffs,expected", [
    ([-4, 0, 1], [(-2, 1), (2, 1)]),
    ([0, -8, 0, 4], [(-np.sqrt(2), 1), (0, 1), (np.sqrt(2), 1)]),
    ([1, -2, 1], [(1, 2)]),
    ([-1, 3, -3, 1], [(1, 3)]),
])
def test_find_roots_with_multiplicity(coeffs, expected):
    roots = find_roots(Polynomial(coeffs))
    assert len(roots) == len(expected)
    for r, (v, m) in zip(roots, expected):
        assert abs(r.value - v) < 1e-6
        assert r.multiplicity == m


def test_find_roots_random_against_numpy():
    rng = np.random.default_rng(11)
    for deg in range(2, 9):
        c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        got = np.sort_complex([r.value for r in find_roots(Polynomial(c))])
        ref = np.sort_complex(np.roots(c[::-1]))
        np.testing.assert_allclose(got, ref, atol=1e-9)


def test_degree_one_root():
    (r,) = find_roots(Polynomial([3, 2]))
    assert r.value == -1.5 and r.multiplicity == 1


def test_config_round_trip(tmp_path):
    cfg = RunConfig(tau_root=1e-11, seed=7)
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        RunConfig.from_dict({"nonsense": 1})
    with pytest.raises(ValueError):
        RunConfig(tau_root=-1)
