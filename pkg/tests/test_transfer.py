import numpy as np
import pytest

from conftest import brute_pushforward, random_normalized_map
from ruelle_kit import (
    RationalMap, SpanFunction, beltrami_point, cesaro, dual_transfer, gamma, lp_pushforward, pullback_point,
    pushforward_point, ruelle_point, span_iterates, span_pushforward, tau,
)
from ruelle_kit.errors import PreconditionError


def test_pointwise_pushforward_small_case(z2m2):
    # preimages of 2 are +-2, R' = +-4, phi = 1 -> 2/16
    assert abs(ruelle_point(z2m2, lambda y: 1.0, 2.0) - 0.125) < 1e-15
    assert abs(pushforward_point(z2m2, lambda y: 1.0, 1, 1, 2.0) - 0.125) < 1e-15


def test_general_weights_against_brute_force(rng):
    R = RationalMap([0.3, -0.2j, 1, 0.5])
    phi = lambda y: np.exp(0.3 * y)
    for n, m in [(2, 0), (1, 1), (0, 0), (3, 1)]:
        z = 0.4 + 0.2j
        got = pushforward_point(R, phi, n, m, z)
        ref = brute_pushforward(R, phi, z, n, m)
        assert abs(got - ref) < 1e-10 * max(1, abs(ref))


def test_pullback_round_trip(rng):
    R = RationalMap([0.1j, 0, 1, -0.4])
    phi = lambda w: 1 / (w - 3)
    for z in rng.normal(size=5) + 1j * rng.normal(size=5):
        pulled = lambda y: pullback_point(R, phi, y)
        assert abs(ruelle_point(R, pulled, z) - phi(z)) < 1e-10 * max(1, abs(phi(z)))


def test_lp_pushforward(z2m2):
    # p = 2 weights by J' itself: the branches at +-2 cancel
    v = lp_pushforward(z2m2, lambda y: 1.0, 2, 2.0)
    assert abs(v) < 1e-15
    m = lp_pushforward(z2m2, lambda y: 1.0, 2, 2.0, modulus=True)
    assert abs(m - 2 ** -0.5 / 2) < 1e-15
    # general p against the branch sum with J' = 1/R'(y), principal powers
    z, p = 0.3 + 0.1j, 4 / 3
    ys = np.roots([1, 0, -2 - z])
    ref = sum(y * (1 / (2 * y)) ** (2 / p) for y in ys) / 2 ** ((p - 1) / p)
    assert abs(lp_pushforward(z2m2, lambda y: y, p, z) - ref) < 1e-13
    with pytest.raises(ValueError):
        lp_pushforward(z2m2, lambda y: y, 1, z)


def test_beltrami_and_duality(z2m2):
    mu = lambda z: 0.1 * z
    z = 0.5 + 0.5j
    d = z2m2.derivative(z)
    expect = mu(z2m2(z)) * np.conj(d) / d
    assert abs(beltrami_point(z2m2, mu, z) - expect) < 1e-15


def test_dual_transfer_matches_pushforward_of_tau():
    # R*(tau_a)(z) = T(w -> 1/(z - w))(a) for polynomials
    R = RationalMap([0.2 + 0.1j, -0.5, 0, 1])
    a, z = 0.3 - 0.4j, -0.7 + 0.9j
    lhs = span_pushforward(R, SpanFunction.tau_of(a))(z)
    rhs = dual_transfer(R, lambda w: 1 / (z - w), a)
    assert abs(lhs - rhs) < 1e-12
    assert abs(lhs - brute_pushforward(R, lambda y: tau(a, y), z)) < 1e-10


def test_dual_transfer_small_case(cheb):
    # T(phi)(a) = phi(Q(a))/Q'(a) - b phi(Q(c))/(a - c) with c = 2/3, b = -1/6
    phi = lambda w: w ** 2
    a = 0.25
    expect = phi(cheb(a)) / cheb.derivative(a) + (1 / 6) * phi(4 / 3) / (a - 2 / 3)
    assert abs(dual_transfer(cheb, phi, a) - expect) < 1e-14


def test_closed_form_chebyshev_fixture(cheb):
    f = span_pushforward(cheb, SpanFunction.gamma_of(4 / 3))
    assert f.gamma_terms[0][0] == pytest.approx(4 / 3)
    assert abs(f.gamma_terms[0][1] + 0.5) < 1e-14
    g = span_pushforward(cheb, SpanFunction.gamma_of(2 / 3))
    assert len(g.gamma_terms) == 1
    assert abs(g.gamma_terms[0][0] - 4 / 3) < 1e-14
    # the critical-pole coefficient; brute force settles the sign
    assert abs(g.gamma_terms[0][1] + 0.25) < 1e-13
    z = 0.3 + 0.8j
    assert abs(g(z) - brute_pushforward(cheb, lambda y: gamma(2 / 3, y), z)) < 1e-12


@pytest.mark.parametrize("degree,rational", [(2, False), (3, False), (2, True), (3, True)])
def test_closed_form_against_brute_force(degree, rational):
    rng = np.random.default_rng(100 + degree + 10 * rational)
    for _ in range(5):
        R = random_normalized_map(rng, degree, rational)
        crit = R.critical
        poles = [complex(*rng.normal(size=2)), crit.points[0]]
        f = SpanFunction.build([(poles[0], 1.3), (poles[1], -0.4j)], [(complex(*rng.normal(size=2)), 0.7)], 0.2)
        g = span_pushforward(R, f)
        for z in rng.normal(size=3) + 1j * rng.normal(size=3):
            ref = brute_pushforward(R, f, z)
            assert abs(g(z) - ref) < 1e-8 * max(1, abs(ref))


def test_constant_pushforward_closed_form(rng):
    R = random_normalized_map(rng, 2, True)
    one = SpanFunction.build(constant=1.0)
    g = span_pushforward(R, one)
    z = 0.9 - 0.2j
    assert abs(g(z) - brute_pushforward(R, lambda y: 1.0, z)) < 1e-9


def test_preconditions():
    R = RationalMap([0.3, 0, 1])  # not normalized
    with pytest.raises(PreconditionError):
        span_pushforward(R, SpanFunction.gamma_of(2.0))
    # tau terms only need infinity fixed
    span_pushforward(R, SpanFunction.tau_of(2.0))
    M = RationalMap([0, 1], [1, 0, 1])  # z/(1+z^2): infinity not fixed
    with pytest.raises(Exception):
        span_pushforward(M, SpanFunction.tau_of(2.0))


def test_iterates_and_cesaro(cheb):
    its = span_iterates(cheb, SpanFunction.gamma_of(4 / 3), 4)
    for k, f in enumerate(its):
        assert abs(f.gamma_terms[0][1] - (-0.5) ** k) < 1e-13
    A = cesaro(cheb, SpanFunction.gamma_of(4 / 3), 4)
    assert abs(A.gamma_terms[0][1] - 5 / 32) < 1e-13
    with pytest.raises(ValueError):
        cesaro(cheb, SpanFunction.gamma_of(4 / 3), 0)


def test_iterates_match_pointwise_iterates(rng):
    R = random_normalized_map(rng, 2)
    f = SpanFunction.gamma_of(0.4 + 0.9j)
    its = span_iterates(R, f, 3)
    z = -0.3 + 0.5j
    from ruelle_kit.transfer import pushforward_iterate_point
    ref = pushforward_iterate_point(R, f, 3, z)
    assert abs(its[3](z) - ref) < 1e-9 * max(1, abs(ref))


def test_small_examples_pointwise(z2m2):
    assert pullback_point(z2m2, lambda w: 1.0, 1.0) == 2
    assert pullback_point(z2m2, lambda w: tau(5, w), 0.0) == 0
    assert abs(beltrami_point(z2m2, lambda w: 1.0, 1j) + 1) < 1e-15
    assert pushforward_point(z2m2, lambda y: 0.0, 3, 1, 5.0) == 0


def test_lp_branch_metadata(z2m2):
    value, branches = lp_pushforward(z2m2, lambda y: 1.0, 2, 2.0, return_branches=True)
    assert len(branches) == 2
    assert lp_pushforward(z2m2, lambda y: 0.0, 3.5, 0.4) == 0


def test_beltrami_unimodular(rng):
    R = RationalMap([0.4, 0.1j, 1], [1, 0.2])
    mu = lambda w: np.sin(w)
    for z in rng.normal(size=5) + 1j * rng.normal(size=5):
        assert abs(abs(beltrami_point(R, mu, z)) - abs(mu(R(z)))) < 1e-14 * max(1, abs(mu(R(z))))


def test_dual_transfer_quadratic_special_case():
    c = -0.3 + 0.2j
    R = RationalMap([c, 0, 1])
    phi = lambda w: np.cos(w) + w
    a = 0.8 - 0.1j
    expect = (phi(R(a)) - phi(c)) / R.derivative(a)
    assert abs(dual_transfer(R, phi, a) - expect) < 1e-14
    z2m2 = RationalMap([-2, 0, 1])
    assert dual_transfer(z2m2, lambda w: 1.0, 3) == 0
    assert abs(dual_transfer(z2m2, lambda w: tau(5, w), 1) + 1 / 84) < 1e-15


def test_linearity_and_cesaro_telescoping(rng):
    R = random_normalized_map(rng, 3)
    f = SpanFunction.build([(0.3 + 0.4j, 1.0), (-0.8j, 0.5)], [(2.0, 0.3)])
    g = SpanFunction.build([(1.7, -0.2j)], constant=0.4)
    lhs = span_pushforward(R, f.combine(g, 2.0, -1j))
    rhs = span_pushforward(R, f).combine(span_pushforward(R, g), 2.0, -1j)
    assert lhs.combine(rhs, 1, -1).max_coefficient() < 1e-12 * max(1, lhs.max_coefficient())
    its = span_iterates(R, f, 4)
    for N in range(2, 5):
        diff = cesaro(R, f, N) * N - cesaro(R, f, N - 1) * (N - 1)
        assert diff.combine(its[N - 1], 1, -1).max_coefficient() < 1e-12 * max(1, its[N - 1].max_coefficient())
