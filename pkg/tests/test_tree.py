import numpy as np
import pytest

from ruelle_kit import RationalMap, preimage_tree
from ruelle_kit.errors import BudgetError


def test_chebyshev_tree_with_collision(z2m2):
    t = preimage_tree(z2m2, 2, 2)
    assert t.depth == 2
    lv1 = t.level(1)
    np.testing.assert_allclose(np.sort(lv1.points.real), [-2, 2], atol=1e-12)
    lv2 = t.level(2)
    # preimages of -2 collide at the critical point 0
    zero = np.argmin(np.abs(lv2.points))
    assert abs(lv2.points[zero]) < 1e-12
    assert lv2.multiplicity[zero] == 2
    assert lv2.products[zero] == 0
    assert lv2.count_with_multiplicity == 4
    assert t.has_collisions


def test_tree_products_are_chain_rule(rng):
    R = RationalMap([0.1 + 0.2j, 0.5, 1, 0.3])
    t = preimage_tree(R, 0.7 - 0.2j, 3)
    lv = t.level(3)
    assert lv.count_with_multiplicity == 27
    _, d1, _ = R.iterate_jet(lv.points, 3)
    np.testing.assert_allclose(lv.products, d1, rtol=1e-9)
    v, _, _ = R.iterate_jet(lv.points, 3)
    np.testing.assert_allclose(v, 0.7 - 0.2j, atol=1e-9)
    assert t.max_residual < 1e-10


def test_tree_handles_rational_maps():
    R = RationalMap([0, 1, 1], [1, 0, 0.5])  # degree 2, denominator has full degree
    t = preimage_tree(R, 0.3 + 0.1j, 2)
    assert t.level(2).count_with_multiplicity == 4
    for y in t.level(2).points:
        assert abs(R(R(y)) - (0.3 + 0.1j)) < 1e-9


def test_budget():
    with pytest.raises(BudgetError):
        preimage_tree(RationalMap([-2, 0, 1]), 0.5, 30, node_budget=1000)


def test_paths_and_order_are_deterministic(z2m2):
    a = preimage_tree(z2m2, 0.3, 5)
    b = preimage_tree(z2m2, 0.3, 5)
    for k in range(6):
        assert np.array_equal(a.level(k).points, b.level(k).points)
    path = a.path(3, 0)
    assert len(path) == 4
    for u, v in zip(path[:-1], path[1:]):  # node first, root last
        assert abs(z2m2(u) - v) < 1e-10
