"""Backward orbits: the depth-k tree of preimages ``R^{-k}(w)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BudgetError
from .maps import INFINITY, RationalMap, is_infinity
from .polynomial import Polynomial, find_roots


@dataclass(frozen=True)
class TreeLevel:
    points: np.ndarray
    parents: np.ndarray  # index into the previous level; -1 at the root
    branch_derivatives: np.ndarray  # R'(y)
    products: np.ndarray  # (R^k)'(y) along the path to the root
    multiplicity: np.ndarray

    def __len__(self):
        return len(self.points)

    @property
    def flagged(self) -> np.ndarray:
        """Nodes where the root is a critical value of the iterate."""
        return (self.multiplicity > 1) | (self.products == 0) | ~np.isfinite(self.products)

    @property
    def count_with_multiplicity(self) -> int:
        return int(self.multiplicity.sum())


@dataclass(frozen=True)
class PreimageTree:
    root: complex
    levels: tuple[TreeLevel, ...]
    max_residual: float  # worst backward error |P(y) - wQ(y)| / (|P|+|w||Q|)(|y|)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def level(self, k: int) -> TreeLevel:
        return self.levels[k]

    @property
    def has_collisions(self) -> bool:
        return any(lv.flagged.any() for lv in self.levels[1:])

    def path(self, k: int, index: int) -> list[complex]:
        """Points from level k node back to the root."""
        out = []
        for j in range(k, -1, -1):
            lv = self.levels[j]
            out.append(complex(lv.points[index]))
            index = int(lv.parents[index])
        return out


def preimage_tree(rmap: RationalMap, w, depth: int, node_budget: int | None = None) -> PreimageTree:
    """Enumerate ``R^{-j}(w)`` for ``j <= depth``.

    Nodes at a critical point (the parent is a critical value) are merged into
    one node carrying the local multiplicity and branch derivative 0. Each
    level is sorted by real part, then imaginary part, then parent index.
    """
    cfg = rmap.config
    budget = cfg.node_budget if node_budget is None else node_budget
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if rmap.degree ** depth > budget:
        raise BudgetError(f"{rmap.degree}^{depth} nodes exceed the node budget {budget}")
    w = complex(w)
    one = np.ones(1, np.complex128)
    root = TreeLevel(np.array([w]), np.array([-1]), one.copy(), one.copy(), np.ones(1, np.int64))
    levels = [root]
    worst = 0.0
    for _ in range(depth):
        lv, resid = _expand(rmap, levels[-1])
        worst = max(worst, resid)
        levels.append(lv)
    return PreimageTree(w, tuple(levels), worst)


def _expand(rmap: RationalMap, prev: TreeLevel) -> tuple[TreeLevel, float]:
    cfg = rmap.config
    d = rmap.degree
    num, den = rmap._num, rmap._den
    ws = prev.points
    finite = np.isfinite(ws)
    rows = num[None, :] - ws[finite, None] * den[None, :]
    rowscale = np.max(np.abs(rows), axis=1)
    full = np.abs(rows[:, -1]) > cfg.tau_trim * rowscale
    fin_idx = np.nonzero(finite)[0]

    pts_rows = np.full((len(ws), d), INFINITY)
    mult_rows = np.ones((len(ws), d), np.int64)
    keep_rows = np.ones((len(ws), d), bool)

    regular = fin_idx[full]
    if regular.size:
        roots, _ = kernels.aberth_batch(rows[full], cfg.tau_root * 1e-2, cfg.root_maxiter)
        pts_rows[regular] = roots
    for j in fin_idx[~full]:
        # degree drops: the missing preimages sit at infinity
        poly = Polynomial(num - ws[j] * den, cfg.tau_trim)
        vals = [] if poly.degree < 1 else [r.value for r in find_roots(poly, cfg) for _ in range(r.multiplicity)]
        pts_rows[j, : len(vals)] = vals
    for j in np.nonzero(~finite)[0]:
        # preimages of infinity: poles, plus infinity itself when it is fixed
        q = rmap.denominator
        vals = [] if q.degree < 1 else [r.value for r in find_roots(q, cfg) for _ in range(r.multiplicity)]
        pts_rows[j, : len(vals)] = vals

    _merge_collisions(rmap, ws, pts_rows, mult_rows, keep_rows)

    parents = np.repeat(np.arange(len(ws)), d).reshape(len(ws), d)
    sel = keep_rows.ravel()
    pts = pts_rows.ravel()[sel]
    par = parents.ravel()[sel]
    mult = mult_rows.ravel()[sel] * prev.multiplicity[par]

    fin = np.isfinite(pts)
    deriv = np.full(pts.shape, INFINITY)
    with np.errstate(all="ignore"):
        if fin.any():
            vals, r1, _ = rmap.jet(pts[fin])
            deriv[fin] = r1
        deriv[fin & (mult > prev.multiplicity[par])] = 0
        products = deriv * prev.products[par]
    products[~np.isfinite(deriv)] = INFINITY

    resid = 0.0
    clean = fin & (mult_rows.ravel()[sel] == 1)
    if clean.any():
        y = pts[clean]
        target = ws[par[clean]]
        ok = np.isfinite(target)
        y, target = y[ok], target[ok]
        if y.size:
            absy = np.abs(y)
            pn = np.abs(np.polynomial.polynomial.polyval(y, num) - target * np.polynomial.polynomial.polyval(y, den))
            scale = (np.polynomial.polynomial.polyval(absy, np.abs(num))
                     + np.abs(target) * np.polynomial.polynomial.polyval(absy, np.abs(den)))
            resid = float(np.max(pn / np.where(scale > 0, scale, 1.0)))

    order = np.lexsort((par, pts.imag, pts.real))
    # the previous level's ordering is already final; children follow their own sort
    lv = TreeLevel(pts[order], par[order], deriv[order], products[order], mult[order])
    return lv, resid


def _merge_collisions(rmap, ws, pts_rows, mult_rows, keep_rows):
    cfg = rmap.config
    crit = rmap.critical
    for c, m, v in zip(crit.points, crit.multiplicities, crit.values):
        if is_infinity(v):
            continue
        hits = np.nonzero(np.abs(ws - v) <= cfg.tau_cluster * max(1.0, abs(v)))[0]
        for j in hits:
            dist = np.abs(pts_rows[j] - c)
            dist[~keep_rows[j]] = np.inf
            nearest = np.argsort(dist, kind="stable")[: m + 1]
            keep_rows[j, nearest[1:]] = False
            pts_rows[j, nearest[0]] = c
            mult_rows[j, nearest[0]] = m + 1
