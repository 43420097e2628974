"""The Ruelle operator family, pointwise and in closed form.

Pointwise operators sum over the preimage tree. The closed form acts on
:class:`~ruelle_kit.span.SpanFunction` values:

    R*(gamma_a) = gamma_{R(a)} / R'(a) + sum_i b_i gamma_a(c_i) gamma_{R(c_i)}
    R*(tau_a)   = tau_{R(a)} / R'(a)   + sum_i b_i tau_a(c_i) tau_{R(c_i)}
    R*(1)       = omega**2 + sum_i b_i tau_{R(c_i)}

with b_i = 1/R''(c_i) and omega = lim 1/R' at infinity. When a is the critical
point c_i the leading coefficient becomes the limit of 1/R'(a) + b_i gamma_a(c_i):

    h_i(c_i) - b_i (2c_i - 1) / (c_i (c_i - 1))      (gamma)
    h_i(c_i)                                        (tau)

where h_i = 1/R' - b_i/(z - c_i). Gamma poles landing on 0, 1 or infinity are
dropped (gamma_0 = gamma_1 = 0).
"""

from __future__ import annotations

import cmath
from typing import Callable

import numpy as np

from . import kernels
from .errors import BudgetError, PreconditionError, UnsupportedMapError
from .maps import INFINITY, RationalMap, is_infinity, is_normalized
from .span import SpanFunction, gamma, tau
from .tree import preimage_tree

EvaluableField = Callable[[complex], complex]


def _field_values(phi: EvaluableField, pts: np.ndarray) -> np.ndarray:
    if hasattr(phi, "evaluate_many"):
        return np.asarray(phi.evaluate_many(pts), dtype=np.complex128)
    return np.array([phi(complex(y)) for y in pts], dtype=np.complex128)


def pushforward_iterate_point(rmap: RationalMap, phi: EvaluableField, k: int, z,
                              n: int = 2, m: int = 0) -> complex:
    """``sum_{R^k(y) = z} phi(y) / (((R^k)'(y))^n conj((R^k)'(y))^m)``."""
    tree = preimage_tree(rmap, z, k)
    leaves = tree.level(k)
    if n + m > 0 and leaves.flagged.any():
        return INFINITY
    d = leaves.products
    vals = _field_values(phi, leaves.points) * leaves.multiplicity
    with np.errstate(all="ignore"):
        w = vals / (d ** n * np.conj(d) ** m)
    return kernels.compensated_sum(w)


def pushforward_point(rmap: RationalMap, phi: EvaluableField, n: int, m: int, z) -> complex:
    """``R*_{n,m}(phi)(z)``; ``(2, 0)`` is the Ruelle operator, ``(1, 1)`` its modulus."""
    return pushforward_iterate_point(rmap, phi, 1, z, n, m)


def ruelle_point(rmap: RationalMap, phi: EvaluableField, z) -> complex:
    return pushforward_point(rmap, phi, 2, 0, z)


def modulus_iterate_one(rmap: RationalMap, k: int, z) -> float:
    """``|R*|^k(1)(z) = sum_{R^k(y) = z} 1/|(R^k)'(y)|^2``."""
    return pushforward_iterate_point(rmap, lambda y: 1.0, k, z, 1, 1).real


def pullback_point(rmap: RationalMap, phi: EvaluableField, z) -> complex:
    """``R_*(phi)(z) = phi(R(z)) R'(z)^2 / d``, a right inverse of ``R*``."""
    val, der = rmap.evaluate(z, 1)
    return phi(val) * der * der / rmap.degree


def lp_pushforward(rmap: RationalMap, phi: EvaluableField, p: float, z, modulus: bool = False,
                   return_branches: bool = False):
    """``d^{-(p-1)/p} sum phi(J_i) (J_i')^{2/p}`` over the inverse branches J_i.

    ``(J')^{2/p}`` uses the principal branch; ``modulus=True`` uses ``|J'|^{2/p}``.
    With ``return_branches`` the principal arguments of each ``J_i'`` are
    returned alongside the value.
    """
    if not p > 1:
        raise ValueError("p must be > 1")
    tree = preimage_tree(rmap, z, 1)
    lv = tree.level(1)
    if lv.flagged.any():
        value = INFINITY
        args = []
    else:
        jprime = 1.0 / lv.branch_derivatives
        expo = 2.0 / p
        if modulus:
            weights = np.abs(jprime) ** expo
        else:
            weights = np.exp(expo * np.log(jprime))
        vals = _field_values(phi, lv.points) * weights
        value = rmap.degree ** (-(p - 1) / p) * kernels.compensated_sum(vals)
        args = [cmath.phase(j) for j in jprime]
    return (value, args) if return_branches else value


def beltrami_point(rmap: RationalMap, mu: EvaluableField, z) -> complex:
    """``B_R(mu)(z) = mu(R(z)) conj(R'(z)) / R'(z)``."""
    val, der = rmap.evaluate(z, 1)
    if der == 0 or is_infinity(der) or cmath.isnan(der):
        return INFINITY
    return mu(val) * (der.conjugate() / der)


def dual_transfer(rmap: RationalMap, phi: EvaluableField, a) -> complex:
    """``T(phi)(a) = phi(R(a))/R'(a) - sum_i b_i phi(R(c_i)) / (a - c_i)``."""
    crit = rmap.require_simple_critical()
    a = complex(a)
    tol = rmap.config.tau_cluster
    for c in crit.points:
        if abs(a - c) <= tol * max(1.0, abs(c)):
            return INFINITY
    val, der = rmap.evaluate(a, 1)
    terms = [phi(val) / der]
    for c, b, v in zip(crit.points, crit.residues, crit.values):
        if b != 0:
            terms.append(-b * phi(v) / (a - c))
    return kernels.compensated_sum(terms)


# -- closed form on the span -----------------------------------------------------


class _SpanContext:
    """Critical data needed by the closed-form operator, computed once per map."""

    def __init__(self, rmap: RationalMap, need_gamma: bool):
        if not rmap.fixes_infinity:
            raise PreconditionError("closed-form pushforward needs infinity to be a fixed point")
        if need_gamma and not is_normalized(rmap):
            raise PreconditionError("gamma terms need a map normalized to fix 0, 1 and infinity")
        crit = rmap.critical
        if not all(m == 1 for m in crit.multiplicities):
            raise UnsupportedMapError("closed-form pushforward needs simple critical points")
        self.rmap = rmap
        self.tol = rmap.config.tau_cluster
        self.omega = crit.omega
        self.points = crit.points
        self.values = crit.values
        self.residues = crit.residues
        self.h = []
        for i, c in enumerate(self.points):
            terms = [self.omega] + [b / (c - cj) for j, (cj, b) in enumerate(zip(self.points, self.residues))
                                    if j != i and b != 0]
            self.h.append(kernels.compensated_sum(terms))

    def critical_index(self, a: complex):
        for i, c in enumerate(self.points):
            if abs(a - c) <= self.tol * max(1.0, abs(c)):
                return i
        return None

    def degenerate(self, p: complex) -> bool:
        if is_infinity(p):
            return True
        return min(abs(p), abs(p - 1)) <= self.tol * max(1.0, abs(p))


def span_pushforward(rmap: RationalMap, f: SpanFunction, _ctx: _SpanContext | None = None) -> SpanFunction:
    """Closed-form ``R*(f)`` for a span function ``f``."""
    ctx = _ctx or _SpanContext(rmap, bool(f.gamma_terms))
    cfg = rmap.config
    g_out: list[tuple[complex, complex]] = []
    t_out: list[tuple[complex, complex]] = []
    const = 0j

    for a, alpha in f.gamma_terms:
        i = ctx.critical_index(a)
        if i is None:
            ra, r1 = rmap.evaluate(a, 1)
            if not ctx.degenerate(ra):
                g_out.append((ra, alpha / r1))
        else:
            c, b = ctx.points[i], ctx.residues[i]
            lead = ctx.h[i] - b * (2 * c - 1) / (c * (c - 1))
            if not ctx.degenerate(ctx.values[i]):
                g_out.append((ctx.values[i], alpha * lead))
        for j, (c, b, v) in enumerate(zip(ctx.points, ctx.residues, ctx.values)):
            if j == i or b == 0 or ctx.degenerate(v):
                continue
            g_out.append((v, alpha * b * gamma(a, c)))

    for a, alpha in f.tau_terms:
        i = ctx.critical_index(a)
        if i is None:
            ra, r1 = rmap.evaluate(a, 1)
            if is_infinity(ra):
                raise PreconditionError(f"tau pole {a} maps to infinity")
            t_out.append((ra, alpha / r1))
        elif not is_infinity(ctx.values[i]):
            t_out.append((ctx.values[i], alpha * ctx.h[i]))
        for j, (c, b, v) in enumerate(zip(ctx.points, ctx.residues, ctx.values)):
            if j == i or b == 0 or is_infinity(v):
                continue
            t_out.append((v, alpha * b * tau(a, c)))

    k = f.constant_term
    if k != 0:
        const = k * ctx.omega ** 2
        for b, v in zip(ctx.residues, ctx.values):
            if b != 0 and not is_infinity(v):
                t_out.append((v, k * b))

    return SpanFunction.build(g_out, t_out, const, cfg)


def span_iterates(rmap: RationalMap, f: SpanFunction, n: int) -> list[SpanFunction]:
    """``[f, R*f, ..., (R*)^n f]``; raises BudgetError (with the partial list) on span growth."""
    has_gamma = bool(f.gamma_terms)
    ctx = _SpanContext(rmap, has_gamma)
    out = [f]
    for _ in range(n):
        nxt = span_pushforward(rmap, out[-1], ctx)
        if nxt.size > rmap.config.span_budget:
            raise BudgetError("span size exceeds the span budget", partial=out)
        out.append(nxt)
    return out


def cesaro(rmap: RationalMap, f: SpanFunction, N: int) -> SpanFunction:
    """``A_N(f) = (1/N) sum_{i<N} (R*)^i f``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    try:
        its = span_iterates(rmap, f, N - 1)
    except BudgetError as err:
        partial = _average(rmap, err.partial)
        raise BudgetError(str(err), partial=partial) from None
    return _average(rmap, its)


def _average(rmap: RationalMap, its: list[SpanFunction]) -> SpanFunction:
    n = len(its)
    g = [(a, c / n) for f in its for a, c in f.gamma_terms]
    t = [(a, c / n) for f in its for a, c in f.tau_terms]
    const = kernels.compensated_sum([f.constant_term for f in its]) / n
    return SpanFunction.build(g, t, const, rmap.config)
