"""Residues of 1/(P^n)' for polynomials and the diagnostics built on them.

For a polynomial P with simple critical points and no critical relations the
finite critical points of P^n are the points d with P^k(d) = c, k < n, c a
critical point of P. The residue of 1/(P^n)' at such d is

    b = 1 / ( P''(c) * (P^{n-k-1})'(P(c)) * ((P^k)'(d))^2 )

and B_n is the sum of |b| over all of them. B_n is also assembled a second
way, as a triple sum over critical points c, levels j, and the modulus
pushforward |R*|^j(1)(c).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BudgetError, QuadratureError, UnsupportedMapError
from .maps import RationalMap, find_cycle, is_infinity, orbit
from .polynomial import Polynomial
from .series import forward_series, s_series
from .transfer import pushforward_point
from .tree import preimage_tree


def _require_polynomial(P: RationalMap):
    if not P.is_polynomial:
        raise UnsupportedMapError("B_n and residue tables are defined for polynomials only")


@dataclass(frozen=True)
class CriticalEntry:
    point: complex  # d, a critical point of P^n
    source: complex  # c, the critical point of P with P^k(d) = c
    level: int  # k
    product: complex  # (P^k)'(d)
    residue: complex = complex(math.nan, math.nan)
    flagged: bool = False


@dataclass(frozen=True)
class ResidueTable:
    n: int
    entries: tuple[CriticalEntry, ...]
    B_n: float
    flagged: int

    @property
    def residues(self) -> np.ndarray:
        return np.array([e.residue for e in self.entries if not e.flagged])

    @property
    def points(self) -> np.ndarray:
        return np.array([e.point for e in self.entries if not e.flagged])


def iterate_critical_points(P: RationalMap, n: int) -> list[CriticalEntry]:
    """``union_{k<n} P^{-k}(Cr(P))`` with the chain-rule products (P^k)'(d)."""
    _require_polynomial(P)
    crit = P.critical
    out = []
    if n < 1:
        return out
    for c in crit.points:
        tree = preimage_tree(P, c, n - 1)
        for k, lv in enumerate(tree.levels):
            for y, prod, mult in zip(lv.points, lv.products, lv.multiplicity):
                flagged = bool(mult > 1 or prod == 0 or not np.isfinite(prod))
                for _ in range(int(mult)):
                    out.append(CriticalEntry(complex(y), complex(c), k, complex(prod), flagged=flagged))
    return out


def residue_closed_form(P: RationalMap, d, c, k: int, n: int, product=None) -> complex:
    """Residue of 1/(P^n)' at d in P^{-k}(c); nan when a factor vanishes."""
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    c = complex(c)
    val, _, second = P.evaluate(c, 2)
    if product is None:
        _, product, _ = P.iterate_jet([complex(d)], k)
        product = complex(product[0])
    _, forward, _ = P.iterate_jet([val], n - k - 1)
    denom = second * complex(forward[0]) * product * product
    if denom == 0 or not np.isfinite(denom):
        return complex(math.nan, math.nan)
    return 1.0 / denom


def residue_table(P: RationalMap, n: int) -> ResidueTable:
    entries = []
    flagged = 0
    for e in iterate_critical_points(P, n):
        b = complex(math.nan, math.nan) if e.flagged else residue_closed_form(P, e.point, e.source, e.level, n, e.product)
        bad = e.flagged or not np.isfinite(b)
        flagged += bad
        entries.append(CriticalEntry(e.point, e.source, e.level, e.product, b, bad))
    good = np.array([abs(e.residue) for e in entries if not e.flagged])
    return ResidueTable(n, tuple(entries), kernels.compensated_sum(good).real if good.size else 0.0, flagged)


def direct_residues(P: RationalMap, points, n: int) -> np.ndarray:
    """``1/(P^n)''(d)`` by forward-mode differentiation of the iterate."""
    _, _, second = P.iterate_jet(np.asarray(points, dtype=np.complex128), n)
    with np.errstate(all="ignore"):
        return 1.0 / second


def _modulus_iterate(P: RationalMap, j: int, z) -> float:
    # |R*|^j(1)(z) by recursion on single-step pushforwards
    if j == 0:
        return 1.0
    return pushforward_point(P, lambda y: _modulus_iterate(P, j - 1, y), 1, 1, z).real


@dataclass(frozen=True)
class BnResult:
    n: int
    direct: float  # sum |b| over the residue table
    triple_sum: float  # critical/level/pushforward triple sum including level 0
    triple_sum_levels_1: float  # same with levels j = 1..n-1 only
    discrepancy: float  # |direct - triple_sum| / max(direct, tiny)
    flagged: int


def bn(P: RationalMap, n: int) -> BnResult:
    """B_n two ways: closed-form residues, and the triple sum."""
    _require_polynomial(P)
    table = residue_table(P, n)
    crit = P.critical
    level0, rest = [], []
    for c in crit.points:
        val, _, second = P.evaluate(c, 2)
        if second == 0:
            continue
        for j in range(n):
            _, fwd, _ = P.iterate_jet([val], n - j - 1)
            fwd = abs(complex(fwd[0]))
            if fwd == 0:
                continue
            term = _modulus_iterate(P, j, c) / (abs(second) * fwd)
            (level0 if j == 0 else rest).append(term)
    lit = kernels.compensated_sum(rest).real if rest else 0.0
    full = kernels.compensated_sum(level0 + rest).real if (level0 or rest) else 0.0
    disc = abs(table.B_n - full) / max(table.B_n, 1e-300)
    return BnResult(n, table.B_n, full, lit, disc, table.flagged)


# -- contour oracle --------------------------------------------------------------


@dataclass(frozen=True)
class ContourResult:
    residue_sum: complex
    quadrature: complex
    discrepancy: float
    nodes: int
    radius: float


def contour_oracle(P: RationalMap, n: int, h: Polynomial, base_nodes: int = 2**10,
                   max_nodes: int = 2**20, tol: float = 1e-9) -> ContourResult:
    """Residue sum ``sum b h(d)`` against trapezoid quadrature of (1/2 pi i) of h/(P^n)'."""
    table = residue_table(P, n)
    if h.is_zero():
        return ContourResult(0j, 0j, 0.0, 0, 0.0)
    pts = table.points
    res = table.residues
    rsum = kernels.compensated_sum(res * h(pts)) if pts.size else 0j
    all_pts = np.array([e.point for e in table.entries])
    radius = 2.0 * (1.0 + (np.max(np.abs(all_pts)) if all_pts.size else 0.0))
    prev = None
    N = base_nodes
    while N <= max_nodes:
        z = radius * np.exp(2j * np.pi * np.arange(N) / N)
        _, d1, _ = P.iterate_jet(z, n)
        q = kernels.compensated_sum(h(z) * z / d1) / N
        if prev is not None and abs(q - prev) <= tol * max(1.0, abs(q)):
            return ContourResult(rsum, q, float(abs(rsum - q)), N, float(radius))
        prev = q
        N *= 2
    raise QuadratureError("contour quadrature did not converge", partial=prev)


# -- reports -----------------------------------------------------------------------


@dataclass(frozen=True)
class StrongConvergenceReport:
    B: tuple[float, ...]
    growth_rate: float  # least-squares slope of log B_n against n
    verdict: str  # "bounded within explored range" | "growing within explored range"
    flagged: tuple[int, ...]
    truncated_at: int | None = None


def strong_convergence_report(P: RationalMap, n_max: int, growth_tol: float = 0.05) -> StrongConvergenceReport:
    values, flags = [], []
    truncated = None
    for n in range(1, n_max + 1):
        try:
            table = residue_table(P, n)
        except BudgetError:
            truncated = n
            break
        values.append(table.B_n)
        flags.append(table.flagged)
    B = np.array(values)
    ok = B > 0
    slope = float(np.polyfit(np.arange(1, len(B) + 1)[ok], np.log(B[ok]), 1)[0]) if ok.sum() >= 2 else 0.0
    verdict = "bounded within explored range" if slope <= growth_tol else "growing within explored range"
    return StrongConvergenceReport(tuple(values), slope, verdict, tuple(flags), truncated)


@dataclass(frozen=True)
class EnvelopeReport:
    forward: tuple[float, ...]  # 1/|(P^n)'(P(c))|, n = 1..n_max
    backward: tuple[float, ...]  # |R*|^n(1)(c), n = 1..n_max
    M_c: float  # least M with both sequences <= M/n on the explored range
    violated_at: int | None  # first n breaking a supplied bound


def envelope_check(P: RationalMap, c, n_max: int, bound: float | None = None) -> EnvelopeReport:
    """Both envelope sequences at a critical point and the fitted ``M_c / n`` bound."""
    fw = forward_series(P, c, n_max)
    fwd = np.abs(fw.terms[1:n_max + 1])
    bwd = np.abs(s_series(P, c, n_max).terms[1:])
    if len(fwd) < n_max:  # escaped orbit: remaining forward terms are 0
        fwd = np.concatenate([fwd, np.zeros(n_max - len(fwd))])
    ns = np.arange(1, n_max + 1)
    scaled = ns * np.maximum(fwd, bwd)
    M = float(np.max(scaled)) if n_max else 0.0
    violated = None
    if bound is not None:
        over = np.nonzero(~(scaled <= bound))[0]
        violated = int(ns[over[0]]) if over.size else None
    return EnvelopeReport(tuple(map(float, fwd)), tuple(map(float, bwd)), M, violated)


@dataclass(frozen=True)
class InstabilityReport:
    critical_point: complex
    derivative_moduli: tuple[float, ...]  # |(R^n)'(R(c))|, n = 0..N
    partial_sums: tuple[complex, ...]  # S_n = sum_{j<=n} 1/(R^j)'(R(c))
    orbit_bounded: tuple[bool, ...]  # is R^{n+1}(R(c)) inside the detection disk
    postcritically_finite: bool
    derivative_trend: str  # "to-zero" | "to-infinity" | "bounded" | "empty"
    subsequence: tuple[int, ...]
    hypothesis_growth: bool  # |(R^n)'| -> infinity with limsup |S_n| > 0 on the subsequence
    hypothesis_constant: bool  # |(R^n)'| ~ const with |S_n| -> infinity on the subsequence
    verdict: str  # "unstable within explored range" | "inconclusive"
    escaped: bool = False
    notes: tuple[str, ...] = ()


def _trend(logs: np.ndarray, slope_tol: float) -> str:
    if logs.size < 2:
        return "bounded"
    slope = np.polyfit(np.arange(logs.size), logs, 1)[0]
    if slope < -slope_tol:
        return "to-zero"
    if slope > slope_tol:
        return "to-infinity"
    return "bounded"


def _lands_on_cycle(R: RationalMap, c: complex, cfg) -> bool:
    # convergence to an attracting cycle is asymptotic; only superattracting or
    # non-attracting cycles are actually landed on
    rec = orbit(R, c, cfg.orbit_budget, cycle_tol=cfg.tau_cluster)
    if rec.cycle is None:
        return False
    start, period = rec.cycle
    _, d1, _ = R.jet(rec.points[start:start + period])
    mult = abs(complex(np.prod(d1)))
    return mult >= 1.0 or mult <= cfg.tau_cluster


def instability_diagnostic(R: RationalMap, c, N: int, window: int | None = None,
                           radius: float | None = None, slope_tol: float = 0.05) -> InstabilityReport:
    """Heuristic check of the forward-orbit instability criterion at a critical point.

    Tracks |(R^n)'(R(c))| and S_n along the orbit of R(c), picks the indices
    where the orbit stays inside a disk (the subsequence), and evaluates the
    two hypotheses on the tail half of those indices. Every conclusion refers
    to the explored indices only.
    """
    c = complex(c)
    if N <= 0:
        return InstabilityReport(c, (), (), (), False, "empty", (), False, False, "inconclusive")
    cfg = R.config
    pcf = _lands_on_cycle(R, c, cfg)
    fate, _, mult = _critical_orbit_fate(R, c, cfg.orbit_budget, escape_radius(R) if R.is_polynomial else 1e12)
    attracted = fate == "cycle" and abs(mult) < 1
    series = forward_series(R, c, N)
    escaped = series.escaped
    start = R(c)
    rec = orbit(R, start, N + 1)
    mods = np.abs(series.terms)
    with np.errstate(divide="ignore"):
        dmods = 1.0 / mods
    partial = series.partials
    count = len(series.terms)
    if radius is None:
        radius = 10.0 * max(1.0, abs(c), abs(start) if not is_infinity(start) else 1.0)
    nxt = rec.points[1:count + 1]
    bounded = np.zeros(count, bool)
    bounded[: len(nxt)] = np.isfinite(nxt) & (np.abs(nxt) <= radius)
    w = window or max(2, count // 2)
    idx = np.nonzero(bounded)[0]
    tail = idx[idx >= count - w]
    notes = []
    if pcf:
        notes.append("critical orbit is finite within budget")
    if attracted:
        notes.append("critical orbit is attracted to a cycle; derivatives tend to zero")
    if escaped:
        notes.append("orbit escaped; series truncated")
    recent = dmods[-w:]
    if attracted or np.any(recent == 0):
        trend = "to-zero"  # the orbit passed through a critical point
    else:
        trend = _trend(np.log(recent[np.isfinite(recent)]), slope_tol)
    hyp1 = hyp2 = False
    tail = tail[np.isfinite(dmods[tail]) & (dmods[tail] > 0)]
    if tail.size >= 4 and not attracted:
        tl = np.log(dmods[tail])
        sub_trend = _trend(tl, slope_tol)
        s_abs = np.abs(partial[tail])
        hyp1 = sub_trend == "to-infinity" and bool(np.nanmax(s_abs) > cfg.tau_resid)
        if sub_trend == "bounded" and np.ptp(tl) <= math.log(100.0):
            q = max(1, s_abs.size // 4)
            hyp2 = bool(np.mean(s_abs[-q:]) >= 4.0 * max(np.mean(s_abs[:q]), cfg.tau_resid))
    verdict = "unstable within explored range" if (hyp1 or hyp2) else "inconclusive"
    return InstabilityReport(c, tuple(map(float, dmods)), tuple(map(complex, partial)), tuple(map(bool, bounded)),
                             pcf, trend, tuple(map(int, tail)), hyp1, hyp2, verdict, escaped, tuple(notes))


@dataclass(frozen=True)
class CriticalOrbitVerdict:
    critical_point: complex
    verdict: str  # "attracted" | "escapes" | "undetermined"
    period: int | None = None
    multiplier: complex | None = None


@dataclass(frozen=True)
class HyperbolicityReport:
    orbits: tuple[CriticalOrbitVerdict, ...]
    verdict: str  # "hyperbolic within budget" | "undetermined"


def _critical_orbit_fate(P: RationalMap, c, budget: int, escape: float, tol: float = 1e-9):
    """("escaped" | "cycle" | "unknown", period, multiplier) from the tail of the orbit."""
    rec = orbit(P, c, budget, cycle_tol=0.0, escape=escape)
    if rec.escaped:
        return "escaped", None, None
    tail = rec.points[len(rec.points) // 2:]
    cyc = find_cycle(tail[::-1], tol)
    if cyc is None:
        return "unknown", None, None
    period = cyc[1]
    _, d1, _ = P.jet(tail[-period:])
    return "cycle", period, complex(np.prod(d1))


def escape_radius(P: RationalMap) -> float:
    """Radius beyond which |P(z)| >= 2|z| for a polynomial."""
    c = P.numerator.coefficients / P.denominator.coefficients[0]
    return 2.0 * max(1.0, (1.0 + float(np.sum(np.abs(c[:-1])))) / abs(c[-1]))


def hyperbolicity_check(P: RationalMap, budget: int | None = None, tol: float = 1e-9) -> HyperbolicityReport:
    """Classify each critical orbit: attracted to a cycle, escaping, or undetermined."""
    budget = budget or P.config.orbit_budget
    crit = P.critical
    omega = crit.omega
    inf_attracting = P.fixes_infinity and not is_infinity(omega) and abs(omega) < 1
    esc = escape_radius(P) if P.is_polynomial else 1e12
    out = []
    for c in crit.points:
        status, period, mult = _critical_orbit_fate(P, c, budget, esc, tol)
        if status == "escaped":
            out.append(CriticalOrbitVerdict(c, "escapes" if inf_attracting else "undetermined"))
        elif status == "cycle":
            verdict = "attracted" if abs(mult) < 1 else "undetermined"
            out.append(CriticalOrbitVerdict(c, verdict, period, mult))
        else:
            out.append(CriticalOrbitVerdict(c, "undetermined"))
    ok = all(o.verdict in ("attracted", "escapes") for o in out)
    return HyperbolicityReport(tuple(out), "hyperbolic within budget" if ok else "undetermined")
