"""Atomic measures carried by span functions.

With mass = residue, each term alpha * gamma_a contributes

    alpha(a-1) at 0,   -alpha*a at 1,   alpha at a

so masses of a gamma-derived measure always cancel against 1 and z. The
Cauchy transform F(a) = sum mass / (atom - a) then recovers -f for a gamma
span f.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .config import DEFAULT_CONFIG, RunConfig
from .errors import BudgetError, PreconditionError, UnsupportedMapError
from .maps import INFINITY, RationalMap, is_normalized
from .span import SpanFunction, _merge
from .transfer import span_iterates


@dataclass(frozen=True)
class AtomicMeasure:
    atoms: tuple[tuple[complex, complex], ...] = ()
    truncated: bool = False

    @classmethod
    def build(cls, atoms, config: RunConfig = DEFAULT_CONFIG, truncated: bool = False) -> "AtomicMeasure":
        items = atoms.items() if isinstance(atoms, dict) else atoms
        # tau_drop = 0: masses are merged but never purged, so cancellation stays exact
        return cls(_merge(items, config.tau_cluster, 0.0), truncated)

    @property
    def support(self) -> np.ndarray:
        return np.array([a for a, _ in self.atoms], dtype=np.complex128)

    @property
    def masses(self) -> np.ndarray:
        return np.array([m for _, m in self.atoms], dtype=np.complex128)

    def mass_at(self, point, tol: float = DEFAULT_CONFIG.tau_cluster) -> complex:
        point = complex(point)
        for a, m in self.atoms:
            if abs(a - point) <= tol * max(1.0, abs(point)):
                return m
        return 0j

    def total_variation(self) -> float:
        return math.fsum(abs(m) for _, m in self.atoms)

    def total_mass(self) -> complex:
        return kernels.compensated_sum(self.masses)

    def scale(self, s) -> "AtomicMeasure":
        return AtomicMeasure(tuple((a, m * s) for a, m in self.atoms), self.truncated)

    def to_json(self) -> dict:
        return {"atoms": [[a.real, a.imag, m.real, m.imag] for a, m in self.atoms]}

    @classmethod
    def from_json(cls, data: dict, config: RunConfig = DEFAULT_CONFIG) -> "AtomicMeasure":
        return cls.build([(complex(r[0], r[1]), complex(r[2], r[3])) for r in data["atoms"]], config)


def measure_from_span(f: SpanFunction, include_tau: bool = False,
                      config: RunConfig = DEFAULT_CONFIG) -> AtomicMeasure:
    """Atoms of the d-bar derivative of a span function (mass = residue)."""
    if f.tau_terms and not include_tau:
        raise UnsupportedMapError("span has tau terms; pass include_tau=True to give them atoms")
    atoms = []
    for a, alpha in f.gamma_terms:
        atoms += [(0j, alpha * (a - 1)), (1 + 0j, -alpha * a), (a, alpha)]
    if include_tau:
        atoms += list(f.tau_terms)
    return AtomicMeasure.build(atoms, config)


def _start(rmap: RationalMap, i: int) -> SpanFunction:
    if not is_normalized(rmap):
        raise PreconditionError("measures need a map normalized to fix 0, 1 and infinity")
    crit = rmap.critical
    if not 0 <= i < crit.finite_count:
        raise IndexError(f"critical index {i} out of range")
    d = crit.values[i]
    try:
        return SpanFunction.gamma_of(d, config=rmap.config)
    except ValueError:
        raise PreconditionError(f"critical value {d} is 0, 1 or infinity; gamma degenerates") from None


def mu_sequence(rmap: RationalMap, i: int, n: int) -> list[AtomicMeasure]:
    """``[mu_0, ..., mu_n]`` for critical index i; on span-budget exhaustion the
    explored prefix is returned with the last entry flagged ``truncated``."""
    f = _start(rmap, i)
    try:
        its = span_iterates(rmap, f, n)
        cut = False
    except BudgetError as err:
        its, cut = err.partial, True
    out = [measure_from_span(g, config=rmap.config) for g in its]
    if cut:
        out[-1] = AtomicMeasure(out[-1].atoms, True)
    return out


def mu_n(rmap: RationalMap, i: int, n: int) -> AtomicMeasure:
    seq = mu_sequence(rmap, i, n)
    if len(seq) < n + 1:
        raise BudgetError(f"span budget exhausted before n={n}", partial=seq[-1])
    return seq[-1]


def average(measures: Sequence[AtomicMeasure], config: RunConfig = DEFAULT_CONFIG) -> AtomicMeasure:
    if not measures:
        return AtomicMeasure()
    l = len(measures)
    atoms = [(a, m / l) for mu in measures for a, m in mu.atoms]
    return AtomicMeasure.build(atoms, config, any(mu.truncated for mu in measures))


def nu_l(rmap: RationalMap, i: int, l: int) -> AtomicMeasure:
    """Cesaro average ``(1/l) sum_{k<l} mu_k``."""
    if l < 1:
        raise ValueError("l must be >= 1")
    seq = mu_sequence(rmap, i, l - 1)
    return average(seq, rmap.config)


def pair(measure: AtomicMeasure, h: Callable) -> complex:
    if not measure.atoms:
        return 0j
    vals = np.array([complex(h(a)) for a in measure.support])
    return kernels.compensated_sum(measure.masses * vals)


def cauchy_transform(measure: AtomicMeasure, a, tol: float = DEFAULT_CONFIG.tau_cluster) -> complex:
    """``F(a) = sum mass / (atom - a)``; INFINITY when a sits on an atom."""
    a = complex(a)
    if not measure.atoms:
        return 0j
    pts = measure.support
    if np.any(np.abs(pts - a) <= tol * max(1.0, abs(a))):
        return INFINITY
    return kernels.compensated_sum(measure.masses / (pts - a))


@dataclass(frozen=True)
class ConvergenceRow:
    l: int
    test: int
    pairing: complex
    delta: float  # |pairing - pairing at previous l|, nan for the first


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    total_variation: tuple[tuple[int, float], ...]
    truncated: bool = False

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "test", "pairing_re", "pairing_im", "delta"])
        for r in self.rows:
            w.writerow([r.l, r.test, f"{r.pairing.real:.17g}", f"{r.pairing.imag:.17g}", f"{r.delta:.17g}"])
        return buf.getvalue()


def convergence_report(rmap: RationalMap, i: int, l_grid: Sequence[int],
                       tests: Sequence[Callable]) -> ConvergenceReport:
    """Pairings of nu_l against each test function over the grid of l."""
    grid = sorted(set(int(l) for l in l_grid))
    if not grid:
        return ConvergenceReport((), ())
    if grid[0] < 1:
        raise ValueError("grid values must be >= 1")
    seq = mu_sequence(rmap, i, grid[-1] - 1)
    truncated = len(seq) < grid[-1]
    rows, tvs = [], []
    prev: dict[int, complex] = {}
    for l in grid:
        if l > len(seq):
            break
        nu = average(seq[:l], rmap.config)
        tvs.append((l, nu.total_variation()))
        for t, h in enumerate(tests):
            v = pair(nu, h)
            d = abs(v - prev[t]) if t in prev else math.nan
            prev[t] = v
            rows.append(ConvergenceRow(l, t, v, d))
    return ConvergenceReport(tuple(rows), tuple(tvs), truncated)
