"""Finite transfer matrix of R* on span{gamma_a : a in S} for postcritically finite maps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonInvariantSpanError, PreconditionError, SpectrumError
from .maps import RationalMap, is_infinity, is_normalized, orbit
from .span import SpanFunction
from .transfer import _SpanContext, span_pushforward


@dataclass(frozen=True)
class PostcriticalSet:
    finite: bool
    points: tuple[complex, ...]  # basis points, 0, 1 and infinity removed, sorted
    orbits: tuple[tuple[complex, ...], ...]  # orbit of each critical point up to the first revisit
    cycles: tuple[tuple[int, int] | None, ...]  # (preperiod, period) per critical point


def _is_special(z: complex, tol: float) -> bool:
    return is_infinity(z) or min(abs(z), abs(z - 1)) <= tol * max(1.0, abs(z))


def postcritical_set(rmap: RationalMap, budget: int | None = None) -> PostcriticalSet:
    """Critical points and their orbits, minus {0, 1, infinity}, when every orbit closes within budget."""
    cfg = rmap.config
    budget = min(budget or cfg.orbit_budget, cfg.orbit_budget)
    tol = cfg.tau_cluster
    crit = rmap.critical
    orbits, cycles = [], []
    finite = True
    for c in crit.points:
        rec = orbit(rmap, c, budget, cycle_tol=tol)
        if rec.escaped:
            pts = [p for p in rec.points if np.isfinite(p)]
            last = pts[-1]
            if abs(rmap.denominator(last)) <= tol * rmap.denominator.scale * max(1.0, abs(last)) ** rmap.denominator.degree:
                # landed on a pole, so the orbit joins the fixed point at infinity
                orbits.append(tuple(pts))
                cycles.append((len(pts), 1))
                continue
            finite = False
            orbits.append(tuple(pts))
            cycles.append(None)
            continue
        if rec.cycle is None:
            finite = False
            orbits.append(tuple(rec.points))
            cycles.append(None)
            continue
        start, period = rec.cycle
        orbits.append(tuple(rec.points[:start + period]))
        cycles.append((start, period))
    if not finite:
        return PostcriticalSet(False, (), tuple(orbits), tuple(cycles))
    pts: list[complex] = []
    for orb in orbits:
        for z in orb:
            z = complex(z)
            if _is_special(z, tol):
                continue
            if any(abs(z - p) <= tol * max(1.0, abs(p)) for p in pts):
                continue
            pts.append(z)
    pts.sort(key=lambda z: (z.real, z.imag))
    return PostcriticalSet(True, tuple(pts), tuple(orbits), tuple(cycles))


@dataclass(frozen=True)
class TransferMatrix:
    basis: tuple[complex, ...]
    matrix: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.basis)

    def apply(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=np.complex128)

    def to_json(self) -> dict:
        return {
            "basis": [[a.real, a.imag] for a in self.basis],
            "matrix": [[[x.real, x.imag] for x in row] for row in self.matrix],
        }


def transfer_matrix(rmap: RationalMap, basis) -> TransferMatrix:
    """Column a holds the coefficients of R*(gamma_a) in the basis."""
    basis = tuple(complex(a) for a in basis)
    n = len(basis)
    if n == 0:
        return TransferMatrix((), np.zeros((0, 0), dtype=np.complex128))
    if not is_normalized(rmap):
        raise PreconditionError("transfer matrix needs a map normalized to fix 0, 1 and infinity")
    cfg = rmap.config
    ctx = _SpanContext(rmap, True)
    M = np.zeros((n, n), dtype=np.complex128)
    for j, a in enumerate(basis):
        img = span_pushforward(rmap, SpanFunction.gamma_of(a, config=cfg), ctx)
        if img.tau_terms or img.constant_term != 0:
            raise NonInvariantSpanError(f"image of gamma_{a} leaves the gamma span")
        try:
            M[:, j] = img.coefficient_vector(basis, cfg.tau_cluster)
        except KeyError as err:
            raise NonInvariantSpanError(f"image of gamma_{a} has a pole outside the basis: {err}") from None
    return TransferMatrix(basis, M)


def _eig_order(v: complex):
    return (abs(v), v.real, v.imag)


def spectrum(M, residual_tol: float = 1e-8) -> list[complex]:
    """Eigenvalues with multiplicity, by increasing modulus; each pair meets the residual bound."""
    A = M.matrix if isinstance(M, TransferMatrix) else np.asarray(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SpectrumError("spectrum needs a square matrix")
    if A.size == 0:
        return []
    try:
        vals, vecs = np.linalg.eig(A)
    except np.linalg.LinAlgError as err:
        raise SpectrumError(f"eigenvalue iteration failed: {err}") from None
    norm = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    bad = []
    for k in range(len(vals)):
        v = vecs[:, k]
        if np.linalg.norm(A @ v - vals[k] * v) > residual_tol * norm * np.linalg.norm(v):
            bad.append(k)
    good = [complex(v) for k, v in enumerate(vals) if k not in bad]
    if bad:
        raise SpectrumError("eigenpair residual above tolerance", partial=sorted(good, key=_eig_order))
    # snap round-off so the output is reproducible across BLAS builds
    snapped = [complex(_snap(v.real, norm), _snap(v.imag, norm)) for v in good]
    return sorted(snapped, key=_eig_order)


def _snap(x: float, scale: float) -> float:
    return 0.0 if abs(x) <= 1e-14 * scale else float(x)
