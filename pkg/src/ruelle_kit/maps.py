"""Rational maps on the Riemann sphere: evaluation, critical data, fixed
points, Mobius normalization and forward orbits.

The point at infinity is represented by ``INFINITY`` (``inf + 0j``); any
non-finite complex value is treated as infinity by :func:`is_infinity`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .config import DEFAULT_CONFIG, RunConfig
from .errors import MalformedMapError, NonSimpleCriticalError, NormalizationError
from .polynomial import Polynomial, find_roots

INFINITY = complex(math.inf, 0.0)


def is_infinity(z) -> bool:
    z = complex(z)
    return not (math.isfinite(z.real) and math.isfinite(z.imag))


def _close(a: complex, b: complex, tol: float) -> bool:
    if is_infinity(a) or is_infinity(b):
        return is_infinity(a) and is_infinity(b)
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class CriticalData:
    points: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    values: tuple[complex, ...]
    residues: tuple[complex, ...]  # b_i = 1/R''(c_i); nan for non-simple points, 0 at poles
    omega: complex  # limit of 1/R' at infinity
    infinity_multiplicity: int  # multiplicity of infinity as a critical point

    @property
    def all_simple(self) -> bool:
        # finite critical points only; a polynomial of degree d has infinity of order d - 1
        return all(m == 1 for m in self.multiplicities)

    @property
    def finite_count(self) -> int:
        return sum(self.multiplicities)


@dataclass(frozen=True)
class FixedPoint:
    point: complex
    multiplier: complex
    multiplicity: int = 1

    @property
    def superattracting(self) -> bool:
        return self.multiplier == 0


class RationalMap:
    """R = P/Q in lowest terms with degree max(deg P, deg Q) >= 2."""

    def __init__(self, numerator, denominator=(1.0,), config: RunConfig = DEFAULT_CONFIG):
        self.config = config
        p = numerator if isinstance(numerator, Polynomial) else Polynomial(numerator, config.tau_trim)
        q = denominator if isinstance(denominator, Polynomial) else Polynomial(denominator, config.tau_trim)
        if q.is_zero():
            raise MalformedMapError("denominator is identically zero")
        if p.is_zero():
            raise MalformedMapError("numerator is identically zero")
        self.numerator = p
        self.denominator = q
        self.degree = max(p.degree, q.degree)
        if self.degree < 2:
            raise MalformedMapError("maps of degree < 2 are not supported")
        n = self.degree + 1
        self._num = np.zeros(n, np.complex128)
        self._den = np.zeros(n, np.complex128)
        self._num[: p.degree + 1] = p.coefficients
        self._den[: q.degree + 1] = q.coefficients
        # kernel arrays trimmed to true degree
        self._num_k = np.ascontiguousarray(p.coefficients)
        self._den_k = np.ascontiguousarray(q.coefficients)
        if q.degree >= 1:
            for r in find_roots(q, config):
                if abs(p(r.value)) <= 1e3 * config.tau_root * p.scale * max(1.0, abs(r.value)) ** p.degree:
                    raise MalformedMapError(f"numerator and denominator share the root {r.value}")

    @classmethod
    def polynomial(cls, coefficients, config: RunConfig = DEFAULT_CONFIG) -> "RationalMap":
        return cls(coefficients, (1.0,), config)

    def with_config(self, config: RunConfig) -> "RationalMap":
        return RationalMap(self.numerator, self.denominator, config)

    @property
    def is_polynomial(self) -> bool:
        return self.denominator.degree == 0

    @property
    def fixes_infinity(self) -> bool:
        return self.numerator.degree > self.denominator.degree

    @property
    def scale(self) -> float:
        return max(self.numerator.scale, self.denominator.scale)

    def __repr__(self):
        return f"RationalMap({self.numerator.coefficients.tolist()}, {self.denominator.coefficients.tolist()})"

    # -- evaluation ---------------------------------------------------------

    def value_at_infinity(self) -> complex:
        p, q = self.numerator, self.denominator
        if p.degree > q.degree:
            return INFINITY
        if p.degree < q.degree:
            return 0j
        return p.leading / q.leading

    def evaluate(self, z, order: int = 0) -> tuple[complex, ...]:
        """``(R(z), R'(z), R''(z))`` truncated to ``order + 1`` entries.

        Poles and infinity give ``INFINITY`` for the value; derivatives there
        are reported as nan (use :meth:`local_degree` for the local behaviour).
        """
        if not 0 <= order <= 2:
            raise ValueError("derivative order must be 0, 1 or 2")
        if is_infinity(z):
            return (self.value_at_infinity(),) + (complex(math.nan, math.nan),) * order
        r, r1, r2 = kernels.rational_jet(self._num_k, self._den_k, [complex(z)])
        q = self.denominator(complex(z))
        if abs(q) <= self.config.tau_root * self.denominator.scale:
            return (INFINITY,) + (complex(math.nan, math.nan),) * order
        return (complex(r[0]), complex(r1[0]), complex(r2[0]))[: order + 1]

    def __call__(self, z) -> complex:
        return self.evaluate(z)[0]

    def derivative(self, z) -> complex:
        return self.evaluate(z, 1)[1]

    def jet(self, zs):
        """Vectorized ``(R, R', R'')`` at finite points."""
        return kernels.rational_jet(self._num_k, self._den_k, zs)

    def iterate_jet(self, zs, n: int):
        """Vectorized ``(R^n, (R^n)', (R^n)'')`` by forward-mode chain rule."""
        return kernels.iterate_jet(self._num_k, self._den_k, zs, n)

    def local_degree(self, z) -> int:
        if is_infinity(z):
            p, q = self.numerator, self.denominator
            if p.degree != q.degree:
                return abs(p.degree - q.degree)
            rest = p - q * self.value_at_infinity()
            return q.degree - rest.degree
        crit = self.critical
        for c, m in zip(crit.points, crit.multiplicities):
            if _close(c, complex(z), self.config.tau_cluster):
                return m + 1
        return 1

    # -- critical data ------------------------------------------------------

    @cached_property
    def critical(self) -> CriticalData:
        p, q = self.numerator, self.denominator
        w = p.deriv() * q - p * q.deriv()
        roots = find_roots(w, self.config) if w.degree >= 1 else []
        pts, mults, vals, res = [], [], [], []
        for r in roots:
            c = r.value
            pts.append(c)
            mults.append(r.multiplicity)
            if abs(q(c)) <= 1e3 * self.config.tau_root * q.scale * max(1.0, abs(c)) ** q.degree:
                vals.append(INFINITY)
                res.append(0j)
                continue
            val, _, r2 = self.evaluate(c, 2)
            vals.append(val)
            res.append(1.0 / r2 if r.multiplicity == 1 else complex(math.nan, math.nan))
        if p.degree >= q.degree + 2:
            omega = 0j
        elif p.degree == q.degree + 1:
            omega = q.leading / (p.leading * (p.degree - q.degree))
        else:
            omega = INFINITY
        inf_mult = 2 * self.degree - 2 - sum(mults)
        return CriticalData(tuple(pts), tuple(mults), tuple(vals), tuple(res), omega, inf_mult)

    def require_simple_critical(self) -> CriticalData:
        crit = self.critical
        if not all(m == 1 for m in crit.multiplicities):
            raise NonSimpleCriticalError("map has a non-simple finite critical point")
        return crit

    def reciprocal_derivative_decomposition(self, z) -> complex:
        """``omega + sum b_i / (z - c_i)``; equals ``1/R'(z)`` for simple critical points."""
        crit = self.require_simple_critical()
        terms = [crit.omega] + [b / (z - c) for c, b in zip(crit.points, crit.residues) if b != 0]
        return kernels.compensated_sum(terms)

    # -- fixed points -------------------------------------------------------

    def fixed_points(self) -> list[FixedPoint]:
        p, q = self.numerator, self.denominator
        g = p - q * Polynomial([0, 1])
        out = []
        for r in find_roots(g, self.config):
            out.append(FixedPoint(r.value, self.derivative(r.value), r.multiplicity))
        if self.fixes_infinity:
            out.append(FixedPoint(INFINITY, self.critical.omega, 1))
        return out

    def fixes(self, z) -> bool:
        return _close(self(z), complex(z), self.config.tau_comp * 1e2)


# -- Mobius transforms -------------------------------------------------------


@dataclass(frozen=True)
class MobiusTransform:
    """z -> (a z + b) / (c z + d), scaled so that ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise ValueError("degenerate Mobius transform")
        s = cmath.sqrt(det)
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)) / s)

    @classmethod
    def identity(cls) -> "MobiusTransform":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_points(cls, f0, f1, finf) -> "MobiusTransform":
        """The transform sending f0 -> 0, f1 -> 1, finf -> infinity."""
        if is_infinity(finf):
            return cls(1, -f0, 0, f1 - f0)
        if is_infinity(f0):
            return cls(0, f1 - finf, 1, -finf)
        if is_infinity(f1):
            return cls(1, -f0, 1, -finf)
        return cls(f1 - finf, -f0 * (f1 - finf), f1 - f0, -finf * (f1 - f0))

    def __call__(self, z) -> complex:
        a, b, c, d = self.a, self.b, self.c, self.d
        if is_infinity(z):
            return INFINITY if c == 0 else a / c
        den = c * z + d
        if den == 0:
            return INFINITY
        return (a * z + b) / den

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusTransform") -> "MobiusTransform":
        """self o other."""
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return MobiusTransform(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def conjugate(rmap: RationalMap, m: MobiusTransform) -> RationalMap:
    """The map m o R o m^-1, assembled in exact polynomial arithmetic."""
    inv = m.inverse()
    num_x = Polynomial([inv.b, inv.a])
    den_x = Polynomial([inv.d, inv.c])
    deg = rmap.degree

    def homogenize(coeffs):
        out = Polynomial([0])
        for k, ck in enumerate(coeffs):
            if ck != 0:
                term = Polynomial([ck])
                for _ in range(k):
                    term = term * num_x
                for _ in range(deg - k):
                    term = term * den_x
                out = out + term
        return out

    u = homogenize(rmap._num)
    v = homogenize(rmap._den)
    top = u * m.a + v * m.b
    bottom = u * m.c + v * m.d
    lead = bottom.leading
    return RationalMap(Polynomial(top.coefficients / lead, rmap.config.tau_trim),
                       Polynomial(bottom.coefficients / lead, rmap.config.tau_trim),
                       rmap.config)


def normalize_fixed(rmap: RationalMap, f0, f1, finf) -> tuple[RationalMap, MobiusTransform]:
    """Conjugate ``rmap`` so that the fixed points f0, f1, finf move to 0, 1, infinity."""
    pts = [complex(f0), complex(f1), complex(finf)]
    tol = rmap.config.tau_cluster
    for i in range(3):
        for j in range(i + 1, 3):
            if _close(pts[i], pts[j], tol):
                raise NormalizationError("normalization points are not distinct")
    for z in pts:
        if is_infinity(z):
            if not rmap.fixes_infinity:
                raise NormalizationError("infinity is not a fixed point")
        elif not rmap.fixes(z):
            raise NormalizationError(f"{z} is not a fixed point")
    m = MobiusTransform.from_points(*pts)
    out = conjugate(rmap, m)
    if not (out.fixes(0) and out.fixes(1) and out.fixes_infinity):
        raise NormalizationError("conjugated map does not fix 0, 1, infinity")
    return out, m


def is_normalized(rmap: RationalMap) -> bool:
    return rmap.fixes_infinity and rmap.fixes(0) and rmap.fixes(1)


# -- orbits ------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitRecord:
    start: complex
    points: np.ndarray
    derivative_products: np.ndarray
    status: str  # "escaped" | "cycle" | "budget-exhausted"
    cycle: tuple[int, int] | None = None  # (first index of cycle, period)

    @property
    def escaped(self) -> bool:
        return self.status == "escaped"

    @property
    def length(self) -> int:
        return len(self.points) - 1


def orbit(rmap: RationalMap, z0, n: int, cycle_tol: float | None = None,
          escape: float = 1e150) -> OrbitRecord:
    """Forward orbit ``R^j(z0)`` for ``j <= n`` with chain-rule products ``(R^j)'(z0)``."""
    if n > rmap.config.orbit_budget * 64:
        raise ValueError(f"orbit length {n} exceeds the orbit budget")
    if is_infinity(z0):
        pts = np.full(n + 1, INFINITY)
        dps = np.full(n + 1, complex(math.nan, math.nan))
        return OrbitRecord(INFINITY, pts, dps, "escaped")
    with np.errstate(all="ignore"):
        pts, dps, escaped = kernels.orbit(rmap._num_k, rmap._den_k, z0, n, escape)
    pts = np.array(pts)
    dps = np.array(dps)
    tol = rmap.config.tau_cluster if cycle_tol is None else cycle_tol
    cycle = find_cycle(pts, tol)
    if escaped:
        status = "escaped"
    elif cycle is not None:
        status = "cycle"
    else:
        status = "budget-exhausted"
    return OrbitRecord(complex(z0), pts, dps, status, cycle)


def find_cycle(points: np.ndarray, tol: float) -> tuple[int, int] | None:
    """First revisit ``|z_j - z_i| <= tol * max(1, |z_i|)`` as (i, j - i)."""
    pts = np.asarray(points)
    finite = np.isfinite(pts)
    for j in range(1, len(pts)):
        if not finite[j]:
            return None
        prev = pts[:j]
        hit = np.nonzero(np.abs(prev - pts[j]) <= tol * np.maximum(1.0, np.abs(prev)))[0]
        if hit.size:
            i = int(hit[0])
            return i, j - i
    return None
