"""Complex polynomials with ascending coefficients, and a root finder."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import kernels
from .config import DEFAULT_CONFIG, RunConfig
from .errors import MalformedMapError, RootFailureError


class Polynomial:
    """Polynomial ``sum c[k] z**k`` with trimmed complex coefficients."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients, tau_trim: float = DEFAULT_CONFIG.tau_trim):
        c = np.array(coefficients, dtype=np.complex128).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=np.complex128)
        if not np.all(np.isfinite(c)):
            raise MalformedMapError("polynomial coefficients must be finite")
        scale = np.max(np.abs(c))
        if scale > 0:
            keep = np.nonzero(np.abs(c) > tau_trim * scale)[0]
            c = c[: keep[-1] + 1].copy()
        else:
            c = c[:1].copy()
        c.setflags(write=False)
        self.coefficients = c

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.coefficients[-1])

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coefficients[0] == 0

    def __call__(self, z):
        return npoly.polyval(z, self.coefficients)

    def deriv(self, m: int = 1) -> "Polynomial":
        if self.degree < m:
            return Polynomial([0])
        return Polynomial(npoly.polyder(self.coefficients, m))

    def __add__(self, other):
        other = _as_poly(other)
        return Polynomial(npoly.polyadd(self.coefficients, other.coefficients))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coefficients)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        return Polynomial(npoly.polymul(self.coefficients, other.coefficients))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coefficients, other.coefficients)

    def __hash__(self):
        return hash(self.coefficients.tobytes())

    def __repr__(self):
        return f"Polynomial({self.coefficients.tolist()!r})"

    def compose(self, other: "Polynomial") -> "Polynomial":
        out = Polynomial([self.coefficients[-1]])
        for a in self.coefficients[-2::-1]:
            out = out * other + complex(a)
        return out


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial([x])


@dataclass(frozen=True)
class Root:
    value: complex
    multiplicity: int = 1


def find_roots(p: Polynomial, config: RunConfig = DEFAULT_CONFIG) -> list[Root]:
    """All roots of ``p``; nearby approximations are merged into clusters.

    Roots come back sorted by real then imaginary part. A cluster of size m is
    reported once, at the root of the (m-1)-th derivative nearest its mean.
    """
    if p.degree < 1:
        raise ValueError("find_roots needs degree >= 1")
    c = p.coefficients
    if p.degree == 1:
        return [Root(complex(-c[0] / c[1]))]
    roots, iters = kernels.aberth_batch(c[None, :], config.tau_root * 1e-2, config.root_maxiter)
    z = roots[0]
    z = np.array([_polish(p, complex(r)) for r in z])
    rscale = max(1.0, float(np.max(np.abs(z))))
    out = []
    for g in _clusters_by_size(z, p.degree, config.tau_root_cluster, rscale):
        if len(g) == 1:
            out.append(Root(complex(z[g[0]])))
        else:
            center = complex(np.mean(z[g]))
            out.append(Root(_polish(p.deriv(len(g) - 1), center), len(g)))
    scale = p.scale
    bad = [r for r in out if r.multiplicity == 1
           and abs(p(r.value)) > config.tau_root * scale * max(1.0, abs(r.value)) ** p.degree * 1e3]
    if iters[0] >= config.root_maxiter and bad:
        raise RootFailureError("root iteration did not converge", partial=out)
    return sorted(out, key=lambda r: (r.value.real, r.value.imag))


def _polish(p: Polynomial, z: complex, steps: int = 3) -> complex:
    dp = p.deriv()
    best = abs(p(z))
    for _ in range(steps):
        d = dp(z)
        if d == 0 or best == 0:
            break
        cand = z - p(z) / d
        val = abs(p(cand))
        if not val < best:
            break
        z, best = complex(cand), val
    return complex(z)


def _clusters_by_size(z, degree, tau, rscale):
    # an m-fold root is only resolved to ~eps**(1/m); try large clusters first
    eps = np.finfo(float).eps
    remaining = list(range(len(z)))
    found = []
    for m in range(degree, 1, -1):
        radius = max(tau, 4.0 * eps ** (1.0 / m)) * rscale
        for g in _cluster(z[remaining], radius):
            if len(g) >= m:
                found.append([remaining[i] for i in g])
        taken = {i for g in found for i in g}
        remaining = [i for i in remaining if i not in taken]
    found.extend([i] for i in remaining)
    return sorted(found, key=min)


def _cluster(z: np.ndarray, radius: float) -> list[list[int]]:
    # single-linkage grouping; deterministic order by first index
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) < radius:
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())
