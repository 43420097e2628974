"""Finite combinations of the kernels gamma_a and tau_a plus a constant.

    gamma_a(z) = a(a-1) / (z(z-1)(z-a))        tau_a(z) = 1/(z-a)

gamma_a = (a-1) tau_0 - a tau_1 + tau_a, so a span of gammas is a rational
function with simple poles that decays like z^-3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import DEFAULT_CONFIG, RunConfig


def gamma(a: complex, z):
    return a * (a - 1) / (z * (z - 1) * (z - a))


def tau(a: complex, z):
    return 1.0 / (z - a)


def _merge(terms, tol: float, tau_drop: float):
    """Merge poles closer than ``tol`` (relative) and purge tiny coefficients."""
    keys: list[complex] = []
    vals: list[complex] = []
    for a, c in terms:
        a = complex(a)
        for i, b in enumerate(keys):
            if abs(a - b) <= tol * max(1.0, abs(a), abs(b)):
                vals[i] += c
                break
        else:
            keys.append(a)
            vals.append(complex(c))
    if not keys:
        return ()
    cmax = max(abs(v) for v in vals)
    out = [(k, v) for k, v in zip(keys, vals) if abs(v) > tau_drop * cmax and v != 0]
    return tuple(sorted(out, key=lambda kv: (kv[0].real, kv[0].imag)))


@dataclass(frozen=True)
class SpanFunction:
    gamma_terms: tuple[tuple[complex, complex], ...] = ()
    tau_terms: tuple[tuple[complex, complex], ...] = ()
    constant_term: complex = 0j

    @classmethod
    def build(cls, gamma_terms=(), tau_terms=(), constant=0j, config: RunConfig = DEFAULT_CONFIG):
        items = gamma_terms.items() if isinstance(gamma_terms, dict) else gamma_terms
        titems = tau_terms.items() if isinstance(tau_terms, dict) else tau_terms
        g = _merge(items, config.tau_cluster, config.tau_drop)
        for a, _ in g:
            if min(abs(a), abs(a - 1)) <= config.tau_cluster * max(1.0, abs(a)):
                raise ValueError(f"gamma pole {a} collides with 0 or 1")
        return cls(g, _merge(titems, config.tau_cluster, config.tau_drop), complex(constant))

    @classmethod
    def gamma_of(cls, a, coefficient=1.0, config: RunConfig = DEFAULT_CONFIG):
        return cls.build({complex(a): coefficient}, config=config)

    @classmethod
    def tau_of(cls, a, coefficient=1.0, config: RunConfig = DEFAULT_CONFIG):
        return cls.build(tau_terms={complex(a): coefficient}, config=config)

    @property
    def basis_tag(self) -> str:
        if self.gamma_terms and not self.tau_terms:
            return "gamma"
        if self.tau_terms and not self.gamma_terms:
            return "tau"
        return "mixed"

    @property
    def size(self) -> int:
        return len(self.gamma_terms) + len(self.tau_terms)

    def is_zero(self) -> bool:
        return not self.gamma_terms and not self.tau_terms and self.constant_term == 0

    def gamma_dict(self) -> dict[complex, complex]:
        return dict(self.gamma_terms)

    def tau_dict(self) -> dict[complex, complex]:
        return dict(self.tau_terms)

    def __call__(self, z):
        z = complex(z)
        try:
            vals = [c * gamma(a, z) for a, c in self.gamma_terms]
            vals += [c * tau(a, z) for a, c in self.tau_terms]
        except ZeroDivisionError:
            return complex(math.inf, 0.0)
        vals.append(self.constant_term)
        return kernels.compensated_sum(vals)

    def evaluate_many(self, zs) -> np.ndarray:
        return np.array([self(z) for z in np.atleast_1d(zs)])

    def combine(self, other: "SpanFunction", alpha=1.0, beta=1.0, config: RunConfig = DEFAULT_CONFIG):
        """alpha * self + beta * other."""
        g = [(a, alpha * c) for a, c in self.gamma_terms] + [(a, beta * c) for a, c in other.gamma_terms]
        t = [(a, alpha * c) for a, c in self.tau_terms] + [(a, beta * c) for a, c in other.tau_terms]
        return SpanFunction.build(g, t, alpha * self.constant_term + beta * other.constant_term, config)

    def __add__(self, other):
        return self.combine(other)

    def __sub__(self, other):
        return self.combine(other, 1.0, -1.0)

    def scale(self, s) -> "SpanFunction":
        s = complex(s)
        if s == 0:
            return SpanFunction()
        return SpanFunction(tuple((a, s * c) for a, c in self.gamma_terms),
                            tuple((a, s * c) for a, c in self.tau_terms),
                            s * self.constant_term)

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def coefficient_vector(self, basis, tol: float = DEFAULT_CONFIG.tau_cluster) -> np.ndarray:
        """Gamma coefficients on an ordered basis of poles; unmatched poles raise KeyError."""
        out = np.zeros(len(basis), np.complex128)
        for a, c in self.gamma_terms:
            for i, b in enumerate(basis):
                if abs(a - b) <= tol * max(1.0, abs(a), abs(b)):
                    out[i] += c
                    break
            else:
                raise KeyError(a)
        return out

    def max_coefficient(self) -> float:
        vals = [abs(c) for _, c in self.gamma_terms + self.tau_terms] + [abs(self.constant_term)]
        return max(vals)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        def rows(terms):
            return [[a.real, a.imag, c.real, c.imag] for a, c in terms]

        c = self.constant_term
        return {"gamma": rows(self.gamma_terms), "tau": rows(self.tau_terms), "const": [c.real, c.imag]}

    @classmethod
    def from_json(cls, data: dict, config: RunConfig = DEFAULT_CONFIG) -> "SpanFunction":
        def terms(rows):
            return [(complex(r[0], r[1]), complex(r[2], r[3])) for r in rows]

        const = data.get("const", [0.0, 0.0])
        return cls.build(terms(data.get("gamma", [])), terms(data.get("tau", [])),
                         complex(const[0], const[1]), config)


ZERO = SpanFunction()
