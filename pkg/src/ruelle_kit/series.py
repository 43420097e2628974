"""Truncated Ruelle-Poincare series as partial-sum ledgers.

Ledgers (index n = 0..L):

    RP(x)    terms 1/(R^n)'(R(x))                 forward series; |.| gives P
    RS(x, a) terms ((R*)^n tau_a)(x)              backward series
    S(x)     terms |R*|^n(1)(x)                   backward Poincare series
    A(x, a)  terms 1/((R^n)'(a) (x - R^n(a)))     modified series

A pole at index n poisons that term; the partial sums from n on are nan.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import LengthMismatchError
from .maps import INFINITY, RationalMap, is_infinity, orbit
from .span import SpanFunction
from .transfer import span_iterates
from .tree import preimage_tree

NAN = complex(np.nan, np.nan)


@dataclass(frozen=True)
class SeriesLedger:
    terms: np.ndarray
    partials: np.ndarray
    abs_partials: np.ndarray
    label: str = "custom"
    pole_index: int | None = None
    escaped: bool = False

    @classmethod
    def from_terms(cls, terms, label: str = "custom", escaped: bool = False) -> "SeriesLedger":
        terms = np.array(terms, dtype=np.complex128)
        bad = np.nonzero(~np.isfinite(terms))[0]
        pole = int(bad[0]) if bad.size else None
        partials = np.cumsum(terms)
        abs_partials = np.cumsum(np.abs(terms))
        if pole is not None:
            partials[pole:] = NAN
            abs_partials[pole:] = np.nan
        return cls(terms, partials, abs_partials, label, pole, escaped)

    def __len__(self):
        return len(self.terms)

    @property
    def value(self) -> complex:
        return complex(self.partials[-1])

    def partial(self, n: int) -> complex:
        return complex(self.partials[n])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "term_re", "term_im", "partial_re", "partial_im", "abs_partial"])
        for n, (t, p, a) in enumerate(zip(self.terms, self.partials, self.abs_partials)):
            w.writerow([n, _g(t.real), _g(t.imag), _g(p.real), _g(p.imag), _g(a)])
        return buf.getvalue()


def _g(x: float) -> str:
    return format(float(x), ".17g")


def forward_series(rmap: RationalMap, x, L: int) -> SeriesLedger:
    """RP(x, R) up to index L; ``abs_partials`` are the partial sums of P(x, R)."""
    start = rmap(x)
    if is_infinity(start):
        return SeriesLedger.from_terms([INFINITY], "RP")
    rec = orbit(rmap, start, L)
    with np.errstate(all="ignore"):
        terms = 1.0 / rec.derivative_products
    terms[rec.derivative_products == 0] = INFINITY
    escaped = rec.escaped and len(terms) < L + 1
    return SeriesLedger.from_terms(terms, "RP", escaped=escaped)


def orbit_reciprocal_series(rmap: RationalMap, a, L: int) -> SeriesLedger:
    """Terms ``1/(R^n)'(a)`` for n = 0..L (the orbit starts at a itself)."""
    rec = orbit(rmap, a, L)
    with np.errstate(all="ignore"):
        terms = 1.0 / rec.derivative_products
    terms[rec.derivative_products == 0] = INFINITY
    return SeriesLedger.from_terms(terms, "custom", escaped=rec.escaped and len(terms) < L + 1)


def rs_series(rmap: RationalMap, x, a, L: int) -> SeriesLedger:
    """RS(x, R, a) through closed-form iterates of tau_a evaluated at x."""
    its = span_iterates(rmap, SpanFunction.tau_of(a, config=rmap.config), L)
    with np.errstate(all="ignore"):
        terms = [f(x) for f in its]
    return SeriesLedger.from_terms(terms, "RS")


def s_series(rmap: RationalMap, x, L: int) -> SeriesLedger:
    """S(x, R): term n is ``sum_{R^n(y) = x} 1/|(R^n)'(y)|^2`` (term 0 is 1)."""
    tree = preimage_tree(rmap, x, L)
    terms = []
    for k in range(L + 1):
        lv = tree.level(k)
        if k and lv.flagged.any():
            terms.append(INFINITY)
            continue
        terms.append(kernels.compensated_sum(lv.multiplicity / np.abs(lv.products) ** 2).real)
    return SeriesLedger.from_terms(terms, "S")


def backward_series(rmap: RationalMap, x, a, L: int) -> tuple[SeriesLedger, SeriesLedger]:
    return rs_series(rmap, x, a, L), s_series(rmap, x, L)


def modified_series(rmap: RationalMap, x, a, L: int) -> SeriesLedger:
    """A(x, R, a); a term whose orbit point hits x is a pole."""
    rec = orbit(rmap, a, L)
    x = complex(x)
    tol = rmap.config.tau_cluster
    terms = []
    for z, d in zip(rec.points, rec.derivative_products):
        gap = x - z
        if d == 0 or abs(gap) <= tol * max(1.0, abs(x)) or is_infinity(z):
            terms.append(INFINITY if not is_infinity(z) else 0j)
        else:
            terms.append(1.0 / (d * gap))
    return SeriesLedger.from_terms(terms, "A", escaped=rec.escaped and len(terms) < L + 1)


def cauchy_product(A: SeriesLedger, B: SeriesLedger, L: int | None = None) -> SeriesLedger:
    """``c_n = sum_{k<=n} a_k b_{n-k}`` for n < L (zero-based convolution)."""
    if L is None:
        if len(A) != len(B):
            raise LengthMismatchError(f"ledgers have lengths {len(A)} and {len(B)}")
        L = len(A)
    if len(A) < L or len(B) < L:
        raise LengthMismatchError(f"need {L} terms, have {len(A)} and {len(B)}")
    if L == 0:
        return SeriesLedger.from_terms([], "custom")
    with np.errstate(all="ignore"):
        c = np.convolve(A.terms[:L], B.terms[:L])[:L]
    return SeriesLedger.from_terms(c, "custom")


@dataclass(frozen=True)
class IdentityResiduals:
    L: int
    residual_forward: float  # relation for sum_{n>=1} 1/(R^n)'(a)
    residual_backward: float  # relation for RS(x, R, a)
    forward_lhs: complex
    forward_rhs: complex
    backward_lhs: complex
    backward_rhs: complex


def identity_residuals(rmap: RationalMap, a, x, L: int) -> IdentityResiduals:
    """Check the two Cauchy-product relations between the series at depth L.

    forward:  sum_{n=1..L} 1/(R^n)'(a)
                = sum_{i=1..L} omega^i - sum_i b_i sum_{m<L} (RS(c_i, a) (x) RP(c_i))_m
    backward: sum_{n=0..L} RS_n(x, a)
                = sum_{n=0..L} A_n(x, a) + sum_i b_i sum_{m<L} (A(c_i, a) (x) RS(x, R(c_i)))_m

    Both sides are truncated at the same operator depth L, so each relation
    holds exactly up to rounding.
    """
    crit = rmap.require_simple_critical()
    omega = crit.omega
    if is_infinity(omega):
        raise ValueError("infinity must be a fixed point")
    a = complex(a)
    x = complex(x)
    pairs = [(c, b, v) for c, b, v in zip(crit.points, crit.residues, crit.values) if b != 0]

    lhs_f = orbit_reciprocal_series(rmap, a, L).partial(L) - 1.0
    rhs_terms = [omega ** i for i in range(1, L + 1)]
    rs_x = rs_series(rmap, x, a, L)
    a_x = modified_series(rmap, x, a, L)
    rhs_b_terms = [a_x.partial(L)]
    for c, b, v in pairs:
        if L == 0:
            continue
        rs_c = rs_series(rmap, c, a, L - 1)
        rp_c = forward_series(rmap, c, L - 1)
        rhs_terms.append(-b * cauchy_product(rs_c, rp_c, L).partial(L - 1))
        a_c = modified_series(rmap, c, a, L - 1)
        rs_v = rs_series(rmap, x, v, L - 1)
        rhs_b_terms.append(b * cauchy_product(a_c, rs_v, L).partial(L - 1))
    rhs_f = kernels.compensated_sum(rhs_terms) if rhs_terms else 0j
    rhs_b = kernels.compensated_sum(rhs_b_terms)
    lhs_b = rs_x.partial(L)
    return IdentityResiduals(L, float(abs(lhs_f - rhs_f)), float(abs(lhs_b - rhs_b)),
                             complex(lhs_f), complex(rhs_f), complex(lhs_b), complex(rhs_b))
