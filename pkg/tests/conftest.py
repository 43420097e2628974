import numpy as np
import pytest

from ruelle_kit import RationalMap

ACCEPTANCE_LINES: list[str] = []


def brute_pushforward(R: RationalMap, phi, z, n=2, m=0):
    """Sum over preimages found by numpy's companion-matrix solver."""
    P = np.asarray(R.numerator.coefficients, dtype=complex)
    Q = np.asarray(R.denominator.coefficients, dtype=complex)
    width = max(len(P), len(Q))
    row = np.zeros(width, complex)
    row[: len(P)] += P
    row[: len(Q)] -= z * Q
    roots = np.roots(row[::-1])
    total = 0j
    for y in roots:
        d = R.derivative(y)
        total += phi(y) / (d ** n * np.conj(d) ** m)
    return total


def random_normalized_map(rng, degree, rational=False, tries=100):
    """A map fixing 0, 1 and infinity with simple critical points and no critical relations."""
    for _ in range(tries):
        if not rational:
            q = rng.normal(size=degree - 1) + 1j * rng.normal(size=degree - 1)
            # P(z) = z + z(z-1)q(z)
            P = np.polynomial.polynomial.polyadd([0, 1], np.polynomial.polynomial.polymul([0, -1, 1], q))
            Q = [1.0]
        else:
            a = rng.normal(size=degree) + 1j * rng.normal(size=degree)
            Qc = rng.normal(size=degree) + 1j * rng.normal(size=degree)
            P = np.concatenate([[0], a])  # P(0) = 0, degree = deg Q + 1
            # enforce P(1) = Q(1) through the constant of Q
            Qc[0] += np.sum(P) - np.sum(Qc)
            Q = Qc
        try:
            R = RationalMap(P, Q)
            crit = R.critical
        except Exception:
            continue
        pts = np.asarray(crit.points)
        if len(pts) != 2 * degree - 2 - crit.infinity_multiplicity and R.is_polynomial:
            continue
        if not crit.all_simple:
            continue
        vals = np.asarray(crit.values)
        if not np.all(np.isfinite(vals)):
            continue
        # keep critical values and points away from each other and from 0, 1
        special = np.concatenate([pts, [0, 1]])
        if np.min(np.abs(vals[:, None] - special[None, :])) < 1e-3:
            continue
        if len(pts) > 1 and np.min(np.abs(pts[:, None] - pts[None, :]) + np.eye(len(pts))) < 1e-3:
            continue
        return R
    raise RuntimeError("could not draw a generic normalized map")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def z2m2():
    return RationalMap([-2, 0, 1])


@pytest.fixture
def cheb():
    return RationalMap([0, 4, -3])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
