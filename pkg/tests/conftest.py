import numpy as np
import pytest

from blockjacobi import BlockJacobiOperator, Flavor, SpectralData, SpectralPoint, TameSystem, hpd_sqrt
from blockjacobi.io import gen_operator
from blockjacobi.tame import eval_vector_polynomial


def random_hpd(rng, m, eps=0.1):
    y = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return y @ y.conj().T + eps * np.eye(m)


def random_lplus(rng, m):
    a = np.tril(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)), -1)
    a[np.diag_indices(m)] = rng.uniform(0.2, 2.0, m)
    return a


def random_z(rng, count, radius=3.0):
    """Points off the real axis (so off every spectrum)."""
    x = rng.uniform(-radius, radius, count)
    y = rng.uniform(0.05, radius, count) * rng.choice([-1, 1], count)
    return x + 1j * y


def scalar_chain():
    """m = 1, p = 2, a_1 = 1, b = (0, 0)."""
    return BlockJacobiOperator(np.zeros((2, 1, 1)), np.ones((1, 1, 1)), Flavor.SPLUS)


def scalar_chain_data():
    return SpectralData(1, 2, [
        SpectralPoint(-1.0, np.eye(1), 2 * np.eye(1)),
        SpectralPoint(1.0, np.eye(1), 2 * np.eye(1)),
    ])


def shared_kernel_data():
    """p = 2, m = 2, N = 3 with P_1 = P_2 = diag(1, 0): Ker P_1 and Ker P_2 share e_2."""
    P12 = np.diag([1.0, 0.0]).astype(complex)
    return SpectralData(2, 2, [
        SpectralPoint(-1.0, P12, 4 * P12),
        SpectralPoint(0.0, P12, 4 * P12),
        SpectralPoint(1.0, np.eye(2, dtype=complex), np.diag([2.0, 1.0]).astype(complex)),
    ])


def random_projector(rng, m, k, avoid=None):
    """Rank-k orthogonal projector in C^m; if ``avoid`` is given its range is orthogonal to it."""
    x = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
    if avoid is not None:
        u = avoid / np.linalg.norm(avoid)
        x = x - np.outer(u, u.conj() @ x)
    q, _ = np.linalg.qr(x)
    return q @ q.conj().T


def random_ranks(rng, m, total, top=None):
    """Random ranks in ``1..top`` (default ``m``) summing to ``total``."""
    top = m if top is None else top
    ranks = []
    while total > 0:
        k = int(min(rng.integers(1, top + 1), total))
        ranks.append(k)
        total -= k
    return ranks


def adversarial_system(rng, m, p):
    """Projectors that all annihilate F(lambda_j) for a random vector polynomial F, deg F <= p-1."""
    deg = rng.integers(0, p)
    coeffs = rng.standard_normal((deg + 1, m)) + 1j * rng.standard_normal((deg + 1, m))
    ranks = random_ranks(rng, m, m * p, top=m - 1)
    lam = np.sort(rng.uniform(-2, 2, len(ranks)))
    P = [random_projector(rng, m, k, eval_vector_polynomial(coeffs, l)) for l, k in zip(lam, ranks)]
    return TameSystem(m, lam, P)


def spectral_data_from_residues(m, p, lam, raw):
    """Normalize PSD matrices ``raw`` to residues summing to I and wrap them as spectral data."""
    w = np.linalg.inv(hpd_sqrt(sum(raw)))
    points = []
    for l, bh in zip(lam, raw):
        B = w @ bh @ w
        B = 0.5 * (B + B.conj().T)
        u, sv, _ = np.linalg.svd(B)
        U = u[:, : int(np.count_nonzero(sv > 1e-10 * sv[0]))]
        g = U @ np.linalg.inv(U.conj().T @ B @ U) @ U.conj().T
        points.append(SpectralPoint(float(l), U @ U.conj().T, 0.5 * (g + g.conj().T)))
    return SpectralData(m, p, points)


def direct_spectral_data(rng, m, p, ranks=None):
    """Spectral data built without any operator: random ranges and weights."""
    ranks = random_ranks(rng, m, m * p) if ranks is None else ranks
    lam = np.sort(rng.uniform(-3, 3, len(ranks)))
    raw = []
    for k in ranks:
        x = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
        raw.append(x @ x.conj().T)
    return spectral_data_from_residues(m, p, lam, raw)


def random_shared_kernel_data(rng, m):
    """p = 2, N = 3, P_3 = I, with Ker P_1 and Ker P_2 sharing a vector."""
    k1 = int(rng.integers(1, m))
    P1 = random_projector(rng, m, k1)
    shared = np.linalg.svd(P1)[2][-1].conj()
    P2 = random_projector(rng, m, m - k1, avoid=shared)
    return spectral_data_from_residues(m, 2, [-1.0, 0.0, 1.0], [P1 / 4, P2 / 4, np.eye(m) - (P1 + P2) / 4])


INSTANCES = [(m, p) for m in (1, 2, 3, 4) for p in (1, 2, 4, 8)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[(2, 3, "splus", 1), (3, 4, "lplus", 2), (1, 5, "splus", 3), (4, 2, "lplus", 4)],
                ids=lambda t: f"m{t[0]}p{t[1]}{t[2]}")
def op(request):
    m, p, flavor, seed = request.param
    return gen_operator(m, p, flavor, seed)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
