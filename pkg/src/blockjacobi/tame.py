"""The p-tame criterion and membership checks for admissible spectral data."""

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .config import DEFAULT_TOLERANCES
from .matrixcore import Subspace, herm, hermitian_defect, hermitize, kernel_basis


@dataclass(frozen=True, eq=False)
class TameSystem:
    """Pairs ``(lambda_j, P_j)`` of real points and orthogonal projectors in ``C^m``."""

    m: int
    lambdas: np.ndarray
    projectors: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float).reshape(-1)
        P = np.asarray(self.projectors, dtype=complex).reshape(lam.size, self.m, self.m)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "projectors", P)

    @classmethod
    def from_spectral(cls, data):
        return cls(
            data.m,
            [pt.lam for pt in data.points],
            [pt.P for pt in data.points] or np.zeros((0, data.m, data.m)),
        )

    @property
    def N(self):
        return self.lambdas.size

    def ranks(self):
        """Rank of each projector (number of eigenvalues above 1/2)."""
        return np.array(
            [int(np.count_nonzero(np.linalg.eigvalsh(hermitize(P)) > 0.5)) for P in self.projectors],
            dtype=int,
        )

    def affine_frame(self):
        """Center and half-width mapping the points onto ``[-1, 1]``."""
        if self.N == 0:
            return 0.0, 1.0
        lo, hi = self.lambdas.min(), self.lambdas.max()
        half = 0.5 * (hi - lo)
        return 0.5 * (hi + lo), half if half > 0 else 1.0


def moments(sys, count, rescale=False):
    """``T_s = sum_j lambda_j^s P_j`` for ``s = 0..count-1``."""
    lam = sys.lambdas
    if rescale:
        c, h = sys.affine_frame()
        lam = (lam - c) / h
    return np.array(
        [np.einsum("j,jik->ik", lam**s, sys.projectors) for s in range(count)]
    ).reshape(count, sys.m, sys.m)


def hankel_block(sys, p, rescale=False):
    """Block Hankel matrix ``(T_{s+k})_{s,k=0}^{p-1}`` of size ``mp x mp``.

    With ``rescale=True`` the points are first mapped affinely onto
    ``[-1, 1]``; this changes the matrix but not its definiteness.
    """
    m = sys.m
    T = moments(sys, 2 * p - 1, rescale)
    H = np.zeros((m * p, m * p), dtype=complex)
    for s in range(p):
        for k in range(p):
            H[s * m:(s + 1) * m, k * m:(k + 1) * m] = T[s + k]
    return H


@dataclass(frozen=True)
class TameResult:
    tame: bool
    min_eig: float
    threshold: float
    applicable: bool = True
    detail: str = ""

    def __bool__(self):
        return self.tame


def chebyshev_values(sys, p):
    """``T_s(w_j)`` for the points mapped onto ``[-1, 1]``; shape ``(N, p)``."""
    c, h = sys.affine_frame()
    return np.polynomial.chebyshev.chebvander((sys.lambdas - c) / h, p - 1)


def stacked_evaluation(sys, p):
    """Rows ``P_j [T_0(w_j) I, ..., T_{p-1}(w_j) I]`` stacked over ``j``.

    ``w_j`` are the affinely rescaled points and ``T_s`` Chebyshev
    polynomials; a vector in the kernel is the Chebyshev coefficient vector of
    a polynomial annihilated by every ``P_j`` at its point.
    """
    m = sys.m
    V = chebyshev_values(sys, p)
    rows = [np.hstack([t * Pj for t in tj]) for tj, Pj in zip(V, sys.projectors)]
    return np.vstack(rows) if rows else np.zeros((0, m * p), dtype=complex)


def gram_matrix(sys, p):
    """``sum_j (t_j t_j^T) kron P_j``: the block Hankel matrix in the Chebyshev basis."""
    V = chebyshev_values(sys, p)
    m = sys.m
    G = np.zeros((m * p, m * p), dtype=complex)
    for tj, Pj in zip(V, sys.projectors):
        G += np.kron(np.outer(tj, tj), Pj)
    return hermitize(G)


def _padded_singular_values(S, n):
    s = np.linalg.svd(S, compute_uv=False) if S.shape[0] else np.zeros(0)
    out = np.zeros(n)
    out[: min(s.size, n)] = s[:n]
    return out


def is_p_tame(sys, p, tol=DEFAULT_TOLERANCES):
    """Decide p-tameness: is the moment matrix strictly positive definite?

    The moment matrix is taken in a Chebyshev basis on the rescaled points,
    a congruence of the raw block Hankel matrix, and factored as ``S^* S``
    with ``S`` from :func:`stacked_evaluation`; its eigenvalues are the
    squared singular values of ``S``, which are computed directly because
    forming ``S^* S`` loses everything below ``eps * |S|^2``.  The system
    counts as tame when ``sigma_min(S) > tame_tol * sigma_max(S)``.
    ``min_eig`` reports ``sigma_min(S)**2``.
    """
    rank_sum = int(sys.ranks().sum())
    if rank_sum != sys.m * p:
        return TameResult(False, float("nan"), float("nan"), applicable=False,
                          detail=f"sum of projector ranks {rank_sum} != mp = {sys.m * p}")
    if sys.N > 1 and np.min(np.diff(np.sort(sys.lambdas))) <= 0:
        return TameResult(False, float("nan"), float("nan"),
                          detail="two points coincide")
    s = _padded_singular_values(stacked_evaluation(sys, p), sys.m * p)
    bound = tol.tame_tol * s.max(initial=0.0)
    ok = bool(s[-1] > bound)
    return TameResult(ok, float(s[-1] ** 2), float(bound**2),
                      detail="" if ok else "moment matrix is not positive definite")


def _to_monomial(cheb_coeffs, c, h):
    """Chebyshev coefficients in ``w = (z - c)/h`` to monomial coefficients in ``z``."""
    p = cheb_coeffs.shape[0]
    c2p = np.zeros((p, p))
    for s in range(p):
        e = np.zeros(p)
        e[s] = 1.0
        col = np.polynomial.chebyshev.cheb2poly(e)
        c2p[: col.size, s] = col
    shift = np.zeros((p, p))
    for s in range(p):
        for r in range(s + 1):
            shift[r, s] = comb(s, r) * (-c) ** (s - r) / h**s
    return shift @ c2p @ cheb_coeffs


def polynomial_obstruction(sys, p, tol=DEFAULT_TOLERANCES):
    """A nonzero vector polynomial ``F`` of degree ``<= p-1`` with ``P_j F(lambda_j) = 0``.

    Returns monomial coefficients as an array of shape ``(p, m)`` (row ``s``
    multiplies ``z^s``), normalized to unit Frobenius norm, or ``None`` when
    no such polynomial exists.
    """
    m = sys.m
    V = chebyshev_values(sys, p)
    blocks = []
    for tj, Pj in zip(V, sys.projectors):
        w, u = np.linalg.eigh(hermitize(Pj))
        rows = herm(u[:, w > 0.5])
        blocks.append(np.hstack([t * rows for t in tj]))
    A = np.vstack(blocks) if blocks else np.zeros((0, m * p), dtype=complex)
    if A.shape[0] == 0:
        ker = Subspace(np.eye(m * p, dtype=complex))
    else:
        ker = kernel_basis(A, tol.tame_tol)
    if ker.dim == 0:
        return None
    coeffs = ker.basis[:, -1].reshape(p, m)
    raw = _to_monomial(coeffs, *sys.affine_frame())
    return raw / np.linalg.norm(raw)


def eval_vector_polynomial(coeffs, z):
    return sum(z**s * c for s, c in enumerate(coeffs))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    defect: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self):
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "ok": self.ok,
            "checks": [
                {"name": c.name, "passed": c.passed, "defect": c.defect, "detail": c.detail}
                for c in self.checks
            ],
        }

    def to_text(self):
        lines = [f"ok: {str(self.ok).lower()}"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = f"{status} {c.name}: defect={c.defect:.3e}"
            if c.detail:
                line += f" ({c.detail})"
            lines.append(line)
        return "\n".join(lines)


CHECK_NAMES = (
    "point_count",
    "strict_ordering",
    "projectors",
    "rank_sum",
    "p_tame",
    "weights_positive",
    "residue_sum",
)


def validate_sp(data, tol=DEFAULT_TOLERANCES):
    """Check every membership condition of admissible spectral data.

    Never raises on bad data; each condition is reported with a measured
    defect.
    """
    m, p, N = data.m, data.p, data.N
    report = ValidationReport()
    add = report.checks.append
    lam = data.lambdas

    excess = max(p - N, N - p * m, 0)
    add(Check("point_count", excess == 0, float(excess), f"N={N}, need {p} <= N <= {p * m}"))

    if N > 1:
        gap = float(np.min(np.diff(lam)))
        need = tol.cluster_tol * (1.0 + np.abs(lam).max())
        add(Check("strict_ordering", bool(gap > need and np.all(np.isfinite(lam))), gap,
                  f"smallest gap {gap:.3e}, need > {need:.3e}"))
    else:
        add(Check("strict_ordering", bool(np.all(np.isfinite(lam))), float("inf")))

    proj_defect = 0.0
    for pt in data.points:
        P = np.asarray(pt.P)
        proj_defect = max(proj_defect, np.linalg.norm(P @ P - P), np.linalg.norm(P - herm(P)))
    add(Check("projectors", proj_defect <= tol.ortho_tol, float(proj_defect),
              "max of |P^2 - P| and |P - P*|"))

    sys = TameSystem.from_spectral(data)
    ranks = sys.ranks() if N else np.zeros(0, dtype=int)
    rank_sum = int(ranks.sum())
    add(Check("rank_sum", rank_sum == m * p, float(abs(rank_sum - m * p)),
              f"sum of ranks {rank_sum}, mp = {m * p}"))

    tr = is_p_tame(sys, p, tol)
    add(Check("p_tame", tr.tame, tr.min_eig, tr.detail or f"min eigenvalue {tr.min_eig:.3e}"))

    worst = np.inf
    bad = []
    for j, pt in enumerate(data.points):
        g = np.asarray(pt.g)
        v = pt.range_basis()
        P = v @ herm(v)
        if hermitian_defect(g) > tol.herm_tol:
            bad.append(f"g_{j + 1} not Hermitian")
        if np.linalg.norm(g - P @ g @ P) > tol.herm_tol * (1.0 + np.linalg.norm(g)):
            bad.append(f"g_{j + 1} not supported on Ran P_{j + 1}")
        gr = pt.g_restricted()
        if gr.size == 0:
            bad.append(f"P_{j + 1} is zero")
            continue
        ev = np.linalg.eigvalsh(hermitize(gr))
        worst = min(worst, float(ev[0]))
        if ev[0] <= tol.pd_tol * max(1.0, np.abs(ev).max()):
            bad.append(f"g_{j + 1} not positive definite (min eigenvalue {ev[0]:.3e})")
    add(Check("weights_positive", not bad, float(worst), "; ".join(bad)))

    total = np.zeros((m, m), dtype=complex)
    try:
        for pt in data.points:
            v = pt.range_basis()
            total += v @ np.linalg.inv(herm(v) @ pt.g @ v) @ herm(v)
        dev = float(np.linalg.norm(total - np.eye(m)))
        add(Check("residue_sum", dev <= tol.sum_tol, dev, "|sum P g^{-1} P - I|_F"))
    except np.linalg.LinAlgError as exc:
        add(Check("residue_sum", False, float("inf"), f"weight not invertible: {exc}"))
    return report
