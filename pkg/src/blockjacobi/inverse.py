"""Reconstruction of block Jacobi coefficients from spectral data.

The data define a discrete matrix measure ``sum_j B_j delta_{lambda_j}`` whose
Stieltjes transform is the Weyl function.  Block Lanczos applied to the
multiplication operator of that measure, started from the block that carries
the residues, returns the Jacobi coefficients level by level; the choice of
factor for ``a_n a_n^* = R^* R`` fixes the normalization (Hermitian positive
definite root, or lower triangular with positive diagonal).
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import LanczosBreakdown, NotPositiveDefinite
from .matrixcore import cholesky_lplus, herm, hermitize, hpd_sqrt, numerical_rank
from .operator import BlockJacobiOperator, Flavor
from .spectral import PoleResidueFunction, forward_map, residues


@dataclass(frozen=True, eq=False)
class MeasureRepresentation:
    """Diagonal ``Lambda`` (as a vector) and starting block ``W`` with ``W^* Lambda^s W = sum lambda_j^s B_j``."""

    lam: np.ndarray
    W: np.ndarray

    @property
    def Lambda(self):
        return np.diag(self.lam)

    def moment(self, s):
        return herm(self.W) @ (self.lam[:, None] ** s * self.W)


def _fix_column_signs(w):
    for k in range(w.shape[1]):
        col = w[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-14 * max(np.abs(col).max(), 1e-300))
        if nz.size:
            ph = col[nz[0]] / abs(col[nz[0]])
            w[:, k] = col / ph
    return w


def measure_representation(data, tol=DEFAULT_TOLERANCES):
    """Build ``(Lambda, W)``: point ``j`` contributes ``k_j`` rows ``W_j^*`` with ``W_j W_j^* = B_j``."""
    prf = residues(data, tol)
    lam_rows, w_rows = [], []
    for pt, _ in zip(data.points, prf.residues):
        v = pt.range_basis()
        br = np.linalg.inv(hermitize(herm(v) @ pt.g @ v))
        e, u = np.linalg.eigh(hermitize(br))
        order = np.argsort(-e, kind="stable")
        wj = _fix_column_signs(v @ u[:, order] * np.sqrt(e[order]))
        lam_rows.extend([pt.lam] * wj.shape[1])
        w_rows.append(herm(wj))
    W = np.vstack(w_rows) if w_rows else np.zeros((0, data.m), dtype=complex)
    return MeasureRepresentation(np.array(lam_rows, dtype=float), W)


def moment_extract(data, tol=DEFAULT_TOLERANCES):
    """``b_1`` and ``A = a_1 a_1^*`` from the first residue moments.

    With ``T'_s = sum_j lambda_j^s B_j`` one has ``T'_0 = I``,
    ``T'_1 = b_1`` and ``T'_2 = a_1 a_1^* + b_1^2``.
    """
    prf = residues(data, tol)
    T = prf.moments(3)
    b1 = hermitize(T[1])
    A = hermitize(T[2] - b1 @ b1)
    if data.p >= 2:
        w = np.linalg.eigvalsh(A)
        if w[0] <= tol.pd_tol * max(np.abs(w).max(), 1e-300):
            raise NotPositiveDefinite(
                f"A = a_1 a_1^* is not positive definite (min eigenvalue {w[0]:.3e})"
            )
    return b1, A


def _factor(gram, flavor, tol):
    if flavor is Flavor.SPLUS:
        return hpd_sqrt(gram, tol)
    if flavor is Flavor.LPLUS:
        return cholesky_lplus(gram, tol)
    raise ValueError(f"reconstruction needs flavor splus or lplus, got {flavor.value}")


def _orthogonalize(r, basis):
    # two passes of classical Gram-Schmidt
    for _ in range(2):
        r = r - basis @ (herm(basis) @ r)
    return r


def block_lanczos(rep, p, flavor, tol=DEFAULT_TOLERANCES, return_basis=False):
    """Block tridiagonalize ``diag(lam)`` starting from ``W``; returns ``(b, a)``.

    Raises
    ------
    LanczosBreakdown
        If a residual block loses rank before level ``p``.
    """
    flavor = Flavor(flavor)
    lam, W = rep.lam, rep.W
    m = W.shape[1]
    scale = 1.0 + np.abs(lam).max(initial=0.0)
    qs = [W]
    bs, as_ = [], []
    q_prev = None
    for n in range(1, p + 1):
        q = qs[-1]
        lq = lam[:, None] * q
        b = hermitize(herm(q) @ lq)
        bs.append(b)
        if n == p:
            break
        r = lq - q @ b
        if q_prev is not None:
            r = r - q_prev @ as_[-1]
        r = _orthogonalize(r, np.hstack(qs))
        s = np.linalg.svd(r, compute_uv=False)
        if s[-1] <= tol.rank_tol * scale:
            rank = int(np.count_nonzero(s > tol.rank_tol * scale))
            raise LanczosBreakdown(n, rank, m, float(s[-1]))
        a = _factor(hermitize(herm(r) @ r), flavor, tol)
        as_.append(a)
        q_prev = q
        qs.append(herm(np.linalg.solve(a, herm(r))))
    out = (np.array(bs), np.array(as_).reshape(len(as_), m, m))
    if return_basis:
        return out + (np.hstack(qs),)
    return out


def inverse_map(data, flavor, tol=DEFAULT_TOLERANCES):
    """Block Jacobi operator of the requested flavor with the given spectral data.

    Raises
    ------
    LanczosBreakdown
        If the data is not p-tame.
    """
    flavor = Flavor(flavor)
    if flavor is Flavor.GENERAL:
        raise ValueError("reconstruction needs flavor splus or lplus")
    rep = measure_representation(data, tol)
    if rep.W.shape[0] != data.m * data.p:
        raise ValueError(
            f"projector ranks sum to {rep.W.shape[0]}, expected mp = {data.m * data.p}"
        )
    b, a = block_lanczos(rep, data.p, flavor, tol)
    return BlockJacobiOperator(b, a, flavor, tol)


@dataclass(frozen=True, eq=False)
class HerglotzResult:
    """``-M^{-1}(z) = z I + C - sum_s D_s / (z - mu_s)`` plus bookkeeping."""

    function: PoleResidueFunction
    rank_count: int
    expected_rank: int
    cancellation: bool

    @property
    def C(self):
        return self.function.const_coeff

    @property
    def mu(self):
        return self.function.poles

    @property
    def D(self):
        return self.function.residues


def herglotz_decompose(data, flavor, tol=DEFAULT_TOLERANCES):
    """Herglotz form of ``-M^{-1}``.

    Uses ``-M^{-1}(z) = z - b_1 + a_1 M'(z) a_1^*`` where ``M'`` is the Weyl
    function of the operator with its first level removed.
    """
    op = inverse_map(data, flavor, tol)
    m, p = data.m, data.p
    C = -op.b[0]
    eye = np.eye(m, dtype=complex)
    if p == 1:
        f = PoleResidueFunction(m, np.zeros(0), np.zeros((0, m, m), dtype=complex), eye, C)
        return HerglotzResult(f, 0, 0, False)
    sub = residues(forward_map(op.truncate_first(), tol), tol)
    a1 = op.a[0]
    D = np.array([hermitize(a1 @ bs @ herm(a1)) for bs in sub.residues])
    f = PoleResidueFunction(m, sub.poles, D, eye, C)
    lam = data.lambdas
    gap = tol.cluster_tol * (1.0 + max(np.abs(lam).max(), np.abs(sub.poles).max()))
    cancel = bool(np.any(np.abs(lam[:, None] - sub.poles[None, :]) < gap))
    rank_count = sum(numerical_rank(d, tol.rank_tol) for d in D)
    return HerglotzResult(f, rank_count, m * (p - 1), cancel)
