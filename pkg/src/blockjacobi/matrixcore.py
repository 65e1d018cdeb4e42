"""Dense complex matrix kernels: Hermitian checks, factorizations, kernels."""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import NotPositiveDefinite


def as_matrix(x, square=False):
    a = np.atleast_2d(np.asarray(x, dtype=complex))
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def herm(a):
    return a.conj().T


def hermitian_defect(a):
    """Relative Frobenius distance ``|A - A*| / (1 + |A|)``."""
    a = np.asarray(a)
    return np.linalg.norm(a - herm(a)) / (1.0 + np.linalg.norm(a))


def is_hermitian(a, tol=DEFAULT_TOLERANCES.herm_tol):
    return hermitian_defect(a) <= tol


def hermitize(a):
    return 0.5 * (a + herm(a))


def is_lower_triangular_positive(a, tol=DEFAULT_TOLERANCES.zero_tol):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, np.abs(a).max(initial=0.0))
    if np.abs(np.triu(a, 1)).max(initial=0.0) > tol * scale:
        return False
    d = np.diag(a)
    return bool(np.all(d.real > 0) and np.all(np.abs(d.imag) <= tol * scale))


def _check_hpd(a, tol):
    if not is_hermitian(a, tol.herm_tol):
        raise NotPositiveDefinite(
            f"matrix is not Hermitian (defect {hermitian_defect(a):.3e})"
        )
    w = np.linalg.eigvalsh(hermitize(a))
    bound = tol.pd_tol * max(np.abs(w).max(initial=0.0), np.finfo(float).tiny)
    if w.min() <= bound:
        raise NotPositiveDefinite(
            f"minimum eigenvalue {w.min():.3e} <= {bound:.3e}"
        )
    return w


def cholesky_lplus(a, tol=DEFAULT_TOLERANCES):
    """Unique lower-triangular factor ``L`` with positive diagonal and ``L L* = A``.

    Peels off the leading scalar ``B`` of ``A = [[B, C*], [C, D]]`` and
    recurses on the Schur complement ``D - C C*/B``, so that
    ``L = [[sqrt(B), 0], [C/sqrt(B), L']]``.

    Raises
    ------
    NotPositiveDefinite
        If ``A`` is not Hermitian positive definite.
    """
    a = as_matrix(a, square=True)
    _check_hpd(a, tol)
    m = a.shape[0]
    work = hermitize(a).copy()
    out = np.zeros_like(work)
    for k in range(m):
        pivot = work[k, k].real
        if pivot <= 0:
            raise NotPositiveDefinite(f"non-positive pivot {pivot:.3e} at step {k}")
        b = np.sqrt(pivot)
        out[k, k] = b
        c = work[k + 1:, k] / b
        out[k + 1:, k] = c
        work[k + 1:, k + 1:] -= np.outer(c, c.conj())
    return out


def hpd_sqrt(a, tol=DEFAULT_TOLERANCES):
    """Unique Hermitian positive definite square root."""
    a = as_matrix(a, square=True)
    _check_hpd(a, tol)
    w, v = np.linalg.eigh(hermitize(a))
    return hermitize((v * np.sqrt(w)) @ herm(v))


@dataclass(frozen=True)
class Subspace:
    """Subspace of ``C^n`` given by an orthonormal basis (columns of ``basis``)."""

    basis: np.ndarray

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def ortho_defect(self):
        k = self.dim
        return np.linalg.norm(herm(self.basis) @ self.basis - np.eye(k))


def kernel_basis(m, rel_tol=DEFAULT_TOLERANCES.rank_tol, scale=None):
    """Numerical kernel: right singular vectors with ``s_i <= rel_tol * s_max``.

    ``scale`` replaces ``s_max`` as the reference magnitude; needed when the
    matrix itself may be entirely negligible (e.g. ``1 x 1``).
    """
    m = as_matrix(m)
    n = m.shape[1]
    _, s, vh = np.linalg.svd(m)
    ref = s.max(initial=0.0) if scale is None else float(scale)
    if ref == 0.0:
        return Subspace(np.eye(n, dtype=complex))
    sfull = np.zeros(n)
    sfull[: s.size] = s
    mask = sfull <= rel_tol * ref
    return Subspace(herm(vh)[:, mask].copy())


def range_basis(m, rel_tol=DEFAULT_TOLERANCES.rank_tol):
    """Orthonormal basis of the numerical range (left singular vectors)."""
    m = as_matrix(m)
    u, s, _ = np.linalg.svd(m)
    smax = s.max(initial=0.0)
    if smax == 0.0:
        return Subspace(np.zeros((m.shape[0], 0), dtype=complex))
    return Subspace(u[:, : s.size][:, s > rel_tol * smax].copy())


def numerical_rank(m, rel_tol=DEFAULT_TOLERANCES.rank_tol):
    s = np.linalg.svd(np.asarray(m), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def projector(s):
    """Orthogonal projector ``basis basis*`` onto the subspace."""
    return s.basis @ herm(s.basis)


def relative_error(x, ref):
    return np.linalg.norm(np.asarray(x) - ref) / max(np.linalg.norm(ref), np.finfo(float).tiny)
