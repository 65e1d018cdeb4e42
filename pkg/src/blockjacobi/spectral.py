"""Forward spectral map and the pole/residue form of the Weyl function."""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import MultiplicityMismatch, NearPole, SingularWeight, SingularY
from .matrixcore import Subspace, herm, hermitize, kernel_basis, projector
from .operator import assemble_dense, eval_phi


@dataclass(frozen=True, eq=False)
class SpectralPoint:
    """One eigenvalue with its kernel projector and (zero-extended) weight.

    ``g`` is stored as the ``m x m`` matrix ``P g P``; the weight operator on
    ``Ran P`` is its restriction.
    """

    lam: float
    P: np.ndarray
    g: np.ndarray

    @property
    def multiplicity(self):
        return int(round(np.trace(self.P).real))

    def range_basis(self):
        """Orthonormal basis of ``Ran P`` (eigenvectors of ``P`` with eigenvalue > 1/2)."""
        w, v = np.linalg.eigh(hermitize(self.P))
        return v[:, w > 0.5]

    def g_restricted(self):
        """``g`` in the basis returned by :meth:`range_basis`."""
        v = self.range_basis()
        return herm(v) @ self.g @ v


@dataclass(frozen=True, eq=False)
class SpectralData:
    m: int
    p: int
    points: list = field(default_factory=list)

    def __post_init__(self):
        object.__setattr__(self, "points", list(self.points))
        for k, pt in enumerate(self.points):
            if np.shape(pt.P) != (self.m, self.m) or np.shape(pt.g) != (self.m, self.m):
                raise ValueError(f"point {k}: P and g must be {self.m}x{self.m}")

    @property
    def N(self):
        return len(self.points)

    @property
    def lambdas(self):
        return np.array([pt.lam for pt in self.points], dtype=float)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True, eq=False)
class PoleResidueFunction:
    """``f(z) = linear_coeff z + const_coeff - sum_s residues[s] / (z - poles[s])``.

    Absent polynomial parts are represented by ``None``.
    """

    m: int
    poles: np.ndarray
    residues: np.ndarray
    linear_coeff: np.ndarray | None = None
    const_coeff: np.ndarray | None = None

    def __call__(self, z, tol=DEFAULT_TOLERANCES):
        return eval_prf(self, z, tol)

    def residue_sum(self):
        return self.residues.sum(axis=0) if len(self.poles) else np.zeros((self.m, self.m))

    def moments(self, order):
        """``sum_s mu_s^k R_s`` for ``k = 0..order-1`` (pole part only)."""
        mu = np.asarray(self.poles, dtype=float)
        return np.array([np.einsum("s,sij->ij", mu**k, self.residues) for k in range(order)])


def cluster_eigenvalues(w, rel_tol=DEFAULT_TOLERANCES.cluster_tol):
    """Group sorted eigenvalues; returns a list of index arrays.

    Consecutive values separated by more than ``rel_tol * (1 + max|w|)``
    start a new cluster.
    """
    w = np.sort(np.asarray(w, dtype=float))
    if w.size == 0:
        return []
    gap = rel_tol * (1.0 + np.abs(w).max())
    breaks = np.flatnonzero(np.diff(w) > gap) + 1
    return np.split(np.arange(w.size), breaks)


def weight_operator(phi_values, basis):
    """``P (sum_{n=1}^p phi_n^* phi_n) P`` with ``P = basis basis^*``.

    Compressing onto the basis first keeps the result supported on
    ``Ran P`` to rounding, however large the sum is.
    """
    inner = phi_values[1:-1] @ basis
    g = np.einsum("nji,njk->ik", inner.conj(), inner)
    return hermitize(basis @ g @ herm(basis))


def kernel_scale(phi_values, radius):
    """Reference size for ``phi_{p+1}(lambda)``: ``(1 + |J|) |(phi_1, ..., phi_p)|``.

    ``phi_{p+1}(lambda) v`` is the residual of the trial eigenvector
    ``(phi_n(lambda) v)_n``, so it is judged against that vector's size.
    """
    stacked = phi_values[1:-1].reshape(-1, phi_values.shape[-1])
    return (1.0 + radius) * np.linalg.norm(stacked, 2)


def forward_map(op, tol=DEFAULT_TOLERANCES):
    """Spectral data ``(lambda_j, P_j, g_j)`` of a block Jacobi operator.

    Eigenvalues come from a dense Hermitian eigensolver and are clustered;
    each kernel ``Ker phi_{p+1}(lambda_j)`` must have dimension equal to its
    cluster size.

    Raises
    ------
    MultiplicityMismatch
        If a kernel dimension differs from the cluster size.
    """
    w = np.linalg.eigvalsh(assemble_dense(op))
    radius = np.abs(w).max()
    points = []
    for idx in cluster_eigenvalues(w, tol.cluster_tol):
        lam = float(np.mean(w[idx]))
        k = idx.size
        phi = eval_phi(op, lam).values
        ker = kernel_basis(phi[-1], tol.rank_tol, kernel_scale(phi, radius))
        if ker.dim != k:
            raise MultiplicityMismatch(
                f"eigenvalue {lam:.12g}: cluster size {k} but kernel of phi_{op.p + 1} "
                f"has dimension {ker.dim}"
            )
        P = hermitize(projector(ker))
        points.append(SpectralPoint(lam, P, weight_operator(phi, ker.basis)))
    return SpectralData(op.m, op.p, points)


def residues(data, tol=DEFAULT_TOLERANCES):
    """Pole/residue form ``M(z) = -sum_j B_j / (z - lambda_j)`` with ``B_j = P_j g_j^{-1} P_j``."""
    bs = []
    for j, pt in enumerate(data.points):
        v = pt.range_basis()
        gr = hermitize(herm(v) @ pt.g @ v)
        ev = np.linalg.eigvalsh(gr) if gr.size else np.array([1.0])
        if np.abs(ev).min() <= tol.pd_tol * max(1.0, np.abs(ev).max()):
            raise SingularWeight(f"weight at point {j} (lambda={pt.lam:.6g}) is singular")
        bs.append(hermitize(v @ np.linalg.inv(gr) @ herm(v)))
    return PoleResidueFunction(
        data.m,
        data.lambdas,
        np.array(bs, dtype=complex).reshape(len(bs), data.m, data.m),
    )


def eval_prf(f, z, tol=DEFAULT_TOLERANCES):
    z = complex(z)
    out = np.zeros((f.m, f.m), dtype=complex)
    if f.linear_coeff is not None:
        out += z * f.linear_coeff
    if f.const_coeff is not None:
        out += f.const_coeff
    if len(f.poles):
        d = z - np.asarray(f.poles, dtype=float)
        close = np.abs(d) <= tol.pole_guard * (1.0 + np.abs(f.poles))
        if close.any():
            raise NearPole(f"z={z} is within the guard of pole {f.poles[close][0]:.6g}")
        out -= np.einsum("s,sij->ij", 1.0 / d, f.residues)
    return out


def _kernel_pair(phi_values, radius, k, tol):
    """Right and left kernels of ``phi_{p+1}(lambda)`` of dimension ``k``."""
    phi_end = phi_values[-1]
    scale = kernel_scale(phi_values, radius)
    right = kernel_basis(phi_end, tol.rank_tol, scale)
    left = kernel_basis(herm(phi_end), tol.rank_tol, scale)
    if right.dim != k or left.dim != k:
        raise MultiplicityMismatch(
            f"kernel dimensions {right.dim}/{left.dim} differ from multiplicity {k}"
        )
    return right, left


def spectral_radius(data):
    return float(np.abs(data.lambdas).max(initial=0.0))


def phi_inverse_residue(op, j, data=None, tol=DEFAULT_TOLERANCES):
    """Residue of ``phi_{p+1}(z)^{-1}`` at the ``j``-th eigenvalue (0-based).

    Equals ``P_j Y_j^{-1} P_j^#`` with ``Y_j = P_j^# phi'_{p+1}(lambda_j) P_j``
    mapping ``Ker phi_{p+1}`` onto ``Ker phi_{p+1}^*``.
    """
    if data is None:
        data = forward_map(op, tol)
    pt = data.points[j]
    ev = eval_phi(op, pt.lam, with_derivs=True)
    right, left = _kernel_pair(ev.values, spectral_radius(data), pt.multiplicity, tol)
    y = herm(left.basis) @ ev.derivs[-1] @ right.basis
    s = np.linalg.svd(y, compute_uv=False)
    if s.size and s[-1] <= tol.sing_tol * max(1.0, s[0]):
        raise SingularY(f"Y_{j} is singular (sigma_min {s[-1]:.3e})")
    return right.basis @ np.linalg.inv(y) @ herm(left.basis)


def sharp_projector(op, lam, k, tol=DEFAULT_TOLERANCES):
    """Orthogonal projector onto ``Ker phi_{p+1}(lambda)^*``."""
    radius = np.abs(np.linalg.eigvalsh(assemble_dense(op))).max()
    _, left = _kernel_pair(eval_phi(op, lam).values, radius, k, tol)
    return projector(left)


def eigenvector_projectors(op, tol=DEFAULT_TOLERANCES):
    """Cross-check route: ``P_j`` from the first block of dense eigenvectors.

    Eigenvectors have the form ``psi_n = phi_n(lambda) v``, so their first
    blocks span ``Ker phi_{p+1}(lambda)``.
    """
    w, v = np.linalg.eigh(assemble_dense(op))
    out = []
    for idx in cluster_eigenvalues(w, tol.cluster_tol):
        first = v[: op.m, idx]
        u, s, _ = np.linalg.svd(first, full_matrices=False)
        basis = u[:, s > tol.rank_tol * max(s.max(initial=0.0), 1e-300)]
        out.append((float(np.mean(w[idx])), projector(Subspace(basis))))
    return out
