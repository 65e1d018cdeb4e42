"""Block Jacobi operators, fundamental solutions and Weyl functions.

The operator acts on ``(C^m)^p`` by

    (J y)_n = a_n y_{n+1} + b_n y_n + a_{n-1}^* y_{n-1},   n = 1..p,

with ``y_0 = y_{p+1} = 0``.  Throughout, the boundary blocks are fixed to
``a_0 = a_p = I``.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import AtEigenvalue, SingularBlock
from .matrixcore import (
    herm,
    hermitian_defect,
    is_lower_triangular_positive,
)


class Flavor(str, Enum):
    SPLUS = "splus"
    LPLUS = "lplus"
    GENERAL = "general"


@dataclass(frozen=True, eq=False)
class BlockJacobiOperator:
    """Coefficients ``b_1..b_p`` (Hermitian) and ``a_1..a_{p-1}`` (nonsingular).

    Parameters
    ----------
    b : array_like, shape (p, m, m)
    a : array_like, shape (p - 1, m, m)
    flavor : Flavor
        ``SPLUS`` requires every ``a_n`` Hermitian positive definite,
        ``LPLUS`` lower triangular with positive diagonal.
    """

    b: np.ndarray
    a: np.ndarray
    flavor: Flavor = Flavor.GENERAL
    tol: object = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        b = np.asarray(self.b, dtype=complex)
        if b.ndim == 2:
            b = b[np.newaxis]
        if b.ndim != 3 or b.shape[1] != b.shape[2] or b.shape[0] < 1:
            raise ValueError(f"b must have shape (p, m, m), got {b.shape}")
        p, m, _ = b.shape
        a = np.asarray(self.a, dtype=complex)
        if a.size == 0:
            a = np.zeros((0, m, m), dtype=complex)
        if a.shape != (p - 1, m, m):
            raise ValueError(f"a must have shape ({p - 1}, {m}, {m}), got {a.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        self._validate()

    def _validate(self):
        tol = self.tol
        for n, bn in enumerate(self.b, start=1):
            d = hermitian_defect(bn)
            if d > tol.herm_tol:
                raise ValueError(f"b_{n} is not Hermitian (defect {d:.3e})")
        for n, an in enumerate(self.a, start=1):
            s = np.linalg.svd(an, compute_uv=False)
            if s[-1] <= tol.sing_tol * max(1.0, s[0]):
                raise SingularBlock(f"a_{n} is numerically singular (sigma_min {s[-1]:.3e})")
            if self.flavor is Flavor.SPLUS:
                if hermitian_defect(an) > tol.herm_tol or np.linalg.eigvalsh(
                    0.5 * (an + herm(an))
                ).min() <= 0:
                    raise ValueError(f"a_{n} is not Hermitian positive definite")
            elif self.flavor is Flavor.LPLUS:
                if not is_lower_triangular_positive(an, tol.zero_tol):
                    raise ValueError(f"a_{n} is not lower triangular with positive diagonal")

    @property
    def p(self):
        return self.b.shape[0]

    @property
    def m(self):
        return self.b.shape[1]

    def a_ext(self, n):
        """``a_n`` for ``n = 0..p`` with ``a_0 = a_p = I``."""
        if n == 0 or n == self.p:
            return np.eye(self.m, dtype=complex)
        if not 1 <= n < self.p:
            raise IndexError(n)
        return self.a[n - 1]

    def truncate_first(self):
        """Operator on levels ``2..p`` (first block row and column removed)."""
        if self.p < 2:
            raise ValueError("cannot truncate a one-level operator")
        return BlockJacobiOperator(self.b[1:], self.a[1:], self.flavor, self.tol)


def assemble_dense(op):
    """Dense ``mp x mp`` Hermitian block-tridiagonal matrix."""
    p, m = op.p, op.m
    out = np.zeros((m * p, m * p), dtype=complex)
    for n in range(p):
        s = slice(n * m, (n + 1) * m)
        out[s, s] = op.b[n]
        if n + 1 < p:
            t = slice((n + 1) * m, (n + 2) * m)
            out[s, t] = op.a[n]
            out[t, s] = herm(op.a[n])
    return out


@dataclass(frozen=True, eq=False)
class SolutionEval:
    """Values (and optionally ``d/dz``) of ``phi_n(z)`` or ``chi_n(z)``, ``n = 0..p+1``."""

    z: complex
    values: np.ndarray
    derivs: np.ndarray | None
    kind: str
    op: BlockJacobiOperator = field(repr=False)

    def recurrence_residual(self):
        """Max over ``n`` of ``|a_n v_{n+1} + (b_n - z) v_n + a_{n-1}^* v_{n-1}|``."""
        op, v = self.op, self.values
        eye = np.eye(op.m)
        worst = 0.0
        for n in range(1, op.p + 1):
            r = (
                op.a_ext(n) @ v[n + 1]
                + (op.b[n - 1] - self.z * eye) @ v[n]
                + herm(op.a_ext(n - 1)) @ v[n - 1]
            )
            worst = max(worst, np.linalg.norm(r))
        return worst


def _solve(a, rhs):
    try:
        return np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularBlock(str(exc)) from exc


def eval_phi(op, z, with_derivs=False):
    """Left-pinned solution ``phi_0 = 0, phi_1 = I`` by forward recurrence."""
    p, m = op.p, op.m
    z = complex(z)
    eye = np.eye(m, dtype=complex)
    v = np.zeros((p + 2, m, m), dtype=complex)
    d = np.zeros((p + 2, m, m), dtype=complex) if with_derivs else None
    v[1] = eye
    for n in range(1, p + 1):
        zb = z * eye - op.b[n - 1]
        a_prev = herm(op.a_ext(n - 1))
        an = op.a_ext(n)
        v[n + 1] = _solve(an, zb @ v[n] - a_prev @ v[n - 1])
        if with_derivs:
            d[n + 1] = _solve(an, zb @ d[n] + v[n] - a_prev @ d[n - 1])
    return SolutionEval(z, v, d, "phi", op)


def eval_chi(op, z, with_derivs=False):
    """Right-pinned solution ``chi_{p+1} = 0, chi_p = I`` by backward recurrence."""
    p, m = op.p, op.m
    z = complex(z)
    eye = np.eye(m, dtype=complex)
    v = np.zeros((p + 2, m, m), dtype=complex)
    d = np.zeros((p + 2, m, m), dtype=complex) if with_derivs else None
    v[p] = eye
    for n in range(p, 0, -1):
        zb = z * eye - op.b[n - 1]
        an = op.a_ext(n)
        a_prev = herm(op.a_ext(n - 1))
        v[n - 1] = _solve(a_prev, zb @ v[n] - an @ v[n + 1])
        if with_derivs:
            d[n - 1] = _solve(a_prev, zb @ d[n] + v[n] - an @ d[n + 1])
    return SolutionEval(z, v, d, "chi", op)


def wronskian(theta, eta, n):
    """Discrete Wronskian ``theta_n^*(zbar) a_n eta_{n+1}(z) - theta_{n+1}^*(zbar) a_n^* eta_n(z)``.

    ``theta`` must be evaluated at the conjugate of ``eta.z``.  Either argument
    may be a ``SolutionEval`` or an array of shape ``(p + 2, m, m)``; arrays
    are useful for pairing values with derivatives.
    """
    op = _op_of(theta, eta)
    if isinstance(theta, SolutionEval) and isinstance(eta, SolutionEval):
        if not np.isclose(theta.z, np.conj(eta.z), rtol=0, atol=1e-14 * (1 + abs(eta.z))):
            raise ValueError("theta must be evaluated at the conjugate point of eta")
    t = theta.values if isinstance(theta, SolutionEval) else np.asarray(theta)
    e = eta.values if isinstance(eta, SolutionEval) else np.asarray(eta)
    an = op.a_ext(n)
    return herm(t[n]) @ an @ e[n + 1] - herm(t[n + 1]) @ herm(an) @ e[n]


def _op_of(*args):
    for x in args:
        if isinstance(x, SolutionEval):
            return x.op
    raise TypeError("at least one argument must be a SolutionEval")


def _guarded_inverse(x, scale, tol, what):
    s = np.linalg.svd(x, compute_uv=False)
    if s[-1] <= tol * scale:
        raise AtEigenvalue(f"{what} is numerically singular (sigma_min {s[-1]:.3e}, scale {scale:.3e})")
    return np.linalg.inv(x)


def _chi_scale(op, chi, z, start=1):
    """Size of ``chi_start..chi_p`` times the operator size at ``z``."""
    size = 1.0 + abs(z) + max(np.linalg.norm(x, 2) for x in op.b)
    if op.p > 1:
        size += 2 * max(np.linalg.norm(x, 2) for x in op.a)
    return size * max(np.linalg.norm(x, 2) for x in chi[min(start, op.p):op.p + 1])


def weyl_m(op, z, tol=DEFAULT_TOLERANCES):
    """Weyl-Titchmarsh function ``M(z) = -chi_1(z) chi_0(z)^{-1}``.

    Raises
    ------
    AtEigenvalue
        If ``chi_0(z)`` is numerically singular.
    """
    chi = eval_chi(op, z).values
    scale = _chi_scale(op, chi, z)
    return -chi[1] @ _guarded_inverse(chi[0], scale, tol.sing_tol, "chi_0(z)")


def m_level(op, z, n, tol=DEFAULT_TOLERANCES):
    """``M_n(z) = -chi_n(z) [a_{n-1}^* chi_{n-1}(z)]^{-1}`` for ``n = 1..p+1``."""
    if not 1 <= n <= op.p + 1:
        raise IndexError(f"level {n} outside 1..{op.p + 1}")
    chi = eval_chi(op, z).values
    denom = herm(op.a_ext(n - 1)) @ chi[n - 1]
    scale = _chi_scale(op, chi, z, n)
    return -chi[n] @ _guarded_inverse(denom, scale, tol.sing_tol, f"a_{n - 1}^* chi_{n - 1}(z)")
