"""Numerical tolerances shared by the whole pipeline."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """One record holding every threshold; pass it explicitly, never mutate.

    ``pd_tol`` is relative to the spectral norm of the matrix under test and
    ``cluster_tol`` relative to ``1 + spectral radius``.
    """

    herm_tol: float = 1e-10
    ortho_tol: float = 1e-10
    pd_tol: float = 1e-12
    fact_tol: float = 1e-10
    rank_tol: float = 1e-8
    zero_tol: float = 1e-12
    sing_tol: float = 1e-12
    cluster_tol: float = 1e-7
    tame_tol: float = 1e-10
    sum_tol: float = 1e-8
    pole_guard: float = 1e-12

    def with_overrides(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT_TOLERANCES = Tolerances()
