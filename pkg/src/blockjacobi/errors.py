"""Exception hierarchy."""


class BlockJacobiError(Exception):
    """Base class for all errors raised by this package."""


class NotPositiveDefinite(BlockJacobiError, ValueError):
    pass


class SingularBlock(BlockJacobiError, ValueError):
    pass


class AtEigenvalue(BlockJacobiError, ValueError):
    """Evaluation point sits (numerically) on the spectrum."""


class MultiplicityMismatch(BlockJacobiError):
    """Kernel dimension of phi_{p+1}(lambda) differs from the eigenvalue cluster size."""


class SingularWeight(BlockJacobiError, ValueError):
    pass


class NearPole(BlockJacobiError, ValueError):
    pass


class SingularY(BlockJacobiError):
    """Internal consistency failure: the derivative compression at an eigenvalue is singular."""


class LanczosBreakdown(BlockJacobiError):
    """Rank deficiency during block tridiagonalization; the data is not p-tame."""

    def __init__(self, stage, rank, m, sigma_min):
        self.stage = stage
        self.rank = rank
        self.m = m
        self.sigma_min = sigma_min
        super().__init__(
            f"block Lanczos breakdown at stage {stage}: residual block has rank "
            f"{rank} < {m} (smallest singular value {sigma_min:.3e}); "
            "spectral data is not p-tame"
        )
