"""Least-squares identification of the system matrix from one trajectory."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import matops
from .errors import InsufficientExcitationError, InvalidInputError


def solve_normal_equations(cross_sum, gram_sum):
    """Return theta_hat with theta_hat @ gram_sum = cross_sum.

    The Gram matrix is factorized as symmetric positive definite; a factor
    pivot below the shared rank tolerance means the trajectory did not
    excite all directions, reported as ``InsufficientExcitationError``.
    """
    scale = float(np.linalg.norm(gram_sum, axis=1).max())
    if scale == 0.0:
        raise InsufficientExcitationError(
            "insufficient excitation: Gram matrix is zero"
        )
    try:
        factor = cho_factor(gram_sum, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise InsufficientExcitationError(
            "insufficient excitation: Gram matrix is not positive definite"
        ) from exc
    pivots = np.diag(factor[0]) ** 2
    if pivots.min() <= matops.PIVOT_RTOL * scale:
        raise InsufficientExcitationError(
            "insufficient excitation: Gram matrix is singular to working "
            "precision"
        )
    return cho_solve(factor, cross_sum.T, check_finite=False).T


@dataclass(frozen=True)
class LeastSquaresState:
    """Running sums for the least-squares estimator.

    ``cross_sum`` accumulates x_next x_prev^T, ``gram_sum`` accumulates
    x_prev x_prev^T, ``count`` the number of transitions ingested. Values
    are immutable; updates return new states.
    """

    cross_sum: np.ndarray
    gram_sum: np.ndarray
    count: int

    @classmethod
    def empty(cls, dim):
        if not isinstance(dim, (int, np.integer)) or dim < 1:
            raise InvalidInputError(f"dim must be a positive integer, got {dim!r}")
        zero = np.zeros((dim, dim))
        return cls(cross_sum=zero, gram_sum=zero.copy(), count=0)

    @property
    def dim(self):
        return self.gram_sum.shape[0]

    def estimate(self):
        """Finalize: solve for theta_hat on the transitions seen so far."""
        if self.count == 0:
            raise InsufficientExcitationError(
                "cannot estimate from zero transitions"
            )
        return solve_normal_equations(self.cross_sum, self.gram_sum)


def least_squares_incremental(state, x_prev, x_next):
    """Fold one transition (x_prev -> x_next) into the running sums.

    Finalizing the returned state reproduces the batch estimator on the
    prefix consumed so far.
    """
    x_prev = np.asarray(x_prev, dtype=np.float64).reshape(-1)
    x_next = np.asarray(x_next, dtype=np.float64).reshape(-1)
    if x_prev.shape != (state.dim,) or x_next.shape != (state.dim,):
        raise InvalidInputError(
            f"transition vectors must have {state.dim} entries"
        )
    return LeastSquaresState(
        cross_sum=state.cross_sum + np.outer(x_next, x_prev),
        gram_sum=state.gram_sum + np.outer(x_prev, x_prev),
        count=state.count + 1,
    )


def least_squares(traj):
    """Batch least-squares estimate of the system matrix from a trajectory.

    Computes (sum_t x_t x_{t-1}^T)(sum_t x_{t-1} x_{t-1}^T)^{-1} over the
    whole path. Requires at least one transition and a nonsingular Gram
    matrix.
    """
    states = traj.states
    if states.shape[0] < 2:
        raise InvalidInputError(
            "least squares needs at least one transition (T >= 1)"
        )
    prev = states[:-1]
    cross = states[1:].T @ prev
    gram = prev.T @ prev
    return solve_normal_equations(cross, gram)


def transformed_estimator(theta_hat, theta, T, a_T):
    """Rescale the estimation error: sqrt(T / a_T) (theta_hat - theta) + theta.

    ``a_T`` must satisfy 0 < a_T <= T; at a_T = T this is the identity on
    ``theta_hat``.
    """
    theta_hat = matops.as_square(theta_hat, "theta_hat")
    theta = matops.as_square(theta, "theta")
    if theta_hat.shape != theta.shape:
        raise InvalidInputError(
            f"shape mismatch: {theta_hat.shape} vs {theta.shape}"
        )
    if not isinstance(T, (int, np.integer)) or T < 1:
        raise InvalidInputError(f"T must be a positive integer, got {T!r}")
    a_T = float(a_T)
    if not 0.0 < a_T <= T:
        raise InvalidInputError(f"a_T must lie in (0, T], got {a_T}")
    return math.sqrt(T / a_T) * (theta_hat - theta) + theta
