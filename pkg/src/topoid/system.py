"""Stable linear system with additive Gaussian noise, plus seeded simulation.

The model is x_{t+1} = theta x_t + w_t with w_t ~ N(0, noise_cov). Draws go
through counter-based Philox streams keyed by (seed, stream_id), so Monte
Carlo trials stay reproducible under any parallel schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels, matops
from .errors import InvalidInputError, NumericalError

_UINT64_MAX = 2**64 - 1

INIT_MODES = ("stationary", "standard_normal", "fixed")


@dataclass(frozen=True)
class RngStream:
    """Address of one reproducible random stream.

    The same (seed, stream_id) pair always yields the same draws; distinct
    stream ids give statistically independent streams, safe to consume
    concurrently. ``generator`` returns a fresh generator positioned at the
    start of the stream, so every call replays it from the top.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name, value in (("seed", self.seed), ("stream_id", self.stream_id)):
            if not isinstance(value, (int, np.integer)):
                raise InvalidInputError(f"{name} must be an integer")
            if not 0 <= int(value) <= _UINT64_MAX:
                raise InvalidInputError(
                    f"{name} must fit in an unsigned 64-bit value, got {value}"
                )

    def generator(self):
        seq = np.random.SeedSequence(
            entropy=int(self.seed), spawn_key=(int(self.stream_id),)
        )
        return np.random.Generator(np.random.Philox(seq))


class LtiSystem:
    """Validated system matrix plus noise covariance.

    Arrays are copied and frozen at construction. The invariant covariance
    and the Cholesky factors are computed lazily and cached; instances are
    immutable and safe to share across threads once those caches are warm
    (``warm_up`` forces them).
    """

    def __init__(self, theta, noise_cov):
        theta = matops.as_square(theta, "theta").copy()
        rho = matops.spectral_radius(theta)
        if rho >= 1.0:
            raise InvalidInputError(
                f"theta must be stable, got spectral radius {rho:.6g}"
            )
        noise_cov = matops.require_symmetric(noise_cov, "noise_cov")
        if noise_cov.shape != theta.shape:
            raise InvalidInputError(
                f"noise_cov shape {noise_cov.shape} does not match theta "
                f"shape {theta.shape}"
            )
        try:
            np.linalg.cholesky(noise_cov)
        except np.linalg.LinAlgError as exc:
            raise InvalidInputError(
                "noise_cov must be positive definite"
            ) from exc
        theta.flags.writeable = False
        noise_cov.flags.writeable = False
        self._theta = theta
        self._noise_cov = noise_cov
        self._invariant_cov = None
        self._noise_chol = None
        self._invariant_chol = None

    @property
    def theta(self):
        return self._theta

    @property
    def noise_cov(self):
        return self._noise_cov

    @property
    def dim(self):
        return self._theta.shape[0]

    def _get_invariant_cov(self):
        if self._invariant_cov is None:
            S = matops.solve_discrete_lyapunov(self._theta, self._noise_cov)
            S.flags.writeable = False
            self._invariant_cov = S
        return self._invariant_cov

    def _get_noise_chol(self):
        if self._noise_chol is None:
            L = np.linalg.cholesky(self._noise_cov)
            L.flags.writeable = False
            self._noise_chol = L
        return self._noise_chol

    def _get_invariant_chol(self):
        if self._invariant_chol is None:
            S = self._get_invariant_cov()
            try:
                L = np.linalg.cholesky(S)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(
                    "invariant covariance is numerically indefinite"
                ) from exc
            L.flags.writeable = False
            self._invariant_chol = L
        return self._invariant_chol

    def warm_up(self):
        """Populate all lazy caches; call before sharing across threads."""
        self._get_invariant_chol()
        self._get_noise_chol()
        return self

    def __repr__(self):
        return f"LtiSystem(dim={self.dim})"


@dataclass(frozen=True)
class Trajectory:
    """State path x_0, ..., x_T as a read-only (T + 1, n) array."""

    states: np.ndarray = field(repr=False)

    def __post_init__(self):
        states = np.array(self.states, dtype=np.float64, order="C")
        if states.ndim != 2 or states.shape[0] < 1:
            raise InvalidInputError(
                f"states must be a nonempty 2-D array, got shape {states.shape}"
            )
        if not np.isfinite(states).all():
            raise InvalidInputError("states contain non-finite entries")
        states.flags.writeable = False
        object.__setattr__(self, "states", states)

    @property
    def horizon(self):
        return self.states.shape[0] - 1

    @property
    def dim(self):
        return self.states.shape[1]


def invariant_covariance(sys):
    """Stationary state covariance S solving S = theta S theta^T + noise_cov."""
    return sys._get_invariant_cov()


def _draw_stationary(sys, gen):
    z = gen.standard_normal(sys.dim)
    return sys._get_invariant_chol() @ z


def sample_initial_state(sys, rng):
    """One zero-mean draw from the invariant distribution of ``sys``.

    Deterministic in ``rng``: the same stream always returns the same
    vector. Use distinct stream ids for independent draws.
    """
    return _draw_stationary(sys, rng.generator())


def simulate(sys, T, rng, init_mode="stationary", x0=None, noise_scale=1.0):
    """Simulate ``T`` steps of the system under the given stream.

    ``init_mode`` picks the initial state: 'stationary' draws from the
    invariant distribution, 'standard_normal' from N(0, I), 'fixed' uses
    ``x0`` verbatim. ``noise_scale`` multiplies the noise draws; 0 is a
    test hook giving the deterministic part only. The draw order (initial
    state first, then one noise row per step) is part of the determinism
    contract.
    """
    if not isinstance(T, (int, np.integer)) or T < 0:
        raise InvalidInputError(f"T must be a nonnegative integer, got {T!r}")
    if init_mode not in INIT_MODES:
        raise InvalidInputError(
            f"init_mode must be one of {INIT_MODES}, got {init_mode!r}"
        )
    noise_scale = float(noise_scale)
    if not noise_scale >= 0.0:
        raise InvalidInputError(
            f"noise_scale must be nonnegative, got {noise_scale}"
        )
    if init_mode == "fixed":
        if x0 is None:
            raise InvalidInputError("init_mode 'fixed' requires x0")
        x0 = np.ascontiguousarray(x0, dtype=np.float64).reshape(-1)
        if x0.shape != (sys.dim,):
            raise InvalidInputError(
                f"x0 must have {sys.dim} entries, got shape {x0.shape}"
            )
        if not np.isfinite(x0).all():
            raise InvalidInputError("x0 contains non-finite entries")
    elif x0 is not None:
        raise InvalidInputError("x0 is only valid with init_mode 'fixed'")

    gen = rng.generator()
    if init_mode == "stationary":
        start = _draw_stationary(sys, gen)
    elif init_mode == "standard_normal":
        start = gen.standard_normal(sys.dim)
    else:
        start = x0
    z = gen.standard_normal((int(T), sys.dim))
    noise = z @ sys._get_noise_chol().T
    if noise_scale != 1.0:
        noise = noise * noise_scale
    states = kernels.simulate_path(sys.theta, start, noise)
    return Trajectory(states)
