"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The compiled extension (``topoid.kernels._core``, Cython) is preferred when
present; otherwise the pure twin in ``pure`` takes over. Both produce
bit-identical float64 output. Selection can be forced with the
``TOPOID_BACKEND`` environment variable (``auto``, ``compiled``, ``pure``),
read once at import.

Public entry points validate and coerce arguments; the backend modules
assume clean contiguous float64 input.
"""

import os

import numpy as np

from ..errors import InvalidInputError
from . import pure

try:
    from . import _core as _compiled
except ImportError:
    _compiled = None

_choice = os.environ.get("TOPOID_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "compiled", "pure"):
    raise InvalidInputError(
        f"TOPOID_BACKEND must be 'auto', 'compiled' or 'pure', got {_choice!r}"
    )
if _choice == "compiled" and _compiled is None:
    raise InvalidInputError(
        "TOPOID_BACKEND=compiled but the compiled extension is not installed"
    )
if _choice == "pure" or _compiled is None:
    _active = pure
    BACKEND = "pure"
else:
    _active = _compiled
    BACKEND = "compiled"


def backend_name():
    """Name of the backend serving this process: 'compiled' or 'pure'."""
    return BACKEND


def available_backends():
    """Names of importable backends, compiled first when present."""
    names = []
    if _compiled is not None:
        names.append("compiled")
    names.append("pure")
    return names


def get_backend(name):
    """Return a specific backend module, mainly for tests and benchmarks."""
    if name == "pure":
        return pure
    if name == "compiled":
        if _compiled is None:
            raise InvalidInputError("compiled backend is not installed")
        return _compiled
    raise InvalidInputError(f"unknown backend {name!r}")


def _as_matrix(M, name):
    out = np.ascontiguousarray(M, dtype=np.float64)
    if out.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {out.shape}")
    if not np.isfinite(out).all():
        raise InvalidInputError(f"{name} contains non-finite entries")
    return out


def simulate_path(theta, x0, noise, module=None):
    """Simulate ``x_{t+1} = theta x_t + noise_t`` from ``x0``.

    ``noise`` has one row per step; returns the ``(T + 1, n)`` state array
    including the initial state.
    """
    theta = _as_matrix(theta, "theta")
    n = theta.shape[0]
    if theta.shape[1] != n:
        raise InvalidInputError(f"theta must be square, got {theta.shape}")
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    if x0.shape != (n,):
        raise InvalidInputError(f"x0 must have shape ({n},), got {x0.shape}")
    if not np.isfinite(x0).all():
        raise InvalidInputError("x0 contains non-finite entries")
    noise = _as_matrix(noise, "noise")
    if noise.shape[1] != n:
        raise InvalidInputError(
            f"noise must have {n} columns, got {noise.shape[1]}"
        )
    mod = _active if module is None else module
    return mod.simulate_path(theta, x0, noise)


def ls_scan(states, horizons, module=None):
    """Lag-1 cross and Gram sums of a state path at several horizons.

    ``horizons`` must be strictly increasing integers in ``[1, T]`` where
    ``T = len(states) - 1``. Returns two ``(k, n, n)`` stacks.
    """
    states = _as_matrix(states, "states")
    if states.shape[0] < 1:
        raise InvalidInputError("states must contain at least the initial row")
    horizons = np.ascontiguousarray(horizons, dtype=np.int64)
    if horizons.ndim != 1:
        raise InvalidInputError("horizons must be a 1-D integer sequence")
    T = states.shape[0] - 1
    if horizons.size:
        if horizons[0] < 1 or horizons[-1] > T:
            raise InvalidInputError(
                f"horizons must lie in [1, {T}], got range "
                f"[{horizons[0]}, {horizons[-1]}]"
            )
        if np.any(np.diff(horizons) <= 0):
            raise InvalidInputError("horizons must be strictly increasing")
    mod = _active if module is None else module
    return mod.ls_scan(states, horizons)


def dare_fixed_point(A, B, Q, R, tol, max_iter, module=None):
    """Run the Riccati fixed-point recursion; see ``pure.dare_fixed_point``.

    Raw kernel: returns ``(P, iterations, status, last_step)`` without
    interpreting the status. ``topoid.matops.solve_dare`` is the checked
    public wrapper.
    """
    A = _as_matrix(A, "A")
    n = A.shape[0]
    if A.shape[1] != n:
        raise InvalidInputError(f"A must be square, got {A.shape}")
    B = _as_matrix(B, "B")
    if B.shape[0] != n:
        raise InvalidInputError(f"B must have {n} rows, got {B.shape[0]}")
    m = B.shape[1]
    Q = _as_matrix(Q, "Q")
    if Q.shape != (n, n):
        raise InvalidInputError(f"Q must have shape ({n}, {n}), got {Q.shape}")
    R = _as_matrix(R, "R")
    if R.shape != (m, m):
        raise InvalidInputError(f"R must have shape ({m}, {m}), got {R.shape}")
    tol = float(tol)
    if not tol > 0.0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    max_iter = int(max_iter)
    if max_iter < 1:
        raise InvalidInputError(f"max_iter must be at least 1, got {max_iter}")
    mod = _active if module is None else module
    return mod.dare_fixed_point(A, B, Q, R, tol, max_iter)
