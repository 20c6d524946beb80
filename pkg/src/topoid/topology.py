"""Topological classification of linear maps and projection onto stability.

Stable invertible linear maps fall into exactly two equivalence classes,
told apart by the sign of the determinant. Scalars get the finer
seven-class picture with explicit conjugating homeomorphisms. The reverse
projection sends an arbitrary (possibly unstable) matrix to a nearby stable
one while preserving orientation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import matops
from .errors import InvalidInputError


class Orientation(enum.IntEnum):
    """Sign of the determinant of an invertible linear map."""

    POSITIVE = 1
    NEGATIVE = -1


def orientation(M):
    """Orientation of an invertible map: the sign of its determinant."""
    sign = matops.det_sign(M)
    if sign == 0:
        raise InvalidInputError("orientation undefined for non-invertible map")
    return Orientation(sign)


def _require_stable_isomorphism(M, name):
    M = matops.as_square(M, name)
    rho = matops.spectral_radius(M)
    if rho >= 1.0:
        raise InvalidInputError(
            f"equivalence test requires stable isomorphisms: {name} has "
            f"spectral radius {rho:.6g}"
        )
    if matops.det_sign(M) == 0:
        raise InvalidInputError(
            f"equivalence test requires stable isomorphisms: {name} is "
            "singular"
        )
    return M


def topologically_equivalent(F, G):
    """Whether two stable invertible maps are conjugate to each other.

    True exactly when the orientations match. Unstable or singular input
    is refused rather than classified.
    """
    F = _require_stable_isomorphism(F, "F")
    G = _require_stable_isomorphism(G, "G")
    if F.shape != G.shape:
        raise InvalidInputError(
            f"maps must share dimension, got {F.shape} vs {G.shape}"
        )
    return orientation(F) == orientation(G)


_CLASS_DESCRIPTIONS = {
    1: "a < -1",
    2: "a = -1",
    3: "-1 < a < 0",
    4: "a = 0",
    5: "0 < a < 1",
    6: "a = 1",
    7: "a > 1",
}


@dataclass(frozen=True)
class ScalarTopoClass:
    """One of the seven scalar equivalence classes.

    Classes 2, 4, 6 are the degenerate singletons {-1}, {0}, {1}; the other
    four are open intervals.
    """

    class_id: int
    kind: str

    def describe(self):
        return f"({self.class_id}) {_CLASS_DESCRIPTIONS[self.class_id]}"


def scalar_class(a):
    """Classify a scalar map x -> a x into its equivalence class.

    Boundary values -1, 0, 1 compare exactly; no tolerance is applied.
    """
    a = float(a)
    if not math.isfinite(a):
        raise InvalidInputError(f"a must be finite, got {a}")
    if a < -1.0:
        cid = 1
    elif a == -1.0:
        cid = 2
    elif a < 0.0:
        cid = 3
    elif a == 0.0:
        cid = 4
    elif a < 1.0:
        cid = 5
    elif a == 1.0:
        cid = 6
    else:
        cid = 7
    kind = "singleton" if cid in (2, 4, 6) else "open_interval"
    return ScalarTopoClass(class_id=cid, kind=kind)


def scalar_conjugacy_exponent(a, b):
    """Exponent c with x |x|^{c-1} conjugating x -> a x into y -> b y.

    Defined only within one of the four non-degenerate classes; equals
    log|b| / log|a| and is always positive there.
    """
    a = float(a)
    b = float(b)
    cls_a = scalar_class(a)
    cls_b = scalar_class(b)
    if cls_a != cls_b:
        raise InvalidInputError(
            f"maps lie in different classes ({cls_a.class_id} vs "
            f"{cls_b.class_id}); no conjugacy exists"
        )
    if cls_a.kind == "singleton":
        raise InvalidInputError(
            f"class ({cls_a.class_id}) is a degenerate singleton; the "
            "power-law conjugacy applies only to the open-interval classes"
        )
    return math.log(abs(b)) / math.log(abs(a))


def apply_scalar_homeomorphism(x, c):
    """Evaluate the odd power-law homeomorphism x |x|^{c-1}.

    Fixes 0, preserves sign, and inverts under exponent 1/c.
    """
    c = float(c)
    if not c > 0.0:
        raise InvalidInputError(f"exponent must be positive, got {c}")
    x = float(x)
    if x == 0.0:
        return 0.0
    return x * abs(x) ** (c - 1.0)


def reverse_i_projection(theta_prime, S_w, delta=1e-9):
    """Project a matrix onto the stable set, nearly minimizing the rate.

    Solves the Riccati problem (A = theta_prime, B = I, Q = I,
    R = (2 delta S_w)^{-1}) and returns the closed-loop matrix
    theta_prime - K. The result is always stable; it preserves the
    determinant sign of invertible input, and converges to ``theta_prime``
    itself as delta -> 0 when that is already stable.
    """
    theta_prime = matops.as_square(theta_prime, "theta_prime")
    n = theta_prime.shape[0]
    S_w = matops.require_symmetric(S_w, "S_w")
    if S_w.shape != theta_prime.shape:
        raise InvalidInputError("S_w shape does not match theta_prime")
    delta = float(delta)
    if not delta > 0.0:
        raise InvalidInputError(f"delta must be positive, got {delta}")
    try:
        np.linalg.cholesky(S_w)
    except np.linalg.LinAlgError as exc:
        raise InvalidInputError("S_w must be positive definite") from exc
    R = np.linalg.inv(2.0 * delta * S_w)
    R = 0.5 * (R + R.T)
    solution = matops.solve_dare(theta_prime, np.eye(n), np.eye(n), R)
    return theta_prime - solution.gain
