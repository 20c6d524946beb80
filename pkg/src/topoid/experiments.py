"""Seeded Monte Carlo harness: misclassification frequency versus horizon.

Builds a block system from a sub-block Y, simulates E independent
trajectories, estimates the system matrix at each horizon prefix, and
compares the topological class of the raw and stability-projected
estimates against the truth. Results go to CSV and an optional SVG chart.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from decimal import Decimal

import numpy as np

from . import estimation, kernels, matops, rate, topology
from .errors import (
    InsufficientExcitationError,
    InvalidInputError,
    NumericalError,
    TopoidError,
)
from .svgplot import Series, write_log_plot
from .system import LtiSystem, RngStream, simulate

COUPLINGS = ("separable", "interconnected", "single")
CONFIG_INIT_MODES = ("stationary", "standard_normal")
DEFAULT_HORIZONS = (10, 20, 50, 100, 200, 500, 1000)
PLOT_FLOOR = 1e-4


def build_theta(Y, coupling):
    """Assemble the full system matrix from the sub-block Y.

    'separable' stacks two decoupled copies of Y on the diagonal;
    'interconnected' adds an identity coupling block above the diagonal;
    'single' uses Y itself. All three are stable whenever Y is, since the
    spectrum of a block-triangular matrix is the union of its blocks'.
    """
    Y = matops.as_square(Y, "Y")
    rho = matops.spectral_radius(Y)
    if rho >= 1.0:
        raise InvalidInputError(
            f"Y must be stable, got spectral radius {rho:.6g}"
        )
    if coupling == "single":
        return Y.copy()
    m = Y.shape[0]
    out = np.zeros((2 * m, 2 * m))
    out[:m, :m] = Y
    out[m:, m:] = Y
    if coupling == "interconnected":
        out[:m, m:] = np.eye(m)
    elif coupling != "separable":
        raise InvalidInputError(
            f"coupling must be one of {COUPLINGS}, got {coupling!r}"
        )
    return out


def a_schedule(T, epsilon):
    """Moderate-deviations speed T^(1/(1+epsilon)); lies in [1, T]."""
    if not isinstance(T, (int, np.integer)) or T < 1:
        raise InvalidInputError(f"T must be a positive integer, got {T!r}")
    epsilon = float(epsilon)
    if not epsilon > 0.0:
        raise InvalidInputError(f"epsilon must be positive, got {epsilon}")
    return float(T) ** (1.0 / (1.0 + epsilon))


def _as_horizons(values):
    try:
        horizons = tuple(int(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"invalid horizons: {values!r}") from exc
    if not horizons:
        raise InvalidInputError("horizons must be nonempty")
    if horizons[0] < 1 or any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise InvalidInputError(
            f"horizons must be positive and strictly increasing, got {horizons}"
        )
    return horizons


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Complete description of one Monte Carlo run.

    ``workers`` controls execution only; it never affects the results or
    the config hash, and neither does ``output_path``.
    """

    Y: np.ndarray
    coupling: str = "separable"
    trials: int = 200
    horizons: tuple = DEFAULT_HORIZONS
    noise_cov: np.ndarray = None
    epsilon: float = 1e-9
    delta: float = 1e-9
    seed: int = 0
    init_mode: str = "stationary"
    output_path: str = "."
    workers: int = 1

    def __post_init__(self):
        Y = matops.as_square(self.Y, "Y").copy()
        Y.flags.writeable = False
        object.__setattr__(self, "Y", Y)
        if self.coupling not in COUPLINGS:
            raise InvalidInputError(
                f"coupling must be one of {COUPLINGS}, got {self.coupling!r}"
            )
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise InvalidInputError(
                f"trials must be a positive integer, got {self.trials!r}"
            )
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "horizons", _as_horizons(self.horizons))
        dim = Y.shape[0] if self.coupling == "single" else 2 * Y.shape[0]
        noise_cov = self.noise_cov
        if noise_cov is None:
            noise_cov = np.eye(dim)
        noise_cov = matops.require_symmetric(noise_cov, "noise_cov")
        if noise_cov.shape != (dim, dim):
            raise InvalidInputError(
                f"noise_cov must be {dim}x{dim} for this coupling, got "
                f"{noise_cov.shape}"
            )
        try:
            np.linalg.cholesky(noise_cov)
        except np.linalg.LinAlgError as exc:
            raise InvalidInputError(
                "noise_cov must be positive definite"
            ) from exc
        noise_cov.flags.writeable = False
        object.__setattr__(self, "noise_cov", noise_cov)
        for name in ("epsilon", "delta"):
            value = float(getattr(self, name))
            if not value > 0.0:
                raise InvalidInputError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)
        if not isinstance(self.seed, (int, np.integer)) or not (
            0 <= int(self.seed) < 2**64
        ):
            raise InvalidInputError(
                f"seed must be an unsigned 64-bit integer, got {self.seed!r}"
            )
        object.__setattr__(self, "seed", int(self.seed))
        if self.init_mode not in CONFIG_INIT_MODES:
            raise InvalidInputError(
                f"init_mode must be one of {CONFIG_INIT_MODES}, got "
                f"{self.init_mode!r}"
            )
        if not isinstance(self.workers, (int, np.integer)) or self.workers < 1:
            raise InvalidInputError(
                f"workers must be a positive integer, got {self.workers!r}"
            )
        object.__setattr__(self, "workers", int(self.workers))

    @property
    def dim(self):
        return self.noise_cov.shape[0]


@dataclass(frozen=True)
class HorizonStats:
    """Aggregated outcome at one horizon.

    Frequencies use the denominator trials - skipped; ``bound`` is
    exp(-rate * a_value) for the run's misclassification rate.
    """

    horizon: int
    a_value: float
    misclass_raw: float
    misclass_projected: float
    skipped: int
    bound: float


@dataclass(frozen=True)
class ExperimentResult:
    """All horizon rows of one run plus the rate and timing metadata."""

    config: ExperimentConfig = field(repr=False)
    rate: float
    rows: tuple
    wall_clock_s: float


def _canonical_matrix(M):
    body = ";".join(
        ",".join(repr(float(v)) for v in row) for row in np.asarray(M)
    )
    return f"[{body}]"


def config_hash(config):
    """Stable digest of the statistically relevant config fields.

    ``output_path`` and ``workers`` are excluded: they cannot change the
    numbers.
    """
    parts = [
        "v1",
        "Y=" + _canonical_matrix(config.Y),
        "coupling=" + config.coupling,
        "trials=" + str(config.trials),
        "horizons=" + ",".join(str(t) for t in config.horizons),
        "noise_cov=" + _canonical_matrix(config.noise_cov),
        "epsilon=" + repr(config.epsilon),
        "delta=" + repr(config.delta),
        "seed=" + str(config.seed),
        "init_mode=" + config.init_mode,
    ]
    digest = hashlib.sha256("|".join(parts).encode("ascii")).hexdigest()
    return f"sha256:{digest}"


def run_monte_carlo(config):
    """Execute the configured experiment; deterministic given the config.

    Each trial i in 1..trials consumes stream (seed, i): one trajectory of
    length max(horizons), estimated on every horizon prefix. At each
    horizon a trial is skipped (and counted) when the estimate is
    unavailable or singular or its projection fails; a horizon where more
    than half the trials skip invalidates the whole run.
    """
    start = time.perf_counter()
    theta = build_theta(config.Y, config.coupling)
    true_sign = matops.det_sign(theta)
    if true_sign == 0:
        raise InvalidInputError(
            "built system matrix is singular; its class is undefined"
        )
    sys_model = LtiSystem(theta, config.noise_cov)
    sys_model.warm_up()
    run_rate = rate.misclassification_rate(theta, config.noise_cov)
    horizons = np.asarray(config.horizons, dtype=np.int64)
    k = horizons.size
    t_max = int(horizons[-1])

    def one_trial(index):
        stream = RngStream(config.seed, index)
        traj = simulate(sys_model, t_max, stream, init_mode=config.init_mode)
        cross, gram = kernels.ls_scan(traj.states, horizons)
        raw = np.zeros(k, dtype=np.int64)
        projected = np.zeros(k, dtype=np.int64)
        skipped = np.zeros(k, dtype=np.int64)
        for h in range(k):
            try:
                est = estimation.solve_normal_equations(cross[h], gram[h])
            except InsufficientExcitationError:
                skipped[h] = 1
                continue
            sign = matops.det_sign(est)
            if sign == 0:
                skipped[h] = 1
                continue
            try:
                stable_est = topology.reverse_i_projection(
                    est, config.noise_cov, config.delta
                )
                equivalent = topology.topologically_equivalent(
                    stable_est, theta
                )
            except TopoidError:
                skipped[h] = 1
                continue
            if sign != true_sign:
                raw[h] = 1
            if not equivalent:
                projected[h] = 1
        return raw, projected, skipped

    indices = range(1, config.trials + 1)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(one_trial, indices))
    else:
        outcomes = [one_trial(i) for i in indices]

    raw_total = np.zeros(k, dtype=np.int64)
    proj_total = np.zeros(k, dtype=np.int64)
    skip_total = np.zeros(k, dtype=np.int64)
    for raw, projected, skipped in outcomes:
        raw_total += raw
        proj_total += projected
        skip_total += skipped

    rows = []
    for h in range(k):
        T = int(horizons[h])
        skipped = int(skip_total[h])
        if 2 * skipped > config.trials:
            raise NumericalError(
                f"horizon {T}: {skipped} of {config.trials} trials skipped; "
                "experiment invalid"
            )
        valid = config.trials - skipped
        a_value = a_schedule(T, config.epsilon)
        rows.append(
            HorizonStats(
                horizon=T,
                a_value=a_value,
                misclass_raw=float(raw_total[h] / valid),
                misclass_projected=float(proj_total[h] / valid),
                skipped=skipped,
                bound=rate.theoretical_bound(run_rate, a_value),
            )
        )
    return ExperimentResult(
        config=config,
        rate=run_rate,
        rows=tuple(rows),
        wall_clock_s=time.perf_counter() - start,
    )


def _decimal_digits(value):
    """Plain decimal form, exact float round-trip, >= 12 significant digits."""
    value = float(value)
    if not math.isfinite(value):
        raise InvalidInputError(f"cannot serialize non-finite value {value}")
    text = format(Decimal(repr(value)), "f")
    if "." not in text:
        text += ".0"
    significant = len(text.lstrip("-").replace(".", "").lstrip("0"))
    if value != 0.0 and significant < 12:
        text += "0" * (12 - significant)
    return text


def emit_csv(result, path):
    """Write one row per horizon plus a ``# meta:`` trailer.

    Float columns are plain decimal with at least 12 significant digits and
    parse back to the exact stored values. Re-running an identical config
    reproduces the file byte for byte except the wall-clock meta line.
    """
    if not result.rows:
        raise InvalidInputError("result has no horizon rows to write")
    lines = ["T,a_T,misclass_raw,misclass_projected,skipped,bound"]
    for row in result.rows:
        lines.append(
            ",".join(
                (
                    str(row.horizon),
                    _decimal_digits(row.a_value),
                    _decimal_digits(row.misclass_raw),
                    _decimal_digits(row.misclass_projected),
                    str(row.skipped),
                    _decimal_digits(row.bound),
                )
            )
        )
    lines.append(f"# meta: seed={result.config.seed}")
    lines.append(f"# meta: config_hash={config_hash(result.config)}")
    lines.append(f"# meta: rate={_decimal_digits(result.rate)}")
    lines.append(f"# meta: wall_clock_s={result.wall_clock_s:.3f}")
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"failed to write CSV to {path}: {exc}") from exc


def emit_plot(result, path, floor=PLOT_FLOOR):
    """Chart raw/projected frequencies and the bound on a log-y axis."""
    if not result.rows:
        raise InvalidInputError("result has no horizon rows to plot")
    x = [row.horizon for row in result.rows]
    series = [
        Series(
            "raw misclassification",
            x,
            [row.misclass_raw for row in result.rows],
            "#1f77b4",
            "circle",
        ),
        Series(
            "projected misclassification",
            x,
            [row.misclass_projected for row in result.rows],
            "#d62728",
            "square",
        ),
        Series(
            "exp(-r a_T) bound",
            x,
            [row.bound for row in result.rows],
            "#444444",
            "diamond",
            dashed=True,
        ),
    ]
    write_log_plot(
        path,
        series,
        xlabel="horizon T",
        ylabel="frequency",
        floor=floor,
    )


@dataclass(frozen=True)
class ScalarMdpRow:
    """One horizon of the scalar deviation-probability validation.

    ``slope`` is -log(p) / a_value with p floored at 1/trials (``clamped``
    marks rows where the floor bit); ``ratio`` divides it by the predicted
    slope eps^2 / (2 (1 - theta^2)).
    """

    horizon: int
    a_value: float
    threshold: float
    p_hat: float
    clamped: bool
    slope: float
    predicted_slope: float
    ratio: float


def validate_scalar_mdp(theta, sigma_w, eps, trials, horizons, seed):
    """Empirical check of the scalar deviation-probability decay.

    Simulates a scalar system and measures how often the estimate misses
    the truth by more than eps * sqrt(a_T / T), with a_T = sqrt(T). The
    predicted decay slope does not depend on sigma_w. This is a trend
    validator: the unmodeled o(a_T) correction biases finite-T slopes.
    """
    theta = float(theta)
    if not abs(theta) < 1.0:
        raise InvalidInputError(f"theta must lie in (-1, 1), got {theta}")
    sigma_w = float(sigma_w)
    if not sigma_w > 0.0:
        raise InvalidInputError(f"sigma_w must be positive, got {sigma_w}")
    eps = float(eps)
    if not eps > 0.0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise InvalidInputError(
            f"trials must be a positive integer, got {trials!r}"
        )
    horizons_t = _as_horizons(horizons)
    horizons_arr = np.asarray(horizons_t, dtype=np.int64)
    k = horizons_arr.size
    t_max = int(horizons_arr[-1])

    sys_model = LtiSystem([[theta]], [[sigma_w * sigma_w]])
    sys_model.warm_up()
    a_values = [a_schedule(int(T), 1.0) for T in horizons_t]
    thresholds = [
        eps * math.sqrt(a / T) for a, T in zip(a_values, horizons_t)
    ]
    counts = np.zeros(k, dtype=np.int64)
    for index in range(1, int(trials) + 1):
        traj = simulate(sys_model, t_max, RngStream(seed, index))
        cross, gram = kernels.ls_scan(traj.states, horizons_arr)
        for h in range(k):
            denom = gram[h, 0, 0]
            if denom <= 0.0:
                counts[h] += 1
                continue
            deviation = abs(cross[h, 0, 0] / denom - theta)
            if deviation > thresholds[h]:
                counts[h] += 1

    predicted = 0.5 * eps * eps / (1.0 - theta * theta)
    rows = []
    for h in range(k):
        p_hat = counts[h] / trials
        clamped = counts[h] == 0
        p_used = max(p_hat, 1.0 / trials)
        slope = -math.log(p_used) / a_values[h]
        rows.append(
            ScalarMdpRow(
                horizon=int(horizons_arr[h]),
                a_value=a_values[h],
                threshold=thresholds[h],
                p_hat=float(p_hat),
                clamped=bool(clamped),
                slope=slope,
                predicted_slope=predicted,
                ratio=slope / predicted,
            )
        )
    return tuple(rows)


def _parse_matrix_text(text, name):
    rows = [
        chunk.strip()
        for chunk in text.replace("\n", ";").split(";")
        if chunk.strip()
    ]
    if not rows:
        raise InvalidInputError(f"{name}: empty matrix")
    try:
        data = [
            [float(tok) for tok in row.replace(",", " ").split()]
            for row in rows
        ]
    except ValueError as exc:
        raise InvalidInputError(f"{name}: {exc}") from exc
    width = len(data[0])
    if any(len(row) != width for row in data):
        raise InvalidInputError(f"{name}: ragged rows")
    return np.array(data, dtype=np.float64)


def load_config(path):
    """Read an ExperimentConfig from an INI file.

    Matrices are written with ';' (or line breaks) between rows and
    whitespace or ',' between entries; ``noise_cov`` also accepts the
    keyword 'identity' (the default when omitted).
    """
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise InvalidInputError(f"malformed config {path}: {exc}") from exc

    if not parser.has_section("system"):
        raise InvalidInputError(f"{path}: missing [system] section")
    if not parser.has_option("system", "Y"):
        raise InvalidInputError(f"{path}: missing Y under [system]")
    Y = _parse_matrix_text(parser.get("system", "Y"), "Y")

    exp = parser["experiment"] if parser.has_section("experiment") else {}
    coupling = exp.get("coupling", "separable").strip()
    noise_raw = parser.get("system", "noise_cov", fallback="identity").strip()
    noise_cov = (
        None
        if noise_raw.lower() == "identity"
        else _parse_matrix_text(noise_raw, "noise_cov")
    )

    def _get_int(key, default):
        raw = exp.get(key)
        if raw is None:
            return default
        try:
            return int(str(raw).strip())
        except ValueError as exc:
            raise InvalidInputError(f"{path}: bad integer for {key}: {raw!r}") from exc

    def _get_float(key, default):
        raw = exp.get(key)
        if raw is None:
            return default
        try:
            return float(str(raw).strip())
        except ValueError as exc:
            raise InvalidInputError(f"{path}: bad number for {key}: {raw!r}") from exc

    horizons_raw = exp.get("horizons")
    if horizons_raw is None:
        horizons = DEFAULT_HORIZONS
    else:
        try:
            horizons = tuple(
                int(tok) for tok in str(horizons_raw).replace(",", " ").split()
            )
        except ValueError as exc:
            raise InvalidInputError(
                f"{path}: bad horizons: {horizons_raw!r}"
            ) from exc

    return ExperimentConfig(
        Y=Y,
        coupling=coupling,
        trials=_get_int("trials", 200),
        horizons=horizons,
        noise_cov=noise_cov,
        epsilon=_get_float("epsilon", 1e-9),
        delta=_get_float("delta", 1e-9),
        seed=_get_int("seed", 0),
        init_mode=exp.get("init_mode", "stationary").strip(),
        output_path=exp.get("output_path", ".").strip(),
        workers=_get_int("workers", 1),
    )


def override_config(config, **updates):
    """Functional update helper used by the CLI flag overrides."""
    clean = {k: v for k, v in updates.items() if v is not None}
    if not clean:
        return config
    return replace(config, **clean)
