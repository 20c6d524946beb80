"""Monte Carlo harness: config handling, execution, and output files."""

import re

import numpy as np
import pytest

from topoid.errors import InvalidInputError, NumericalError
from topoid.experiments import (
    DEFAULT_HORIZONS,
    ExperimentConfig,
    ExperimentResult,
    a_schedule,
    build_theta,
    config_hash,
    emit_csv,
    emit_plot,
    load_config,
    override_config,
    run_monte_carlo,
    validate_scalar_mdp,
)

Y_BLOCK = np.array([[-0.1, 1.0], [0.1, 0.05]])

CSV_FLOAT = re.compile(r"^-?\d+\.\d+$")


def _scalar_config(**overrides):
    base = dict(
        Y=np.array([[0.9]]),
        coupling="single",
        trials=100,
        horizons=(10, 50),
        seed=123,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_build_theta_single_copies():
    Y = np.array([[0.5]])
    theta = build_theta(Y, "single")
    theta[0, 0] = 0.0
    assert Y[0, 0] == 0.5


def test_build_theta_separable_block_diagonal():
    theta = build_theta(Y_BLOCK, "separable")
    assert theta.shape == (4, 4)
    np.testing.assert_array_equal(theta[:2, :2], Y_BLOCK)
    np.testing.assert_array_equal(theta[2:, 2:], Y_BLOCK)
    np.testing.assert_array_equal(theta[:2, 2:], np.zeros((2, 2)))
    np.testing.assert_array_equal(theta[2:, :2], np.zeros((2, 2)))


def test_build_theta_interconnected_coupling_block():
    theta = build_theta(Y_BLOCK, "interconnected")
    np.testing.assert_array_equal(theta[:2, 2:], np.eye(2))
    np.testing.assert_array_equal(theta[2:, :2], np.zeros((2, 2)))


def test_build_theta_validation():
    with pytest.raises(InvalidInputError, match="stable"):
        build_theta(np.eye(2), "separable")
    with pytest.raises(InvalidInputError, match="coupling"):
        build_theta(Y_BLOCK, "ring")


def test_a_schedule_values():
    assert a_schedule(1, 1e-9) == 1.0
    assert a_schedule(100, 1.0) == pytest.approx(10.0, rel=1e-12)
    assert a_schedule(1000, 1e-9) == pytest.approx(1000.0, abs=1e-4)
    assert 1.0 <= a_schedule(7, 0.5) <= 7.0


def test_a_schedule_validation():
    with pytest.raises(InvalidInputError):
        a_schedule(0, 1e-9)
    with pytest.raises(InvalidInputError):
        a_schedule(10, 0.0)


def test_config_defaults_and_dim():
    cfg = ExperimentConfig(Y=Y_BLOCK)
    assert cfg.coupling == "separable"
    assert cfg.trials == 200
    assert cfg.horizons == DEFAULT_HORIZONS
    assert cfg.dim == 4
    np.testing.assert_array_equal(cfg.noise_cov, np.eye(4))
    assert cfg.epsilon == 1e-9
    assert cfg.delta == 1e-9
    assert cfg.init_mode == "stationary"
    assert cfg.workers == 1

    single = ExperimentConfig(Y=Y_BLOCK, coupling="single")
    assert single.dim == 2


def test_config_freezes_matrices():
    Y = Y_BLOCK.copy()
    cfg = ExperimentConfig(Y=Y)
    Y[0, 0] = 99.0
    assert cfg.Y[0, 0] == -0.1
    with pytest.raises(ValueError):
        cfg.Y[0, 0] = 0.0
    with pytest.raises(ValueError):
        cfg.noise_cov[0, 0] = 0.0


@pytest.mark.parametrize("bad", [
    dict(coupling="both"),
    dict(trials=0),
    dict(horizons=()),
    dict(horizons=(5, 5)),
    dict(horizons=(0, 5)),
    dict(noise_cov=np.eye(3)),
    dict(noise_cov=np.zeros((4, 4))),
    dict(epsilon=0.0),
    dict(delta=-1.0),
    dict(seed=-1),
    dict(init_mode="fixed"),
    dict(workers=0),
])
def test_config_validation(bad):
    kwargs = dict(Y=Y_BLOCK)
    kwargs.update(bad)
    with pytest.raises(InvalidInputError):
        ExperimentConfig(**kwargs)


def test_config_hash_tracks_statistical_fields_only():
    a = _scalar_config()
    b = _scalar_config(workers=8, output_path="/tmp/elsewhere")
    c = _scalar_config(seed=124)
    assert config_hash(a).startswith("sha256:")
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(c)


def test_run_monte_carlo_scalar_smoke():
    result = run_monte_carlo(_scalar_config(trials=20))
    assert isinstance(result, ExperimentResult)
    assert result.rate > 0.0
    assert len(result.rows) == 2
    for row, T in zip(result.rows, (10, 50)):
        assert row.horizon == T
        assert row.a_value == a_schedule(T, 1e-9)
        assert 0.0 <= row.misclass_raw <= 1.0
        assert 0.0 <= row.misclass_projected <= 1.0
        assert row.skipped == 0
        assert 0.0 < row.bound <= 1.0
    assert result.wall_clock_s > 0.0


def test_run_monte_carlo_is_deterministic():
    cfg = _scalar_config(trials=50)
    first = run_monte_carlo(cfg)
    second = run_monte_carlo(cfg)
    assert first.rows == second.rows
    assert first.rate == second.rate


def test_run_monte_carlo_workers_do_not_change_results():
    serial = run_monte_carlo(_scalar_config(trials=40))
    threaded = run_monte_carlo(_scalar_config(trials=40, workers=4))
    assert serial.rows == threaded.rows


def test_run_monte_carlo_long_horizon_classifies_correctly():
    """At T = 200 a scalar 0.9 system is classified right nearly always."""
    result = run_monte_carlo(_scalar_config(trials=500, horizons=(200,)))
    row = result.rows[0]
    assert row.misclass_projected <= 0.05
    assert row.misclass_raw <= 0.05


def test_run_monte_carlo_all_skips_is_an_error():
    # a 2-D Gram matrix built from one transition cannot have full rank
    cfg = ExperimentConfig(Y=Y_BLOCK, coupling="single", trials=10,
                           horizons=(1,), seed=3)
    with pytest.raises(NumericalError, match="skipped"):
        run_monte_carlo(cfg)


def test_emit_csv_format(tmp_path):
    result = run_monte_carlo(_scalar_config(trials=30))
    out = tmp_path / "run.csv"
    emit_csv(result, out)
    lines = out.read_text(encoding="ascii").splitlines()
    assert lines[0] == "T,a_T,misclass_raw,misclass_projected,skipped,bound"
    data = [line for line in lines[1:] if not line.startswith("#")]
    meta = [line for line in lines[1:] if line.startswith("#")]
    assert len(data) == len(result.rows)
    for line, row in zip(data, result.rows):
        fields = line.split(",")
        assert len(fields) == 6
        assert int(fields[0]) == row.horizon
        assert int(fields[4]) == row.skipped
        for text, value in ((fields[1], row.a_value),
                            (fields[2], row.misclass_raw),
                            (fields[3], row.misclass_projected),
                            (fields[5], row.bound)):
            assert CSV_FLOAT.match(text), text
            assert float(text) == value
            if value != 0.0:
                digits = len(text.lstrip("-").replace(".", "").lstrip("0"))
                assert digits >= 12
    assert meta[0] == "# meta: seed=123"
    assert meta[1].startswith("# meta: config_hash=sha256:")
    assert meta[2].startswith("# meta: rate=")
    assert float(meta[2].split("=")[1]) == result.rate
    assert meta[3].startswith("# meta: wall_clock_s=")


def test_emit_csv_reproducible_up_to_wall_clock(tmp_path):
    cfg = _scalar_config(trials=25)
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    emit_csv(run_monte_carlo(cfg), p1)
    emit_csv(run_monte_carlo(cfg), p2)
    keep = lambda line: not line.startswith("# meta: wall_clock_s=")
    a = [l for l in p1.read_text().splitlines() if keep(l)]
    b = [l for l in p2.read_text().splitlines() if keep(l)]
    assert a == b


def test_emit_csv_rejects_empty(tmp_path):
    result = run_monte_carlo(_scalar_config(trials=5))
    empty = ExperimentResult(config=result.config, rate=result.rate,
                             rows=(), wall_clock_s=0.0)
    with pytest.raises(InvalidInputError):
        emit_csv(empty, tmp_path / "never.csv")


def test_emit_plot_writes_svg(tmp_path):
    result = run_monte_carlo(_scalar_config(trials=20))
    out = tmp_path / "run.svg"
    emit_plot(result, out)
    text = out.read_text(encoding="utf-8")
    assert text.startswith("<svg ")
    assert text.rstrip().endswith("</svg>")
    for label in ("raw misclassification", "projected misclassification",
                  "exp(-r a_T) bound"):
        assert label in text


def test_emit_plot_single_horizon_and_clamp_note(tmp_path):
    # horizon 2000 pushes the bound far below the display floor
    cfg = _scalar_config(Y=np.array([[0.5]]), trials=10, horizons=(2000,))
    result = run_monte_carlo(cfg)
    assert result.rows[0].bound < 1e-4
    out = tmp_path / "one.svg"
    emit_plot(result, out)
    text = out.read_text(encoding="utf-8")
    assert "values below 0.0001 drawn at floor" in text


def test_validate_scalar_mdp_rows():
    rows = validate_scalar_mdp(theta=0.5, sigma_w=1.0, eps=0.5, trials=400,
                               horizons=(50, 100), seed=7)
    assert len(rows) == 2
    predicted = 0.5 * 0.25 / 0.75
    for row, T in zip(rows, (50, 100)):
        assert row.horizon == T
        assert row.a_value == pytest.approx(np.sqrt(T), rel=1e-12)
        assert row.threshold == pytest.approx(
            0.5 * np.sqrt(row.a_value / T), rel=1e-12
        )
        assert 0.0 <= row.p_hat <= 1.0
        assert row.predicted_slope == pytest.approx(predicted, rel=1e-12)
        if not row.clamped:
            assert row.ratio == pytest.approx(row.slope / predicted, rel=1e-12)


def test_validate_scalar_mdp_clamps_rare_events():
    # eps = 10 makes the deviation event essentially impossible
    rows = validate_scalar_mdp(theta=0.0, sigma_w=1.0, eps=10.0, trials=50,
                               horizons=(20,), seed=11)
    assert rows[0].clamped
    assert rows[0].p_hat == 0.0
    assert rows[0].slope == pytest.approx(np.log(50.0) / np.sqrt(20.0),
                                          rel=1e-12)


def test_validate_scalar_mdp_predicted_slope_ignores_noise_scale():
    a = validate_scalar_mdp(0.3, 0.1, 0.5, 50, (30,), seed=2)
    b = validate_scalar_mdp(0.3, 10.0, 0.5, 50, (30,), seed=2)
    assert a[0].predicted_slope == b[0].predicted_slope


def test_validate_scalar_mdp_validation():
    with pytest.raises(InvalidInputError):
        validate_scalar_mdp(1.0, 1.0, 0.5, 10, (10,), seed=0)
    with pytest.raises(InvalidInputError):
        validate_scalar_mdp(0.5, 0.0, 0.5, 10, (10,), seed=0)
    with pytest.raises(InvalidInputError):
        validate_scalar_mdp(0.5, 1.0, -0.5, 10, (10,), seed=0)
    with pytest.raises(InvalidInputError):
        validate_scalar_mdp(0.5, 1.0, 0.5, 0, (10,), seed=0)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(
        "[system]\n"
        "Y = -0.1 1 ; 0.1 0.05\n"
        "noise_cov = 2 0 0 0 ; 0 2 0 0 ; 0 0 2 0 ; 0 0 0 2\n"
        "\n"
        "[experiment]\n"
        "coupling = interconnected\n"
        "trials = 37\n"
        "horizons = 5, 25, 125\n"
        "epsilon = 0.5\n"
        "delta = 1e-6\n"
        "seed = 99\n"
        "init_mode = standard_normal\n"
        "output_path = out/dir\n"
        "workers = 3\n"
    )
    cfg = load_config(path)
    np.testing.assert_array_equal(cfg.Y, Y_BLOCK)
    np.testing.assert_array_equal(cfg.noise_cov, 2.0 * np.eye(4))
    assert cfg.coupling == "interconnected"
    assert cfg.trials == 37
    assert cfg.horizons == (5, 25, 125)
    assert cfg.epsilon == 0.5
    assert cfg.delta == 1e-6
    assert cfg.seed == 99
    assert cfg.init_mode == "standard_normal"
    assert cfg.output_path == "out/dir"
    assert cfg.workers == 3


def test_load_config_defaults(tmp_path):
    path = tmp_path / "minimal.ini"
    path.write_text("[system]\nY = 0.5\n")
    cfg = load_config(path)
    assert cfg.coupling == "separable"
    assert cfg.trials == 200
    assert cfg.horizons == DEFAULT_HORIZONS
    np.testing.assert_array_equal(cfg.noise_cov, np.eye(2))
    assert cfg.seed == 0


def test_load_config_identity_keyword(tmp_path):
    path = tmp_path / "ident.ini"
    path.write_text(
        "[system]\nY = 0.5\nnoise_cov = identity\n"
        "[experiment]\ncoupling = single\n"
    )
    cfg = load_config(path)
    np.testing.assert_array_equal(cfg.noise_cov, np.eye(1))


@pytest.mark.parametrize("body", [
    "[experiment]\ntrials = 5\n",                     # no [system]
    "[system]\nnoise_cov = identity\n",               # no Y
    "[system]\nY = 0.5 zebra\n",                      # bad matrix entry
    "[system]\nY = 1 2 ; 3\n",                        # ragged rows
    "[system]\nY = 0.5\n[experiment]\ntrials = five\n",
    "[system]\nY = 0.5\n[experiment]\nhorizons = 1 two\n",
    "[system]\nY = 0.5\n[experiment]\nepsilon = tiny\n",
    "not even ini\n",
])
def test_load_config_rejects_bad_files(tmp_path, body):
    path = tmp_path / "bad.ini"
    path.write_text(body)
    with pytest.raises(InvalidInputError):
        load_config(path)


def test_load_config_missing_file():
    with pytest.raises(InvalidInputError, match="cannot read config"):
        load_config("/no/such/file.ini")


def test_override_config():
    cfg = _scalar_config()
    same = override_config(cfg, seed=None, trials=None)
    assert same is cfg
    changed = override_config(cfg, seed=7, workers=2)
    assert changed.seed == 7
    assert changed.workers == 2
    assert changed.trials == cfg.trials
