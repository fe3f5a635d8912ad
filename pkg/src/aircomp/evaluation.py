"""Monte Carlo evaluation of combining policies.

A *trial* is one full protocol round: deploy (or reuse) a sensor layout,
fly the pilot and data flyovers, form the estimate under a policy, and
record the squared error against the realized target.  Cells of many
trials are simulated in vectorized chunks; every policy evaluated at the
same configuration sees the same deployments, readings, and noise
(common random numbers), which makes policy gaps directly comparable.

Randomness is derived deterministically from ``(seed, n, k, chunk)`` via
``numpy.random.SeedSequence``, with separate child streams for
positions, pilot noise, readings, and data-flyover noise, so results are
reproducible bit-for-bit for a fixed configuration.

MSE values quoted in dB are normalized by the analytic second moment of
the target, ``10 * log10(mse / E[target**2])``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import ChannelParams, effective_gain_matrix
from .estimator import (
    beta_benchmark,
    beta_equal_optimal,
    beta_grid_oracle,
    beta_heuristic,
    beta_heuristic_equal,
    gain_statistics,
)
from .geometry import SensorField, deploy_sensors, plan_diameter_trajectory
from .nomographic import (
    TargetSpec,
    target_second_moment,
    target_sum_cross_moment,
    target_value,
)
from .protocol import (
    BetaVector,
    computation_phase,
    draw_sensor_data,
    estimate,
    sampling_phase,
)
from .rng import make_rng, spawn_seeds

POLICY_NAMES = ("heuristic", "heuristic-equal", "optimal-equal", "benchmark", "grid-oracle", "zero")
TARGET_NAMES = ("config-1", "config-2", "config-3")

# streams per chunk, in a fixed order
_S_POSITIONS, _S_PILOT, _S_DATA, _S_FLYOVER = range(4)


class EstimationError(RuntimeError):
    """Raised when a cell produces no usable trials (all rounds rejected)."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulated operating point.

    Defaults are the reference network: 20 sensors on a 10 m disk, a
    5-stop diameter flight at 50 m altitude, 1 W illumination (30 dBm),
    receiver noise variance 1e-10 (-70 dBm), reflection 0.99, and
    ``g0 = 0.0275`` (868 MHz).  ``data_mean``/``data_var`` describe the
    Gaussian sensor readings.  With ``redeploy_per_trial`` set, every
    trial scatters a fresh layout; otherwise one seeded layout is reused
    and the Monte Carlo MSE is conditional on it.
    """

    n: int = 20
    k: int = 5
    r_cov: float = 10.0
    h: float = 50.0
    p_watts: float = 1.0
    noise_var: float = 1e-10
    zeta: float = 0.99
    g0: float = 0.0275
    data_mean: float = 0.0
    data_var: float = 1.0
    target: str | TargetSpec = "config-1"
    policies: tuple[str, ...] = ("heuristic", "heuristic-equal", "benchmark")
    trials: int = 10000
    seed: int = 1
    redeploy_per_trial: bool = True

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError(f"n and k must be >= 1, got n={self.n}, k={self.k}")
        for name in ("r_cov", "h", "p_watts", "zeta", "g0"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.zeta > 1.0:
            raise ValueError(f"zeta must lie in (0, 1], got {self.zeta}")
        if self.noise_var < 0.0 or self.data_var < 0.0:
            raise ValueError("noise_var and data_var must be non-negative")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")
        if isinstance(self.target, str) and self.target not in TARGET_NAMES:
            raise ValueError(f"unknown target {self.target!r}; choose from {TARGET_NAMES}")
        object.__setattr__(self, "policies", tuple(self.policies))
        for p in self.policies:
            if isinstance(p, str) and p not in POLICY_NAMES:
                raise ValueError(f"unknown policy {p!r}; choose from {POLICY_NAMES}")


@dataclass(frozen=True)
class PolicyEstimate:
    """Monte Carlo MSE estimate for one policy at one configuration."""

    policy: str
    mse: float
    std_err: float
    trials_used: int
    trials_rejected: int


@dataclass(frozen=True)
class GapEstimate:
    """Paired dB gap between two policies on common random numbers."""

    policy_a: str
    policy_b: str
    gap_db: float
    std_err_db: float
    trials_used: int


@dataclass(frozen=True)
class SweepRow:
    axis_value: int
    target: str
    policy: str
    mse: float
    std_err: float
    mse_db: float
    trials_used: int


@dataclass(frozen=True)
class ExperimentResult:
    """Sweep output: one row per (axis value, target, policy)."""

    axis: str
    rows: tuple[SweepRow, ...]

    CSV_HEADER = "axis_value,target,policy,mse,std_err,mse_db,trials_used"

    def to_csv_text(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.axis_value},{r.target},{r.policy},"
                f"{repr(float(r.mse))},{repr(float(r.std_err))},"
                f"{repr(float(r.mse_db))},{r.trials_used}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv_text())


@dataclass(frozen=True)
class GridOracleResult:
    """Grid-search outcome plus the evaluated grid for inspection."""

    beta: float
    mse: float
    center: float
    grid: np.ndarray
    values: np.ndarray


def build_target(target, n: int) -> TargetSpec:
    """Materialize a named target configuration for ``n`` sensors.

    ``config-1``: plain sum; ``config-2``: sum of squares;
    ``config-3``: cubes with ramp weights ``w_i = i``.  A ready
    :class:`TargetSpec` passes through (its length must match ``n``).
    """
    if isinstance(target, TargetSpec):
        if target.n != n:
            raise ValueError(f"target spec is for {target.n} sensors, expected {n}")
        return target
    if target == "config-1":
        return TargetSpec(np.ones(n), np.ones(n, dtype=int))
    if target == "config-2":
        return TargetSpec(np.ones(n), np.full(n, 2))
    if target == "config-3":
        return TargetSpec(np.arange(1, n + 1, dtype=float), np.full(n, 3))
    raise ValueError(f"unknown target {target!r}; choose from {TARGET_NAMES}")


def target_reference(config: ExperimentConfig, tspec: TargetSpec | None = None) -> float:
    """dB reference for a configuration: ``E[target**2]`` under its data statistics."""
    if tspec is None:
        tspec = build_target(config.target, config.n)
    return target_second_moment(tspec, config.data_mean, config.data_var)


def to_db(mse: float, reference: float) -> float:
    """Normalized MSE in decibels, ``10 * log10(mse / reference)``."""
    if not reference > 0.0:
        raise ValueError(f"reference must be positive, got {reference}")
    if mse < 0.0:
        raise ValueError(f"mse must be non-negative, got {mse}")
    if mse == 0.0:
        return -math.inf
    return 10.0 * math.log10(mse / reference)


def fixed_deployment(config: ExperimentConfig) -> SensorField:
    """The seeded layout reused by every trial when ``redeploy_per_trial`` is off."""
    return deploy_sensors(
        config.n,
        config.r_cov,
        config.zeta,
        config.data_mean,
        config.data_var,
        seed=np.random.SeedSequence((config.seed, config.n, config.k)),
    )


def _chunk_size(n: int, k: int) -> int:
    # bounded working set: chunk * n * k floats stays near 32 MB
    return max(64, min(16384, int(4_000_000 // max(n * k, 1))))


def _policy_label(policy) -> str:
    if isinstance(policy, str):
        return policy
    if isinstance(policy, (int, float)):
        return "fixed"
    return "fixed"


class _CellOutcome:
    __slots__ = ("sqerr", "accept")

    def __init__(self, trials: int):
        self.sqerr = np.empty(trials)
        self.accept = np.ones(trials, dtype=bool)


def _evaluate_cell(config: ExperimentConfig, tspec: TargetSpec, policies, want_aggregates=False):
    """Simulate one cell and score every policy on the same trials."""
    n, k, trials = config.n, config.k, config.trials
    params = ChannelParams(g0=config.g0, tx_power_w=config.p_watts)
    traj = plan_diameter_trajectory(k, config.r_cov, config.h)
    sx, sy = traj.stops[:, 0], traj.stops[:, 1]
    mu = np.broadcast_to(np.float64(config.data_mean), (n,))
    var = np.broadcast_to(np.float64(config.data_var), (n,))
    w, v = tspec.weights, tspec.exponents
    amp = math.sqrt(config.zeta * config.p_watts) * config.g0**2
    noise_std = math.sqrt(config.noise_var)

    cross = target_sum_cross_moment(tspec, mu, var)
    sum_var = float(var.sum())

    # constant coefficients resolvable before simulation
    resolved = []
    stats_cache = None

    def _stats():
        nonlocal stats_cache
        if stats_cache is None:
            stats_cache = gain_statistics(traj, config.r_cov, params, config.zeta)
        return stats_cache

    for p in policies:
        if isinstance(p, BetaVector):
            resolved.append(("vector", _check_len(p.beta, k)))
        elif isinstance(p, np.ndarray):
            resolved.append(("vector", _check_len(np.asarray(p, float), k)))
        elif isinstance(p, (int, float)) and not isinstance(p, bool):
            resolved.append(("scalar", float(p)))
        elif p == "zero":
            resolved.append(("scalar", 0.0))
        elif p == "benchmark":
            resolved.append(("scalar", float(beta_benchmark(traj, params, config.zeta, n).beta[0])))
        elif p == "optimal-equal":
            b = beta_equal_optimal(tspec, _stats(), mu, var, config.noise_var)
            resolved.append(("scalar", b))
        elif p == "heuristic":
            resolved.append(("heuristic", None))
        elif p == "heuristic-equal":
            resolved.append(("heuristic-equal", None))
        elif p == "grid-oracle":
            resolved.append(("oracle", None))
        else:
            raise ValueError(f"unknown policy {p!r}; choose from {POLICY_NAMES}")

    wants_oracle = any(kind == "oracle" for kind, _ in resolved)
    keep_aggregates = want_aggregates or wants_oracle

    outcomes = [_CellOutcome(trials) for _ in policies]
    agg_sum = np.empty(trials) if keep_aggregates else None
    agg_target = np.empty(trials) if keep_aggregates else None

    if not config.redeploy_per_trial:
        field0 = fixed_deployment(config)
        g_fixed = effective_gain_matrix(field0, traj, params).g

    chunk = _chunk_size(n, k)
    n_chunks = (trials + chunk - 1) // chunk
    for c in range(n_chunks):
        lo = c * chunk
        hi = min(trials, lo + chunk)
        size = hi - lo
        streams = np.random.SeedSequence((config.seed, n, k, c)).spawn(4)

        if config.redeploy_per_trial:
            rng_pos = make_rng(streams[_S_POSITIONS])
            radius = config.r_cov * np.sqrt(rng_pos.random((size, n)))
            angle = 2.0 * np.pi * rng_pos.random((size, n))
            px = radius * np.cos(angle)
            py = radius * np.sin(angle)
            d2 = (
                config.h**2
                + (px[:, :, None] - sx[None, None, :]) ** 2
                + (py[:, :, None] - sy[None, None, :]) ** 2
            )
            g = amp / d2
        else:
            g = np.broadcast_to(g_fixed, (size, n, k))

        alpha = g.sum(axis=1)
        if noise_std > 0.0:
            alpha = alpha + noise_std * make_rng(streams[_S_PILOT]).standard_normal((size, k))

        data = mu + np.sqrt(var) * make_rng(streams[_S_DATA]).standard_normal((size, n))
        dbar = np.einsum("snk,sn->sk", g, data)
        if noise_std > 0.0:
            dbar = dbar + noise_std * make_rng(streams[_S_FLYOVER]).standard_normal((size, k))
        dstar = (data**v) @ w
        dbar_sum = dbar.sum(axis=1)
        ok = np.all(alpha > 0.0, axis=1)

        if keep_aggregates:
            agg_sum[lo:hi] = dbar_sum
            agg_target[lo:hi] = dstar

        for (kind, value), out in zip(resolved, outcomes):
            if kind == "scalar":
                dh = value * dbar_sum
            elif kind == "vector":
                dh = dbar @ value
            elif kind == "heuristic":
                with np.errstate(divide="ignore", invalid="ignore"):
                    den = k * (alpha / n) * sum_var + n * config.noise_var / alpha
                    beta = np.where(ok[:, None], cross / den, 0.0)
                dh = np.einsum("sk,sk->s", beta, dbar)
                out.accept[lo:hi] = ok
            elif kind == "heuristic-equal":
                total = alpha.sum(axis=1)
                with np.errstate(divide="ignore", invalid="ignore"):
                    den = (total / n) * sum_var + n * (k * config.noise_var) / total
                    b = np.where(ok, cross / den, 0.0)
                dh = b * dbar_sum
                out.accept[lo:hi] = ok
            else:  # oracle: scored after all chunks
                continue
            out.sqerr[lo:hi] = (dh - dstar) ** 2

    oracle_result = None
    if wants_oracle:
        center = beta_equal_optimal(tspec, _stats(), mu, var, config.noise_var)
        record = []

        def objective(b):
            val = float(np.mean((b * agg_sum - agg_target) ** 2))
            record.append((b, val))
            return val

        best_beta, best_mse = beta_grid_oracle(objective, center)
        grid = np.array([b for b, _ in record])
        values = np.array([val for _, val in record])
        oracle_result = GridOracleResult(
            beta=best_beta, mse=best_mse, center=center, grid=grid, values=values
        )
        for (kind, _), out in zip(resolved, outcomes):
            if kind == "oracle":
                out.sqerr[:] = (best_beta * agg_sum - agg_target) ** 2

    if want_aggregates:
        return outcomes, (agg_sum, agg_target), oracle_result
    return outcomes


def _check_len(beta: np.ndarray, k: int) -> np.ndarray:
    if beta.shape != (k,):
        raise ValueError(f"fixed beta must have {k} entries, got shape {beta.shape}")
    return beta.astype(np.float64)


def _summarize(out: _CellOutcome, policy) -> PolicyEstimate:
    used = int(out.accept.sum())
    rejected = out.accept.size - used
    if used == 0:
        raise EstimationError("every trial was rejected (non-positive pilot measurements)")
    vals = out.sqerr[out.accept]
    mean = float(vals.mean())
    std_err = float(vals.std(ddof=1) / math.sqrt(used)) if used > 1 else math.nan
    return PolicyEstimate(
        policy=_policy_label(policy),
        mse=mean,
        std_err=std_err,
        trials_used=used,
        trials_rejected=rejected,
    )


def run_trial(config: ExperimentConfig, policy, trial_seed: int) -> float:
    """One protocol round through the composable API; returns the squared error.

    Deterministic in ``(config, policy, trial_seed)``.  Raises
    :class:`~aircomp.estimator.SamplingRejectedError` when a pilot-using
    policy sees a non-positive measurement.  The ``grid-oracle`` policy
    needs a batch of trials and is rejected here.
    """
    tspec = build_target(config.target, config.n)
    params = ChannelParams(g0=config.g0, tx_power_w=config.p_watts)
    traj = plan_diameter_trajectory(config.k, config.r_cov, config.h)
    streams = spawn_seeds(trial_seed, 4)

    if config.redeploy_per_trial:
        sensors = deploy_sensors(
            config.n, config.r_cov, config.zeta, config.data_mean, config.data_var,
            seed=streams[_S_POSITIONS],
        )
    else:
        sensors = fixed_deployment(config)
    gains = effective_gain_matrix(sensors, traj, params)
    pilots = sampling_phase(gains, config.noise_var, streams[_S_PILOT])
    data = draw_sensor_data(sensors, streams[_S_DATA])
    aggregates = computation_phase(gains, data, config.noise_var, streams[_S_FLYOVER])

    beta = _resolve_single(policy, config, tspec, traj, params, pilots)
    err = estimate(aggregates, beta) - target_value(tspec, data)
    return err * err


def _resolve_single(policy, config, tspec, traj, params, pilots) -> BetaVector:
    k = config.k
    if isinstance(policy, BetaVector):
        _check_len(policy.beta, k)
        return policy
    if isinstance(policy, np.ndarray):
        return BetaVector(_check_len(np.asarray(policy, float), k))
    if isinstance(policy, (int, float)) and not isinstance(policy, bool):
        return BetaVector(np.full(k, float(policy)))
    if policy == "zero":
        return BetaVector(np.zeros(k))
    if policy == "benchmark":
        return beta_benchmark(traj, params, config.zeta, config.n)
    if policy == "optimal-equal":
        stats = gain_statistics(traj, config.r_cov, params, config.zeta)
        b = beta_equal_optimal(tspec, stats, config.data_mean, config.data_var, config.noise_var)
        return BetaVector(np.full(k, b))
    if policy == "heuristic":
        return beta_heuristic(
            pilots, tspec, config.data_mean, config.data_var, config.noise_var, config.n
        )
    if policy == "heuristic-equal":
        b = beta_heuristic_equal(
            pilots, tspec, config.data_mean, config.data_var, config.noise_var, config.n
        )
        return BetaVector(np.full(k, b))
    if policy == "grid-oracle":
        raise ValueError("grid-oracle needs a trial batch; use estimate_mse or grid_oracle")
    raise ValueError(f"unknown policy {policy!r}; choose from {POLICY_NAMES}")


def estimate_mse(config: ExperimentConfig, policy) -> PolicyEstimate:
    """Monte Carlo MSE of one policy over ``config.trials`` rounds.

    Trials whose pilot flyover produced a non-positive measurement are
    excluded and counted for pilot-using policies.  Raises
    :class:`EstimationError` if nothing survives.
    """
    tspec = build_target(config.target, config.n)
    [outcome] = _evaluate_cell(config, tspec, [policy])
    return _summarize(outcome, policy)


def compare_policies(config: ExperimentConfig, policy_a, policy_b) -> GapEstimate:
    """Paired dB gap ``10*log10(mse_a / mse_b)`` on common random numbers.

    Only trials accepted by both policies enter, and the standard error
    accounts for the covariance the shared randomness induces.
    """
    tspec = build_target(config.target, config.n)
    out_a, out_b = _evaluate_cell(config, tspec, [policy_a, policy_b])
    joint = out_a.accept & out_b.accept
    used = int(joint.sum())
    if used < 2:
        raise EstimationError("not enough jointly accepted trials to compare")
    va = out_a.sqerr[joint]
    vb = out_b.sqerr[joint]
    ma, mb = float(va.mean()), float(vb.mean())
    if ma <= 0.0 or mb <= 0.0:
        raise EstimationError("degenerate comparison: a policy has zero Monte Carlo MSE")
    cov = np.cov(va, vb, ddof=1)
    var_log = (cov[0, 0] / ma**2 + cov[1, 1] / mb**2 - 2.0 * cov[0, 1] / (ma * mb)) / used
    gap_db = 10.0 * math.log10(ma / mb)
    std_err_db = (10.0 / math.log(10.0)) * math.sqrt(max(var_log, 0.0))
    return GapEstimate(
        policy_a=_policy_label(policy_a),
        policy_b=_policy_label(policy_b),
        gap_db=gap_db,
        std_err_db=std_err_db,
        trials_used=used,
    )


def sweep(config: ExperimentConfig, axis: str, values, targets=None) -> ExperimentResult:
    """Run every (axis value, target, policy) cell and tabulate the results.

    Args:
        config: base configuration; ``axis`` overrides one of its fields.
        axis: ``"k"`` (stop count) or ``"n"`` (sensor count).
        values: strictly ascending positive integers for the axis.
        targets: target selectors (defaults to ``[config.target]``).

    A failing cell is recorded with NaN statistics and zero trials
    instead of aborting the sweep.
    """
    axis = axis.lower()
    if axis not in ("k", "n"):
        raise ValueError(f"axis must be 'k' or 'n', got {axis!r}")
    vals = [int(v) for v in values]
    if not vals or any(v < 1 for v in vals) or any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError("axis values must be strictly ascending positive integers")
    if targets is None:
        targets = [config.target]

    rows: list[SweepRow] = []
    for value in vals:
        cell_cfg = replace(config, **{axis: value})
        for target in targets:
            label = target if isinstance(target, str) else "custom"
            try:
                tspec = build_target(target, cell_cfg.n)
                reference = target_second_moment(tspec, cell_cfg.data_mean, cell_cfg.data_var)
                outcomes = _evaluate_cell(cell_cfg, tspec, list(config.policies))
                for policy, outcome in zip(config.policies, outcomes):
                    est = _summarize(outcome, policy)
                    rows.append(
                        SweepRow(
                            axis_value=value,
                            target=label,
                            policy=est.policy,
                            mse=est.mse,
                            std_err=est.std_err,
                            mse_db=to_db(est.mse, reference),
                            trials_used=est.trials_used,
                        )
                    )
            except (ValueError, RuntimeError, ArithmeticError):
                for policy in config.policies:
                    rows.append(
                        SweepRow(
                            axis_value=value,
                            target=label,
                            policy=_policy_label(policy),
                            mse=math.nan,
                            std_err=math.nan,
                            mse_db=math.nan,
                            trials_used=0,
                        )
                    )
    return ExperimentResult(axis=axis, rows=tuple(rows))


def grid_oracle(config: ExperimentConfig, resolution: int = 64, span: float = 100.0) -> GridOracleResult:
    """Equal-coefficient grid search on one simulated cell.

    The grid is centered on the closed-form coefficient and every grid
    point is scored on the same batch of trials, so the minimizer is
    directly comparable with the closed-form policies.
    """
    tspec = build_target(config.target, config.n)
    _, (agg_sum, agg_target), _ = _evaluate_cell(config, tspec, [], want_aggregates=True)
    params = ChannelParams(g0=config.g0, tx_power_w=config.p_watts)
    traj = plan_diameter_trajectory(config.k, config.r_cov, config.h)
    stats = gain_statistics(traj, config.r_cov, params, config.zeta)
    center = beta_equal_optimal(tspec, stats, config.data_mean, config.data_var, config.noise_var)

    record = []

    def objective(b):
        val = float(np.mean((b * agg_sum - agg_target) ** 2))
        record.append((b, val))
        return val

    best_beta, best_mse = beta_grid_oracle(objective, center, resolution=resolution, span=span)
    return GridOracleResult(
        beta=best_beta,
        mse=best_mse,
        center=center,
        grid=np.array([b for b, _ in record]),
        values=np.array([val for _, val in record]),
    )
