"""Scenario runners: steady states, balance sweeps, time evolution, maps.

Each runner takes a resolved :class:`~srmot.config.ScenarioConfig` and
returns a :class:`~srmot.tables.ResultTable` whose metadata embeds the
full configuration, making every table replayable from its own file.
Per-point solver failures never abort a sweep; the failed row keeps NaN
data, raises its error flag, and the message is recorded in the
metadata (``cell_errors``).

The fluorescence map fans its independent grid cells out over worker
processes when ``jobs > 1``; cells are pure functions of their
parameters, so the results are bitwise identical to a serial run.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__ as _version
from .bloch import (BlochState, DriveParams, build_liouvillian, evolve,
                    steady_state)
from .config import ScenarioConfig, axis_values
from .external import (map_cell, mot_potential, optimal_detuning,
                       optimal_gradient, trap_depth)
from .hybrid import SubsystemPopulations, hybrid_evolve, hybrid_steady_state
from .tables import ResultTable, timestamp_metadata

TWO_PI = 2.0 * math.pi

_POP_COLUMNS = ("n11", "n22", "n33", "n44", "n55", "n66")


class SweepError(ValueError):
    """Raised for invalid runner arguments (not per-point failures)."""


class CalibrationError(ValueError):
    """Raised when a fluorescence calibration is impossible."""


@dataclass(frozen=True)
class Calibration:
    """Detector calibration factors, counts per emitted photon."""

    alpha_blue: float
    alpha_green: float

    def __post_init__(self):
        if not self.alpha_blue > 0.0 or not self.alpha_green > 0.0:
            raise CalibrationError("calibration factors must be positive")


def calibrate(atom_number: float, excited_fraction: float, gamma: float,
              measured_fluorescence: float) -> float:
    """Calibration factor alpha = counts / (Gamma N rho_excited).

    Applying the fluorescence relation with this alpha reproduces the
    measured count rate exactly.
    """
    if atom_number <= 0.0 or gamma <= 0.0 or measured_fluorescence <= 0.0:
        raise CalibrationError("atom number, linewidth and count rate must be positive")
    if excited_fraction <= 0.0:
        raise CalibrationError("excited fraction must be positive (no emitted photons otherwise)")
    return measured_fluorescence / (gamma * atom_number * excited_fraction)


def _base_metadata(config: ScenarioConfig, scenario: str, **extra) -> dict:
    meta = {"scenario": scenario, "version": _version, "config": config.resolved}
    meta.update(extra)
    meta.update(timestamp_metadata())
    return meta


def _model_columns(model: str) -> list[str]:
    groups = {"full": ["full"], "hybrid": ["hybrid"], "both": ["full", "hybrid"]}
    if model not in groups:
        raise SweepError(f"model must be full, hybrid or both, got {model!r}")
    cols = []
    for g in groups[model]:
        cols += [f"{g}_{p}_atoms" for p in _POP_COLUMNS]
        cols += [f"{g}_n_blue_atoms", f"{g}_n_grrd_atoms", f"{g}_n_total_atoms"]
    return cols


def _full_values(state: BlochState) -> list[float]:
    vals = [float(state[f"n{k}{k}"].real) for k in range(1, 7)]
    return vals + [state.n_blue, state.n_grrd, state.total]


def _point_values(params, model: str) -> list[float]:
    values: list[float] = []
    if model in ("full", "both"):
        values += _full_values(steady_state(build_liouvillian(params)))
    if model in ("hybrid", "both"):
        values += _full_values(hybrid_steady_state(params).state)
    return values


def run_steady(config: ScenarioConfig, model: str = "both") -> ResultTable:
    """Single steady-state evaluation at the configured operating point."""
    columns = _model_columns(model) + ["error_flag_dimensionless"]
    rows = [_point_values(config.params, model) + [0.0]]
    return ResultTable(columns=columns, rows=rows,
                       metadata=_base_metadata(config, "steady", model=model))


def run_balance_sweep(config: ScenarioConfig, model: str = "both") -> ResultTable:
    """Steady states along the configured s56 or delta56 sweep.

    Emits the hybrid and full models side by side so balance curves can
    be compared point by point.
    """
    sweep = config.resolved["sweep"]
    variable = sweep["variable"]
    values = axis_values(sweep)
    axis_col = "s56_dimensionless" if variable == "s56" else "delta56_hz"
    columns = [axis_col] + _model_columns(model) + ["error_flag_dimensionless"]
    width = len(columns) - 2

    rows = []
    cell_errors = []
    for value in values:
        if variable == "s56":
            from .atomic import rabi_from_saturation
            red = DriveParams(omega=rabi_from_saturation(float(value),
                                                         config.constants.gamma_56),
                              delta=config.params.red.delta)
        else:
            red = DriveParams(omega=config.params.red.omega,
                              delta=TWO_PI * float(value))
        params = config.params.with_(red=red)
        try:
            rows.append([float(value)] + _point_values(params, model) + [0.0])
        except Exception as exc:
            cell_errors.append({"axis_value": float(value),
                                "message": f"{type(exc).__name__}: {exc}"})
            rows.append([float(value)] + [math.nan] * width + [1.0])
    meta = _base_metadata(config, "balance", model=model)
    if cell_errors:
        meta["cell_errors"] = cell_errors
    return ResultTable(columns=columns, rows=rows, metadata=meta)


def run_time_evolution(config: ScenarioConfig, model: str = "both",
                       times=None) -> ResultTable:
    """Populations vs time for the full generator and the hybrid reduction.

    The full model starts with all atoms in the ground state
    (``initial.n11_atoms``); the hybrid model starts at the blue-pair
    equilibrium with the same total, its standard initial condition.
    """
    if times is None:
        times = axis_values(config.resolved["times"])
    times = np.asarray(times, dtype=float)
    n0 = float(config.resolved["initial"]["n11_atoms"])

    columns = ["time_s"] + _model_columns(model) + ["error_flag_dimensionless"]
    blocks: list[list[list[float]]] = []
    if model in ("full", "both"):
        states = evolve(build_liouvillian(config.params),
                        BlochState.from_populations(n11=n0), times)
        blocks.append([_full_values(s) for s in states])
    if model in ("hybrid", "both"):
        results = hybrid_evolve(config.params,
                                SubsystemPopulations(n_blue=n0, n_grrd=0.0), times)
        blocks.append([_full_values(r.state) for r in results])

    rows = []
    for i, t in enumerate(times):
        row = [float(t)]
        for block in blocks:
            row += block[i]
        rows.append(row + [0.0])
    return ResultTable(columns=columns, rows=rows,
                       metadata=_base_metadata(config, "evolve", model=model))


# ---------------------------------------------------------------------------
# fluorescence map
# ---------------------------------------------------------------------------

def _map_cell_task(args):
    delta34, b_grad, params, beam_blue, beam_green, rates = args
    try:
        return map_cell(delta34, b_grad, params, beam_blue, beam_green, rates)
    except Exception as exc:
        return ("error", f"{type(exc).__name__}: {exc}")


def run_fluorescence_map(config: ScenarioConfig, jobs: int = 1,
                         green_config: str | None = None) -> ResultTable:
    """Long-format (delta34, b_grad) map of steady excited-state numbers.

    Each cell couples the loading and loss models into the hybrid
    steady state.  ``jobs`` workers split the independent cells; the
    assembled table is identical for any worker count.  The deepest-
    potential detuning for the green beam is emitted as a companion
    column, and the per-gradient maximum of n44 carries a ridge flag.
    """
    if jobs < 1:
        raise SweepError("jobs must be >= 1")
    params = config.map_params
    delta34 = TWO_PI * axis_values(config.resolved["map"]["delta34"])
    b_grad = axis_values(config.resolved["map"]["b_grad"])
    rates = config.external
    if green_config is not None:
        rates = type(rates).defaults(green_config,
                                     r_load0=rates.r_load0, db_blue=rates.db_blue,
                                     db_grrd=rates.db_grrd)
    emit_fractions = bool(config.resolved["map"]["emit_fractions"])

    tasks = [(float(d), float(b), params, config.beam_blue, config.beam_green, rates)
             for d in delta34 for b in b_grad]
    if jobs == 1:
        results = [_map_cell_task(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_map_cell_task, tasks, chunksize=chunk))

    nd, nb = len(delta34), len(b_grad)
    n44_grid = np.full((nd, nb), math.nan)
    for idx, res in enumerate(results):
        if res[0] != "error":
            n44_grid[idx // nb, idx % nb] = res[1]
    ridge_rows = {}
    for j in range(nb):
        col = n44_grid[:, j]
        if np.any(np.isfinite(col)):
            ridge_rows[j] = int(np.nanargmax(col))

    columns = ["delta34_hz", "b_grad_g_per_cm", "n22_atoms", "n44_atoms"]
    if emit_fractions:
        columns += ["rho22_dimensionless", "rho44_dimensionless"]
    columns += ["delta34_deepest_hz", "ridge_flag_dimensionless",
                "error_flag_dimensionless"]

    rows = []
    cell_errors = []
    for idx, res in enumerate(results):
        i, j = idx // nb, idx % nb
        d, b = float(delta34[i]), float(b_grad[j])
        deepest = optimal_detuning(config.beam_green, b) / TWO_PI
        ridge = 1.0 if ridge_rows.get(j) == i else 0.0
        if res[0] == "error":
            cell_errors.append({"delta34_hz": d / TWO_PI, "b_grad_g_per_cm": b,
                                "message": res[1]})
            data = [math.nan, math.nan] + ([math.nan, math.nan] if emit_fractions else [])
            rows.append([d / TWO_PI, b] + data + [deepest, 0.0, 1.0])
        else:
            n22, n44, rho22, rho44 = res
            data = [n22, n44] + ([rho22, rho44] if emit_fractions else [])
            rows.append([d / TWO_PI, b] + data + [deepest, ridge, 0.0])

    meta = _base_metadata(config, "map", green_config=rates.config)
    if cell_errors:
        meta["cell_errors"] = cell_errors
    return ResultTable(columns=columns, rows=rows, metadata=meta)


# ---------------------------------------------------------------------------
# potential report
# ---------------------------------------------------------------------------

def run_potential_report(config: ScenarioConfig) -> dict[str, ResultTable]:
    """Trap potentials and depths for the blue and green beam pairs.

    Returns two tables: ``profile`` (V(z) for both colors at the
    configured gradient) and ``depth`` (trap depth vs gradient, with
    the deepest-potential detuning per gradient as companion columns).
    The achievable optima (gradient at the configured detunings,
    detuning at the configured gradient) go into the metadata.
    """
    b0 = config.b_grad
    blue, green = config.beam_blue, config.beam_green
    z_count = int(config.resolved["potential"]["z_count"])
    z_max = 1.2 * max(blue.w, green.w)
    z = np.linspace(-z_max, z_max, z_count)

    def best_gradient(beam):
        # undefined for non-red detuning; reported as null in metadata
        return optimal_gradient(beam) if beam.delta < 0.0 else None

    profile = ResultTable(
        columns=["z_m", "v_blue_j", "v_green_j"],
        rows=[[float(zz), float(mot_potential(zz, blue, b0)),
               float(mot_potential(zz, green, b0))] for zz in z],
        metadata=_base_metadata(
            config, "potential_profile", b_grad_g_per_cm=b0,
            optimal_detuning_blue_hz=optimal_detuning(blue, b0) / TWO_PI,
            optimal_detuning_green_hz=optimal_detuning(green, b0) / TWO_PI,
            optimal_gradient_blue_g_per_cm=best_gradient(blue),
            optimal_gradient_green_g_per_cm=best_gradient(green)))

    grads = axis_values(config.resolved["potential"]["depth_b_grad"])
    depth_rows = []
    for b in grads:
        depth_rows.append([float(b), trap_depth(blue, float(b)),
                           trap_depth(green, float(b)),
                           optimal_detuning(blue, float(b)) / TWO_PI,
                           optimal_detuning(green, float(b)) / TWO_PI])
    depth = ResultTable(
        columns=["b_grad_g_per_cm", "depth_blue_j", "depth_green_j",
                 "delta_deepest_blue_hz", "delta_deepest_green_hz"],
        rows=depth_rows,
        metadata=_base_metadata(
            config, "potential_depth",
            optimal_gradient_blue_g_per_cm=best_gradient(blue),
            optimal_gradient_green_g_per_cm=best_gradient(green)))
    return {"profile": profile, "depth": depth}
