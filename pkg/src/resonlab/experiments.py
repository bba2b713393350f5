"""Experiment orchestration: single runs with drift metrics, parameter sweeps.

The drift report tracks the two long-time observables bounded by the
truncated-splitting theory: the Sobolev norm of the iterates and the
weighted per-mode action deviation
    sum_a max(1,|a|)^{2s} |I_a(z^n) - I_a(z^0)|,
evaluated at exactly the recorded instants of the emitted series.
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig, resolve_out_dir, with_parameter
from .integrators import MidpointDivergenceError, run
from .spectral import SpectralState, synthesize_initial
from .svgplot import emit_plot
from .tableio import csv_line, write_atomic


@dataclass
class DriftReport:
    max_action_drift: float
    max_sobolev: float
    n_reached: int
    epsilon: float              # initial Sobolev-s size

    def row(self):
        return [self.max_action_drift, self.max_sobolev, self.n_reached,
                self.epsilon]


class DriftTracker:
    """Accumulates the drift report along a run (used as an on_record hook)."""

    def __init__(self, state0: SpectralState, sobolev_s: float):
        self.s = sobolev_s
        self.weights = np.maximum(1.0, np.abs(state0.modes())).astype(float) ** (2.0 * sobolev_s)
        self.initial_actions = state0.signed_actions()
        self.epsilon = state0.sobolev_norm(sobolev_s)
        self.max_action_drift = 0.0
        self.max_sobolev = 0.0
        self.n_reached = 0

    def __call__(self, step_index, time, state):
        drift = float(np.sum(self.weights *
                             np.abs(state.signed_actions() - self.initial_actions)))
        self.max_action_drift = max(self.max_action_drift, drift)
        self.max_sobolev = max(self.max_sobolev, state.sobolev_norm(self.s))
        self.n_reached = max(self.n_reached, step_index)

    def report(self) -> DriftReport:
        return DriftReport(self.max_action_drift, self.max_sobolev,
                           self.n_reached, self.epsilon)


def _write_outputs(cfg: ExperimentConfig, series, final_state, out_dir):
    base = resolve_out_dir(out_dir)
    if cfg.output.csv:
        write_atomic(os.path.join(base, cfg.output.csv), series.to_csv())
    if cfg.output.svg:
        emit_plot(series, list(cfg.output.svg_modes),
                  os.path.join(base, cfg.output.svg))
    if cfg.output.state_csv and final_state is not None:
        write_atomic(os.path.join(base, cfg.output.state_csv),
                     final_state.to_csv())


def run_experiment(cfg: ExperimentConfig, out_dir=None):
    """Execute one configured run; returns (ActionSeries, DriftReport).

    Output files (series CSV, SVG plot, final-state CSV) are written
    atomically under the resolved output directory.  On midpoint divergence
    the partial series is flushed before the error propagates.
    """
    state0 = synthesize_initial(cfg.initial, cfg.grid_n)
    tracker = DriftTracker(state0, cfg.run.sobolev_s)
    final = {"state": None}

    def on_record(i, t, state):
        tracker(i, t, state)
        final["state"] = state

    try:
        series = run(state0, cfg.scheme_config(), cfg.n_steps(),
                     record_every=cfg.run.record_every,
                     sobolev_s=cfg.run.sobolev_s, on_record=on_record)
    except MidpointDivergenceError as err:
        if err.partial_series is not None:
            _write_outputs(cfg, err.partial_series, final["state"], out_dir)
        raise
    _write_outputs(cfg, series, final["state"], out_dir)
    return series, tracker.report()


@dataclass
class SweepRow:
    value: float
    report: DriftReport = None
    error: str = ""

    @property
    def failed(self):
        return bool(self.error)


SWEEP_PARAMETERS = ("h", "K", "epsilon")


def _sweep_one(args):
    cfg, parameter, value = args
    try:
        _, rep = run_experiment(with_parameter(cfg, parameter, value),
                                out_dir=None)
        return SweepRow(float(value), report=rep)
    except MidpointDivergenceError as err:
        return SweepRow(float(value), error=str(err))


def sweep(cfg: ExperimentConfig, parameter: str, values, jobs: int = 1):
    """One independent run per value; rows sorted by parameter value.

    Individual divergence failures are recorded per-row and the sweep
    continues.  Rows are order-independent: parallel execution returns the
    same table as serial.  Swept runs never write output files.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"sweep parameter must be one of {SWEEP_PARAMETERS}")
    values = [float(v) for v in values]
    if not values:
        raise ValueError("sweep needs at least one value")
    from dataclasses import replace
    from .config import OutputSection
    quiet = replace(cfg, output=OutputSection())
    tasks = [(quiet, parameter, v) for v in values]
    if jobs > 1:
        import multiprocessing
        with multiprocessing.get_context("spawn").Pool(jobs) as pool:
            rows = pool.map(_sweep_one, tasks)
    else:
        rows = [_sweep_one(t) for t in tasks]
    return sorted(rows, key=lambda r: r.value)


def sweep_to_csv(parameter, rows) -> str:
    lines = [f"{parameter},max_action_drift,max_sobolev,n_reached,epsilon,error"]
    for r in rows:
        if r.failed:
            lines.append(csv_line([r.value, "", "", "", "", r.error]))
        else:
            lines.append(csv_line([r.value] + r.report.row() + [""]))
    return "\n".join(lines) + "\n"
