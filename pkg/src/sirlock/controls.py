"""Control signals: evaluable maps (t, State) -> lockdown level L.

The integrator fast path recognizes the classes defined here (and the policy
feedback laws) by their kernel spec; any other callable with the same
signature is integrated through the pure-Python stepper.
"""

from __future__ import annotations

import csv
from typing import Iterable

import numpy as np

from . import _rk
from .params import EpidemicParams, State


class ConstantControl:
    """L(t) = level for all t."""

    def __init__(self, level: float):
        self.level = float(level)

    def __call__(self, t: float, state: State) -> float:
        return self.level

    def _kernel_spec(self, p: EpidemicParams) -> tuple[int, float]:
        return _rk.KIND_CONSTANT, self.level

    def __repr__(self):
        return f"ConstantControl({self.level})"


class PiecewiseConstantControl:
    """Piecewise-constant lockdown on [edges[0], edges[-1]].

    values[k] applies on [edges[k], edges[k+1]); outside the grid the control
    is released (L = 0), which is also how a finite-horizon control extends
    to an infinite-horizon evaluation.
    """

    def __init__(self, edges: Iterable[float], values: Iterable[float]):
        self.edges = np.asarray(list(edges), dtype=float)
        self.values = np.asarray(list(values), dtype=float)
        if self.edges.ndim != 1 or self.values.ndim != 1:
            raise ValueError("edges and values must be one-dimensional")
        if len(self.edges) != len(self.values) + 1:
            raise ValueError("need len(edges) == len(values) + 1")
        if not np.all(np.diff(self.edges) > 0.0):
            raise ValueError("edges must be strictly increasing")

    @staticmethod
    def uniform(t0: float, t1: float, values: Iterable[float]) -> "PiecewiseConstantControl":
        values = list(values)
        edges = np.linspace(t0, t1, len(values) + 1)
        return PiecewiseConstantControl(edges, values)

    def level_at(self, t: float) -> float:
        if t < self.edges[0] or t >= self.edges[-1]:
            return 0.0
        k = int(np.searchsorted(self.edges, t, side="right")) - 1
        return float(self.values[min(k, len(self.values) - 1)])

    def __call__(self, t: float, state: State) -> float:
        return self.level_at(t)

    def to_csv(self, path) -> None:
        """Write rows `t_start,t_end,L`, one per interval."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_start", "t_end", "L"])
            for k, v in enumerate(self.values):
                w.writerow(
                    [
                        format(self.edges[k], ".12g"),
                        format(self.edges[k + 1], ".12g"),
                        format(v, ".12g"),
                    ]
                )

    @staticmethod
    def from_csv(path) -> "PiecewiseConstantControl":
        starts: list[float] = []
        ends: list[float] = []
        values: list[float] = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                starts.append(float(row["t_start"]))
                ends.append(float(row["t_end"]))
                values.append(float(row["L"]))
        if not values:
            raise ValueError(f"{path}: no control intervals")
        edges = starts + [ends[-1]]
        for a, b in zip(ends[:-1], starts[1:]):
            if abs(a - b) > 1e-9 * max(1.0, abs(a)):
                raise ValueError(f"{path}: control intervals not contiguous at t={a}")
        return PiecewiseConstantControl(edges, values)

    def __repr__(self):
        return (
            f"PiecewiseConstantControl(n={len(self.values)}, "
            f"span=[{self.edges[0]:.6g}, {self.edges[-1]:.6g}])"
        )
