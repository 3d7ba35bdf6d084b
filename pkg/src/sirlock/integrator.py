"""Adaptive integration of the controlled epidemic and trajectory containers.

A Trajectory is a sequence of Segments, one per stretch of time governed by a
single control law. Keeping segments separate means every sample's lockdown
level is evaluated under the law that actually produced it, so quadrature
never smears a control discontinuity across a policy switch.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from . import _rk
from .errors import IntegrationError
from .model import reproduction_numbers
from .params import CostBreakdown, CostParams, EpidemicParams, State, state_on_simplex

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
# Cap on the step length, days. Keeps the sample grid dense enough that
# Simpson quadrature over the samples resolves the infection peak.
DEFAULT_MAX_STEP = 0.5
# Proxy for t = infinity: stop once i < REST_PREVALENCE with s past herd
# immunity, or after INFINITY_HORIZON_DAYS, whichever comes first.
REST_PREVALENCE = 1e-9
INFINITY_HORIZON_DAYS = 20 * 365.0


@dataclass(frozen=True)
class ThresholdEvent:
    """Stop integration when a state variable crosses a value.

    direction -1 fires on downward crossings only, +1 upward, 0 both.
    Crossings are strict: starting exactly on the threshold does not fire.
    """

    var: str
    value: float
    direction: int = 0

    def __post_init__(self):
        if self.var not in ("s", "i"):
            raise ValueError(f"event variable must be 's' or 'i', got {self.var!r}")
        if self.direction not in (-1, 0, 1):
            raise ValueError("event direction must be -1, 0 or +1")

    def _codes(self) -> tuple[int, float, int]:
        return (0 if self.var == "s" else 1), float(self.value), self.direction


_NO_EVENT = (-1, 0.0, 0)


class Segment:
    """Samples of one continuously-governed stretch: arrays ts, s, i, L."""

    __slots__ = ("ts", "s", "i", "L", "label")

    def __init__(self, ts, s, i, L, label: str = ""):
        self.ts = np.asarray(ts, dtype=float)
        self.s = np.asarray(s, dtype=float)
        self.i = np.asarray(i, dtype=float)
        self.L = np.asarray(L, dtype=float)
        self.label = label
        n = len(self.ts)
        if not (len(self.s) == len(self.i) == len(self.L) == n):
            raise ValueError("segment arrays must share a length")
        if n == 0:
            raise ValueError("empty segment")

    @property
    def r(self) -> np.ndarray:
        return 1.0 - self.s - self.i

    @property
    def t0(self) -> float:
        return float(self.ts[0])

    @property
    def t1(self) -> float:
        return float(self.ts[-1])

    def __len__(self):
        return len(self.ts)

    def __repr__(self):
        return (
            f"Segment({self.label or 'unlabeled'!s}, "
            f"[{self.t0:.6g}, {self.t1:.6g}], n={len(self)})"
        )


class Trajectory:
    """Piecewise solution of the controlled epidemic.

    Flattened views (.t, .s, .i, .r, .L) drop the duplicated first sample of
    each later segment, so they form a strictly increasing time grid; at a
    control switch the retained lockdown level is the outgoing law's.
    """

    def __init__(self, segments, params: EpidemicParams, stopped_at_event: bool = False):
        segments = tuple(segments)
        if not segments:
            raise ValueError("trajectory needs at least one segment")
        for a, b in zip(segments, segments[1:]):
            if not math.isclose(a.t1, b.t0, rel_tol=0.0, abs_tol=1e-9):
                raise ValueError(f"segments not contiguous: {a.t1} -> {b.t0}")
        self.segments = segments
        self.params = params
        self.stopped_at_event = stopped_at_event
        self._flat = None

    def _keep_masks(self):
        # Boolean mask per segment: all samples, minus later segments' first
        # sample when it repeats the handoff time.
        masks = []
        prev_end = None
        for seg in self.segments:
            m = np.ones(len(seg), dtype=bool)
            if prev_end is not None and seg.ts[0] <= prev_end:
                m[0] = False
            prev_end = seg.ts[-1]
            masks.append(m)
        return masks

    def _flatten(self):
        if self._flat is None:
            masks = self._keep_masks()
            cols = []
            for name in ("ts", "s", "i", "L"):
                cols.append(
                    np.concatenate(
                        [getattr(seg, name)[m] for seg, m in zip(self.segments, masks)]
                    )
                )
            self._flat = tuple(cols)
        return self._flat

    @property
    def t(self) -> np.ndarray:
        return self._flatten()[0]

    @property
    def s(self) -> np.ndarray:
        return self._flatten()[1]

    @property
    def i(self) -> np.ndarray:
        return self._flatten()[2]

    @property
    def r(self) -> np.ndarray:
        return 1.0 - self.s - self.i

    @property
    def L(self) -> np.ndarray:
        return self._flatten()[3]

    @property
    def t0(self) -> float:
        return self.segments[0].t0

    @property
    def t1(self) -> float:
        return self.segments[-1].t1

    @property
    def duration(self) -> float:
        return self.t1 - self.t0

    @property
    def final_state(self) -> State:
        seg = self.segments[-1]
        return state_on_simplex(seg.t1, float(seg.s[-1]), float(seg.i[-1]))

    @property
    def initial_state(self) -> State:
        seg = self.segments[0]
        return state_on_simplex(seg.t0, float(seg.s[0]), float(seg.i[0]))

    @property
    def min_s(self) -> float:
        return min(float(seg.s.min()) for seg in self.segments)

    @property
    def peak_i(self) -> float:
        return max(float(seg.i.max()) for seg in self.segments)

    @property
    def peak_time(self) -> float:
        best_t, best_i = self.t0, -1.0
        for seg in self.segments:
            k = int(np.argmax(seg.i))
            if seg.i[k] > best_i:
                best_i = float(seg.i[k])
                best_t = float(seg.ts[k])
        return best_t

    def state_at_end_of(self, label: str) -> State:
        for seg in reversed(self.segments):
            if seg.label == label:
                return state_on_simplex(seg.t1, float(seg.s[-1]), float(seg.i[-1]))
        raise KeyError(f"no segment labeled {label!r}")

    @staticmethod
    def concat(trajectories) -> "Trajectory":
        trajectories = list(trajectories)
        if not trajectories:
            raise ValueError("nothing to concatenate")
        segs = []
        for traj in trajectories:
            segs.extend(traj.segments)
        return Trajectory(
            segs, trajectories[0].params, stopped_at_event=trajectories[-1].stopped_at_event
        )

    def to_csv(self, path, cost: CostParams) -> None:
        trajectory_to_csv(self, path, cost)

    def __repr__(self):
        return (
            f"Trajectory([{self.t0:.6g}, {self.t1:.6g}] days, "
            f"{len(self.segments)} segment(s))"
        )


def _cumulative_integral(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = len(x)
    if n == 1:
        return np.zeros(1)
    if n == 2:
        return np.array([0.0, 0.5 * (y[0] + y[1]) * (x[1] - x[0])])
    return cumulative_simpson(y, x=x, initial=0.0)


def _segment_cost_integrals(seg: Segment, c: CostParams):
    """Cumulative (economic, linear, quadratic, deaths) along one segment."""
    econ = _cumulative_integral(seg.ts, seg.L)
    lin = c.kappa * c.gamma0 * _cumulative_integral(seg.ts, seg.i)
    quad = c.kappa * c.gamma1 * _cumulative_integral(seg.ts, seg.i**2)
    deaths = _cumulative_integral(seg.ts, (c.gamma0 + c.gamma1 * seg.i) * seg.i)
    return econ, lin, quad, deaths


def trajectory_cost(traj: Trajectory, c: CostParams) -> CostBreakdown:
    """Quadrature of the running cost over a trajectory's sample grid.

    Integrates segment by segment so jumps in L at policy switches cost
    exactly what each side's law says; Simpson within segments.
    """
    econ = lin = quad = deaths = 0.0
    for seg in traj.segments:
        e, li, q, d = _segment_cost_integrals(seg, c)
        econ += float(e[-1])
        lin += float(li[-1])
        quad += float(q[-1])
        deaths += float(d[-1])
    return CostBreakdown(econ, lin, quad, deaths)


def trajectory_to_csv(traj: Trajectory, path, cost: CostParams) -> None:
    """Write samples as rows `t,s,i,r,L,R,R_L,cost_cum` (12 significant digits)."""
    p = traj.params
    masks = traj._keep_masks()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "s", "i", "r", "L", "R", "R_L", "cost_cum"])
        offset = 0.0
        for seg, m in zip(traj.segments, masks):
            e, li, q, _ = _segment_cost_integrals(seg, cost)
            run = offset + e + li + q
            for k in range(len(seg)):
                if not m[k]:
                    continue
                st = state_on_simplex(float(seg.ts[k]), float(seg.s[k]), float(seg.i[k]))
                R, R_L = reproduction_numbers(st, float(seg.L[k]), p)
                w.writerow(
                    [
                        format(v, ".12g")
                        for v in (
                            seg.ts[k],
                            seg.s[k],
                            seg.i[k],
                            st.r,
                            seg.L[k],
                            R,
                            R_L,
                            run[k],
                        )
                    ]
                )
            offset = float(run[-1])


def _run_kernel(kind, c0, p, t0, s0, i0, t_end, rtol, atol, max_step, ev):
    ts, ss, ii, LL, status = _rk.dp45_segment(
        kind,
        c0,
        p.beta,
        p.gamma,
        p.theta,
        p.l_max,
        t0,
        s0,
        i0,
        t_end,
        rtol,
        atol,
        max_step,
        *ev,
    )
    if status == _rk.STATUS_UNDERFLOW:
        raise IntegrationError("step size underflow", t=float(ts[-1]))
    return ts, ss, ii, LL, status == _rk.STATUS_EVENT


def _run_python(control, p, t0, s0, i0, t_end, rtol, atol, max_step, ev):
    def fn(t, s, i):
        return control(t, state_on_simplex(t, s, i))

    ts, ss, ii, LL, status = _rk.dp45_segment_py(
        fn, p.beta, p.gamma, p.theta, p.l_max, t0, s0, i0, t_end, rtol, atol, max_step, *ev
    )
    if status == _rk.STATUS_UNDERFLOW:
        raise IntegrationError("step size underflow", t=float(ts[-1]))
    return ts, ss, ii, LL, status == _rk.STATUS_EVENT


def integrate(
    p: EpidemicParams,
    control,
    init: State,
    t_end: float,
    tol: float = DEFAULT_RTOL,
    *,
    atol: float = DEFAULT_ATOL,
    max_step: float = DEFAULT_MAX_STEP,
    label: str = "",
    event: ThresholdEvent | None = None,
) -> Trajectory:
    """Integrate the controlled dynamics from init to t_end.

    control is any callable (t, State) -> L; the constant, piecewise-constant
    and built-in feedback laws run in the compiled kernel, everything else in
    the Python stepper. Stops early when `event` fires (the trajectory then
    ends at the located crossing and stopped_at_event is True).
    """
    if not t_end > init.t:
        raise ValueError(f"t_end must exceed init.t ({t_end} <= {init.t})")
    ev = event._codes() if event is not None else _NO_EVENT

    from .controls import PiecewiseConstantControl

    spec = getattr(control, "_kernel_spec", None)
    if spec is not None:
        kind, c0 = spec(p)
        ts, ss, ii, LL, fired = _run_kernel(
            kind, c0, p, init.t, init.s, init.i, t_end, tol, atol, max_step, ev
        )
        return Trajectory([Segment(ts, ss, ii, LL, label)], p, stopped_at_event=fired)

    if isinstance(control, PiecewiseConstantControl):
        knots = [init.t]
        knots += [float(e) for e in control.edges if init.t < e < t_end]
        knots.append(t_end)
        segs = []
        cur_t, cur_s, cur_i = init.t, init.s, init.i
        fired = False
        for a, b in zip(knots[:-1], knots[1:]):
            if b - cur_t <= 0.0:
                continue
            level = control.level_at(0.5 * (a + b))
            ts, ss, ii, LL, fired = _run_kernel(
                _rk.KIND_CONSTANT, level, p, cur_t, cur_s, cur_i, b, tol, atol, max_step, ev
            )
            if len(ts) > 1 or not segs:
                segs.append(Segment(ts, ss, ii, LL, label))
            cur_t, cur_s, cur_i = float(ts[-1]), float(ss[-1]), float(ii[-1])
            if fired:
                break
        return Trajectory(segs, p, stopped_at_event=fired)

    if callable(control):
        ts, ss, ii, LL, fired = _run_python(
            control, p, init.t, init.s, init.i, t_end, tol, atol, max_step, ev
        )
        return Trajectory([Segment(ts, ss, ii, LL, label)], p, stopped_at_event=fired)

    raise TypeError(f"control must be callable, got {type(control).__name__}")


def integrate_to_rest(
    p: EpidemicParams,
    control,
    init: State,
    tol: float = DEFAULT_RTOL,
    *,
    max_step: float = DEFAULT_MAX_STEP,
    horizon: float = INFINITY_HORIZON_DAYS,
    rest_prevalence: float = REST_PREVALENCE,
    label: str = "",
) -> Trajectory:
    """Integrate until the epidemic is effectively over.

    Runs until i drops below rest_prevalence with s past the herd-immunity
    threshold (so no rebound is possible), or until init.t + horizon as a
    hard cap. Stands in for an infinite-horizon integration.
    """
    thr = p.herd_immunity_threshold
    ev = ThresholdEvent("i", rest_prevalence, -1)
    t_cap = init.t + horizon
    pieces = []
    cur = init
    while True:
        traj = integrate(
            p, control, cur, t_cap, tol, max_step=max_step, label=label, event=ev
        )
        pieces.append(traj)
        cur = traj.final_state
        if not traj.stopped_at_event:
            break
        if cur.s < thr or cur.t >= t_cap - 1e-9:
            break
    return pieces[0] if len(pieces) == 1 else Trajectory.concat(pieces)
