"""Piecewise-linear quench schedules for the two-ramp protocols.

A schedule is an ordered list of contiguous segments, each interpolating the
Hamiltonian parameters (g, J_x, J_y) linearly in time.  Builders are provided
for the round-trip, reversed round-trip, quarter-turn and one-way protocols;
``linear`` builds a single generic ramp.  Quench times follow the convention
that a ramp "at rate 1/tau" changes its driven parameter by 1 per tau time
units, and R = tau_q_prime / tau_q is the ratio of the two ramps.

Schedules carry the quantum-critical-point crossing times computed at
construction; the oscillation-period formulas depend on this crossing
structure, so having them attached helps diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Protocol defaults: "large enough" initial parameters.  g_i = 10 keeps the
# initial excitation below ~1e-40 for tau_q >= 1 and changes the final defect
# density by < 0.1% compared with doubling it.
DEFAULT_G_INITIAL = 10.0
DEFAULT_G_FINAL = 10.0
DEFAULT_JY_INITIAL = 10.0


@dataclass(frozen=True)
class Segment:
    """One linear ramp of (g, J_x, J_y) over [t_start, t_end]."""

    t_start: float
    t_end: float
    params_start: tuple
    params_end: tuple

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("segment must have t_end > t_start")

    @property
    def duration(self):
        return self.t_end - self.t_start

    def rates(self):
        """d/dt of (g, J_x, J_y) on this segment."""
        d = self.duration
        return tuple((e - s) / d for s, e in zip(self.params_start, self.params_end))

    def eval(self, t):
        x = (np.asarray(t, dtype=float) - self.t_start) / self.duration
        # convex form: exact at both endpoints
        return tuple(s * (1.0 - x) + e * x for s, e in zip(self.params_start, self.params_end))


@dataclass(frozen=True)
class Crossing:
    """A quantum-critical-point crossing: time, critical quasimomentum, label."""

    t: float
    q_c: float
    label: str


@dataclass(frozen=True)
class Schedule:
    """Contiguous piecewise-linear path of (g, J_x, J_y)."""

    segments: tuple
    kind: str
    labels: dict = field(default_factory=dict)
    crossings: tuple = ()

    def __post_init__(self):
        for a, b in zip(self.segments[:-1], self.segments[1:]):
            if a.t_end != b.t_start or a.params_end != b.params_start:
                raise ValueError("segments must be contiguous in time and parameters")

    @property
    def t_start(self):
        return self.segments[0].t_start

    @property
    def t_end(self):
        return self.segments[-1].t_end

    @property
    def tau_q(self):
        return self.labels.get("tau_q")

    @property
    def R(self):
        return self.labels.get("R")

    def eval(self, t):
        """(g, J_x, J_y) at time t; raises if t is outside the schedule span."""
        tarr = np.asarray(t, dtype=float)
        if np.any(tarr < self.t_start) or np.any(tarr > self.t_end):
            raise ValueError("t outside schedule span [%g, %g]" % (self.t_start, self.t_end))
        joints = np.array([s.t_start for s in self.segments[1:]])
        idx = np.searchsorted(joints, tarr, side="right")
        if tarr.ndim == 0:
            return self.segments[int(idx)].eval(tarr)
        out = np.empty((3,) + tarr.shape)
        for i, seg in enumerate(self.segments):
            m = idx == i
            if np.any(m):
                vals = seg.eval(tarr[m])
                for c in range(3):
                    out[c][m] = vals[c]
        return tuple(out)

    def params_at(self, t):
        """Schedule parameters at t as an (g, J_x, J_y) tuple of floats."""
        g, jx, jy = self.eval(float(t))
        return float(g), float(jx), float(jy)

    def to_dict(self):
        return {
            "kind": self.kind,
            "labels": dict(self.labels),
            "segments": [
                {
                    "t_start": s.t_start,
                    "t_end": s.t_end,
                    "params_start": list(s.params_start),
                    "params_end": list(s.params_end),
                }
                for s in self.segments
            ],
            "crossings": [
                {"t": c.t, "q_c": c.q_c, "label": c.label} for c in self.crossings
            ],
        }

    @staticmethod
    def from_dict(d):
        segs = tuple(
            Segment(s["t_start"], s["t_end"], tuple(s["params_start"]), tuple(s["params_end"]))
            for s in d["segments"]
        )
        cross = tuple(Crossing(c["t"], c["q_c"], c["label"]) for c in d.get("crossings", []))
        return Schedule(segments=segs, kind=d["kind"], labels=dict(d.get("labels", {})),
                        crossings=cross)


def evaluate(schedule, t):
    """Operation form of Schedule.eval."""
    return schedule.eval(t)


def _validated_positive(name, value):
    if not value > 0.0:
        raise ValueError("%s must be > 0, got %r" % (name, value))
    return float(value)


def round_trip(g_rt, tau_q, R=1.0, g_i=DEFAULT_G_INITIAL, g_f=DEFAULT_G_FINAL):
    """Round-trip quench: g ramps g_i -> g_rt (rate 1/tau_q, ending at t = 0),
    then g_rt -> g_f (rate 1/(R tau_q)).

    The turning point g_rt must lie in [0, 1]; g_rt = 1 is allowed and flags
    the schedule as a critical turn (both crossings coincide at t = 0).
    """
    tau_q = _validated_positive("tau_q", tau_q)
    R = _validated_positive("R", R)
    if not 0.0 <= g_rt <= 1.0:
        raise ValueError("g_rt must lie in [0, 1], got %r" % (g_rt,))
    if not (g_i > 1.0 and g_f > 1.0):
        raise ValueError("g_i and g_f must be > 1 (paramagnetic start/end)")
    tau_qp = R * tau_q
    seg1 = Segment(-(g_i - g_rt) * tau_q, 0.0, (g_i, 1.0, 0.0), (g_rt, 1.0, 0.0))
    seg2 = Segment(0.0, (g_f - g_rt) * tau_qp, (g_rt, 1.0, 0.0), (g_f, 1.0, 0.0))
    critical = g_rt == 1.0
    crossings = (
        Crossing(-(1.0 - g_rt) * tau_q, 0.0, "g=1 (ramp down)"),
        Crossing((1.0 - g_rt) * tau_qp, 0.0, "g=1 (ramp up)"),
    )
    labels = {"tau_q": tau_q, "tau_q_prime": tau_qp, "R": R, "g_rt": g_rt,
              "g_i": g_i, "g_f": g_f, "critical_turn": critical}
    return Schedule((seg1, seg2), "round_trip", labels, crossings)


def reversed_round_trip(g_rt, tau_q, R=1.0):
    """Reversed round-trip: g ramps 0 -> g_rt over (-g_rt tau_q, 0], then back to 0.

    Starts and ends in the classical Ising limit g = 0, where kinks along x
    count the excitations exactly; g_rt must exceed 1 so both ramps cross the
    critical point.
    """
    tau_q = _validated_positive("tau_q", tau_q)
    R = _validated_positive("R", R)
    if not g_rt > 1.0:
        raise ValueError("g_rt must be > 1 for the reversed protocol, got %r" % (g_rt,))
    tau_qp = R * tau_q
    seg1 = Segment(-g_rt * tau_q, 0.0, (0.0, 1.0, 0.0), (g_rt, 1.0, 0.0))
    seg2 = Segment(0.0, g_rt * tau_qp, (g_rt, 1.0, 0.0), (0.0, 1.0, 0.0))
    crossings = (
        Crossing(-(g_rt - 1.0) * tau_q, 0.0, "g=1 (ramp up)"),
        Crossing((g_rt - 1.0) * tau_qp, 0.0, "g=1 (ramp down)"),
    )
    labels = {"tau_q": tau_q, "tau_q_prime": tau_qp, "R": R, "g_rt": g_rt}
    return Schedule((seg1, seg2), "reversed_round_trip", labels, crossings)


def quarter_turn(g_qt, tau_q, R=1.0, jy_initial=DEFAULT_JY_INITIAL):
    """Quarter-turn quench on the XY chain.

    First J_y ramps jy_initial -> 0 at rate 1/tau_q with g fixed at g_qt, then
    g ramps g_qt -> 0 at rate 1/(R tau_q) with J_y = 0, ending in the
    classical Ising limit.
    """
    tau_q = _validated_positive("tau_q", tau_q)
    R = _validated_positive("R", R)
    if not g_qt > 1.0:
        raise ValueError("g_qt must be > 1, got %r" % (g_qt,))
    if not jy_initial > max(1.0, g_qt - 1.0):
        raise ValueError("jy_initial must start deep in the y-FM phase")
    tau_qp = R * tau_q
    seg1 = Segment(-jy_initial * tau_q, 0.0, (g_qt, 1.0, jy_initial), (g_qt, 1.0, 0.0))
    seg2 = Segment(0.0, g_qt * tau_qp, (g_qt, 1.0, 0.0), (0.0, 1.0, 0.0))
    crossings = [Crossing(-(g_qt - 1.0) * tau_q, 0.0, "g=Jx+Jy (Jy ramp)")]
    if g_qt < 2.0:
        crossings.append(Crossing(-tau_q, math.acos(g_qt / 2.0), "Jy=Jx boundary"))
    elif g_qt == 2.0:
        crossings.append(Crossing(-tau_q, 0.0, "tricritical point"))
    crossings.append(Crossing((g_qt - 1.0) * tau_qp, 0.0, "g=1 (g ramp)"))
    labels = {"tau_q": tau_q, "tau_q_prime": tau_qp, "R": R, "g_qt": g_qt,
              "jy_initial": jy_initial, "tricritical": g_qt == 2.0}
    return Schedule((seg1, seg2), "quarter_turn", labels, tuple(crossings))


def one_way(g_i, g_f, tau_q):
    """Single linear ramp of the transverse field, either direction."""
    tau_q = _validated_positive("tau_q", tau_q)
    if g_i == g_f:
        raise ValueError("one_way requires g_i != g_f")
    duration = abs(g_f - g_i) * tau_q
    seg = Segment(0.0, duration, (g_i, 1.0, 0.0), (g_f, 1.0, 0.0))
    crossings = ()
    if min(g_i, g_f) < 1.0 < max(g_i, g_f):
        tc = duration * (1.0 - g_i) / (g_f - g_i)
        crossings = (Crossing(tc, 0.0, "g=1"),)
    labels = {"tau_q": tau_q, "tau_q_prime": tau_q, "R": 1.0, "g_i": g_i, "g_f": g_f}
    return Schedule((seg,), "one_way", labels, crossings)


def linear(params_start, params_end, duration, t_start=0.0, tau_q=None, kind="linear"):
    """Generic single linear ramp of (g, J_x, J_y); plumbing for custom paths."""
    duration = _validated_positive("duration", duration)
    seg = Segment(t_start, t_start + duration, tuple(params_start), tuple(params_end))
    labels = {}
    if tau_q is not None:
        labels["tau_q"] = float(tau_q)
        labels["R"] = 1.0
    return Schedule((seg,), kind, labels, ())


def chain(schedule_a, schedule_b):
    """Concatenate two schedules (b shifted to start where a ends)."""
    shift = schedule_a.t_end - schedule_b.t_start
    segs = list(schedule_a.segments)
    for s in schedule_b.segments:
        segs.append(Segment(s.t_start + shift, s.t_end + shift, s.params_start, s.params_end))
    labels = dict(schedule_a.labels)
    labels.update({k: v for k, v in schedule_b.labels.items() if k not in labels})
    cross = schedule_a.crossings + tuple(
        Crossing(c.t + shift, c.q_c, c.label) for c in schedule_b.crossings
    )
    return Schedule(tuple(segs), schedule_a.kind + "+" + schedule_b.kind, labels, cross)
