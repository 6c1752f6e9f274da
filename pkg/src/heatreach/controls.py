"""Piecewise-constant boundary controls on a finite horizon."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidControl

FUSE_TOL = 1e-15


@dataclass(frozen=True)
class StepControl:
    """Control equal to ``levels[j]`` on ``(breakpoints[j], breakpoints[j+1])``.

    Breakpoints run from 0 to ``T`` inclusive and may repeat (empty pieces
    are legal and contribute nothing).  Instances are immutable.
    """

    breakpoints: np.ndarray
    levels: np.ndarray
    T: float

    def __post_init__(self):
        bp = np.array(self.breakpoints, dtype=float)
        lv = np.array(self.levels, dtype=float)
        T = float(self.T)
        if not T > 0:
            raise InvalidControl("horizon T must be positive")
        if bp.ndim != 1 or lv.ndim != 1:
            raise InvalidControl("breakpoints and levels must be 1-d")
        if lv.size < 1 or bp.size != lv.size + 1:
            raise InvalidControl("need len(breakpoints) == len(levels) + 1 >= 2")
        if not (np.all(np.isfinite(bp)) and np.all(np.isfinite(lv))):
            raise InvalidControl("breakpoints and levels must be finite")
        if np.any(np.diff(bp) < 0):
            raise InvalidControl("breakpoints must be sorted")
        if abs(bp[0]) > FUSE_TOL * max(1.0, T) or abs(bp[-1] - T) > 1e-12 * max(1.0, T):
            raise InvalidControl("breakpoints must start at 0 and end at T")
        bp[0], bp[-1] = 0.0, T
        bp.setflags(write=False)
        lv.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "T", T)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def constant(cls, value, T):
        return cls([0.0, T], [value], T)

    @classmethod
    def zero(cls, T):
        return cls.constant(0.0, T)

    @classmethod
    def from_pieces(cls, pieces, T):
        """Build from ``(a, b, level)`` triples; gaps are filled with zero."""
        events = sorted({0.0, float(T)} | {float(p[0]) for p in pieces} | {float(p[1]) for p in pieces})
        bp = np.array(events)
        if bp[0] < 0 or bp[-1] > T:
            raise InvalidControl("piece outside [0, T]")
        lv = np.zeros(bp.size - 1)
        mids = 0.5 * (bp[:-1] + bp[1:])
        for a, b, c in pieces:
            lv[(mids > a) & (mids < b)] += c
        return cls(bp, lv, T).canonical()

    @classmethod
    def from_dict(cls, data):
        """Parse the JSON control schema ``{"T", "breakpoints", "levels"}``."""
        try:
            T = float(data["T"])
            bp = [float(v) for v in data["breakpoints"]]
            lv = [float(v) for v in data["levels"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidControl(f"malformed control: {exc}") from exc
        return cls(bp, lv, T)

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidControl(f"control file is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self):
        return {"T": self.T, "breakpoints": self.breakpoints.tolist(), "levels": self.levels.tolist()}

    # -- queries --------------------------------------------------------------

    @property
    def linf_norm(self):
        widths = np.diff(self.breakpoints)
        active = self.levels[widths > 0]
        return float(np.max(np.abs(active))) if active.size else 0.0

    def pieces(self):
        """Iterate over non-empty ``(a, b, level)`` pieces."""
        for a, b, c in zip(self.breakpoints[:-1], self.breakpoints[1:], self.levels):
            if b > a:
                yield float(a), float(b), float(c)

    def __call__(self, t):
        """Value at ``t`` (right-continuous; the last piece also covers ``T``)."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        idx = np.clip(idx, 0, self.levels.size - 1)
        out = np.where((t < 0) | (t > self.T), 0.0, self.levels[idx])
        return out if out.ndim else float(out)

    # -- transformations ------------------------------------------------------

    def reverse(self):
        """The time-reversed control ``t -> u(T - t)``."""
        bp = self.T - self.breakpoints[::-1]
        return StepControl(bp, self.levels[::-1], self.T)

    def restrict(self, t):
        """The same control seen on the shorter horizon ``[0, t]``."""
        if not 0 < t <= self.T:
            raise InvalidControl("restriction time must lie in (0, T]")
        keep = self.breakpoints < t
        bp = np.append(self.breakpoints[keep], t)
        lv = self.levels[: bp.size - 1]
        return StepControl(bp, lv, t)

    def scaled(self, factor):
        return StepControl(self.breakpoints, factor * self.levels, self.T)

    def __mul__(self, factor):
        return self.scaled(float(factor))

    __rmul__ = __mul__

    def __neg__(self):
        return self.scaled(-1.0)

    def __add__(self, other):
        if not isinstance(other, StepControl):
            return NotImplemented
        if abs(other.T - self.T) > 1e-12 * max(1.0, self.T):
            raise InvalidControl("cannot add controls with different horizons")
        bp = _merge_breakpoints(self.breakpoints, other.breakpoints)
        mids = 0.5 * (bp[:-1] + bp[1:])
        return StepControl(bp, self(mids) + other(mids), self.T)

    def __sub__(self, other):
        return self + (-other)

    def canonical(self):
        """Drop empty pieces and merge neighbours with equal levels."""
        bp = [0.0]
        lv = []
        for a, b, c in self.pieces():
            if lv and lv[-1] == c:
                bp[-1] = b
            else:
                lv.append(c)
                bp.append(b)
        if not lv:
            return StepControl.zero(self.T)
        bp[-1] = self.T
        return StepControl(bp, lv, self.T)


def _merge_breakpoints(a, b):
    pts = np.sort(np.concatenate([a, b]))
    keep = np.concatenate([[True], np.diff(pts) > FUSE_TOL * max(1.0, pts[-1])])
    return pts[keep]


def superpose(controls, weights=None):
    """Weighted sum of controls on a common breakpoint refinement.

    Breakpoints closer than ``FUSE_TOL`` (relative) are fused.
    """
    controls = list(controls)
    if not controls:
        raise InvalidControl("nothing to superpose")
    if weights is None:
        weights = [1.0] * len(controls)
    T = controls[0].T
    bp = controls[0].breakpoints
    for c in controls[1:]:
        if abs(c.T - T) > 1e-12 * max(1.0, T):
            raise InvalidControl("cannot superpose controls with different horizons")
        bp = _merge_breakpoints(bp, c.breakpoints)
    mids = 0.5 * (bp[:-1] + bp[1:])
    levels = np.zeros(mids.size)
    for w, c in zip(weights, controls):
        levels += w * c(mids)
    return StepControl(bp, levels, T)
