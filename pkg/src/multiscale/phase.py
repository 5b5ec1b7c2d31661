"""Instantaneous wavelet phase, band reconstruction, phase differences and
phase-locking interval detection."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from .errors import (
    InvalidParameter,
    LengthMismatch,
    ScaleMismatch,
    ScaleOutOfRange,
)
from .signal_core import _FLOAT_FMT, TimeSeries
from .wavelet import (
    C_DELTA,
    PSI0_ZERO,
    MorletParams,
    ScaleGrid,
    Scalogram,
    _band_indices,
    cwt_morlet,
)

TWO_PI = 2.0 * np.pi


def wrap_phase(x) -> np.ndarray:
    """Wrap radians into (-pi, pi]."""
    w = np.mod(np.asarray(x, dtype=np.float64), TWO_PI)
    return np.where(w > np.pi, w - TWO_PI, w)


@dataclass(frozen=True)
class PhaseSeries:
    wrapped: np.ndarray
    unwrapped: np.ndarray
    scale: float
    coi_valid: np.ndarray
    dt: float = 1.0

    @property
    def n(self) -> int:
        return self.wrapped.size

    def to_csv(self) -> str:
        t = np.arange(self.n) * self.dt
        lines = [
            ",".join((_FLOAT_FMT % t[i], _FLOAT_FMT % self.wrapped[i],
                      _FLOAT_FMT % self.unwrapped[i], str(int(self.coi_valid[i]))))
            for i in range(self.n)
        ]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "scale": self.scale,
            "dt": self.dt,
            "wrapped": self.wrapped.tolist(),
            "unwrapped": self.unwrapped.tolist(),
            "coi_valid": [int(v) for v in self.coi_valid],
        })


@dataclass(frozen=True)
class PhaseDiffResult:
    delta: np.ndarray
    coi_valid: np.ndarray
    scale: float
    dt: float = 1.0
    locking_intervals: tuple = ()
    tolerance: float | None = None
    min_duration: int | None = None

    def to_json(self) -> str:
        return json.dumps({
            "scale": self.scale,
            "dt": self.dt,
            "tolerance": self.tolerance,
            "min_duration": self.min_duration,
            "locking_intervals": [list(iv) for iv in self.locking_intervals],
            "delta": self.delta.tolist(),
            "coi_valid": [int(v) for v in self.coi_valid],
        })


def phase_at_scale(ts: TimeSeries, scale: float,
                   params: MorletParams = MorletParams()) -> PhaseSeries:
    """Instantaneous phase of the complex Morlet coefficients at one scale."""
    if not 2.0 * ts.dt <= scale <= ts.n * ts.dt / 4.0:
        raise ScaleOutOfRange("scale must lie in [2*dt, N*dt/4]")
    grid = ScaleGrid(s0=scale, dj=0.125, J=1)
    sg = cwt_morlet(ts, grid=grid, params=params)
    row = sg.coeffs[0]
    wrapped = np.angle(row)
    unwrapped = np.unwrap(wrapped)
    coi_valid = scale <= sg.coi
    return PhaseSeries(wrapped=wrapped, unwrapped=unwrapped, scale=float(scale),
                       coi_valid=coi_valid, dt=ts.dt)


def reconstruct_band(sg: Scalogram, band: tuple[float, float]) -> TimeSeries:
    """Inverse wavelet sum restricted to a scale band."""
    sel = _band_indices(sg, band)
    terms = sg.coeffs[sel].real / np.sqrt(sg.scales[sel])[:, None]
    factor = sg.grid.dj * np.sqrt(sg.dt) / (C_DELTA * PSI0_ZERO)
    return TimeSeries(factor * terms.sum(axis=0), dt=sg.dt)


def phase_difference(a: PhaseSeries, b: PhaseSeries) -> PhaseDiffResult:
    """Wrapped pointwise phase difference a - b."""
    if a.n != b.n:
        raise LengthMismatch("phase series lengths differ")
    if not np.isclose(a.scale, b.scale):
        raise ScaleMismatch("phase series scales differ")
    delta = wrap_phase(a.wrapped - b.wrapped)
    return PhaseDiffResult(delta=delta, coi_valid=a.coi_valid & b.coi_valid,
                           scale=a.scale, dt=a.dt)


def locking_intervals(diff: PhaseDiffResult, tolerance: float = 0.5,
                      min_duration: int = 32) -> list[tuple[int, int]]:
    """Maximal runs where the phase difference stays locked.

    A sample is locked when the centered moving range (window =
    ``min_duration``) of the unwrapped difference stays within
    ``tolerance`` and the sample is inside both cones of influence. Runs
    shorter than ``min_duration`` are discarded. Intervals are half-open
    ``[start, end)`` sample index pairs.
    """
    if not 0.0 < tolerance < np.pi:
        raise InvalidParameter("tolerance must be in (0, pi)")
    if min_duration < 2:
        raise InvalidParameter("min_duration must be >= 2")
    u = np.unwrap(diff.delta)
    rng = (maximum_filter1d(u, size=min_duration, mode="nearest")
           - minimum_filter1d(u, size=min_duration, mode="nearest"))
    ok = (rng <= tolerance) & diff.coi_valid
    intervals = []
    start = None
    for i, flag in enumerate(ok):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start >= min_duration:
                intervals.append((start, i))
            start = None
    if start is not None and ok.size - start >= min_duration:
        intervals.append((start, ok.size))
    return intervals


def with_locking(diff: PhaseDiffResult, tolerance: float = 0.5,
                 min_duration: int = 32) -> PhaseDiffResult:
    """Copy of ``diff`` annotated with detected locking intervals."""
    ivs = locking_intervals(diff, tolerance=tolerance, min_duration=min_duration)
    return replace(diff, locking_intervals=tuple(ivs), tolerance=tolerance,
                   min_duration=min_duration)
