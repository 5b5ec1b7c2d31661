"""Rescaled-range Hurst estimation and multifractal detrended fluctuation
analysis with polynomial or Daubechies-wavelet detrending."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dwt import boundary_margin, dwt as _dwt_decompose, idwt as _dwt_invert, zero_details
from .errors import (
    DegenerateWindow,
    InvalidParameter,
    NonPositiveVariance,
    TooFewScales,
    TooShort,
)
from .signal_core import _FLOAT_FMT, TimeSeries
from .spectral import _ols


@dataclass(frozen=True)
class RSResult:
    window_sizes: np.ndarray
    rs_values: np.ndarray
    hurst: float
    stderr: float

    def to_json(self) -> str:
        return json.dumps({
            "hurst": self.hurst,
            "stderr": self.stderr,
            "window_sizes": self.window_sizes.tolist(),
            "rs_values": self.rs_values.tolist(),
        })

    def to_csv(self) -> str:
        lines = [
            str(int(n)) + "," + (_FLOAT_FMT % v)
            for n, v in zip(self.window_sizes, self.rs_values)
        ]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class WaveletDetrend:
    """MFDFA detrending choice: subtract a Daubechies wavelet trend.

    ``level=None`` picks the decomposition level per analysis scale s as
    floor(log2(s)) so the removed trend band tracks the segment size; a
    fixed level removes one global trend band (fluctuations saturate for
    segments larger than that band).
    """

    order: int
    level: int | None = None


@dataclass(frozen=True)
class MFDFAResult:
    scales: np.ndarray
    q_values: np.ndarray
    Fq: np.ndarray  # (len(scales), len(q_values))
    hq: np.ndarray
    tau: np.ndarray
    alpha_sing: np.ndarray
    f_alpha: np.ndarray

    def h(self, q: float) -> float:
        idx = np.nonzero(np.isclose(self.q_values, q))[0]
        if idx.size == 0:
            raise InvalidParameter(f"q={q} not among the computed moments")
        return float(self.hq[idx[0]])

    def to_json(self) -> str:
        return json.dumps({
            "scales": self.scales.tolist(),
            "q_values": self.q_values.tolist(),
            "Fq": self.Fq.tolist(),
            "hq": self.hq.tolist(),
            "tau": self.tau.tolist(),
            "alpha_sing": self.alpha_sing.tolist(),
            "f_alpha": self.f_alpha.tolist(),
        })

    def to_csv(self) -> str:
        """Long format: scale,q,Fq."""
        lines = []
        for i, s in enumerate(self.scales):
            for j, q in enumerate(self.q_values):
                lines.append(str(int(s)) + "," + (_FLOAT_FMT % q) + ","
                             + (_FLOAT_FMT % self.Fq[i, j]))
        return "\n".join(lines) + "\n"


def rescaled_range(ts: TimeSeries, window_sizes) -> RSResult:
    """Classical R/S estimator over disjoint windows.

    Per window: range of the mean-adjusted cumulative deviations divided
    by the population standard deviation; averaged over windows, then the
    Hurst exponent is the log-log OLS slope against window size.
    """
    sizes = np.asarray(sorted(set(int(w) for w in window_sizes)), dtype=int)
    if sizes.size < 4:
        raise TooFewScales("need >= 4 window sizes")
    if sizes[0] < 8:
        raise InvalidParameter("window sizes must be >= 8")
    x = ts.samples
    if sizes[-1] > x.size // 2:
        raise InvalidParameter("max window exceeds half the series length")

    rs = np.empty(sizes.size)
    for i, w in enumerate(sizes):
        nseg = x.size // w
        seg = x[: nseg * w].reshape(nseg, w)
        dev = seg - seg.mean(axis=1, keepdims=True)
        cum = np.cumsum(dev, axis=1)
        r = cum.max(axis=1) - cum.min(axis=1)
        s = seg.std(axis=1)
        if np.any(s == 0):
            raise DegenerateWindow(f"zero std in a window of size {w}")
        rs[i] = np.mean(r / s)

    slope, _, stderr, _ = _ols(np.log(sizes.astype(float)), np.log(rs))
    return RSResult(window_sizes=sizes, rs_values=rs, hurst=slope, stderr=stderr)


def wavelet_detrend(ts: TimeSeries, wavelet_order: int, level: int) -> TimeSeries:
    """Subtract the level-`level` Daubechies approximation trend.

    The outer ``boundary_margin(order, level)`` samples per edge are kept
    but carry boundary artifacts; variance-based consumers exclude them.
    """
    if level < 1:
        raise InvalidParameter("level must be >= 1")
    coeffs = _dwt_decompose(ts, wavelet_order, level, mode="symmetric")
    trend = _dwt_invert(zero_details(coeffs))
    return ts.with_samples(ts.samples - trend.samples)


def detrend_margin(wavelet_order: int, level: int) -> int:
    return boundary_margin(wavelet_order, level)


def _segment_variances_poly(x: np.ndarray, scale: int, order: int) -> np.ndarray:
    """Detrended variance per segment, forward and reverse segmentations."""
    n = x.size
    nseg = n // scale
    t = np.arange(scale, dtype=np.float64)
    design = np.vander(t, order + 1, increasing=True)
    # residual projector applied from the right: res = seg - seg @ hat.T
    hat = design @ np.linalg.pinv(design)
    fwd = x[: nseg * scale].reshape(nseg, scale)
    rev = x[n - nseg * scale :].reshape(nseg, scale)
    out = np.empty(2 * nseg)
    for k, seg in enumerate((fwd, rev)):
        res = seg - seg @ hat.T
        out[k * nseg : (k + 1) * nseg] = np.mean(res * res, axis=1)
    return out


def _segment_variances_plain(x: np.ndarray, scale: int) -> np.ndarray:
    """Mean squared value per segment (signal already detrended)."""
    n = x.size
    nseg = n // scale
    fwd = x[: nseg * scale].reshape(nseg, scale)
    rev = x[n - nseg * scale :].reshape(nseg, scale)
    return np.concatenate([np.mean(fwd * fwd, axis=1), np.mean(rev * rev, axis=1)])


def mfdfa(profile_ts: TimeSeries, scales, q_values,
          detrend: int | WaveletDetrend = 1) -> MFDFAResult:
    """Multifractal DFA of a profile series.

    ``detrend`` is either a polynomial order (per-segment least-squares
    fit) or a :class:`WaveletDetrend`, in which case the wavelet trend
    is removed from the whole profile once and boundary-affected samples
    are excluded before segmentation. The caller supplies a profile
    (see :func:`multiscale.signal_core.profile`).
    """
    scales = np.asarray(sorted(set(int(s) for s in scales)), dtype=int)
    q = np.asarray(q_values, dtype=np.float64)
    if scales.size < 6:
        raise TooFewScales("need >= 6 scales")
    if q.size < 1 or np.any(q == 0) or np.any(np.abs(q) > 10):
        raise InvalidParameter("q values must exclude 0 and satisfy |q| <= 10")
    n = profile_ts.n
    if scales[0] < 16 or scales[-1] > n // 4:
        raise InvalidParameter("scales must lie within [16, length/4]")

    if isinstance(detrend, WaveletDetrend):
        def _wavelet_residual(level: int) -> np.ndarray:
            resid = wavelet_detrend(profile_ts, detrend.order, level)
            margin = detrend_margin(detrend.order, level)
            if 2 * margin >= n:
                raise TooShort("residual interior too short at this level")
            return resid.samples[margin : n - margin]

        if detrend.level is None:
            def var_fn(s):
                return _segment_variances_plain(
                    _wavelet_residual(max(1, int(np.log2(s)))), s)
        else:
            x = _wavelet_residual(detrend.level)
            if x.size < 4 * scales[-1]:
                raise TooShort("residual interior too short for the largest scale")
            var_fn = lambda s: _segment_variances_plain(x, s)
    else:
        order = int(detrend)
        if order < 0:
            raise InvalidParameter("polynomial order must be >= 0")
        x = profile_ts.samples
        var_fn = lambda s: _segment_variances_poly(x, s, order)

    Fq = np.empty((scales.size, q.size))
    for i, s in enumerate(scales):
        f2 = var_fn(int(s))
        if np.any(f2 <= 0):
            raise NonPositiveVariance(f"zero detrended variance at scale {s}")
        # F_q(s) = ( mean f2**(q/2) )**(1/q)
        Fq[i] = np.exp(np.log(np.mean(f2[:, None] ** (q[None, :] / 2.0), axis=0)) / q)

    logs = np.log(scales.astype(float))
    hq = np.empty(q.size)
    for j in range(q.size):
        hq[j], _, _, _ = _ols(logs, np.log(Fq[:, j]))
    tau = q * hq - 1.0
    if q.size >= 2:
        alpha = np.gradient(tau, q)
        f_alpha = q * alpha - tau
    else:
        # the singularity spectrum needs a derivative in q
        alpha = np.full(q.size, np.nan)
        f_alpha = np.full(q.size, np.nan)
    return MFDFAResult(scales=scales, q_values=q, Fq=Fq, hq=hq, tau=tau,
                       alpha_sing=alpha, f_alpha=f_alpha)


def multifractality_width(res: MFDFAResult) -> float:
    """Width of the singularity spectrum, max(alpha) - min(alpha)."""
    if res.q_values.size < 3:
        raise InvalidParameter("need >= 3 q values for a meaningful width")
    return float(res.alpha_sing.max() - res.alpha_sing.min())
