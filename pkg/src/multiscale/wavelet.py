"""Continuous Morlet wavelet analysis: scalogram, cone of influence, global
and time-summed spectra, scale-averaged variance and red-noise significance."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from .errors import (
    EmptyBand,
    EmptyCOI,
    GridTooCoarse,
    InvalidParameter,
    Malformed,
    TooShort,
)
from .signal_core import _FLOAT_FMT, TimeSeries

# reconstruction constant for omega0 = 6; other omega0 values keep relative
# scale-average/reconstruction shapes but lose absolute calibration
C_DELTA = 0.776
PSI0_ZERO = np.pi ** (-0.25)

_MAGIC = b"MSCL1"


@dataclass(frozen=True)
class MorletParams:
    """Complex Morlet parameterized by the nondimensional center frequency."""

    omega0: float = 6.0

    def __post_init__(self):
        if self.omega0 < 5.0:
            raise InvalidParameter("omega0 must be >= 5 for admissibility")

    @classmethod
    def from_bandwidth(cls, fb: float, fc: float) -> "MorletParams":
        """Construct from (bandwidth, center frequency) parameters."""
        if fb <= 0 or fc <= 0:
            raise InvalidParameter("fb and fc must be > 0")
        return cls(omega0=2.0 * np.pi * fc * np.sqrt(fb / 2.0) * np.sqrt(2.0))

    @property
    def fourier_factor(self) -> float:
        """Ratio of equivalent Fourier period to scale."""
        w = self.omega0
        return 4.0 * np.pi / (w + np.sqrt(2.0 + w * w))


@dataclass(frozen=True)
class ScaleGrid:
    """Logarithmic scale grid s_j = s0 * 2**(j*dj), j = 0..J-1."""

    s0: float
    dj: float
    J: int

    def __post_init__(self):
        if self.s0 <= 0 or self.dj <= 0 or self.J < 1:
            raise InvalidParameter("need s0 > 0, dj > 0, J >= 1")

    @property
    def scales(self) -> np.ndarray:
        return self.s0 * 2.0 ** (self.dj * np.arange(self.J))

    @classmethod
    def default_for(cls, n: int, dt: float, s0: float | None = None,
                    dj: float = 0.125) -> "ScaleGrid":
        s0 = 2.0 * dt if s0 is None else s0
        j_max = int(np.floor(np.log2(n * dt / (4.0 * s0)) / dj)) + 1
        return cls(s0=s0, dj=dj, J=max(j_max, 1))


@dataclass(frozen=True)
class Scalogram:
    """Complex CWT coefficients on a (scale x time) grid."""

    coeffs: np.ndarray
    grid: ScaleGrid
    dt: float
    coi: np.ndarray  # per-time maximum trustworthy scale, seconds
    params: MorletParams = field(default_factory=MorletParams)
    src_var: float = float("nan")
    src_lag1: float = float("nan")

    @property
    def scales(self) -> np.ndarray:
        return self.grid.scales

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    def power(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def periods(self) -> np.ndarray:
        """Equivalent Fourier periods of the scale grid."""
        return self.params.fourier_factor * self.scales


@dataclass(frozen=True)
class SignificanceMask:
    mask: np.ndarray  # bool, (scale x time)
    background: float  # lag-1 autocorrelation used
    level: float


def morlet_spectrum(omega: np.ndarray, scale: float, omega0: float) -> np.ndarray:
    """Normalized analytic Morlet spectrum, zero at omega <= 0."""
    arg = scale * omega - omega0
    out = PSI0_ZERO * np.exp(-0.5 * arg * arg)
    return np.where(omega > 0, out, 0.0)


def _pad_length(n: int) -> int:
    return 1 << int(np.ceil(np.log2(n + 1)))


def lag1_autocorr(x: np.ndarray) -> float:
    d = x - x.mean()
    denom = float(np.sum(d * d))
    if denom == 0:
        return 0.0
    return float(np.sum(d[1:] * d[:-1]) / denom)


def cwt_morlet(ts: TimeSeries, grid: ScaleGrid | None = None,
               params: MorletParams = MorletParams(),
               pad: str = "zero") -> Scalogram:
    """FFT-domain continuous Morlet transform.

    With ``pad='zero'`` the signal is zero-padded to the next power of two
    and truncated back; ``pad='periodic'`` performs the circular transform
    at the native length (exact time-shift covariance).
    """
    n = ts.n
    if n < 32:
        raise TooShort("need at least 32 samples")
    if grid is None:
        grid = ScaleGrid.default_for(n, ts.dt)
    scales = grid.scales
    if scales[-1] > n * ts.dt / 4.0 * (1.0 + 1e-12):
        raise GridTooCoarse("largest scale exceeds a quarter of the record")
    if pad not in ("zero", "periodic"):
        raise InvalidParameter("pad must be 'zero' or 'periodic'")

    m = _pad_length(n) if pad == "zero" else n
    x = np.zeros(m)
    x[:n] = ts.samples
    spec = np.fft.fft(x)
    omega = 2.0 * np.pi * np.fft.fftfreq(m, ts.dt)

    coeffs = np.empty((grid.J, n), dtype=np.complex128)
    for j, s in enumerate(scales):
        psi_hat = np.sqrt(2.0 * np.pi * s / ts.dt) * morlet_spectrum(
            omega, s, params.omega0)
        coeffs[j] = np.fft.ifft(spec * np.conj(psi_hat))[:n]

    k = np.arange(n, dtype=np.float64)
    coi = np.minimum(k, n - 1 - k) * ts.dt / np.sqrt(2.0)
    return Scalogram(coeffs=coeffs, grid=grid, dt=ts.dt, coi=coi, params=params,
                     src_var=float(ts.samples.var()),
                     src_lag1=lag1_autocorr(ts.samples))


def _coi_mask(sg: Scalogram) -> np.ndarray:
    return sg.scales[:, None] <= sg.coi[None, :]


def global_spectrum(sg: Scalogram, coi_only: bool = False) -> np.ndarray:
    """Time-mean wavelet power per scale."""
    power = sg.power()
    if not coi_only:
        return power.mean(axis=1)
    inside = _coi_mask(sg)
    counts = inside.sum(axis=1)
    if np.any(counts == 0):
        raise EmptyCOI("some scales have no cone-of-influence interior")
    return np.where(inside, power, 0.0).sum(axis=1) / counts


def scale_power_sum(sg: Scalogram) -> np.ndarray:
    """Wavelet power summed over all time, per scale."""
    return sg.power().sum(axis=1)


def _band_indices(sg: Scalogram, band: tuple[float, float]) -> np.ndarray:
    s_lo, s_hi = band
    sel = np.nonzero((sg.scales >= s_lo) & (sg.scales <= s_hi))[0]
    if sel.size == 0:
        raise EmptyBand("band does not intersect the scale grid")
    return sel


def scale_avg_variance(sg: Scalogram, band: tuple[float, float]) -> TimeSeries:
    """Scale-averaged wavelet variance over a scale band, per time."""
    sel = _band_indices(sg, band)
    weighted = sg.power()[sel] / sg.scales[sel, None]
    out = (sg.grid.dj * sg.dt / C_DELTA) * weighted.sum(axis=0)
    return TimeSeries(out, dt=sg.dt)


def significance_mask(sg: Scalogram, level: float = 0.95) -> SignificanceMask:
    """Red-noise chi-squared significance test per Torrence-Compo.

    The lag-1 autocorrelation estimated from the source series defines a
    red-noise background spectrum; wavelet power exceeding that background
    times chi2(2, level)/2 is marked significant.
    """
    if not 0.5 < level < 1.0:
        raise InvalidParameter("level must be in (0.5, 1)")
    rho = sg.src_lag1
    if not np.isfinite(rho) or not np.isfinite(sg.src_var):
        raise InvalidParameter("scalogram lacks source statistics")
    freq = sg.dt / (sg.params.fourier_factor * sg.scales)  # cycles per sample
    background = (1.0 - rho * rho) / (
        1.0 + rho * rho - 2.0 * rho * np.cos(2.0 * np.pi * freq))
    threshold = sg.src_var * background * chi2.ppf(level, 2) / 2.0
    mask = sg.power() > threshold[:, None]
    return SignificanceMask(mask=mask, background=rho, level=level)


def dominant_scales(sg: Scalogram, k: int = 2, coi_only: bool = True) -> np.ndarray:
    """Scales of the top-k local maxima of the global wavelet spectrum."""
    gws = global_spectrum(sg, coi_only=coi_only)
    peaks = [j for j in range(1, gws.size - 1)
             if gws[j] > gws[j - 1] and gws[j] >= gws[j + 1]]
    peaks.sort(key=lambda j: -gws[j])
    return sg.scales[np.array(peaks[:k], dtype=int)] if peaks else np.array([])


# serialization -------------------------------------------------------------

def scalogram_to_bytes(sg: Scalogram) -> bytes:
    """Binary layout: magic 'MSCL1', uint32 N, uint32 J, float64 dt, float64
    omega0, J float64 scales, then row-major (re, im) float64 pairs,
    little-endian throughout."""
    j, n = sg.coeffs.shape
    head = _MAGIC + struct.pack("<IIdd", n, j, sg.dt, sg.params.omega0)
    scales = sg.scales.astype("<f8").tobytes()
    inter = np.empty((j, n, 2))
    inter[:, :, 0] = sg.coeffs.real
    inter[:, :, 1] = sg.coeffs.imag
    return head + scales + inter.astype("<f8").tobytes()


def scalogram_from_bytes(data: bytes) -> Scalogram:
    if data[:5] != _MAGIC:
        raise Malformed("bad scalogram magic")
    n, j, dt, omega0 = struct.unpack_from("<IIdd", data, 5)
    off = 5 + struct.calcsize("<IIdd")
    scales = np.frombuffer(data, dtype="<f8", count=j, offset=off)
    off += 8 * j
    flat = np.frombuffer(data, dtype="<f8", count=2 * j * n, offset=off)
    coeffs = flat.reshape(j, n, 2)
    dj = np.log2(scales[1] / scales[0]) if j > 1 else 0.125
    grid = ScaleGrid(s0=float(scales[0]), dj=float(dj), J=j)
    k = np.arange(n, dtype=np.float64)
    coi = np.minimum(k, n - 1 - k) * dt / np.sqrt(2.0)
    return Scalogram(coeffs=coeffs[:, :, 0] + 1j * coeffs[:, :, 1], grid=grid,
                     dt=dt, coi=coi, params=MorletParams(omega0=omega0))


def scalogram_to_csv(sg: Scalogram, mask: SignificanceMask | None = None) -> str:
    """Long-format rows: scale,time,re,im,power,significant."""
    lines = []
    scales = sg.scales
    times = np.arange(sg.n) * sg.dt
    power = sg.power()
    for j in range(scales.size):
        srow = _FLOAT_FMT % scales[j]
        for i in range(sg.n):
            c = sg.coeffs[j, i]
            sig = int(mask.mask[j, i]) if mask is not None else 0
            lines.append(",".join((
                srow, _FLOAT_FMT % times[i], _FLOAT_FMT % c.real,
                _FLOAT_FMT % c.imag, _FLOAT_FMT % power[j, i], str(sig))))
    return "\n".join(lines) + "\n"
