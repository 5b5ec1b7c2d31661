"""Time-series container, CSV ingestion, synthetic generators, filtering,
profile construction and delay embedding."""

from __future__ import annotations

import io
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    Aliased,
    InvalidParameter,
    Malformed,
    NonUniformSampling,
    TooShort,
)

_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class ChannelMeta:
    """Optional experiment metadata carried alongside a series."""

    discharge_voltage: float | None = None
    magnetic_field: float | None = None
    label: str = ""

    def __post_init__(self):
        if self.discharge_voltage is not None and not self.discharge_voltage > 0:
            raise InvalidParameter("discharge_voltage must be > 0 when present")
        if self.magnetic_field is not None and self.magnetic_field < 0:
            raise InvalidParameter("magnetic_field must be >= 0 when present")

    def to_dict(self) -> dict:
        return {
            "discharge_voltage": self.discharge_voltage,
            "magnetic_field": self.magnetic_field,
            "label": self.label,
        }


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real-valued series.

    ``samples`` is stored as a read-only float64 array; ``dt`` is the
    sampling interval in seconds.
    """

    samples: np.ndarray
    dt: float = 1.0
    meta: ChannelMeta = field(default_factory=ChannelMeta)

    def __post_init__(self):
        x = np.ascontiguousarray(self.samples, dtype=np.float64)
        if x.ndim != 1 or x.size < 2:
            raise TooShort("need at least 2 samples")
        if not np.all(np.isfinite(x)):
            raise Malformed("samples must all be finite")
        if not self.dt > 0:
            raise InvalidParameter("dt must be > 0")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "dt", float(self.dt))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def nyquist(self) -> float:
        return 0.5 / self.dt

    def times(self) -> np.ndarray:
        return np.arange(self.n) * self.dt

    def with_samples(self, samples: np.ndarray) -> "TimeSeries":
        return TimeSeries(samples, dt=self.dt, meta=self.meta)

    # serialization -------------------------------------------------------

    def to_csv(self) -> str:
        t = self.times()
        lines = [
            (_FLOAT_FMT % ti) + "," + (_FLOAT_FMT % xi)
            for ti, xi in zip(t, self.samples)
        ]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        obj = {
            "dt": self.dt,
            "meta": self.meta.to_dict(),
            "samples": self.samples.tolist(),
        }
        return json.dumps(obj)


def load_csv(source, dt: float | None = None, meta: ChannelMeta | None = None) -> TimeSeries:
    """Parse a one- or two-column CSV stream into a TimeSeries.

    Two-column input is interpreted as (time, value) and must be uniformly
    sampled (relative jitter below 1e-6); single-column input takes ``dt``
    from the argument (default 1.0). Comma and whitespace delimiters are
    both accepted.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    else:
        raise Malformed("unsupported CSV source type")

    rows = []
    ncols = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if ncols is None:
            ncols = len(parts)
            if ncols not in (1, 2):
                raise Malformed(f"line {lineno}: expected 1 or 2 columns, got {ncols}")
        elif len(parts) != ncols:
            raise Malformed(f"line {lineno}: inconsistent column count")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise Malformed(f"line {lineno}: non-numeric cell") from None

    if len(rows) < 2:
        raise TooShort("need at least 2 rows")
    data = np.asarray(rows, dtype=np.float64)

    if ncols == 1:
        return TimeSeries(data[:, 0], dt=dt if dt is not None else 1.0,
                          meta=meta or ChannelMeta())

    t, x = data[:, 0], data[:, 1]
    diffs = np.diff(t)
    if np.any(diffs <= 0):
        raise NonUniformSampling("time stamps must be strictly increasing")
    dt_est = float(np.median(diffs))
    if np.max(np.abs(diffs - dt_est)) > 1e-6 * dt_est:
        raise NonUniformSampling("time stamps are not uniformly spaced")
    return TimeSeries(x, dt=dt if dt is not None else dt_est,
                      meta=meta or ChannelMeta())


def profile(ts: TimeSeries) -> TimeSeries:
    """Cumulative sum of mean-subtracted samples; last element is ~0."""
    x = ts.samples
    return ts.with_samples(np.cumsum(x - x.mean()))


def gen_white_noise(n: int, seed: int) -> TimeSeries:
    """i.i.d. standard Gaussian samples with dt = 1."""
    if n < 2:
        raise TooShort("n must be >= 2")
    rng = np.random.default_rng(seed)
    return TimeSeries(rng.standard_normal(n), dt=1.0)


def _fgn_autocov(n: int, hurst: float) -> np.ndarray:
    k = np.arange(n, dtype=np.float64)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2 * np.abs(k) ** h2 + np.abs(k - 1) ** h2)


def gen_fgn(n: int, hurst: float, seed: int) -> TimeSeries:
    """Fractional Gaussian noise by Davies-Harte circulant embedding.

    Unit variance, dt = 1; cumulative sum is fractional Brownian motion.
    Negative circulant eigenvalues are clamped to zero (with a warning
    when the deficit is non-trivial).
    """
    if not 0.0 < hurst < 1.0:
        raise InvalidParameter("hurst must be in (0, 1)")
    if n < 2:
        raise TooShort("n must be >= 2")

    gamma = _fgn_autocov(n + 1, hurst)
    # first row of the 2n circulant: gamma_0..gamma_n, gamma_{n-1}..gamma_1
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    lam = np.fft.fft(row).real
    if lam.min() < -1e-8 * lam.max():
        warnings.warn(
            "circulant embedding produced negative eigenvalues; clamping",
            RuntimeWarning,
        )
    lam = np.maximum(lam, 0.0)

    m = row.size  # = 2n
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(m)
    zp = rng.standard_normal(m)
    v = np.empty(m, dtype=np.complex128)
    half = m // 2
    v[0] = np.sqrt(lam[0] / m) * z[0]
    v[half] = np.sqrt(lam[half] / m) * z[half]
    j = np.arange(1, half)
    amp = np.sqrt(lam[j] / (2 * m))
    v[j] = amp * (z[j] + 1j * zp[j])
    v[m - j] = np.conj(v[j])
    x = np.fft.fft(v).real[:n]
    return TimeSeries(x, dt=1.0)


def gen_binomial_cascade(levels: int, p: float, seed: int = 0,
                         shuffle: bool = False) -> TimeSeries:
    """Binomial multiplicative cascade of length 2**levels.

    Value at binary address b is the product of ``levels`` factors, p for
    each 0 bit and 1-p for each 1 bit, scaled by 2**levels so the mean is
    one. Analytic tau(q) = -log2(p**q + (1-p)**q). Dyadic order unless
    ``shuffle`` is set, in which case positions are permuted per seed.
    """
    if not 1 <= levels <= 24:
        raise InvalidParameter("levels must be in 1..24")
    if not 0.0 < p < 1.0:
        raise InvalidParameter("p must be in (0, 1)")

    ones = np.zeros(1, dtype=np.uint8)
    for _ in range(levels):
        ones = np.concatenate([ones, ones + 1])
    b = ones.astype(np.float64)
    x = (2.0 ** levels) * p ** (levels - b) * (1.0 - p) ** b
    if shuffle:
        rng = np.random.default_rng(seed)
        x = x[rng.permutation(x.size)]
    return TimeSeries(x, dt=1.0)


def gen_sine(n: int, dt: float, f: float, amp: float = 1.0,
             phase: float = 0.0) -> TimeSeries:
    """Sampled sinusoid amp*sin(2*pi*f*t + phase)."""
    if n < 2:
        raise TooShort("n must be >= 2")
    if not dt > 0 or not f > 0:
        raise InvalidParameter("dt and f must be > 0")
    if f >= 0.5 / dt:
        raise Aliased(f"f={f} is at or above Nyquist {0.5 / dt}")
    k = np.arange(n)
    return TimeSeries(amp * np.sin(2 * np.pi * f * k * dt + phase), dt=dt)


def lowpass(ts: TimeSeries, cutoff: float) -> TimeSeries:
    """Zero-phase brick-wall low-pass: FFT, zero bins above cutoff, inverse."""
    if not 0.0 < cutoff < ts.nyquist:
        raise InvalidParameter("cutoff must be in (0, Nyquist)")
    spec = np.fft.rfft(ts.samples)
    freqs = np.fft.rfftfreq(ts.n, ts.dt)
    spec[freqs > cutoff] = 0.0
    return ts.with_samples(np.fft.irfft(spec, n=ts.n))


def delay_embed(ts: TimeSeries, lag: int, dim: int = 2) -> np.ndarray:
    """Delay-coordinate embedding: rows (x_k, x_{k+lag}[, x_{k+2 lag}])."""
    if dim not in (2, 3):
        raise InvalidParameter("dim must be 2 or 3")
    if lag < 1:
        raise InvalidParameter("lag must be >= 1")
    if ts.n <= lag * (dim - 1):
        raise TooShort("series too short for this lag/dim")
    m = ts.n - lag * (dim - 1)
    cols = [ts.samples[i * lag : i * lag + m] for i in range(dim)]
    return np.column_stack(cols)


def default_embedding_lag(ts: TimeSeries) -> int:
    """Quarter of the dominant period, from the periodogram peak."""
    x = ts.samples - ts.samples.mean()
    power = np.abs(np.fft.rfft(x)[1:]) ** 2
    freqs = np.fft.rfftfreq(ts.n, ts.dt)[1:]
    f0 = freqs[int(np.argmax(power))]
    return max(1, int(round(0.25 / (f0 * ts.dt))))
