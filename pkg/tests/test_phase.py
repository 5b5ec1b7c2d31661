import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import multiscale as ms
from multiscale import errors
from multiscale.phase import wrap_phase


class TestWrapPhase:
    @given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
    def test_range(self, x):
        w = wrap_phase(np.array([x]))[0]
        assert -np.pi < w <= np.pi

    @given(st.floats(min_value=-50.0, max_value=50.0))
    @settings(max_examples=200)
    def test_idempotent(self, x):
        once = wrap_phase(np.array([x]))
        assert wrap_phase(once)[0] == pytest.approx(once[0], abs=1e-12)

    def test_shift_by_two_pi(self):
        x = np.linspace(-10, 10, 1001)
        assert np.allclose(wrap_phase(x), wrap_phase(x + 2 * np.pi),
                           atol=1e-9)


class TestPhaseAtScale:
    def test_sine_phase_slope(self):
        n, f0 = 4096, 1.0 / 64
        ts = ms.gen_sine(n, 1.0, f0)
        ph = ms.phase_at_scale(ts, 64.0 / ms.MorletParams().fourier_factor)
        sl = ph.coi_valid
        slope = np.polyfit(ts.times()[sl], ph.unwrapped[sl], 1)[0]
        assert slope == pytest.approx(2 * np.pi * f0, rel=0.01)

    def test_wrapped_consistent_with_unwrapped(self):
        ph = ms.phase_at_scale(ms.gen_white_noise(1024, 3), 24.0)
        assert np.allclose(ph.wrapped, wrap_phase(ph.unwrapped), atol=1e-10)

    def test_scale_out_of_range(self):
        ts = ms.gen_white_noise(256, 0)
        with pytest.raises(errors.ScaleOutOfRange):
            ms.phase_at_scale(ts, 0.5)
        with pytest.raises(errors.ScaleOutOfRange):
            ms.phase_at_scale(ts, 1000.0)


class TestPhaseDifference:
    def _pair(self, n=4096, f0=1.0 / 64, offset=np.pi / 3, seed=None):
        a = ms.gen_sine(n, 1.0, f0)
        b = ms.gen_sine(n, 1.0, f0, phase=offset)
        scale = (1.0 / f0) / ms.MorletParams().fourier_factor
        pa = ms.phase_at_scale(a, scale)
        pb = ms.phase_at_scale(b, scale)
        return pa, pb

    def test_constant_offset(self):
        pa, pb = self._pair()
        d = ms.phase_difference(pb, pa)
        sl = d.coi_valid
        med = np.median(wrap_phase(d.delta[sl]))
        assert med == pytest.approx(np.pi / 3, abs=0.05)

    def test_antisymmetry(self):
        a = ms.gen_white_noise(2048, 1)
        b = ms.gen_white_noise(2048, 2)
        pa = ms.phase_at_scale(a, 32.0)
        pb = ms.phase_at_scale(b, 32.0)
        dab = ms.phase_difference(pa, pb).delta
        dba = ms.phase_difference(pb, pa).delta
        assert np.max(np.abs(wrap_phase(dab + dba))) < 1e-9

    def test_amplitude_invariance(self):
        ts = ms.gen_white_noise(2048, 4)
        big = ts.with_samples(100.0 * ts.samples)
        pa = ms.phase_at_scale(ts, 32.0)
        pb = ms.phase_at_scale(big, 32.0)
        assert np.max(np.abs(wrap_phase(pa.wrapped - pb.wrapped))) < 1e-10

    def test_length_mismatch(self):
        pa = ms.phase_at_scale(ms.gen_white_noise(1024, 0), 32.0)
        pb = ms.phase_at_scale(ms.gen_white_noise(512, 0), 32.0)
        with pytest.raises(errors.LengthMismatch):
            ms.phase_difference(pa, pb)

    def test_scale_mismatch(self):
        ts = ms.gen_white_noise(1024, 0)
        pa = ms.phase_at_scale(ts, 32.0)
        pb = ms.phase_at_scale(ts, 48.0)
        with pytest.raises(errors.ScaleMismatch):
            ms.phase_difference(pa, pb)


class TestReconstructBand:
    def test_band_separation(self):
        n = 8192
        lo = ms.gen_sine(n, 1.0, 1 / 512).samples
        hi = ms.gen_sine(n, 1.0, 1 / 64).samples
        sg = ms.cwt_morlet(ms.TimeSeries(lo + hi))
        ff = sg.params.fourier_factor
        rec_hi = ms.reconstruct_band(sg, (32.0 / ff, 128.0 / ff)).samples
        inner = slice(n // 8, -n // 8)
        assert np.corrcoef(rec_hi[inner], hi[inner])[0, 1] > 0.98
        assert abs(np.corrcoef(rec_hi[inner], lo[inner])[0, 1]) < 0.1

    def test_zero_signal(self):
        sg = ms.cwt_morlet(ms.TimeSeries(np.zeros(256)))
        rec = ms.reconstruct_band(sg, (sg.scales[0], sg.scales[-1]))
        assert np.allclose(rec.samples, 0.0)


class TestLockingIntervals:
    def test_constant_offset_fully_locked(self):
        pa, pb = TestPhaseDifference()._pair()
        d = ms.phase_difference(pb, pa)
        ivals = ms.locking_intervals(d, tolerance=0.5, min_duration=64)
        assert len(ivals) == 1
        start, end = ivals[0]
        valid = np.flatnonzero(d.coi_valid)
        assert start <= valid[0] + 64
        assert end >= valid[-1] - 64

    def test_steady_drift_never_locks(self):
        n = 4096
        a = ms.gen_sine(n, 1.0, 1 / 64)
        b = ms.gen_sine(n, 1.0, 1 / 64 * 1.05)
        scale = 64.0 / ms.MorletParams().fourier_factor
        d = ms.phase_difference(ms.phase_at_scale(a, scale),
                                ms.phase_at_scale(b, scale))
        assert ms.locking_intervals(d, tolerance=0.5, min_duration=256) == []

    def test_episode_boundaries(self):
        n, f0 = 6144, 1.0 / 64
        t = np.arange(n)
        detune = np.where((t >= n // 3) & (t < 2 * n // 3), 0.0, 0.25 * f0)
        phase_b = 2 * np.pi * np.cumsum(f0 + detune)
        a = ms.gen_sine(n, 1.0, f0)
        b = ms.TimeSeries(np.sin(phase_b))
        scale = (1.0 / f0) / ms.MorletParams().fourier_factor
        d = ms.phase_difference(ms.phase_at_scale(a, scale),
                                ms.phase_at_scale(b, scale))
        min_dur = 64
        ivals = ms.locking_intervals(d, tolerance=0.5, min_duration=min_dur)
        assert len(ivals) == 1
        start, end = ivals[0]
        assert abs(start - n // 3) <= 2 * min_dur
        assert abs(end - 2 * n // 3) <= 2 * min_dur

    def test_constant_offset_invariance(self):
        pa, pb = TestPhaseDifference()._pair()
        d = ms.phase_difference(pb, pa)
        base = ms.locking_intervals(d, tolerance=0.5, min_duration=64)
        from dataclasses import replace
        shifted = replace(d, delta=d.delta + 1.7)
        assert ms.locking_intervals(shifted, tolerance=0.5,
                                    min_duration=64) == base

    def test_with_locking_annotates(self):
        pa, pb = TestPhaseDifference()._pair()
        d = ms.phase_difference(pb, pa)
        annotated = ms.with_locking(d, tolerance=0.5, min_duration=64)
        assert annotated.tolerance == 0.5
        assert annotated.min_duration == 64
        assert len(annotated.locking_intervals) == 1
