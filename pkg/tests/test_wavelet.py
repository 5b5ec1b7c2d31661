import numpy as np
import pytest

import multiscale as ms
from multiscale import errors
from multiscale.wavelet import (MorletParams, ScaleGrid, Scalogram,
                                morlet_spectrum, scalogram_from_bytes,
                                scalogram_to_bytes)


def brute_force_cwt(x, dt, scales, omega0=6.0):
    """Time-domain convolution oracle, O(N^2) per scale.

    Zero-pads to the same power-of-two length as the FFT path and builds
    the analytic Morlet directly in the frequency domain per scale, but
    evaluates the convolution as an explicit sum.
    """
    n = len(x)
    npad = 1
    while npad < n + 1:
        npad *= 2
    xp = np.concatenate([x, np.zeros(npad - n)])
    out = np.empty((len(scales), n), complex)
    omega = 2 * np.pi * np.fft.fftfreq(npad, dt)
    m = np.arange(npad)
    for i, s in enumerate(scales):
        psi_hat = np.sqrt(2 * np.pi * s / dt) * morlet_spectrum(omega, s,
                                                                omega0)
        psi = np.conj(np.fft.ifft(psi_hat))
        for k in range(n):
            out[i, k] = np.sum(xp * psi[(m - k) % npad])
    return out


class TestCwtBasics:
    def test_zero_signal(self):
        sg = ms.cwt_morlet(ms.TimeSeries(np.zeros(256)))
        assert np.allclose(sg.coeffs, 0.0)

    def test_matches_brute_force(self):
        ts = ms.gen_white_noise(512, 11)
        grid = ScaleGrid(6.0, 0.25, 12)
        sg = ms.cwt_morlet(ts, grid)
        ref = brute_force_cwt(ts.samples, ts.dt, grid.scales)
        err = np.max(np.abs(sg.coeffs - ref)) / np.max(np.abs(ref))
        assert err < 1e-8

    def test_sine_peak_scale(self):
        ts = ms.gen_sine(2048, 1.0, 1.0 / 64)
        sg = ms.cwt_morlet(ts)
        gws = ms.global_spectrum(sg, coi_only=True)
        peak_period = sg.periods()[int(np.argmax(gws))]
        assert abs(np.log2(peak_period / 64.0)) <= sg.grid.dj + 1e-12

    def test_linearity(self):
        a = ms.gen_white_noise(256, 1).samples
        b = ms.gen_white_noise(256, 2).samples
        grid = ScaleGrid(4.0, 0.25, 10)
        wa = ms.cwt_morlet(ms.TimeSeries(a), grid).coeffs
        wb = ms.cwt_morlet(ms.TimeSeries(b), grid).coeffs
        wab = ms.cwt_morlet(ms.TimeSeries(2.0 * a - 3.0 * b), grid).coeffs
        assert np.max(np.abs(wab - (2.0 * wa - 3.0 * wb))) < 1e-10 * np.max(
            np.abs(wab))

    def test_time_shift_covariance_periodic(self):
        x = ms.gen_white_noise(512, 4).samples
        grid = ScaleGrid(6.0, 0.25, 10)
        w0 = ms.cwt_morlet(ms.TimeSeries(x), grid, pad="periodic").coeffs
        k = 37
        wk = ms.cwt_morlet(ms.TimeSeries(np.roll(x, k)), grid,
                           pad="periodic").coeffs
        err = np.max(np.abs(np.roll(w0, k, axis=1) - wk))
        assert err < 1e-9 * np.max(np.abs(w0))

    def test_coi_symmetric(self):
        sg = ms.cwt_morlet(ms.gen_white_noise(300, 0))
        assert np.allclose(sg.coi, sg.coi[::-1])
        assert sg.coi[0] == 0.0

    def test_mother_is_analytic(self):
        omega = np.linspace(-20, 20, 401)
        psi_hat = morlet_spectrum(omega, 8.0, 6.0)
        assert np.all(psi_hat[omega <= 0] == 0.0)

    def test_too_short(self):
        with pytest.raises(errors.TooShort):
            ms.cwt_morlet(ms.TimeSeries(np.zeros(16)))

    def test_grid_too_coarse(self):
        with pytest.raises(errors.GridTooCoarse):
            ms.cwt_morlet(ms.gen_white_noise(256, 0), ScaleGrid(2.0, 0.6, 20))

    def test_admissibility_floor(self):
        with pytest.raises(errors.InvalidParameter):
            MorletParams(omega0=4.0)


class TestGlobalSpectrum:
    def test_two_sines_two_peaks(self):
        n = 8192
        x = (ms.gen_sine(n, 1.0, 1 / 64).samples
             + ms.gen_sine(n, 1.0, 1 / 512).samples)
        sg = ms.cwt_morlet(ms.TimeSeries(x))
        gws = ms.global_spectrum(sg, coi_only=True)
        interior = np.arange(1, len(gws) - 1)
        peaks = [j for j in interior
                 if gws[j] > gws[j - 1] and gws[j] > gws[j + 1]
                 and gws[j] > 0.05 * gws.max()]
        assert len(peaks) == 2
        periods = sorted(sg.periods()[peaks])
        assert abs(np.log2(periods[0] / 64.0)) < 2 * sg.grid.dj + 1e-12
        assert abs(np.log2(periods[1] / 512.0)) < 2 * sg.grid.dj + 1e-12

    def test_white_noise_flat_by_decade(self):
        accum = None
        for seed in range(8):
            ts = ms.gen_white_noise(4096, seed)
            sg = ms.cwt_morlet(ts, ScaleGrid(2.0, 0.125, 48))
            gws = ms.global_spectrum(sg, coi_only=True)
            accum = gws if accum is None else accum + gws
        scales = sg.scales
        means = []
        for lo, hi in [(2.0, 8.0), (8.0, 32.0), (32.0, 128.0)]:
            sel = (scales >= lo) & (scales < hi)
            means.append(accum[sel].mean())
        assert max(means) / min(means) < 2.5

    def test_scale_power_sum_consistent(self):
        sg = ms.cwt_morlet(ms.gen_white_noise(1024, 3))
        total = ms.scale_power_sum(sg)
        gws = ms.global_spectrum(sg, coi_only=False)
        assert np.allclose(total, sg.n * gws)

    def test_empty_coi_unreachable_grid(self):
        base = ms.cwt_morlet(ms.gen_white_noise(64, 0))
        huge = Scalogram(coeffs=np.ones((1, 64), complex),
                         grid=ScaleGrid(1e6, 0.125, 1), dt=1.0,
                         coi=base.coi, params=base.params,
                         src_var=1.0, src_lag1=0.0)
        with pytest.raises(errors.EmptyCOI):
            ms.global_spectrum(huge, coi_only=True)


class TestScaleAveragedVariance:
    def test_modulated_amplitude_ratio(self):
        n = 8192
        carrier = ms.gen_sine(n, 1.0, 1 / 64).samples
        amp = np.where(np.arange(n) < n // 2, 1.0, 2.0)
        sg = ms.cwt_morlet(ms.TimeSeries(amp * carrier))
        sav = ms.scale_avg_variance(sg, (32.0, 128.0)).samples
        q = n // 8
        first = sav[q:n // 2 - q].mean()
        second = sav[n // 2 + q:n - q].mean()
        assert second / first == pytest.approx(4.0, rel=0.15)

    def test_white_noise_total_variance(self):
        ts = ms.gen_white_noise(4096, 42)
        sg = ms.cwt_morlet(ts, ScaleGrid(2.0, 0.125, 60))
        sav = ms.scale_avg_variance(sg, (sg.scales[0], sg.scales[-1]))
        inside = sg.coi >= sg.scales[0]
        assert sav.samples[inside].mean() == pytest.approx(
            np.var(ts.samples), rel=0.25)

    def test_empty_band(self):
        sg = ms.cwt_morlet(ms.gen_white_noise(256, 0))
        with pytest.raises(errors.EmptyBand):
            ms.scale_avg_variance(sg, (1e9, 2e9))


class TestSignificance:
    def test_level_bounds(self):
        sg = ms.cwt_morlet(ms.gen_white_noise(256, 0))
        with pytest.raises(errors.InvalidParameter):
            ms.significance_mask(sg, level=0.5)

    def test_sine_scale_significant(self):
        ts = ms.gen_sine(2048, 1.0, 1 / 64)
        sg = ms.cwt_morlet(ts)
        mask = ms.significance_mask(sg).mask
        j = int(np.argmin(np.abs(sg.periods() - 64.0)))
        inside = sg.coi >= sg.scales[j]
        assert mask[j, inside].mean() > 0.95

    def test_white_noise_false_positive_rate(self):
        hits = total = 0
        for seed in range(10):
            sg = ms.cwt_morlet(ms.gen_white_noise(2048, seed))
            mask = ms.significance_mask(sg).mask
            inside = sg.coi[None, :] >= sg.scales[:, None]
            hits += int(mask[inside].sum())
            total += int(inside.sum())
        rate = hits / total
        assert 0.02 < rate < 0.09


class TestReconstruction:
    def test_full_band(self):
        ts = ms.gen_white_noise(2048, 9)
        sg = ms.cwt_morlet(ts, ScaleGrid(2.0, 0.125, 64))
        rec = ms.reconstruct_band(sg, (sg.scales[0], sg.scales[-1]))
        corr = np.corrcoef(rec.samples, ts.samples)[0, 1]
        assert corr > 0.95


class TestSerialization:
    def test_bytes_round_trip(self):
        sg = ms.cwt_morlet(ms.gen_white_noise(300, 5))
        blob = scalogram_to_bytes(sg)
        assert blob[:5] == b"MSCL1"
        back = scalogram_from_bytes(blob)
        assert np.array_equal(back.coeffs, sg.coeffs)
        assert np.allclose(back.scales, sg.scales, rtol=1e-12)
        assert back.dt == sg.dt
        assert back.params.omega0 == sg.params.omega0

    def test_bad_magic(self):
        with pytest.raises(errors.Malformed):
            scalogram_from_bytes(b"NOPE!" + bytes(64))
