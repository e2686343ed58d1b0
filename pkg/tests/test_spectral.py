import numpy as np
import pytest

from app.lib.errors import ConfigError, LengthNotPowerOfTwo, NonUniformSampling, ZeroSignal
from app.ops.entities.trajectory import Trajectory
from app.ops.models import FlowCoefficients
from app.ops.services.spectral_service import (
    band_energy,
    detect_peaks,
    dft_spectrum,
    estimate_support,
    is_power_of_two,
    one_sided,
    sample_spectral_ray,
    total_energy,
)
from app.ops.validate.generator import davis_skodje_point

TWO_PI = 2 * np.pi


def rational(tau):
    """1/(2 + e^{iτ}), a comb over ξ = 0, 1, 2, ..."""
    return 1.0 / (2.0 + np.exp(1j * tau))


def sampled(signal_fn, span: float, n: int, tau0: float = 0.0) -> Trajectory:
    tau = tau0 + span * np.arange(n) / n
    signal = np.asarray(signal_fn(tau), dtype=complex) * np.ones(n)
    return Trajectory(times=1j * tau, states=signal[:, None])


def amplitude_at(spectrum, xi: float) -> complex:
    k = int(np.argmin(np.abs(spectrum.frequencies - xi)))
    assert spectrum.frequencies[k] == pytest.approx(xi)
    return spectrum.amplitudes[k]


def test_power_of_two():
    assert [n for n in range(1, 20) if is_power_of_two(n)] == [1, 2, 4, 8, 16]
    assert not is_power_of_two(0)


def test_constant_signal_is_a_dc_line():
    spectrum = dft_spectrum(sampled(lambda tau: 3.0, 4 * TWO_PI, 64), 0)

    assert spectrum.T == pytest.approx(4 * TWO_PI)
    assert spectrum.delta_xi == pytest.approx(0.25)
    assert amplitude_at(spectrum, 0.0) == pytest.approx(3.0)
    assert np.sum(spectrum.magnitudes > 1e-12) == 1


def test_tone_lands_on_its_signed_frequency():
    spectrum = dft_spectrum(sampled(lambda tau: np.exp(-1j * tau), 16 * TWO_PI, 256), 0)

    assert amplitude_at(spectrum, -1.0) == pytest.approx(1.0)
    assert abs(amplitude_at(spectrum, 1.0)) < 1e-12
    assert spectrum.frequencies[0] == pytest.approx(-128 * spectrum.delta_xi)
    assert np.all(np.diff(spectrum.frequencies) > 0)


def test_window_calibration_keeps_on_grid_amplitude():
    trajectory = sampled(lambda tau: 0.5j * np.exp(2j * tau), 8 * TWO_PI, 128)
    hann = dft_spectrum(trajectory, 0, window="hann")

    assert amplitude_at(hann, 2.0) == pytest.approx(0.5j)
    assert abs(amplitude_at(hann, 2.0 + hann.delta_xi)) == pytest.approx(0.25)
    with pytest.raises(ConfigError):
        dft_spectrum(trajectory, 0, window="kaiser")


def test_phase_refers_to_tau_zero():
    shifted = dft_spectrum(sampled(lambda tau: 2.0 * np.exp(-3j * tau), 8 * TWO_PI, 128, tau0=1.25), 0)
    assert amplitude_at(shifted, -3.0) == pytest.approx(2.0)


def test_non_uniform_sampling_is_rejected():
    trajectory = sampled(lambda tau: np.cos(tau), TWO_PI, 16)
    trajectory.times[5] += 1e-3j
    with pytest.raises(NonUniformSampling):
        dft_spectrum(trajectory, 0)


def test_length_must_be_power_of_two(linear12):
    with pytest.raises(LengthNotPowerOfTwo):
        dft_spectrum(sampled(lambda tau: np.cos(tau), TWO_PI, 100), 0)
    with pytest.raises(LengthNotPowerOfTwo):
        sample_spectral_ray(linear12, [1.0, 1.0], TWO_PI, 100)


def test_component_and_detrend_validation():
    trajectory = sampled(lambda tau: np.cos(tau), TWO_PI, 16)
    with pytest.raises(ConfigError):
        dft_spectrum(trajectory, 1)
    with pytest.raises(ConfigError):
        dft_spectrum(trajectory, 0, detrend="fixed_point")
    with pytest.raises(ConfigError):
        dft_spectrum(trajectory, 0, detrend="linear")


def test_mean_detrend_removes_dc():
    spectrum = dft_spectrum(sampled(lambda tau: 3.0 + np.exp(1j * tau), 4 * TWO_PI, 64), 0, detrend="mean")
    assert spectrum.detrend_offset == pytest.approx(3.0)
    assert abs(amplitude_at(spectrum, 0.0)) < 1e-12
    assert amplitude_at(spectrum, 1.0) == pytest.approx(1.0)


def test_fixed_point_detrend(ds10, tol):
    trajectory = sample_spectral_ray(ds10, davis_skodje_point(2.0, 0.0), 4 * TWO_PI, 256, tol)
    spectrum = dft_spectrum(trajectory, 0, detrend="fixed_point", model=ds10)
    assert spectrum.detrend_offset == pytest.approx(0.0, abs=1e-14)
    assert amplitude_at(spectrum, -1.0) == pytest.approx(2.0, rel=1e-6)


def test_transform_is_linear():
    span, n = 8 * TWO_PI, 128

    def tones(tau):
        return np.exp(-1j * tau) + 0.2 * np.cos(3 * tau)

    combined = dft_spectrum(sampled(lambda tau: tones(tau) + 2 * rational(tau), span, n), 0)
    separate = (
        dft_spectrum(sampled(tones, span, n), 0).amplitudes + 2 * dft_spectrum(sampled(rational, span, n), 0).amplitudes
    )
    np.testing.assert_allclose(combined.amplitudes, separate, atol=1e-13)


def test_modulation_shifts_bins():
    span, n = 8 * TWO_PI, 128
    delta_xi = TWO_PI / span

    base = dft_spectrum(sampled(rational, span, n), 0)
    moved = dft_spectrum(sampled(lambda tau: rational(tau) * np.exp(3j * delta_xi * tau), span, n), 0)
    np.testing.assert_allclose(moved.amplitudes, np.roll(base.amplitudes, 3), atol=1e-13)


def test_energy_obeys_parseval():
    rng = np.random.default_rng(7)
    values = rng.normal(size=64) + 1j * rng.normal(size=64)
    span = 4 * TWO_PI
    trajectory = Trajectory(times=1j * span * np.arange(64) / 64, states=values[:, None])

    spectrum = dft_spectrum(trajectory, 0)
    assert total_energy(spectrum) == pytest.approx(spectrum.delta_xi * np.mean(np.abs(values) ** 2))


def test_band_energy():
    span = 8 * TWO_PI
    spectrum = dft_spectrum(sampled(lambda tau: 2.0 * np.exp(-3j * tau) + np.exp(0.5j * tau), span, 128), 0)
    delta_xi = spectrum.delta_xi

    assert band_energy(spectrum, 2.0, 4.0) == pytest.approx(4.0 * delta_xi)
    assert band_energy(spectrum, 0.0, 2.0) == pytest.approx(delta_xi)
    # bounds are inclusive and act on |ξ|
    assert band_energy(spectrum, 3.0, 3.5) == pytest.approx(4.0 * delta_xi)
    assert band_energy(spectrum, 0.0, 0.5) + band_energy(spectrum, 0.5 + delta_xi, 10.0) == pytest.approx(
        total_energy(spectrum)
    )
    with pytest.raises(ConfigError):
        band_energy(spectrum, 2.0, 2.0)
    with pytest.raises(ConfigError):
        band_energy(spectrum, -1.0, 2.0)


def test_one_sided_folds_signed_frequencies():
    spectrum = dft_spectrum(sampled(lambda tau: np.exp(1j * tau) + 0.5 * np.exp(-1j * tau), 4 * TWO_PI, 64), 0)
    radius, power = one_sided(spectrum)
    assert radius[0] == 0.0
    assert power[np.argmin(np.abs(radius - 1.0))] == pytest.approx(1.25)


def test_estimate_support():
    span = 8 * TWO_PI
    spectrum = dft_spectrum(sampled(lambda tau: np.exp(-2j * tau) + np.exp(0.5j * tau), span, 128), 0)
    assert estimate_support(spectrum, 1e-6) == pytest.approx(2.0)

    with pytest.raises(ZeroSignal):
        estimate_support(dft_spectrum(sampled(lambda tau: 0.0, span, 128), 0))
    with pytest.raises(ConfigError):
        estimate_support(spectrum, 1.5)


def test_linear_model_support(linear12, tol):
    trajectory = sample_spectral_ray(linear12, [1.0, 1.0], 8 * TWO_PI, 256, tol)
    support = max(estimate_support(dft_spectrum(trajectory, j), 1e-6) for j in range(2))
    assert support == pytest.approx(2.0)


def test_linear_comb_peaks(linear12, tol):
    trajectory = sample_spectral_ray(linear12, [1.0, 1.0], 8 * TWO_PI, 256, tol)
    assert len(trajectory) == 256
    assert trajectory.tau[-1] == pytest.approx(8 * TWO_PI * 255 / 256)

    for component, xi in ((0, -1.0), (1, -2.0)):
        peaks = detect_peaks(dft_spectrum(trajectory, component), 1e-3)
        assert len(peaks) == 1
        assert peaks[0].xi == pytest.approx(xi)
        assert abs(peaks[0].amplitude) == pytest.approx(1.0, abs=1e-6)
        assert peaks[0].component == component


def test_peak_refinement_between_bins():
    span, n = 8 * TWO_PI, 256
    delta_xi = TWO_PI / span
    xi = -1.0 + 0.3 * delta_xi
    spectrum = dft_spectrum(sampled(lambda tau: np.exp(1j * xi * tau), span, n), 0, window="hann")

    peak = detect_peaks(spectrum, 1e-2)[0]
    assert peak.xi == pytest.approx(xi, abs=0.25 * delta_xi)


def test_peaks_are_sorted_and_thresholded():
    spectrum = dft_spectrum(
        sampled(lambda tau: np.exp(-1j * tau) + 0.5 * np.exp(2j * tau) + 1e-4 * np.exp(-5j * tau), 8 * TWO_PI, 128),
        0,
    )
    peaks = detect_peaks(spectrum, 1e-3)
    assert [p.xi for p in peaks] == pytest.approx([-1.0, 2.0])
    assert len(detect_peaks(spectrum, 1e-5)) == 3

    assert detect_peaks(dft_spectrum(sampled(lambda tau: 0.0, TWO_PI, 16), 0)) == []
    with pytest.raises(ConfigError):
        detect_peaks(spectrum, 0.0)


@pytest.mark.parametrize("c2, expected", [(0.3, True), (0.0, False)])
def test_davis_skodje_fast_line(ds10, tol, c2, expected):
    trajectory = sample_spectral_ray(ds10, davis_skodje_point(2.0, c2), 8 * TWO_PI, 512, tol)
    spectrum = dft_spectrum(trajectory, 1)
    fast = [p for p in detect_peaks(spectrum, 1e-6) if -12 <= p.xi <= -8]

    assert bool(fast) is expected
    if expected:
        assert fast[0].xi == pytest.approx(-10.0)
        assert abs(fast[0].amplitude) == pytest.approx(0.3, rel=0.02)


def test_hann_and_rectangular_agree_on_peak_positions():
    span, n = 8 * TWO_PI, 256
    delta_xi = TWO_PI / span
    xi_a, xi_b = -1.0 + 0.3 * delta_xi, 1.0 + 0.4 * delta_xi
    trajectory = sampled(lambda tau: np.exp(1j * xi_a * tau) + 0.6 * np.exp(1j * xi_b * tau), span, n)

    positions = {}
    for window in ("rectangular", "hann"):
        top = detect_peaks(dft_spectrum(trajectory, 0, window=window), 1e-2)[:2]
        positions[window] = sorted(p.xi for p in top)

    np.testing.assert_allclose(positions["hann"], positions["rectangular"], atol=delta_xi)
    np.testing.assert_allclose(positions["hann"], [xi_a, xi_b], atol=delta_xi)


def test_davis_skodje_comb_converges_as_span_doubles(ds10, tol):
    coeffs = FlowCoefficients([2.0, 0.3])
    lines = [line for line in ds10.analytic_spectrum(coeffs) if abs(line.xi) <= 6 or line.xi == -10.0]

    errors = []
    spans = [2 * TWO_PI, 4 * TWO_PI, 8 * TWO_PI]
    for span in spans:
        trajectory = sample_spectral_ray(ds10, davis_skodje_point(2.0, 0.3), span, int(32 * span / TWO_PI), tol)
        spectra = [dft_spectrum(trajectory, j) for j in range(2)]
        errors.append(max(abs(amplitude_at(spectra[line.component], line.xi) - line.amplitude) for line in lines))

    assert max(errors) <= 1e-6
    assert errors[-1] <= errors[0] * spans[0] / spans[-1] + 1e-7


def test_centered_ray_matches_forward_ray(linear12, tol):
    span, n = 8 * TWO_PI, 256
    forward = sample_spectral_ray(linear12, [1.0, 1.0], span, n, tol)
    centered = sample_spectral_ray(linear12, [1.0, 1.0], span, n, tol, centered=True)

    assert len(centered) == n
    assert centered.tau[0] == pytest.approx(-span / 2)
    np.testing.assert_allclose(np.diff(centered.tau), span / n, rtol=1e-12)
    # both rays cover whole periods, so the phase-corrected amplitudes coincide
    for component in range(2):
        np.testing.assert_allclose(
            dft_spectrum(centered, component).amplitudes, dft_spectrum(forward, component).amplitudes, atol=1e-8
        )

    with pytest.raises(ConfigError):
        sample_spectral_ray(linear12, [1.0, 1.0], span, 1, tol, centered=True)
