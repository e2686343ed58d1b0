import logging

from app.lib.errors import ConfigError, ZeroSignal
from app.ops.commands.output import write_csv, write_json
from app.ops.entities.spectrum import TRANSFORM_CONVENTION
from app.ops.schemas import RunConfig, SpectrumDocument
from app.ops.services.spectral_service import dft_spectrum, one_sided, sample_spectral_ray, total_energy

logger = logging.getLogger(__name__)


def run(config: RunConfig, threads: int | None = None) -> int:
    """Spectrum of one component along the imaginary ray, with the transformed signal alongside."""
    model = config.build_model()
    settings = config.spectrum
    component = settings.component - 1
    if component >= model.dim:
        raise ConfigError(f"Component {settings.component} out of range for {model.name} (dimension {model.dim})")

    window = settings.window
    if window == "auto":
        window = "rectangular" if model.has_closed_form else "hann"
    centered = window != "rectangular" if settings.centered == "auto" else settings.centered

    tol = config.tolerance.to_tolerance()
    trajectory = sample_spectral_ray(model, config.z0, settings.span, settings.samples, tol, centered)
    spectrum = dft_spectrum(trajectory, component, window, settings.detrend, model)
    if total_energy(spectrum) == 0:
        raise ZeroSignal(f"Component {settings.component} of {model.name} from z0={config.z0} has no spectral energy")

    if config.format == "csv":
        rows = zip(spectrum.frequencies.tolist(), spectrum.amplitudes.real.tolist(), spectrum.amplitudes.imag.tolist())
        write_csv(config, ["xi", "re_amp", "im_amp"], rows)
        return 0

    signal = trajectory.component(component)
    radius, power = one_sided(spectrum)
    document = SpectrumDocument(
        model=model.name,
        z0=list(config.z0 or []),
        component=settings.component,
        convention=TRANSFORM_CONVENTION,
        window=window,
        detrend=settings.detrend,
        detrend_offset=(spectrum.detrend_offset.real, spectrum.detrend_offset.imag),
        T=spectrum.T,
        delta_xi=spectrum.delta_xi,
        frequencies=spectrum.frequencies.tolist(),
        re_amp=spectrum.amplitudes.real.tolist(),
        im_amp=spectrum.amplitudes.imag.tolist(),
        one_sided_xi=radius.tolist(),
        one_sided_power=power.tolist(),
        tau=trajectory.tau.tolist(),
        re_signal=signal.real.tolist(),
        im_signal=signal.imag.tolist(),
        config=config.echo(),
    )
    write_json(config, document)
    return 0
