"""Physics-based stator-current simulator.

Stands in for recordings of real motors: a supply-frequency sinusoid,
odd supply harmonics, white Gaussian noise, and, for faulty machines,
sidebands at the fault's signature frequencies with a level fixed in dB
relative to the fundamental. It doubles as the independent oracle the
acceptance suite closes the loop against: every sideband it places must
be found back at the bin the signature analysis predicts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .motor import FaultClass, MotorParameters, signature_frequencies
from .signal_io import CurrentRecording

__all__ = ["SimSpec", "simulate", "save_sim_spec", "load_sim_spec"]


@dataclass(frozen=True)
class SimSpec:
    """Full description of one simulated recording.

    Attributes:
        params: Motor physical constants.
        fault: Fault class to synthesize; HEALTHY omits all sidebands.
        fault_amp_db: Sideband level in dB relative to the fundamental
            (must be <= 0; -20 dB means one tenth of the fundamental).
        fundamental_amp: Fundamental current amplitude in amperes.
        harmonic_amps: Odd supply harmonics, order -> relative amplitude.
        noise_std: White Gaussian noise standard deviation in amperes.
        duration_s: Recording length in seconds.
        sample_rate_hz: Sampling rate; must satisfy Nyquist for every
            generated component.
        seed: Drives phases and noise; identical seeds give identical
            samples.
        max_order: Harmonic order passed to the signature formulas.
        mechanical_frequencies_hz: Explicit frequencies for
            MECHANICAL_OTHER.
        source_id: Provenance tag; auto-derived when empty.
    """

    params: MotorParameters
    fault: FaultClass = FaultClass.HEALTHY
    fault_amp_db: float = -20.0
    fundamental_amp: float = 1.0
    harmonic_amps: dict[int, float] = field(default_factory=lambda: {3: 0.05, 5: 0.02})
    noise_std: float = 0.005
    duration_s: float = 1.0
    sample_rate_hz: float = 8192.0
    seed: int = 0
    max_order: int = 1
    mechanical_frequencies_hz: tuple[float, ...] = ()
    source_id: str = ""

    def __post_init__(self) -> None:
        if self.fault_amp_db > 0:
            raise ValueError(f"fault_amp_db must be <= 0, got {self.fault_amp_db}")
        if self.fundamental_amp <= 0:
            raise ValueError(f"fundamental amplitude must be > 0, got {self.fundamental_amp}")
        if self.noise_std < 0:
            raise ValueError(f"noise std must be >= 0, got {self.noise_std}")
        if self.duration_s <= 0 or self.sample_rate_hz <= 0:
            raise ValueError("duration and sample rate must be > 0")
        if any(h < 1 for h in self.harmonic_amps):
            raise ValueError(f"harmonic orders must be >= 1: {sorted(self.harmonic_amps)}")

    def resolved_source_id(self) -> str:
        return self.source_id or f"sim-{self.fault.value}-{self.seed}"


def _component_frequencies(spec: SimSpec) -> tuple[list[float], list[float]]:
    """(deterministic component freqs, fault sideband freqs) in Hz."""
    fs = spec.params.supply_frequency_hz
    base = [fs] + [h * fs for h in sorted(spec.harmonic_amps)]
    if spec.fault is FaultClass.HEALTHY:
        return base, []
    sig = signature_frequencies(
        spec.params,
        spec.fault,
        max_order=spec.max_order,
        band_limit_hz=1e12,  # sim places all formula outputs; Nyquist is checked below
        user_frequencies_hz=spec.mechanical_frequencies_hz or None,
    )
    return base, list(sig.frequencies_hz)


def simulate(spec: SimSpec) -> CurrentRecording:
    """Synthesize one current recording.

    The signal is the fundamental plus declared odd harmonics plus, for a
    faulty machine, one sinusoid per signature frequency at
    ``10^(fault_amp_db / 20)`` times the fundamental amplitude, plus white
    Gaussian noise. All phases are drawn from the seed in a fixed order
    (fundamental, harmonics ascending, sidebands ascending) so a healthy
    and a faulty run with the same seed share their common components.

    Raises:
        ValueError: When any component frequency reaches the Nyquist
            frequency.
    """
    base_freqs, fault_freqs = _component_frequencies(spec)
    nyquist = spec.sample_rate_hz / 2.0
    for f in base_freqs + fault_freqs:
        if f >= nyquist:
            raise ValueError(f"signature frequency above Nyquist: {f} Hz >= {nyquist} Hz")

    n = int(round(spec.duration_s * spec.sample_rate_hz))
    t = np.arange(n) / spec.sample_rate_hz
    rng = np.random.default_rng(spec.seed)
    amp = spec.fundamental_amp

    signal = amp * np.sin(2.0 * np.pi * base_freqs[0] * t + rng.uniform(0.0, 2.0 * np.pi))
    for h, freq in zip(sorted(spec.harmonic_amps), base_freqs[1:]):
        signal += amp * spec.harmonic_amps[h] * np.sin(2.0 * np.pi * freq * t + rng.uniform(0.0, 2.0 * np.pi))
    sideband_amp = amp * 10.0 ** (spec.fault_amp_db / 20.0)
    for freq in fault_freqs:
        signal += sideband_amp * np.sin(2.0 * np.pi * freq * t + rng.uniform(0.0, 2.0 * np.pi))
    if spec.noise_std > 0:
        signal += rng.normal(0.0, spec.noise_std, size=n)

    return CurrentRecording(
        sample_rate_hz=spec.sample_rate_hz,
        samples=signal,
        source_id=spec.resolved_source_id(),
        label=spec.fault,
    )


def save_sim_spec(spec: SimSpec, path: str | Path) -> None:
    """Persist a SimSpec as JSON for provenance."""
    payload = {
        "params": {
            "supply_frequency_hz": spec.params.supply_frequency_hz,
            "pole_pairs": spec.params.pole_pairs,
            "slip": spec.params.slip,
            "n_balls": spec.params.n_balls,
            "ball_diameter_mm": spec.params.ball_diameter_mm,
            "pitch_diameter_mm": spec.params.pitch_diameter_mm,
            "contact_angle_rad": spec.params.contact_angle_rad,
        },
        "fault": spec.fault.value,
        "fault_amp_db": spec.fault_amp_db,
        "fundamental_amp": spec.fundamental_amp,
        "harmonic_amps": {str(k): v for k, v in spec.harmonic_amps.items()},
        "noise_std": spec.noise_std,
        "duration_s": spec.duration_s,
        "sample_rate_hz": spec.sample_rate_hz,
        "seed": spec.seed,
        "max_order": spec.max_order,
        "mechanical_frequencies_hz": list(spec.mechanical_frequencies_hz),
        "source_id": spec.source_id,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_sim_spec(path: str | Path) -> SimSpec:
    payload = json.loads(Path(path).read_text())
    return SimSpec(
        params=MotorParameters(**payload["params"]),
        fault=FaultClass.from_name(payload["fault"]),
        fault_amp_db=payload["fault_amp_db"],
        fundamental_amp=payload["fundamental_amp"],
        harmonic_amps={int(k): v for k, v in payload["harmonic_amps"].items()},
        noise_std=payload["noise_std"],
        duration_s=payload["duration_s"],
        sample_rate_hz=payload["sample_rate_hz"],
        seed=payload["seed"],
        max_order=payload["max_order"],
        mechanical_frequencies_hz=tuple(payload["mechanical_frequencies_hz"]),
        source_id=payload["source_id"],
    )
