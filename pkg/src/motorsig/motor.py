"""Motor physics: parameters and fault signature frequencies.

Each defect type of an induction motor modulates the stator current at
frequencies that can be computed in advance from the machine's physical
constants (supply frequency, pole pairs, slip, bearing geometry). This
module holds those constants and evaluates the standard MCSA formula set:

  - rotor bar damage:      f_s * (1 +/- 2*k*s)
  - air-gap eccentricity:  f_s * (1 +/- k*(1-s)/p)
  - inter-turn short:      f_s * (k*(1-s)/p +/- m),  m in {1, 3, 5}
  - bearing defects:       |f_s +/- m*f_char| with f_char one of
        BPFO = (N_b/2) * f_r * (1 - (d/D)*cos(theta))
        BPFI = (N_b/2) * f_r * (1 + (d/D)*cos(theta))
        BSF  = (D/(2*d)) * f_r * (1 - ((d/D)*cos(theta))**2)

Negative formula outputs are folded by absolute value (magnitude spectra
are symmetric). Frequencies within 0.5 Hz of the supply fundamental are
kept but flagged: faults there are hard to tell from the fundamental.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "FaultClass",
    "MotorParameters",
    "SignatureFrequencySet",
    "rotor_frequency",
    "bearing_characteristic_frequencies",
    "signature_frequencies",
    "load_motor_parameters",
    "NEAR_FUNDAMENTAL_BAND_HZ",
]

#: Frequencies closer than this to the supply fundamental are flagged as
#: poorly distinguishable from normal operation.
NEAR_FUNDAMENTAL_BAND_HZ = 0.5

#: Two formula outputs closer than this are treated as the same frequency.
DEDUP_TOL_HZ = 1e-9

#: Modulation orders used by the inter-turn short-circuit formula.
INTER_TURN_MODULATION_ORDERS = (1, 3, 5)


class FaultClass(enum.Enum):
    """Defect taxonomy for a three-phase induction motor.

    ``HEALTHY`` is the unique non-anomalous class. ``MECHANICAL_OTHER``
    covers mechanical defects (imbalance, looseness) with no closed-form
    signature; its frequencies must be supplied by the caller.
    """

    HEALTHY = "healthy"
    ROTOR_BAR = "rotor_bar"
    ECCENTRICITY = "eccentricity"
    INTER_TURN_SHORT = "inter_turn_short"
    BEARING_OUTER_RACE = "bearing_outer_race"
    BEARING_INNER_RACE = "bearing_inner_race"
    BEARING_BALL = "bearing_ball"
    MECHANICAL_OTHER = "mechanical_other"

    @property
    def is_anomalous(self) -> bool:
        return self is not FaultClass.HEALTHY

    @classmethod
    def from_name(cls, name: str) -> "FaultClass":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(f.value for f in cls)
            raise ValueError(f"unknown fault class {name!r}; expected one of: {valid}") from None


_BEARING_FAULTS = (
    FaultClass.BEARING_OUTER_RACE,
    FaultClass.BEARING_INNER_RACE,
    FaultClass.BEARING_BALL,
)


@dataclass(frozen=True)
class MotorParameters:
    """Physical constants of one induction motor.

    Attributes:
        supply_frequency_hz: Supply (line) frequency f_s in Hz.
        pole_pairs: Number of pole pairs p (>= 1).
        slip: Per-unit slip s in [0, 1).
        n_balls: Number of rolling elements in the bearing.
        ball_diameter_mm: Rolling-element diameter d in mm.
        pitch_diameter_mm: Bearing pitch (cage) diameter D in mm.
        contact_angle_rad: Bearing contact angle theta in [0, pi/2).
    """

    supply_frequency_hz: float
    pole_pairs: int
    slip: float
    n_balls: int
    ball_diameter_mm: float
    pitch_diameter_mm: float
    contact_angle_rad: float = 0.0

    def __post_init__(self) -> None:
        if self.supply_frequency_hz <= 0:
            raise ValueError(f"supply frequency must be > 0, got {self.supply_frequency_hz}")
        if self.pole_pairs < 1:
            raise ValueError(f"pole pairs must be >= 1, got {self.pole_pairs}")
        if not 0.0 <= self.slip < 1.0:
            raise ValueError(f"slip must lie in [0, 1), got {self.slip}")
        if self.n_balls < 1:
            raise ValueError(f"bearing ball count must be >= 1, got {self.n_balls}")
        if self.ball_diameter_mm <= 0 or self.pitch_diameter_mm <= 0:
            raise ValueError("ball and pitch diameters must be > 0")
        if self.ball_diameter_mm >= self.pitch_diameter_mm:
            raise ValueError(
                f"ball diameter ({self.ball_diameter_mm} mm) must be smaller than "
                f"pitch diameter ({self.pitch_diameter_mm} mm)"
            )
        if not 0.0 <= self.contact_angle_rad < math.pi / 2:
            raise ValueError(f"contact angle must lie in [0, pi/2), got {self.contact_angle_rad}")


@dataclass(frozen=True)
class SignatureFrequencySet:
    """Pre-calculated signature frequencies for one fault class.

    Attributes:
        fault: The fault these frequencies belong to.
        frequencies_hz: Strictly positive frequencies, sorted ascending,
            deduplicated to 1e-9 Hz.
        harmonic_orders: One (k, m) pair per frequency recording which
            formula instance generated it. Semantics per fault family:
            rotor bar / eccentricity: (k, +/-1) with the sign selecting the
            upper or lower sideband; inter-turn short: (k, +/-m) with m the
            signed modulation order; bearing faults: (m, +/-1) with m the
            characteristic-frequency multiple; mechanical other: (i, 0)
            with i the index into the user-supplied list.
        near_fundamental: Per-frequency flag, True when the frequency lies
            within 0.5 Hz of the supply fundamental.
    """

    fault: FaultClass
    frequencies_hz: tuple[float, ...]
    harmonic_orders: tuple[tuple[int, int], ...]
    near_fundamental: tuple[bool, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.frequencies_hz) != len(self.harmonic_orders):
            raise ValueError("frequencies and harmonic orders must align")
        for lo, hi in zip(self.frequencies_hz, self.frequencies_hz[1:]):
            if hi - lo < DEDUP_TOL_HZ:
                raise ValueError("frequencies must be sorted ascending without duplicates")


def rotor_frequency(params: MotorParameters) -> float:
    """Rotor mechanical rotation frequency f_r = f_s * (1 - s) / p in Hz."""
    return params.supply_frequency_hz * (1.0 - params.slip) / params.pole_pairs


def bearing_characteristic_frequencies(params: MotorParameters) -> dict[FaultClass, float]:
    """Absolute bearing defect frequencies (Hz) from geometry and rotor speed.

    Standard kinematic equations for a rolling-element bearing with the
    outer race stationary.
    """
    f_r = rotor_frequency(params)
    ratio = params.ball_diameter_mm / params.pitch_diameter_mm
    rc = ratio * math.cos(params.contact_angle_rad)
    bpfo = 0.5 * params.n_balls * f_r * (1.0 - rc)
    bpfi = 0.5 * params.n_balls * f_r * (1.0 + rc)
    bsf = (params.pitch_diameter_mm / (2.0 * params.ball_diameter_mm)) * f_r * (1.0 - rc * rc)
    return {
        FaultClass.BEARING_OUTER_RACE: bpfo,
        FaultClass.BEARING_INNER_RACE: bpfi,
        FaultClass.BEARING_BALL: bsf,
    }


def _raw_signature_terms(
    params: MotorParameters,
    fault: FaultClass,
    max_order: int,
    user_frequencies_hz: tuple[float, ...],
) -> list[tuple[float, tuple[int, int]]]:
    """All formula outputs for a fault, |.|-folded, before band filtering."""
    fs = params.supply_frequency_hz
    s = params.slip
    p = params.pole_pairs
    terms: list[tuple[float, tuple[int, int]]] = []

    if fault is FaultClass.ROTOR_BAR:
        for k in range(1, max_order + 1):
            terms.append((abs(fs * (1.0 + 2.0 * k * s)), (k, +1)))
            terms.append((abs(fs * (1.0 - 2.0 * k * s)), (k, -1)))
    elif fault is FaultClass.ECCENTRICITY:
        for k in range(1, max_order + 1):
            terms.append((abs(fs * (1.0 + k * (1.0 - s) / p)), (k, +1)))
            terms.append((abs(fs * (1.0 - k * (1.0 - s) / p)), (k, -1)))
    elif fault is FaultClass.INTER_TURN_SHORT:
        for k in range(1, max_order + 1):
            for m in INTER_TURN_MODULATION_ORDERS:
                terms.append((abs(fs * (k * (1.0 - s) / p + m)), (k, +m)))
                terms.append((abs(fs * (k * (1.0 - s) / p - m)), (k, -m)))
    elif fault in _BEARING_FAULTS:
        f_char = bearing_characteristic_frequencies(params)[fault]
        for m in range(1, max_order + 1):
            terms.append((abs(fs + m * f_char), (m, +1)))
            terms.append((abs(fs - m * f_char), (m, -1)))
    elif fault is FaultClass.MECHANICAL_OTHER:
        for i, f in enumerate(user_frequencies_hz):
            terms.append((abs(float(f)), (i, 0)))
    else:  # pragma: no cover - exhaustive over anomalous classes
        raise ValueError(f"no signature formula for fault {fault}")
    return terms


def signature_frequencies(
    params: MotorParameters,
    fault: FaultClass,
    max_order: int = 1,
    band_limit_hz: float = 250.0,
    user_frequencies_hz: tuple[float, ...] | list[float] | None = None,
) -> SignatureFrequencySet:
    """Compute the signature frequencies of ``fault`` inside (0, band_limit_hz).

    Args:
        params: Motor physical constants.
        fault: Anomalous fault class to evaluate.
        max_order: Highest harmonic order k (or sideband multiple m for
            bearing faults) to generate.
        band_limit_hz: Upper band edge; only frequencies strictly inside
            (0, band_limit_hz) are returned.
        user_frequencies_hz: Explicit frequencies for MECHANICAL_OTHER,
            ignored for every other fault.

    Returns:
        SignatureFrequencySet sorted ascending, deduplicated, with
        near-fundamental flags.

    Raises:
        ValueError: For the healthy class, for MECHANICAL_OTHER without
            explicit frequencies, for max_order < 1, or when no frequency
            falls inside the band.
    """
    if fault is FaultClass.HEALTHY:
        raise ValueError("healthy class has no signature")
    if max_order < 1:
        raise ValueError(f"max_order must be >= 1, got {max_order}")
    if band_limit_hz <= 0:
        raise ValueError(f"band limit must be > 0, got {band_limit_hz}")
    user = tuple(user_frequencies_hz) if user_frequencies_hz is not None else ()
    if fault is FaultClass.MECHANICAL_OTHER and not user:
        raise ValueError("mechanical_other requires explicit frequencies")

    terms = _raw_signature_terms(params, fault, max_order, user)
    terms = [(f, km) for f, km in terms if 0.0 < f < band_limit_hz]
    terms.sort(key=lambda t: t[0])

    freqs: list[float] = []
    orders: list[tuple[int, int]] = []
    for f, km in terms:
        if freqs and f - freqs[-1] < DEDUP_TOL_HZ:
            continue
        freqs.append(f)
        orders.append(km)
    if not freqs:
        raise ValueError(
            f"fault {fault.value}: no signature frequency inside (0, {band_limit_hz}) Hz"
        )

    fs = params.supply_frequency_hz
    flags = tuple(abs(f - fs) <= NEAR_FUNDAMENTAL_BAND_HZ for f in freqs)
    return SignatureFrequencySet(
        fault=fault,
        frequencies_hz=tuple(freqs),
        harmonic_orders=tuple(orders),
        near_fundamental=flags,
    )


_MOTOR_FIELDS = {
    "supply_frequency_hz": float,
    "pole_pairs": int,
    "slip": float,
    "n_balls": int,
    "ball_diameter_mm": float,
    "pitch_diameter_mm": float,
    "contact_angle_rad": float,
}


def load_motor_parameters(path: str | Path) -> MotorParameters:
    """Load MotorParameters from a plain ``key = value`` text file.

    Keys are exactly the field names of MotorParameters; ``#`` starts a
    comment; blank lines are ignored. ``contact_angle_rad`` may be omitted
    and defaults to 0.

    Raises:
        ValueError: On unknown keys, unparseable values, or missing fields.
    """
    path = Path(path)
    values: dict[str, float | int] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        if key not in _MOTOR_FIELDS:
            raise ValueError(f"{path}:{lineno}: unknown motor parameter {key!r}")
        try:
            values[key] = _MOTOR_FIELDS[key](text.strip())
        except ValueError:
            raise ValueError(f"{path}:{lineno}: cannot parse value for {key!r}: {text.strip()!r}") from None
    missing = [k for k in _MOTOR_FIELDS if k not in values and k != "contact_angle_rad"]
    if missing:
        raise ValueError(f"{path}: missing motor parameters: {', '.join(missing)}")
    return MotorParameters(**values)  # type: ignore[arg-type]


def save_motor_parameters(params: MotorParameters, path: str | Path) -> None:
    """Write MotorParameters in the ``key = value`` format read back by
    :func:`load_motor_parameters`."""
    lines = ["# induction motor physical parameters"]
    for key in _MOTOR_FIELDS:
        lines.append(f"{key} = {getattr(params, key)!r}")
    Path(path).write_text("\n".join(lines) + "\n")
