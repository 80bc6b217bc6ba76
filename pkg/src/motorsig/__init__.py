"""Signature-guided spectral augmentation and fault classification for
three-phase induction motors."""

from .motor import FaultClass, MotorParameters, SignatureFrequencySet, rotor_frequency, signature_frequencies
from .spectrum import SPECTRUM_BINS, LabeledDataset, SpectrumWindow

__version__ = "0.1.0"

__all__ = [
    "FaultClass",
    "MotorParameters",
    "SignatureFrequencySet",
    "rotor_frequency",
    "signature_frequencies",
    "SpectrumWindow",
    "LabeledDataset",
    "SPECTRUM_BINS",
    "__version__",
]
