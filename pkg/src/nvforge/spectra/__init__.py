"""Spectral analysis: parsing, band diagnostics, PL decomposition, echo fitting."""

from .bands import (
    BANDS,
    Band270Calibration,
    BandReport,
    calibrate_270,
    detect_bands,
    p1_from_270_band,
    subtract_baseline,
)
from .core import (
    Spectrum,
    SpectrumKind,
    absorbance_to_mu,
    difference_spectrum,
    nv_from_absorption,
    parse_spectrum,
)
from .echo import EchoFit, fit_hahn_echo, read_echo_csv
from .pl import ChargeStateFit, decompose_pl, nnls

__all__ = [
    "BANDS",
    "Band270Calibration",
    "BandReport",
    "ChargeStateFit",
    "EchoFit",
    "Spectrum",
    "SpectrumKind",
    "absorbance_to_mu",
    "calibrate_270",
    "decompose_pl",
    "detect_bands",
    "difference_spectrum",
    "fit_hahn_echo",
    "nnls",
    "nv_from_absorption",
    "p1_from_270_band",
    "parse_spectrum",
    "read_echo_csv",
    "subtract_baseline",
]
