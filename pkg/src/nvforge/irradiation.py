"""Vacancy creation and NV formation as a function of electron fluence."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .csvio import read_columns
from .errors import (
    EnergyMismatch,
    InsufficientData,
    NonConvergence,
    UnknownEnergy,
    ValidationError,
)
from .lsq import levenberg_marquardt
from .state import IrradiationPlan

# ppm of vacancies per (e/cm^2)
DEFAULT_VACANCY_YIELD = {2.0: 1.1e-17, 1.0: 0.9e-17}


def _energy_key(energy):
    return round(float(energy), 6)


@dataclass(frozen=True)
class VacancyYieldTable:
    entries: dict = field(default_factory=lambda: dict(DEFAULT_VACANCY_YIELD))

    def __post_init__(self):
        clean = {}
        for energy, k in self.entries.items():
            if not (k > 0 and math.isfinite(k)):
                raise ValidationError(f"vacancy yield for {energy} MeV must be > 0")
            clean[_energy_key(energy)] = float(k)
        object.__setattr__(self, "entries", clean)

    def __contains__(self, energy):
        return _energy_key(energy) in self.entries

    def yield_for(self, energy):
        try:
            return self.entries[_energy_key(energy)]
        except KeyError:
            raise UnknownEnergy(f"no vacancy yield calibrated for {energy} MeV") from None


def vacancy_concentration(plan, table=None):
    """Isolated vacancies (ppm) created by ``plan``; linear in fluence."""
    table = table or VacancyYieldTable()
    return table.yield_for(plan.energy_mev) * plan.fluence_e_per_cm2


@dataclass(frozen=True)
class ConversionCurve:
    """Saturating NV yield ``nv_total = p1 * nv_max_frac * (1 - exp(-fluence / phi0))``.

    ``phi0`` applies at ``reference_p1_ppm``. For another P1 the characteristic
    fluence scales as ``phi0 * p1 / reference_p1_ppm``: the low-fluence yield
    stays vacancy-limited (independent of P1) while the plateau stays
    P1-limited. ``reference_p1_ppm=None`` disables the scaling.

    ``fluence_range`` is the span of fluences the curve was fitted on, if
    known, expressed at ``reference_p1_ppm``.
    """

    energy_mev: float
    nv_max_frac: float
    phi0: float
    reference_p1_ppm: float | None = None
    fluence_range: tuple | None = None

    def __post_init__(self):
        if not 0 < self.nv_max_frac <= 1:
            raise ValidationError(f"nv_max_frac must be in (0, 1], got {self.nv_max_frac}")
        if not self.phi0 > 0:
            raise ValidationError("phi0 must be > 0")
        if self.reference_p1_ppm is not None and not self.reference_p1_ppm > 0:
            raise ValidationError("reference_p1_ppm must be > 0")
        if self.fluence_range is not None:
            lo, hi = self.fluence_range
            if not 0 < lo <= hi:
                raise ValidationError("fluence_range must satisfy 0 < lo <= hi")
            object.__setattr__(self, "fluence_range", (float(lo), float(hi)))

    def p1_scale(self, p1_ppm):
        if self.reference_p1_ppm is None:
            return 1.0
        return p1_ppm / self.reference_p1_ppm

    def effective_phi0(self, p1_ppm):
        return self.phi0 * self.p1_scale(p1_ppm)

    def calibrated_range(self, p1_ppm):
        """Fitted fluence span rescaled to ``p1_ppm``, or ``None``."""
        if self.fluence_range is None:
            return None
        s = self.p1_scale(p1_ppm)
        return (self.fluence_range[0] * s, self.fluence_range[1] * s)

    def to_dict(self):
        return {
            "energy_mev": self.energy_mev,
            "nv_max_frac": self.nv_max_frac,
            "phi0": self.phi0,
            "reference_p1_ppm": self.reference_p1_ppm,
            "fluence_range": list(self.fluence_range) if self.fluence_range else None,
        }


def _saturation(fluence, phi0):
    return -np.expm1(-np.asarray(fluence, dtype=float) / phi0)


def nv_total_after_anneal(p1_grown_ppm, plan, curve):
    """Total NV (ppm) after irradiation with ``plan`` and annealing."""
    if _energy_key(plan.energy_mev) != _energy_key(curve.energy_mev):
        raise EnergyMismatch(
            f"plan energy {plan.energy_mev} MeV does not match curve energy {curve.energy_mev} MeV"
        )
    if p1_grown_ppm < 0:
        raise ValidationError("p1_grown_ppm must be >= 0")
    if p1_grown_ppm == 0 or plan.fluence_e_per_cm2 == 0:
        return 0.0
    phi0 = curve.effective_phi0(p1_grown_ppm)
    return float(p1_grown_ppm * curve.nv_max_frac * _saturation(plan.fluence_e_per_cm2, phi0))


def fit_conversion_curve(series, p1_grown_ppm, energy, *, max_iter=200, xtol=1e-10):
    """Least-squares fit of the saturating curve to ``(fluence, nv_total_ppm)`` pairs.

    Starts from nv_max_frac = 1.2 * max observed NV/P1 (capped at 1) and
    phi0 = median fluence.
    """
    pts = sorted((float(f), float(n)) for f, n in series)
    if len(pts) < 3:
        raise InsufficientData("need at least 3 (fluence, nv_total) points")
    phi = np.array([f for f, _ in pts])
    nv = np.array([n for _, n in pts])
    if np.any(phi <= 0):
        raise ValidationError("fluences must be positive")
    if len(np.unique(phi)) != len(phi):
        raise ValidationError("fluences must be distinct")
    if not p1_grown_ppm > 0:
        raise ValidationError("p1_grown_ppm must be > 0")

    scale = float(np.median(phi))
    x = phi / scale

    def residuals(p):
        m, u = p
        return p1_grown_ppm * m * -np.expm1(-x / u) - nv

    def jacobian(p):
        m, u = p
        e = np.exp(-x / u)
        d_m = p1_grown_ppm * (1.0 - e)
        d_u = -p1_grown_ppm * m * e * x / u**2
        return np.column_stack([d_m, d_u])

    m0 = min(1.0, 1.2 * float(np.max(nv)) / p1_grown_ppm)
    if m0 <= 0:
        raise InsufficientData("no NV observed in the series")
    result = levenberg_marquardt(
        residuals, jacobian, [m0, 1.0], max_iter=max_iter, xtol=xtol,
        valid=lambda p: p[0] > 0 and p[1] > 0,
    )
    m, u = result.params
    if m > 1:
        raise NonConvergence(f"fitted nv_max_frac {m:.4g} exceeds 1")
    return ConversionCurve(
        energy_mev=float(energy),
        nv_max_frac=float(m),
        phi0=float(u * scale),
        reference_p1_ppm=float(p1_grown_ppm),
        fluence_range=(float(phi[0]), float(phi[-1])),
    )


def curve_sse(curve, series, p1_grown_ppm):
    """Sum of squared NV residuals (ppm²) of ``curve`` against ``series``."""
    total = 0.0
    for fluence, nv in series:
        pred = nv_total_after_anneal(p1_grown_ppm, IrradiationPlan(curve.energy_mev, fluence), curve)
        total += (pred - nv) ** 2
    return total


def read_series(text):
    """Parse ``fluence_e_per_cm2,nv_total_ppm`` CSV text."""
    return read_columns(text, ("fluence_e_per_cm2", "nv_total_ppm"))
