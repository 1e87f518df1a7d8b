"""Inverse design: optimal irradiation fluence and full-recipe grid search."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import coherence
from .errors import (
    NoFeasibleFluence,
    NoFeasibleRecipe,
    NonMonotoneConstraint,
    ValidationError,
)
from .growth import GrowthRecipe, p1_from_nc
from .model import asgrown_state, default_model, predict, treat
from .state import IrradiationPlan, MaterialState, conversion_ratios

FLUENCE_BOUNDS = (1e15, 1e20)
DEFAULT_NC_GRID = tuple(np.geomspace(150.0, 1e6, 40).tolist())


class Mode(str, enum.Enum):
    CHARGE_STABILITY = "charge-stability"
    MAX_NV = "max-nv"


@dataclass(frozen=True)
class OptimizationMode:
    """Constraint that an optimal fluence must satisfy.

    ChargeStability binds on R_con < ``r_con_limit_pct`` (or on R_re with
    ``binding="r_re"``). MaxNv binds on NV⁻/NV ≥ ``min_nv_minus_frac_pct``
    (or on R_re < ``r_re_limit_pct`` with ``binding="r_re"``).
    """

    kind: Mode = Mode.CHARGE_STABILITY
    r_con_limit_pct: float = 10.0
    min_nv_minus_frac_pct: float = 50.0
    r_re_limit_pct: float = 35.0
    binding: str = "default"

    def __post_init__(self):
        object.__setattr__(self, "kind", Mode(self.kind))
        for name in ("r_con_limit_pct", "min_nv_minus_frac_pct", "r_re_limit_pct"):
            v = getattr(self, name)
            if not 0 < v < 100:
                raise ValidationError(f"{name} must be in (0, 100), got {v}")
        if self.binding not in ("default", "r_re"):
            raise ValidationError("binding must be 'default' or 'r_re'")

    def satisfied(self, grown, treated):
        if treated.nv_total_ppb == 0:
            return True
        ratios = conversion_ratios(grown, treated)
        if self.kind is Mode.CHARGE_STABILITY:
            value = ratios.r_re if self.binding == "r_re" else ratios.r_con
            return 100.0 * value < self.r_con_limit_pct
        if self.binding == "r_re":
            return 100.0 * ratios.r_re < self.r_re_limit_pct
        return 100.0 * treated.nv_minus_fraction >= self.min_nv_minus_frac_pct

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "r_con_limit_pct": self.r_con_limit_pct,
            "min_nv_minus_frac_pct": self.min_nv_minus_frac_pct,
            "r_re_limit_pct": self.r_re_limit_pct,
            "binding": self.binding,
        }


@dataclass(frozen=True)
class FluenceOptimum:
    fluence: float
    limited_by: str  # "constraint", "calibration_range" or "search_bound"
    bounds: tuple


def _as_mode(mode):
    return mode if isinstance(mode, OptimizationMode) else OptimizationMode(Mode(mode))


def find_optimal_fluence(p1_grown_ppm, energy, mode, model=None, bounds=FLUENCE_BOUNDS,
                         resolution=0.01, within_calibration=True, probes=41):
    """Largest fluence in ``bounds`` whose predicted treatment satisfies ``mode``.

    The constraint is probed on a log grid first and must switch from
    satisfied to violated at most once. With ``within_calibration`` the upper
    bound is clipped to the fluence span the conversion curve was fitted on
    (rescaled to this P1), so the search never extrapolates the fit.
    """
    model = model or default_model()
    mode = _as_mode(mode)
    curve = model.curve_for(energy)
    lo, hi = float(bounds[0]), float(bounds[1])
    limit = "search_bound"
    cal = curve.calibrated_range(p1_grown_ppm) if within_calibration else None
    if cal is not None and cal[1] < hi:
        hi, limit = max(cal[1], lo), "calibration_range"
    grown = asgrown_state(p1_grown_ppm, model)

    def ok(fluence):
        return mode.satisfied(grown, treat(grown, IrradiationPlan(energy, fluence), model))

    flags = [ok(f) for f in np.geomspace(lo, hi, probes)]
    switches = sum(1 for a, b in zip(flags, flags[1:]) if a != b)
    if switches > 1 or (switches == 1 and not flags[0]):
        raise NonMonotoneConstraint("constraint is not monotone in fluence")
    if not flags[0]:
        raise NoFeasibleFluence(
            f"constraint violated already at {lo:.3g} e/cm2 for P1 = {p1_grown_ppm} ppm"
        )
    if flags[-1]:
        return FluenceOptimum(hi, limit, (lo, hi))
    a, b = math.log(lo), math.log(hi)
    step = math.log1p(resolution)
    while b - a > step:
        mid = 0.5 * (a + b)
        if ok(math.exp(mid)):
            a = mid
        else:
            b = mid
    return FluenceOptimum(math.exp(a), "constraint", (lo, hi))


def optimal_fluence(p1_grown_ppm, energy, mode, model=None, **kwargs):
    return find_optimal_fluence(p1_grown_ppm, energy, mode, model, **kwargs).fluence


def scaled_fluence_hint(p1_ppm, reference_p1_ppm, reference_fluence):
    """Fluence scaled linearly with P1 from a known optimum.

    Heuristic only: the measured evidence is a positive correlation between
    optimal fluence and P1, not proportionality.
    """
    if not reference_p1_ppm > 0:
        raise ValidationError("reference_p1_ppm must be > 0")
    return reference_fluence * p1_ppm / reference_p1_ppm


@dataclass(frozen=True)
class DesignTarget:
    mode: OptimizationMode = field(default_factory=OptimizationMode)
    min_t2_s: float | None = None
    min_nv_minus_ppb: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", _as_mode(self.mode))


@dataclass(frozen=True)
class SearchSpace:
    nc_grid: tuple = DEFAULT_NC_GRID
    energies: tuple | None = None  # None → every energy the model is calibrated for


@dataclass(frozen=True)
class Recipe:
    nc_ratio_ppm: float
    energy_mev: float
    fluence_e_per_cm2: float
    p1_ppm: float
    predicted: MaterialState
    predicted_t2_s: float
    fom: float
    fluence_limited_by: str

    def key(self):
        return (-self.fom, self.nc_ratio_ppm, self.fluence_e_per_cm2)

    def to_dict(self):
        return {
            "nc_ratio_ppm": self.nc_ratio_ppm,
            "energy_mev": self.energy_mev,
            "fluence_e_per_cm2": self.fluence_e_per_cm2,
            "fluence_limited_by": self.fluence_limited_by,
            "p1_ppm": self.p1_ppm,
            "predicted": self.predicted.to_dict(),
            "nv_minus_frac_pct": 100.0 * (self.predicted.nv_minus_fraction or 0.0),
            "predicted_t2_us": self.predicted_t2_s * 1e6,
            "fom": self.fom,
        }


def evaluate_point(nc, energy, target, model):
    """Recipe for one grid point, or ``None`` if no fluence meets the target."""
    p1 = p1_from_nc(GrowthRecipe(nc), model.growth_law)
    if p1 <= 0:
        return None
    t2 = coherence.t2_from_p1(p1, model.coherence)
    if target.min_t2_s is not None and t2 < target.min_t2_s:
        return None
    try:
        opt = find_optimal_fluence(p1, energy, target.mode, model)
    except NoFeasibleFluence:
        return None
    pred = predict(p1, energy, opt.fluence, model)
    if target.min_nv_minus_ppb is not None and pred.treated.nv_minus_ppb < target.min_nv_minus_ppb:
        return None
    return Recipe(
        nc_ratio_ppm=float(nc),
        energy_mev=float(energy),
        fluence_e_per_cm2=opt.fluence,
        p1_ppm=p1,
        predicted=pred.treated,
        predicted_t2_s=pred.t2_s,
        fom=pred.sensitivity_after.fom,
        fluence_limited_by=opt.limited_by,
    )


def grid_points(space, model):
    energies = space.energies if space.energies is not None else model.energies
    return [(float(nc), float(e)) for nc in space.nc_grid for e in energies]


def design_process(target=None, search_space=None, model=None, map_fn=map):
    """Best recipe on an exhaustive N/C × energy grid.

    ``map_fn`` may be a parallel, order-preserving map (for instance
    ``executor.map``); the reduction is done in grid order either way. Ties in
    figure of merit go to the lowest N/C, then the lowest fluence.
    """
    model = model or default_model()
    target = target or DesignTarget()
    space = search_space or SearchSpace()
    points = grid_points(space, model)
    if not points:
        raise NoFeasibleRecipe("empty search space")
    recipes = [r for r in map_fn(lambda p: evaluate_point(p[0], p[1], target, model), points) if r]
    if not recipes:
        msg = "no grid point satisfies the target"
        if target.min_t2_s is not None:
            best_t2 = max(coherence.t2_from_p1(p1_from_nc(GrowthRecipe(nc), model.growth_law), model.coherence)
                          for nc, _ in points)
            msg += f" (longest predicted T2 on the grid is {best_t2 * 1e6:.4g} us)"
        raise NoFeasibleRecipe(msg)
    return min(recipes, key=Recipe.key)
