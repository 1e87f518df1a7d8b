"""Run configuration: line-oriented ``key = value`` files with dotted keys.

Recognised keys::

    coherence.b_rate_khz_per_ppm      coherence.t2_other_us     coherence.p1_fraction
    absorption.sigma_532_cm2          absorption.sigma_532_err_cm2
    units.carbon_density_cm3
    irradiation.yield.<MeV>           (ppm of vacancies per e/cm^2)
    rules.r_con_max_pct               rules.r_re_max_pct
    optimizer.min_nv_minus_frac_pct   optimizer.binding         (default | r_re)
    growth.coefficient_a              growth.exponent_b
    growth.asgrown_nv_p1_ratio
    conversion.<MeV>.nv_max_frac      conversion.<MeV>.phi0
    conversion.<MeV>.reference_p1_ppm conversion.<MeV>.fluence_min
    conversion.<MeV>.fluence_max
    charge_state.points               ("r_re:frac, r_re:frac, ...", percent)
    sensitivity.bright_minus          sensitivity.bright_zero
    output.format                     (json | csv)

Blank lines and lines starting with ``#`` are ignored. Unknown or repeated
keys are errors. Values are checked by the types that own them when the
config is applied to a model.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from . import coherence, conversion, growth
from .errors import ParseError, ValidationError
from .irradiation import ConversionCurve, VacancyYieldTable, _energy_key
from .spectra.core import SIGMA_532_CM2, SIGMA_532_ERR_CM2
from .state import CARBON_DENSITY_CM3

FLOAT_KEYS = {
    "coherence.b_rate_khz_per_ppm",
    "coherence.t2_other_us",
    "coherence.p1_fraction",
    "absorption.sigma_532_cm2",
    "absorption.sigma_532_err_cm2",
    "units.carbon_density_cm3",
    "rules.r_con_max_pct",
    "rules.r_re_max_pct",
    "optimizer.min_nv_minus_frac_pct",
    "growth.coefficient_a",
    "growth.exponent_b",
    "growth.asgrown_nv_p1_ratio",
    "sensitivity.bright_minus",
    "sensitivity.bright_zero",
}
CHOICE_KEYS = {
    "optimizer.binding": ("default", "r_re"),
    "output.format": ("json", "csv"),
}
CURVE_FIELDS = ("nv_max_frac", "phi0", "reference_p1_ppm", "fluence_min", "fluence_max")

_YIELD_RE = re.compile(r"^irradiation\.yield\.(?P<e>[0-9.]+)$")
_CURVE_RE = re.compile(r"^conversion\.(?P<e>[0-9.]+)\.(?P<f>[a-z0-9_]+)$")


def _float(key, text, line=None):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"{key}: expected a number, got {text!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"{key}: value must be finite", line)
    return v


def parse_points(text, line=None):
    """``"1.3:86.2, 12.4:76.7"`` → ((1.3, 86.2), (12.4, 76.7))."""
    pts = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 2:
            raise ParseError(f"charge_state.points: bad knot {item!r} (want r_re:frac)", line)
        pts.append((_float("charge_state.points", parts[0], line), _float("charge_state.points", parts[1], line)))
    return tuple(pts)


def format_points(points):
    return ", ".join(f"{r:.17g}:{f:.17g}" for r, f in points)


def parse_value(key, text, line=None):
    """Validate ``key`` and convert its textual value."""
    text = text.strip()
    if key in FLOAT_KEYS:
        return _float(key, text, line)
    if key in CHOICE_KEYS:
        if text not in CHOICE_KEYS[key]:
            raise ParseError(f"{key}: must be one of {', '.join(CHOICE_KEYS[key])}", line)
        return text
    if key == "charge_state.points":
        return parse_points(text, line)
    if _YIELD_RE.match(key):
        return _float(key, text, line)
    m = _CURVE_RE.match(key)
    if m and m.group("f") in CURVE_FIELDS:
        return _float(key, text, line)
    raise ParseError(f"unknown config key {key!r}", line)


def parse_config_text(text):
    values = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError(f"expected 'key = value', got {stripped!r}", n)
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in values:
            raise ParseError(f"duplicate key {key!r}", n)
        values[key] = parse_value(key, value, n)
    return values


@dataclass(frozen=True)
class RunConfig:
    values: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text):
        return cls(parse_config_text(text))

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def merged(self, overrides):
        """New config with ``overrides`` (already-parsed values) taking precedence."""
        return RunConfig({**self.values, **overrides})

    def with_pairs(self, pairs):
        """Apply ``key=value`` strings, e.g. from repeated ``--set`` flags."""
        extra = {}
        for item in pairs:
            if "=" not in item:
                raise ParseError(f"--set expects key=value, got {item!r}")
            key, _, value = item.partition("=")
            key = key.strip()
            extra[key] = parse_value(key, value)
        return self.merged(extra)

    def get(self, key, default=None):
        return self.values.get(key, default)

    # -- derived objects ------------------------------------------------------

    @property
    def output_format(self):
        return self.values.get("output.format", "json")

    @property
    def sigma_532_cm2(self):
        return self.values.get("absorption.sigma_532_cm2", SIGMA_532_CM2)

    @property
    def sigma_532_err_cm2(self):
        return self.values.get("absorption.sigma_532_err_cm2", SIGMA_532_ERR_CM2)

    @property
    def carbon_density_cm3(self):
        return self.values.get("units.carbon_density_cm3", CARBON_DENSITY_CM3)

    def mode_overrides(self):
        out = {}
        if "rules.r_con_max_pct" in self.values:
            out["r_con_limit_pct"] = self.values["rules.r_con_max_pct"]
        if "rules.r_re_max_pct" in self.values:
            out["r_re_limit_pct"] = self.values["rules.r_re_max_pct"]
        if "optimizer.min_nv_minus_frac_pct" in self.values:
            out["min_nv_minus_frac_pct"] = self.values["optimizer.min_nv_minus_frac_pct"]
        if "optimizer.binding" in self.values:
            out["binding"] = self.values["optimizer.binding"]
        return out

    def _coherence(self, base):
        v = self.values
        b = base.b_rate
        if "coherence.b_rate_khz_per_ppm" in v:
            b = coherence.b_rate_from_khz(v["coherence.b_rate_khz_per_ppm"])
        t2o = v["coherence.t2_other_us"] * 1e-6 if "coherence.t2_other_us" in v else base.t2_other_s
        frac = v.get("coherence.p1_fraction", base.p1_fraction)
        return coherence.CoherenceParams(b, t2o, frac)

    def _curves(self, base):
        grouped = {}
        for key, value in self.values.items():
            m = _CURVE_RE.match(key)
            if m:
                grouped.setdefault(_energy_key(m.group("e")), {})[m.group("f")] = value
        curves = dict(base)
        for energy, fields in sorted(grouped.items()):
            old = curves.get(energy)
            if old is None and not {"nv_max_frac", "phi0"} <= set(fields):
                raise ValidationError(
                    f"conversion curve for new energy {energy} MeV needs nv_max_frac and phi0"
                )
            lo, hi = (old.fluence_range if old and old.fluence_range else (None, None))
            lo = fields.get("fluence_min", lo)
            hi = fields.get("fluence_max", hi)
            if (lo is None) != (hi is None):
                lo = lo if lo is not None else hi
                hi = hi if hi is not None else lo
            curves[energy] = ConversionCurve(
                energy_mev=energy,
                nv_max_frac=fields.get("nv_max_frac", old.nv_max_frac if old else None),
                phi0=fields.get("phi0", old.phi0 if old else None),
                reference_p1_ppm=fields.get("reference_p1_ppm", old.reference_p1_ppm if old else None),
                fluence_range=None if lo is None else (lo, hi),
            )
        return curves

    def apply(self, model):
        """Return ``model`` with every model-level override applied."""
        v = self.values
        changes = {}
        if any(k.startswith("coherence.") for k in v):
            changes["coherence"] = self._coherence(model.coherence)
        if "growth.coefficient_a" in v or "growth.exponent_b" in v:
            changes["growth_law"] = growth.GrowthLaw(
                v.get("growth.coefficient_a", model.growth_law.coefficient_a),
                v.get("growth.exponent_b", model.growth_law.exponent_b),
            )
        if "growth.asgrown_nv_p1_ratio" in v:
            ratio = v["growth.asgrown_nv_p1_ratio"]
            if not 0 <= ratio < 1:
                raise ValidationError("growth.asgrown_nv_p1_ratio must be in [0, 1)")
            changes["asgrown_ratio"] = ratio
        yields = {float(m.group("e")): val for k, val in v.items() if (m := _YIELD_RE.match(k))}
        if yields:
            changes["yield_table"] = VacancyYieldTable({**model.yield_table.entries, **yields})
        if any(_CURVE_RE.match(k) for k in v):
            changes["conversion_curves"] = self._curves(model.conversion_curves)
        if "charge_state.points" in v:
            changes["charge_state"] = conversion.ChargeStateCurve(v["charge_state.points"])
        if "rules.r_con_max_pct" in v:
            changes["r_con_limit_pct"] = v["rules.r_con_max_pct"]
        if "rules.r_re_max_pct" in v:
            changes["r_re_limit_pct"] = v["rules.r_re_max_pct"]
        for name in ("bright_minus", "bright_zero"):
            key = f"sensitivity.{name}"
            if key in v:
                if not v[key] > 0:
                    raise ValidationError(f"{key} must be > 0")
                changes[name] = v[key]
        return model.with_changes(**changes) if changes else model


def model_to_config_text(model, header=None):
    """Serialise the calibrated parts of ``model`` as config lines."""
    lines = []
    if header:
        lines += [f"# {h}" for h in header.splitlines()]
    lines.append(f"growth.coefficient_a = {model.growth_law.coefficient_a:.17g}")
    lines.append(f"growth.exponent_b = {model.growth_law.exponent_b:.17g}")
    for energy in model.energies:
        c = model.curve_for(energy)
        e = f"{energy:g}"
        lines.append(f"conversion.{e}.nv_max_frac = {c.nv_max_frac:.17g}")
        lines.append(f"conversion.{e}.phi0 = {c.phi0:.17g}")
        if c.reference_p1_ppm is not None:
            lines.append(f"conversion.{e}.reference_p1_ppm = {c.reference_p1_ppm:.17g}")
        if c.fluence_range is not None:
            lines.append(f"conversion.{e}.fluence_min = {c.fluence_range[0]:.17g}")
            lines.append(f"conversion.{e}.fluence_max = {c.fluence_range[1]:.17g}")
    lines.append(f"charge_state.points = {format_points(model.charge_state.points)}")
    return "\n".join(lines) + "\n"
