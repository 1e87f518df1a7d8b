"""``nvforge`` command-line interface.

Exit codes: 0 success, 1 usage error, 2 parse or validation error (bad input
file, bad config, bad value), 3 model error (including a failed ``regress``).
Errors print ``nvforge: <ErrorName>: message`` on standard error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np

from . import acceptance, comparison, report
from .config import RunConfig, format_points, model_to_config_text, parse_value
from .conversion import monotone, read_charge_state_curve
from .dataset import TABLE_NAMES, dump_csv, load_table
from .errors import ModelError, NVForgeError, ValidationError
from .growth import GrowthRecipe, fit_growth_law, p1_from_nc, read_growth_points
from .irradiation import fit_conversion_curve, read_series
from .model import calibrate_table1, default_model, predict
from .optimizer import (
    DesignTarget,
    Mode,
    OptimizationMode,
    Recipe,
    SearchSpace,
    design_process,
    find_optimal_fluence,
)
from .spectra import (
    Band270Calibration,
    SpectrumKind,
    decompose_pl,
    detect_bands,
    difference_spectrum,
    fit_hahn_echo,
    nv_from_absorption,
    p1_from_270_band,
    parse_spectrum,
    read_echo_csv,
)
from .spectra.core import to_absorption_coefficient

EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_MODEL = 3

# Flags that are shorthands for config keys. A flag and the equivalent
# ``--set``/``--config`` entry go through the same parser.
FLAG_KEYS = {
    "b_rate_khz_per_ppm": "coherence.b_rate_khz_per_ppm",
    "t2_other_us": "coherence.t2_other_us",
    "p1_fraction": "coherence.p1_fraction",
    "sigma_532_cm2": "absorption.sigma_532_cm2",
    "carbon_density_cm3": "units.carbon_density_cm3",
    "r_con_max_pct": "rules.r_con_max_pct",
    "r_re_max_pct": "rules.r_re_max_pct",
    "min_nv_minus_frac_pct": "optimizer.min_nv_minus_frac_pct",
    "binding": "optimizer.binding",
    "format": "output.format",
}

BUNDLED_ECHO = "echo_t2_100us.csv"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _read_text(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _common_options():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", metavar="FILE", help="key = value config file")
    g.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    g.add_argument("--format", choices=("json", "csv"), help="output format (output.format)")
    g.add_argument("--output", "-o", metavar="FILE", help="write the result here instead of stdout")
    g.add_argument("--b-rate-khz-per-ppm", metavar="K", help="nitrogen decoherence rate, 2π × kHz/ppm")
    g.add_argument("--t2-other-us", metavar="US", help="nitrogen-independent T2 in μs")
    g.add_argument("--p1-fraction", metavar="F", help="[P1]/[N]")
    g.add_argument("--sigma-532-cm2", metavar="S", help="NV absorption cross-section at 532 nm")
    g.add_argument("--carbon-density-cm3", metavar="N", help="carbon atom density")
    g.add_argument("--r-con-max-pct", metavar="P", help="charge-stability limit on R_con")
    g.add_argument("--r-re-max-pct", metavar="P", help="NV⁻-dominance limit on R_re")
    return p


def _p1_or_nc(sp):
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--nc", type=float, metavar="PPM", help="plasma N/C ratio in ppm")
    g.add_argument("--p1", type=float, metavar="PPM", help="as-grown P1 in ppm")


def build_parser():
    common = _common_options()
    parser = _Parser(prog="nvforge", description="NV-centre creation model and spectral analysis toolkit.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    sp = sub.add_parser("predict", parents=[common], help="forward prediction for one recipe")
    _p1_or_nc(sp)
    sp.add_argument("--energy", type=float, default=2.0, metavar="MEV")
    sp.add_argument("--fluence", type=float, default=0.0, metavar="E_PER_CM2")

    sp = sub.add_parser("optimize", parents=[common], help="optimal fluence for a P1 and energy")
    _p1_or_nc(sp)
    sp.add_argument("--energy", type=float, default=2.0, metavar="MEV")
    sp.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.CHARGE_STABILITY.value)
    sp.add_argument("--binding", help="default | r_re (optimizer.binding)")
    sp.add_argument("--min-nv-minus-frac-pct", metavar="P", help="max-nv threshold on NV⁻/NV")
    sp.add_argument("--extrapolate", action="store_true",
                    help="search past the fluence span the conversion curve was fitted on")

    sp = sub.add_parser("design", parents=[common], help="best N/C × energy recipe on a grid")
    sp.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.MAX_NV.value)
    sp.add_argument("--binding", help="default | r_re (optimizer.binding)")
    sp.add_argument("--min-nv-minus-frac-pct", metavar="P")
    sp.add_argument("--min-t2-us", type=float, metavar="US")
    sp.add_argument("--min-nv-minus-ppb", type=float, metavar="PPB")
    sp.add_argument("--nc-min", type=float, default=150.0)
    sp.add_argument("--nc-max", type=float, default=1e6)
    sp.add_argument("--nc-points", type=int, default=40)
    sp.add_argument("--energy", type=float, action="append", metavar="MEV",
                    help="restrict to these energies (repeatable); default all calibrated")
    sp.add_argument("--jobs", type=int, default=1, help="worker threads for grid evaluation")

    sp = sub.add_parser("fit-pl", parents=[common], help="NV⁻/NV⁰ decomposition of a PL spectrum")
    sp.add_argument("--spectrum", required=True, metavar="FILE")
    sp.add_argument("--ref-minus", required=True, metavar="FILE")
    sp.add_argument("--ref-zero", required=True, metavar="FILE")
    sp.add_argument("--plot", metavar="SVG")

    sp = sub.add_parser("fit-echo", parents=[common], help="Hahn-echo T2 fit of time_us,signal CSV")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--data", metavar="FILE")
    g.add_argument("--bundled", action="store_true", help="use the bundled synthetic trace (T2 = 100 μs)")
    sp.add_argument("--plot", metavar="SVG")

    sp = sub.add_parser("absorption", parents=[common], help="NV concentration and band report from UV-Vis")
    sp.add_argument("--spectrum", required=True, metavar="FILE")
    sp.add_argument("--before", metavar="FILE", help="as-grown spectrum to subtract first")
    sp.add_argument("--thickness-cm", type=float, metavar="CM")
    sp.add_argument("--absorbance", action="store_true", help="input is decadic absorbance")
    sp.add_argument("--wavelength-nm", type=float, default=532.0)
    sp.add_argument("--band-report", action="store_true")
    sp.add_argument("--threshold-factor", type=float, default=3.0)
    sp.add_argument("--p1-reference", metavar="STRENGTH:P1",
                    help="270 nm band calibration: reference band strength and its P1 in ppm")
    sp.add_argument("--plot", metavar="SVG")

    sp = sub.add_parser("calibrate", parents=[common], help="fit model curves and write a config file")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--table", choices=TABLE_NAMES)
    g.add_argument("--csv", metavar="FILE")
    sp.add_argument("--kind", choices=("growth", "conversion", "charge-state"),
                    help="what --csv contains")
    sp.add_argument("--p1", type=float, metavar="PPM", help="as-grown P1 for a conversion series")
    sp.add_argument("--energy", type=float, metavar="MEV", help="energy of a conversion series")
    sp.add_argument("--write", metavar="FILE", help="config file to write (default: stdout)")

    sp = sub.add_parser("regress", parents=[common], help="run the acceptance checks")
    sp.add_argument("--verbose", "-v", action="store_true")

    sp = sub.add_parser("dataset", parents=[common], help="embedded tables")
    sp.add_argument("action", choices=("dump",))
    sp.add_argument("--table", choices=TABLE_NAMES, required=True)

    sp = sub.add_parser("report", parents=[common], help="Table 2 comparison with SVG figures")
    sp.add_argument("--out", required=True, metavar="DIR")
    return parser


# -- helpers -----------------------------------------------------------------

def load_config(args):
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    cfg = cfg.with_pairs(args.set)
    flags = {}
    for attr, key in FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            flags[key] = parse_value(key, str(value))
    return cfg.merged(flags)


def _emit(args, cfg, obj, text=None):
    out = text if text is not None else report.render(obj, cfg.output_format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _mode(args, cfg):
    return OptimizationMode(Mode(args.mode), **cfg.mode_overrides())


def _p1(args, model):
    if args.p1 is not None:
        return args.p1, None
    return p1_from_nc(GrowthRecipe(args.nc), model.growth_law), args.nc


# -- subcommands -------------------------------------------------------------

def cmd_predict(args, cfg, model):
    p1, nc = _p1(args, model)
    pred = predict(p1, args.energy, args.fluence, model, nc_ratio_ppm=nc)
    return pred.to_dict()


def cmd_optimize(args, cfg, model):
    p1, nc = _p1(args, model)
    mode = _mode(args, cfg)
    opt = find_optimal_fluence(p1, args.energy, mode, model, within_calibration=not args.extrapolate)
    pred = predict(p1, args.energy, opt.fluence, model, nc_ratio_ppm=nc)
    recipe = Recipe(
        nc_ratio_ppm=nc, energy_mev=args.energy, fluence_e_per_cm2=opt.fluence, p1_ppm=p1,
        predicted=pred.treated, predicted_t2_s=pred.t2_s, fom=pred.sensitivity_after.fom,
        fluence_limited_by=opt.limited_by,
    )
    out = recipe.to_dict()
    out["mode"] = mode.to_dict()
    out["search_bounds"] = list(opt.bounds)
    out["p1_scaling"] = (
        "model assumption: the conversion curve's characteristic fluence scales "
        "linearly with as-grown P1"
    )
    return out


def cmd_design(args, cfg, model):
    if args.nc_points < 1 or not 0 < args.nc_min <= args.nc_max:
        raise ValidationError("need nc_points >= 1 and 0 < nc_min <= nc_max")
    grid = tuple(np.geomspace(args.nc_min, args.nc_max, args.nc_points).tolist())
    space = SearchSpace(grid, tuple(args.energy) if args.energy else None)
    target = DesignTarget(
        _mode(args, cfg),
        None if args.min_t2_us is None else args.min_t2_us * 1e-6,
        args.min_nv_minus_ppb,
    )
    if args.jobs > 1:
        with ThreadPoolExecutor(args.jobs) as pool:
            recipe = design_process(target, space, model, map_fn=pool.map)
    else:
        recipe = design_process(target, space, model)
    out = recipe.to_dict()
    out["mode"] = target.mode.to_dict()
    out["grid"] = {"nc_points": len(grid), "nc_min": grid[0], "nc_max": grid[-1],
                   "energies": list(space.energies or model.energies)}
    return out


def cmd_fit_pl(args, cfg, model):
    kind = SpectrumKind.PL_COUNTS
    spectrum = parse_spectrum(_read_text(args.spectrum), kind)
    ref_minus = parse_spectrum(_read_text(args.ref_minus), kind)
    ref_zero = parse_spectrum(_read_text(args.ref_zero), kind)
    fit = decompose_pl(spectrum, ref_minus, ref_zero)
    if args.plot:
        from .plotting import plot_pl_fit

        plot_pl_fit(spectrum, ref_minus, ref_zero, fit, args.plot)
    return fit.to_dict()


def bundled_echo_text():
    return resources.files("nvforge").joinpath("data", BUNDLED_ECHO).read_text(encoding="utf-8")


def cmd_fit_echo(args, cfg, model):
    text = bundled_echo_text() if args.bundled else _read_text(args.data)
    t, s = read_echo_csv(text)
    fit = fit_hahn_echo(t, s)
    if args.plot:
        from .plotting import plot_echo_fit

        plot_echo_fit(t, s, fit, args.plot)
    return fit.to_dict()


def _calibration_pair(text):
    parts = text.replace(",", ":").split(":")
    if len(parts) != 2:
        raise ValidationError("--p1-reference expects STRENGTH:P1")
    try:
        return Band270Calibration(float(parts[0]), float(parts[1]))
    except ValueError:
        raise ValidationError("--p1-reference values must be numbers") from None


def cmd_absorption(args, cfg, model):
    kind = SpectrumKind.ABSORBANCE if args.absorbance else SpectrumKind.ABSORPTION_COEFFICIENT
    if args.absorbance and args.thickness_cm is None:
        raise ValidationError("--absorbance needs --thickness-cm")
    spectra = [parse_spectrum(_read_text(args.spectrum), kind)]
    if args.before:
        spectra.append(parse_spectrum(_read_text(args.before), kind))
    spectra = [to_absorption_coefficient(s, args.thickness_cm) for s in spectra]
    spectrum = difference_spectrum(spectra[0], spectra[1]) if args.before else spectra[0]
    mu = spectrum.value_at(args.wavelength_nm)
    conc = nv_from_absorption(
        max(mu, 0.0), cfg.sigma_532_cm2, cfg.sigma_532_err_cm2, cfg.carbon_density_cm3,
    )
    out = {
        "wavelength_nm": args.wavelength_nm,
        "mu_cm": mu,
        "difference": bool(args.before),
        "warnings": list(spectrum.warnings) + (["negative absorption clipped to 0"] if mu < 0 else []),
        **conc.to_dict(),
    }
    bands = None
    if args.band_report:
        bands = detect_bands(spectrum, args.threshold_factor)
        out["band_report"] = bands.to_dict()
        out["over_irradiation_warning"] = bands.over_irradiation_warning
    if args.p1_reference:
        out["p1_from_270_ppm"] = p1_from_270_band(spectrum, _calibration_pair(args.p1_reference))
    if args.plot:
        from .plotting import plot_absorption

        plot_absorption(spectrum, bands, args.plot)
    return out


def cmd_calibrate(args, cfg, model):
    summary = {}
    if args.table == "table1":
        fitted = calibrate_table1()
        fitted = cfg.apply(fitted) if cfg.values else fitted
        text = model_to_config_text(fitted, "calibrated on table1")
        summary = {
            "conversion_curves": {f"{e:g}": fitted.curve_for(e).to_dict() for e in fitted.energies},
            "charge_state": fitted.charge_state.to_dict(),
        }
    elif args.table == "table2":
        pts = [(r.nc_ppm, r.p1_grown_ppm) for r in load_table("table2")
               if r.series == "Nitrogen series #1" and r.p1_grown_ppm is not None]
        law = fit_growth_law(pts)
        text = (
            "# growth law fitted on table2 Nitrogen series #1\n"
            f"growth.coefficient_a = {law.coefficient_a:.9g}\n"
            f"growth.exponent_b = {law.exponent_b:.9g}\n"
        )
        summary = {"growth_law": law.to_dict(), "points": len(pts)}
    else:
        if args.kind is None:
            raise ValidationError("--csv needs --kind")
        data = _read_text(args.csv)
        if args.kind == "growth":
            law = fit_growth_law(read_growth_points(data))
            text = f"growth.coefficient_a = {law.coefficient_a:.9g}\ngrowth.exponent_b = {law.exponent_b:.9g}\n"
            summary = {"growth_law": law.to_dict()}
        elif args.kind == "conversion":
            if args.p1 is None or args.energy is None:
                raise ValidationError("a conversion series needs --p1 and --energy")
            curve = fit_conversion_curve(read_series(data), args.p1, args.energy)
            e = f"{args.energy:g}"
            text = (
                f"conversion.{e}.nv_max_frac = {curve.nv_max_frac:.9g}\n"
                f"conversion.{e}.phi0 = {curve.phi0:.9g}\n"
                f"conversion.{e}.reference_p1_ppm = {curve.reference_p1_ppm:.9g}\n"
                f"conversion.{e}.fluence_min = {curve.fluence_range[0]:.9g}\n"
                f"conversion.{e}.fluence_max = {curve.fluence_range[1]:.9g}\n"
            )
            summary = {"conversion_curve": curve.to_dict()}
        else:
            curve = monotone(read_charge_state_curve(data))
            text = f"charge_state.points = {format_points(curve.points)}\n"
            summary = {"charge_state": curve.to_dict()}
    if args.write:
        with open(args.write, "w", encoding="utf-8") as fh:
            fh.write(text)
        summary["written"] = args.write
        return summary
    return {"__text__": text}


def cmd_regress(args, cfg, model):
    results = acceptance.run_all()
    lines = []
    for r in results:
        lines.append(r.line())
        if args.verbose or not r.passed:
            lines.extend(f"      {d}" for d in r.details)
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return {"__text__": "\n".join(lines) + "\n", "__exit__": 0 if passed == len(results) else EXIT_MODEL}


def cmd_dataset(args, cfg, model):
    if cfg.output_format == "csv":
        return {"__text__": dump_csv(args.table)}
    return [r.to_dict() for r in load_table(args.table)]


def cmd_report(args, cfg, model):
    from .plotting import model_figures

    os.makedirs(args.out, exist_ok=True)
    rows = comparison.table2_comparison(model)
    with open(os.path.join(args.out, "table2_comparison.csv"), "w", encoding="utf-8") as fh:
        fh.write(report.to_csv(rows))
    with open(os.path.join(args.out, "table2_comparison.json"), "w", encoding="utf-8") as fh:
        fh.write(report.to_json(rows))
    figures = model_figures(model, args.out, rows)
    return {
        "rows": rows,
        "files": sorted(
            [os.path.basename(p) for p in figures] + ["table2_comparison.csv", "table2_comparison.json"]
        ),
        "out_dir": args.out,
    }


COMMANDS = {
    "predict": cmd_predict,
    "optimize": cmd_optimize,
    "design": cmd_design,
    "fit-pl": cmd_fit_pl,
    "fit-echo": cmd_fit_echo,
    "absorption": cmd_absorption,
    "calibrate": cmd_calibrate,
    "regress": cmd_regress,
    "dataset": cmd_dataset,
    "report": cmd_report,
}

# Subcommands that never touch the process model.
_NO_MODEL = {"fit-pl", "fit-echo", "absorption", "dataset", "regress"}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"nvforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args)
        model = None if args.command in _NO_MODEL else cfg.apply(default_model())
        result = COMMANDS[args.command](args, cfg, model)
        code = 0
        if isinstance(result, dict) and "__text__" in result:
            code = result.get("__exit__", 0)
            _emit(args, cfg, None, result["__text__"])
        else:
            _emit(args, cfg, result)
        return code
    except ModelError as exc:
        print(f"nvforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (ValidationError, OSError) as exc:
        print(f"nvforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NVForgeError as exc:
        print(f"nvforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODEL


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
