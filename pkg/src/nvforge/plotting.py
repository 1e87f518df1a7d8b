"""SVG sidecar figures. Uses the non-interactive Agg backend."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import coherence  # noqa: E402
from .dataset import load_table  # noqa: E402
from .irradiation import nv_total_after_anneal  # noqa: E402
from .model import implied_nv_total_ppm  # noqa: E402
from .spectra.echo import echo_model  # noqa: E402
from .spectra.pl import resample  # noqa: E402
from .state import IrradiationPlan  # noqa: E402

# Fixed metadata keeps SVG output byte-stable between runs.
_SVG_META = {"Date": None, "Creator": None}


def _save(fig, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    plt.rcParams["svg.hashsalt"] = "nvforge"
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def plot_conversion_curves(model, path, p1_ppm=2.2):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    phi = np.geomspace(1e15, 1e19, 200)
    for energy in model.energies:
        curve = model.curve_for(energy)
        nv = [nv_total_after_anneal(p1_ppm, IrradiationPlan(energy, f), curve) for f in phi]
        ax.plot(phi, nv, label=f"{energy:g} MeV model")
    rows = load_table("table1")
    for energy, marker in ((2.0, "o"), (1.0, "s")):
        pts = [(r.fluence, implied_nv_total_ppm(r)) for r in rows if r.energy_mev == energy]
        if pts:
            x, y = zip(*pts)
            ax.plot(x, y, marker, mfc="none", label=f"{energy:g} MeV data")
    ax.set_xscale("log")
    ax.set_xlabel("fluence (e/cm$^2$)")
    ax.set_ylabel("total NV (ppm)")
    ax.set_title(f"NV creation, P1 = {p1_ppm:g} ppm")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_charge_state(model, path):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    cs = model.charge_state
    r = np.linspace(0, max(40.0, float(cs.r_re[-1]) * 1.1), 400)
    ax.plot(r, np.interp(r, cs.r_re, cs.frac), label="calibrated curve")
    ax.plot(cs.r_re, cs.frac, "o", mfc="none", label="knots")
    ax.axvline(model.r_re_limit_pct, color="grey", ls="--", lw=0.8)
    ax.set_xlabel("R$_{re}$ (%)")
    ax.set_ylabel("NV$^-$/NV (%)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_t2_vs_nitrogen(model, path):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    n = np.geomspace(0.05, 30, 200)
    ax.plot(n, [coherence.t2_from_nitrogen(x, model.coherence) * 1e6 for x in n], label="model")
    pts = [
        (coherence.nitrogen_from_p1(r.p1_grown_ppm, model.coherence), r.t2_asgrown_us)
        for r in load_table("table2") if r.p1_grown_ppm is not None and r.t2_asgrown_us is not None
    ]
    if pts:
        x, y = zip(*pts)
        ax.plot(x, y, "o", mfc="none", label="as-grown data")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("[N] (ppm)")
    ax.set_ylabel("T$_2$ ($\\mu$s)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_comparison(rows, path):
    """Measured vs predicted treated NV⁻/NV for the Table 2 rows that have it."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    pts = [(r["nc_ppm"], r["nv_minus_frac_treated_pct"], r["nv_minus_frac_model_pct"])
           for r in rows if r["nv_minus_frac_treated_pct"] is not None]
    if pts:
        nc, meas, pred = zip(*pts)
        ax.plot(nc, meas, "o", mfc="none", label="measured")
        ax.plot(nc, pred, "x-", label="model")
    ax.set_xscale("log")
    ax.set_xlabel("N/C (ppm)")
    ax.set_ylabel("NV$^-$/NV after treatment (%)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_echo_fit(times_s, signal, fit, path):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    t = np.asarray(times_s) * 1e6
    ax.plot(t, signal, ".", label="data")
    tt = np.linspace(t.min(), t.max(), 300)
    ax.plot(tt, echo_model(tt * 1e-6, fit.amplitude_a, fit.t2_s, fit.offset_c),
            label=f"fit, T$_2$ = {fit.t2_s * 1e6:.4g} $\\mu$s")
    ax.set_xlabel("time ($\\mu$s)")
    ax.set_ylabel("echo signal")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_pl_fit(spectrum, ref_minus, ref_zero, fit, path):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    wl = spectrum.wavelengths_nm
    rm = fit.w_minus * resample(ref_minus, wl)
    r0 = fit.w_zero * resample(ref_zero, wl)
    ax.plot(wl, spectrum.values, lw=1, label="measured")
    ax.plot(wl, rm, lw=1, label="NV$^-$ component")
    ax.plot(wl, r0, lw=1, label="NV$^0$ component")
    ax.plot(wl, rm + r0, "k--", lw=0.8, label="sum")
    ax.set_xlabel("wavelength (nm)")
    ax.set_ylabel("PL counts")
    ax.set_title(f"NV$^-$/NV = {100 * fit.nv_minus_frac:.1f}%")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_absorption(spectrum, band_report, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(spectrum.wavelengths_nm, spectrum.values, lw=1)
    if band_report is not None:
        for b in band_report.bands:
            if b.present:
                ax.axvspan(*b.window_nm, alpha=0.2)
                ax.text(np.mean(b.window_nm), ax.get_ylim()[1], b.name, ha="center", va="top", fontsize=7)
    ax.set_xlabel("wavelength (nm)")
    ax.set_ylabel("absorption (cm$^{-1}$)")
    fig.tight_layout()
    return _save(fig, path)


def model_figures(model, out_dir, rows=None):
    """Write the standard set of model figures into ``out_dir``; returns paths."""
    paths = [
        plot_conversion_curves(model, os.path.join(out_dir, "conversion_curves.svg")),
        plot_charge_state(model, os.path.join(out_dir, "charge_state.svg")),
        plot_t2_vs_nitrogen(model, os.path.join(out_dir, "t2_vs_nitrogen.svg")),
    ]
    if rows is not None:
        paths.append(plot_comparison(rows, os.path.join(out_dir, "table2_comparison.svg")))
    return paths
