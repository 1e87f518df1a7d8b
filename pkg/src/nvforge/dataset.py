"""Published measurement tables used for calibration and regression.

Values are stored exactly as printed. ``None`` marks a blank or "-" cell;
``*_err`` fields hold the printed ± uncertainty.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, fields

from .errors import UnknownTable

TABLE1_P1_GROWN_PPM = 2.2

# Treatment of Nitrogen series #1 as printed in the table caption. The running
# text of the same section quotes 2E17 instead.
TABLE2_ENERGY_MEV = 2.0
TABLE2_FLUENCE = 1e17


@dataclass(frozen=True)
class PaperRecord:
    series: str
    sample_id: str
    nc_ppm: float | None = None
    p1_grown_ppm: float | None = None
    nv_minus_asgrown_ppb: float | None = None
    nv_minus_treated_ppb: float | None = None
    nv_minus_frac_treated_pct: float | None = None
    nv_minus_frac_treated_err: float | None = None
    t2_asgrown_us: float | None = None
    t2_asgrown_err: float | None = None
    t2_treated_us: float | None = None
    t2_treated_err: float | None = None
    fluence: float | None = None
    energy_mev: float | None = None
    r_re_pct: float | None = None
    r_con_minus_pct: float | None = None

    def to_dict(self):
        return asdict(self)


FIELD_NAMES = tuple(f.name for f in fields(PaperRecord))


def _t1(series, energy, sample, fluence, frac, frac_err, r_re, r_con_minus):
    return PaperRecord(
        series=series,
        sample_id=sample,
        p1_grown_ppm=TABLE1_P1_GROWN_PPM,
        fluence=fluence,
        energy_mev=energy,
        nv_minus_frac_treated_pct=frac,
        nv_minus_frac_treated_err=frac_err,
        r_re_pct=r_re,
        r_con_minus_pct=r_con_minus,
    )


_TABLE1 = (
    _t1("2 MeV series", 2.0, "I2-01", 1e16, 86.2, 0.5, 1.3, 0.9),
    _t1("2 MeV series", 2.0, "I2-02", 2e16, 86.3, 0.2, 1.9, 1.4),
    _t1("2 MeV series", 2.0, "I2-04", 1e17, 82.4, 0.3, 8.3, 5.1),
    _t1("2 MeV series", 2.0, "I2-05", 2e17, 65.5, 1.2, 17.6, 7.3),
    _t1("2 MeV series", 2.0, "I2-08", 1e18, 52.5, 2.1, 33.3, 8.9),
    _t1("1 MeV series", 1.0, "I1-39", 1e17, 87.1, 1.6, 1.7, 1.4),
    _t1("1 MeV series", 1.0, "I1-50", 3e17, 86.4, 1.3, 2.7, 2.2),
    _t1("1 MeV series", 1.0, "I1-28", 1e18, 85.5, 1.9, 9.5, 7.2),
    _t1("1 MeV series", 1.0, "I1-29", 3e18, 67.9, 1.9, 15.3, 8.4),
)


def _s1(sample, nc, p1, nv_grown, nv_treated, frac, frac_err, t2g, t2g_err, t2t, t2t_err):
    return PaperRecord(
        series="Nitrogen series #1",
        sample_id=sample,
        nc_ppm=nc,
        p1_grown_ppm=p1,
        nv_minus_asgrown_ppb=nv_grown,
        nv_minus_treated_ppb=nv_treated,
        nv_minus_frac_treated_pct=frac,
        nv_minus_frac_treated_err=frac_err,
        t2_asgrown_us=t2g,
        t2_asgrown_err=t2g_err,
        t2_treated_us=t2t,
        t2_treated_err=t2t_err,
        fluence=TABLE2_FLUENCE,
        energy_mev=TABLE2_ENERGY_MEV,
    )


def _s2(sample, nc, p1, nv_grown):
    return PaperRecord(
        series="Nitrogen series #2",
        sample_id=sample,
        nc_ppm=nc,
        p1_grown_ppm=p1,
        nv_minus_asgrown_ppb=nv_grown,
    )


_TABLE2 = (
    _s1("NDT-26", 150, 0.2, 0.03, 1, 12.8, 1.7, 497.7, 26.2, 549, 332),
    _s1("NDT-14", 500, None, 0.2, 10, 38.4, 3.3, 288.9, 31.3, 329.3, 101.8),
    _s1("NDT-07", 1500, 0.5, 1.5, 36, 31.6, 1.6, 166.1, 8.7, 136.9, 3.9),
    _s1("NDT-34", 2500, 0.8, 1.8, 35, 33.7, 3.0, 101.3, 3.3, 98.5, 7.1),
    _s1("NDT-01", 4500, 1.4, 2.4, 67, 40.5, 3.3, 72.8, 1.5, 79.1, 3.2),
    _s1("NDT-02", 7429, 1.9, 3.3, 95, 50.9, 2.3, 48.2, 1.0, 74.2, 3.4),
    _s1("NDT-12", 8500, 2.6, 6.4, 168, 67.2, 1.2, 53.3, 1.4, 45.5, 1.2),
    _s2("Cas-40", 9722, 3.2, 15.3),
    _s2("Cas-48", 42777, 5.2, 21.3),
    _s2("Cas-68", 77142, 7.8, 16.0),
    _s2("Cas-44", 87499, 9.5, 25.9),
    _s2("Cas-51", 173571, 11.2, 33.9),
    _s2("Cas-49", 347143, 13.0, 27.1),
    _s2("Cas-50", 694286, 19.3, 28.5),
)

_TABLES = {"table1": _TABLE1, "table2": _TABLE2}
TABLE_NAMES = tuple(_TABLES)


def load_table(name):
    """Return the embedded records of ``"table1"`` or ``"table2"``."""
    try:
        return list(_TABLES[name])
    except KeyError:
        raise UnknownTable(f"unknown table {name!r}; expected one of {TABLE_NAMES}") from None


def find_record(name, sample_id):
    for rec in load_table(name):
        if rec.sample_id == sample_id:
            return rec
    raise KeyError(sample_id)


def series_rows(name, series):
    return [r for r in load_table(name) if r.series == series]


def checksum():
    """SHA-256 over a canonical JSON dump of both tables."""
    payload = {name: [r.to_dict() for r in rows] for name, rows in sorted(_TABLES.items())}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def dump_csv(name):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELD_NAMES)
    for rec in load_table(name):
        row = rec.to_dict()
        writer.writerow(["" if row[k] is None else row[k] for k in FIELD_NAMES])
    return buf.getvalue()
