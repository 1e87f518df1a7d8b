import csv
import io

import pytest

from nvforge.dataset import TABLE1_P1_GROWN_PPM, checksum, dump_csv, find_record, load_table
from nvforge.errors import UnknownTable

FROZEN_CHECKSUM = "8ef7f496e413527f0beedd38dd2c7c44c4a0508f62c284d002c4c4964039d131"


def test_row_counts():
    assert len(load_table("table1")) == 9
    assert len(load_table("table2")) == 14


def test_checksum_frozen():
    assert checksum() == FROZEN_CHECKSUM


def test_i1_29():
    r = find_record("table1", "I1-29")
    assert (r.fluence, r.energy_mev, r.nv_minus_frac_treated_pct, r.r_re_pct, r.r_con_minus_pct) == (
        3e18, 1.0, 67.9, 15.3, 8.4
    )
    assert r.nv_minus_frac_treated_err == 1.9
    assert r.p1_grown_ppm == TABLE1_P1_GROWN_PPM == 2.2


def test_ndt_26():
    r = find_record("table2", "NDT-26")
    assert (r.nc_ppm, r.p1_grown_ppm, r.nv_minus_asgrown_ppb, r.nv_minus_treated_ppb,
            r.nv_minus_frac_treated_pct, r.t2_asgrown_us, r.t2_treated_us) == (150, 0.2, 0.03, 1, 12.8, 497.7, 549)


def test_series_two_has_no_treated_values():
    rows = [r for r in load_table("table2") if r.series == "Nitrogen series #2"]
    assert len(rows) == 7
    for r in rows:
        assert r.nv_minus_treated_ppb is None and r.t2_treated_us is None and r.fluence is None


def test_unknown_table():
    with pytest.raises(UnknownTable):
        load_table("table3")


def test_table1_r_con_minus_below_r_re():
    for r in load_table("table1"):
        assert r.r_con_minus_pct < r.r_re_pct


def test_load_returns_copy():
    rows = load_table("table1")
    rows.clear()
    assert len(load_table("table1")) == 9


def test_dump_csv_round_trip():
    rows = list(csv.DictReader(io.StringIO(dump_csv("table2"))))
    assert len(rows) == 14
    assert rows[1]["sample_id"] == "NDT-14" and rows[1]["p1_grown_ppm"] == ""
