import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvforge import synthetic
from nvforge.acceptance import echo_grid_oracle
from nvforge.errors import DegenerateSignal, InsufficientData, ValidationError
from nvforge.spectra.echo import fit_hahn_echo, initial_guess, read_echo_csv

T50 = synthetic.echo_times(500e-6, 50)


def test_noise_free_recovery():
    t, s = synthetic.echo_trace(100e-6, 1.0, 0.5, times=T50)
    fit = fit_hahn_echo(t, s)
    assert fit.amplitude_a == pytest.approx(1.0, rel=1e-6)
    assert fit.t2_s == pytest.approx(100e-6, rel=1e-6)
    assert fit.offset_c == pytest.approx(0.5, rel=1e-6)


@settings(max_examples=30)
@given(st.floats(-50.0, 50.0))
def test_translation_in_offset(k):
    t, s = synthetic.echo_trace(100e-6, 1.0, 0.5, noise_frac=0.02, rng=np.random.default_rng(1), times=T50)
    a = fit_hahn_echo(t, s)
    b = fit_hahn_echo(t, s + k)
    assert b.offset_c == pytest.approx(a.offset_c + k, rel=1e-6, abs=1e-6)
    assert b.amplitude_a == pytest.approx(a.amplitude_a, rel=1e-6)
    assert b.t2_s == pytest.approx(a.t2_s, rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_noisy_fit_matches_grid_oracle(seed):
    t, s = synthetic.echo_trace(100e-6, 1.0, 0.5, noise_frac=0.05, rng=np.random.default_rng(seed))
    fit = fit_hahn_echo(t, s)
    assert fit.t2_s == pytest.approx(echo_grid_oracle(t, s), rel=1e-3)


def test_decaying_upward_signal():
    t, s = synthetic.echo_trace(80e-6, -2.0, 3.0, times=T50)
    fit = fit_hahn_echo(t, s)
    assert fit.t2_s == pytest.approx(80e-6, rel=1e-6)
    assert fit.amplitude_a == pytest.approx(-2.0, rel=1e-6)


def test_initial_guess_crossing():
    t, s = synthetic.echo_trace(100e-6, 1.0, 0.0, times=synthetic.echo_times(2e-3, 2001))
    a0, t20, c0 = initial_guess(t, s)
    assert t20 == pytest.approx(100e-6, rel=0.01)


def test_insufficient_data():
    with pytest.raises(InsufficientData):
        fit_hahn_echo([0.0, 1e-6, 2e-6], [1.0, 0.9, 0.8])


def test_flat_signal():
    with pytest.raises(DegenerateSignal):
        fit_hahn_echo(T50, np.full(len(T50), 0.3))


def test_bad_times():
    with pytest.raises(ValidationError):
        fit_hahn_echo([0.0, 2e-6, 1e-6, 3e-6], [1.0, 0.5, 0.7, 0.2])


def test_read_echo_csv():
    t, s = read_echo_csv("time_us,signal\n0,1.0\n10,0.8\n")
    assert t == pytest.approx([0.0, 10e-6])
    assert s.tolist() == [1.0, 0.8]
