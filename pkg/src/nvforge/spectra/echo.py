"""Hahn-echo decay fit ``f(t) = a·exp(-t/T2) + c``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..csvio import read_columns
from ..errors import DegenerateSignal, InsufficientData, ValidationError
from ..lsq import levenberg_marquardt


@dataclass(frozen=True)
class EchoFit:
    amplitude_a: float
    t2_s: float
    offset_c: float
    residual_rms: float
    iterations: int = 0

    def to_dict(self):
        return {
            "amplitude_a": self.amplitude_a,
            "t2_s": self.t2_s,
            "t2_us": self.t2_s * 1e6,
            "offset_c": self.offset_c,
            "residual_rms": self.residual_rms,
            "iterations": self.iterations,
        }


def echo_model(t, a, t2, c):
    return a * np.exp(-np.asarray(t) / t2) + c


def initial_guess(t, s):
    """a₀ = s[0] − s[-1], c₀ = s[-1], T2₀ where s − c₀ first falls to a₀/e."""
    a0 = s[0] - s[-1]
    c0 = s[-1]
    y = (s - c0) * np.sign(a0)
    target = abs(a0) / np.e
    t2 = None
    for i in range(len(t) - 1):
        if y[i] >= target > y[i + 1] or y[i] > target >= y[i + 1]:
            frac = (y[i] - target) / (y[i] - y[i + 1])
            t2 = t[i] + frac * (t[i + 1] - t[i])
            break
    if t2 is None or not t2 > 0:
        t2 = float(np.median(t))
    return a0, t2, c0


def fit_hahn_echo(times_s, signal, *, max_iter=500, xtol=1e-10):
    t = np.asarray(times_s, dtype=float)
    s = np.asarray(signal, dtype=float)
    if t.shape != s.shape or t.ndim != 1:
        raise ValidationError("times and signal must be 1-D and the same length")
    if len(t) < 4:
        raise InsufficientData("need at least 4 echo points")
    if np.any(np.diff(t) <= 0):
        raise ValidationError("times must be strictly increasing")
    if t[0] < 0:
        raise ValidationError("times must be >= 0")
    if np.ptp(s) <= np.finfo(float).eps * max(1.0, float(np.max(np.abs(s)))):
        raise DegenerateSignal("signal is flat; amplitude is 0 and T2 is undefined")

    a0, t20, c0 = initial_guess(t, s)
    tscale = float(np.median(t[t > 0])) if np.any(t > 0) else 1.0
    x = t / tscale
    ascale = float(np.ptp(s))

    def residuals(p):
        a, u, c = p
        return (a * np.exp(-x / u) + c) * ascale - s

    def jacobian(p):
        a, u, c = p
        e = np.exp(-x / u)
        return np.column_stack([e * ascale, a * e * x / u**2 * ascale, np.full_like(x, ascale)])

    p0 = [a0 / ascale, t20 / tscale, c0 / ascale]
    res = levenberg_marquardt(
        residuals, jacobian, p0, max_iter=max_iter, xtol=xtol, valid=lambda p: p[1] > 0,
    )
    a, u, c = res.params
    rms = float(np.sqrt(res.cost / len(t)))
    return EchoFit(float(a * ascale), float(u * tscale), float(c * ascale), rms, res.iterations)


def read_echo_csv(text):
    """``time_us,signal`` CSV → (times in seconds, signal)."""
    rows = read_columns(text, ("time_us", "signal"))
    t = np.array([r[0] for r in rows]) * 1e-6
    s = np.array([r[1] for r in rows])
    return t, s
