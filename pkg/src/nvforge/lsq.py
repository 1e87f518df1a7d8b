"""Damped Gauss-Newton (Levenberg-Marquardt) least squares.

Small and dependency-light on purpose: the fits in this package have two or
three parameters and need a fixed, documented stopping rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence


@dataclass
class LSQResult:
    params: np.ndarray
    cost: float
    iterations: int


def levenberg_marquardt(residuals, jacobian, p0, *, max_iter=200, xtol=1e-10,
                        valid=None, lam0=1e-3):
    """Minimise ``sum(residuals(p)**2)`` starting from ``p0``.

    ``jacobian(p)`` returns d residuals / d p with shape (n, len(p)).
    ``valid(p)``, if given, rejects trial points outside the parameter
    domain; a rejected point is treated like an uphill step.

    Converges when the relative parameter change ``|step| / |p|`` (Euclidean
    norms) falls below ``xtol``; callers should scale parameters to order
    one. A step that is rejected but already smaller than ``xtol`` also counts
    as converged: the cost cannot be lowered at that resolution.
    """
    p = np.asarray(p0, dtype=float).copy()
    r = residuals(p)
    cost = float(r @ r)
    lam = lam0
    for it in range(1, max_iter + 1):
        J = jacobian(p)
        g = J.T @ r
        A = J.T @ J
        diag = np.diag(A).copy()
        diag[diag == 0] = 1.0
        while True:
            try:
                step = np.linalg.solve(A + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = p + step
            rel = np.linalg.norm(step) / max(np.linalg.norm(p), 1e-300)
            ok = valid is None or valid(trial)
            if ok:
                r_trial = residuals(trial)
                cost_trial = float(r_trial @ r_trial)
                ok = np.isfinite(cost_trial) and cost_trial <= cost
            if ok:
                p, r, cost = trial, r_trial, cost_trial
                lam = max(lam / 10.0, 1e-15)
                if rel < xtol:
                    return LSQResult(p, cost, it)
                break
            if rel < xtol:
                return LSQResult(p, cost, it)
            lam *= 10.0
            if lam > 1e30:
                raise NonConvergence("damping diverged without reaching a minimum")
    raise NonConvergence(f"no convergence after {max_iter} iterations")
