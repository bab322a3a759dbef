"""Threshold extraction by finite-size scaling.

Rates near threshold are modelled as a quadratic in the rescaled distance
from the critical point::

    p_logical = A + B x + C x**2,   x = (p - p_th) * L**(1 / nu).

For fixed ``(p_th, nu)`` the coefficients follow from weighted linear least
squares, so the search is two-dimensional: a fixed grid (200 values of
``p_th`` across the data's range, 100 of ``nu`` in ``[0.5, 3]``) followed by
a Nelder-Mead polish from the best grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

GRID_P = 200
GRID_NU = 100
NU_RANGE = (0.5, 3.0)
LOW_CONFIDENCE_CHI2 = 5.0


@dataclass(frozen=True)
class FssFit:
    """Result of :func:`fss_fit`.

    ``residual`` is the weighted sum of squares, ``reduced_chi2`` divides it
    by the degrees of freedom (points minus five parameters).  ``covariance``
    is the ``(p_th, nu)`` block from the inverse Hessian of the residual;
    it is ``nan`` where the Hessian is not positive definite.
    """

    p_th: float
    nu: float
    A: float
    B: float
    C: float
    residual: float
    reduced_chi2: float
    covariance: np.ndarray
    low_confidence: bool
    reasons: tuple[str, ...] = ()

    @property
    def p_th_err(self) -> float:
        return float(math.sqrt(self.covariance[0, 0])) if self.covariance[0, 0] >= 0 else math.nan

    @property
    def nu_err(self) -> float:
        return float(math.sqrt(self.covariance[1, 1])) if self.covariance[1, 1] >= 0 else math.nan

    def predict(self, p, L) -> np.ndarray:
        x = (np.asarray(p, float) - self.p_th) * np.asarray(L, float) ** (1.0 / self.nu)
        return self.A + self.B * x + self.C * x * x


def _canonical(points) -> np.ndarray:
    arr = np.asarray([tuple(map(float, pt)) for pt in points], dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError("points must be (p, L, p_logical, sigma) tuples")
    order = np.lexsort(arr.T[::-1])  # sort by p, then L, then rate, then sigma
    return arr[order]


def _validate(data: np.ndarray) -> None:
    if not np.all(np.isfinite(data)):
        raise ValueError("points contain non-finite values")
    if np.any(data[:, 3] <= 0):
        raise ValueError("every sigma must be positive")
    sizes, counts = np.unique(data[:, 1], return_counts=True)
    if len(sizes) < 2:
        raise ValueError("finite-size scaling needs at least two lattice sizes")
    if counts.min() < 3:
        raise ValueError("each lattice size needs at least three rates")


def _wls(x: np.ndarray, y: np.ndarray, w: np.ndarray):
    """Weighted quadratic fit along the last axis; returns coefficients and residuals.

    ``x`` may carry leading grid axes; ``y`` and ``w`` broadcast against it.
    """
    s = [np.sum(w * x**k, axis=-1) for k in range(5)]
    t = [np.sum(w * y * x**k, axis=-1) for k in range(3)]
    m = np.stack(
        [np.stack([s[0], s[1], s[2]], -1), np.stack([s[1], s[2], s[3]], -1), np.stack([s[2], s[3], s[4]], -1)],
        -2,
    )
    rhs = np.stack(t, -1)
    det = np.linalg.det(m)
    scale = np.abs(m).max(axis=(-1, -2)) ** 3
    good = np.abs(det) > 1e-12 * np.where(scale > 0, scale, 1.0)
    m = np.where(good[..., None, None], m, np.eye(3))
    coef = np.linalg.solve(m, rhs[..., None])[..., 0]
    pred = coef[..., :1] + coef[..., 1:2] * x + coef[..., 2:3] * x * x
    res = np.sum(w * (y - pred) ** 2, axis=-1)
    return coef, np.where(good, res, np.inf)


def _residual(data: np.ndarray, p_th: float, nu: float):
    if not nu > 0:
        return None, math.inf
    p, L, y, sig = data.T
    x = (p - p_th) * L ** (1.0 / nu)
    coef, res = _wls(x, y, 1.0 / sig**2)
    return coef, float(res)


def _hessian(f, z: np.ndarray, steps: np.ndarray) -> np.ndarray:
    h = np.zeros((2, 2))
    f0 = f(z)
    for i in range(2):
        e = np.zeros(2)
        e[i] = steps[i]
        h[i, i] = (f(z + e) - 2 * f0 + f(z - e)) / steps[i] ** 2
    e0, e1 = np.array([steps[0], 0]), np.array([0, steps[1]])
    h[0, 1] = h[1, 0] = (f(z + e0 + e1) - f(z + e0 - e1) - f(z - e0 + e1) + f(z - e0 - e1)) / (4 * steps[0] * steps[1])
    return h


def fss_fit(points) -> FssFit:
    """Fit ``(p_th, nu, A, B, C)`` to ``(p, L, p_logical, sigma)`` points.

    Input order does not matter: points are sorted into a canonical order
    first.  The fit is flagged ``low_confidence`` when the optimum sits on
    the edge of the search region or the reduced chi-square exceeds
    ``LOW_CONFIDENCE_CHI2``.
    """
    data = _canonical(points)
    _validate(data)
    p, L, y, sig = data.T
    w = 1.0 / sig**2
    p_lo, p_hi = float(p.min()), float(p.max())
    grid_p = np.linspace(p_lo, p_hi, GRID_P)
    grid_nu = np.linspace(*NU_RANGE, GRID_NU)
    x = (p[None, None, :] - grid_p[:, None, None]) * L[None, None, :] ** (1.0 / grid_nu[None, :, None])
    _, res = _wls(x, y, w)
    if not np.isfinite(res).any():
        raise ValueError("design matrix is degenerate for every grid point")
    i, j = np.unravel_index(int(np.argmin(res)), res.shape)
    start = np.array([grid_p[i], grid_nu[j]])

    def objective(z):
        return _residual(data, z[0], z[1])[1]

    span = max(p_hi - p_lo, 1e-12)
    opt = minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-7 * span, "fatol": 1e-12, "maxiter": 4000,
                 "initial_simplex": [start, start + [span / GRID_P, 0], start + [0, 0.025]]},
    )
    z = opt.x if opt.fun <= res[i, j] else start
    coef, r = _residual(data, z[0], z[1])
    dof = max(len(data) - 5, 1)
    steps = np.array([span * 1e-3, 1e-3 * max(z[1], 0.1)])
    hess = _hessian(objective, z, steps)
    try:
        cov = 2.0 * np.linalg.inv(hess)
        if not np.all(np.linalg.eigvalsh(hess) > 0):
            cov = np.full((2, 2), np.nan)
    except np.linalg.LinAlgError:
        cov = np.full((2, 2), np.nan)

    reasons = []
    edge = span / (GRID_P - 1)
    if z[0] <= p_lo + edge or z[0] >= p_hi - edge:
        reasons.append("p_th at the edge of the data range")
    if z[1] <= NU_RANGE[0] + 1e-3 or z[1] >= NU_RANGE[1] - 1e-3:
        reasons.append("nu at the edge of the search range")
    red = r / dof
    if red > LOW_CONFIDENCE_CHI2:
        reasons.append(f"reduced chi-square {red:.3g}")
    return FssFit(
        float(z[0]), float(z[1]), float(coef[0]), float(coef[1]), float(coef[2]),
        r, red, cov, bool(reasons), tuple(reasons),
    )


__all__ = ["FssFit", "fss_fit"]
