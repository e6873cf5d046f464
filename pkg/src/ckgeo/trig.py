"""Curvature-labelled trigonometry.

The pair Ck/Sk unifies circular (kappa > 0), flat (kappa = 0) and hyperbolic
(kappa < 0) trigonometry as smooth functions of the curvature label:

    Ck_k(x) = cos(sqrt(k) x) | 1 | cosh(sqrt(-k) x)
    Sk_k(x) = sin(sqrt(k) x)/sqrt(k) | x | sinh(sqrt(-k) x)/sqrt(-k)

Near kappa*x^2 = 0 both are evaluated by their power series in u = kappa x^2,
so every function here is smooth in (kappa, x) across the flat case and the
zero-curvature limit of any expression built from them is continuous.

Identities used throughout the package:

    Ck^2 + kappa Sk^2 = 1,   d/dx Sk = Ck,   d/dx Ck = -kappa Sk.
"""

from __future__ import annotations

import numpy as np

# Below this threshold on |kappa * x^2| the truncated series is exact to
# double precision and branch-free in kappa.
_SERIES_CUT = 1e-4


def _scalar_or_array(out, scalar_in: bool):
    return float(out) if scalar_in and np.ndim(out) == 0 else out


def ck_cos(kappa: float, x):
    """Ck_kappa(x), vectorized over x."""
    scalar_in = np.isscalar(x) or np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    u = kappa * x * x
    small = np.abs(u) < _SERIES_CUT
    if np.all(small):
        return _scalar_or_array(_ck_series(u), scalar_in)
    if kappa > 0:
        closed = np.cos(np.sqrt(kappa) * x)
    else:
        closed = np.cosh(np.sqrt(-kappa) * x)
    return _scalar_or_array(np.where(small, _ck_series(u), closed), scalar_in)


def ck_sin(kappa: float, x):
    """Sk_kappa(x), vectorized over x."""
    scalar_in = np.isscalar(x) or np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    u = kappa * x * x
    small = np.abs(u) < _SERIES_CUT
    if np.all(small):
        return _scalar_or_array(x * _sk_series(u), scalar_in)
    if kappa > 0:
        closed = np.sin(np.sqrt(kappa) * x) / np.sqrt(kappa)
    else:
        closed = np.sinh(np.sqrt(-kappa) * x) / np.sqrt(-kappa)
    return _scalar_or_array(np.where(small, x * _sk_series(u), closed), scalar_in)


def _ck_series(u):
    # cos-type series in u = kappa x^2; next omitted term is u^5/10!.
    return 1.0 + u * (-1.0 / 2 + u * (1.0 / 24 + u * (-1.0 / 720 + u / 40320)))


def _sk_series(u):
    # sin-type series divided by x; next omitted term is u^5/11!.
    return 1.0 + u * (-1.0 / 6 + u * (1.0 / 120 + u * (-1.0 / 5040 + u / 362880)))


def ck_tan(kappa: float, x):
    """Sk/Ck, the unified tangent."""
    return ck_sin(kappa, x) / ck_cos(kappa, x)


def ck_sin_deriv(kappa: float, x):
    """d/dx Sk_kappa(x) = Ck_kappa(x)."""
    return ck_cos(kappa, x)


def ck_cos_deriv(kappa: float, x):
    """d/dx Ck_kappa(x) = -kappa Sk_kappa(x)."""
    return -kappa * ck_sin(kappa, x)


def ck_arcsin(kappa: float, s):
    """Principal inverse of Sk: the x >= 0 with Sk_kappa(x) = s, Ck_kappa(x) >= 0.

    For kappa > 0 the result lies in [0, pi/(2 sqrt(kappa))] and requires
    kappa s^2 <= 1; for kappa <= 0 it is defined for all s >= 0.
    """
    scalar_in = np.isscalar(s) or np.ndim(s) == 0
    s = np.asarray(s, dtype=float)
    u = kappa * s * s
    small = np.abs(u) < _SERIES_CUT
    series = s * (1.0 + u * (1.0 / 6 + u * (3.0 / 40 + u * (15.0 / 336))))
    if np.all(small):
        return _scalar_or_array(series, scalar_in)
    if kappa > 0:
        arg = np.sqrt(kappa) * s
        if np.any(arg > 1.0 + 1e-12):
            raise ValueError("ck_arcsin: sqrt(kappa)*s exceeds 1, no principal preimage")
        closed = np.arcsin(np.clip(arg, -1.0, 1.0)) / np.sqrt(kappa)
    else:
        closed = np.arcsinh(np.sqrt(-kappa) * s) / np.sqrt(-kappa)
    return _scalar_or_array(np.where(small, series, closed), scalar_in)
