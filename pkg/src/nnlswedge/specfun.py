"""Quadrature and special-function kernels for the asymptotic pipeline.

This module provides the low-level numerics the rest of the package is
built on:

* an adaptive complex-valued Gauss--Kronrod (G7/K15) integrator with
  explicit support for an integrable logarithmic singularity at the left
  endpoint and for semi-infinite domains ``(-inf, b]`` with ``b < 0``;
* ``log_gamma`` -- log of the gamma function on the complex plane,
  accurate to better than 1e-12 relative error on the strip
  ``|Im z| <= 50`` used by the parametrix amplitudes;
* ``find_imag_axis_zero`` -- a bracketed root finder for real-valued
  functions of a positive real parameter (used to locate the zero of the
  transmission coefficient on the positive imaginary axis).

All integrands passed to :func:`quad` must accept numpy arrays and
return arrays of the same shape (real or complex).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "Singularity",
    "QuadratureSpec",
    "QuadResult",
    "QuadratureError",
    "RootBracketError",
    "quad",
    "log_gamma",
    "gamma",
    "find_imag_axis_zero",
]


# --------------------------------------------------------------------------
# Gauss-Kronrod 7/15 nodes and weights (positive half; rule is symmetric).
# ---------------------------------------------------------------------------

# Kronrod abscissae on [-1, 1]; every second one is a Gauss-7 node.
_XK = np.array(
    [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
        0.000000000000000,
    ]
)

_WK = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
    ]
)

# Gauss-7 weights matching nodes _XK[1], _XK[3], _XK[5], _XK[7].
_WG = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
    ]
)

# Full 15-point node/weight tables on [-1, 1], ordered left to right.
_NODES = np.concatenate((-_XK[:7], _XK[::-1]))
_WEIGHTS_K = np.concatenate((_WK[:7], _WK[::-1]))
_GAUSS_IDX = np.arange(1, 15, 2)  # positions of the embedded Gauss-7 nodes
_WEIGHTS_G = np.concatenate((_WG[:3], _WG[::-1]))

# Exponential substitution window for the log-singular endpoint: the
# omitted mass scales like w*exp(w) below the cut, ~1e-18 at w = -45.
_LOG_LEFT_WMIN = -45.0


class Singularity(str, Enum):
    """Endpoint behaviour the integrator should account for."""

    NONE = "none"
    LOG_AT_LEFT_END = "log-at-left-end"


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and subdivision budget for :func:`quad`.

    ``atol``/``rtol`` bound the *global* error estimate; subdivision
    stops once ``sum(err) <= max(atol, rtol * |integral|)``.
    """

    atol: float = 1e-10
    rtol: float = 1e-9
    max_subdivisions: int = 240
    singularity: Singularity = Singularity.NONE

    def __post_init__(self) -> None:
        if self.atol < 0 or self.rtol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.atol == 0 and self.rtol == 0:
            raise ValueError("at least one of atol/rtol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class QuadResult:
    """Outcome of an adaptive quadrature: value, error bound, effort."""

    value: complex
    error: float
    subdivisions: int
    evaluations: int


class QuadratureError(RuntimeError):
    """Raised when the subdivision budget is exhausted before converging."""


class RootBracketError(RuntimeError):
    """Raised when no sign change can be located inside the search bracket."""


def _gk15(f, a: float, b: float):
    """One Gauss-Kronrod 7/15 panel on [a, b]: (K15 value, |K15-G7|)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _NODES
    y = np.asarray(f(x))
    val_k = half * np.sum(_WEIGHTS_K * y)
    val_g = half * np.sum(_WEIGHTS_G * y[_GAUSS_IDX])
    return val_k, abs(val_k - val_g)


def _adaptive(f, a: float, b: float, spec: QuadratureSpec) -> QuadResult:
    """Globally adaptive bisection driven by the worst-panel error."""
    val, err = _gk15(f, a, b)
    # heap of (-err, panel id, a, b, value, err); ids break ties
    heap = [(-err, 0, a, b, val, err)]
    total = val
    total_err = err
    evals = 15
    next_id = 1
    splits = 0
    while True:
        tol = max(spec.atol, spec.rtol * abs(total))
        if total_err <= tol:
            return QuadResult(total, total_err, splits, evals)
        if splits >= spec.max_subdivisions:
            raise QuadratureError(
                f"quadrature did not converge after {splits} subdivisions: "
                f"estimate {total!r}, error {total_err:.3e}, tol {tol:.3e}, "
                f"interval [{a!r}, {b!r}]"
            )
        _, _, pa, pb, pval, perr = heapq.heappop(heap)
        pm = 0.5 * (pa + pb)
        if pm <= pa or pm >= pb:
            raise QuadratureError(
                f"panel [{pa!r}, {pb!r}] collapsed below floating-point "
                "resolution; integrand is too singular for this rule"
            )
        vl, el = _gk15(f, pa, pm)
        vr, er = _gk15(f, pm, pb)
        total += (vl + vr) - pval
        total_err += (el + er) - perr
        evals += 30
        splits += 1
        heapq.heappush(heap, (-el, next_id, pa, pm, vl, el))
        heapq.heappush(heap, (-er, next_id + 1, pm, pb, vr, er))
        next_id += 2


def quad(f, a: float, b: float, spec: QuadratureSpec | None = None) -> QuadResult:
    """Integrate ``f`` over ``[a, b]`` adaptively.

    Supported domains:

    * finite ``[a, b]``;
    * ``a = -inf`` with finite ``b < 0`` (mapped by ``zeta = b/u`` onto
      ``u in (0, 1]``, the standard algebraic compactification for tails
      that decay at least like ``1/zeta**2``);
    * ``singularity = LOG_AT_LEFT_END`` on a finite interval: the
      substitution ``zeta = a + (b-a) e^w`` renders an integrable
      ``log(zeta - a)`` endpoint singularity smooth.

    Returns a :class:`QuadResult`; raises :class:`QuadratureError` if the
    subdivision budget is exhausted.
    """
    if spec is None:
        spec = QuadratureSpec()
    if math.isinf(a):
        if spec.singularity is not Singularity.NONE:
            raise ValueError("endpoint singularity flags require a finite domain")
        if not (math.isfinite(b) and b < 0):
            raise ValueError(
                "semi-infinite quadrature supports (-inf, b] with b < 0; "
                "split the integral at a negative point first"
            )

        def mapped(u, _f=f, _b=b):
            u = np.asarray(u)
            return _f(_b / u) * (-_b) / (u * u)

        return _adaptive(mapped, 0.0, 1.0, spec)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("only (-inf, b<0] and finite intervals are supported")
    if a == b:
        return QuadResult(0.0 + 0.0j, 0.0, 0, 0)
    if spec.singularity is Singularity.LOG_AT_LEFT_END:
        span = b - a

        def mapped(w, _f=f, _a=a, _span=span):
            w = np.asarray(w)
            scale = _span * np.exp(w)
            return _f(_a + scale) * scale

        return _adaptive(mapped, _LOG_LEFT_WMIN, 0.0, spec)
    return _adaptive(f, a, b, spec)


# ---------------------------------------------------------------------------
# log-gamma
# ---------------------------------------------------------------------------

_LANCZOS_G = 5.2421875  # rational shift 671/128 = (607/128) + 1/2
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COF = np.array(
    [
        57.1562356658629235,
        -59.5979603554754912,
        14.1360979747417471,
        -0.491913816097620199,
        0.339946499848118887e-4,
        0.465236289270485756e-4,
        -0.983744753048795646e-4,
        0.158088703224912494e-3,
        -0.210264441724104883e-3,
        0.217439618115212643e-3,
        -0.164318106536763890e-3,
        0.844182239838527433e-4,
        -0.261908384015814087e-4,
        0.368991826595316234e-5,
    ]
)
_SQRT_TWO_PI = 2.5066282746310005
_LN_PI = math.log(math.pi)

# Stirling series coefficients: B_{2n} / (2n (2n-1)) for n = 1..8.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    7.0 / 156.0,
    -3617.0 / 122400.0,
)


def _log_gamma_lanczos(z: complex) -> complex:
    ser = _LANCZOS_C0
    for j, c in enumerate(_LANCZOS_COF, start=1):
        ser += c / (z + j)
    zg = z + _LANCZOS_G
    return (z + 0.5) * np.log(zg) - zg + np.log(_SQRT_TWO_PI * ser / z)


def _log_gamma_stirling(z: complex) -> complex:
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0.0 + 0.0j
    power = inv
    for c in _STIRLING:
        series += c * power
        power *= inv2
    return (z - 0.5) * np.log(z) - z + 0.5 * math.log(2.0 * math.pi) + series


def log_gamma(z: complex) -> complex:
    """Log-gamma on the complex plane.

    Uses the 15-term rational (Lanczos-type) approximation for moderate
    arguments in the right half-plane, the Stirling series for large
    ones, and the reflection formula for ``Re z < 1/2``.  Relative
    accuracy is better than 1e-12 for ``|Im z| <= 50``.  The imaginary
    part follows the principal determination on the right half-plane;
    across the reflection the branch may differ from the continuous
    continuation by a multiple of ``2 pi i``, which is immaterial once
    exponentiated.
    """
    z = complex(z)
    if z.real < 0.5:
        if z.imag == 0.0 and z.real == math.floor(z.real):
            raise ValueError(f"log_gamma pole at non-positive integer {z!r}")
        return _LN_PI - np.log(np.sin(math.pi * z)) - log_gamma(1.0 - z)
    if abs(z) >= 16.0:
        return complex(_log_gamma_stirling(z))
    return complex(_log_gamma_lanczos(z))


def gamma(z: complex) -> complex:
    """Gamma function via :func:`log_gamma`."""
    return complex(np.exp(log_gamma(z)))


# ---------------------------------------------------------------------------
# Root finding on a real bracket
# ---------------------------------------------------------------------------


def find_imag_axis_zero(
    func,
    lo: float,
    hi: float,
    *,
    scan_points: int = 80,
    xtol: float = 1e-14,
) -> float:
    """Find a zero of the real-valued ``func`` on ``[lo, hi]``, ``lo > 0``.

    The bracket is scanned on a geometric grid for the first sign change
    and the zero is polished with Brent's method.  Raises
    :class:`RootBracketError` when no sign change exists on the grid,
    reporting the sampled values at the bracket ends to aid diagnosis.
    """
    if not (0 < lo < hi):
        raise ValueError("bracket must satisfy 0 < lo < hi")
    grid = np.geomspace(lo, hi, scan_points)
    vals = np.array([func(g) for g in grid], dtype=float)
    if np.any(vals == 0.0):
        return float(grid[np.nonzero(vals == 0.0)[0][0]])
    signs = np.sign(vals)
    flips = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if flips.size == 0:
        raise RootBracketError(
            f"no sign change of the target function on [{lo:g}, {hi:g}]: "
            f"f(lo)={vals[0]:.6e}, f(hi)={vals[-1]:.6e}"
        )
    i = flips[0]
    return float(brentq(func, grid[i], grid[i + 1], xtol=xtol, rtol=8.9e-16))
