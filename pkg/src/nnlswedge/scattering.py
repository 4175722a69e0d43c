"""Direct scattering at time zero for the mirror-coupled step problem.

The first-order system ``Phi_x = (-i k sigma3 + U(x)) Phi`` with

    U(x) = [[0, q(x)], [-conj(q(-x)), 0]]

is integrated with a fourth-order Magnus method (two-point Gauss
sampling per step, closed-form exponential of the traceless generator).
Jost solutions are normalized through the boundary matrices of the
one-sided step background: the left solution approaches the free form
built on the zero level, the right one the form built on the constant
level ``A``, each carrying the ``A/(2ik)`` off-diagonal dressing that
the step forces.

The scattering matrix is assembled at the origin,

    S(k) = Phi_right(0)^{-1} Phi_left(0) = [[a1, -conj(b(-k))], [b, a2]],

and the module also extracts the small-wavenumber data that controls
the wedge asymptotics: either the finite limit ``a2(0)`` (generic case,
tagged I) or the pole/zero coefficients ``a11 = lim k a1`` and
``a21 = lim a2 / k`` (degenerate case, tagged II).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .profiles import InitialProfile, ProfileKind, fingerprint
from .specfun import find_imag_axis_zero

__all__ = [
    "CaseTag",
    "SpectralData",
    "SmallKData",
    "ScatteringError",
    "DegenerateJostError",
    "SmallKMismatchError",
    "CaseClassificationError",
    "default_k_grid",
    "jost_at_origin",
    "scattering_matrix",
    "scattering_grid",
    "small_k_data",
    "classify_case",
    "find_k1",
    "check_assumption2",
    "reflection_coefficients",
    "compute_spectral_data",
    "save_spectral_data",
    "load_spectral_data",
    "synthetic_case_i",
    "synthetic_case_ii",
]


class CaseTag(str, Enum):
    """Small-wavenumber type of the transmission data."""

    CASE_I = "I"  # a1 has a double pole at k=0, a2(0) finite and nonzero
    CASE_II = "II"  # a1 has a simple pole, a2 a simple zero


class ScatteringError(RuntimeError):
    """Base class for scattering-stage failures."""


class DegenerateJostError(ScatteringError):
    """Right Jost matrix lost invertibility (determinant below 1e-12)."""


class SmallKMismatchError(ScatteringError):
    """Independent small-k routes disagree beyond the accepted band."""


class CaseClassificationError(ScatteringError):
    """Measured limits violate the admissibility assumptions."""


# ---------------------------------------------------------------------------
# grids and step layout
# ---------------------------------------------------------------------------


def default_k_grid(n_per_sign: int = 400, k_min: float = 1e-3, k_max: float = 1e2) -> np.ndarray:
    """Symmetric log-spaced grid, ``n_per_sign`` nodes per sign, no zero."""
    pos = np.geomspace(k_min, k_max, n_per_sign)
    return np.concatenate((-pos[::-1], pos))


def _core_halfwidth(profile: InitialProfile) -> float:
    """Half-width of the region where the profile actually varies."""
    if profile.kind is ProfileKind.PURE_STEP:
        base = 1.0
    elif profile.kind is ProfileKind.SMOOTHED_STEP:
        base = 9.0 * profile.width
    elif profile.kind is ProfileKind.COMPACT_STEP:
        base = profile.width + 0.5
    else:  # soliton: tails decay like exp(-A |x|)
        base = 32.0 / profile.amplitude
    if profile.bump_amplitude != 0:
        base = max(base, abs(profile.bump_center) + 7.0 * profile.bump_width)
    return min(profile.radius, base)


def _step_edges(profile: InitialProfile, k_scale: float) -> np.ndarray:
    """Step-edge array on ``[-R, R]``.

    The core (varying) region is resolved with a density that grows like
    ``sqrt(k)`` -- the scaling that keeps the fourth-order phase-sampling
    error of the Magnus rule at fixed accuracy -- while the saturated
    tails, where the clamped profile is constant and the rule is exact,
    get a coarse grid.  ``x = 0`` is always an edge so that a jump of the
    pure step never sits inside a step.
    """
    radius = profile.radius
    half = _core_halfwidth(profile)
    dens_core = 48.0 * math.sqrt(1.0 + 0.5 * k_scale)
    dens_tail = 8.0 * math.sqrt(1.0 + 0.125 * k_scale)
    n_half = max(2, int(math.ceil(half * dens_core)))
    # build each side separately so that x = 0 is an exact endpoint
    core_left = np.linspace(-half, 0.0, n_half + 1)
    core_right = np.linspace(0.0, half, n_half + 1)
    core = np.concatenate((core_left[:-1], core_right))
    if half >= radius:
        return core
    n_tail = max(4, int(math.ceil((radius - half) * dens_tail)))
    left = np.linspace(-radius, -half, n_tail + 1)
    right = np.linspace(half, radius, n_tail + 1)
    return np.concatenate((left[:-1], core, right[1:]))


_GAUSS_C1 = 0.5 - math.sqrt(3.0) / 6.0
_GAUSS_C2 = 0.5 + math.sqrt(3.0) / 6.0
_SQRT3_12 = math.sqrt(3.0) / 12.0
_SQRT3_6 = math.sqrt(3.0) / 6.0


def _expm_traceless(o11, o12, o21):
    """Entries of ``exp([[o11, o12], [o21, -o11]])`` via cosh/sinhc.

    For a traceless generator, ``exp(O) = cosh(lam) I + sinhc(lam) O``
    with ``lam^2 = o11^2 + o12 o21``; the even functions are insensitive
    to the square-root branch, and a series handles small ``|lam|``.
    """
    lam2 = o11 * o11 + o12 * o21
    lam = np.sqrt(lam2)
    small = np.abs(lam) < 1e-4
    lam_safe = np.where(small, 1.0, lam)
    c_big = np.cosh(lam_safe)
    s_big = np.sinh(lam_safe) / lam_safe
    c_small = 1.0 + lam2 * (0.5 + lam2 / 24.0)
    s_small = 1.0 + lam2 * (1.0 / 6.0 + lam2 / 120.0)
    c = np.where(small, c_small, c_big)
    s = np.where(small, s_small, s_big)
    return c + s * o11, s * o12, s * o21, c - s * o11


def _sweep(profile, k, x_starts, h_steps, p11, p12, p21, p22, *, rescale=False, logs=None):
    """Apply the Magnus steps ``(x_starts, h_steps)`` to the columns.

    ``p11..p22`` are (nk,) arrays forming the propagated 2x2 solution
    (or a single column when ``p12``/``p22`` are None).  With
    ``rescale=True`` the columns are renormalized per element and the
    log of the removed factor is accumulated in ``logs``.
    """
    xg1 = x_starts + _GAUSS_C1 * h_steps
    xg2 = x_starts + _GAUSS_C2 * h_steps
    q1_all = profile.sample(xg1)
    q2_all = profile.sample(xg2)
    qm1_all = np.conj(profile.sample(-xg1))
    qm2_all = np.conj(profile.sample(-xg2))
    mik = -1j * k
    single = p12 is None
    for i in range(x_starts.size):
        h = h_steps[i]
        q1, q2 = q1_all[i], q2_all[i]
        qm1, qm2 = qm1_all[i], qm2_all[i]
        o11 = mik * h + _SQRT3_12 * h * h * (q1 * qm2 - q2 * qm1)
        o12 = 0.5 * h * (q1 + q2) + _SQRT3_6 * h * h * mik * (q1 - q2)
        o21 = -0.5 * h * (qm1 + qm2) + _SQRT3_6 * h * h * mik * (qm1 - qm2)
        e11, e12, e21, e22 = _expm_traceless(o11, o12, o21)
        n11 = e11 * p11 + e12 * p21
        n21 = e21 * p11 + e22 * p21
        p11, p21 = n11, n21
        if not single:
            n12 = e11 * p12 + e12 * p22
            n22 = e21 * p12 + e22 * p22
            p12, p22 = n12, n22
        if rescale:
            scale = np.maximum(np.abs(p11), np.abs(p21))
            scale = np.where(scale > 0, scale, 1.0)
            p11 = p11 / scale
            p21 = p21 / scale
            logs += np.log(scale)
    return p11, p12, p21, p22


def _split_at_origin(edges: np.ndarray):
    """Edge sub-arrays ``[-R, 0]`` and ``[0, R]`` (0 is always an edge)."""
    izero = int(np.searchsorted(edges, 0.0))
    if edges[izero] != 0.0:
        raise AssertionError("step layout must contain x = 0 as an edge")
    return edges[: izero + 1], edges[izero:]


def _forward_steps(edges: np.ndarray):
    return edges[:-1], np.diff(edges)


def _backward_steps(edges: np.ndarray):
    return edges[:0:-1], -np.diff(edges)[::-1]


def jost_at_origin(profile: InitialProfile, k, *, k_scale: float | None = None):
    """Left and right Jost matrices at ``x = 0`` for the wavenumbers ``k``.

    Returns ``(Phi_left, Phi_right)`` with shape ``(nk, 2, 2)``.  ``k``
    may be any nonzero real array (complex values are accepted for
    analytic continuation along the imaginary axis, but without growth
    rescaling; use :func:`find_k1` for robust work there).
    """
    k = np.atleast_1d(np.asarray(k))
    if np.any(k == 0):
        raise ValueError("k = 0 is excluded; use the dedicated small-k routines")
    if k_scale is None:
        k_scale = float(np.max(np.abs(k)))
    edges = _step_edges(profile, k_scale)
    left_edges, right_edges = _split_at_origin(edges)
    radius = profile.radius
    a = profile.amplitude
    dress = 0.5 * a / (1j * k)
    ep = np.exp(1j * k * radius)
    em = np.exp(-1j * k * radius)

    # left solution: N_minus * exp(i k R sigma3) at x = -R, swept to 0
    l11, l12 = ep, np.zeros_like(ep)
    l21, l22 = dress * ep, em
    xs, hs = _forward_steps(left_edges)
    l11, l12, l21, l22 = _sweep(profile, k, xs, hs, l11, l12, l21, l22)

    # right solution: N_plus * exp(-i k R sigma3) at x = +R, swept to 0
    r11, r12 = em, dress * ep
    r21, r22 = np.zeros_like(ep), ep
    xs, hs = _backward_steps(right_edges)
    r11, r12, r21, r22 = _sweep(profile, k, xs, hs, r11, r12, r21, r22)

    nk = k.size
    left = np.empty((nk, 2, 2), dtype=complex)
    right = np.empty((nk, 2, 2), dtype=complex)
    left[:, 0, 0], left[:, 0, 1], left[:, 1, 0], left[:, 1, 1] = l11, l12, l21, l22
    right[:, 0, 0], right[:, 0, 1], right[:, 1, 0], right[:, 1, 1] = r11, r12, r21, r22
    return left, right


def scattering_matrix(profile: InitialProfile, k: float) -> np.ndarray:
    """Scattering matrix ``S(k) = Phi_right(0)^{-1} Phi_left(0)`` (2x2)."""
    left, right = jost_at_origin(profile, float(k))
    det = right[0, 0, 0] * right[0, 1, 1] - right[0, 0, 1] * right[0, 1, 0]
    if abs(det) < 1e-12:
        raise DegenerateJostError(
            f"right Jost determinant {abs(det):.3e} at k={k!r} is below 1e-12"
        )
    inv = np.array(
        [[right[0, 1, 1], -right[0, 0, 1]], [-right[0, 1, 0], right[0, 0, 0]]]
    ) / det
    return inv @ left[0]


def scattering_grid(profile: InitialProfile, k_grid: np.ndarray):
    """Scattering coefficients on a symmetric grid.

    Returns ``(a1, a2, b, diagnostics)`` where the diagnostics dict
    carries the worst unitarity and symmetry residuals over the grid.
    """
    k_grid = np.asarray(k_grid, dtype=float)
    _require_symmetric(k_grid)
    left, right = jost_at_origin(profile, k_grid)
    det = right[:, 0, 0] * right[:, 1, 1] - right[:, 0, 1] * right[:, 1, 0]
    worst = float(np.min(np.abs(det)))
    if worst < 1e-12:
        raise DegenerateJostError(f"right Jost determinant dropped to {worst:.3e}")
    s11 = (right[:, 1, 1] * left[:, 0, 0] - right[:, 0, 1] * left[:, 1, 0]) / det
    s21 = (-right[:, 1, 0] * left[:, 0, 0] + right[:, 0, 0] * left[:, 1, 0]) / det
    s12 = (right[:, 1, 1] * left[:, 0, 1] - right[:, 0, 1] * left[:, 1, 1]) / det
    s22 = (-right[:, 1, 0] * left[:, 0, 1] + right[:, 0, 0] * left[:, 1, 1]) / det
    a1, b, a2 = s11, s21, s22
    b_mirror = b[::-1]  # b(-k) on a symmetric grid
    unitarity = float(np.max(np.abs(a1 * a2 + b * np.conj(b_mirror) - 1.0)))
    sym_offdiag = float(np.max(np.abs(s12 + np.conj(b_mirror))))
    sym_a1 = float(np.max(np.abs(np.conj(a1[::-1]) - a1)))
    sym_a2 = float(np.max(np.abs(np.conj(a2[::-1]) - a2)))
    diagnostics = {
        "unitarity_residual": unitarity,
        "symmetry_residual": max(sym_offdiag, sym_a1, sym_a2),
        "min_det_right": worst,
    }
    return a1, a2, b, diagnostics


def _require_symmetric(k_grid: np.ndarray) -> None:
    if k_grid.ndim != 1 or k_grid.size < 8:
        raise ValueError("k grid must be a 1-d array with at least 8 nodes")
    if np.any(k_grid == 0.0):
        raise ValueError("k grid must exclude zero")
    if np.any(np.diff(k_grid) <= 0):
        raise ValueError("k grid must be strictly increasing")
    if not np.allclose(k_grid, -k_grid[::-1], rtol=0, atol=1e-15 * np.max(np.abs(k_grid))):
        raise ValueError("k grid must be symmetric about zero")


# ---------------------------------------------------------------------------
# small-k data: quadrature route and grid extrapolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmallKData:
    """Measured small-wavenumber limits from two independent routes."""

    a2_zero_ode: float  # from the k=0 auxiliary system (real by symmetry)
    a2_zero_grid: complex  # polynomial extrapolation of a2 on the grid
    a11: complex  # extrapolation of k*a1
    a21: complex  # extrapolation of a2/k
    m1_zero: complex  # extrapolation of k^2*a1 (equals A^2 a2(0)/4)
    ode_step_error: float  # step-halving error estimate of the first route


def _a2_zero_ode(profile: InitialProfile, n_steps: int) -> complex:
    """Integrate the k = 0 auxiliary system on ``[-R, 0]``.

    With ``v1' = q(x) v2``, ``v2' = -conj(q(-x)) v1`` and the step-forced
    start ``(0, -iA/2)``, the finite transmission limit is
    ``a2(0) = 4 (|v2(0)|^2 - |v1(0)|^2) / A^2``.
    """
    radius, a = profile.radius, profile.amplitude
    h = radius / n_steps
    xs = np.linspace(-radius, 0.0, 2 * n_steps + 1)
    qv = profile.sample(xs)
    qmv = np.conj(profile.sample(-xs))
    v1, v2 = 0.0 + 0.0j, -0.5j * a

    def rhs(idx, w1, w2):
        return qv[idx] * w2, -qmv[idx] * w1

    for i in range(n_steps):
        i0, i1, i2 = 2 * i, 2 * i + 1, 2 * i + 2
        k1a, k1b = rhs(i0, v1, v2)
        k2a, k2b = rhs(i1, v1 + 0.5 * h * k1a, v2 + 0.5 * h * k1b)
        k3a, k3b = rhs(i1, v1 + 0.5 * h * k2a, v2 + 0.5 * h * k2b)
        k4a, k4b = rhs(i2, v1 + h * k3a, v2 + h * k3b)
        v1 += (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        v2 += (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
    return 4.0 * (abs(v2) ** 2 - abs(v1) ** 2) / a**2


def _extrapolate_to_zero(k_nodes: np.ndarray, values: np.ndarray, degree: int = 4) -> complex:
    """Value at ``k = 0`` of the polynomial fit through the given nodes."""
    coef_re = np.polynomial.polynomial.polyfit(k_nodes, values.real, degree)
    coef_im = np.polynomial.polynomial.polyfit(k_nodes, values.imag, degree)
    return complex(coef_re[0], coef_im[0])


def small_k_data(
    profile: InitialProfile,
    k_grid: np.ndarray,
    a1: np.ndarray,
    a2: np.ndarray,
    *,
    n_nodes_per_sign: int = 5,
    ode_steps: int = 2400,
) -> SmallKData:
    """Small-k limits from the auxiliary system and from grid extrapolation."""
    k_grid = np.asarray(k_grid, dtype=float)
    order = np.argsort(np.abs(k_grid), kind="stable")
    sel = order[: 2 * n_nodes_per_sign]
    kn = k_grid[sel]
    coarse = _a2_zero_ode(profile, ode_steps)
    fine = _a2_zero_ode(profile, 2 * ode_steps)
    richardson = (16.0 * fine - coarse) / 15.0
    step_err = abs(fine - coarse) / 15.0
    return SmallKData(
        a2_zero_ode=float(np.real(richardson)),
        a2_zero_grid=_extrapolate_to_zero(kn, a2[sel]),
        a11=_extrapolate_to_zero(kn, kn * a1[sel]),
        a21=_extrapolate_to_zero(kn, a2[sel] / kn),
        m1_zero=_extrapolate_to_zero(kn, kn * kn * a1[sel]),
        ode_step_error=float(step_err),
    )


def classify_case(small: SmallKData, amplitude: float):
    """Decide the small-k case and validate its admissibility.

    Returns ``(CaseTag, fields)`` where ``fields`` holds ``a2_at_zero``
    (case I) or the purified ``a11``/``a21`` pair (case II).
    """
    eps_case = 1e-6 * max(1.0, amplitude)
    a2g = small.a2_zero_grid
    if abs(a2g) <= eps_case:
        # degenerate transmission: simple pole / simple zero structure
        if abs(small.a2_zero_ode) > 10.0 * eps_case:
            raise SmallKMismatchError(
                f"grid extrapolation gives a2(0) ~ 0 but the auxiliary route "
                f"gives {small.a2_zero_ode:.3e}"
            )
        a11, a21 = small.a11, small.a21
        for name, val in (("a11", a11), ("a21", a21)):
            if abs(val) < eps_case:
                raise CaseClassificationError(f"{name} vanishes; data is not generic")
            if abs(val.real) > 1e-3 * abs(val):
                raise CaseClassificationError(
                    f"{name} = {val!r} is not purely imaginary within tolerance"
                )
        a11 = 1j * a11.imag
        a21 = 1j * a21.imag
        product = (a11 * a21).real
        if product <= 0:
            raise CaseClassificationError(
                f"a11*a21 = {product:.6e} must be positive for the admissible case"
            )
        return CaseTag.CASE_II, {"a2_at_zero": None, "a11": a11, "a21": a21}
    # generic case: finite a2(0); cross-validate the independent routes
    if abs(a2g.imag) > 1e-3 * abs(a2g):
        raise CaseClassificationError(f"a2(0) = {a2g!r} is not real within tolerance")
    rel_gap = abs(small.a2_zero_ode - a2g.real) / max(abs(a2g.real), eps_case)
    if rel_gap > 1e-3:
        raise SmallKMismatchError(
            f"a2(0) routes disagree: auxiliary {small.a2_zero_ode:.10f} vs "
            f"grid {a2g.real:.10f} (relative gap {rel_gap:.2e})"
        )
    return CaseTag.CASE_I, {"a2_at_zero": float(a2g.real), "a11": None, "a21": None}


# ---------------------------------------------------------------------------
# transmission zero on the positive imaginary axis
# ---------------------------------------------------------------------------


def _imag_axis_transmission_batch(profile: InitialProfile, rho: np.ndarray) -> np.ndarray:
    """Rescaled Wronskian of the analytically continued transmission.

    At ``k = i rho`` the relevant Jost columns decay/grow like
    ``exp(-+ rho x)``; both are propagated with running renormalization
    and the (positive) removed factors never touch the sign of the
    result, so the returned real part is a faithful sign indicator of
    ``a1(i rho)``.
    """
    rho = np.asarray(rho, dtype=float)
    k = 1j * rho
    edges = _step_edges(profile, float(np.max(rho)))
    left_edges, right_edges = _split_at_origin(edges)
    a = profile.amplitude
    logs1 = np.zeros(rho.size)
    logs2 = np.zeros(rho.size)
    # first column of the left solution at x = -R: e^{ikR} (1, A/(2ik))
    w1 = np.ones(rho.size, dtype=complex)
    w2 = 0.5 * a / (1j * k) * np.ones(rho.size, dtype=complex)
    xs, hs = _forward_steps(left_edges)
    w1, _, w2, _ = _sweep(profile, k, xs, hs, w1, None, w2, None, rescale=True, logs=logs1)
    # second column of the right solution at x = +R: e^{ikR} (A/(2ik), 1)
    v1 = 0.5 * a / (1j * k) * np.ones(rho.size, dtype=complex)
    v2 = np.ones(rho.size, dtype=complex)
    xs, hs = _backward_steps(right_edges)
    v1, _, v2, _ = _sweep(profile, k, xs, hs, v1, None, v2, None, rescale=True, logs=logs2)
    wron = w1 * v2 - v1 * w2
    return np.real(wron)


def find_k1(profile: InitialProfile, *, bracket: tuple[float, float] | None = None) -> float:
    """Locate the zero of the transmission ``a1`` on the imaginary axis.

    Scans a geometric grid inside the bracket (default
    ``[1e-3 A, 1e3 A]``) for a sign change of the rescaled Wronskian,
    then polishes with Brent's method.
    """
    a = profile.amplitude
    lo, hi = bracket if bracket is not None else (1e-3 * a, 1e3 * a)
    # cheap dense scan where the zero physically lives, coarse ladder above
    segments = [(lo, min(hi, 8.0 * a), 64)]
    top = min(hi, 8.0 * a)
    while top < hi:
        nxt = min(hi, 4.0 * top)
        segments.append((top, nxt, 16))
        top = nxt
    for seg_lo, seg_hi, n in segments:
        grid = np.geomspace(seg_lo, seg_hi, n)
        vals = _imag_axis_transmission_batch(profile, grid)
        flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        if flips.size:
            i = flips[0]
            return find_imag_axis_zero(
                lambda r: float(_imag_axis_transmission_batch(profile, np.array([r]))[0]),
                float(grid[i]),
                float(grid[i + 1]),
                scan_points=12,
            )
    from .specfun import RootBracketError

    raise RootBracketError(
        f"no transmission zero found on the imaginary axis in [{lo:g}, {hi:g}]"
    )


# ---------------------------------------------------------------------------
# admissibility of the reflection product near k = 0
# ---------------------------------------------------------------------------


def check_assumption2(k_grid: np.ndarray, a1: np.ndarray, a2: np.ndarray, b: np.ndarray):
    """Winding check of ``1 + r1 r2`` as ``k -> 0^-``.

    The phase of ``1 + r1(k) r2(k) = 1/(a1 a2)`` is unwrapped along the
    negative axis starting from the far field (where it tends to zero)
    and its limit at the origin is returned together with a reliability
    flag (`False` when the limit exceeds 1e-2, signalling either a
    genuine winding obstruction or an under-resolved grid).
    """
    k_grid = np.asarray(k_grid, dtype=float)
    _require_symmetric(k_grid)
    w = 1.0 - b * np.conj(b[::-1]) / (a1 * a2)
    neg = k_grid < 0
    w_neg = w[neg]  # ordered from the most negative node towards 0^-
    phase = np.unwrap(np.angle(w_neg))
    jumps = np.abs(np.diff(phase))
    if jumps.size and float(np.max(jumps)) > math.pi:
        raise CaseClassificationError(
            "phase of 1 + r1 r2 jumps by more than pi between adjacent nodes; "
            "refine the wavenumber grid"
        )
    limit = float(phase[-1] - 0.0)  # anchored at ~0 in the far field
    return limit, bool(abs(limit) <= 1e-2)


def reflection_coefficients(sd: "SpectralData"):
    """Node values of ``r1 = b/a1`` and ``r2 = conj(b(-k))/a2``."""
    r1 = sd.b / sd.a1
    r2 = np.conj(sd.b[::-1]) / sd.a2
    return r1, r2


# ---------------------------------------------------------------------------
# the assembled spectral data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralData:
    """Scattering coefficients on a symmetric grid plus the slow-variable
    constants needed by the wedge asymptotics."""

    k_grid: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    b: np.ndarray
    amplitude: float
    k1: float
    case: CaseTag
    a2_at_zero: float | None
    a11: complex | None
    a21: complex | None
    profile_fingerprint: str
    assumption2_limit: float = 0.0
    unitarity_residual: float = 0.0
    symmetry_residual: float = 0.0

    def __post_init__(self) -> None:
        k = np.asarray(self.k_grid, dtype=float)
        _require_symmetric(k)
        for name in ("a1", "a2", "b"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != k.shape:
                raise ValueError(f"{name} must match the k grid shape")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "k_grid", k)
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if not self.k1 > 0:
            raise ValueError("k1 must be positive")
        case = CaseTag(self.case)
        object.__setattr__(self, "case", case)
        if case is CaseTag.CASE_I:
            if self.a2_at_zero is None:
                raise ValueError("case I requires a2_at_zero")
        else:
            if self.a11 is None or self.a21 is None:
                raise ValueError("case II requires a11 and a21")

    # -- derived conveniences ----------------------------------------------

    def mirrored(self, values: np.ndarray) -> np.ndarray:
        """Values at ``-k`` for node arrays on the symmetric grid."""
        return np.asarray(values)[::-1]

    @property
    def negative_mask(self) -> np.ndarray:
        return self.k_grid < 0


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

_SCHEMA = "spectral-data/1"


def _c2pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def save_spectral_data(sd: SpectralData, path) -> None:
    """Serialize to JSON with exact float round-trip."""
    payload = {
        "schema": _SCHEMA,
        "amplitude": sd.amplitude,
        "k1": sd.k1,
        "case": sd.case.value,
        "a2_at_zero": sd.a2_at_zero,
        "a11": None if sd.a11 is None else _c2pair(sd.a11),
        "a21": None if sd.a21 is None else _c2pair(sd.a21),
        "profile_fingerprint": sd.profile_fingerprint,
        "assumption2_limit": sd.assumption2_limit,
        "unitarity_residual": sd.unitarity_residual,
        "symmetry_residual": sd.symmetry_residual,
        "k_grid": sd.k_grid.tolist(),
        "a1": [_c2pair(z) for z in sd.a1],
        "a2": [_c2pair(z) for z in sd.a2],
        "b": [_c2pair(z) for z in sd.b],
    }
    Path(path).write_text(json.dumps(payload), encoding="ascii")


def load_spectral_data(path) -> SpectralData:
    payload = json.loads(Path(path).read_text(encoding="ascii"))
    if payload.get("schema") != _SCHEMA:
        raise ValueError(f"unrecognized spectral data schema {payload.get('schema')!r}")

    def pairs(name):
        return np.array([complex(re, im) for re, im in payload[name]])

    return SpectralData(
        k_grid=np.array(payload["k_grid"], dtype=float),
        a1=pairs("a1"),
        a2=pairs("a2"),
        b=pairs("b"),
        amplitude=payload["amplitude"],
        k1=payload["k1"],
        case=CaseTag(payload["case"]),
        a2_at_zero=payload["a2_at_zero"],
        a11=None if payload["a11"] is None else complex(*payload["a11"]),
        a21=None if payload["a21"] is None else complex(*payload["a21"]),
        profile_fingerprint=payload["profile_fingerprint"],
        assumption2_limit=payload["assumption2_limit"],
        unitarity_residual=payload["unitarity_residual"],
        symmetry_residual=payload["symmetry_residual"],
    )


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


def compute_spectral_data(
    profile: InitialProfile,
    k_grid: np.ndarray | None = None,
    *,
    cache_path=None,
    force: bool = False,
) -> SpectralData:
    """Full direct-scattering pipeline for a profile.

    Runs the Jost sweep over the grid, extracts and cross-validates the
    small-k limits, classifies the case, locates the imaginary-axis
    transmission zero, and measures the winding of the reflection
    product.  Results are optionally cached as JSON keyed by the profile
    fingerprint.
    """
    fp = fingerprint(profile)
    if cache_path is not None and not force:
        p = Path(cache_path)
        if p.exists():
            sd = load_spectral_data(p)
            if sd.profile_fingerprint == fp:
                return sd
    if k_grid is None:
        k_grid = default_k_grid()
    a1, a2, b, diag = scattering_grid(profile, k_grid)
    if diag["unitarity_residual"] > 1e-6:
        warnings.warn(
            f"unitarity residual {diag['unitarity_residual']:.2e} exceeds 1e-6; "
            "scattering data may be under-resolved",
            stacklevel=2,
        )
    small = small_k_data(profile, k_grid, a1, a2)
    case, fields = classify_case(small, profile.amplitude)
    k1 = find_k1(profile)
    limit, reliable = check_assumption2(k_grid, a1, a2, b)
    if abs(limit) > 1.0:
        raise CaseClassificationError(
            f"reflection product winds by {limit:.3f} at k -> 0^-; "
            "the admissible-phase assumption fails for this profile"
        )
    if not reliable:
        warnings.warn(
            f"reflection-product phase limit {limit:.3e} exceeds 1e-2; "
            "treat downstream phase constants as unreliable",
            stacklevel=2,
        )
    sd = SpectralData(
        k_grid=np.asarray(k_grid, dtype=float),
        a1=a1,
        a2=a2,
        b=b,
        amplitude=profile.amplitude,
        k1=k1,
        case=case,
        a2_at_zero=fields["a2_at_zero"],
        a11=fields["a11"],
        a21=fields["a21"],
        profile_fingerprint=fp,
        assumption2_limit=limit,
        unitarity_residual=diag["unitarity_residual"],
        symmetry_residual=diag["symmetry_residual"],
    )
    if cache_path is not None:
        save_spectral_data(sd, cache_path)
    return sd


# ---------------------------------------------------------------------------
# closed-form synthetic families
# ---------------------------------------------------------------------------


def synthetic_case_i(
    k1: float = 0.6,
    d: float = 0.9,
    k_grid: np.ndarray | None = None,
) -> SpectralData:
    """Rational unitary family with generic small-k behaviour.

    ``a1 = (k + i d)(k - i k1)/k^2``, ``a2 = (k - i d)/(k - i k1)``,
    ``b = -i d / k`` with background level ``A = 2 k1``; then
    ``a1 a2 + b conj(b(-k)) = 1`` identically, ``a2(0) = d/k1 > 0``, and
    ``d = k1`` reduces exactly to the pure-step data.
    """
    if not (k1 > 0 and d > 0):
        raise ValueError("k1 and d must be positive")
    if k_grid is None:
        k_grid = default_k_grid()
    k = np.asarray(k_grid, dtype=float)
    _require_symmetric(k)
    a1 = (k + 1j * d) * (k - 1j * k1) / k**2
    a2 = (k - 1j * d) / (k - 1j * k1)
    b = -1j * d / k
    return SpectralData(
        k_grid=k,
        a1=a1,
        a2=a2,
        b=b,
        amplitude=2.0 * k1,
        k1=k1,
        case=CaseTag.CASE_I,
        a2_at_zero=d / k1,
        a11=None,
        a21=None,
        profile_fingerprint=f"synthetic-case-i:k1={k1!r}:d={d!r}",
        assumption2_limit=0.0,
    )


def synthetic_case_ii(
    k1: float = 0.6,
    pole: float = 1.0,
    coupling: float = 0.5,
    amplitude: float | None = None,
    k_grid: np.ndarray | None = None,
) -> SpectralData:
    """Rational unitary family with degenerate small-k behaviour.

    ``a1 = (k - i k1)/k``,
    ``a2 = k (k - i(pole - coupling))(k - i(pole + coupling)) /
    ((k - i k1)(k - i pole)^2)``, ``b = coupling/(k - i pole)`` with
    ``0 <= coupling < pole``.  Then ``a1 a2 = 1 + coupling^2/(k - i pole)^2``
    satisfies unitarity exactly, ``a11 = -i k1``,
    ``a21 = i (pole^2 - coupling^2)/(k1 pole^2)``, and
    ``coupling = 0`` gives exactly the reflectionless one-soliton data
    (in which case the background level is forced to ``2 k1``).
    """
    if not (k1 > 0 and pole > 0 and 0 <= coupling < pole):
        raise ValueError("require k1 > 0, pole > 0, 0 <= coupling < pole")
    if amplitude is None:
        amplitude = 2.0 * k1 if coupling == 0 else 1.0
    if k_grid is None:
        k_grid = default_k_grid()
    k = np.asarray(k_grid, dtype=float)
    _require_symmetric(k)
    a1 = (k - 1j * k1) / k
    a2 = (
        k
        * (k - 1j * (pole - coupling))
        * (k - 1j * (pole + coupling))
        / ((k - 1j * k1) * (k - 1j * pole) ** 2)
    )
    b = np.full_like(k, coupling, dtype=complex) / (k - 1j * pole)
    a11 = -1j * k1
    a21 = 1j * (pole**2 - coupling**2) / (k1 * pole**2)
    return SpectralData(
        k_grid=k,
        a1=a1,
        a2=a2,
        b=b,
        amplitude=float(amplitude),
        k1=k1,
        case=CaseTag.CASE_II,
        a2_at_zero=None,
        a11=a11,
        a21=a21,
        profile_fingerprint=(
            f"synthetic-case-ii:k1={k1!r}:pole={pole!r}:coupling={coupling!r}"
        ),
        assumption2_limit=0.0,
    )
