"""Phase functionals driving the curved-wedge asymptotics.

Every quantity in this module is a Cauchy-type integral of the
branch-tracked logarithm of ``W(k) = 1 + r1(k) r2(k)`` over the negative
spectral half-line.  Under unitarity ``W = 1/(a1 a2)`` exactly, so the
tracker never forms the reflection coefficients where they are singular;
instead it works with the regularized products

* generic (Case I):     ``P(k) = k^2 a1(k) a2(k)``, ``P(0) = (A a2(0)/2)^2 > 0``
* degenerate (Case II): ``N(k) = a1(k) a2(k)``, ``N(0) = a11 a21 > 0``

whose continuous logarithms are sampled on the scattering grid, splined,
and anchored so that the accumulated argument tends to 0 as k -> -inf.
Beyond the grid edge the logarithm is continued by a fitted algebraic
tail ``c1/u + c2/u^2 + c3/u^3 + c4/u^4`` whose integrals close in
elementary form.

Integrals that reach the spectral origin are computed in the variable
``tau = ln(-k)``; this absorbs the logarithmic growth of the integrand
into a bounded factor ``u d/du ln W(u)`` and turns endpoint log
singularities into the quadrature module's log-at-left-end form.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .scattering import CaseTag, SpectralData
from .specfun import QuadratureSpec, Singularity, quad

__all__ = [
    "EvaluationMethod",
    "ErrorOrder",
    "ExpansionBandWarning",
    "LogSingularityError",
    "PhaseFunctionalResult",
    "PhaseTracker",
    "RefinementRequiredError",
    "chi_hat",
    "chi_nu_direct",
    "chi_nu_expansion",
    "delta0",
    "delta0_expansion",
    "nu_hat",
    "slow_variables",
    "tracker_for",
]

_TWO_PI = 2.0 * math.pi
_LN4 = math.log(4.0)

# Inner edge of the window on which the algebraic tail is fitted.
_K_FIT = 30.0
# Inverse powers used by the tail fit.
_TAIL_POWERS = (1, 2, 3, 4)
# Lower cutoff in tau = ln(-k) for integrals reaching k = 0; the
# truncated piece is O(|tau_floor| * residual winding) and far below the
# quadrature tolerances for data satisfying the normalization check.
_TAU_FLOOR = -40.0
# Band of the slow variable on which the large-time expansions are
# uniform; outside it they are still evaluated but flagged.
EXPANSION_BAND = (0.05, 20.0)


class LogSingularityError(ArithmeticError):
    """1 + r1 r2 is too close to its zero for a stable logarithm."""


class RefinementRequiredError(RuntimeError):
    """Branch tracking hit an argument jump too large to unwrap safely."""


class ExpansionBandWarning(UserWarning):
    """Slow variable outside the band where the expansions are uniform."""


class EvaluationMethod(Enum):
    """How a phase-functional value was produced."""

    DIRECT_QUADRATURE = "direct-quadrature"
    ASYMPTOTIC_EXPANSION = "asymptotic-expansion"


@dataclass(frozen=True)
class ErrorOrder:
    """Symbolic error descriptor O(t**t_exponent * ln(t)**log_power).

    ``log_power`` may be half-integral: square-root-of-log factors appear
    in the generic wedge corrections.
    """

    t_exponent: float
    log_power: float

    def __str__(self) -> str:
        return f"O(t^{self.t_exponent:+.6g} ln^{self.log_power:g} t)"


@dataclass(frozen=True)
class PhaseFunctionalResult:
    """Values of the scalar phase functionals at one (alpha, s, t) point.

    ``chi_origin_const`` holds the s-dependent constant of the origin
    value (generic case) or the shared constant (degenerate case);
    ``chi_saddle_const`` holds its stationary-point counterpart, which in
    the generic case differs by the exact offset i*pi/6.
    """

    nu_hat: complex
    chi_at_origin: complex
    chi_at_saddle: complex
    chi_origin_const: complex
    chi_saddle_const: complex
    plateau: float
    method: EvaluationMethod
    error_order: ErrorOrder | None
    case: CaseTag


def slow_variables(alpha: float, s: float, t: float | None, *, ln_t: float | None = None):
    """Return (ln xi, ln x, ln 4st) for the wedge parametrized by
    x**(2-alpha) = 4 s t.  Pass ``ln_t`` to stay in log space when t
    itself would overflow."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not s > 0.0:
        raise ValueError("s must be positive")
    if ln_t is None:
        if t is None or not t > 0.0:
            raise ValueError("t must be positive (or pass ln_t)")
        ln_t = math.log(t)
    ln_4st = _LN4 + math.log(s) + ln_t
    ln_x = ln_4st / (2.0 - alpha)
    ln_xi = math.log(s) + (alpha - 1.0) * ln_x
    return ln_xi, ln_x, ln_4st


def _tail_moment(n: int, k_edge: float) -> float:
    """Integral of u**(-n) over (-inf, -k_edge], n >= 2."""
    return (-k_edge) ** (1 - n) / (1 - n)


class PhaseTracker:
    """Branch-tracked evaluator of the phase functionals for one data set."""

    def __init__(self, sd: SpectralData):
        self.sd = sd
        k = sd.k_grid
        neg = k < 0.0
        kneg = k[neg]  # increasing, -k_max .. -k_min
        self.k_edge = float(-kneg[0])
        self.k_min = float(-kneg[-1])
        prod = sd.a1[neg] * sd.a2[neg]
        amp = sd.amplitude

        if sd.case is CaseTag.CASE_I:
            vals = kneg**2 * prod
            val0 = complex((0.5 * amp * sd.a2_at_zero) ** 2)
        else:
            vals = prod
            val0 = complex((complex(sd.a11) * complex(sd.a21)).real)
        if not val0.real > 0.0:
            raise RefinementRequiredError(
                "regularized spectral product is not positive at k = 0"
            )

        allv = np.append(vals, val0)
        rotation = np.angle(allv[1:] * np.conj(allv[:-1]))
        if np.max(np.abs(rotation)) > 0.9 * math.pi:
            raise RefinementRequiredError(
                "argument jump between adjacent nodes too close to pi; "
                "refine the spectral grid"
            )
        nodes = np.append(kneg, 0.0)
        theta = np.unwrap(np.angle(allv))
        self._theta = CubicSpline(nodes, theta)
        self._logabs = CubicSpline(nodes, np.log(np.abs(allv)))

        # Regularized reflection splines: r1(u) = u*s1(u), r2(u) = s2(u)/u.
        a1n = sd.a1[neg]
        a2n = sd.a2[neg]
        bn = sd.b[neg]
        b_mirror = np.conj(sd.b[::-1][neg])  # conj(b(-k)) at the same nodes
        s1_nodes = (bn / a1n) / kneg
        s2_nodes = kneg * (b_mirror / a2n)
        b0 = self._extrapolate_b_zero(k, sd.b)
        self.b_at_zero = b0
        if sd.case is CaseTag.CASE_I:
            s1_zero = -2.0j / amp
            s2_zero = -0.5j * amp
        else:
            s1_zero = b0 / complex(sd.a11)
            s2_zero = np.conj(b0) / complex(sd.a21)
        self._s1 = CubicSpline(nodes, np.append(s1_nodes, s1_zero))
        self._s2 = CubicSpline(nodes, np.append(s2_nodes, s2_zero))

        # Algebraic tail of L = ln W fitted on the outermost window.
        window = kneg <= -_K_FIT
        if not np.any(window):
            raise ValueError(
                f"spectral grid stops at |k| = {-float(np.min(kneg)):.3g}; "
                f"the tail fit needs samples with |k| >= {_K_FIT:g}"
            )
        u_fit = kneg[window]
        log_pn = np.log(np.abs(allv[:-1][window])) + 1j * theta[:-1][window]
        if sd.case is CaseTag.CASE_I:
            l_fit = 2.0 * np.log(-u_fit) - log_pn
        else:
            l_fit = -log_pn
        basis = np.stack([u_fit ** (-p) for p in _TAIL_POWERS], axis=1)
        coef, *_ = np.linalg.lstsq(basis, l_fit, rcond=None)
        self._tail_coef = coef
        self.tail_residual = float(np.max(np.abs(basis @ coef - l_fit)))

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def _extrapolate_b_zero(k: np.ndarray, b: np.ndarray) -> complex:
        order = np.argsort(np.abs(k))[:10]
        kk = k[order]
        bb = b[order]
        if np.max(np.abs(bb)) == 0.0:
            return 0.0 + 0.0j
        cre = np.polyfit(kk, bb.real, 2)
        cim = np.polyfit(kk, bb.imag, 2)
        return complex(cre[-1], cim[-1])

    # -- elementary evaluations ----------------------------------------------

    def _log_pn(self, u, derivative: int = 0):
        return self._logabs(u, derivative) + 1j * self._theta(u, derivative)

    def log_w(self, u):
        """Branch-tracked ln(1 + r1 r2) on [-k_edge, 0)."""
        u = np.asarray(u, dtype=float)
        if self.sd.case is CaseTag.CASE_I:
            return 2.0 * np.log(-u) - self._log_pn(u)
        return -self._log_pn(u)

    def _g0(self, u):
        """u * d/du ln(1 + r1 r2): bounded on [-k_edge, 0]."""
        u = np.asarray(u, dtype=float)
        if self.sd.case is CaseTag.CASE_I:
            return 2.0 - u * self._log_pn(u, 1)
        return -u * self._log_pn(u, 1)

    def _tail_l(self, u: float) -> complex:
        return complex(sum(c * u ** (-p) for c, p in zip(self._tail_coef, _TAIL_POWERS)))

    def _tail_log_integral(self) -> complex:
        """Integral of L(u)/u over (-inf, -k_edge] from the fitted tail."""
        return complex(
            sum(c * _tail_moment(p + 1, self.k_edge) for c, p in zip(self._tail_coef, _TAIL_POWERS))
        )

    def _tail_chi(self, z_hat: float) -> complex:
        """Integral of ln(z_hat - u) dL(u) over (-inf, -k_edge]."""
        k_edge = self.k_edge
        if not abs(z_hat) < 0.5 * k_edge:
            raise ValueError("kernel offset too large for the tail series")
        total = math.log(z_hat + k_edge) * self._tail_l(-k_edge)
        # integral of L(u)/(z_hat-u): geometric expansion in z_hat/u
        acc = 0.0 + 0.0j
        power = 1.0
        for m in range(64):
            term = power * sum(
                c * _tail_moment(p + m + 1, k_edge) for c, p in zip(self._tail_coef, _TAIL_POWERS)
            )
            acc += term
            if abs(term) <= 1e-17 * (1.0 + abs(acc)) or z_hat == 0.0:
                break
            power *= z_hat
        return total - acc

    def _check_window(self, xi: float) -> None:
        if not xi < 0.5 * self.k_edge:
            raise ValueError(
                f"slow-variable argument {xi:.3g} lies outside the tabulated "
                f"spectral window (edge {self.k_edge:.3g})"
            )

    # -- point values ----------------------------------------------------------

    def reflection_pair(self, alpha: float, s: float, t: float | None, *, ln_t: float | None = None):
        """Saddle-point values of the pole-dressed reflection coefficients.

        Their product equals r1(-xi) r2(-xi) identically -- the dressing
        cancels -- so these are the values whose combination with nu_hat
        obeys the exact parametrix product identity.
        """
        ln_xi, ln_x, _ = slow_variables(alpha, s, t, ln_t=ln_t)
        xi = math.exp(ln_xi)
        self._check_window(xi)
        dress = 1.0 + 1j * self.sd.k1 * math.exp((1.0 - alpha) * ln_x) / s
        r1 = complex(self._s1(-xi)) * (-xi) * dress
        r2 = complex(self._s2(-xi)) / (-xi) / dress
        return r1, r2

    def _log_w_tracked(self, w: complex, u: float) -> complex:
        """log of a point value of W with the winding taken from the
        tracked argument of the regularized product."""
        if abs(w) < 1e-12:
            raise LogSingularityError(
                "1 + r1 r2 is within 1e-12 of zero; the logarithm is unstable"
            )
        principal = cmath.phase(w)
        target = -float(self._theta(u))
        wind = round((target - principal) / _TWO_PI)
        return complex(math.log(abs(w)), principal + _TWO_PI * wind)

    def nu_hat(self, alpha: float, s: float, t: float | None, *, ln_t: float | None = None) -> complex:
        """-(1/2 pi) ln(1 + r1 r2) at the stationary point, continuous branch."""
        ln_xi, _, _ = slow_variables(alpha, s, t, ln_t=ln_t)
        xi = math.exp(ln_xi)
        self._check_window(xi)
        r1, r2 = self.reflection_pair(alpha, s, t, ln_t=ln_t)
        w = 1.0 + r1 * r2
        return -self._log_w_tracked(w, -xi) / _TWO_PI

    def chi_hat(
        self,
        z: float,
        alpha: float,
        s: float,
        t: float | None,
        *,
        ln_t: float | None = None,
        spec: QuadratureSpec | None = None,
    ) -> complex:
        """Direct quadrature of the log-kernel functional at height z >= -s."""
        ln_xi, ln_x, _ = slow_variables(alpha, s, t, ln_t=ln_t)
        xi = math.exp(ln_xi)
        self._check_window(xi)
        if z < -s - 1e-12 * max(1.0, s):
            raise ValueError("chi_hat requires z >= -s")
        at_saddle = abs(z + s) <= 1e-12 * max(1.0, s)
        z_hat = -xi if at_saddle else z * math.exp((alpha - 1.0) * ln_x)
        if not abs(z_hat) < 0.5 * self.k_edge:
            raise ValueError("scaled kernel offset outside the tabulated window")

        l_xi = complex(self.log_w(-xi))
        scale_term = 1j * (1.0 - alpha) * ln_x / _TWO_PI * l_xi
        tail = self._tail_chi(z_hat)

        g0 = self._g0
        ln_edge = math.log(self.k_edge)

        if at_saddle:
            # Shift the integration variable so the logarithmic endpoint
            # sits exactly at 0, where the singular map is lossless:
            # ln(-xi + e^(ln xi + v)) = ln(xi) + ln(expm1(v)).
            def integrand(v):
                v = np.asarray(v, dtype=float)
                grow = np.exp(v)
                return (ln_xi + np.log(np.expm1(v))) * g0(-xi * grow)

            lo, hi = 0.0, ln_edge - ln_xi
            kind = Singularity.LOG_AT_LEFT_END
        else:

            def integrand(tau):
                tau = np.asarray(tau, dtype=float)
                return np.log(z_hat + np.exp(tau)) * g0(-np.exp(tau))

            lo, hi = ln_xi, ln_edge
            kind = Singularity.NONE

        if spec is None:
            # Tolerances are bounded below by the C^1 smoothness of the
            # splined data: the panel error estimate saturates near 1e-10.
            spec = QuadratureSpec(
                atol=1e-10, rtol=1e-9, max_subdivisions=600, singularity=kind
            )
        mid = quad(integrand, lo, hi, spec).value
        return scale_term + 1j / _TWO_PI * (tail - mid)

    # -- cached constants --------------------------------------------------------

    @cached_property
    def plateau(self) -> float:
        """Limiting real part of the log-kernel functional: the weighted
        winding of W over the negative half-line."""
        tail = float(np.imag(self._tail_log_integral()))
        theta = self._theta

        def integrand(tau):
            return theta(-np.exp(np.asarray(tau, dtype=float)))

        spec = QuadratureSpec(atol=5e-10, rtol=1e-9, max_subdivisions=800)
        mid = quad(integrand, _TAU_FLOOR, math.log(self.k_edge), spec).value
        return (tail + float(mid)) / _TWO_PI

    @cached_property
    def origin_constant(self) -> complex:
        """s-independent constant of the large-time origin value: the
        log-kernel integral of dL split at the unit circle (generic case)
        or taken across the whole half-line (degenerate case)."""
        ln_k = math.log(self.k_edge)
        g0 = self._g0
        spec = QuadratureSpec(atol=5e-10, rtol=1e-9, max_subdivisions=800)

        def outer(tau):
            tau = np.asarray(tau, dtype=float)
            return tau * g0(-np.exp(tau))

        if self.sd.case is CaseTag.CASE_I:
            mid = -quad(outer, 0.0, ln_k, spec).value
            log_pn = self._log_pn

            def inner(tau):
                tau = np.asarray(tau, dtype=float)
                u = -np.exp(tau)
                return tau * (u * log_pn(u, 1))

            inner_val = quad(inner, _TAU_FLOOR, 0.0, spec).value
            return 1j / _TWO_PI * (self._tail_chi(0.0) + mid + inner_val)
        mid = -quad(outer, _TAU_FLOOR, ln_k, spec).value
        return 1j / _TWO_PI * (self._tail_chi(0.0) + mid)

    def chi_origin_const(self, s: float) -> complex:
        """Large-time constant of the origin value at slow variable s."""
        if self.sd.case is CaseTag.CASE_I:
            return 1j * math.log(s) ** 2 / _TWO_PI + self.origin_constant
        return self.origin_constant

    def chi_saddle_const(self, s: float) -> complex:
        """Large-time constant at the stationary point: origin constant
        plus the exact dilogarithm offset i*pi/6 in the generic case."""
        if self.sd.case is CaseTag.CASE_I:
            return self.chi_origin_const(s) + 1j * math.pi / 6.0
        return self.origin_constant

    # -- result assembly -----------------------------------------------------------

    def expansion(
        self, alpha: float, s: float, t: float | None, *, ln_t: float | None = None
    ) -> PhaseFunctionalResult:
        """Large-time expansions of nu_hat and chi_hat."""
        _, _, ln_4st = slow_variables(alpha, s, t, ln_t=ln_t)
        if not EXPANSION_BAND[0] <= s <= EXPANSION_BAND[1]:
            warnings.warn(
                f"s={s:.3g} outside the uniform-expansion band {EXPANSION_BAND}",
                ExpansionBandWarning,
                stacklevel=2,
            )
        error = ErrorOrder((1.0 - alpha) / (alpha - 2.0), 1)
        if self.sd.case is CaseTag.CASE_I:
            amp_half = 0.5 * self.sd.amplitude * abs(self.sd.a2_at_zero)
            nu0 = (1.0 - alpha) / (math.pi * (2.0 - alpha))
            nu = nu0 * ln_4st + math.log(amp_half / s) / math.pi
            chi0_s = self.chi_origin_const(s)
            chi_origin = (
                -1j * (1.0 - alpha) ** 2 / (_TWO_PI * (2.0 - alpha) ** 2) * ln_4st**2
                - 1j * nu0 * math.log(amp_half) * ln_4st
                + chi0_s
            )
            saddle_const = chi0_s + 1j * math.pi / 6.0
            chi_saddle = chi_origin + 1j * math.pi / 6.0
        else:
            prod0 = float((complex(self.sd.a11) * complex(self.sd.a21)).real)
            nu = math.log(prod0) / _TWO_PI
            chi0_s = self.origin_constant
            chi_origin = (
                1j * (1.0 - alpha) / (_TWO_PI * (alpha - 2.0)) * math.log(prod0) * ln_4st + chi0_s
            )
            saddle_const = chi0_s
            chi_saddle = chi_origin
        return PhaseFunctionalResult(
            nu_hat=complex(nu),
            chi_at_origin=chi_origin,
            chi_at_saddle=chi_saddle,
            chi_origin_const=chi0_s,
            chi_saddle_const=saddle_const,
            plateau=self.plateau,
            method=EvaluationMethod.ASYMPTOTIC_EXPANSION,
            error_order=error,
            case=self.sd.case,
        )

    def direct(self, alpha: float, s: float, t: float | None, *, ln_t: float | None = None) -> PhaseFunctionalResult:
        """Direct-quadrature values of nu_hat and chi_hat at z = 0 and z = -s."""
        return PhaseFunctionalResult(
            nu_hat=self.nu_hat(alpha, s, t, ln_t=ln_t),
            chi_at_origin=self.chi_hat(0.0, alpha, s, t, ln_t=ln_t),
            chi_at_saddle=self.chi_hat(-s, alpha, s, t, ln_t=ln_t),
            chi_origin_const=self.chi_origin_const(s),
            chi_saddle_const=self.chi_saddle_const(s),
            plateau=self.plateau,
            method=EvaluationMethod.DIRECT_QUADRATURE,
            error_order=None,
            case=self.sd.case,
        )

    # -- ray-limit modulation -----------------------------------------------------

    def delta0(self, xi: float) -> complex:
        """Modulation factor of the straight-ray region by direct quadrature."""
        if not xi > 0.0:
            raise ValueError("xi must be positive")
        self._check_window(xi)
        log_w = self.log_w

        def integrand(tau):
            return log_w(-np.exp(np.asarray(tau, dtype=float)))

        spec = QuadratureSpec(atol=1e-10, rtol=1e-9, max_subdivisions=600)
        mid = -quad(integrand, math.log(xi), math.log(self.k_edge), spec).value
        total = self._tail_log_integral() + mid
        return cmath.exp(-1j * total / _TWO_PI)

    def delta0_expansion(self, xi: float) -> complex:
        """Small-xi form of delta0 built from the cached constants."""
        if not xi > 0.0:
            raise ValueError("xi must be positive")
        if self.sd.case is CaseTag.CASE_I:
            amp_half = 0.5 * self.sd.amplitude * abs(self.sd.a2_at_zero)
            exponent = (
                1j / math.pi * math.log(xi) * math.log(amp_half / xi)
                + self.chi_origin_const(xi)
            )
        else:
            prod0 = float((complex(self.sd.a11) * complex(self.sd.a21)).real)
            exponent = 1j / _TWO_PI * math.log(xi) * math.log(prod0) + self.origin_constant
        return cmath.exp(exponent)


# -- module-level convenience API ------------------------------------------------

_TRACKERS: dict[tuple, PhaseTracker] = {}
_TRACKER_CACHE_LIMIT = 8


def tracker_for(sd: SpectralData) -> PhaseTracker:
    """Return a (cached) PhaseTracker for the given spectral data."""
    key = (
        sd.profile_fingerprint,
        sd.k_grid.size,
        float(sd.k_grid[0]),
        float(sd.k_grid[-1]),
        sd.case.value,
    )
    tracker = _TRACKERS.get(key)
    if tracker is None or tracker.sd is not sd:
        tracker = PhaseTracker(sd)
        if len(_TRACKERS) >= _TRACKER_CACHE_LIMIT:
            _TRACKERS.pop(next(iter(_TRACKERS)))
        _TRACKERS[key] = tracker
    return tracker


def nu_hat(sd: SpectralData, alpha: float, s: float, t: float | None, *, ln_t: float | None = None) -> complex:
    return tracker_for(sd).nu_hat(alpha, s, t, ln_t=ln_t)


def chi_hat(
    sd: SpectralData, z: float, alpha: float, s: float, t: float | None, *, ln_t: float | None = None
) -> complex:
    return tracker_for(sd).chi_hat(z, alpha, s, t, ln_t=ln_t)


def chi_nu_expansion(
    sd: SpectralData, alpha: float, s: float, t: float | None, *, ln_t: float | None = None
) -> PhaseFunctionalResult:
    return tracker_for(sd).expansion(alpha, s, t, ln_t=ln_t)


def chi_nu_direct(
    sd: SpectralData, alpha: float, s: float, t: float | None, *, ln_t: float | None = None
) -> PhaseFunctionalResult:
    return tracker_for(sd).direct(alpha, s, t, ln_t=ln_t)


def delta0(sd: SpectralData, xi: float) -> complex:
    return tracker_for(sd).delta0(xi)


def delta0_expansion(sd: SpectralData, xi: float) -> complex:
    return tracker_for(sd).delta0_expansion(xi)
