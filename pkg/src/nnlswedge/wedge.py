"""Asymptotic predictions along the slow-observation wedge x**(2-alpha) = 4st.

For step-like data the field near the wedge curve oscillates on a plateau of
modulus Q with a phase driven by two nested logarithmic scales, plus decaying
correction terms whose amplitudes come from a parabolic-cylinder parametrix.
This module evaluates those predictions by two deliberately independent
routes so they can cross-check each other:

* :func:`gen_as_predict` -- the exact mid-level route.  The connection
  coefficients are assembled from direct-quadrature values of the phase
  functionals and from the dressed reflection values at the stationary
  point; no large-time expansion of those ingredients enters.  The only
  asymptotic content is the parametrix error recorded in ``error_order``.
* :func:`predict_q` -- the fully expanded route.  Every factor is a frozen
  constant multiplied by elementary functions of t, organized by the ledger
  of log-phase coefficients from :func:`phase_coefficients`.

The two routes converge to each other at the slower of their printed error
rates; their gap is the working measure of how quickly the closed-form
coefficients take over from the exact functionals.

:func:`matching_check` reconciles the wedge-interior forms with the
straight-ray forms as alpha -> 1, holding either the observation time or the
product (1 - alpha) ln t fixed along the ladder.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .phases import ErrorOrder, EvaluationMethod, tracker_for
from .scattering import CaseTag, SpectralData
from .specfun import log_gamma

__all__ = [
    "Side",
    "WedgePoint",
    "PhaseLedger",
    "PhaseCoefficients",
    "BetaGamma",
    "AsymptoticPrediction",
    "MatchingRow",
    "MatchingReport",
    "wedge_point",
    "amplitude_Q",
    "phase_coefficients",
    "beta_gamma",
    "predict_q",
    "gen_as_predict",
    "matching_check",
    "DEGENERATE_REFLECTION",
]

_TWO_PI = 2.0 * math.pi
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LN2 = math.log(2.0)

# Reflection values below this threshold are treated as exactly
# reflectionless: every connection coefficient degenerates to zero there
# (the gamma-factor pole cancels against the vanishing reflection).
DEGENERATE_REFLECTION = 1e-10

# Magnitude logs below this underflow double precision; such terms are
# returned as exact zeros rather than denormals.
_UNDERFLOW_LOG = -700.0

# alpha edges separating the regimes with explicit correction terms from
# the leading-only / bound-only regimes.
_EXPLICIT_EDGE = 2.0 / 3.0
_REMAINDER_EDGE = 4.0 / 5.0


class Side(Enum):
    """Which side of the origin a prediction refers to.

    The wedge coordinate x is always positive; ``MINUS_X`` predictions
    describe the field at ``-x``, which is coupled to the field at ``+x``
    by the mirror nonlinearity.
    """

    PLUS_X = "+x"
    MINUS_X = "-x"


# ---------------------------------------------------------------------------
# wedge points


@dataclass(frozen=True)
class WedgePoint:
    """A point on the wedge curve, stored in log-time form.

    All derived quantities are exposed through logarithms so the point
    remains usable on ladders where t itself would overflow a double.
    """

    alpha: float
    s: float
    ln_t: float
    side: Side

    @property
    def ln_4st(self) -> float:
        return math.log(4.0 * self.s) + self.ln_t

    @property
    def ln_x(self) -> float:
        return self.ln_4st / (2.0 - self.alpha)

    @property
    def ln_xi(self) -> float:
        return math.log(self.s) + (self.alpha - 1.0) * self.ln_x

    @property
    def t(self) -> float:
        return math.exp(self.ln_t) if self.ln_t < 709.0 else math.inf

    @property
    def x(self) -> float:
        return math.exp(self.ln_x) if self.ln_x < 709.0 else math.inf

    @property
    def xi(self) -> float:
        return math.exp(self.ln_xi)


def wedge_point(
    alpha: float,
    s: float,
    t: float | None = None,
    side: Side | str = Side.PLUS_X,
    *,
    ln_t: float | None = None,
) -> WedgePoint:
    """Construct a :class:`WedgePoint`, validating the asymptotic regime.

    Pass ``ln_t`` instead of ``t`` to stay in log space.  Requires t > 1 and
    4st > e so every logarithm in the phase ledgers is positive.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not s > 0.0:
        raise ValueError("s must be positive")
    if ln_t is None:
        if t is None or not t > 0.0:
            raise ValueError("provide t > 0 or ln_t")
        ln_t = math.log(t)
    if isinstance(side, str):
        side = Side(side)
    if not ln_t > 0.0:
        raise ValueError("asymptotic predictions require t > 1")
    if not math.log(4.0 * s) + ln_t > 1.0:
        raise ValueError("asymptotic predictions require ln(4 s t) > 1")
    return WedgePoint(float(alpha), float(s), float(ln_t), side)


# ---------------------------------------------------------------------------
# phase ledgers and coefficient tables


@dataclass(frozen=True)
class PhaseLedger:
    """Real coefficients of one wedge phase, organized by elementary term::

        phase(t) = oscillation * t**(alpha/(2-alpha))
                 + log_squared * L**2 + log_times_loglog * L * ln(L)
                 + log_linear * L + loglog * ln(L) + constant,    L = ln(4st)

    The oscillation entry multiplies the fast power of t (it equals s * x**alpha
    on the wedge); all other terms vary on logarithmic scales only.
    """

    oscillation: float
    log_squared: float
    log_times_loglog: float
    log_linear: float
    loglog: float
    constant: float

    def vector(self) -> tuple[float, float, float, float, float, float]:
        return (
            self.oscillation,
            self.log_squared,
            self.log_times_loglog,
            self.log_linear,
            self.loglog,
            self.constant,
        )

    def slow_phase(self, ln_4st: float) -> float:
        """Every term except the fast oscillation, at L = ln_4st."""
        if not ln_4st > 0.0:
            raise ValueError("slow phase needs ln(4st) > 0")
        ln_l = math.log(ln_4st)
        return (
            self.log_squared * ln_4st * ln_4st
            + self.log_times_loglog * ln_4st * ln_l
            + self.log_linear * ln_4st
            + self.loglog * ln_l
            + self.constant
        )

    def phase_at(self, point: WedgePoint) -> float:
        """Full phase value at the given wedge point.

        Raises OverflowError when the fast oscillation exceeds the double
        range; magnitudes never involve this term, so log-space consumers
        should use :meth:`slow_phase` instead.
        """
        value = self.slow_phase(point.ln_4st)
        if self.oscillation:
            exponent = point.alpha / (2.0 - point.alpha) * point.ln_t
            if exponent > 709.0:
                raise OverflowError(
                    "fast oscillation overflows at this ln_t; use slow_phase"
                )
            value += self.oscillation * math.exp(exponent)
        return value


@dataclass(frozen=True)
class PhaseCoefficients:
    """Frozen coefficient table of the wedge phases at one (alpha, s, data).

    ``psi`` and ``phi1_hat`` store the positive reference magnitude
    ``(1-alpha)**2 / (pi * (2-alpha)**2)``; they enter every assembled phase
    negated (the squared-log term always retards the main phase).  All other
    entries are assembly-ready: the ledgers built from this table use them
    with exactly the signs carried here.  Entries that belong to the other
    nondegeneracy class are zero -- e.g. reflectionless data has
    ``phi51 == phi52 == phi5_hat == phi_ii == 0``.

    Main phases:
      generic      Psi   = -psi * L**2 + phi_i * L + main_constant
      degenerate   Psi   = phi_ii * L + main_constant
    Correction phases (j = 1, 2), sharing the fast term +/- phi0 * t**(a/(2-a)):
      generic      Psi_j = phi1j * L**2 +/- phi2 * L ln L + phi3j * L +/- phi4 * ln L
      degenerate   Psi_j = phi5j * L
    """

    alpha: float
    s: float
    case: CaseTag
    psi: float
    phi_i: float
    phi_ii: float
    phi0: float
    phi11: float
    phi12: float
    phi2: float
    phi31: float
    phi32: float
    phi4: float
    phi51: float
    phi52: float
    phi3_tilde: float
    phi1_hat: float
    phi3_hat: float
    phi5_hat: float
    main_constant: float


def phase_coefficients(sd: SpectralData, alpha: float, s: float) -> PhaseCoefficients:
    """Evaluate the full coefficient table at one (alpha, s).

    Universal entries (psi, phi0, phi1j, phi2, phi3_tilde, phi1_hat) depend
    only on alpha and s; the remaining entries use the small-k limits of the
    spectral data for the matching nondegeneracy class and are zero for the
    other class.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not s > 0.0:
        raise ValueError("s must be positive")
    tracker = tracker_for(sd)
    nu0 = (1.0 - alpha) / (math.pi * (2.0 - alpha))
    psi = (1.0 - alpha) ** 2 / (math.pi * (2.0 - alpha) ** 2)
    phi0 = 2.0 ** (2.0 * alpha / (2.0 - alpha)) * s ** (2.0 / (2.0 - alpha))
    shear = alpha * nu0 / (2.0 - alpha)
    phi11 = -psi - shear
    phi12 = -psi + shear
    phi3_tilde = nu0 * (math.log(nu0) - 1.0)
    if sd.case is CaseTag.CASE_I:
        if sd.a2_at_zero is None:
            raise ValueError("generic-class coefficients need a2_at_zero")
        amp_half = 0.5 * sd.amplitude * abs(sd.a2_at_zero)
        phi4 = math.log(amp_half / s) / math.pi
        phi_i = 2.0 * nu0 * math.log(s / amp_half)
        phi3_hat = nu0 * (
            math.log(nu0) - 1.0 + math.log(2.0 * s) - 2.0 * math.log(2.0 * amp_half)
        )
        phi31 = phi3_hat - alpha * phi4 / (2.0 - alpha)
        phi32 = 2.0 * phi_i - phi31
        main_constant = (
            2.0 / math.pi * math.log(s) * math.log(amp_half / s)
            + 2.0 * tracker.chi_origin_const(s).imag
        )
        phi_ii = phi51 = phi52 = phi5_hat = 0.0
    else:
        if sd.a11 is None or sd.a21 is None:
            raise ValueError("degenerate-class coefficients need a11 and a21")
        prod0 = float((complex(sd.a11) * complex(sd.a21)).real)
        if not prod0 > 0.0:
            raise ValueError("a11 * a21 must be a positive real number")
        nu_zero = math.log(prod0) / _TWO_PI
        phi5_hat = -nu_zero * (1.0 - alpha) / (2.0 - alpha)
        phi_ii = 2.0 * phi5_hat
        phi51 = -nu_zero
        phi52 = nu_zero * (3.0 * alpha - 2.0) / (2.0 - alpha)
        main_constant = (
            math.log(s) * math.log(prod0) / math.pi
            + 2.0 * tracker.origin_constant.imag
        )
        phi_i = phi4 = phi31 = phi32 = phi3_hat = 0.0
    return PhaseCoefficients(
        alpha=float(alpha),
        s=float(s),
        case=sd.case,
        psi=psi,
        phi_i=phi_i,
        phi_ii=phi_ii,
        phi0=phi0,
        phi11=phi11,
        phi12=phi12,
        phi2=nu0,
        phi31=phi31,
        phi32=phi32,
        phi4=phi4,
        phi51=phi51,
        phi52=phi52,
        phi3_tilde=phi3_tilde,
        phi1_hat=psi,
        phi3_hat=phi3_hat,
        phi5_hat=phi5_hat,
        main_constant=main_constant,
    )


def _main_ledger(pc: PhaseCoefficients) -> PhaseLedger:
    if pc.case is CaseTag.CASE_I:
        return PhaseLedger(0.0, -pc.psi, 0.0, pc.phi_i, 0.0, pc.main_constant)
    return PhaseLedger(0.0, 0.0, 0.0, pc.phi_ii, 0.0, pc.main_constant)


def _correction_ledgers(pc: PhaseCoefficients) -> tuple[PhaseLedger, PhaseLedger]:
    if pc.case is CaseTag.CASE_I:
        forward = PhaseLedger(pc.phi0, pc.phi11, pc.phi2, pc.phi31, pc.phi4, 0.0)
        backward = PhaseLedger(-pc.phi0, pc.phi12, -pc.phi2, pc.phi32, -pc.phi4, 0.0)
    else:
        forward = PhaseLedger(pc.phi0, 0.0, 0.0, pc.phi51, 0.0, 0.0)
        backward = PhaseLedger(-pc.phi0, 0.0, 0.0, pc.phi52, 0.0, 0.0)
    return forward, backward


# ---------------------------------------------------------------------------
# amplitudes


def amplitude_Q(sd: SpectralData) -> float:
    """Modulus of the oscillatory plateau on the wedge.

    Equals the background level times the squared large-time modulus of the
    ray-limit modulation; for data with a real unitarity product it reduces
    to the background level exactly.
    """
    return sd.amplitude * math.exp(2.0 * tracker_for(sd).plateau)


def _inv_gamma(z: complex) -> complex:
    """Reciprocal gamma, exactly zero at the poles."""
    try:
        return cmath.exp(-log_gamma(z))
    except ValueError:
        return 0.0


def _b_at_zero(sd: SpectralData) -> complex:
    """Quadratic extrapolation of the forward coupling to k = 0.

    Only meaningful for the degenerate class, where the coupling is regular
    at the origin.
    """
    order = np.argsort(np.abs(sd.k_grid))[:10]
    coeffs = np.polyfit(sd.k_grid[order], sd.b[order], 2)
    return complex(coeffs[-1])


@dataclass(frozen=True)
class _CorrectionConstants:
    """Frozen large-time constants of the correction terms."""

    beta_const: complex
    gamma_const: complex
    amp_forward: complex
    amp_backward: complex
    amp_mirror: complex
    degenerate: bool


def _correction_constants(sd: SpectralData, pc: PhaseCoefficients) -> _CorrectionConstants:
    """Assemble the frozen amplitude constants of the expanded route.

    ``beta_const`` / ``gamma_const`` are the large-time constants of the
    dressed connection pair (their slowly varying phase lives in the
    ledgers); ``amp_forward`` / ``amp_backward`` multiply the two correction
    phases on the +x side, ``amp_mirror`` multiplies the explicit term on
    the -x side.
    """
    tracker = tracker_for(sd)
    alpha, s = pc.alpha, pc.s
    k1 = sd.k1
    level = sd.amplitude
    common = (1.0 - alpha) / (2.0 - alpha) * math.log(s) + (alpha + 2.0) / (
        2.0 * alpha - 4.0
    ) * _LN2
    if sd.case is CaseTag.CASE_I:
        chi_saddle = tracker.chi_saddle_const(s)
        nu0 = pc.phi2
        beta_const = (
            1j
            * level
            * cmath.exp(1j * pc.phi4 * math.log(0.5 * s) + common + 2.0 * chi_saddle)
            / (2.0 * k1 * cmath.exp((-1j * pc.phi4 - 0.5) * math.log(nu0)))
        )
        gamma_const = (
            -2j
            * k1
            * cmath.exp(-1j * pc.phi4 * math.log(0.5 * s) + common - 2.0 * chi_saddle)
            / (level * cmath.exp((1j * pc.phi4 - 0.5) * math.log(nu0)))
        )
        degenerate = False
    else:
        b_zero = _b_at_zero(sd)
        if abs(b_zero) < DEGENERATE_REFLECTION * max(1.0, level):
            zero = 0j
            return _CorrectionConstants(zero, zero, zero, zero, zero, True)
        prod0 = float((complex(sd.a11) * complex(sd.a21)).real)
        nu_zero = math.log(prod0) / _TWO_PI
        chi_one = tracker.origin_constant
        quarter = prod0**-0.25
        beta_par = (
            _SQRT_2PI
            * quarter
            * cmath.exp(-0.25j * math.pi)
            * complex(sd.a11)
            * _inv_gamma(-1j * nu_zero)
            / (k1 * b_zero)
        )
        gamma_par = (
            _SQRT_2PI
            * k1
            * complex(sd.a21)
            * quarter
            * cmath.exp(-0.75j * math.pi)
            * _inv_gamma(1j * nu_zero)
            / b_zero.conjugate()
        )
        beta_const = 1j * beta_par * cmath.exp(
            1j * nu_zero * math.log(0.5 * s) + common + 2.0 * chi_one
        )
        gamma_const = -1j * gamma_par * cmath.exp(
            -1j * nu_zero * math.log(0.5 * s) + common - 2.0 * chi_one
        )
        degenerate = False
    plateau_q = amplitude_Q(sd)
    amp_forward = -(2.0 * k1 / s) * beta_const
    amp_backward = (
        plateau_q
        * plateau_q
        * cmath.exp(2j * pc.main_constant)
        * gamma_const
        / (2.0 * k1 * s)
    )
    amp_mirror = (
        math.exp(
            alpha / (2.0 - alpha) * math.log(s)
            - (2.0 - 3.0 * alpha) / (2.0 - alpha) * _LN2
        )
        * gamma_const.conjugate()
        / k1
    )
    return _CorrectionConstants(
        beta_const, gamma_const, amp_forward, amp_backward, amp_mirror, degenerate
    )


# ---------------------------------------------------------------------------
# connection coefficients


@dataclass(frozen=True)
class BetaGamma:
    """Connection coefficients at one wedge point.

    ``beta`` / ``gamma`` are the parametrix pair (their product equals the
    winding index ``nu`` identically); ``beta_tilde`` / ``gamma_tilde``
    absorb the phase-functional dressing.  The ``*_asymptotic`` entries
    re-evaluate the tilde pair from the frozen large-time constants and the
    coefficient ledger; in the generic class they carry the slowly varying
    square-root-of-log factor.  ``degenerate`` marks reflectionless data,
    where every entry is exactly zero.
    """

    beta: complex
    gamma: complex
    beta_tilde: complex
    gamma_tilde: complex
    beta_tilde_asymptotic: complex
    gamma_tilde_asymptotic: complex
    nu: complex
    chi_saddle: complex
    degenerate: bool
    method: EvaluationMethod


def beta_gamma(
    sd: SpectralData,
    alpha: float,
    s: float,
    t: float | None = None,
    *,
    ln_t: float | None = None,
    method: EvaluationMethod = EvaluationMethod.DIRECT_QUADRATURE,
) -> BetaGamma:
    """Evaluate the connection coefficients at one wedge point.

    ``method`` selects how the phase-functional inputs are produced:
    direct quadrature (default, used for predictions) or the large-time
    expansions (used when reporting coefficient-level quantities, so that
    discrepancies localize to the expansion step).
    """
    point = wedge_point(alpha, s, t, Side.PLUS_X, ln_t=ln_t)
    tracker = tracker_for(sd)
    r1_dressed, r2_dressed = tracker.reflection_pair(alpha, s, None, ln_t=point.ln_t)
    if min(abs(r1_dressed), abs(r2_dressed)) < DEGENERATE_REFLECTION:
        zero = 0j
        return BetaGamma(
            zero, zero, zero, zero, zero, zero, 0j, 0j, True, method
        )
    if method is EvaluationMethod.DIRECT_QUADRATURE:
        nu = tracker.nu_hat(alpha, s, None, ln_t=point.ln_t)
        chi_saddle = tracker.chi_hat(-s, alpha, s, None, ln_t=point.ln_t)
    else:
        result = tracker.expansion(alpha, s, None, ln_t=point.ln_t)
        nu = result.nu_hat
        chi_saddle = result.chi_at_saddle
    beta = (
        _SQRT_2PI
        * cmath.exp(-0.5 * math.pi * nu - 0.75j * math.pi)
        * _inv_gamma(-1j * nu)
        / r1_dressed
    )
    gamma = (
        _SQRT_2PI
        * cmath.exp(-0.5 * math.pi * nu - 0.25j * math.pi)
        * _inv_gamma(1j * nu)
        / r2_dressed
    )
    common = (1.0 - alpha) / (2.0 - alpha) * math.log(s) + (alpha + 2.0) / (
        2.0 * alpha - 4.0
    ) * _LN2
    beta_tilde = 1j * beta * cmath.exp(1j * nu * math.log(0.5 * s) + common + 2.0 * chi_saddle)
    gamma_tilde = -1j * gamma * cmath.exp(
        -1j * nu * math.log(0.5 * s) + common - 2.0 * chi_saddle
    )
    pc = phase_coefficients(sd, alpha, s)
    constants = _correction_constants(sd, pc)
    if pc.case is CaseTag.CASE_I:
        tilt = PhaseLedger(0.0, -pc.phi1_hat, pc.phi2, pc.phi3_hat, pc.phi4, 0.0)
        root = math.sqrt(point.ln_t)
    else:
        tilt = PhaseLedger(0.0, 0.0, 0.0, 2.0 * pc.phi5_hat, 0.0, 0.0)
        root = 1.0
    slow = tilt.slow_phase(point.ln_4st)
    beta_tilde_asymptotic = constants.beta_const * cmath.exp(1j * slow) * root
    gamma_tilde_asymptotic = constants.gamma_const * cmath.exp(-1j * slow) * root
    return BetaGamma(
        beta=beta,
        gamma=gamma,
        beta_tilde=beta_tilde,
        gamma_tilde=gamma_tilde,
        beta_tilde_asymptotic=beta_tilde_asymptotic,
        gamma_tilde_asymptotic=gamma_tilde_asymptotic,
        nu=nu,
        chi_saddle=chi_saddle,
        degenerate=False,
        method=method,
    )


# ---------------------------------------------------------------------------
# predictions


@dataclass(frozen=True)
class AsymptoticPrediction:
    """One evaluated prediction at a wedge point.

    ``leading`` is the plateau term (zero on the -x side), ``correction``
    the explicit decaying term for the regimes that have one.  ``ledger``
    records the phase decomposition the record can be re-fit against: the
    main-phase ledger on the +x side, the explicit-term ledger on the -x
    side, zeros for bound-only regimes.  ``regime`` is the branch id, e.g.
    ``"I+x/explicit-correction"`` or ``"II-x/bound-only"``.
    """

    leading: complex
    correction: complex
    ledger: PhaseLedger
    error_order: ErrorOrder
    case: CaseTag
    regime: str
    point: WedgePoint

    @property
    def total(self) -> complex:
        return self.leading + self.correction


_ZERO_LEDGER = PhaseLedger(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def _evaluate_term(
    amplitude: complex, ledger: PhaseLedger, point: WedgePoint, log_prefactor: float
) -> complex:
    """amplitude * exp(i * ledger phase) * exp(log_prefactor), safely."""
    if amplitude == 0:
        return 0j
    magnitude_log = log_prefactor + math.log(abs(amplitude))
    if magnitude_log < _UNDERFLOW_LOG:
        return 0j
    phase = ledger.phase_at(point) + cmath.phase(amplitude)
    return math.exp(magnitude_log) * cmath.exp(1j * phase)


def predict_q(sd: SpectralData, point: WedgePoint) -> AsymptoticPrediction:
    """Fully expanded prediction at one wedge point.

    Each regime returns exactly the terms that are explicit for it: the
    plateau term on the +x side, plus (for alpha below 2/3) the pair of
    decaying correction terms; on the -x side the explicit mirror term for
    alpha above 2/3, otherwise only a bound recorded in ``error_order``.
    """
    pc = phase_coefficients(sd, point.alpha, point.s)
    plateau_q = amplitude_Q(sd)
    main = _main_ledger(pc)
    alpha = point.alpha
    tag = sd.case.value
    generic = sd.case is CaseTag.CASE_I
    if point.side is Side.PLUS_X:
        leading = plateau_q * cmath.exp(1j * main.phase_at(point))
        ledger = main
        if alpha < _EXPLICIT_EDGE:
            constants = _correction_constants(sd, pc)
            forward, backward = _correction_ledgers(pc)
            prefactor = alpha / (2.0 * alpha - 4.0) * point.ln_t
            if generic:
                prefactor += 0.5 * math.log(point.ln_t)
            correction = _evaluate_term(
                constants.amp_forward, forward, point, prefactor
            ) + _evaluate_term(constants.amp_backward, backward, point, prefactor)
            regime = f"{tag}+x/explicit-correction"
            if generic:
                error = ErrorOrder(alpha / (2.0 * alpha - 4.0), -0.5)
            elif alpha < 0.5:
                error = ErrorOrder(alpha / (alpha - 2.0), 1.0)
            else:
                error = ErrorOrder((1.0 - alpha) / (alpha - 2.0), 1.0)
        else:
            correction = 0j
            regime = f"{tag}+x/leading-only"
            error = ErrorOrder((1.0 - alpha) / (alpha - 2.0), 1.0)
    else:
        leading = 0j
        if alpha > _EXPLICIT_EDGE:
            constants = _correction_constants(sd, pc)
            forward, _ = _correction_ledgers(pc)
            ledger = forward
            prefactor = (4.0 - 3.0 * alpha) / (2.0 * alpha - 4.0) * point.ln_t
            if generic:
                prefactor += 0.5 * math.log(point.ln_t)
            correction = _evaluate_term(constants.amp_mirror, forward, point, prefactor)
            regime = f"{tag}-x/explicit-correction"
            if generic:
                error = ErrorOrder((4.0 - 3.0 * alpha) / (2.0 * alpha - 4.0), -0.5)
            elif alpha <= _REMAINDER_EDGE:
                error = ErrorOrder(1.0 / (alpha - 2.0), 1.0)
            else:
                error = ErrorOrder((6.0 - 5.0 * alpha) / (2.0 * alpha - 4.0), 0.5)
        else:
            correction = 0j
            ledger = _ZERO_LEDGER
            regime = f"{tag}-x/bound-only"
            error = ErrorOrder(1.0 / (alpha - 2.0), 1.0)
    return AsymptoticPrediction(
        leading=leading,
        correction=correction,
        ledger=ledger,
        error_order=error,
        case=sd.case,
        regime=regime,
        point=point,
    )


def gen_as_predict(sd: SpectralData, point: WedgePoint) -> AsymptoticPrediction:
    """Exact mid-level prediction at one wedge point.

    The ray-limit modulation and the connection coefficients are computed by
    direct quadrature; nothing here uses the large-time coefficient table,
    so the result is an independent target the expanded route must converge
    to.  ``error_order`` records the parametrix remainder of this route.
    """
    tracker = tracker_for(sd)
    alpha, s = point.alpha, point.s
    pc = phase_coefficients(sd, alpha, s)
    nu = tracker.nu_hat(alpha, s, None, ln_t=point.ln_t)
    chi_origin = tracker.chi_hat(0.0, alpha, s, None, ln_t=point.ln_t)
    r1_dressed, r2_dressed = tracker.reflection_pair(alpha, s, None, ln_t=point.ln_t)
    big_l = point.ln_4st
    delta_sq = cmath.exp(2.0 * (1j * nu * math.log(s) + chi_origin))
    if min(abs(r1_dressed), abs(r2_dressed)) < DEGENERATE_REFLECTION:
        forward_term = backward_term = 0j
    else:
        chi_saddle = tracker.chi_hat(-s, alpha, s, None, ln_t=point.ln_t)
        beta = (
            _SQRT_2PI
            * cmath.exp(-0.5 * math.pi * nu - 0.75j * math.pi)
            * _inv_gamma(-1j * nu)
            / r1_dressed
        )
        gamma = (
            _SQRT_2PI
            * cmath.exp(-0.5 * math.pi * nu - 0.25j * math.pi)
            * _inv_gamma(1j * nu)
            / r2_dressed
        )
        common = (1.0 - alpha) / (2.0 - alpha) * math.log(s) + (alpha + 2.0) / (
            2.0 * alpha - 4.0
        ) * _LN2
        beta_tilde = 1j * beta * cmath.exp(
            1j * nu * math.log(0.5 * s) + common + 2.0 * chi_saddle
        )
        gamma_tilde = -1j * gamma * cmath.exp(
            -1j * nu * math.log(0.5 * s) + common - 2.0 * chi_saddle
        )
        fast = alpha * point.ln_x
        if fast > 709.0:
            raise OverflowError("fast oscillation overflows at this ln_t")
        rotation = 1j * s * math.exp(fast) - 1j * alpha * nu * big_l / (2.0 - alpha)
        decay = alpha / (2.0 * alpha - 4.0) * point.ln_t
        forward_term = beta_tilde * cmath.exp(rotation + decay)
        backward_term = gamma_tilde * cmath.exp(-rotation + decay)
    tag = sd.case.value
    generic = sd.case is CaseTag.CASE_I
    if point.side is Side.PLUS_X:
        leading = sd.amplitude * delta_sq
        correction = (
            sd.amplitude**2 / (2.0 * sd.k1 * s) * delta_sq * delta_sq * backward_term
            - 2.0 * sd.k1 / s * forward_term
        )
        ledger = _main_ledger(pc)
        regime = f"{tag}+x/exact-route"
        if alpha > _EXPLICIT_EDGE:
            error = ErrorOrder(-0.5, 0.5)
        else:
            error = ErrorOrder(alpha / (alpha - 2.0), 1.0)
    else:
        leading = 0j
        correction = (
            2.0
            * s
            / sd.k1
            * math.exp((2.0 * alpha - 2.0) * point.ln_x)
            * backward_term.conjugate()
        )
        ledger = _correction_ledgers(pc)[0]
        regime = f"{tag}-x/exact-route"
        if alpha > _REMAINDER_EDGE:
            error = ErrorOrder((6.0 - 5.0 * alpha) / (2.0 * alpha - 4.0), 0.5)
        else:
            error = ErrorOrder(1.0 / (alpha - 2.0), 1.0)
    return AsymptoticPrediction(
        leading=leading,
        correction=correction,
        ledger=ledger,
        error_order=error,
        case=sd.case,
        regime=regime,
        point=point,
    )


# ---------------------------------------------------------------------------
# matching diagnostics


@dataclass(frozen=True)
class MatchingRow:
    """One rung of a matching ladder.

    ``phase_residual`` is the distance of the wedge main phase from its
    straight-ray constant; the two log-magnitudes compare the explicit
    mirror term against the straight-ray decay law (None where the mirror
    term is not explicit).
    """

    alpha: float
    ln_t: float
    phase_residual: float
    mirror_log_magnitude: float | None
    ray_log_magnitude: float | None


@dataclass(frozen=True)
class MatchingReport:
    """Reconciliation of wedge-interior and straight-ray forms.

    ``mirror_exponent`` is the fitted slope of the mirror log-magnitude
    against ln t (only available when ln t varies along the ladder);
    ``oscillation_coefficient_limit`` evaluates the fast-phase coefficient
    at alpha = 1, which must equal ``4 s**2`` exactly;
    ``mirror_amplitude_ratio`` compares the mirror-term constant against
    the straight-ray constant at the top of the ladder (degenerate class
    only; its modulus tends to 1 and its argument to pi).
    """

    case: CaseTag
    mode: str
    s: float
    rows: tuple[MatchingRow, ...]
    mirror_exponent: float | None
    oscillation_coefficient_limit: float
    oscillation_coefficient_expected: float
    mirror_amplitude_ratio: complex | None


def matching_check(
    sd: SpectralData,
    s: float,
    alphas,
    *,
    t: float | None = None,
    ln_t: float | None = None,
    hold_product: float | None = None,
) -> MatchingReport:
    """Run a matching ladder in alpha toward the straight-ray regime.

    Two ladder modes: pass ``t`` (or ``ln_t``) to hold the observation time
    fixed while alpha -> 1, or ``hold_product`` = c to keep
    (1 - alpha) * ln t = c fixed, which sends t -> infinity along the
    ladder.  In fixed-product mode the phase residual decreases toward a
    finite limit and the mirror magnitudes expose the straight-ray decay
    exponent; in fixed-time mode the residual itself tends to zero.
    """
    alphas = sorted(float(a) for a in alphas)
    if not alphas:
        raise ValueError("need at least one alpha")
    if any(not 0.0 < a < 1.0 for a in alphas):
        raise ValueError("alphas must lie in (0, 1)")
    if hold_product is not None:
        if not hold_product > 0.0:
            raise ValueError("hold_product must be positive")
        if t is not None or ln_t is not None:
            raise ValueError("pass either hold_product or a fixed time, not both")
        mode = "fixed-product"
    else:
        if ln_t is None:
            if t is None or not t > 1.0:
                raise ValueError("fixed-time mode needs t > 1 or ln_t > 0")
            ln_t = math.log(t)
        mode = "fixed-time"
    tracker = tracker_for(sd)
    generic = sd.case is CaseTag.CASE_I
    level = sd.amplitude
    if generic:
        ray_const_log = (
            math.log(4.0 * s / level)
            - 1.5 * _LN2
            - 2.0 * tracker.chi_saddle_const(s).real
        )
    rows = []
    fit_lnts: list[float] = []
    fit_mags: list[float] = []
    last_constants: _CorrectionConstants | None = None
    for alpha in alphas:
        lt = hold_product / (1.0 - alpha) if hold_product is not None else ln_t
        pc = phase_coefficients(sd, alpha, s)
        main = _main_ledger(pc)
        big_l = math.log(4.0 * s) + lt
        residual = abs(main.slow_phase(big_l) - pc.main_constant)
        constants = _correction_constants(sd, pc)
        last_constants = constants
        mirror_log = None
        ray_log = None
        if alpha > _EXPLICIT_EDGE and not constants.degenerate:
            mirror_log = (
                math.log(abs(constants.amp_mirror))
                + (4.0 - 3.0 * alpha) / (2.0 * alpha - 4.0) * lt
            )
            if generic:
                mirror_log += 0.5 * math.log(lt)
                ray_log = ray_const_log - 0.5 * lt + 0.5 * math.log(pc.phi2 * lt)
            else:
                ray_log = math.log(abs(_ray_mirror_constant(sd, s))) - 0.5 * lt
            fit_lnts.append(lt)
            fit_mags.append(mirror_log)
        rows.append(
            MatchingRow(
                alpha=alpha,
                ln_t=lt,
                phase_residual=residual,
                mirror_log_magnitude=mirror_log,
                ray_log_magnitude=ray_log,
            )
        )
    mirror_exponent = None
    if len(fit_lnts) >= 2 and max(fit_lnts) - min(fit_lnts) > 1e-9:
        slope = np.polyfit(np.asarray(fit_lnts), np.asarray(fit_mags), 1)[0]
        mirror_exponent = float(slope)
    # fast-phase coefficient continued to the straight-ray edge alpha = 1
    osc_limit = 2.0 ** (2.0 * 1.0 / (2.0 - 1.0)) * s ** (2.0 / (2.0 - 1.0))
    ratio = None
    if not generic and last_constants is not None and not last_constants.degenerate:
        prod0 = float((complex(sd.a11) * complex(sd.a21)).real)
        nu_zero = math.log(prod0) / _TWO_PI
        ratio = (
            last_constants.amp_mirror
            * cmath.exp(-1j * nu_zero * math.log(4.0 * s))
            / _ray_mirror_constant(sd, s)
        )
    return MatchingReport(
        case=sd.case,
        mode=mode,
        s=s,
        rows=tuple(rows),
        mirror_exponent=mirror_exponent,
        oscillation_coefficient_limit=osc_limit,
        oscillation_coefficient_expected=4.0 * s * s,
        mirror_amplitude_ratio=ratio,
    )


def _ray_mirror_constant(sd: SpectralData, s: float) -> complex:
    """Straight-ray mirror-term constant for the degenerate class."""
    tracker = tracker_for(sd)
    prod0 = float((complex(sd.a11) * complex(sd.a21)).real)
    nu_zero = math.log(prod0) / _TWO_PI
    b_zero = _b_at_zero(sd)
    if abs(b_zero) < DEGENERATE_REFLECTION * max(1.0, sd.amplitude):
        raise ValueError("straight-ray mirror constant undefined for reflectionless data")
    chi_one = tracker.origin_constant
    return (
        -math.sqrt(math.pi)
        * cmath.exp(
            -0.5 * math.pi * nu_zero
            + 0.25j * math.pi
            - 2.0 * chi_one.conjugate()
            - 3j * nu_zero * _LN2
        )
        * s
        * complex(sd.a21)
        * _inv_gamma(-1j * nu_zero)
        / b_zero
    )
