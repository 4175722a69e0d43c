"""Tests for the wedge-curve asymptotic predictions.

Frozen expected values come from an independent 30-digit implementation of
the slow-variable integrals and the connection-coefficient assembly
(mpmath), evaluated straight from the defining integrals rather than through
this package's quadrature layer.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from nnlswedge.phases import EvaluationMethod
from nnlswedge.scattering import CaseTag, synthetic_case_i, synthetic_case_ii
from nnlswedge.wedge import (
    DEGENERATE_REFLECTION,
    PhaseLedger,
    Side,
    amplitude_Q,
    beta_gamma,
    gen_as_predict,
    matching_check,
    phase_coefficients,
    predict_q,
    wedge_point,
)

# ---------------------------------------------------------------------------
# frozen cross-implementation values (30-digit independent evaluation)

# field values q(+x) and q(-x) on the wedge curve, exact mid-level route
FIELD_ORACLE = [
    # (case key, alpha, s, t, q at +x, q at -x)
    (
        "I",
        0.7,
        1.0,
        1.0e6,
        -0.84392527878001600724 + 0.8532892526250156039j,
        -4.4820676465937475973e-6 + 3.6467081450972486593e-5j,
    ),
    (
        "I",
        0.85,
        2.5,
        1.0e7,
        0.78404557136613996573 - 0.9084451702340815579j,
        -5.0042637707272704019e-5 + 2.6240251097195028986e-5j,
    ),
    (
        "II",
        0.75,
        0.8,
        1.0e5,
        0.86554869342187092906 + 0.13287763716617189432j,
        -1.9197553099749749787e-5 + 5.0641405522444769068e-5j,
    ),
    (
        "II",
        0.55,
        1.2,
        1.0e6,
        0.82819073156972515453 + 0.26833609772575777814j,
        1.244709900887378598e-6 - 2.2725411408054631974e-6j,
    ),
]

# connection-coefficient internals at the first Case I point (alpha=0.7,
# s=1, t=1e6) and the first Case II point (alpha=0.75, s=0.8, t=1e5)
NU_I_A = 1.0833046214305182941
BETA_I_A = 0.52404068521232463524 - 0.89926969351397335659j
CHI_SADDLE_I_A = -1.4671657608387339342j
NU_II_A = -0.04501325251594037726 - 0.0066423593644847674495j


@pytest.fixture(scope="module")
def sd_i():
    return synthetic_case_i()


@pytest.fixture(scope="module")
def sd_ii():
    return synthetic_case_ii()


@pytest.fixture(scope="module")
def sd_refl():
    return synthetic_case_ii(coupling=0.0)


def _fit_slope(lnts, values):
    return float(np.polyfit(np.asarray(lnts), np.asarray(values), 1)[0])


# ---------------------------------------------------------------------------
# wedge-point geometry


def test_wedge_point_round_trip():
    for alpha in (0.3, 0.5, 0.8):
        for s in (0.5, 1.0, 3.0):
            for t in (1.0e3, 1.0e7):
                wp = wedge_point(alpha, s, t)
                assert wp.x ** (2.0 - alpha) / (4.0 * t) == pytest.approx(
                    s, rel=1e-12
                )
                assert wp.xi == pytest.approx(s * wp.x ** (alpha - 1.0), rel=1e-12)
                assert wp.ln_4st == pytest.approx(math.log(4.0 * s * t), rel=1e-12)


def test_wedge_point_accepts_side_strings_and_log_time():
    assert wedge_point(0.5, 1.0, 100.0, "-x").side is Side.MINUS_X
    assert wedge_point(0.5, 1.0, 100.0, "+x").side is Side.PLUS_X
    # log-time form survives where t itself overflows a double
    wp = wedge_point(0.9, 1.0, ln_t=5000.0)
    assert wp.t == math.inf
    assert wp.ln_x == pytest.approx((math.log(4.0) + 5000.0) / 1.1, rel=1e-14)
    same = wedge_point(0.9, 1.0, 1.0e6)
    via_log = wedge_point(0.9, 1.0, ln_t=math.log(1.0e6))
    assert same.ln_4st == pytest.approx(via_log.ln_4st, rel=1e-15)


def test_wedge_point_validation():
    with pytest.raises(ValueError):
        wedge_point(0.0, 1.0, 100.0)
    with pytest.raises(ValueError):
        wedge_point(1.0, 1.0, 100.0)
    with pytest.raises(ValueError):
        wedge_point(0.5, 0.0, 100.0)
    with pytest.raises(ValueError):
        wedge_point(0.5, 1.0)  # neither t nor ln_t
    with pytest.raises(ValueError):
        wedge_point(0.5, 1.0, 0.9)  # t must exceed 1
    with pytest.raises(ValueError):
        wedge_point(0.5, 0.001, 1.2)  # ln(4st) must exceed 1


# ---------------------------------------------------------------------------
# phase ledgers


def test_phase_ledger_term_arithmetic():
    ledger = PhaseLedger(0.0, -0.25, 0.125, 2.0, -1.5, 0.75)
    big_l = 17.0
    expected = (
        -0.25 * big_l**2
        + 0.125 * big_l * math.log(big_l)
        + 2.0 * big_l
        - 1.5 * math.log(big_l)
        + 0.75
    )
    assert ledger.slow_phase(big_l) == pytest.approx(expected, rel=1e-15)
    assert ledger.vector() == (0.0, -0.25, 0.125, 2.0, -1.5, 0.75)
    with pytest.raises(ValueError):
        ledger.slow_phase(0.0)

    fast = PhaseLedger(3.0, 0.0, 0.0, 0.0, 0.0, 1.0)
    wp = wedge_point(0.5, 1.0, 100.0)
    want = 3.0 * math.exp(0.5 / 1.5 * math.log(100.0)) + 1.0
    assert fast.phase_at(wp) == pytest.approx(want, rel=1e-14)


def test_phase_ledger_overflow_guard():
    fast = PhaseLedger(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    huge = wedge_point(0.9, 1.0, ln_t=5000.0)
    with pytest.raises(OverflowError):
        fast.phase_at(huge)
    # slow terms stay evaluable at the same point
    slow = PhaseLedger(0.0, -1.0, 0.0, 2.0, 0.0, 0.0)
    assert math.isfinite(slow.phase_at(huge))


# ---------------------------------------------------------------------------
# plateau amplitude


def test_plateau_amplitude_closed_forms(sd_i, sd_ii, sd_refl):
    # real unitarity product: plateau modulus equals the background level
    assert amplitude_Q(sd_i) == pytest.approx(1.2, abs=1e-12)
    assert amplitude_Q(sd_refl) == pytest.approx(1.2, abs=1e-12)
    # rational-product family: closed form A * (a11 a21)**(1/2)
    prod = (complex(sd_ii.a11) * complex(sd_ii.a21)).real
    assert amplitude_Q(sd_ii) == pytest.approx(math.sqrt(prod), abs=5e-9)


# ---------------------------------------------------------------------------
# coefficient table


def test_coefficient_table_reference_values(sd_i):
    pc = phase_coefficients(sd_i, 0.5, 1.0)
    # universal entries at alpha = 1/2
    assert pc.psi == pytest.approx(1.0 / (9.0 * math.pi), abs=1e-16)
    assert pc.phi1_hat == pc.psi
    assert pc.phi2 == pytest.approx(1.0 / (3.0 * math.pi), abs=1e-16)
    # the squared-log corrections collapse onto a single side at alpha = 1/2
    assert pc.phi12 == pytest.approx(0.0, abs=1e-16)
    assert pc.phi11 == pytest.approx(-2.0 / (9.0 * math.pi), abs=1e-16)
    nu0 = 1.0 / (3.0 * math.pi)
    assert pc.phi3_tilde == pytest.approx(nu0 * (math.log(nu0) - 1.0), rel=1e-14)
    # data-bearing entries (half-level of the synthetic family is 0.9)
    assert pc.phi4 == pytest.approx(math.log(0.9) / math.pi, rel=1e-12)
    assert pc.phi_i == pytest.approx(2.0 * nu0 * math.log(1.0 / 0.9), rel=1e-12)
    # generic class leaves the degenerate-class entries empty
    assert pc.phi51 == pc.phi52 == pc.phi5_hat == pc.phi_ii == 0.0

    # fast-phase coefficient has an exact closed value at alpha = 1/2, s = 2
    assert phase_coefficients(sd_i, 0.5, 2.0).phi0 == pytest.approx(4.0, rel=1e-14)


def test_coefficient_pairings(sd_i, sd_ii):
    for alpha in (0.35, 0.6, 0.85):
        pc = phase_coefficients(sd_i, alpha, 1.3)
        assert pc.phi11 + pc.phi12 == pytest.approx(-2.0 * pc.psi, rel=1e-13)
        assert pc.phi31 + pc.phi32 == pytest.approx(2.0 * pc.phi_i, rel=1e-12)
        pc2 = phase_coefficients(sd_ii, alpha, 0.7)
        assert pc2.phi51 + pc2.phi52 == pytest.approx(4.0 * pc2.phi5_hat, rel=1e-13)
        assert pc2.phi_ii == pytest.approx(2.0 * pc2.phi5_hat, rel=1e-13)


def test_coefficient_table_degenerate_class(sd_ii, sd_refl):
    pc = phase_coefficients(sd_ii, 0.75, 0.8)
    nu_zero = math.log(0.75) / (2.0 * math.pi)  # product a11 a21 = 3/4
    assert pc.phi51 == pytest.approx(-nu_zero, rel=1e-13)
    assert pc.phi52 == pytest.approx(nu_zero * 0.25 / 1.25, rel=1e-13)
    assert pc.phi5_hat == pytest.approx(-nu_zero * 0.25 / 1.25, rel=1e-13)
    # generic-class entries are empty in the degenerate class
    assert pc.phi_i == pc.phi4 == pc.phi31 == pc.phi32 == pc.phi3_hat == 0.0
    # reflectionless data zeroes the whole data-bearing column
    pr = phase_coefficients(sd_refl, 0.75, 0.8)
    assert pr.phi51 == pr.phi52 == pr.phi5_hat == pr.phi_ii == 0.0
    assert abs(pr.main_constant) < 1e-10  # quadrature noise around exact zero


def test_coefficient_validation(sd_i):
    with pytest.raises(ValueError):
        phase_coefficients(sd_i, 1.2, 1.0)
    with pytest.raises(ValueError):
        phase_coefficients(sd_i, 0.5, -1.0)


# ---------------------------------------------------------------------------
# exact mid-level route against the independent implementation


@pytest.mark.parametrize("case_key,alpha,s,t,q_plus,q_minus", FIELD_ORACLE)
def test_exact_route_matches_independent_values(
    sd_i, sd_ii, case_key, alpha, s, t, q_plus, q_minus
):
    sd = sd_i if case_key == "I" else sd_ii
    got_plus = gen_as_predict(sd, wedge_point(alpha, s, t, Side.PLUS_X)).total
    got_minus = gen_as_predict(sd, wedge_point(alpha, s, t, Side.MINUS_X)).total
    assert abs(got_plus - q_plus) < 5e-7
    assert abs(got_minus - q_minus) < 1e-6 * abs(q_minus)


def test_connection_pair_matches_independent_values(sd_i, sd_ii):
    bg = beta_gamma(sd_i, 0.7, 1.0, 1.0e6)
    assert abs(bg.nu - NU_I_A) < 5e-9
    assert abs(bg.beta - BETA_I_A) < 1e-9
    assert abs(bg.chi_saddle - CHI_SADDLE_I_A) < 5e-8
    # real-product data keeps the winding index real and the pair conjugate
    assert abs(bg.nu.imag) < 1e-10
    assert abs(bg.gamma - bg.beta.conjugate() * (bg.nu / abs(bg.beta) ** 2)) < 1e-9

    bg2 = beta_gamma(sd_ii, 0.75, 0.8, 1.0e5)
    assert abs(bg2.nu - NU_II_A) < 5e-9


def test_connection_product_equals_winding_index(sd_i, sd_ii):
    for sd in (sd_i, sd_ii):
        for s in (0.3, 1.0, 4.0):
            for t in (1.0e3, 1.0e6, 1.0e9):
                bg = beta_gamma(sd, 0.65, s, t)
                assert abs(bg.beta * bg.gamma - bg.nu) < 1e-10


def test_reflectionless_data_short_circuits(sd_refl):
    bg = beta_gamma(sd_refl, 0.7, 1.0, 1.0e6)
    assert bg.degenerate
    assert bg.beta == bg.gamma == 0j
    assert bg.beta_tilde_asymptotic == 0j

    for side in (Side.PLUS_X, Side.MINUS_X):
        wp = wedge_point(0.7, 1.0, 1.0e6, side)
        exact = gen_as_predict(sd_refl, wp)
        expanded = predict_q(sd_refl, wp)
        # both routes reduce to the bare plateau, and they agree exactly
        assert abs(exact.total - expanded.total) < 1e-12
        if side is Side.PLUS_X:
            assert abs(abs(exact.total) - 1.2) < 1e-12
        else:
            assert exact.total == 0j


def test_expansion_method_feeds_consistent_coefficients(sd_i):
    direct = beta_gamma(sd_i, 0.6, 1.0, 1.0e8)
    expanded = beta_gamma(
        sd_i, 0.6, 1.0, 1.0e8, method=EvaluationMethod.ASYMPTOTIC_EXPANSION
    )
    assert direct.method is EvaluationMethod.DIRECT_QUADRATURE
    assert expanded.method is EvaluationMethod.ASYMPTOTIC_EXPANSION
    assert abs(direct.nu - expanded.nu) < 1e-3
    assert abs(direct.beta_tilde - expanded.beta_tilde) < 5e-2 * abs(
        direct.beta_tilde
    )


def test_tilde_pair_asymptotics_converge(sd_i, sd_ii):
    ladder = (1.0e4, 1.0e6, 1.0e8, 1.0e10)

    # generic class: relative error decays on a logarithmic scale; assert
    # monotone improvement and the measured endpoint with margin
    errs = []
    for t in ladder:
        bg = beta_gamma(sd_i, 0.7, 1.0, t)
        errs.append(abs(bg.beta_tilde_asymptotic - bg.beta_tilde) / abs(bg.beta_tilde))
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.06  # measured 0.0511

    # degenerate class: clean power law at rate (alpha-1)/(2-alpha)
    target = (0.7 - 1.0) / (2.0 - 0.7)
    for attr in ("beta_tilde", "gamma_tilde"):
        errs2 = []
        for t in ladder:
            bg = beta_gamma(sd_ii, 0.7, 1.0, t)
            approx = getattr(bg, attr + "_asymptotic")
            exact = getattr(bg, attr)
            errs2.append(abs(approx - exact) / abs(exact))
        slope = _fit_slope(np.log(ladder), np.log(errs2))
        assert abs(slope - target) < 0.3 * abs(target)  # measured -0.214


# ---------------------------------------------------------------------------
# expanded-route structure


def test_plus_side_leading_modulus_is_plateau(sd_i, sd_ii):
    for sd, level in ((sd_i, 1.2), (sd_ii, math.sqrt(0.75))):
        for alpha in (0.4, 0.8):
            wp = wedge_point(alpha, 1.0, 1.0e5, Side.PLUS_X)
            pred = predict_q(sd, wp)
            assert abs(pred.leading) == pytest.approx(amplitude_Q(sd), rel=1e-12)
            assert abs(abs(pred.leading) - level) < 5e-9


def test_regime_matrix_and_error_orders(sd_i, sd_ii):
    # (case, side, alpha) -> (regime, t-exponent, log power)
    expectations = [
        (sd_i, "+x", 0.5, "I+x/explicit-correction", 0.5 / -3.0, -0.5),
        (sd_i, "+x", 2.0 / 3.0, "I+x/leading-only", (1 / 3) / (2 / 3 - 2), 1.0),
        (sd_i, "+x", 0.9, "I+x/leading-only", 0.1 / -1.1, 1.0),
        (sd_i, "-x", 2.0 / 3.0, "I-x/bound-only", 1.0 / (2 / 3 - 2), 1.0),
        (sd_i, "-x", 0.8, "I-x/explicit-correction", 1.6 / -2.4, -0.5),
        (sd_ii, "+x", 0.45, "II+x/explicit-correction", 0.45 / -1.55, 1.0),
        (sd_ii, "+x", 0.5, "II+x/explicit-correction", 0.5 / -1.5, 1.0),
        (sd_ii, "+x", 0.75, "II+x/leading-only", 0.25 / -1.25, 1.0),
        (sd_ii, "-x", 0.5, "II-x/bound-only", 1.0 / -1.5, 1.0),
        (sd_ii, "-x", 0.75, "II-x/explicit-correction", 1.0 / -1.25, 1.0),
        (sd_ii, "-x", 0.8, "II-x/explicit-correction", 1.0 / -1.2, 1.0),
        (sd_ii, "-x", 0.85, "II-x/explicit-correction", 1.75 / -2.3, 0.5),
    ]
    for sd, side, alpha, regime, t_exp, log_pow in expectations:
        pred = predict_q(sd, wedge_point(alpha, 1.0, 1.0e6, side))
        assert pred.regime == regime
        assert pred.error_order.t_exponent == pytest.approx(t_exp, rel=1e-12)
        assert pred.error_order.log_power == log_pow

    # exact-route remainders
    cells = [
        (sd_i, "+x", 0.9, -0.5, 0.5),
        (sd_i, "+x", 0.5, 0.5 / -1.5, 1.0),
        (sd_ii, "-x", 0.9, 1.5 / -2.2, 0.5),
        (sd_ii, "-x", 0.75, 1.0 / -1.25, 1.0),
    ]
    for sd, side, alpha, t_exp, log_pow in cells:
        pred = gen_as_predict(sd, wedge_point(alpha, 1.0, 1.0e6, side))
        assert pred.regime.endswith("/exact-route")
        assert pred.error_order.t_exponent == pytest.approx(t_exp, rel=1e-12)
        assert pred.error_order.log_power == log_pow


def test_prediction_ledger_selection(sd_i):
    pc = phase_coefficients(sd_i, 0.8, 1.0)
    plus = predict_q(sd_i, wedge_point(0.8, 1.0, 1.0e6, Side.PLUS_X))
    assert plus.ledger.log_squared == pytest.approx(-pc.psi, rel=1e-14)
    assert plus.ledger.log_linear == pytest.approx(pc.phi_i, rel=1e-14)
    assert plus.ledger.oscillation == 0.0

    minus = predict_q(sd_i, wedge_point(0.8, 1.0, 1.0e6, Side.MINUS_X))
    assert minus.leading == 0j
    assert minus.ledger.oscillation == pytest.approx(pc.phi0, rel=1e-14)
    assert minus.ledger.log_times_loglog == pytest.approx(pc.phi2, rel=1e-14)

    bound = predict_q(sd_i, wedge_point(0.5, 1.0, 1.0e6, Side.MINUS_X))
    assert bound.total == 0j
    assert bound.ledger.vector() == (0.0,) * 6


def test_leading_phase_tracks_exact_route(sd_i):
    diffs = []
    for t in (1.0e4, 1.0e6, 1.0e8):
        wp = wedge_point(0.8, 1.0, t, Side.PLUS_X)
        exact = gen_as_predict(sd_i, wp)
        expanded = predict_q(sd_i, wp)
        diffs.append(abs(cmath.phase(exact.leading / expanded.leading)))
    assert all(a > b for a, b in zip(diffs, diffs[1:]))
    assert diffs[-1] < 1e-3  # measured 2.7e-4


def test_expanded_route_converges_to_exact_route(sd_i, sd_ii):
    """Cross-route convergence over the full branch matrix.

    The gap between the fully expanded prediction and the exact mid-level
    route must decay no slower than the expanded route's recorded remainder
    order.  The fit removes the recorded log power first, then compares the
    fitted power of t against the recorded exponent (small tolerance for
    residual log drift).  Bound-only regimes predict zero, so there the
    check bounds the field itself by the recorded remainder.
    """
    ladder = (1.0e4, 1.0e6, 1.0e8, 1.0e10)
    for sd in (sd_i, sd_ii):
        level = amplitude_Q(sd)
        for alpha in (0.5, 0.75, 0.9):
            for side in (Side.PLUS_X, Side.MINUS_X):
                gaps = []
                for t in ladder:
                    wp = wedge_point(alpha, 1.0, t, side)
                    exact = gen_as_predict(sd, wp)
                    expanded = predict_q(sd, wp)
                    gaps.append(abs(expanded.total - exact.total) / level)
                order = expanded.error_order
                lnts = np.log(ladder)
                reduced = np.log(gaps) - order.log_power * np.log(lnts)
                slope = _fit_slope(lnts, reduced)
                assert slope <= order.t_exponent + 0.06, (
                    f"{expanded.regime} alpha={alpha}: fitted {slope:.4f} "
                    f"vs recorded {order.t_exponent:.4f}; gaps={gaps}"
                )
                # the two routes genuinely approach each other everywhere
                assert gaps[-1] < gaps[0]


# ---------------------------------------------------------------------------
# straight-ray matching


def test_matching_fixed_product_generic(sd_i):
    report = matching_check(sd_i, 1.0, [0.9, 0.99, 0.999], hold_product=1.0)
    assert report.mode == "fixed-product"
    assert report.case is CaseTag.CASE_I
    residuals = [row.phase_residual for row in report.rows]
    assert all(a > b for a, b in zip(residuals, residuals[1:]))
    # limit of the slow-phase residual under (1-alpha) ln t = 1:
    # |-1 + 2 ln(1/0.9)| / pi for this family's half-level 0.9
    limit = abs(-1.0 + 2.0 * math.log(1.0 / 0.9)) / math.pi
    assert abs(residuals[-1] - limit) < 5e-3  # measured 2.3e-4
    # explicit mirror magnitude follows the straight-ray decay t**(-1/2)
    assert report.mirror_exponent == pytest.approx(-0.5, abs=0.02)
    for row in report.rows:
        assert row.mirror_log_magnitude is not None
        assert row.ray_log_magnitude is not None
        # the two log-magnitudes stay within an O(1) offset of each other
        assert abs(row.mirror_log_magnitude - row.ray_log_magnitude) < 2.0
    assert report.oscillation_coefficient_limit == 4.0
    assert report.oscillation_coefficient_expected == 4.0
    assert report.mirror_amplitude_ratio is None


def test_matching_fixed_time_contrast(sd_i):
    report = matching_check(sd_i, 1.0, [0.9, 0.99, 0.999], t=1.0e8)
    assert report.mode == "fixed-time"
    residuals = [row.phase_residual for row in report.rows]
    # at fixed time the residual collapses as alpha -> 1 (not necessarily
    # monotonically at the floor set by the constant terms)
    assert residuals[0] > 0.1
    assert max(residuals[1:]) < 0.01
    # constant ln t along the ladder leaves no decay exponent to fit
    assert report.mirror_exponent is None


def test_matching_degenerate_ratio(sd_ii):
    report = matching_check(sd_ii, 0.8, [0.9, 0.99, 0.999], hold_product=1.0)
    residuals = [row.phase_residual for row in report.rows]
    assert all(a > b for a, b in zip(residuals, residuals[1:]))
    assert report.oscillation_coefficient_limit == pytest.approx(2.56, rel=1e-14)
    ratio = report.mirror_amplitude_ratio
    # the mirror constant reproduces the straight-ray constant up to the
    # data-reflection factor conj(a21)/a21, equal to -1 for this family
    assert ratio is not None
    assert abs(ratio + 1.0) < 5e-3  # measured 1.2e-3


def test_matching_validation(sd_i, sd_refl):
    with pytest.raises(ValueError):
        matching_check(sd_i, 1.0, [0.9], hold_product=1.0, t=1.0e6)
    with pytest.raises(ValueError):
        matching_check(sd_i, 1.0, [])
    with pytest.raises(ValueError):
        matching_check(sd_i, 1.0, [1.5], t=1.0e6)
    with pytest.raises(ValueError):
        matching_check(sd_i, 1.0, [0.9])  # no mode selected
    # reflectionless data has no explicit mirror term and no ratio
    report = matching_check(sd_refl, 1.0, [0.9, 0.99], hold_product=1.0)
    assert report.mirror_amplitude_ratio is None
    assert all(row.mirror_log_magnitude is None for row in report.rows)
