"""Infinite-product invariants, site-family boundedness, trace-class windows."""

import math

import numpy as np
import pytest
import sympy as sp

from kmslab import (
    ItpfiSpec,
    MatroidSpec,
    SpectrumFamily,
    difference_group,
    factor_type_itpfi,
    gamma_invariant,
    matroid_bounded,
    product_kms_state,
    trace_class_window,
    verify_kms,
)


def test_product_state_is_equilibrium():
    spec = ItpfiSpec(np.diag([0.0, math.log(2.0)]))
    for sites in (1, 3):
        psi = product_kms_state(spec, beta=1.0, sites=sites)
        assert verify_kms(psi.flow, psi, 1.0, tol=1e-9).passed


def test_product_dimension_guard():
    spec = ItpfiSpec(np.diag([0.0, 1.0, 2.0]))
    with pytest.raises(ValueError, match="desk-scale"):
        product_kms_state(spec, 1.0, sites=9)


def test_difference_group_classification():
    lattice = difference_group(np.diag([0.0, math.log(2.0)]))
    assert lattice.kind == "cyclic"
    assert abs(lattice.kappa - math.log(2.0)) < 1e-12
    dense = difference_group(np.diag([0.0, 1.0, math.sqrt(2.0)]))
    assert dense.kind == "dense"
    assert dense.witness is not None
    trivial = difference_group(np.diag([3.0, 3.0]))
    assert trivial.kind == "trivial"
    # an off-diagonal generator is diagonalized first
    rot = np.array([[1.0, 1.0], [1.0, 1.0]])  # eigenvalues 0 and 2
    assert abs(difference_group(rot).kappa - 2.0) < 1e-12


def test_factor_type_lattice_gives_power_lambda():
    spec = ItpfiSpec(np.diag([0.0, math.log(2.0)]))
    rep = factor_type_itpfi(spec, beta=1.0)
    assert rep.tag == "III_lambda"
    assert abs(rep.lambda_value - 0.5) < 1e-12
    assert abs(rep.kappa - math.log(2.0)) < 1e-12
    # lambda follows e^(-|beta| kappa) on both sides of zero
    for beta in (-2.0, -0.5, 0.25, 3.0):
        r = factor_type_itpfi(spec, beta)
        assert abs(r.lambda_value - math.exp(-abs(beta) * math.log(2.0))) < 1e-12


def test_factor_type_special_tags():
    dense_spec = ItpfiSpec(np.diag([0.0, 1.0, math.sqrt(2.0)]))
    assert factor_type_itpfi(dense_spec, 1.0).tag == "III_1"
    assert factor_type_itpfi(dense_spec, 1.0).lambda_value == 1.0
    spec = ItpfiSpec(np.diag([0.0, math.log(2.0)]))
    assert factor_type_itpfi(spec, 0.0).tag == "beta_zero"
    assert factor_type_itpfi(ItpfiSpec(np.eye(2)), 5.0).tag == "trivial_flow"


def test_gamma_invariant():
    spec = ItpfiSpec(np.diag([0.0, math.log(2.0)]))
    rep = gamma_invariant(spec, beta=1.0)
    assert rep.kind == "cyclic"
    assert abs(rep.generator - math.log(2.0)) < 1e-12
    assert gamma_invariant(spec, beta=-3.0).generator == pytest.approx(3.0 * math.log(2.0))
    assert gamma_invariant(spec, 0.0).kind == "zero"
    dense_spec = ItpfiSpec(np.diag([0.0, 1.0, math.sqrt(2.0)]))
    assert gamma_invariant(dense_spec, 1.0).kind == "full_line"


# -- boundedness of named site families ------------------------------------------

def test_seven_adic_verdicts_across_threshold():
    spec = MatroidSpec(kind="seven_adic")
    thr = math.log(7.0)
    assert matroid_bounded(spec, thr - 0.05).kind == "unbounded"
    assert matroid_bounded(spec, thr).kind == "unbounded"
    assert matroid_bounded(spec, thr + 0.05).kind == "bounded"
    v = matroid_bounded(spec, thr + 0.5)
    assert v.log_partial_product < math.inf
    assert "geometric" in v.reason


def test_factorial_verdicts_across_threshold():
    spec = MatroidSpec(kind="factorial")
    assert matroid_bounded(spec, 0.5).kind == "bounded"
    assert matroid_bounded(spec, 1.0).kind == "unbounded"
    assert matroid_bounded(spec, 1.5).kind == "unbounded"


def test_seven_adic_partial_products_track_the_verdict():
    spec = MatroidSpec(kind="seven_adic")
    # below threshold the log-partial-products blow up with the term count,
    # above it they stabilize
    lo_short = matroid_bounded(spec, 1.0, prefix_terms=12).log_partial_product
    lo_long = matroid_bounded(spec, 1.0, prefix_terms=40).log_partial_product
    assert lo_long > lo_short + 10.0
    hi_short = matroid_bounded(spec, 3.0, prefix_terms=12).log_partial_product
    hi_long = matroid_bounded(spec, 3.0, prefix_terms=40).log_partial_product
    assert abs(hi_long - hi_short) < 1e-4  # geometric tail with ratio 7e^-3


def test_explicit_prefix_is_inconclusive_without_tail():
    h = np.diag([0.0, 1.0])
    p = np.diag([1.0, 0.0])
    spec = MatroidSpec(kind="explicit", sites=[(h, p), (h, p)])
    v = matroid_bounded(spec, 2.0)
    assert v.kind == "inconclusive"
    assert v.terms == 2
    with_tail = MatroidSpec(kind="explicit", sites=[(h, p)], declared_tail="seven_adic")
    assert matroid_bounded(with_tail, math.log(7.0) + 0.1).kind == "bounded"
    assert matroid_bounded(with_tail, 1.0).kind == "unbounded"


# -- trace-class windows ----------------------------------------------------------

def _sympy_converges(family: SpectrumFamily, beta: float) -> bool:
    """Independent route: ask sympy whether Σ e^(-β a_n) converges."""
    n = sp.symbols("n", integer=True, positive=True)
    b = sp.Rational(beta).limit_denominator(10 ** 6)
    r = sp.Rational(family.r).limit_denominator(10 ** 6)
    if family.kind == "power":
        term = n ** (-b / r)
    elif family.kind == "power_log":
        term = (n * sp.log(n + 2) ** 2) ** (-b / r)
    else:
        raise NotImplementedError(family.kind)
    return bool(sp.Sum(term, (n, 1, sp.oo)).is_convergent())


def test_window_zero_family_is_empty():
    win = trace_class_window(SpectrumFamily(kind="zero"))
    assert win.empty
    assert not win.contains(0.0)
    assert not win.contains(100.0)


def test_window_power_family_open_endpoint():
    win = trace_class_window(SpectrumFamily(kind="power", r=2.0))
    assert (win.lower, win.lower_closed, win.upper) == (2.0, False, None)
    for beta in (1.7, 2.0, 2.3):
        assert win.contains(beta) == _sympy_converges(SpectrumFamily(kind="power", r=2.0), beta)


def test_window_power_log_family_closed_endpoint():
    fam = SpectrumFamily(kind="power_log", r=2.0)
    win = trace_class_window(fam)
    assert (win.lower, win.lower_closed, win.upper) == (2.0, True, None)
    for beta in (1.7, 2.0, 2.3):
        assert win.contains(beta) == _sympy_converges(fam, beta)


def test_window_negation_mirrors():
    inner = SpectrumFamily(kind="power_log", r=1.0)
    win = trace_class_window(SpectrumFamily(kind="negated", inner=inner))
    assert (win.upper, win.upper_closed, win.lower) == (-1.0, True, None)
    assert win.contains(-1.0) and win.contains(-5.0) and not win.contains(0.0)


def test_window_explicit_prefix_refuses():
    fam = SpectrumFamily(kind="explicit_prefix", values=(0.0, 1.0, 2.0))
    with pytest.raises(ValueError, match="prefix"):
        trace_class_window(fam)


def test_window_string_form():
    win = trace_class_window(SpectrumFamily(kind="power_log", r=3.0))
    assert str(win) == "[3, +∞)"
    assert str(trace_class_window(SpectrumFamily(kind="power", r=3.0))) == "(3, +∞)"
