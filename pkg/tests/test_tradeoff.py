import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtradeoff.channels import (
    identity_operation,
    kraus_from_matrices,
    mixed_saturating_operation,
    saturating_operation,
)
from qtradeoff.errors import DegenerateInput, OutOfImage, OutOfRange
from qtradeoff.tradeoff import (
    H_MAX,
    Pairing,
    ScalarCurve,
    b_closed,
    b_inverse,
    bound_at,
    check_all_bounds,
    check_bound,
    chord_point,
    chord_sup,
    composite,
    composite_concavity_check,
    composite_curve,
    concave_envelope,
    concavity_second_derivative,
    equality_condition_check,
    f_closed,
    f_inverse,
    finite_difference_second_derivative,
    g_closed,
    g_inverse,
    h_closed,
    invert_monotone,
    upper_hull,
)

# (x, h(x), b(x)) from mpmath quadrature of the defining sphere integrals, 30 digits
ORACLE = [
    (0.1, 0.0024069031252976136, 0.99916415303581539),
    (0.25, 0.015123721161371613, 0.99469056285086957),
    (0.5, 0.061735292866819, 0.97735026918962576),
    (0.75, 0.14449396248932249, 0.94127326954301765),
    (0.9, 0.21645169676019585, 0.89859435535487439),
    (0.99, 0.27161375438051677, 0.83529265437314072),
]
unit = st.floats(0.0, 1.0)


@pytest.mark.parametrize("x, h, b", ORACLE)
def test_closed_forms_match_oracle(x, h, b):
    assert h_closed(x) == pytest.approx(h, abs=1e-14)
    assert b_closed(x) == pytest.approx(b, abs=1e-14)


def test_endpoints():
    assert h_closed(0.0) == 0.0
    assert h_closed(1.0) == pytest.approx(H_MAX, abs=1e-15)
    assert b_closed(0.0) == 1.0 and b_closed(1.0) == pytest.approx(0.8, abs=1e-15)
    assert f_closed(1.0) == pytest.approx(2 / 3) and f_closed(0.0) == 1.0
    assert g_closed(0.0) == 0.5 and g_closed(1.0) == pytest.approx(2 / 3)


def test_series_branch_is_continuous():
    lo, hi = np.nextafter(1e-2, 0), 1e-2
    assert h_closed(lo) == pytest.approx(h_closed(hi), rel=1e-12)
    assert b_closed(lo) == pytest.approx(b_closed(hi), rel=1e-14)


def test_vectorized_closed_forms():
    xs = np.linspace(0, 1, 11)
    assert np.allclose(h_closed(xs), [h_closed(x) for x in xs], atol=0)
    assert h_closed(xs).shape == (11,)


@pytest.mark.parametrize("fn", [f_closed, h_closed, g_closed, b_closed])
def test_domain_errors(fn):
    with pytest.raises(OutOfRange):
        fn(1.5)
    with pytest.raises(OutOfRange):
        fn(float("nan"))


def test_monotonicity():
    xs = np.linspace(0, 1, 1001)
    assert np.all(np.diff(h_closed(xs)) > 0)
    assert np.all(np.diff(b_closed(xs)) < 0)
    assert np.all(np.diff(f_closed(xs)) < 0)


@given(unit)
def test_inverses_round_trip(x):
    assert f_closed(f_inverse(f_closed(x))) == pytest.approx(f_closed(x), abs=1e-14)
    assert g_inverse(g_closed(x)) == pytest.approx(x, abs=1e-14)
    assert b_closed(b_inverse(b_closed(x))) == pytest.approx(b_closed(x), abs=1e-14)


def test_inverse_image_errors():
    with pytest.raises(OutOfImage):
        f_inverse(0.5)
    with pytest.raises(OutOfImage):
        g_inverse(0.7)
    with pytest.raises(OutOfImage):
        b_inverse(0.79)


def test_invert_monotone_generic():
    assert invert_monotone(lambda t: t**3, 0.125) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(OutOfImage):
        invert_monotone(lambda t: t, 2.0)


def test_b_inverse_vectorized_matches_scalar():
    ys = np.linspace(0.8, 1.0, 17)
    vec = b_inverse(ys)
    scal = [invert_monotone(b_closed, float(y)) for y in ys]
    assert np.allclose(b_closed(vec), b_closed(np.array(scal)), atol=1e-14)


# -- envelopes ------------------------------------------------------------------------


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=40))
def test_envelope_matches_chord_sup(ys):
    x = np.linspace(0, 1, len(ys))
    curve = ScalarCurve(x, np.array(ys))
    env = concave_envelope(curve)
    assert np.max(np.abs(env.y - chord_sup(curve))) < 1e-9
    assert np.all(env.y >= curve.y - 1e-12)
    # concave: second differences of the envelope are non-positive on a uniform grid
    assert np.all(np.diff(env.y, 2) <= 1e-9)


def test_envelope_of_concave_curve_is_itself():
    x = np.linspace(0, 1, 100)
    curve = ScalarCurve(x, -(x - 0.3) ** 2)
    assert np.allclose(concave_envelope(curve).y, curve.y, atol=0)
    assert len(upper_hull(x, curve.y)) == 100


def test_envelope_fills_a_dip():
    x = np.array([0.0, 0.5, 1.0])
    env = concave_envelope(ScalarCurve(x, np.array([1.0, 0.0, 1.0])))
    assert np.allclose(env.y, [1, 1, 1])
    assert chord_point(env, 0.5, 0, 2) == (0.5, 1.0)


@pytest.mark.parametrize(
    "x, y",
    [([0.0], [1.0]), ([0.0, 0.0], [1.0, 2.0]), ([0.0, 1.0], [np.nan, 1.0])],
)
def test_envelope_degenerate_inputs(x, y):
    with pytest.raises(DegenerateInput):
        concave_envelope(ScalarCurve(np.array(x), np.array(y)))


@pytest.mark.parametrize("pair", list(Pairing))
def test_composites_are_concave(pair):
    c = composite_curve(pair, 4096)
    assert np.max(np.abs(c.envelope - c.info_bound)) < 1e-9
    assert np.all(np.diff(c.disturbance) > 0)


def test_curve_endpoints():
    hf = composite_curve("HF", 512)
    assert hf.disturbance[0] == pytest.approx(2 / 3) and hf.info_bound[0] == pytest.approx(H_MAX)
    gb = composite_curve("GB", 512)
    assert list(next(reversed(list(gb.rows())))) == pytest.approx([1.0, 0.5, 0.5, 0.0], abs=1e-12)
    assert len(composite_curve(Pairing.H_vs_F, 2).disturbance) == 2
    with pytest.raises(DegenerateInput):
        composite_curve("HF", 1)


def test_pairing_lookup():
    assert Pairing("HB").info == "H" and Pairing("HB").disturbance == "B"
    assert composite("GF", 1.0) == pytest.approx(0.5)


def test_bound_at():
    assert bound_at("HF", 0.5) == pytest.approx(H_MAX)
    assert bound_at("HF", 1.0) == pytest.approx(0.0, abs=1e-15)
    assert bound_at("HF", f_closed(0.5)) == pytest.approx(h_closed(0.5), abs=1e-12)


# -- bound checks ---------------------------------------------------------------------


@pytest.mark.parametrize("x", np.linspace(0.1, 0.9, 9))
def test_saturating_operation_meets_every_bound(x):
    for rep in check_all_bounds(saturating_operation(x)).values():
        assert abs(rep.margin) < 1e-7


def test_check_bound_agrees_with_check_all(rng):
    op = mixed_saturating_operation(0.4, 0.2, 0.8)
    all_reps = check_all_bounds(op)
    for p in Pairing:
        assert check_bound(op, p).margin == pytest.approx(all_reps[p.value].margin, abs=1e-15)
        assert all_reps[p.value].satisfied


def test_identity_and_projective_sit_at_curve_ends():
    rep = check_bound(identity_operation(), "HF")
    assert rep.disturbance == pytest.approx(1.0) and abs(rep.margin) < 1e-12
    proj = kraus_from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    rep = check_bound(proj, "HF")
    assert rep.info == pytest.approx(H_MAX, abs=1e-6) and rep.satisfied


def test_monte_carlo_bound_widens_tolerance():
    rep = check_bound(saturating_operation(0.5), "HB", "monte_carlo", n_samples=100_000, seed=1)
    assert rep.tol > 1e-7 and rep.satisfied


# -- second derivative and equality ---------------------------------------------------


def test_second_derivative_closed_vs_finite_difference():
    rep = composite_concavity_check(64)
    assert rep.passed
    allowed = np.maximum(1e-6, 1e-4 * np.abs(rep.closed))
    assert np.all(np.abs(rep.closed - rep.finite_difference) <= allowed)
    assert np.all(rep.closed < 0)


def test_second_derivative_limits():
    # series of h near 0 gives -1/(2 ln 2) as x -> 0 and -1/(5 ln 2) as x -> 1
    assert concavity_second_derivative(1e-3) == pytest.approx(-1 / (2 * np.log(2)), rel=1e-4)
    assert concavity_second_derivative(1 - 1e-5) == pytest.approx(-1 / (5 * np.log(2)), rel=1e-3)
    assert finite_difference_second_derivative(0.5) == pytest.approx(concavity_second_derivative(0.5), rel=1e-5)


def test_composite_concavity_needs_resolution():
    with pytest.raises(ValueError):
        composite_concavity_check(10)


def test_equality_condition():
    rep = equality_condition_check(np.random.default_rng(3), 40)
    assert rep.passed
    assert rep.saturating_worst < 1e-7
    assert rep.unequal_worst < -1e-6
