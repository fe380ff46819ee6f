import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtradeoff.channels import (
    efficient_from_povm,
    hermitianize,
    identity_operation,
    induced_povm,
    kraus_from_matrices,
    random_kraus,
    random_operation,
    random_povm,
    random_psd,
    random_unitary,
    saturating_operation,
)
from qtradeoff.bloch_bures import pair_operation
from qtradeoff.errors import NegativeInput, NotPsd, WrongDim
from qtradeoff.measures import (
    COMPONENTS,
    Method,
    bures_component,
    bures_fidelity,
    component_value,
    convexity_probe,
    estimation_fidelity,
    merge_margin,
    operation_fidelity,
    operation_fidelity_closed,
    operation_fidelity_mc,
    phi_fidelity,
    shannon_component,
    shannon_gain,
    spectral_component,
)
from qtradeoff.states import qubit_quadrature_grid
from qtradeoff.tradeoff import H_MAX

# oracle values from mpmath quadrature at 30 digits
H_HALF = 0.061735292866819
B_HALF = 0.97735026918962576
F_HALF = 0.9553418012614795

PROJECTIVE = kraus_from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
seeds = st.integers(0, 2**32 - 1)


def test_identity_operation_values():
    op = identity_operation()
    povm = induced_povm(op)
    assert abs(shannon_gain(povm).value) < 1e-13
    assert operation_fidelity(op).value == pytest.approx(1.0, abs=1e-15)
    assert estimation_fidelity(povm).value == pytest.approx(0.5, abs=1e-15)
    assert bures_fidelity(op).value == pytest.approx(1.0, abs=1e-12)


def test_projective_endpoints():
    povm = induced_povm(PROJECTIVE)
    assert shannon_gain(povm).value == pytest.approx(H_MAX, abs=1e-6)
    assert operation_fidelity(PROJECTIVE).value == pytest.approx(2 / 3, abs=1e-15)
    assert estimation_fidelity(povm).value == pytest.approx(2 / 3, abs=1e-15)
    assert bures_fidelity(PROJECTIVE).value == pytest.approx(0.8, abs=1e-6)
    assert bures_fidelity(PROJECTIVE, "closed_form").value == pytest.approx(0.8, abs=1e-15)


def test_saturating_values_all_methods():
    op = saturating_operation(0.5)
    povm = induced_povm(op)
    for method in ("closed_form", "quadrature"):
        assert shannon_gain(povm, method).value == pytest.approx(H_HALF, abs=1e-10)
        assert bures_fidelity(op, method).value == pytest.approx(B_HALF, abs=1e-10)
    assert operation_fidelity(op).value == pytest.approx(F_HALF, abs=1e-15)
    assert estimation_fidelity(povm).value == pytest.approx(3.5 / 6, abs=1e-15)


def test_components_of_named_matrices():
    assert shannon_component(np.eye(2)) == pytest.approx(0.0, abs=1e-14)
    assert shannon_component(np.diag([1.5, 0.5]), "closed_form") == pytest.approx(H_HALF, abs=1e-14)
    assert bures_component(np.eye(2)) == pytest.approx(1.0, abs=1e-12)
    assert bures_component(3.0 * np.eye(3)) == pytest.approx(3.0, abs=1e-12)
    assert bures_component(np.diag([2.0, 0.0]), "closed_form") == pytest.approx(0.8, abs=1e-15)


def test_phi_fidelity():
    assert phi_fidelity([1, 1]) == pytest.approx(1.0)
    assert phi_fidelity([2, 0]) == pytest.approx(2 / 3)
    with pytest.raises(NegativeInput):
        phi_fidelity([1, -0.1])


@given(st.lists(st.floats(0, 5), min_size=2, max_size=5), st.floats(0.01, 10), st.randoms())
def test_phi_symmetric_and_homogeneous(u, c, r):
    v = list(u)
    r.shuffle(v)
    assert phi_fidelity(v) == pytest.approx(phi_fidelity(u), rel=1e-12, abs=1e-15)
    assert phi_fidelity([c * t for t in u]) == pytest.approx(c * phi_fidelity(u), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_fidelity_closed_matches_monte_carlo(d):
    rng = np.random.default_rng(100 + d)
    for k in range(5):
        op = random_kraus(d, 3, rng)
        closed = operation_fidelity_closed(op).value
        mc = operation_fidelity_mc(op, seed=k, n=100_000)
        assert abs(closed - mc.value) < 4 * mc.mc_std_error


def test_fidelity_quadrature_matches_closed(rng):
    op = random_kraus(2, 3, rng)
    assert operation_fidelity(op, "quadrature").value == pytest.approx(operation_fidelity(op).value, abs=1e-12)


def test_estimation_quadrature_and_mc(rng):
    povm = random_povm(2, 3, rng)
    closed = estimation_fidelity(povm).value
    assert estimation_fidelity(povm, "quadrature").value == pytest.approx(closed, abs=1e-12)
    mc = estimation_fidelity(random_povm(3, 3, rng), "monte_carlo", n_samples=50_000, seed=3)
    assert mc.mc_std_error > 0


def test_qutrit_spectral_matches_monte_carlo(rng):
    m = random_psd(3, rng)
    m = m / np.trace(m).real
    h_exact = shannon_component(m)
    b_exact = bures_component(m)
    h_mc = shannon_component(m, "monte_carlo", n_samples=400_000, seed=1)
    b_mc = bures_component(m, "monte_carlo", n_samples=400_000, seed=1)
    # loose absolute bounds: 400k samples give std errors well below 1e-3
    assert abs(h_exact - h_mc) < 2e-3
    assert abs(b_exact - b_mc) < 2e-3


def test_qubit_quadrature_matches_closed_components(rng):
    grid = qubit_quadrature_grid(256, 256)
    for _ in range(10):
        m = random_psd(2, rng)
        assert shannon_component(m, grid=grid) == pytest.approx(shannon_component(m, "closed_form"), abs=1e-9)
        assert bures_component(m, grid=grid) == pytest.approx(bures_component(m, "closed_form"), abs=1e-9)


def test_bures_of_rotated_elements_is_smaller():
    assert bures_fidelity(pair_operation(0.5, np.pi / 2)).value < B_HALF


def test_bures_closed_form_needs_psd(rng):
    op = random_kraus(2, 2, rng)
    with pytest.raises(NotPsd):
        bures_fidelity(op, "closed_form")
    with pytest.raises(WrongDim):
        bures_fidelity(random_kraus(3, 2, rng))
    with pytest.raises(WrongDim):
        shannon_component(random_psd(4, rng))


def test_monte_carlo_methods_record_std_error():
    op = saturating_operation(0.5)
    h = shannon_gain(induced_povm(op), "monte_carlo", n_samples=200_000, seed=2)
    b = bures_fidelity(op, "monte_carlo", n_samples=200_000, seed=2)
    assert h.method is Method.MONTE_CARLO and h.mc_std_error > 0
    assert abs(h.value - H_HALF) < 4 * h.mc_std_error
    assert abs(b.value - B_HALF) < 4 * b.mc_std_error


def test_hermitianize_never_lowers_fidelity():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        op = random_kraus(int(rng.integers(2, 4)), int(rng.integers(1, 4)), rng)
        assert operation_fidelity_closed(hermitianize(op)).value >= operation_fidelity_closed(op).value - 1e-10


@given(st.integers(2, 4), seeds)
def test_efficient_dominates_random_refinement(n, seed):
    rng = np.random.default_rng(seed)
    povm = random_povm(2, n, rng)
    eff = efficient_from_povm(povm)
    op = random_operation(povm, int(rng.integers(1, 4)), rng)
    assert operation_fidelity(eff).value >= operation_fidelity(op).value - 1e-9
    assert bures_fidelity(eff, "closed_form").value >= bures_fidelity(op).value - 1e-7


@pytest.mark.parametrize("name", COMPONENTS)
@given(seed=seeds, c=st.floats(0.01, 10))
def test_component_homogeneous_and_invariant(name, seed, c):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    m = random_psd(d, rng)
    m = m / np.trace(m).real
    u = random_unitary(d, rng)
    grid = qubit_quadrature_grid(256, 256) if d == 2 else None
    kw = {"grid": grid} if grid is not None else {}
    base = component_value(name, m, **kw)
    assert component_value(name, c * m, **kw) == pytest.approx(c * base, abs=1e-9)
    assert component_value(name, u @ m @ u.conj().T, **kw) == pytest.approx(base, abs=1e-9)
    assert spectral_component(name, np.linalg.eigvalsh(m)) == pytest.approx(base, abs=1e-9)


def test_proportional_split_is_lossless(rng):
    m = random_psd(2, rng)
    for name in COMPONENTS:
        v1 = spectral_component(name, np.linalg.eigvalsh(0.3 * m))
        v2 = spectral_component(name, np.linalg.eigvalsh(0.7 * m))
        v12 = spectral_component(name, np.linalg.eigvalsh(m))
        assert abs(merge_margin(name, v1, v2, v12)) < 1e-10


@pytest.mark.parametrize("name", COMPONENTS)
@pytest.mark.parametrize("mode", ["commuting", "general"])
def test_convexity_probe_small(name, mode):
    rep = convexity_probe(name, mode, 200, np.random.default_rng(11))
    assert rep.passed, rep.worst_margin


def test_convexity_probe_rejects_bad_input():
    with pytest.raises(ValueError):
        convexity_probe("H", "commuting", 0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        convexity_probe("H", "diagonal", 1, np.random.default_rng(0))
