import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtradeoff import qmat
from qtradeoff.channels import (
    KrausOperation,
    Povm,
    SchemaError,
    conditional_state,
    efficient_from_povm,
    from_json,
    hermitianize,
    identity_operation,
    induced_povm,
    kraus_from_matrices,
    mixed_saturating_operation,
    outcome_probability,
    povm_from_weights,
    random_kraus,
    random_operation,
    random_povm,
    random_unitary,
    refined_povm,
    saturating_operation,
    to_json,
)
from qtradeoff.errors import CompletenessViolated, NotPsd, OutOfRange, ZeroProbabilityOutcome
from qtradeoff.measures import operation_fidelity_closed

seeds = st.integers(0, 2**32 - 1)


def test_povm_validation():
    with pytest.raises(CompletenessViolated):
        Povm((np.diag([1.0, 0.5]),))
    with pytest.raises(NotPsd):
        Povm((np.diag([1.2, 0.5]), np.diag([-0.2, 0.5])))
    with pytest.raises(ValueError):
        Povm(())


def test_kraus_validation():
    with pytest.raises(CompletenessViolated):
        kraus_from_matrices([0.9 * np.eye(2)])
    op = identity_operation(3)
    assert op.dim == 3 and op.outcomes == [0]


@given(st.integers(2, 4), st.integers(1, 5), st.integers(1, 3), seeds)
def test_random_operation_induces_given_povm(d, n, k, seed):
    rng = np.random.default_rng(seed)
    povm = random_povm(d, n, rng)
    op = random_operation(povm, k, rng)
    assert len(op) == n * k
    for m, m2 in zip(povm.elements, induced_povm(op).elements):
        assert np.max(np.abs(m - m2)) < 1e-9


def test_refined_povm_has_one_element_per_kraus(rng):
    op = random_operation(random_povm(2, 3, rng), 2, rng)
    assert len(refined_povm(op)) == 6
    assert len(induced_povm(op)) == 3


def test_efficient_operation_is_root(rng):
    povm = random_povm(3, 4, rng)
    eff = efficient_from_povm(povm)
    for a, m in zip(eff.matrices(), povm.elements):
        assert qmat.is_psd(a)
        assert np.allclose(a @ a, m, atol=1e-12)


def test_conditional_state_and_probability(rng):
    op = saturating_operation(0.5)
    rho = np.diag([1.0, 0.0]).astype(complex)
    povm = induced_povm(op)
    assert np.isclose(outcome_probability(povm, 0, rho), 0.75)
    post = conditional_state(op, 0, rho)
    assert np.isclose(np.trace(post).real, 1.0)
    assert qmat.is_psd(post)


def test_conditional_state_zero_probability():
    op = kraus_from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    with pytest.raises(ZeroProbabilityOutcome):
        conditional_state(op, 1, np.diag([1.0, 0.0]).astype(complex))


@given(st.integers(2, 4), st.integers(1, 4), seeds)
def test_hermitianize_keeps_povm_and_raises_fidelity(d, n, seed):
    rng = np.random.default_rng(seed)
    op = random_kraus(d, n, rng)
    herm = hermitianize(op)
    for m, m2 in zip(induced_povm(op).elements, induced_povm(herm).elements):
        assert np.max(np.abs(m - m2)) < 1e-9
    assert operation_fidelity_closed(herm).value >= operation_fidelity_closed(op).value - 1e-12


def test_random_unitary_is_unitary(rng):
    for d in (2, 3, 5):
        assert qmat.is_unitary(random_unitary(d, rng))


def test_saturating_families():
    op = saturating_operation(0.3)
    assert all(qmat.is_psd(a) for a in op.matrices())
    mixed = mixed_saturating_operation(0.25, 0.2, 0.9)
    assert mixed.outcomes == [0, 1, 2, 3]
    with pytest.raises(OutOfRange):
        saturating_operation(1.5)


def test_povm_from_weights():
    povm = povm_from_weights([0.5, 0.5], [0.4, 0.4], [[0, 0, 1], [0, 0, -1]])
    assert np.allclose(povm.elements[0], np.diag([0.7, 0.3]))


def test_json_round_trip(rng):
    op = random_operation(random_povm(2, 3, rng), 2, rng)
    back = from_json(to_json(op))
    assert isinstance(back, KrausOperation)
    for a, b in zip(op.elements, back.elements):
        assert (a.r, a.mu) == (b.r, b.mu)
        assert np.array_equal(a.a, b.a)
    povm = random_povm(3, 2, rng)
    assert isinstance(from_json(to_json(povm)), Povm)


@pytest.mark.parametrize(
    "doc",
    [
        "{not json",
        json.dumps({"dim": 2}),
        json.dumps({"dim": 2, "elements": [{"r": 0, "re": [[1, 0]]}]}),
        json.dumps({"dim": 2, "kind": "channel", "elements": [{"r": 0, "re": [[1, 0], [0, 1]]}]}),
    ],
)
def test_json_schema_errors(doc):
    with pytest.raises(SchemaError):
        from_json(doc)


def test_json_invariant_error():
    doc = json.dumps({"dim": 2, "elements": [{"r": 0, "mu": 0, "re": [[1, 0], [0, 0.5]], "im": [[0, 0], [0, 0]]}]})
    with pytest.raises(CompletenessViolated):
        from_json(doc)
