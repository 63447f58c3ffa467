import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from s4q.basis import enumerate_space, simple_space
from s4q.sphere_alg import (AffineElement, OperatorRegistry, block_operator, check_relation,
                            covariance_check_e, crossed_relations, defining_relations,
                            highest_weight_checks, hopf_action, idempotent_e, idempotent_suite, kappa,
                            prod, radius_relation, relations_suite, represent_e, sigma_spin)

E = AffineElement.of


def close(a, b, tol=1e-14):
    return np.abs(a.coef - b.coef).max() <= tol


def test_action_table_examples():
    q = 0.5
    assert close(hopf_action("E2", E(x1=1), q), E(x2=1))
    assert close(hopf_action("K2", E(x2=1), q), E(x2=q))
    assert close(hopf_action("E1", E(x2=1), q), E())
    # counit on constants
    assert close(hopf_action("E1", E(one=1), q), E())
    assert close(hopf_action("K1", E(one=1), q), E(one=1))


def test_kappa_scalings():
    q = 0.7
    assert close(kappa(E(x0=1), q), E(x0=1))
    assert close(kappa(E(x1=1), q), E(x1=q**8 * q**-6))
    assert close(kappa(E(x2=1), q), E(x2=q**6), 1e-13)


def test_idempotent_coefficient_identities():
    for q in (0.3, 0.5, 0.8):
        e = idempotent_e(q)
        assert (kappa(e.star(), q) - e).max_abs() <= 1e-12
        assert e.scalar_trace() == pytest.approx(2.0)
        for rec in covariance_check_e(q):
            assert rec.passed, rec


def test_sigma_spin_K_diagonals():
    q = 0.5
    assert np.allclose(np.diag(sigma_spin("K1", q)), [q**0.5, q**0.5, q**-0.5, q**-0.5])
    assert np.allclose(np.diag(sigma_spin("K2", q)), [1, 1 / q, q, 1])
    # F is the transpose of E
    assert np.array_equal(sigma_spin("F1", q), sigma_spin("E1", q).T)


@given(st.floats(0.1, 0.9))
def test_e_squared_in_simple_rep(q):
    space = simple_space(12)
    P = block_operator(represent_e(OperatorRegistry(space, q)))
    cols = np.concatenate([np.flatnonzero(space.interior(2)) + k * space.dim for k in range(4)])
    d = (P @ P - P)[:, cols]
    assert abs(d).max() <= 1e-12


def test_relation_catalogue_sizes():
    q = 0.5
    assert len(crossed_relations(q)) == 18
    assert len(defining_relations(q)) >= 5
    assert radius_relation(q)[0]


def test_named_relation_examples():
    q = 0.5
    space = enumerate_space("spinor", "9/2")
    reg = OperatorRegistry(space, q)
    r = check_relation([prod("x1*", "x1"), prod("x1", "x1*", c=-1)], [prod("x0", "x0", c=1 - q**4)],
                       registry=reg)
    assert r.passed
    r = check_relation([prod("E2", "x1")], [prod("x1", "E2", c=q), prod("x2", "K2")], registry=reg)
    assert r.passed
    r = check_relation([prod("x2", "x2")], [prod("x2", "x2")], registry=reg)
    assert r.residual == 0.0


def test_wrong_relation_fails():
    q = 0.5
    space = enumerate_space("spinor", "7/2")
    r = check_relation([prod("x1", "x2")], [prod("x2", "x1")], space, q)
    assert not r.passed


def test_empty_interior_raises():
    space = enumerate_space("spinor", "1/2")
    with pytest.raises(ValueError):
        check_relation([prod("x2", "x2")], [], space, 0.5, depth=1)


@pytest.mark.parametrize("family", ["simple", "scalar", "spinor"])
def test_relations_suite_small(family):
    space = {"simple": simple_space(15), "scalar": enumerate_space("scalar", 5),
             "spinor": enumerate_space("spinor", "11/2")}[family]
    recs = relations_suite(space, 0.4)
    assert recs and all(r.passed for r in recs)
    if family == "spinor":
        assert {r.check_id.split(":")[0] for r in recs} == {"spinor+", "spinor-"}


def test_idempotent_and_highest_weight():
    q = 0.5
    recs = idempotent_suite(simple_space(15), q) + highest_weight_checks(enumerate_space("scalar", 6), q)
    assert all(r.passed for r in recs), [r for r in recs if not r.passed]
    assert any("v+(1-e)" in r.check_id for r in recs)


def test_affine_element_star():
    a = E(one=2, x1=1j, x2s=3)
    b = a.star()
    assert close(b, E(one=2, x1s=-1j, x2=3))
    with pytest.raises(ValueError):
        AffineElement(np.zeros(5))
