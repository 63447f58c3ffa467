import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from s4q.basis import BasisLabel, enumerate_space
from s4q.qnum import q_number
from s4q.sphere_alg import check_relation, uq_relations, OperatorRegistry
from s4q.uqso5 import (HOPF_TABLE, antipode_star, casimir_c1, real_structure_C, rep_generator,
                       sigma_coefficients)

SCALAR = enumerate_space("scalar", 4)
SPINOR = enumerate_space("spinor", "7/2")


def test_b_vanishes_on_integer_l():
    for j, m2 in ((0, 2), (1, 1), (2, 0)):
        assert sigma_coefficients("b", 2, j, m2, 0.5) == 0.0


def test_a_vanishes_at_top():
    # j = 0, m2 = l on the scalar highest weight: [l - j - m2 + eps] = [0]
    assert sigma_coefficients("a", 3, 0, 3, 0.5) == 0.0


def test_c_sign_follows_two_eps():
    # spinor labels carry eps = +-1/2 so (-1)^{2 eps} = -1: c <= 0 wherever it is nonzero
    vals = [sigma_coefficients("c", l, j, m2, 0.4)
            for l in (1.5, 2.5, 3.5) for j in (1.5, 2.5) if j <= l
            for m2 in np.arange(-(l + 0.5 - j), l + 0.5 - j + 1)]
    vals = [v for v in vals if np.isfinite(v) and v != 0]
    assert vals and all(v < 0 for v in vals)


def test_K1_is_q_to_the_m1():
    K1 = rep_generator("K1", SPINOR, 0.5)
    assert np.allclose(K1.matrix.diagonal(), 0.5 ** SPINOR.m1)


def test_E1_kills_top_m1():
    E1 = rep_generator("E1", SPINOR, 0.5).matrix.tocsc()
    top = np.flatnonzero(SPINOR.two_m1 == SPINOR.two_j)
    assert E1[:, top].nnz == 0


@pytest.mark.parametrize("two_l", [0, 2, 4, 6, 8])
def test_E2_kills_highest_weight(two_l):
    E2 = rep_generator("E2", SCALAR, 0.5)
    assert not E2.apply_basis(BasisLabel(two_l, 0, two_l, 0, 0))


@pytest.mark.parametrize("space", [SCALAR, SPINOR], ids=["scalar", "spinor"])
def test_casimir_eigenvalue(space):
    q = 0.5
    C = casimir_c1(space, q)
    diag = C.matrix.diagonal()
    expected = q ** (2 * space.j + 1) + q ** (-2 * space.j - 1)
    assert np.allclose(diag, expected, rtol=1e-12)
    off = C.matrix - np.diag(diag)
    assert np.abs(off).max() <= 1e-12
    lab = SPINOR.labels[0]
    assert casimir_c1(SPINOR, q).element(lab, lab) == pytest.approx(4.25)


@given(st.floats(0.1, 0.9))
def test_E1_F1_commutator_dense_oracle(q):
    # [E1, F1] = (K1^2 - K1^-2)/(q - 1/q), checked with dense matrices
    E = rep_generator("E1", SPINOR, q).toarray()
    F = rep_generator("F1", SPINOR, q).toarray()
    K = np.diag(q ** SPINOR.m1)
    rhs = (K @ K - np.linalg.inv(K @ K)) / (q - 1 / q)
    assert np.abs(E @ F - F @ E - rhs).max() <= 1e-12 * np.abs(rhs).max()


@pytest.mark.parametrize("space", [SCALAR, SPINOR], ids=["scalar", "spinor"])
def test_uq_relation_catalogue(space):
    reg = OperatorRegistry(space, 0.6)
    for name, lhs, rhs in uq_relations(0.6):
        rep = check_relation(lhs, rhs, registry=reg, name=name)
        assert rep.passed, (name, rep.relative)


def test_real_structure_C():
    q = 0.5
    C = real_structure_C(SCALAR, q)
    I = np.eye(SCALAR.dim)
    assert np.abs((C @ C).toarray() - I).max() == 0.0
    vac = BasisLabel(0, 0, 0, 0, 0)
    assert C.M.apply_basis(vac) == {vac: 1.0}
    for h in ("K1", "E1", "E2"):
        s, g = antipode_star(h, q)
        lhs = (C @ rep_generator(h, SCALAR, q)) @ C
        rhs = rep_generator(g, SCALAR, q) * s
        assert np.abs((lhs - rhs).matrix).max() <= 1e-10


def test_hopf_table_consistency():
    q = 0.7
    for h, data in HOPF_TABLE.items():
        assert HOPF_TABLE[data.star].star == h
    # S(E_i) = -q^i E_i, and E_i^* = F_i
    s, g = antipode_star("E2", q)
    assert g == "F2" and s == pytest.approx(-(q**2))
    assert antipode_star("K1", q) == (1.0, "K1inv")


def test_rep_generator_rejects_simple():
    from s4q.basis import simple_space

    with pytest.raises(ValueError):
        rep_generator("K1", simple_space(3), 0.5)
