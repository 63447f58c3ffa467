import math

import numpy as np
import pytest

from s4q.approx_rep import (HAT_GENERATORS, approx_suite, coefficient_tier, deviation_check, hat_generator,
                            hat_interior, hat_two_epsilon, multiplicativity_defect, pi_tilde, pq_maps,
                            relation_residuals, smoothing_tier, tier_deviation)
from s4q.basis import BasisLabel, hat_space, spinor_admissible, two_epsilon
from s4q.representations import spinor_generator

from conftest import QS, spinor


@pytest.fixture(scope="module")
def small():
    s = spinor("9/2")
    return s, hat_space(s.two_L + 4)


def test_hat_epsilon_agrees_with_spinor_epsilon(spinor_small):
    s = spinor_small
    assert np.array_equal(hat_two_epsilon(s.two_l, s.two_m2, s.two_j), two_epsilon(s.two_l, s.two_m2, s.two_j))
    # integer l: parity of l + 1/2 - j - m2 still decides
    assert hat_two_epsilon(2, 1, 1) == 1 and hat_two_epsilon(2, -1, 1) == -1


def test_hat_generator_elements(small):
    _, hat = small
    q = 0.45
    src = BasisLabel(3, 1, -1, 1, 1)
    a = hat_generator("alpha", hat, q).apply_basis(src)
    assert a == pytest.approx({BasisLabel(4, 2, -1, 2, 1): math.sqrt(1 - q ** 4)})  # 2(j + m1 + 1) = 4
    b = hat_generator("beta", hat, q).apply_basis(src)
    assert b == pytest.approx({BasisLabel(4, 0, -1, 2, 1): q ** 1.0})
    # l - j + m2 = 1/2 and the label's own eps = +1/2
    A = hat_generator("A", hat, q).apply_basis(src)
    assert A == pytest.approx({src: 1.0})
    src2 = BasisLabel(3, 1, 1, 1, 1)  # l - j + m2 = 3/2, eps = -1/2
    assert hat_generator("A", hat, q).apply_basis(src2) == pytest.approx({src2: q**2})
    with pytest.raises(ValueError):
        hat_generator("gamma", hat, q)
    with pytest.raises(ValueError):
        hat_generator("A", spinor("3/2"), q)


@pytest.mark.parametrize("q", QS)
def test_hat_relations(small, q):
    _, hat = small
    assert hat_interior(hat).any()
    res = relation_residuals(hat, q)
    assert len(res) == 11
    assert max(res.values()) <= 1e-12


def test_adjoints_are_matrix_adjoints(small):
    _, hat = small
    for g in ("alpha", "beta", "B"):
        a = hat_generator(g, hat, 0.5).toarray()
        b = hat_generator(g + "*", hat, 0.5).toarray()
        assert np.array_equal(a.conj().T, b)
    assert set(HAT_GENERATORS) >= {"alpha*", "beta*", "B*"}


def test_pq_maps(small):
    s, hat = small
    Q, P = pq_maps(hat, s)
    assert np.array_equal((P @ Q).toarray(), np.eye(s.dim))
    QP = (Q @ P).toarray()
    assert np.array_equal(QP @ QP, QP)
    outside = ~spinor_admissible(hat.two_l, hat.two_m1, hat.two_m2, hat.two_j)
    assert outside.any()
    assert P.toarray()[:, outside].max() == 0
    # labels with m1 > j are outside
    assert np.all(outside[np.abs(hat.two_m1) > hat.two_j])
    with pytest.raises(ValueError):
        pq_maps(hat_space(s.two_L + 2), s)
    with pytest.raises(ValueError):
        pq_maps(hat, hat)


@pytest.mark.parametrize("x", ["x0", "x1", "x2", "x1*"])
def test_pi_tilde_shifts_are_those_of_the_representation(small, x):
    s, hat = small
    approx = set(pi_tilde(x, s, 0.5, hat=hat).components)
    exact = set(spinor_generator(x, s, 0.5).components)
    assert approx and approx <= exact


def test_pi_tilde_x0_components(small):
    s, hat = small
    comps = set(pi_tilde("x0", s, 0.5, hat=hat).components)
    assert comps == {(2, 0, 0, 2, 0), (-2, 0, 0, -2, 0)}


def test_pi_tilde_x2_is_compressed_B_and_adjoint_consistent(small):
    s, hat = small
    Q, P = pq_maps(hat, s)
    B = hat_generator("B", hat, 0.5)
    assert np.array_equal(pi_tilde("x2", s, 0.5, hat=hat).toarray(), (P @ B @ Q).toarray())
    a = pi_tilde("x1", s, 0.5, hat=hat).toarray()
    b = pi_tilde("x1*", s, 0.5, hat=hat).toarray()
    assert np.abs(a.conj().T - b).max() <= 1e-15


@pytest.mark.parametrize("q", QS)
@pytest.mark.parametrize("x", ["x0", "x1", "x2*"])
def test_deviation_bounded(q, x):
    dev = deviation_check(x, spinor("13/2"), q)
    assert dev.passed(10.0)
    assert dev.maxima[-1] <= 10.0 * q ** dev.levels[-1]


def test_deviation_rate_x0():
    dev = deviation_check("x0", spinor("13/2"), 0.3)
    assert dev.rate >= 0.95


def test_deviation_empty_interior():
    with pytest.raises(ValueError):
        deviation_check("x0", spinor("1/2"), 0.5, depth=1.0)


@pytest.mark.parametrize("q", QS)
def test_multiplicativity(q):
    s = spinor("11/2")
    assert multiplicativity_defect("x0", "x0", s, q).passed(10.0)
    assert max(multiplicativity_defect("x2", "x2*", s, q).maxima) == 0.0


@pytest.mark.parametrize("q", QS)
def test_smoothing_tier(q):
    s = spinor("13/2")
    assert tier_deviation("x0", s, q).passed(10.0)
    t = smoothing_tier("x1", s, q)
    assert all(k[0] != 0 for k in t.components)
    assert np.abs(smoothing_tier("x1*", s, q).toarray() - t.toarray().conj().T).max() == 0


@pytest.mark.parametrize("q", QS)
@pytest.mark.parametrize("name", ["Cp", "Cm", "Dp", "Dm", "A0*Hp"])
def test_coefficient_tier(q, name):
    assert coefficient_tier(name, q, "13/2").passed(10.0)


def test_bare_hp_tier_is_not_uniform():
    # the bare coefficient error behaves like q^{3(l - j)}, not q^l
    assert not coefficient_tier("Hp", 0.3, "25/2").passed(10.0)


@pytest.mark.slow
@pytest.mark.parametrize("q", QS)
def test_approx_suite_passes(q):
    recs = approx_suite(q)
    assert len(recs) == 35
    assert all(r.passed for r in recs), [str(r) for r in recs if not r.passed]
