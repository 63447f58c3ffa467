"""The U_q(so(5)) side: irreducible actions sigma_l, Casimir, real structure C."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import BasisLabel, TruncatedSpace, two_epsilon
from .operators import AntilinearOperator, LabelArrays, SparseOperator, Term, build_operator
from .qnum import QContext, q_number

__all__ = [
    "GENERATORS",
    "HOPF_TABLE",
    "GeneratorHopfData",
    "sigma_coefficients",
    "rep_generator",
    "casimir_c1",
    "real_structure_C",
    "antipode_star",
]

GENERATORS = ("K1", "K2", "K1inv", "K2inv", "E1", "E2", "F1", "F2")


@dataclass(frozen=True)
class GeneratorHopfData:
    """Hopf structure on a single generator.

    ``coproduct`` lists ``(left, right)`` legs of ``Delta(h)``; ``antipode`` is
    ``(scalar, generator)`` meaning ``S(h) = scalar * generator`` with the
    scalar a function of q.
    """

    name: str
    coproduct: tuple[tuple[str, str], ...]
    counit: float
    antipode: tuple[object, str]
    star: str


def _hopf_table():
    t = {}
    for i in (1, 2):
        K, Ki, E, F = f"K{i}", f"K{i}inv", f"E{i}", f"F{i}"
        t[K] = GeneratorHopfData(K, ((K, K),), 1.0, (lambda q: 1.0, Ki), K)
        t[Ki] = GeneratorHopfData(Ki, ((Ki, Ki),), 1.0, (lambda q: 1.0, K), Ki)
        t[E] = GeneratorHopfData(E, ((E, K), (Ki, E)), 0.0, (lambda q, i=i: -(q**i), E), F)
        # F_i = E_i^*:  Delta F = F (x) K^{-1}... conjugating Delta E leg by leg
        t[F] = GeneratorHopfData(F, ((F, K), (Ki, F)), 0.0, (lambda q, i=i: -(q ** (-i)), F), E)
    return t


HOPF_TABLE = _hopf_table()


def antipode_star(h: str, q: float) -> tuple[float, str]:
    """``S(h)^*`` as ``(scalar, generator)``."""
    scalar, g = HOPF_TABLE[h].antipode
    return float(np.conj(scalar(q))), HOPF_TABLE[g].star


# -- a_l, b_l, c_l -----------------------------------------------------------

def _sqrt(x):
    return np.sqrt(x)  # NaN outside the domain; build_operator polices it


def _a(l, j, m2, e, q):
    qn = lambda z: q_number(np.asarray(z, dtype=float), q)
    ae = np.abs(e)
    return _sqrt(qn(l - j - m2 + e) * qn(l + j + m2 + 3 + e) / (qn(2 * (j + ae) + 1) * qn(2 * (j - ae) + 3))) / qn(2.0)


def _b(l, j, m2, e, q):
    qn = lambda z: q_number(np.asarray(z, dtype=float), q)
    l, j, m2, e = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (l, j, m2, e)))
    out = np.zeros(l.shape)
    nz = e != 0
    if np.any(nz):
        l, j, m2, e = l[nz], j[nz], m2[nz], e[nz]
        out[nz] = (
            2 * np.abs(e)
            * _sqrt(qn(l - e * (2 * j + 1) - m2 + 1) * qn(l - e * (2 * j + 1) + m2 + 2))
            / (qn(2 * j) * qn(2 * j + 2))
        )
    return out


def _c(l, j, m2, e, q):
    qn = lambda z: q_number(np.asarray(z, dtype=float), q)
    ae = np.abs(e)
    sign = np.where(e != 0, -1.0, 1.0)  # (-1)^{2 eps}
    return sign / qn(2.0) * _sqrt(
        qn(l - j + m2 + 2 - e) * qn(l + j - m2 + 1 - e) / (qn(2 * (j + ae) - 1) * qn(2 * (j - ae) + 1))
    )


_COEFF = {"a": _a, "b": _b, "c": _c}


def sigma_coefficients(kind: str, l, j, m2, ctx) -> float:
    """``a_l(j, m2)``, ``b_l(j, m2)`` or ``c_l(j, m2)``.

    ``l, j, m2`` are half-integers (floats or Fractions); epsilon is derived
    from them.
    """
    q = ctx.q if isinstance(ctx, QContext) else float(ctx)
    e = two_epsilon(int(round(2 * float(l))), int(round(2 * float(m2))), int(round(2 * float(j)))) / 2.0
    with np.errstate(invalid="ignore", divide="ignore"):
        return float(_COEFF[kind](float(l), float(j), float(m2), e, q))


def _eps(L):
    return two_epsilon(L.two_l, L.two_m2, L.two_j) / 2.0


def _qn(q):
    return lambda z: q_number(np.asarray(z, dtype=float), q)


def _generator_terms(h: str, q: float):
    qn = _qn(q)
    if h == "K1":
        return [Term((0, 0, 0, 0), lambda L: q**L.m1)]
    if h == "K1inv":
        return [Term((0, 0, 0, 0), lambda L: q ** (-L.m1))]
    if h == "K2":
        return [Term((0, 0, 0, 0), lambda L: q ** (L.m2 - L.m1))]
    if h == "K2inv":
        return [Term((0, 0, 0, 0), lambda L: q ** (L.m1 - L.m2))]
    if h == "E1":
        return [Term((0, 2, 0, 0), lambda L: _sqrt(qn(L.j - L.m1) * qn(L.j + L.m1 + 1)))]
    if h == "E2":
        return [
            Term(
                (0, -2, 2, 2),
                lambda L: _sqrt(qn(L.j - L.m1 + 1) * qn(L.j - L.m1 + 2)) * _a(L.l, L.j, L.m2, _eps(L), q),
            ),
            Term(
                (0, -2, 2, 0),
                lambda L: _sqrt(qn(L.j + L.m1) * qn(L.j - L.m1 + 1)) * _b(L.l, L.j, L.m2, _eps(L), q),
            ),
            Term(
                (0, -2, 2, -2),
                lambda L: _sqrt(qn(L.j + L.m1) * qn(L.j + L.m1 - 1)) * _c(L.l, L.j, L.m2, _eps(L), q),
            ),
        ]
    raise KeyError(h)


def rep_generator(h: str, space: TruncatedSpace, ctx) -> SparseOperator:
    """``sigma(h)`` on the truncated direct sum of V_l.

    ``F_i`` is built as the matrix adjoint of ``E_i``.
    """
    if space.family not in ("scalar", "spinor"):
        raise ValueError("U_q(so(5)) acts on scalar or spinor spaces only")
    q = ctx.q if isinstance(ctx, QContext) else float(ctx)
    if h in ("F1", "F2"):
        op = rep_generator("E" + h[1], space, ctx).H
        op.name = h
        return op
    return build_operator(space, _generator_terms(h, q), name=h)


def casimir_c1(space: TruncatedSpace, ctx) -> SparseOperator:
    """``q^-1 K1^2 + q K1^-2 + (q - q^-1)^2 E1 F1``."""
    q = ctx.q if isinstance(ctx, QContext) else float(ctx)
    K = rep_generator("K1", space, ctx)
    Ki = rep_generator("K1inv", space, ctx)
    E = rep_generator("E1", space, ctx)
    F = rep_generator("F1", space, ctx)
    op = (1 / q) * (K @ K) + q * (Ki @ Ki) + (q - 1 / q) ** 2 * (E @ F)
    op.name = "C1"
    return op


def real_structure_C(space: TruncatedSpace, ctx) -> AntilinearOperator:
    """``C|l,m1,m2;j> = (-q)^{m1} q^{3 m2} |l,-m1,-m2;j>`` (integer l only)."""
    if space.family != "scalar":
        raise ValueError("C is defined on the scalar family only")
    q = ctx.q if isinstance(ctx, QContext) else float(ctx)

    def coef(L):
        return (-1.0) ** (L.two_m1 // 2) * q ** L.m1 * q ** (3 * L.m2)

    # the map sends m -> -m, so it is not a translation; build by explicit lookup
    src = np.arange(space.dim)
    idx, found = space.lookup(space.two_l, -space.two_m1, -space.two_m2, space.two_j, space.chirality)
    assert np.all(found)
    vals = coef(LabelArrays(space))
    m = sp.csr_matrix((vals.astype(complex), (idx, src)), shape=(space.dim, space.dim))
    return AntilinearOperator(SparseOperator(m, space, name="C"), name="C")


def highest_weight_label(two_l: int) -> BasisLabel:
    """``|l,0,l;0>`` for integer l."""
    return BasisLabel(two_l, 0, two_l, 0, 0)
