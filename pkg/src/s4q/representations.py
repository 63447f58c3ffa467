"""Equivariant *-representations of the orthogonal quantum 4-sphere.

Three families share one operator type:

* the two irreducible representations on l^2(N^2) (``simple_generator``);
* the left regular representation on the integer-l modules
  (``scalar_generator``);
* the two chiral spinor representations on the half-odd-l modules
  (``spinor_generator``), the chirality selecting the sign of the terms that
  keep ``l`` fixed.

Generators are named ``x0, x1, x1*, x2, x2*``; starred ones are matrix
adjoints.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .basis import TruncatedSpace, two_epsilon
from .operators import SparseOperator, Term, build_operator
from .qnum import QContext, q_number

__all__ = [
    "ALGEBRA_GENERATORS",
    "simple_generator",
    "scalar_generator",
    "spinor_generator",
    "algebra_generator",
    "spinor_coefficient",
    "scalar_coefficient",
    "FactoredTerm",
    "factored_terms",
]

ALGEBRA_GENERATORS = ("x0", "x1", "x1*", "x2", "x2*")


def _qv(ctx):
    return ctx.q if isinstance(ctx, QContext) else float(ctx)


def _split(x: str):
    if x not in ALGEBRA_GENERATORS:
        raise KeyError(f"unknown generator {x!r}")
    return x.rstrip("*"), x.endswith("*")


# -- the l^2(N^2) pair ---------------------------------------------------------

def simple_generator(x: str, space: TruncatedSpace, ctx) -> SparseOperator:
    """Generator on the truncated direct sum of the two l^2(N^2) irreps."""
    if space.family != "simple":
        raise ValueError("simple_generator needs a 'simple' space")
    q = _qv(ctx)
    base, star = _split(x)
    if star:
        return simple_generator(base, space, ctx).H
    k1 = lambda L: L.two_m1 // 2
    k2 = lambda L: L.two_m2 // 2
    if base == "x0":
        terms = [Term((0, 0, 0, 0), lambda L: L.chirality * q ** (2.0 * (k1(L) + k2(L))))]
    elif base == "x1":
        terms = [Term((2, 2, 0, 0), lambda L: q ** (2.0 * k2(L)) * np.sqrt(1 - q ** (4.0 * (k1(L) + 1))))]
    else:
        terms = [Term((2, 0, 2, 0), lambda L: np.sqrt(1 - q ** (4.0 * (k2(L) + 1))))]
    return build_operator(space, terms, name=x)


# -- coefficient tables ----------------------------------------------------------

def _make_qn(q):
    return lambda z: q_number(np.asarray(z, dtype=float), q)


def _eps_of(l, j, m2):
    """epsilon as a function of the coefficient's own (l, j, m2) subscripts."""
    two_l = np.rint(2 * np.asarray(l)).astype(np.int64)
    two_j = np.rint(2 * np.asarray(j)).astype(np.int64)
    two_m2 = np.rint(2 * np.asarray(m2)).astype(np.int64)
    return two_epsilon(two_l, two_m2, two_j) / 2.0


def scalar_coefficient(name: str, q: float):
    """Coefficient function of the left regular representation.

    ``A, Bp, Bm`` take ``(j, m1)``; ``Cp, Cm, Dp, Dm`` take ``(l, j, m2)``.
    """
    qn = _make_qn(q)
    table = {
        "A": lambda j, m1: q ** (m1 - 1) * np.sqrt(qn(j + m1 + 1) * qn(j - m1 + 1) / (qn(2 * j + 1) * qn(2 * j + 3))),
        "Bp": lambda j, m1: q ** (-j + m1 - 0.5)
        * np.sqrt(qn(j + m1 + 1) * qn(j + m1 + 2) / (qn(2 * j + 1) * qn(2 * j + 3))),
        "Bm": lambda j, m1: -(q ** (j + m1 + 0.5))
        * np.sqrt(qn(j - m1) * qn(j - m1 - 1) / (qn(2 * j - 1) * qn(2 * j + 1))),
        "Cp": lambda l, j, m2: q ** (m2 - 1)
        * np.sqrt(qn(l + j + m2 + 3) * qn(l + j - m2 + 3) / (qn(2 * l + 3) * qn(2 * l + 5))),
        "Cm": lambda l, j, m2: -(q ** (m2 - 1))
        * np.sqrt(qn(l - j + m2) * qn(l - j - m2) / (qn(2 * l + 1) * qn(2 * l + 3))),
        "Dp": lambda l, j, m2: q ** (-l + m2 - 1.5)
        * np.sqrt(qn(l + j + m2 + 3) * qn(l - j + m2 + 2) / (qn(2 * l + 3) * qn(2 * l + 5))),
        "Dm": lambda l, j, m2: q ** (l + m2 + 1.5)
        * np.sqrt(qn(l - j - m2) * qn(l + j - m2 + 1) / (qn(2 * l + 1) * qn(2 * l + 3))),
    }
    return table[name]


def spinor_coefficient(name: str, q: float):
    """Coefficient function of the chiral spinor representations.

    ``Ap, A0, Bp, B0, Bm`` take ``(j, m1)``; the others take ``(l, j, m2)``
    and compute epsilon from those arguments.
    """
    qn = _make_qn(q)
    sq = np.sqrt

    def Ap(j, m1):
        return q ** (m1 - 1) * sq(qn(j + m1 + 1) * qn(j - m1 + 1)) / qn(2 * j + 2)

    def A0(j, m1):
        return q**-2 * (q ** (j + m1 + 1) * qn(2) * qn(j - m1) - qn(2 * j)) / (qn(2 * j) * qn(2 * j + 2))

    def Bp(j, m1):
        return q ** (-j + m1 - 0.5) * sq(qn(j + m1 + 1) * qn(j + m1 + 2)) / qn(2 * j + 2)

    def B0(j, m1):
        return (1 + q * q) * q ** (m1 - 0.5) * sq(qn(j - m1) * qn(j + m1 + 1)) / (qn(2 * j) * qn(2 * j + 2))

    def Bm(j, m1):
        return -(q ** (j + m1 + 0.5)) * sq(qn(j - m1) * qn(j - m1 - 1)) / qn(2 * j)

    def Cp(l, j, m2):
        e = _eps_of(l, j, m2)
        return -(q ** (m2 - 1 - e)) * sq(qn(l + j + m2 + 3 + e) * qn(l + j - m2 + 3 - e)) / qn(2 * l + 4)

    def C0(l, j, m2):
        e = _eps_of(l, j, m2)
        return (
            qn(4 * e)
            * q ** (2 * e * l + m2 - 1 + 3 * e)
            * sq(qn(l + 0.5 + j - 2 * e * m2 + 2) * qn(l + 0.5 - j - 2 * e * m2))
            / (qn(2 * l + 2) * qn(2 * l + 4))
        )

    def Cm(l, j, m2):
        e = _eps_of(l, j, m2)
        return -(q ** (m2 - 1 + e)) * sq(qn(l - j + m2 - e) * qn(l - j - m2 + e)) / qn(2 * l + 2)

    def Hp(l, j, m2):
        e = _eps_of(l, j, m2)
        return (
            q ** (m2 - 1 + e * (2 * j + 1))
            * sq(qn(l + 2 * e * j - m2 + 2 + e) * qn(l - 2 * e * j + m2 + 2 - e))
            / qn(2 * l + 4)
        )

    def H0(l, j, m2):
        e = _eps_of(l, j, m2)
        k = e * (2 * j + 1)
        return (
            qn(l - k - m2 + 1) * qn(l - k + m2 + 2) - q**-2 * qn(l + k - m2 + 2) * qn(l + k + m2 + 1)
        ) / (qn(2 * l + 2) * qn(2 * l + 4))

    def Dp(l, j, m2):
        e = _eps_of(l, j, m2)
        return q ** (-l + m2 - 1.5) * sq(qn(l + j + m2 + 3 + e) * qn(l - j + m2 + 2 - e)) / qn(2 * l + 4)

    def D0(l, j, m2):
        e = _eps_of(l, j, m2)
        return (
            qn(2)
            * q ** (m2 + 0.5)
            * sq(qn(l - 2 * e * j - m2 + 1 - e) * qn(l - 2 * e * j + m2 + 2 - e))
            / (qn(2 * l + 2) * qn(2 * l + 4))
        )

    def Dm(l, j, m2):
        e = _eps_of(l, j, m2)
        return -(q ** (l + m2 + 1.5)) * sq(qn(l - j - m2 + e) * qn(l + j - m2 + 1 - e)) / qn(2 * l + 2)

    return locals()[name]


# -- factored terms -----------------------------------------------------------------

class FactoredTerm(NamedTuple):
    """Weighted shift whose amplitude is ``left(j, m1) * right(l, j, m2, s)``.

    ``shift`` is in doubled units ``(dl, dm1, dm2, dj)``; ``s`` is the
    chirality (0 on the scalar family).
    """

    shift: tuple[int, int, int, int]
    left: Callable
    right: Callable

    def as_term(self) -> Term:
        left, right = self.left, self.right
        return Term(self.shift, lambda L: left(L.j, L.m1) * right(L.l, L.j, L.m2, L.chirality.astype(float)))


def _one(j, m1):
    return np.ones(np.broadcast(np.asarray(j), np.asarray(m1)).shape)


def _scalar_factored(base: str, q: float) -> list[FactoredTerm]:
    c = lambda n: scalar_coefficient(n, q)
    A, Bp, Bm, Cp, Cm, Dp, Dm = (c(n) for n in ("A", "Bp", "Bm", "Cp", "Cm", "Dp", "Dm"))
    if base == "x2":
        return [
            FactoredTerm((2, 0, 2, 0), _one, lambda l, j, m2, s: Dp(l, j, m2)),
            FactoredTerm((-2, 0, 2, 0), _one, lambda l, j, m2, s: Dm(l, j, m2)),
        ]
    if base == "x0":
        up, dn, dm1 = A, (lambda j, m1: A(j - 1, m1)), 0
    else:
        up, dn, dm1 = Bp, Bm, 2
    return [
        FactoredTerm((2, dm1, 0, 2), up, lambda l, j, m2, s: Cp(l, j, m2)),
        FactoredTerm((-2, dm1, 0, 2), up, lambda l, j, m2, s: Cm(l, j, m2)),
        FactoredTerm((2, dm1, 0, -2), dn, lambda l, j, m2, s: Cm(l + 1, j - 1, m2)),
        FactoredTerm((-2, dm1, 0, -2), dn, lambda l, j, m2, s: Cp(l - 1, j - 1, m2)),
    ]


def _spinor_factored(base: str, q: float) -> list[FactoredTerm]:
    c = lambda n: spinor_coefficient(n, q)
    Ap, A0, Bp, B0, Bm = (c(n) for n in ("Ap", "A0", "Bp", "B0", "Bm"))
    Cp, C0, Cm, Hp, H0, Dp, D0, Dm = (c(n) for n in ("Cp", "C0", "Cm", "Hp", "H0", "Dp", "D0", "Dm"))
    if base == "x2":
        return [
            FactoredTerm((2, 0, 2, 0), _one, lambda l, j, m2, s: Dp(l, j, m2)),
            FactoredTerm((0, 0, 2, 0), _one, lambda l, j, m2, s: s * D0(l, j, m2)),
            FactoredTerm((-2, 0, 2, 0), _one, lambda l, j, m2, s: Dm(l, j, m2)),
        ]
    if base == "x0":
        up, mid, dn, dm1 = Ap, A0, (lambda j, m1: Ap(j - 1, m1)), 0
    else:
        up, mid, dn, dm1 = Bp, B0, Bm, 2
    return [
        FactoredTerm((2, dm1, 0, 2), up, lambda l, j, m2, s: Cp(l, j, m2)),
        FactoredTerm((0, dm1, 0, 2), up, lambda l, j, m2, s: -s * C0(l, j, m2)),
        FactoredTerm((-2, dm1, 0, 2), up, lambda l, j, m2, s: Cm(l, j, m2)),
        FactoredTerm((2, dm1, 0, 0), mid, lambda l, j, m2, s: Hp(l, j, m2)),
        FactoredTerm((0, dm1, 0, 0), mid, lambda l, j, m2, s: s * H0(l, j, m2)),
        FactoredTerm((-2, dm1, 0, 0), mid, lambda l, j, m2, s: Hp(l - 1, j, m2)),
        FactoredTerm((2, dm1, 0, -2), dn, lambda l, j, m2, s: Cm(l + 1, j - 1, m2)),
        FactoredTerm((0, dm1, 0, -2), dn, lambda l, j, m2, s: -s * C0(l, j - 1, m2)),
        FactoredTerm((-2, dm1, 0, -2), dn, lambda l, j, m2, s: Cp(l - 1, j - 1, m2)),
    ]


def factored_terms(family: str, x: str, ctx) -> list[FactoredTerm]:
    """Weighted-shift decomposition of an unstarred generator."""
    base, star = _split(x)
    if star:
        raise ValueError("factored_terms takes unstarred generators; use the adjoint")
    q = _qv(ctx)
    if family == "scalar":
        return _scalar_factored(base, q)
    if family == "spinor":
        return _spinor_factored(base, q)
    raise ValueError(f"no factored terms for family {family!r}")


# -- scalar (left regular) -------------------------------------------------------

def scalar_generator(x: str, space: TruncatedSpace, ctx) -> SparseOperator:
    """Left regular representation on the integer-l modules."""
    if space.family != "scalar":
        raise ValueError("scalar_generator needs a scalar space")
    base, star = _split(x)
    if star:
        return scalar_generator(base, space, ctx).H
    terms = [t.as_term() for t in _scalar_factored(base, _qv(ctx))]
    return build_operator(space, terms, name=x)


# -- chiral spinors ----------------------------------------------------------------

def spinor_generator(x: str, space: TruncatedSpace, ctx, chirality=None) -> SparseOperator:
    """Chiral spinor representation.

    On a space holding both chiralities the result is the direct sum of the
    ``+`` and ``-`` representations; ``chirality`` restricts it to one block
    (zero on the other).
    """
    if space.family != "spinor":
        raise ValueError("spinor_generator needs a spinor space")
    base, star = _split(x)
    if star:
        return spinor_generator(base, space, ctx, chirality).H
    mask = None
    if chirality is not None:
        sign = 1 if chirality in ("+", 1) else -1
        mask = space.chirality == sign
    terms = [t.as_term() for t in _spinor_factored(base, _qv(ctx))]
    return build_operator(space, terms, name=x, mask=mask)


def algebra_generator(x: str, space: TruncatedSpace, ctx, **kw) -> SparseOperator:
    """Dispatch on the space family."""
    fam = space.family
    if fam == "simple":
        return simple_generator(x, space, ctx)
    if fam == "scalar":
        return scalar_generator(x, space, ctx)
    if fam == "spinor":
        return spinor_generator(x, space, ctx, **kw)
    raise ValueError(f"no A(S^4_q) representation on family {fam!r}")
