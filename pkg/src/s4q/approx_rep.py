"""Approximate representation on the extended (hat) label space.

The hat space carries a representation of the tensor product of the
quantum group SU_q(2) with the equatorial quantum 2-sphere. Composing with
the algebra embedding and compressing with ``P`` and ``Q`` gives the map
``pi~(a) = P pi(a) Q`` whose deviation from the true representation decays
in ``j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import HAT_MOVES, TruncatedSpace, enumerate_space, hat_admissible, hat_space, spinor_admissible
from .operators import SparseOperator, Term, build_operator
from .qnum import QContext
from .report import CheckRecord
from .representations import FactoredTerm, spinor_coefficient, spinor_generator

__all__ = [
    "HAT_GENERATORS",
    "hat_two_epsilon",
    "hat_generator",
    "hat_interior",
    "suq2_relations",
    "relation_residuals",
    "pq_maps",
    "pi_tilde",
    "DeviationReport",
    "deviation_check",
    "multiplicativity_defect",
    "smoothing_tier",
    "tier_deviation",
    "coefficient_tier",
    "approx_suite",
]

HAT_GENERATORS = ("alpha", "beta", "alpha*", "beta*", "A", "B", "B*")


def _qv(ctx) -> float:
    return ctx.q if isinstance(ctx, QContext) else float(ctx)


def hat_two_epsilon(two_l, two_m2, two_j):
    """``2 eps = (-1)^{l + 1/2 - j - m2}`` on every hat label (integer l included)."""
    expo = (np.asarray(two_l) + 1 - np.asarray(two_j) - np.asarray(two_m2)) // 2
    return np.where(expo % 2 == 0, 1, -1)


def _eps(L) -> np.ndarray:
    return hat_two_epsilon(L.two_l, L.two_m2, L.two_j) / 2.0


def _hat_terms(g: str, q: float) -> list[Term]:
    if g == "alpha":
        return [Term((1, 1, 0, 1), lambda L: np.sqrt(1 - q ** (2 * (L.j + L.m1 + 1))))]
    if g == "beta":
        return [Term((1, -1, 0, 1), lambda L: q ** (L.j + L.m1))]
    if g == "A":
        return [Term((0, 0, 0, 0), lambda L: q ** (L.l - L.j + L.m2 - _eps(L)))]
    if g == "B":
        return [Term((2, 0, 2, 0), lambda L: np.sqrt(1 - q ** (2 * (L.l - L.j + L.m2 + 2 - _eps(L)))))]
    raise KeyError(g)


def hat_generator(g: str, space: TruncatedSpace, ctx) -> SparseOperator:
    """One of ``alpha, beta, A, B`` or an adjoint (``alpha*``, ``beta*``, ``B*``)."""
    if space.family != "hat":
        raise ValueError("hat_generator needs the hat family")
    if g not in HAT_GENERATORS:
        raise ValueError(f"unknown hat generator {g!r}")
    if g.endswith("*"):
        op = hat_generator(g[:-1], space, ctx).H
        op.name = g
        return op
    return build_operator(space, _hat_terms(g, _qv(ctx)), name=g)


def hat_interior(space: TruncatedSpace, steps: int = 2) -> np.ndarray:
    """Labels whose every admissible walk of at most ``steps`` moves stays in the space."""
    ok = np.ones(space.dim, dtype=bool)
    frontier = [(space.two_l, space.two_m1, space.two_m2, space.two_j, np.ones(space.dim, dtype=bool))]
    for _ in range(steps):
        nxt = []
        for tl, tm1, tm2, tj, alive in frontier:
            for d2l, d2m1, d2m2, d2j in HAT_MOVES:
                a, b, c, d = tl + d2l, tm1 + d2m1, tm2 + d2m2, tj + d2j
                adm = alive & hat_admissible(a, b, c, d)
                _, found = space.lookup(a, b, c, d, space.chirality)
                ok &= ~adm | found
                nxt.append((a, b, c, d, adm))
        frontier = nxt
    return ok


def suq2_relations(q: float):
    """Defining relations as ``(name, lhs, rhs)`` over words in hat generators."""
    return [
        ("beta alpha = q alpha beta", [(1.0, ("beta", "alpha"))], [(q, ("alpha", "beta"))]),
        ("beta* alpha = q alpha beta*", [(1.0, ("beta*", "alpha"))], [(q, ("alpha", "beta*"))]),
        ("[beta, beta*] = 0", [(1.0, ("beta", "beta*")), (-1.0, ("beta*", "beta"))], []),
        ("alpha alpha* + beta beta* = 1", [(1.0, ("alpha", "alpha*")), (1.0, ("beta", "beta*"))], [(1.0, ())]),
        ("alpha* alpha + q^2 beta* beta = 1", [(1.0, ("alpha*", "alpha")), (q * q, ("beta*", "beta"))], [(1.0, ())]),
        ("A B = q^2 B A", [(1.0, ("A", "B"))], [(q * q, ("B", "A"))]),
        ("B B* + A^2 = 1", [(1.0, ("B", "B*")), (1.0, ("A", "A"))], [(1.0, ())]),
        ("B* B + q^4 A^2 = 1", [(1.0, ("B*", "B")), (q**4, ("A", "A"))], [(1.0, ())]),
        ("[alpha, A] = 0", [(1.0, ("alpha", "A")), (-1.0, ("A", "alpha"))], []),
        ("[beta, B] = 0", [(1.0, ("beta", "B")), (-1.0, ("B", "beta"))], []),
        ("[alpha, B] = 0", [(1.0, ("alpha", "B")), (-1.0, ("B", "alpha"))], []),
    ]


def relation_residuals(space: TruncatedSpace, ctx, steps: int = 2) -> dict[str, float]:
    """Max column norm of ``lhs - rhs`` on :func:`hat_interior` for each relation."""
    q = _qv(ctx)
    gens = {g: hat_generator(g, space, q).matrix for g in HAT_GENERATORS}
    eye = sp.identity(space.dim, format="csr", dtype=complex)
    cols = np.flatnonzero(hat_interior(space, steps))

    def word(w):
        m = eye
        for g in reversed(w):
            m = gens[g] @ m
        return m

    out = {}
    for name, lhs, rhs in suq2_relations(q):
        diff = sp.csr_matrix((space.dim, space.dim), dtype=complex)
        for c, w in lhs:
            diff = diff + c * word(w)
        for c, w in rhs:
            diff = diff - c * word(w)
        d = sp.csc_matrix(diff)[:, cols]
        out[name] = float(np.sqrt(np.asarray(abs(d).power(2).sum(axis=0))).max()) if d.nnz else 0.0
    return out


# -- P, Q and the compression -------------------------------------------------------------

def pq_maps(hat: TruncatedSpace, spinor: TruncatedSpace) -> tuple[SparseOperator, SparseOperator]:
    """``Q``: spinor -> hat inclusion and ``P = Q*``: hat -> spinor projection."""
    if hat.family != "hat" or spinor.family != "spinor":
        raise ValueError("pq_maps needs (hat, spinor) spaces")
    if hat.two_L < spinor.two_L + 4:
        raise ValueError("hat cutoff must be at least the spinor cutoff plus 2")
    idx, found = hat.lookup(spinor.two_l, spinor.two_m1, spinor.two_m2, spinor.two_j, spinor.chirality)
    if not np.all(found):
        raise ValueError("hat space does not contain the spinor labels")
    Q = sp.csr_matrix((np.ones(spinor.dim, dtype=complex), (idx, np.arange(spinor.dim))),
                      shape=(hat.dim, spinor.dim))
    Qop = SparseOperator(Q, spinor, hat, name="Q")
    return Qop, Qop.H


def _embedding(x: str, q: float):
    """``phi(x)`` as a list of ``(coefficient, word)`` in hat generators."""
    table = {
        "x0": [(-1.0, ("alpha", "beta", "A")), (-1.0, ("beta*", "alpha*", "A"))],
        "x1": [(-1.0, ("alpha", "alpha", "A")), (q, ("beta*", "beta*", "A"))],
        "x2": [(1.0, ("B",))],
    }
    if x in table:
        return table[x]
    base = x[:-1]
    if x.endswith("*") and base in table:
        # (c w)^* = conj(c) reversed word of adjoints
        adj = lambda g: g if g == "A" else (g[:-1] if g.endswith("*") else g + "*")
        return [(np.conj(c), tuple(adj(g) for g in reversed(w))) for c, w in table[base]]
    raise KeyError(x)


class _HatContext:
    def __init__(self, spinor: TruncatedSpace, ctx, hat: TruncatedSpace | None = None):
        self.q = _qv(ctx)
        self.spinor = spinor
        self.hat = hat or hat_space(spinor.two_L + 4)
        self.Q, self.P = pq_maps(self.hat, spinor)
        self._gens = {}

    def gen(self, g):
        if g not in self._gens:
            self._gens[g] = hat_generator(g, self.hat, self.q).matrix
        return self._gens[g]

    def pi(self, x) -> sp.csr_matrix:
        out = sp.csr_matrix((self.hat.dim, self.hat.dim), dtype=complex)
        for c, w in _embedding(x, self.q):
            m = sp.identity(self.hat.dim, format="csr", dtype=complex)
            for g in reversed(w):
                m = self.gen(g) @ m
            out = out + c * m
        return out

    def compress(self, m) -> SparseOperator:
        return SparseOperator(self.P.matrix @ m @ self.Q.matrix, self.spinor)


def pi_tilde(x: str, spinor: TruncatedSpace, ctx, *, hat: TruncatedSpace | None = None,
             _hc: _HatContext | None = None) -> SparseOperator:
    """``P pi(phi(x)) Q`` on the spinor space; exact for columns with ``l <= L``."""
    hc = _hc or _HatContext(spinor, ctx, hat)
    op = hc.compress(hc.pi(x))
    op.name = f"pi~({x})"
    return op


# -- deviations ------------------------------------------------------------------------------

@dataclass(frozen=True)
class DeviationReport:
    """Per-level maxima of a difference operator against a ``C q^{level}`` bound."""

    name: str
    axis: str
    levels: tuple[float, ...]
    maxima: tuple[float, ...]
    constant: float
    rate: float

    def passed(self, C: float = 10.0) -> bool:
        return self.constant <= C


def _profile(name, diff: SparseOperator, axis: str, q: float, depth: float) -> DeviationReport:
    space = diff.domain
    coo = diff.matrix.tocoo()
    inside = space.interior(depth)
    keep = inside[coo.col]
    two = space.two_j if axis == "j" else space.two_l
    levels_all = np.unique(two[inside])
    maxima = np.zeros(levels_all.size)
    if keep.any():
        np.maximum.at(maxima, np.searchsorted(levels_all, two[coo.col[keep]]), np.abs(coo.data[keep]))
    lv = levels_all / 2.0
    constant = float(np.max(maxima / q**lv)) if maxima.size else 0.0
    sel = (lv >= lv[len(lv) // 2]) & (maxima > 1e-300)
    if sel.sum() >= 2:
        slope = np.polyfit(lv[sel], np.log(maxima[sel]), 1)[0]
        rate = float(-slope / abs(math.log(q)))
    else:
        rate = math.inf
    return DeviationReport(name, axis, tuple(lv.tolist()), tuple(maxima.tolist()), constant, rate)


def deviation_check(x: str, spinor: TruncatedSpace, ctx, *, depth: float = 1.0,
                    _hc: _HatContext | None = None) -> DeviationReport:
    """``x - pi~(x)``: per-``j`` maxima of ``|entry|`` on columns with ``l <= L - depth``."""
    q = _qv(ctx)
    if not np.any(spinor.interior(depth)):
        raise ValueError("interior is empty at this cutoff")
    hc = _hc or _HatContext(spinor, q)
    diff = spinor_generator(x, spinor, q) - pi_tilde(x, spinor, q, _hc=hc)
    return _profile(f"{x}-pi~({x})", diff, "j", q, depth)


def multiplicativity_defect(x: str, y: str, spinor: TruncatedSpace, ctx, *, depth: float = 1.0,
                            _hc: _HatContext | None = None) -> DeviationReport:
    """``pi~(x y) - pi~(x) pi~(y)`` against ``C q^j``."""
    q = _qv(ctx)
    hc = _hc or _HatContext(spinor, q)
    xy = hc.compress(hc.pi(x) @ hc.pi(y))
    diff = xy - pi_tilde(x, spinor, q, _hc=hc) @ pi_tilde(y, spinor, q, _hc=hc)
    return _profile(f"pi~({x}{y})-pi~({x})pi~({y})", diff, "j", q, depth)


# -- the q^l tier ---------------------------------------------------------------------------

def _simplified_coefficients(q: float):
    """Leading forms of the l-dependent coefficients, accurate up to ``O(q^l)``."""
    from .representations import _eps_of

    sq = lambda v: np.sqrt(np.maximum(v, 0.0))

    def Cp(l, j, m2):
        e = _eps_of(l, j, m2)
        return -(q ** (l - j + m2 - e)) * sq(1 - q ** (2 * (l + j + m2 + 3 + e)))

    def Cm(l, j, m2):
        e = _eps_of(l, j, m2)
        return -(q ** (l + j + m2 + 1 + e)) * sq(1 - q ** (2 * (l - j + m2 - e)))

    def Hp(l, j, m2):
        e = _eps_of(l, j, m2)
        return q ** (l + m2 + 1) * sq(q ** (2 * e * (2 * j + 1)) - q ** (2 * (l + m2 + 2)))

    def Dp(l, j, m2):
        e = _eps_of(l, j, m2)
        return sq(1 - q ** (2 * (l + j + m2 + 3 + e))) * sq(1 - q ** (2 * (l - j + m2 + 2 - e)))

    def Dm(l, j, m2):
        return -(q ** (2 * (l + m2) + 3)) * np.ones(np.shape(j))

    return {"Cp": Cp, "Cm": Cm, "Hp": Hp, "Dp": Dp, "Dm": Dm}


def _tier_terms(base: str, q: float, simplified: bool) -> list[FactoredTerm]:
    """Generator terms with the ``Delta l = 0`` pieces dropped.

    With ``simplified`` the remaining l-dependent coefficients are replaced
    by their leading forms.
    """
    c = (lambda n: _simplified_coefficients(q)[n]) if simplified else (lambda n: spinor_coefficient(n, q))
    Cp, Cm, Hp, Dp, Dm = (c(n) for n in ("Cp", "Cm", "Hp", "Dp", "Dm"))
    one = lambda j, m1: np.ones(np.broadcast(np.asarray(j), np.asarray(m1)).shape)
    if base == "x2":
        return [
            FactoredTerm((2, 0, 2, 0), one, lambda l, j, m2, s: Dp(l, j, m2)),
            FactoredTerm((-2, 0, 2, 0), one, lambda l, j, m2, s: Dm(l, j, m2)),
        ]
    k = lambda n: spinor_coefficient(n, q)
    if base == "x0":
        up, mid, dn, dm1 = k("Ap"), k("A0"), (lambda j, m1: k("Ap")(j - 1, m1)), 0
    else:
        up, mid, dn, dm1 = k("Bp"), k("B0"), k("Bm"), 2
    return [
        FactoredTerm((2, dm1, 0, 2), up, lambda l, j, m2, s: Cp(l, j, m2)),
        FactoredTerm((-2, dm1, 0, 2), up, lambda l, j, m2, s: Cm(l, j, m2)),
        FactoredTerm((2, dm1, 0, 0), mid, lambda l, j, m2, s: Hp(l, j, m2)),
        FactoredTerm((-2, dm1, 0, 0), mid, lambda l, j, m2, s: Hp(l - 1, j, m2)),
        FactoredTerm((2, dm1, 0, -2), dn, lambda l, j, m2, s: Cm(l + 1, j - 1, m2)),
        FactoredTerm((-2, dm1, 0, -2), dn, lambda l, j, m2, s: Cp(l - 1, j - 1, m2)),
    ]


def smoothing_tier(x: str, spinor: TruncatedSpace, ctx, *, simplified: bool = True) -> SparseOperator:
    """The ``O(q^l)`` approximation of a generator (adjoints via matrix adjoint)."""
    q = _qv(ctx)
    if x.endswith("*"):
        return smoothing_tier(x[:-1], spinor, q, simplified=simplified).H
    terms = [t.as_term() for t in _tier_terms(x, q, simplified)]
    return build_operator(spinor, terms, name=f"{x}~l")


def tier_deviation(x: str, spinor: TruncatedSpace, ctx, *, simplified: bool = True,
                   depth: float = 1.0) -> DeviationReport:
    """``x`` minus its ``q^l``-tier approximation, per-``l`` maxima against ``C q^l``."""
    q = _qv(ctx)
    diff = spinor_generator(x, spinor, q) - smoothing_tier(x, spinor, q, simplified=simplified)
    return _profile(f"{x}-tier_l({x})", diff, "l", q, depth)


def _prefactor_max(name: str, j, q: float):
    """``max_m1 |name(j, m1)|`` over the admissible ``m1``."""
    f = spinor_coefficient(name, q)
    out = np.zeros(np.shape(j))
    for two_j in np.unique(np.rint(2 * np.asarray(j)).astype(int)):
        m1 = np.arange(-two_j, two_j + 1, 2) / 2.0
        with np.errstate(invalid="ignore", divide="ignore"):
            v = np.abs(f(two_j / 2.0, m1))
        out[np.rint(2 * np.asarray(j)) == two_j] = np.nanmax(v) if v.size else 0.0
    return out


def coefficient_tier(name: str, ctx, L="25/2") -> DeviationReport:
    """``|exact - leading|`` for one l-dependent coefficient over spinor labels ``l <= L``.

    ``name`` may carry a prefactor, as in ``"A0*Hp"``: the difference is then
    scaled by the largest ``|A0_{j,m1}|`` over ``m1``, which is how the
    coefficient enters the operators.
    """
    q = _qv(ctx)
    pre, _, base = name.rpartition("*")
    space = enumerate_space("spinor", L, chiralities=(1,))
    exact = spinor_coefficient(base, q)
    approx = _simplified_coefficients(q)[base]
    l, j, m2 = space.l, space.j, space.m2
    with np.errstate(invalid="ignore", divide="ignore"):
        d = np.abs(exact(l, j, m2) - approx(l, j, m2))
    # labels where the exact coefficient is outside its domain carry no matrix element
    d = np.where(np.isfinite(d), d, 0.0)
    if pre:
        d = d * _prefactor_max(pre, j, q)
    m = SparseOperator(sp.diags(d.astype(complex), format="csr"), space)
    return _profile(name, m, "l", q, 0.0)


# -- suite ----------------------------------------------------------------------------------

def approx_suite(ctx, L="25/2", C: float = 10.0) -> list[CheckRecord]:
    q = _qv(ctx)
    spinor = enumerate_space("spinor", L)
    hc = _HatContext(spinor, q)
    hat = hc.hat
    cut = str(spinor.L)
    out = []

    def rec(cid, anchor, value, expected, residual, tol, passed=None, extra=None):
        ok = residual <= tol if passed is None else passed
        out.append(CheckRecord("approx", cid, anchor, q, cut, value, expected, residual, tol, ok, extra or {}))

    for name, r in relation_residuals(hat, q).items():
        rec(f"hat:{name}", "hat-algebra-relations", r, 0.0, r, 1e-9)

    PQ = (hc.P @ hc.Q).matrix - sp.identity(spinor.dim, format="csr")
    r = float(abs(PQ).max()) if PQ.nnz else 0.0
    rec("PQ=1", "hat-compression", r, 0.0, r, 0.0)
    QP = (hc.Q @ hc.P).matrix
    r = max(float(abs(QP @ QP - QP).max()) if (QP @ QP - QP).nnz else 0.0,
            float(abs(QP - QP.conj().T).max()) if (QP - QP.conj().T).nnz else 0.0)
    rec("QP-projection", "hat-compression", r, 0.0, r, 0.0)
    outside = ~spinor_admissible(hat.two_l, hat.two_m1, hat.two_m2, hat.two_j)
    leak = float(abs(hc.P.matrix[:, np.flatnonzero(outside)]).max()) if outside.any() else 0.0
    rec("P-kills-outside-I", "hat-compression", leak, 0.0, leak, 0.0)

    x2t = pi_tilde("x2", spinor, q, _hc=hc)
    pbq = hc.compress(hc.gen("B"))
    r = float(abs((x2t - pbq).matrix).max()) if (x2t - pbq).nnz else 0.0
    rec("pi~(x2)=PBQ", "hat-compression", r, 0.0, r, 0.0)
    x1t, x1st = pi_tilde("x1", spinor, q, _hc=hc), pi_tilde("x1*", spinor, q, _hc=hc)
    r = float(abs((x1t.H - x1st).matrix).max()) if (x1t.H - x1st).nnz else 0.0
    rec("pi~(x1)*=pi~(x1*)", "hat-compression", r, 0.0, r, 1e-15)

    for x in ("x0", "x1", "x1*", "x2", "x2*"):
        dev = deviation_check(x, spinor, q, _hc=hc)
        rec(f"deviation[{x}]", "approx-deviation", dev.constant, C, dev.constant, C,
            extra={"rate": dev.rate, "maxima": list(dev.maxima)})
        if x == "x0":
            # fitted exponent of the decay in j, in units of |log q|
            rec("deviation-rate[x0]", "approx-deviation", dev.rate, 0.95, max(0.0, 0.95 - dev.rate), 0.0)
    for x in ("x0", "x1", "x2"):
        dev = tier_deviation(x, spinor, q)
        rec(f"tier-l[{x}]", "approx-smoothing-tier", dev.constant, C, dev.constant, C,
            extra={"rate": dev.rate, "maxima": list(dev.maxima)})
    bare_h = coefficient_tier("Hp", q, L).constant
    for name in ("Cp", "Cm", "A0*Hp", "B0*Hp", "Dp", "Dm"):
        dev = coefficient_tier(name, q, L)
        extra = {"bare_constant": bare_h} if name.endswith("Hp") else {}
        rec(f"tier-l-coefficient[{name}]", "approx-smoothing-tier", dev.constant, C, dev.constant, C, extra=extra)
    for x, y in (("x0", "x0"), ("x1", "x1*"), ("x2", "x2*"), ("x0", "x2")):
        dev = multiplicativity_defect(x, y, spinor, q, _hc=hc)
        rec(f"multiplicativity[{x}{y}]", "approx-multiplicativity", dev.constant, C, dev.constant, C,
            extra={"maxima": list(dev.maxima)})
    return out
