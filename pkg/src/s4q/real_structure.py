"""Real structure J, its equivariant companion T, and commutant diagnostics.

``J`` preserves ``l``, ``j`` and the sign label and reflects ``m1, m2``.
Ideal membership of the commutators ``[a, J b J^-1]`` and
``[[D, a], J b J^-1]`` is tested through finite-cutoff decay profiles and
cutoff-uniform norm bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .basis import TruncatedSpace, enumerate_space
from .dirac_zeta import dirac
from .fredholm import grading_and_F
from .operators import AntilinearOperator, SparseOperator
from .qnum import QContext, q_number
from .report import CheckRecord
from .representations import ALGEBRA_GENERATORS
from .sphere_alg import OperatorRegistry
from .uqso5 import GENERATORS, antipode_star, rep_generator

__all__ = [
    "J_operator",
    "T_operator",
    "structural_residuals",
    "t_equivariance",
    "t_square_residual",
    "conjugate",
    "commutant_ops",
    "f_closed_form",
    "f_derived",
    "f_matrix_element",
    "DecayProfile",
    "decay_profile",
    "operator_norm",
    "SmoothingReport",
    "smoothing_check",
    "real_suite",
]


def _qv(ctx) -> float:
    return ctx.q if isinstance(ctx, QContext) else float(ctx)


def _reflection(space: TruncatedSpace, values) -> AntilinearOperator:
    idx, found = space.lookup(space.two_l, -space.two_m1, -space.two_m2, space.two_j, space.chirality)
    if not np.all(found):
        raise ValueError("space is not closed under m -> -m")
    m = sp.csr_matrix((np.asarray(values, dtype=complex), (idx, np.arange(space.dim))),
                      shape=(space.dim, space.dim))
    return AntilinearOperator(SparseOperator(m, space))


def _j_phase(space: TruncatedSpace) -> np.ndarray:
    # i^{2l+1} (-1)^{j+m1}; both exponents are integers on spinor labels
    i_pow = np.array([1, 1j, -1, -1j])[(space.two_l + 1) % 4]
    return i_pow * (-1.0) ** ((space.two_j + space.two_m1) // 2)


def J_operator(space: TruncatedSpace, ctx=None) -> AntilinearOperator:
    """``J|l,m1,m2;j> = i^{2l+1} (-1)^{j+m1} |l,-m1,-m2;j>`` (antilinear)."""
    if space.family != "spinor":
        raise ValueError("J acts on the spinor family")
    J = _reflection(space, _j_phase(space))
    J.name = "J"
    return J


def T_operator(space: TruncatedSpace, ctx) -> AntilinearOperator:
    """``T = J q^{m1 + 3 m2}``: the equivariant antilinear map with polar part J."""
    q = _qv(ctx)
    w = q ** (space.m1 + 3 * space.m2)
    T = _reflection(space, _j_phase(space) * w)
    T.name = "T"
    return T


def _max_col_norm(m, cols=None) -> float:
    m = sp.csc_matrix(m)
    if cols is not None:
        m = m[:, cols]
    if m.nnz == 0:
        return 0.0
    return float(np.sqrt(np.asarray(abs(m).power(2).sum(axis=0))).max())


def structural_residuals(space: TruncatedSpace) -> dict[str, float]:
    """Max-entry residuals of ``J^2 = -1``, ``JD = DJ``, ``J gamma = gamma J`` and isometry."""
    J = J_operator(space)
    D, _ = dirac(space)
    gamma, _ = grading_and_F(space)
    eye = sp.identity(space.dim, format="csr")
    sq = (J @ J).matrix + eye
    jd = (J @ D).M.matrix - (D @ J).M.matrix
    jg = (J @ gamma).M.matrix - (gamma @ J).M.matrix
    iso = (J.M.matrix.conj().T @ J.M.matrix) - eye
    return {k: (float(abs(v).max()) if v.nnz else 0.0) for k, v in
            (("J^2=-1", sq), ("JD=DJ", jd), ("Jgamma=gammaJ", jg), ("J*J=1", sp.csr_matrix(iso)))}


def t_equivariance(space: TruncatedSpace, ctx, generators=("K1", "K2", "E1", "E2"),
                   depth: float = 0.0) -> dict[str, float]:
    """Relative residual of ``T h = S(h)^* T`` per generator.

    As matrices: ``M_T conj(h) - c g M_T`` with ``S(h)^* = c g``. The residual
    is the largest column norm on the interior over the largest column norm
    of either product (entries range over many orders of magnitude).
    """
    q = _qv(ctx)
    T = T_operator(space, q)
    cols = np.flatnonzero(space.interior(depth))
    out = {}
    for h in generators:
        c, g = antipode_star(h, q)
        left = (T @ rep_generator(h, space, q)).M.matrix
        right = c * (rep_generator(g, space, q).matrix @ T.M.matrix)
        scale = max(1e-300, _max_col_norm(left, cols), _max_col_norm(right, cols))
        out[h] = _max_col_norm(left - right, cols) / scale
    return out


def t_square_residual(space: TruncatedSpace, ctx) -> dict[str, float]:
    """``T^2`` is linear; relative residual of ``[T^2, sigma(h)]`` for every generator."""
    q = _qv(ctx)
    T = T_operator(space, q)
    T2 = T @ T
    out = {}
    for h in GENERATORS:
        H = rep_generator(h, space, q)
        a, b = (T2 @ H).matrix, (H @ T2).matrix
        scale = max(1e-300, _max_col_norm(a), _max_col_norm(b))
        out[h] = _max_col_norm(a - b) / scale
    return out


def conjugate(J: AntilinearOperator, b: SparseOperator) -> SparseOperator:
    """``J b J^-1`` as a linear operator."""
    return J.conjugate(b)


def commutant_ops(a: str, b: str, space: TruncatedSpace, ctx, *, registry: OperatorRegistry | None = None,
                  J: AntilinearOperator | None = None) -> tuple[SparseOperator, SparseOperator]:
    """``[a, J b J^-1]`` and ``[[D, a], J b J^-1]`` for generator names a, b.

    Both are exact on columns with ``l <= L - 2``.
    """
    reg = registry or OperatorRegistry(space, ctx)
    J = J or J_operator(space)
    A, B = reg[a], reg[b]
    JBJ = conjugate(J, B)
    D, _ = dirac(space)
    DA = D @ A - A @ D
    return A @ JBJ - JBJ @ A, DA @ JBJ - JBJ @ DA


def f_closed_form(l, ctx) -> float:
    """The published closed form offered for ``f(l, 1/2, l)``.

    Kept for comparison only: it does not agree with the matrix element (see
    :func:`f_derived`).
    """
    q = _qv(ctx)
    l = float(l)
    qn = lambda z: float(q_number(z, q))
    num = (q ** (l - 1) + q ** (1 - l)) * math.sqrt(qn(2 * l + 3)) * qn(l + 1) * qn(l + 2) * qn(l + 3)
    den = qn(2 * l + 2) * qn(2 * l + 4) ** 2 * qn(2 * l + 6)
    return -(q ** (-l - 4)) * (1 - q * q) ** 2 * qn(2) * num / den


def f_derived(l, ctx) -> float:
    """``f(l, 1/2, l)`` from the four-term D-coefficient combination.

    With every epsilon read off its own subscripts the combination collapses to
    ``[2] q^{-l-2} sqrt([3][2l+1]) ([2] - q^{2l+5} - q^{-2l-5}) / ([2l+4]^2 [2l+6])``.
    """
    q = _qv(ctx)
    l = float(l)
    qn = lambda z: float(q_number(z, q))
    brace = qn(2) - q ** (2 * l + 5) - q ** (-2 * l - 5)
    return qn(2) * q ** (-l - 2) * math.sqrt(qn(3) * qn(2 * l + 1)) * brace / (qn(2 * l + 4) ** 2 * qn(2 * l + 6))


def f_matrix_element(C: SparseOperator, two_l: int, two_m1: int = 1, chirality: int = 1) -> float:
    """``+-<l+1, m1, l; 1/2| [x2, J x2 J] |l, m1, l; 1/2>_+-`` from ``C = [x2, J x2 J^-1]``.

    ``J b J = -J b J^-1`` because ``J^2 = -1``, hence the extra sign.
    """
    from .basis import BasisLabel

    src = BasisLabel(two_l, two_m1, two_l, 1, chirality)
    dst = BasisLabel(two_l + 2, two_m1, two_l, 1, chirality)
    return -chirality * C.element(dst, src).real


# -- decay profiles -------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayProfile:
    """Per-level maxima of ``|entry|`` grouped by the source label.

    ``rate`` is the fitted decay exponent in units of ``|log q|`` (entries
    behave like ``q^{rate * level}``); ``constant`` is the smallest C with
    ``max_entry(level) <= C q^{exponent * level}`` at every level.
    """

    axis: str
    levels: tuple[float, ...]
    maxima: tuple[float, ...]
    rate: float
    goodness: float
    exponent: float
    constant: float

    def as_dict(self) -> dict:
        return {"axis": self.axis, "levels": list(self.levels), "maxima": list(self.maxima),
                "rate": self.rate, "goodness": self.goodness, "exponent": self.exponent,
                "constant": self.constant}


def decay_profile(T: SparseOperator, axis: str, ctx, *, depth: float = 2.0, exponent: float = 2.0,
                  endpoint: str = "source", floor: float = 1e-300) -> DecayProfile:
    """Decay of ``T`` along ``axis`` in {"j", "l"} on interior columns.

    Each entry is assigned to the level of its source label, or with
    ``endpoint="min"`` to the smaller of the source and target levels (a
    convention that treats ``T`` and ``T*`` alike). The rate is a
    least-squares slope of ``log max`` against the level over the upper half
    of the levels present.
    """
    if axis not in ("j", "l"):
        raise ValueError("axis must be 'j' or 'l'")
    if endpoint not in ("source", "min"):
        raise ValueError("endpoint must be 'source' or 'min'")
    q = _qv(ctx)
    dom, cod = T.domain, T.codomain
    coo = T.matrix.tocoo()
    keep = dom.interior(depth)[coo.col]
    rows, cols, vals = coo.row[keep], coo.col[keep], np.abs(coo.data[keep])
    src_two = dom.two_j if axis == "j" else dom.two_l
    dst_two = cod.two_j if axis == "j" else cod.two_l
    lev = src_two[cols]
    if endpoint == "min":
        lev = np.minimum(lev, dst_two[rows])
    all_levels = np.unique(np.concatenate([src_two[dom.interior(depth)], lev]))
    maxima = np.zeros(all_levels.size)
    if vals.size:
        pos = np.searchsorted(all_levels, lev)
        np.maximum.at(maxima, pos, vals)
    levels = all_levels / 2.0
    if not np.any(maxima > floor):
        return DecayProfile(axis, tuple(levels.tolist()), tuple(maxima.tolist()), math.inf, 1.0, exponent, 0.0)
    constant = float(np.max(maxima / q ** (exponent * levels)))
    upper = levels >= levels[len(levels) // 2]
    sel = upper & (maxima > floor)
    if sel.sum() >= 2:
        x, y = levels[sel], np.log(maxima[sel])
        slope, icpt = np.polyfit(x, y, 1)
        resid = y - (slope * x + icpt)
        ss = float(np.sum((y - y.mean()) ** 2))
        goodness = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
        rate = -slope / abs(math.log(q))
    else:
        rate, goodness = math.inf, 1.0
    return DecayProfile(axis, tuple(levels.tolist()), tuple(maxima.tolist()), float(rate), goodness,
                        exponent, constant)


# -- norms and smoothing -------------------------------------------------------------------

def _local_rank(group: np.ndarray, key: np.ndarray) -> np.ndarray:
    """Position of each ``key`` among the distinct keys of its group."""
    order = np.lexsort((key, group))
    g, k = group[order], key[order]
    new = np.ones(g.size, dtype=bool)
    new[1:] = (g[1:] != g[:-1]) | (k[1:] != k[:-1])
    start = np.ones(g.size, dtype=bool)
    start[1:] = g[1:] != g[:-1]
    distinct = np.cumsum(new) - 1
    out = np.empty(g.size, dtype=np.int64)
    out[order] = distinct - np.maximum.accumulate(np.where(start, distinct, 0))
    return out


def operator_norm(T: SparseOperator, cols=None) -> float:
    """Largest singular value, restricted to the columns ``cols`` when given.

    Weighted-shift operators split into many small blocks: columns are
    coupled only through shared rows. The norm is the largest dense SVD over
    the connected components of ``|T|^* |T|``, which is exact and
    deterministic. Blocks of equal shape are decomposed in one batch.
    """
    m = T.matrix.tocsc()
    if cols is not None:
        m = m[:, cols]
    m.eliminate_zeros()
    if m.nnz == 0:
        return 0.0
    pattern = abs(m)
    _, comp = connected_components(pattern.T @ pattern, directed=False)
    coo = m.tocoo()
    g = comp[coo.col]
    lr, lc = _local_rank(g, coo.row), _local_rank(g, coo.col)
    nr = np.zeros(comp.max() + 1, dtype=np.int64)
    nc = np.zeros_like(nr)
    np.maximum.at(nr, g, lr + 1)
    np.maximum.at(nc, g, lc + 1)
    best = 0.0
    shapes = nr * (nc.max() + 1) + nc
    for key in np.unique(shapes[nr > 0]):
        blocks = np.flatnonzero(shapes == key)
        slot = np.full(nr.size, -1, dtype=np.int64)
        slot[blocks] = np.arange(blocks.size)
        sel = slot[g] >= 0
        stack = np.zeros((blocks.size, nr[blocks[0]], nc[blocks[0]]), dtype=complex)
        stack[slot[g[sel]], lr[sel], lc[sel]] = coo.data[sel]
        best = max(best, float(np.linalg.norm(stack, 2, axis=(1, 2)).max()))
    return best


@dataclass(frozen=True)
class SmoothingReport:
    """``||D|^k T||`` for k = 0..k_max at each cutoff, and the worst relative increment."""

    cutoffs: tuple[str, ...]
    norms: dict = field(default_factory=dict)  # k -> tuple over cutoffs
    increment: float = 0.0
    tolerance: float = 1e-4

    @property
    def passed(self) -> bool:
        return self.increment <= self.tolerance


def smoothing_check(build, cutoffs=("17/2", "21/2", "25/2"), k_max: int = 4, ctx=None, *,
                    depth: float = 2.0, tol: float = 1e-4) -> SmoothingReport:
    """Cutoff-uniform bounds for ``|D|^k T``.

    ``build(space)`` returns the operator on a spinor space. Norms are taken
    on columns with ``l <= L - depth``, where the truncated operator is exact.
    Passes when every norm changes by at most ``tol`` (relative) between
    consecutive cutoffs.
    """
    if k_max > 8:
        raise ValueError("k_max above 8 exceeds the double precision range at large cutoffs")
    norms = {k: [] for k in range(k_max + 1)}
    for L in cutoffs:
        space = enumerate_space("spinor", L)
        T = build(space)
        cols = np.flatnonzero(space.interior(depth))
        weight = space.l + 1.5
        for k in range(k_max + 1):
            DkT = SparseOperator(sp.diags(weight**k) @ T.matrix, T.domain, T.codomain)
            norms[k].append(operator_norm(DkT, cols))
    inc = 0.0
    for k, vals in norms.items():
        for a, b in zip(vals, vals[1:]):
            inc = max(inc, abs(b - a) / max(abs(b), 1e-300) if b else 0.0)
    return SmoothingReport(tuple(str(c) for c in cutoffs), {k: tuple(v) for k, v in norms.items()}, inc, tol)


# -- suite ------------------------------------------------------------------------------------

def _star(x: str) -> str:
    if x == "x0":
        return x
    return x[:-1] if x.endswith("*") else x + "*"


def _max_entry(m, cols=None) -> float:
    m = sp.csc_matrix(m)
    if cols is not None:
        m = m[:, cols]
    return float(abs(m).max()) if m.nnz else 0.0


def real_suite(ctx, L="25/2", *, cutoffs=("17/2", "21/2", "25/2"), k_max: int = 4) -> list[CheckRecord]:
    from .parallel import ordered_map

    q = _qv(ctx)
    space = enumerate_space("spinor", L)
    cut = str(space.L)
    out = []

    def rec(cid, anchor, value, expected, residual, tol, passed=None, extra=None, cutoff=cut):
        ok = residual <= tol if passed is None else passed
        out.append(CheckRecord("real", cid, anchor, q, cutoff, value, expected, residual, tol, ok, extra or {}))

    for name, r in structural_residuals(space).items():
        rec(name, "real-structure-signs", r, 0.0, r, 0.0)
    for h, r in t_equivariance(space, q, depth=1).items():
        rec(f"T-equivariance[{h}]", "T-equivariance", r, 0.0, r, 1e-9)
    small = enumerate_space("spinor", "11/2")
    r = max(t_square_residual(small, q).values())
    rec("T^2-commutes", "T-square-equivariant", r, 0.0, r, 1e-9, cutoff=str(small.L))
    T = T_operator(space, q)
    J = J_operator(space)
    polar = _max_entry(T.M.matrix - J.M.matrix @ sp.diags(q ** (space.m1 + 3 * space.m2)))
    rec("T=J|T|", "T-equivariance", polar, 0.0, polar, 1e-12)

    reg = OperatorRegistry(space, q)
    for name in ALGEBRA_GENERATORS:
        reg[name]
    pairs = [(a, b) for a in ALGEBRA_GENERATORS for b in ALGEBRA_GENERATORS]
    comms = dict(zip(pairs, ordered_map(lambda ab: commutant_ops(*ab, space, q, registry=reg, J=J), pairs)))
    C22 = comms[("x2", "x2")][0]

    for two_l in range(1, space.two_L - 3, 2):
        fm = f_matrix_element(C22, two_l)
        fd, fc = f_derived(two_l / 2, q), f_closed_form(two_l / 2, q)
        rec(f"f(l,1/2,l)[l={two_l}/2]/derived", "commutant-matrix-element", fm, fd, abs(fm - fd) / abs(fd), 1e-10)
        rec(f"f(l,1/2,l)[l={two_l}/2]/published", "commutant-matrix-element", fm, fc, abs(fm - fc) / abs(fc), 1e-10)

    cols = np.flatnonzero(space.interior(2))
    sym1 = sym2 = 0.0
    for (a, b), (C, CD) in comms.items():
        prof = decay_profile(C, "j", q, endpoint="min")
        extra = {"source_constant": decay_profile(C, "j", q).constant,
                 "dcomm_constant": decay_profile(CD, "j", q, endpoint="min").constant,
                 "maxima": list(prof.maxima)}
        rec(f"j-decay[{a},{b}]", "commutant-j-decay", prof.constant, 10.0, prof.constant, 10.0, extra=extra)
        sym1 = max(sym1, _max_entry((comms[(b, a)][0] + conjugate(J, C)).matrix, cols))
        sym2 = max(sym2, _max_entry((comms[(_star(a), _star(b))][0] + C.H).matrix, cols))
    rec("symmetry[b,JaJ^-1]=-J[a,JbJ^-1]J^-1", "commutant-symmetries", sym1, 0.0, sym1, 1e-10)
    rec("symmetry[a*,Jb*J^-1]=-[a,JbJ^-1]*", "commutant-symmetries", sym2, 0.0, sym2, 1e-10)
    A, B = reg["x2"], reg["x2"]
    JBJ = (J @ B) @ J
    conv = _max_entry((A @ JBJ - JBJ @ A + C22).matrix)
    rec("convention JbJ=-JbJ^-1", "commutant-symmetries", conv, 0.0, conv, 1e-12)

    for a, b in (("x2", "x2"), ("x2*", "x2")):
        prof = decay_profile(comms[(a, b)][0], "l", q)
        rec(f"l-decay-rate[{a},{b}]", "commutant-l-decay", prof.rate, 1.9, max(0.0, 1.9 - prof.rate), 0.0,
            extra={"goodness": prof.goodness, "maxima": list(prof.maxima)})

    sm = smoothing_check(lambda S: commutant_ops("x2", "x2", S, q)[1], cutoffs, k_max, q)
    rec(f"smoothing[[D,x2],Jx2J^-1],k<={k_max}", "smoothing-uniform-bounds", sm.increment, 0.0, sm.increment,
        sm.tolerance, extra={"norms": {str(k): list(v) for k, v in sm.norms.items()}},
        cutoff=",".join(sm.cutoffs))
    wit = operator_norm(C22, cols)
    rec("witness||[x2,Jx2J^-1]||", "commutant-nonvanishing", wit, 1e-6, 0.0 if wit > 1e-6 else 1e-6 - wit, 0.0,
        passed=wit > 1e-6)
    return out
