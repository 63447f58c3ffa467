"""Dirac operator, zeta traces and residues from level sums.

Residues of ``zeta_w(s) = sum_xi w(xi) |D|^{-s}`` are read off the level
sums ``g(n) = sum_{|D| = n} w``: when ``g(n) = a3 n^3 + a2 n^2 + a1 n + a0``
up to an exponentially small remainder, ``zeta_w`` has residue ``a_k`` at
``s = k + 1``. The fit uses four equally spaced levels, is checked at a
fifth, and is accepted once raising the levels no longer moves it.

Diagonal weights are stored as sums of separable pieces
``left(j, m1) * right(l, j, m2, s)``. Every generator coefficient factors
that way, and so does admissibility of a label, so a level sum costs
O(l^2) instead of O(l^3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .basis import TruncatedSpace, dim_spinor_level, two_epsilon
from .operators import SparseOperator, Term, build_operator
from .qnum import QContext
from .report import CheckRecord
from .representations import factored_terms

__all__ = [
    "dirac",
    "delta_commutator",
    "leibniz_residual",
    "riemann_zeta",
    "ZetaValue",
    "zeta_trace",
    "multiplicities",
    "DiagonalWeight",
    "constant_weight",
    "lq_weight",
    "norm_weight",
    "pi_tilde_x2x2s_weight",
    "hat_monomial_weight",
    "hat_monomial_coefficients",
    "weight_on_space",
    "level_sum",
    "ResidueFit",
    "residue_fit",
    "sigma_integral",
    "top_residue",
    "zeta_suite",
]


def _qv(ctx) -> float:
    return ctx.q if isinstance(ctx, QContext) else float(ctx)


# -- D, |D|, delta ---------------------------------------------------------------------

def dirac(space: TruncatedSpace) -> tuple[SparseOperator, SparseOperator]:
    """``D`` swaps the sign with weight ``l + 3/2``; ``|D|`` is the weight."""
    if space.family != "spinor" or set(space.chiralities) != {1, -1}:
        raise ValueError("dirac needs a spinor space with both chiralities")
    D = build_operator(space, [Term((0, 0, 0, 0), lambda L: L.l + 1.5, flip=True)], name="D")
    absD = SparseOperator.diagonal(space, space.l + 1.5, name="|D|")
    return D, absD


def delta_commutator(a: SparseOperator) -> SparseOperator:
    """``[|D|, a]``: every matrix element scaled by its level change."""
    m = a.matrix.tocoo()
    two_dl = a.codomain.two_l[m.row] - a.domain.two_l[m.col]
    out = sp.csr_matrix((m.data * (two_dl / 2.0), (m.row, m.col)), shape=m.shape)
    out.eliminate_zeros()
    return SparseOperator(out, a.domain, a.codomain, name=f"delta({a.name})")


def leibniz_residual(a: SparseOperator, D: SparseOperator, absD: SparseOperator, F: SparseOperator,
                     depth: float = 1.0) -> float:
    """Max column norm of ``[D,a] - delta(a) F - |D| [F,a]`` on the interior."""
    lhs = D @ a - a @ D
    rhs = delta_commutator(a) @ F + absD @ (F @ a - a @ F)
    diff = (lhs - rhs).matrix.tocsc()[:, np.flatnonzero(a.domain.interior(depth))]
    if diff.nnz == 0:
        return 0.0
    return float(np.sqrt(np.asarray(abs(diff).power(2).sum(axis=0))).max())


# -- Riemann zeta and Tr |D|^{-s} ----------------------------------------------------------

def _falling(c: complex, k: int) -> complex:
    out = 1.0 + 0j
    for i in range(k):
        out *= c - i
    return out


def _power_tail(coefs: dict[int, float], s: complex, N: int) -> tuple[complex, float]:
    """Euler-Maclaurin estimate of ``sum_{n > N} f(n)``, ``f = sum_a c_a n^{a - s}``.

    Keeps the B2 and B4 corrections; the bound is the standard remainder
    ``2 zeta(6)/(2 pi)^6 * int |f^{(6)}|`` with the integral closed in form.
    """
    est = 0j
    bound = 0.0
    for a, c in coefs.items():
        e = a - s  # exponent of n
        if (e + 1).real >= 0:
            raise ValueError("tail does not converge")
        integral = -(N ** (e + 1)) / (e + 1)
        f = N**e
        d1 = e * N ** (e - 1)
        d3 = _falling(e, 3) * N ** (e - 3)
        # sum_{n>N} f(n) = int_N^inf f - f(N)/2 - f'(N)/12 + f'''(N)/720 - ...
        est += c * (integral - f / 2 - d1 / 12 + d3 / 720)
        d6 = abs(_falling(e, 6)) * N ** ((e - 6).real)
        bound += abs(c) * d6 * N / max(1.0, abs((e - 5).real))
    bound *= 2 * 1.0173430619844491 / (2 * math.pi) ** 6
    return est, bound


def riemann_zeta(s: complex, N: int = 1000) -> tuple[complex, float]:
    """``zeta(s)`` for ``Re s > 1`` by direct summation plus a certified tail."""
    if complex(s).real <= 1:
        raise ValueError("riemann_zeta needs Re s > 1")
    n = np.arange(1, N + 1, dtype=float)
    terms = n ** (-complex(s))
    head = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
    tail, bound = _power_tail({0: 1.0}, complex(s), N)
    return head + tail, bound + 1e-15 * abs(head)


@dataclass(frozen=True)
class ZetaValue:
    value: complex
    tail_bound: float
    cutoff_n: int


def zeta_trace(s: complex, N: int = 2000) -> ZetaValue:
    """``Tr |D|^{-s}`` as a sum over the spectrum ``n = 2..N`` plus a tail.

    The multiplicity of ``n`` is ``2 dim V_{n - 3/2} = (4/3)(n^3 - n)``.
    """
    s = complex(s)
    if s.real <= 4:
        raise ValueError("Tr |D|^{-s} converges only for Re s > 4")
    n = np.arange(2, N + 1, dtype=float)
    terms = (4.0 / 3.0) * (n**3 - n) * n ** (-s)
    head = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
    tail, bound = _power_tail({3: 4.0 / 3.0, 1: -4.0 / 3.0}, s, N)
    return ZetaValue(head + tail, bound + 1e-15 * abs(head), N)


def multiplicities(space: TruncatedSpace) -> dict[int, int]:
    """Counts of basis vectors per eigenvalue ``n = l + 3/2`` of |D|."""
    n2 = space.two_l + 3
    vals, counts = np.unique(n2, return_counts=True)
    return {int(v) // 2: int(c) for v, c in zip(vals, counts)}


# -- diagonal weights -------------------------------------------------------------------------

Left = Callable[[np.ndarray, np.ndarray], np.ndarray]  # (two_j, two_m1)
Right = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]  # (two_l, two_j, two_m2, s)


@dataclass(frozen=True)
class DiagonalWeight:
    """A diagonal operator on the spinor space, as a sum of separable pieces.

    Each piece maps doubled label arrays to values; the weight of a label is
    ``sum_p left_p(2j, 2m1) * right_p(2l, 2j, 2m2, s)``.
    """

    name: str
    pieces: tuple[tuple[Left, Right], ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __add__(self, other: "DiagonalWeight") -> "DiagonalWeight":
        return DiagonalWeight(f"{self.name}+{other.name}", self.pieces + other.pieces)

    def scaled(self, c: float, name: str | None = None) -> "DiagonalWeight":
        return DiagonalWeight(name or f"{c}*{self.name}",
                              tuple((lf, (lambda *a, r=r: c * r(*a))) for lf, r in self.pieces))


def _ones_left(tj, tm1):
    return np.ones(np.shape(tj))


def _ones_right(tl, tj, tm2, s):
    return np.ones(np.shape(tj))


def constant_weight() -> DiagonalWeight:
    return DiagonalWeight("1", ((_ones_left, _ones_right),))


def lq_weight(ctx) -> DiagonalWeight:
    """``q^{j + 1/2}`` on the + chirality only (the L_q operator lives on one copy)."""
    q = _qv(ctx)
    return DiagonalWeight(
        "L_q", ((lambda tj, tm1: q ** ((tj + 1) / 2.0), lambda tl, tj, tm2, s: (s > 0).astype(float)),)
    )


def pi_tilde_x2x2s_weight(ctx) -> DiagonalWeight:
    """Diagonal of the approximant of x2 x2*: ``1 - q^{2(l - eps - j + m2)}``."""
    q = _qv(ctx)

    def right(tl, tj, tm2, s):
        te = two_epsilon(tl, tm2, tj)
        return 1 - q ** (tl - te - tj + tm2).astype(float)

    return DiagonalWeight("pi~(x2x2*)", ((_ones_left, right),))


def hat_monomial_weight(n: int, k: int, ctx) -> DiagonalWeight:
    """``q^{n(l - j + m2 - eps) + 2k(j + m1)}`` for P (beta beta*)^k A^n Q."""
    q = _qv(ctx)

    def left(tj, tm1):
        return q ** (k * (tj + tm1).astype(float))

    def right(tl, tj, tm2, s):
        te = two_epsilon(tl, tm2, tj)
        return q ** (n * (tl - tj + tm2 - te) / 2.0)

    return DiagonalWeight(f"T(n={n},k={k})", ((left, right),))


def hat_monomial_coefficients(n: int, k: int, ctx) -> tuple[float, float, float, float]:
    """Exact ``(a3, a2, a1, a0)`` for :func:`hat_monomial_weight`.

    From the closed-form level sums with ``a = q^{2k}``, ``b = q^{4k}``,
    ``r = q^{2n}``; the dropped pieces are exponentially small in n.
    """
    q = _qv(ctx)
    a, b, r = q ** (2 * k), q ** (4 * k), q ** (2 * n)
    if n == 0 and k == 0:
        return (4 / 3, 0.0, -4 / 3, 0.0)
    if n == 0:
        c = 4 / (1 - a)
        return (0.0, c / 2, -c * (0.5 + b / (1 - b)), c * b / (1 - b) ** 2)
    if k == 0:
        c = 4 / (1 - r)
        return (0.0, c, -c * (1 + 2 * r / (1 - r)), c * 2 * r / (1 - r) ** 2)
    c = 4 / ((1 - a) * (1 - r))
    return (0.0, 0.0, c, -c * (1 + b / (1 - b) + r / (1 - r)))


def _left_ok(tj, tm1):
    return (tj >= 1) & (np.abs(tm1) <= tj) & ((tj - tm1) % 2 == 0)


def _right_ok(tl, tj, tm2):
    budget = tl + 1 - tj
    return (tl >= 1) & (tl % 2 == 1) & (tj >= 1) & (tj <= tl) & (np.abs(tm2) <= budget) & ((budget - tm2) % 2 == 0)


def norm_weight(x: str, ctx, adjoint: bool = False) -> DiagonalWeight:
    """Diagonal of ``x* x`` (``|x xi|^2``) or, with ``adjoint``, of ``x x*``.

    ``x`` is an unstarred generator. For ``x x*`` the weight at xi collects
    the squared amplitudes of all terms that land on xi from an admissible
    source, evaluated at that source.
    """
    q = _qv(ctx)
    pieces = []
    for t in factored_terms("spinor", x, q):
        dl, dm1, dm2, dj = t.shift
        sgn = -1 if adjoint else 1

        def left(tj, tm1, t=t, dm1=dm1, dj=dj, sgn=sgn):
            sj, sm1 = (tj - dj, tm1 - dm1) if sgn < 0 else (tj, tm1)
            oj, om1 = (tj + dj, tm1 + dm1) if sgn > 0 else (sj, sm1)
            ok = _left_ok(oj, om1)
            out = np.zeros(np.shape(tj))
            if ok.any():
                out[ok] = np.abs(t.left(sj[ok] / 2.0, sm1[ok] / 2.0)) ** 2
            return out

        def right(tl, tj, tm2, s, t=t, dl=dl, dm2=dm2, dj=dj, sgn=sgn):
            sl, sj, sm2 = (tl - dl, tj - dj, tm2 - dm2) if sgn < 0 else (tl, tj, tm2)
            ol, oj, om2 = (tl + dl, tj + dj, tm2 + dm2) if sgn > 0 else (sl, sj, sm2)
            ok = _right_ok(ol, oj, om2)
            out = np.zeros(np.shape(tj))
            if ok.any():
                out[ok] = np.abs(t.right(sl[ok] / 2.0, sj[ok] / 2.0, sm2[ok] / 2.0, s[ok])) ** 2
            return out

        pieces.append((left, right))
    name = f"{x}{x}*" if adjoint else f"{x}*{x}"
    return DiagonalWeight(name, tuple(pieces))


def weight_on_space(w: DiagonalWeight, space: TruncatedSpace) -> np.ndarray:
    """Evaluate a weight on every basis vector of an explicit spinor space."""
    s = space.chirality.astype(float)
    out = np.zeros(space.dim)
    for left, right in w.pieces:
        out += left(space.two_j, space.two_m1) * right(space.two_l, space.two_j, space.two_m2, s)
    return out


def _level_grids(two_l: int):
    tj1, tm1, g1, tj2, tm2, g2 = [], [], [], [], [], []
    for gi, tj in enumerate(range(1, two_l + 1, 2)):
        m1 = np.arange(-tj, tj + 1, 2)
        b = two_l + 1 - tj
        m2 = np.arange(-b, b + 1, 2)
        tj1.append(np.full(m1.size, tj)), tm1.append(m1), g1.append(np.full(m1.size, gi))
        tj2.append(np.full(m2.size, tj)), tm2.append(m2), g2.append(np.full(m2.size, gi))
    cat = lambda a: np.concatenate(a).astype(np.int64)
    return cat(tj1), cat(tm1), cat(g1), cat(tj2), cat(tm2), cat(g2), (two_l + 1) // 2


def level_sum(w: DiagonalWeight, n: int) -> float:
    """``g(n)``: the weight summed over the |D| = n eigenspace, both signs."""
    if n < 2:
        raise ValueError("spectrum of |D| starts at n = 2")
    two_l = 2 * n - 3
    tj1, tm1, g1, tj2, tm2, g2, nj = _level_grids(two_l)
    tl2 = np.full(tj2.size, two_l, dtype=np.int64)
    parts = []
    for s in (1.0, -1.0):
        sv = np.full(tj2.size, s)
        for left, right in w.pieces:
            lsum = np.bincount(g1, weights=left(tj1, tm1), minlength=nj)
            rsum = np.bincount(g2, weights=right(tl2, tj2, tm2, sv), minlength=nj)
            parts.extend((lsum * rsum).tolist())
    return math.fsum(parts)


# -- residue fit ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidueFit:
    """``g(n) ~ a3 n^3 + a2 n^2 + a1 n + a0``; residues at s = 4, 3, 2, 1."""

    a3: float
    a2: float
    a1: float
    a0: float
    fit_levels: tuple[int, ...]
    certificate: float
    held_out: float

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.a3, self.a2, self.a1, self.a0)

    def residue(self, s: int) -> float:
        return {4: self.a3, 3: self.a2, 2: self.a1, 1: self.a0}[s]


def _cubic_through(levels: Sequence[int], g: Sequence[float]) -> np.ndarray:
    """Coefficients (a0..a3) of the cubic through four equally spaced levels.

    Solved in the scaled variable ``t = (n - N)/d`` (t = 0..3, well
    conditioned), then re-expanded in powers of n.
    """
    N, d = levels[0], levels[1] - levels[0]
    t = np.arange(4.0)
    b = np.linalg.solve(np.vander(t, 4, increasing=True), np.asarray(g, dtype=float))
    # p(n) = sum_k b_k ((n - N)/d)^k
    a = np.zeros(4)
    for k in range(4):
        for i in range(k + 1):
            a[i] += b[k] / d**k * math.comb(k, i) * (-N) ** (k - i)
    return a


def _eval_cubic(a, n):
    return a[0] + a[1] * n + a[2] * n**2 + a[3] * n**3


def residue_fit(w: DiagonalWeight, ctx=None, *, N_start: int = 4, N_max: int = 2000,
                cert_rel: float = 1e-12) -> ResidueFit:
    """Fit the level-sum asymptotics, raising the base level until stable.

    Fits use the levels ``N + i d`` (i = 0..3, ``d = max(1, N // 2)``); the
    spread keeps the re-expansion in powers of n well conditioned. A fit is
    accepted when each term ``a_k n^k`` at the held-out level ``N + 4d``
    moved by at most ``cert_rel * max(1, |g|)`` since the previous base
    level. The reported certificate is ``|g(N + 4d) - cubic(N + 4d)|``.
    """
    cache: dict[int, float] = {}

    def g(n):
        if n not in cache:
            cache[n] = level_sum(w, n)
        return cache[n]

    N = max(2, N_start)
    prev = None
    while N <= N_max:
        d = max(1, N // 2)
        levels = tuple(N + i * d for i in range(4))
        a = _cubic_through(levels, [g(n) for n in levels])
        held = N + 4 * d
        gh = g(held)
        cert = abs(gh - _eval_cubic(a, held))
        scale = cert_rel * max(1.0, abs(gh))
        if prev is not None and all(abs(a[k] - prev[k]) * held**k <= scale for k in range(4)) and cert <= scale:
            return ResidueFit(a[3], a[2], a[1], a[0], levels, cert, float(gh))
        prev = a
        N = N + max(1, N // 4)
    raise RuntimeError(
        f"residue_fit({w.name}): no stable fit by N={N_max}; last coefficients {prev[::-1].tolist()}"
    )


# -- top residue -------------------------------------------------------------------------------

_SIGMA_DEGREE = {"x2": 1, "x2*": -1}


def sigma_integral(word: Sequence[str]) -> float:
    """``2/(3 pi) * int sigma(a) dtheta`` for a word of generators.

    ``sigma`` kills x0, x1, x1* and sends x2 to u; only u^0 integrates to
    2 pi, so the result is 4/3 or 0.
    """
    deg = 0
    for g in word:
        if g not in _SIGMA_DEGREE:
            return 0.0
        deg += _SIGMA_DEGREE[g]
    return 4.0 / 3.0 if deg == 0 else 0.0


def _word_weight(word: Sequence[str], q: float) -> DiagonalWeight:
    word = tuple(word)
    if not word:
        return constant_weight()
    if len(word) == 2:
        a, b = word
        if a == "x0" and b == "x0":
            return norm_weight("x0", q)
        if b == a + "*":
            return norm_weight(a, q, adjoint=True)
        if a == b + "*":
            return norm_weight(b, q)
    raise NotImplementedError(f"diagonal weight for word {word!r} not supported (use 1, x x*, x* x, x0 x0)")


def top_residue(word: Sequence[str], ctx) -> tuple[float, float, ResidueFit]:
    """``a3`` of the word's diagonal weight and the classical-points integral."""
    q = _qv(ctx)
    fit = residue_fit(_word_weight(word, q))
    return fit.a3, sigma_integral(word), fit


# -- suite --------------------------------------------------------------------------------------

def zeta_suite(ctx, space: TruncatedSpace | None = None) -> list[CheckRecord]:
    from .basis import enumerate_space

    q = _qv(ctx)
    out = []

    def rec(cid, anchor, value, expected, residual, tol, cutoff=None, qq=q):
        out.append(CheckRecord("zeta", cid, anchor, qq, cutoff, value, expected, residual, tol, residual <= tol))

    if space is None:
        space = enumerate_space("spinor", "25/2")
    mult = multiplicities(space)
    bad = max(abs(c - (4 * (n**3 - n)) // 3) for n, c in mult.items())
    rec("multiplicities", "dirac-spectrum", len(mult), len(mult), float(bad), 0.0, str(space.L))

    z3, b3 = riemann_zeta(3)
    z5, b5 = riemann_zeta(5)
    zt = zeta_trace(6)
    expected = 4 / 3 * (z3 - z5).real
    rec("zeta_trace(6)", "dirac-zeta-closed-form", zt.value.real, expected, abs(zt.value - expected), 1e-8)

    f1 = residue_fit(constant_weight())
    err = max(abs(x - y) for x, y in zip(f1.coefficients, (4 / 3, 0.0, -4 / 3, 0.0)))
    rec("residue_fit(1)", "dirac-zeta-closed-form", list(f1.coefficients), [4 / 3, 0, -4 / 3, 0], err, 1e-10)

    fl = residue_fit(lq_weight(q))
    rec("residue_fit(L_q).a1", "lq-zeta-residue", fl.a1, 4 * q / (1 - q) ** 2, abs(fl.a1 - 4 * q / (1 - q) ** 2), 1e-8)

    fx = residue_fit(norm_weight("x2", q, adjoint=True))
    rec("residue_fit(x2x2*).a3", "x2x2-zeta-residues", fx.a3, 4 / 3, abs(fx.a3 - 4 / 3), 1e-6)
    a2 = -4 / (1 - q**4)
    rec("residue_fit(x2x2*).a2", "x2x2-zeta-residues", fx.a2, a2, abs(fx.a2 - a2), 1e-6)

    t0, expect0, _ = top_residue(("x0", "x0"), q)
    rec("top_residue(x0^2)", "top-residue-classical-points", t0, expect0, abs(t0 - expect0), 1e-6)
    return out
