"""Relations of the orthogonal quantum 4-sphere and its crossed product.

The module has three layers:

* a word-level relation harness (``check_relation``) that evaluates sums of
  products of represented generators on the interior of a truncated space;
* the relation catalogues (defining, crossed, radius);
* the degree <= 1 algebra (``AffineElement``) carrying the Hopf action, the
  idempotent ``e`` and its covariance identities, checked coefficient-wise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .basis import BasisLabel, TruncatedSpace
from .operators import SparseOperator
from .qnum import QContext, q_number
from .report import CheckRecord
from .representations import ALGEBRA_GENERATORS, algebra_generator
from .uqso5 import GENERATORS as UQ_GENERATORS
from .uqso5 import HOPF_TABLE, antipode_star, rep_generator

__all__ = [
    "Product",
    "prod",
    "OperatorRegistry",
    "RelationReport",
    "check_relation",
    "defining_relations",
    "crossed_relations",
    "radius_relation",
    "uq_relations",
    "relations_suite",
    "AFFINE_BASIS",
    "AffineElement",
    "AffineMatrix",
    "hopf_action",
    "kappa",
    "idempotent_e",
    "sigma_spin",
    "covariance_check_e",
    "represent_e",
    "block_operator",
    "idempotent_suite",
    "highest_weight_checks",
]


def _qv(ctx) -> float:
    return ctx.q if isinstance(ctx, QContext) else float(ctx)


def _tol(ctx, tol):
    if tol is not None:
        return tol
    return ctx.tol_relation if isinstance(ctx, QContext) else 1e-9


# -- word-level harness ----------------------------------------------------------

@dataclass(frozen=True)
class Product:
    """``coef * names[0] @ names[1] @ ...``; the empty product is the identity."""

    coef: complex
    names: tuple[str, ...]


def prod(*names: str, c: complex = 1.0) -> Product:
    return Product(c, tuple(names))


Expr = Sequence[Product]


class OperatorRegistry:
    """Lazily built, cached generators (algebra and U_q side) on one space."""

    def __init__(self, space: TruncatedSpace, ctx, algebra=None):
        self.space = space
        self.ctx = ctx
        self._algebra = algebra or (lambda x: algebra_generator(x, space, ctx))
        self._cache: dict[str, SparseOperator] = {}

    def __getitem__(self, name: str) -> SparseOperator:
        op = self._cache.get(name)
        if op is None:
            if name in ALGEBRA_GENERATORS:
                op = self._algebra(name)
            elif name in UQ_GENERATORS:
                op = rep_generator(name, self.space, self.ctx)
            else:
                raise KeyError(f"unregistered generator {name!r}")
            self._cache[name] = op
        return op

    def evaluate(self, product: Product) -> SparseOperator:
        op = SparseOperator.identity(self.space)
        for n in product.names:
            op = op @ self[n]
        return op * product.coef

    def depth(self, expr: Expr) -> float:
        return max((sum(self[n].shift_radius for n in p.names) for p in expr), default=0.0)


@dataclass(frozen=True)
class RelationReport:
    """Outcome of one relation check.

    ``residual`` is the largest Euclidean norm of a column of ``lhs - rhs``
    over the interior; ``scale`` is the largest such norm of any single
    product term, floored at 1. The check passes when
    ``residual <= tol * scale``.
    """

    name: str
    residual: float
    scale: float
    depth: float
    columns: int
    tolerance: float

    @property
    def relative(self) -> float:
        return self.residual / self.scale

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance * self.scale)


def _max_col_norm(m, cols) -> float:
    sub = m.tocsc()[:, cols]
    if sub.nnz == 0:
        return 0.0
    return float(np.sqrt(np.asarray(abs(sub).power(2).sum(axis=0))).max())


def check_relation(
    lhs: Expr,
    rhs: Expr,
    space: TruncatedSpace | None = None,
    ctx=None,
    *,
    registry: OperatorRegistry | None = None,
    name: str = "",
    tol: float | None = None,
    depth: float | None = None,
    mask: np.ndarray | None = None,
) -> RelationReport:
    """Check ``sum(lhs) == sum(rhs)`` on columns with ``l <= L - depth``.

    ``depth`` defaults to the largest total shift radius over the products;
    ``mask`` further restricts the columns (e.g. to one chirality).
    Raises ``ValueError`` when no column survives.
    """
    if registry is None:
        registry = OperatorRegistry(space, ctx)
    space, ctx = registry.space, registry.ctx
    if depth is None:
        depth = max(registry.depth(lhs), registry.depth(rhs))
    keep = space.interior(depth)
    if mask is not None:
        keep = keep & mask
    cols = np.flatnonzero(keep)
    if cols.size == 0:
        raise ValueError(f"relation {name or '?'}: empty interior at cutoff {space.L} for depth {depth}")
    terms = [registry.evaluate(p) for p in lhs] + [-registry.evaluate(p) for p in rhs]
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    scale = max([1.0] + [_max_col_norm(t.matrix, cols) for t in terms])
    return RelationReport(name, _max_col_norm(total.matrix, cols), scale, depth, int(cols.size), _tol(ctx, tol))


# -- relation catalogues -----------------------------------------------------------

def defining_relations(q: float) -> list[tuple[str, Expr, Expr]]:
    """The defining relations, one entry per instance, grouped by family name."""
    q2 = q * q
    out = []
    for a, b in (("x0", "x1"), ("x0", "x2"), ("x1", "x2")):
        out.append((f"commute:{a}{b}", [prod(a, b)], [prod(b, a, c=q2)]))
    for a, b in (("x1*", "x0"), ("x1*", "x2"), ("x2*", "x0"), ("x2*", "x1")):
        out.append((f"commute:{a}{b}", [prod(a, b)], [prod(b, a, c=q2)]))
    out.append(("x0-selfadjoint", [prod("x0")], [prod("x0*")]))
    out.append(("[x1*,x1]", [prod("x1*", "x1"), prod("x1", "x1*", c=-1)], [prod("x0", "x0", c=1 - q**4)]))
    out.append(
        ("[x2*,x2]", [prod("x2*", "x2"), prod("x2", "x2*", c=-1)], [prod("x1*", "x1"), prod("x1", "x1*", c=-(q**4))])
    )
    out.append(("sphere", [prod("x0", "x0"), prod("x1", "x1*"), prod("x2", "x2*")], [prod()]))
    return out


def radius_relation(q: float) -> tuple[str, Expr, Expr]:
    return ("radius", [prod("x0", "x0", c=q**8), prod("x1*", "x1", c=q**4), prod("x2*", "x2")], [prod()])


def crossed_relations(q: float) -> list[tuple[str, Expr, Expr]]:
    """The 18 relations ``h x = (h_(1) |> x) h_(2)`` for generators h, x."""
    r = q**-0.5
    b2 = float(q_number(2, q))
    P = prod
    return [
        ("K1x0", [P("K1", "x0")], [P("x0", "K1")]),
        ("K1x1", [P("K1", "x1")], [P("x1", "K1", c=q)]),
        ("K1x2", [P("K1", "x2")], [P("x2", "K1")]),
        ("K2x0", [P("K2", "x0")], [P("x0", "K2")]),
        ("K2x1", [P("K2", "x1")], [P("x1", "K2", c=1 / q)]),
        ("K2x2", [P("K2", "x2")], [P("x2", "K2", c=q)]),
        ("E1x0", [P("E1", "x0")], [P("x0", "E1"), P("x1", "K1", c=r)]),
        ("E1x1", [P("E1", "x1")], [P("x1", "E1", c=1 / q)]),
        ("E1x2", [P("E1", "x2")], [P("x2", "E1")]),
        ("F1x0", [P("F1", "x0")], [P("x0", "F1"), P("K1", "x1*", c=-r)]),
        ("F1x1", [P("F1", "x1")], [P("x1", "F1", c=1 / q), P("x0", "K1", c=q**0.5 * b2)]),
        ("F1x2", [P("F1", "x2")], [P("x2", "F1")]),
        ("E2x0", [P("E2", "x0")], [P("x0", "E2")]),
        ("E2x1", [P("E2", "x1")], [P("x1", "E2", c=q), P("x2", "K2")]),
        ("E2x2", [P("E2", "x2")], [P("x2", "E2", c=1 / q)]),
        ("F2x0", [P("F2", "x0")], [P("x0", "F2")]),
        ("F2x1", [P("F2", "x1")], [P("x1", "F2", c=q)]),
        ("F2x2", [P("F2", "x2")], [P("x2", "F2", c=1 / q), P("x1", "K2")]),
    ]


def uq_relations(q: float) -> list[tuple[str, Expr, Expr]]:
    """Commutation, K-conjugation and Serre relations of U_q(so(5))."""
    P = prod
    out = []
    for i in (1, 2):
        K, Ki, E, F = f"K{i}", f"K{i}inv", f"E{i}", f"F{i}"
        d = q**i - q**-i
        out.append((f"[{E},{F}]", [P(E, F), P(F, E, c=-1)], [P(K, K, c=1 / d), P(Ki, Ki, c=-1 / d)]))
        out.append((f"{K}{K}inv", [P(K, Ki)], [P()]))
    out.append(("[E1,F2]", [P("E1", "F2")], [P("F2", "E1")]))
    out.append(("[E2,F1]", [P("E2", "F1")], [P("F1", "E2")]))
    # K_i E_j = q^{w} E_j K_i, w read off from the weights of E_j
    for i, j, w in ((1, 1, 1.0), (1, 2, -1.0), (2, 1, -1.0), (2, 2, 2.0)):
        out.append((f"K{i}E{j}", [P(f"K{i}", f"E{j}")], [P(f"E{j}", f"K{i}", c=q**w)]))
    b3 = float(q_number(3, q))
    c2 = q**2 + q**-2
    out.append(("serre:E2E2E1", [P("E2", "E2", "E1"), P("E2", "E1", "E2", c=-c2), P("E1", "E2", "E2")], []))
    out.append(
        (
            "serre:E1E1E1E2",
            [
                P("E1", "E1", "E1", "E2"),
                P("E1", "E1", "E2", "E1", c=-b3),
                P("E1", "E2", "E1", "E1", c=b3),
                P("E2", "E1", "E1", "E1", c=-1),
            ],
            [],
        )
    )
    return out


def _family_instances(space: TruncatedSpace):
    if space.family in ("spinor", "simple"):
        tag = space.family
        return [(f"{tag}{'+' if c > 0 else '-'}", space.chirality_mask(c)) for c in space.chiralities]
    return [(space.family, None)]


def relations_suite(space: TruncatedSpace, ctx, tol: float | None = None, include=("defining", "crossed", "radius")):
    """Run the catalogues on one space; returns ``CheckRecord`` objects.

    The two spinor (and the two simple) representations are reported
    separately by restricting columns to one sign; the operators act
    block-diagonally so this is the same as building each one alone. The
    simple family has no U_q action and no radius identity.
    """
    q = _qv(ctx)
    cutoff = str(space.L)
    records = []
    reg = OperatorRegistry(space, ctx)
    for label, mask in _family_instances(space):
        cats = []
        if "defining" in include:
            cats.append(("defining", "algebra-defining-relations", defining_relations(q)))
        if "crossed" in include and space.family != "simple":
            cats.append(("crossed", "crossed-product-relations", crossed_relations(q)))
        if "radius" in include and space.family != "simple":
            cats.append(("radius", "radius-identity", [radius_relation(q)]))
        if "uq" in include and space.family != "simple":
            cats.append(("uq", "uqso5-relations", uq_relations(q)))
        for cat, anchor, rels in cats:
            for name, lhs, rhs in rels:
                # x0* is x0 by construction; the entry documents self-adjointness
                if "x0*" in {n for p in list(lhs) + list(rhs) for n in p.names}:
                    op = reg["x0"]
                    cols = np.arange(space.dim) if mask is None else np.flatnonzero(mask)
                    res = _max_col_norm((op - op.H).matrix, cols)
                    rep = RelationReport(name, res, 1.0, 0.0, cols.size, _tol(ctx, tol))
                else:
                    rep = check_relation(lhs, rhs, registry=reg, name=name, tol=tol, mask=mask)
                records.append(
                    CheckRecord(
                        "relations",
                        f"{label}:{cat}:{name}",
                        anchor,
                        q,
                        cutoff,
                        rep.relative,
                        0.0,
                        rep.relative,
                        rep.tolerance,
                        rep.passed,
                        {"absolute": rep.residual, "scale": rep.scale, "columns": rep.columns},
                    )
                )
    return records


# ============================================================================
# degree <= 1 algebra, Hopf action, idempotent
# ============================================================================

AFFINE_BASIS = ("1", "x0", "x1", "x1*", "x2", "x2*")
_IDX = {n: i for i, n in enumerate(AFFINE_BASIS)}
_STAR_PERM = np.array([_IDX[n] for n in ("1", "x0", "x1*", "x1", "x2*", "x2")])


@dataclass(frozen=True, eq=False)
class AffineElement:
    """``c_0 + c_1 x0 + c_2 x1 + c_3 x1* + c_4 x2 + c_5 x2*``."""

    coef: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coef, dtype=complex)
        if c.shape != (6,):
            raise ValueError("AffineElement needs 6 coefficients")
        object.__setattr__(self, "coef", c)

    @classmethod
    def of(cls, **terms) -> "AffineElement":
        """``AffineElement.of(one=1, x1=q)``; starred names use ``x1s``/``x2s``."""
        c = np.zeros(6, complex)
        for k, v in terms.items():
            c[_IDX[{"one": "1", "x1s": "x1*", "x2s": "x2*"}.get(k, k)]] += v
        return cls(c)

    def star(self) -> "AffineElement":
        return AffineElement(np.conj(self.coef[_STAR_PERM]))

    def __add__(self, o):
        return AffineElement(self.coef + o.coef)

    def __sub__(self, o):
        return AffineElement(self.coef - o.coef)

    def __mul__(self, s):
        return AffineElement(self.coef * s)

    __rmul__ = __mul__

    def represent(self, registry: OperatorRegistry) -> SparseOperator:
        op = SparseOperator.identity(registry.space) * self.coef[0]
        for n, c in zip(AFFINE_BASIS[1:], self.coef[1:]):
            if c != 0:
                op = op + registry[n] * c
        return op

    def __repr__(self):
        parts = [f"{c:.6g}*{n}" for n, c in zip(AFFINE_BASIS, self.coef) if c != 0]
        return "AffineElement(" + (" + ".join(parts) or "0") + ")"


def _unstarred_action(h: str, q: float) -> dict[str, dict[str, complex]]:
    """``h |> x_i`` for the unstarred generators, from the module-algebra table."""
    b2 = float(q_number(2, q))
    if h == "K1":
        return {"x0": {"x0": 1.0}, "x1": {"x1": q}, "x2": {"x2": 1.0}}
    if h == "K2":
        return {"x0": {"x0": 1.0}, "x1": {"x1": 1 / q}, "x2": {"x2": q}}
    if h in ("K1inv", "K2inv"):
        fwd = _unstarred_action(h[:2], q)
        return {x: {k: 1 / v for k, v in d.items()} for x, d in fwd.items()}
    if h == "E1":
        return {"x0": {"x1": q**-0.5}}
    if h == "E2":
        return {"x1": {"x2": 1.0}}
    if h == "F1":
        return {"x1": {"x0": q**0.5 * b2}, "x0": {"x1*": -(q**-1.5)}}
    if h == "F2":
        return {"x2": {"x1": 1.0}}
    raise KeyError(h)


def _action_matrix(h: str, q: float) -> np.ndarray:
    """6x6 matrix M with ``h |> a`` having coefficients ``M @ a.coef``.

    Starred columns use ``h |> a* = (S(h)^* |> a)^*``.
    """
    if h not in HOPF_TABLE:
        raise KeyError(f"unknown U_q(so(5)) generator {h!r}")
    M = np.zeros((6, 6), complex)
    M[0, 0] = HOPF_TABLE[h].counit
    for x, image in _unstarred_action(h, q).items():
        for y, c in image.items():
            M[_IDX[y], _IDX[x]] += c
    s, g = antipode_star(h, q)
    for x in ("x1", "x2"):
        img = AffineElement(np.eye(6)[_IDX[x]])
        inner = AffineElement(s * _unstarred_matrix(g, q) @ img.coef).star()
        M[:, _IDX[x + "*"]] = inner.coef
    return M


def _unstarred_matrix(h: str, q: float) -> np.ndarray:
    M = np.zeros((6, 6), complex)
    for x, image in _unstarred_action(h, q).items():
        for y, c in image.items():
            M[_IDX[y], _IDX[x]] += c
    return M


def hopf_action(h: str, a: AffineElement, ctx) -> AffineElement:
    """Left action of a U_q(so(5)) generator on a degree <= 1 element."""
    if not isinstance(a, AffineElement):
        raise TypeError("hopf_action acts on AffineElement")
    return AffineElement(_action_matrix(h, _qv(ctx)) @ a.coef)


def kappa(a, ctx):
    """Modular automorphism ``K1^8 K2^6 |>``, entrywise on matrices."""
    q = _qv(ctx)
    M = np.linalg.matrix_power(_action_matrix("K1", q), 8) @ np.linalg.matrix_power(_action_matrix("K2", q), 6)
    if isinstance(a, AffineMatrix):
        return AffineMatrix(a.entries @ M.T)
    return AffineElement(M @ a.coef)


@dataclass(frozen=True, eq=False)
class AffineMatrix:
    """Square matrix with ``AffineElement`` entries, stored as ``(n, n, 6)``."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 3 or e.shape[0] != e.shape[1] or e.shape[2] != 6:
            raise ValueError("AffineMatrix entries must have shape (n, n, 6)")
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, ij) -> AffineElement:
        return AffineElement(self.entries[ij])

    def star(self) -> "AffineMatrix":
        return AffineMatrix(np.conj(self.entries[:, :, _STAR_PERM]).transpose(1, 0, 2))

    def act(self, h: str, ctx) -> "AffineMatrix":
        """Entrywise Hopf action."""
        return AffineMatrix(self.entries @ _action_matrix(h, _qv(ctx)).T)

    def lmul(self, s: np.ndarray) -> "AffineMatrix":
        return AffineMatrix(np.einsum("ik,kjc->ijc", s, self.entries))

    def rmul(self, s: np.ndarray) -> "AffineMatrix":
        return AffineMatrix(np.einsum("ikc,kj->ijc", self.entries, s))

    def __sub__(self, o):
        return AffineMatrix(self.entries - o.entries)

    def __add__(self, o):
        return AffineMatrix(self.entries + o.entries)

    def scalar_trace(self) -> complex:
        return complex(np.trace(self.entries[:, :, 0]))

    def max_abs(self) -> float:
        return float(np.abs(self.entries).max())

    def represent(self, registry: OperatorRegistry) -> list[list[SparseOperator]]:
        return [[self[i, j].represent(registry) for j in range(self.n)] for i in range(self.n)]


def idempotent_e(ctx) -> AffineMatrix:
    """The 4x4 projection whose range gives one chirality of spinors."""
    q = _qv(ctx)
    E = AffineElement.of
    z = E()
    rows = [
        [E(one=1, x0=1), E(x2=q**3), E(x1=-q), z],
        [E(x2s=q**-3), E(one=1, x0=-(q**2)), z, E(x1=q**3)],
        [E(x1s=-1 / q), z, E(one=1, x0=-(q**2)), E(x2=q**3)],
        [z, E(x1s=q), E(x2s=q**-3), E(one=1, x0=q**4)],
    ]
    return AffineMatrix(np.array([[0.5 * a.coef for a in row] for row in rows]))


def sigma_spin(h: str, ctx) -> np.ndarray:
    """The 4-dimensional spin representation of U_q(so(5))."""
    q = _qv(ctx)
    if h == "K1":
        return np.diag([q**0.5, q**0.5, q**-0.5, q**-0.5]).astype(complex)
    if h == "K2":
        return np.diag([1.0, 1 / q, q, 1.0]).astype(complex)
    if h in ("K1inv", "K2inv"):
        return np.linalg.inv(sigma_spin(h[:2], q))
    E = np.zeros((4, 4), complex)
    if h[1] == "1":
        E[0, 2] = E[1, 3] = 1.0
    else:
        E[2, 1] = 1.0
    if h[0] == "E":
        return E
    if h[0] == "F":
        return E.T.copy()
    raise KeyError(h)


def covariance_check_e(ctx, tol: float = 1e-12) -> list[CheckRecord]:
    """Coefficient-level covariance of ``e`` under K_i and E_i, and ``kappa(e*) = e``."""
    q = _qv(ctx)
    e = idempotent_e(q)
    out = []
    for i in (1, 2):
        K, Ki, F = sigma_spin(f"K{i}", q), sigma_spin(f"K{i}inv", q), sigma_spin(f"F{i}", q)
        checks = {
            f"K{i}": (e.act(f"K{i}", q), e.lmul(K).rmul(Ki)),
            f"E{i}": (e.act(f"E{i}", q), e.lmul(F).rmul(Ki) - e.lmul(Ki * q**-i).rmul(F)),
        }
        for h, (lhs, rhs) in checks.items():
            r = (lhs - rhs).max_abs()
            out.append(CheckRecord("idempotent", f"covariance:{h}", "idempotent-covariance", q, None, None, None, r, tol, r <= tol))
    r = (kappa(e.star(), q) - e).max_abs()
    out.append(CheckRecord("idempotent", "kappa(e*)=e", "idempotent-modular-symmetry", q, None, None, None, r, tol, r <= tol))
    tr = e.scalar_trace()
    out.append(
        CheckRecord("idempotent", "scalar-trace", "idempotent-definition", q, None, tr.real, 2.0, abs(tr - 2), tol, abs(tr - 2) <= tol)
    )
    return out


def represent_e(registry: OperatorRegistry, e: AffineMatrix | None = None) -> list[list[SparseOperator]]:
    """Entries of ``e`` as operators of the registry's representation."""
    if e is None:
        e = idempotent_e(registry.ctx)
    return e.represent(registry)


def block_operator(blocks: list[list[SparseOperator]]) -> sp.csr_matrix:
    return sp.bmat([[b.matrix for b in row] for row in blocks], format="csr")


def _block_interior_cols(space: TruncatedSpace, depth: float, n: int) -> np.ndarray:
    cols = np.flatnonzero(space.interior(depth))
    return np.concatenate([cols + k * space.dim for k in range(n)])


def idempotent_suite(space: TruncatedSpace, ctx, tol: float | None = None) -> list[CheckRecord]:
    """``e^2 = e`` as a block operator, plus the coefficient-level identities."""
    q = _qv(ctx)
    tol = _tol(ctx, tol)
    reg = OperatorRegistry(space, ctx)
    P = block_operator(represent_e(reg))
    cols = _block_interior_cols(space, 2, 4)
    if cols.size == 0:
        raise ValueError("e^2 = e: empty interior")
    res = _max_col_norm(P @ P - P, cols)
    out = [CheckRecord("idempotent", f"{space.family}:e^2=e", "idempotent-definition", q, str(space.L), None, None, res, tol, res <= tol)]
    herm = _max_col_norm(block_operator(represent_e(reg, kappa(idempotent_e(q).star(), q))) - P, cols)
    out.append(
        CheckRecord("idempotent", f"{space.family}:represented kappa(e*)=e", "idempotent-modular-symmetry", q, str(space.L), None, None, herm, tol, herm <= tol)
    )
    return out + covariance_check_e(q)


def highest_weight_checks(space: TruncatedSpace, ctx, tol: float | None = None) -> list[CheckRecord]:
    """Highest-weight annihilation and the row-vector identities.

    (i) E1 and E2 kill |l,0,l;0> for every l <= L. (ii) With
    ``v_l^{+-} = x2^{l-1/2} (1 +- x0, +- q^3 x2, -+ q x1, 0)`` applied to the
    vacuum, ``v^+ (1 - e)`` and ``v^- e`` vanish for l <= L - 3/2.
    """
    if space.family != "scalar":
        raise ValueError("highest_weight_checks runs on the scalar family")
    q = _qv(ctx)
    tol = _tol(ctx, tol)
    reg = OperatorRegistry(space, ctx)
    out = []
    worst = 0.0
    for two_l in range(0, space.two_L + 1, 2):
        v = np.zeros(space.dim)
        v[space.index(BasisLabel(two_l, 0, two_l, 0, 0))] = 1.0
        for h in ("E1", "E2"):
            worst = max(worst, float(np.linalg.norm(reg[h].matrix @ v)))
    out.append(CheckRecord("idempotent", "highest-weight:E|l,0,l;0>=0", "highest-weight-vectors", q, str(space.L), None, 0.0, worst, tol, worst <= tol))

    e = idempotent_e(q)
    E = AffineElement.of
    vac = np.zeros(space.dim)
    vac[space.index(BasisLabel(0, 0, 0, 0, 0))] = 1.0
    x2 = reg["x2"].matrix
    for sign, tag in ((1, "+"), (-1, "-")):
        w = [E(one=1, x0=sign), E(x2=sign * q**3), E(x1=-sign * q), E()]
        one = E(one=1)
        # k-th entry of v^+ (1 - e) or v^- e, before the x2 power
        cols = []
        for k in range(4):
            vec = np.zeros(space.dim, complex)
            for i in range(4):
                t = ((one if i == k else E()) - e[i, k]) if sign == 1 else e[i, k]
                vec += w[i].represent(reg).matrix @ (t.represent(reg).matrix @ vac)
            cols.append(vec)
        worst = 0.0
        for _ in range(space.two_L // 2 - 1):
            worst = max(worst, max(float(np.linalg.norm(c)) for c in cols))
            cols = [x2 @ c for c in cols]
        ident = "v+(1-e)=0" if sign == 1 else "v-e=0"
        out.append(CheckRecord("idempotent", f"highest-weight:{ident}", "highest-weight-rows", q, str(space.L), None, 0.0, worst, tol, worst <= tol))
    return out
