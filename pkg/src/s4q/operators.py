"""Sparse weighted-shift operators on truncated label spaces.

An operator is a CSR matrix between two :class:`~s4q.basis.TruncatedSpace`
objects.  Its *shift components* group the nonzero entries by label
displacement; within one component every source index appears once, so the
component is a weighted label translation whose singular values are the
absolute values of its weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import TruncatedSpace

__all__ = [
    "SparseOperator",
    "AntilinearOperator",
    "Term",
    "build_operator",
    "commutator",
]


@dataclass(frozen=True)
class Term:
    """One displayed summand of a generator action.

    ``shift`` is ``(d2l, d2m1, d2m2, d2j)`` in doubled units; ``flip`` swaps
    chirality.  ``coef`` maps a :class:`LabelArrays` view of the source labels
    to an amplitude array.
    """

    shift: tuple[int, int, int, int]
    coef: object
    flip: bool = False


class LabelArrays:
    """Float views of a label subset, handed to coefficient functions."""

    def __init__(self, space: TruncatedSpace, mask=None):
        sel = slice(None) if mask is None else mask
        self.two_l = space.two_l[sel]
        self.two_m1 = space.two_m1[sel]
        self.two_m2 = space.two_m2[sel]
        self.two_j = space.two_j[sel]
        self.chirality = space.chirality[sel]
        self.l = self.two_l / 2.0
        self.m1 = self.two_m1 / 2.0
        self.m2 = self.two_m2 / 2.0
        self.j = self.two_j / 2.0

    @property
    def size(self) -> int:
        return self.two_l.size


class SparseOperator:
    """Linear operator ``domain -> codomain`` stored as CSR."""

    __array_priority__ = 100

    def __init__(self, matrix, domain: TruncatedSpace, codomain: TruncatedSpace | None = None, name: str = ""):
        self.domain = domain
        self.codomain = domain if codomain is None else codomain
        m = sp.csr_matrix(matrix, dtype=complex)
        m.sum_duplicates()
        m.eliminate_zeros()
        if m.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError(f"shape {m.shape} does not match spaces")
        self.matrix = m
        self.name = name
        self._components = None

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, domain, codomain=None):
        codomain = domain if codomain is None else codomain
        return cls(sp.csr_matrix((codomain.dim, domain.dim), dtype=complex), domain, codomain)

    @classmethod
    def identity(cls, space):
        return cls(sp.identity(space.dim, dtype=complex, format="csr"), space, name="1")

    @classmethod
    def diagonal(cls, space, values, name=""):
        values = np.broadcast_to(np.asarray(values, dtype=complex), (space.dim,))
        return cls(sp.diags(values, format="csr"), space, name=name)

    # -- algebra ---------------------------------------------------------
    def _check(self, other):
        if other.domain is not self.domain or other.codomain is not self.codomain:
            raise ValueError("operators live on different spaces")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            if other == 0:
                return self
            return self + other * SparseOperator.identity(self.domain)
        self._check(other)
        return SparseOperator(self.matrix + other.matrix, self.domain, self.codomain)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __rsub__(self, other):
        return (-1) * self + other

    def __neg__(self):
        return (-1) * self

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return SparseOperator(self.matrix * scalar, self.domain, self.codomain)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            if other.codomain is not self.domain:
                raise ValueError("operator spaces do not compose")
            return SparseOperator(self.matrix @ other.matrix, other.domain, self.codomain)
        if isinstance(other, AntilinearOperator):
            return NotImplemented
        return self.matrix @ other

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        out = SparseOperator.identity(self.domain)
        for _ in range(n):
            out = self @ out
        return out

    @property
    def H(self):
        """Matrix adjoint."""
        return SparseOperator(self.matrix.conj().T, self.codomain, self.domain, name=f"{self.name}*" if self.name else "")

    def conj(self):
        return SparseOperator(self.matrix.conj(), self.domain, self.codomain)

    def toarray(self):
        return self.matrix.toarray()

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def element(self, row_label, col_label) -> complex:
        return complex(self.matrix[self.codomain.index(row_label), self.domain.index(col_label)])

    def apply_basis(self, label):
        """Image of one basis vector as a dict label -> amplitude."""
        col = self.matrix.getcol(self.domain.index(label)).tocoo()
        return {self.codomain.labels[r]: v for r, v in zip(col.row, col.data)}

    def restrict_columns(self, mask):
        """Zero every column outside ``mask``."""
        d = sp.diags(np.asarray(mask, dtype=float), format="csr")
        return SparseOperator(self.matrix @ d, self.domain, self.codomain)

    def structurally_equal(self, other, tol: float = 0.0) -> bool:
        if self.matrix.shape != other.matrix.shape:
            return False
        diff = (self.matrix - other.matrix).tocoo()
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= tol

    # -- shift-component view ---------------------------------------------
    @property
    def components(self):
        """Map displacement ``(d2l, d2m1, d2m2, d2j, flip)`` -> ``(src, dst, amp)``."""
        if self._components is None:
            coo = self.matrix.tocoo()
            dom, cod = self.domain, self.codomain
            r, c = coo.row, coo.col
            disp = np.stack(
                [
                    cod.two_l[r] - dom.two_l[c],
                    cod.two_m1[r] - dom.two_m1[c],
                    cod.two_m2[r] - dom.two_m2[c],
                    cod.two_j[r] - dom.two_j[c],
                    (cod.chirality[r] != dom.chirality[c]).astype(np.int64),
                ],
                axis=1,
            ).reshape(-1, 5)
            comps = {}
            if len(r):
                keys, inv = np.unique(disp, axis=0, return_inverse=True)
                inv = inv.ravel()
                for k, key in enumerate(keys):
                    sel = inv == k
                    order = np.argsort(c[sel], kind="stable")
                    comps[tuple(int(x) for x in key)] = (c[sel][order], r[sel][order], coo.data[sel][order])
            self._components = comps
        return self._components

    @property
    def shift_radius(self) -> float:
        """Largest ``|delta l|`` over components, in units of l."""
        if not self.components:
            return 0.0
        return max(abs(k[0]) for k in self.components) / 2.0

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix.data))) if self.matrix.nnz else 0.0

    def __repr__(self):
        return f"SparseOperator({self.name or '?'}, {self.codomain.dim}x{self.domain.dim}, nnz={self.nnz})"


def commutator(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    return a @ b - b @ a


class AntilinearOperator:
    """Antilinear map ``xi -> M conj(xi)`` in the canonical basis."""

    def __init__(self, matrix: SparseOperator, name: str = ""):
        self.M = matrix
        self.name = name

    @property
    def domain(self):
        return self.M.domain

    @property
    def codomain(self):
        return self.M.codomain

    def apply(self, vec):
        return self.M.matrix @ np.conj(vec)

    def __matmul__(self, other):
        if isinstance(other, AntilinearOperator):
            # M_A conj(M_B conj(xi)) = M_A conj(M_B) xi: linear
            return self.M @ other.M.conj()
        if isinstance(other, SparseOperator):
            return AntilinearOperator(self.M @ other.conj())
        return self.apply(other)

    def __rmatmul__(self, other):
        if isinstance(other, SparseOperator):
            return AntilinearOperator(other @ self.M)
        return NotImplemented

    def __mul__(self, scalar):
        # (c A) xi = c M conj(xi)
        return AntilinearOperator(self.M * scalar)

    __rmul__ = __mul__

    def inverse(self):
        """Inverse of an antilinear map whose matrix is monomial."""
        m = self.M.matrix.tocoo()
        rows_ok = np.bincount(m.row, minlength=m.shape[0])
        cols_ok = np.bincount(m.col, minlength=m.shape[1])
        if m.shape[0] != m.shape[1] or np.any(rows_ok != 1) or np.any(cols_ok != 1):
            raise ValueError("inverse implemented only for monomial (shift-with-phase) matrices")
        # M^{-1} = transpose with reciprocal entries; the antilinear inverse uses conj(M^{-1})
        inv = sp.csr_matrix((np.conj(1.0 / m.data), (m.col, m.row)), shape=m.shape)
        return AntilinearOperator(SparseOperator(inv, self.codomain, self.domain))

    def conjugate(self, b: SparseOperator) -> SparseOperator:
        """``A b A^{-1}`` as a linear operator."""
        return (self @ b) @ self.inverse()

    def __repr__(self):
        return f"AntilinearOperator({self.name or '?'}, nnz={self.M.nnz})"


def build_operator(space: TruncatedSpace, terms, codomain: TruncatedSpace | None = None, name: str = "", mask=None):
    """Assemble an operator from displayed shift terms.

    Terms whose target label is missing from ``codomain`` are dropped (the
    truncation).  A NaN amplitude on a target that *is* present means a
    coefficient formula was evaluated outside its domain and raises.
    """
    codomain = space if codomain is None else codomain
    labs = LabelArrays(space, mask)
    src_all = np.arange(space.dim)[slice(None) if mask is None else mask]
    rows, cols, vals = [], [], []
    for term in terms:
        d2l, d2m1, d2m2, d2j = term.shift
        chir = -labs.chirality if term.flip else labs.chirality
        idx, found = codomain.lookup(labs.two_l + d2l, labs.two_m1 + d2m1, labs.two_m2 + d2m2, labs.two_j + d2j, chir)
        if not np.any(found):
            continue
        with np.errstate(invalid="ignore", divide="ignore"):
            amp = np.asarray(term.coef(labs), dtype=complex)
        amp = np.broadcast_to(amp, found.shape)
        bad = found & ~np.isfinite(amp)
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise FloatingPointError(
                f"{name}: non-finite coefficient for shift {term.shift} at {space.labels[src_all[k]]}"
            )
        keep = found & (amp != 0)
        rows.append(idx[keep])
        cols.append(src_all[keep])
        vals.append(amp[keep])
    if rows:
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
    m = sp.csr_matrix((vals, (rows, cols)), shape=(codomain.dim, space.dim), dtype=complex)
    return SparseOperator(m, space, codomain, name=name)
