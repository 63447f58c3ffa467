"""Orthonormal bases of the U_q(so(5)) modules V_l and their truncated sums.

All half-integer labels are stored doubled (``two_l = 2*l`` and so on) so that
admissibility checks are exact integer arithmetic.  Three label families are
supported:

``scalar``
    ``l`` integer, the left regular module.
``spinor``
    ``l`` half-odd, both chiralities, the chiral spinor modules.
``hat``
    the extended label set carrying the SU_q(2) x S^2_q representation;
    truncated to the labels reachable from the spinor labels in a fixed
    number of generator steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

__all__ = [
    "BasisLabel",
    "TruncatedSpace",
    "epsilon",
    "two_epsilon",
    "enumerate_space",
    "hat_space",
    "simple_space",
    "dim_spinor_level",
    "parse_half_integer",
    "HAT_MOVES",
]

FAMILIES = ("scalar", "spinor", "hat", "simple")
_CHIR_CODE = {1: 0, -1: 1, 0: 0}

# key packing: 10 bits per field, offset keeps negative hat labels positive
_BITS = 10
_OFF = 1 << (_BITS - 1)


class BasisLabel(NamedTuple):
    two_l: int
    two_m1: int
    two_m2: int
    two_j: int
    chirality: int = 0  # +1, -1, or 0 for the scalar family

    @property
    def l(self) -> Fraction:
        return Fraction(self.two_l, 2)

    @property
    def j(self) -> Fraction:
        return Fraction(self.two_j, 2)

    @property
    def m1(self) -> Fraction:
        return Fraction(self.two_m1, 2)

    @property
    def m2(self) -> Fraction:
        return Fraction(self.two_m2, 2)

    def __str__(self):
        chir = {1: "+", -1: "-", 0: ""}[self.chirality]
        return f"|{self.l},{self.m1},{self.m2};{self.j}>{chir}"


def parse_half_integer(text) -> int:
    """Parse ``"25/2"``, ``"12.5"`` or ``12`` into a doubled integer."""
    value = Fraction(str(text)) if not isinstance(text, (int, Fraction)) else Fraction(text)
    doubled = 2 * value
    if doubled.denominator != 1:
        raise ValueError(f"{text!r} is not a half-integer")
    return int(doubled)


def two_epsilon(two_l, two_m2, two_j):
    """Return ``2*epsilon`` for doubled labels (scalar or array).

    Zero for integer ``l``; otherwise ``(-1)**(l + 1/2 - j - m2)``.
    """
    two_l = np.asarray(two_l)
    two_m2 = np.asarray(two_m2)
    two_j = np.asarray(two_j)
    half_odd = (two_l % 2) == 1
    # l + 1/2 - j - m2 is an integer whenever l is half-odd
    expo = (two_l + 1 - two_j - two_m2) // 2
    sign = np.where(expo % 2 == 0, 1, -1)
    out = np.where(half_odd, sign, 0)
    return out.item() if out.ndim == 0 else out


def epsilon(label: BasisLabel) -> Fraction:
    """The unique epsilon in {0, +-1/2} with ``l + eps - j - m2`` even."""
    return Fraction(int(two_epsilon(label.two_l, label.two_m2, label.two_j)), 2)


def dim_spinor_level(two_l: int) -> int:
    """Dimension of V_l for half-odd ``l`` (given doubled)."""
    if two_l % 2 != 1 or two_l < 1:
        raise ValueError("closed-form dimension holds only for l in N + 1/2")
    l = Fraction(two_l, 2)
    d = Fraction(2, 3) * (l + Fraction(5, 2)) * (l + Fraction(3, 2)) * (l + Fraction(1, 2))
    assert d.denominator == 1
    return int(d)


def _level_labels(family: str, two_l: int, chiralities) -> list[BasisLabel]:
    out = []
    if family == "scalar":
        for two_j in range(0, two_l + 1, 2):
            span = two_l - two_j  # 2*(l - j)
            for two_m1 in range(-two_j, two_j + 1, 2):
                for two_m2 in range(-span, span + 1, 4):
                    out.append(BasisLabel(two_l, two_m1, two_m2, two_j, 0))
    else:
        for chir in chiralities:
            for two_j in range(1, two_l + 1, 2):
                span = two_l + 1 - two_j  # 2*(l + 1/2 - j)
                for two_m1 in range(-two_j, two_j + 1, 2):
                    for two_m2 in range(-span, span + 1, 2):
                        out.append(BasisLabel(two_l, two_m1, two_m2, two_j, chir))
    return out


def hat_admissible(two_l, two_m1, two_m2, two_j):
    two_l = np.asarray(two_l)
    two_m1 = np.asarray(two_m1)
    two_m2 = np.asarray(two_m2)
    two_j = np.asarray(two_j)
    a = two_j + two_m1
    b = two_l + 1 - two_j + two_m2
    return ((two_l + two_j) % 2 == 0) & (a >= 0) & (a % 2 == 0) & (b >= 0) & (b % 2 == 0)


def spinor_admissible(two_l, two_m1, two_m2, two_j):
    """Membership in the spinor label set (the set called I for the hat space)."""
    two_l = np.asarray(two_l)
    two_m1 = np.asarray(two_m1)
    two_m2 = np.asarray(two_m2)
    two_j = np.asarray(two_j)
    span = two_l + 1 - two_j
    return (
        (two_l % 2 == 1)
        & (two_j % 2 == 1)
        & (two_j >= 1)
        & (two_j <= two_l)
        & (np.abs(two_m1) <= two_j)
        & ((two_j - two_m1) % 2 == 0)
        & (np.abs(two_m2) <= span)
        & ((span - two_m2) % 2 == 0)
    )


# (d2l, d2m1, d2m2, d2j) for alpha, beta, B and their adjoints
HAT_MOVES = (
    (1, 1, 0, 1),
    (1, -1, 0, 1),
    (2, 0, 2, 0),
    (-1, -1, 0, -1),
    (-1, 1, 0, -1),
    (-2, 0, -2, 0),
)


def _pack(two_l, chir_code, two_j, two_m1, two_m2):
    k = np.asarray(two_l, dtype=np.int64) + _OFF
    for part in (chir_code, two_j, two_m1, two_m2):
        k = (k << _BITS) + (np.asarray(part, dtype=np.int64) + _OFF)
    return k


@dataclass(frozen=True, eq=False)
class TruncatedSpace:
    """Canonically ordered basis of a truncated direct sum of V_l's.

    Labels are sorted by ``(two_l, chirality, two_j, two_m1, two_m2)`` with
    chirality ``+`` before ``-``.  Immutable once built.
    """

    family: str
    two_L: int
    labels: tuple[BasisLabel, ...]
    two_l: np.ndarray = field(repr=False)
    two_m1: np.ndarray = field(repr=False)
    two_m2: np.ndarray = field(repr=False)
    two_j: np.ndarray = field(repr=False)
    chirality: np.ndarray = field(repr=False)
    keys: np.ndarray = field(repr=False)

    @classmethod
    def from_labels(cls, family, two_L, labels):
        labels = sorted(
            set(labels),
            key=lambda b: (b.two_l, _CHIR_CODE[b.chirality], b.two_j, b.two_m1, b.two_m2),
        )
        arr = np.array([tuple(b) for b in labels], dtype=np.int64).reshape(-1, 5)
        chir = arr[:, 4]
        keys = _pack(arr[:, 0], np.where(chir == -1, 1, 0), arr[:, 3], arr[:, 1], arr[:, 2])
        assert np.all(np.diff(keys) > 0)
        for a in (arr,):
            a.setflags(write=False)
        return cls(
            family=family,
            two_L=two_L,
            labels=tuple(labels),
            two_l=arr[:, 0],
            two_m1=arr[:, 1],
            two_m2=arr[:, 2],
            two_j=arr[:, 3],
            chirality=chir,
            keys=keys,
        )

    # -- sizes and label views -------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    @property
    def L(self) -> Fraction:
        return Fraction(self.two_L, 2)

    @property
    def l(self):
        return self.two_l / 2.0

    @property
    def j(self):
        return self.two_j / 2.0

    @property
    def m1(self):
        return self.two_m1 / 2.0

    @property
    def m2(self):
        return self.two_m2 / 2.0

    @property
    def eps(self):
        return two_epsilon(self.two_l, self.two_m2, self.two_j) / 2.0

    # -- index maps ------------------------------------------------------
    def index(self, label: BasisLabel) -> int:
        idx, found = self.lookup(
            np.array([label.two_l]),
            np.array([label.two_m1]),
            np.array([label.two_m2]),
            np.array([label.two_j]),
            np.array([label.chirality]),
        )
        if not found[0]:
            raise KeyError(f"{label} not in {self.family} space")
        return int(idx[0])

    def __contains__(self, label) -> bool:
        try:
            self.index(BasisLabel(*label))
        except KeyError:
            return False
        return True

    def lookup(self, two_l, two_m1, two_m2, two_j, chirality):
        """Vectorised label -> index map; returns ``(index, found)``."""
        chir_code = np.where(np.asarray(chirality) == -1, 1, 0)
        k = _pack(two_l, chir_code, two_j, two_m1, two_m2)
        idx = np.searchsorted(self.keys, k)
        idx = np.minimum(idx, len(self.keys) - 1)
        found = self.keys[idx] == k
        return idx, found

    def interior(self, depth: float) -> np.ndarray:
        """Mask of basis vectors with ``l <= L - depth``.

        For the ``simple`` family the cutoff is the box ``k1, k2 <= K`` and
        ``depth`` counts unit steps in either direction.
        """
        if self.family == "simple":
            d = 2 * int(np.ceil(depth))
            return (self.two_m1 <= self.two_L - d) & (self.two_m2 <= self.two_L - d)
        return self.two_l <= self.two_L - int(round(2 * depth))

    def level_mask(self, two_l: int) -> np.ndarray:
        return self.two_l == two_l

    def chirality_mask(self, chir: int) -> np.ndarray:
        return self.chirality == chir

    @property
    def chiralities(self) -> tuple[int, ...]:
        return tuple(sorted(set(int(c) for c in np.unique(self.chirality)), reverse=True))


def enumerate_space(family: str, L, chiralities=(1, -1)) -> TruncatedSpace:
    """Enumerate all admissible labels with ``l <= L``.

    ``L`` may be a doubled integer passed via :func:`parse_half_integer`
    semantics: strings such as ``"25/2"`` or numbers such as ``12.5``.
    The hat family is built by :func:`hat_space`.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    two_L = parse_half_integer(L)
    if family == "hat":
        return hat_space(two_L)
    if family == "simple":
        return simple_space(two_L // 2, chiralities)
    if two_L < 0:
        raise ValueError("cutoff must be non-negative")
    if family == "scalar" and two_L % 2:
        raise ValueError("scalar cutoff must be an integer")
    if family == "spinor" and two_L % 2 == 0:
        raise ValueError("spinor cutoff must lie in N + 1/2")
    chiralities = tuple(_normalize_chirality(c) for c in chiralities)
    labels = []
    start = 0 if family == "scalar" else 1
    for two_l in range(start, two_L + 1, 2):
        labels.extend(_level_labels(family, two_l, chiralities))
    return TruncatedSpace.from_labels(family, two_L, labels)


def simple_space(K: int, signs=(1, -1)) -> TruncatedSpace:
    """Box-truncated basis ``|k1,k2>_+-`` of the two l^2(N^2) irreps.

    Stored as ``BasisLabel(2(k1+k2), 2 k1, 2 k2, 0, sign)`` so that ``l`` is the
    total degree.
    """
    if K < 1:
        raise ValueError("simple cutoff K must be >= 1")
    signs = tuple(_normalize_chirality(c) for c in signs)
    labels = [
        BasisLabel(2 * (k1 + k2), 2 * k1, 2 * k2, 0, s)
        for s in signs
        for k1 in range(K + 1)
        for k2 in range(K + 1)
    ]
    return TruncatedSpace.from_labels("simple", 2 * K, labels)


def _normalize_chirality(c) -> int:
    if c in ("+", 1, "plus"):
        return 1
    if c in ("-", -1, "minus"):
        return -1
    raise ValueError(f"bad chirality {c!r}")


def hat_space(two_L_hat: int, depth: int = 4, base_margin: int = 2) -> TruncatedSpace:
    """Extended label set around the spinor labels.

    Starts from the spinor labels with ``l <= L_hat - base_margin`` and adds
    every hat-admissible label within ``depth`` generator steps whose ``l``
    does not exceed ``L_hat``.
    """
    two_L = two_L_hat - 2 * base_margin
    if two_L < 1 or two_L % 2 == 0:
        raise ValueError("hat cutoff must be L + margin with L in N + 1/2")
    seed = enumerate_space("spinor", Fraction(two_L, 2))
    frontier = set(seed.labels)
    seen = set(frontier)
    for _ in range(depth):
        nxt = set()
        for b in frontier:
            for d2l, d2m1, d2m2, d2j in HAT_MOVES:
                c = BasisLabel(b.two_l + d2l, b.two_m1 + d2m1, b.two_m2 + d2m2, b.two_j + d2j, b.chirality)
                if c in seen or c.two_l > two_L_hat:
                    continue
                if hat_admissible(c.two_l, c.two_m1, c.two_m2, c.two_j):
                    nxt.add(c)
        seen |= nxt
        frontier = nxt
    return TruncatedSpace.from_labels("hat", two_L_hat, seen)
