"""Quasi-cuts of the rational value group and canonical representatives.

A quasi-cut splits Q into a lower and an upper part that together cover Q
and overlap in at most one point.  Over Q only four decidable shapes occur
here: the principal cut at a rational, the cut just below or just above a
rational, and the cut above everything.  Each kind has one canonical
representative in the rank-2 lexicographic group, with second coordinate
0, -1 or +1.

Immutable pure values; safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .ordered_values import EQUAL, GREATER, INFINITY, LESS, GroupValue, RationalLike, _as_fraction

PRINCIPAL = "principal"
BELOW = "below"
ABOVE = "above"
PLUS_INFINITY = "plus_infinity"

_TAGS = {BELOW: -1, PRINCIPAL: 0, ABOVE: 1}


@dataclass(frozen=True)
class QuasiCut:
    """A quasi-cut of Q, tagged by its boundary kind.

    ``below(q)`` has lower part (-inf, q), ``above(q)`` has lower part
    (-inf, q]; ``principal(q)`` is the unique kind whose two parts meet,
    exactly in {q}.
    """

    kind: str
    boundary: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind == PLUS_INFINITY:
            if self.boundary is not None:
                raise ValueError("the top cut has no boundary")
        elif self.kind in _TAGS:
            if self.boundary is None:
                raise ValueError(f"a {self.kind} cut needs a rational boundary")
        else:
            raise ValueError(f"unknown cut kind {self.kind!r}")

    @staticmethod
    def principal(q: RationalLike) -> "QuasiCut":
        return QuasiCut(PRINCIPAL, _as_fraction(q))

    @staticmethod
    def below(q: RationalLike) -> "QuasiCut":
        return QuasiCut(BELOW, _as_fraction(q))

    @staticmethod
    def above(q: RationalLike) -> "QuasiCut":
        return QuasiCut(ABOVE, _as_fraction(q))

    @staticmethod
    def plus_infinity() -> "QuasiCut":
        return QuasiCut(PLUS_INFINITY)

    def in_lower(self, q: RationalLike) -> bool:
        """Membership of a rational in the lower part of the cut."""
        if self.kind == PLUS_INFINITY:
            return True
        q = _as_fraction(q)
        if self.kind == BELOW:
            return q < self.boundary
        return q <= self.boundary

    def _key(self):
        if self.kind == PLUS_INFINITY:
            return (1, Fraction(0), 0)
        return (0, self.boundary, _TAGS[self.kind])

    def cmp(self, other: "QuasiCut") -> int:
        a, b = self._key(), other._key()
        return LESS if a < b else GREATER if a > b else EQUAL

    def __lt__(self, other: "QuasiCut") -> bool:
        return self.cmp(other) == LESS

    def __le__(self, other: "QuasiCut") -> bool:
        return self.cmp(other) != GREATER

    def __gt__(self, other: "QuasiCut") -> bool:
        return self.cmp(other) == GREATER

    def __ge__(self, other: "QuasiCut") -> bool:
        return self.cmp(other) != LESS

    def __str__(self) -> str:
        if self.kind == PLUS_INFINITY:
            return "cut:+inf"
        suffix = {BELOW: "-", PRINCIPAL: "", ABOVE: "+"}[self.kind]
        return f"cut:{self.boundary}{suffix}"


def qc_cmp(a: QuasiCut, b: QuasiCut) -> int:
    """Total order on cuts: lower parts by inclusion.  Returns -1, 0 or 1."""
    return a.cmp(b)


def qc_of_value(alpha: GroupValue) -> QuasiCut:
    """The quasi-cut a value induces on Q: which rationals sit at or below it.

    Only values of effective rank at most 2 (and the top element) induce
    one of the four supported kinds; higher effective rank is rejected.
    """
    if alpha.is_infinity:
        return QuasiCut.plus_infinity()
    coords = alpha.stripped()
    if len(coords) > 2:
        raise ValueError(
            f"no canonical rank-1 cut for effective rank {len(coords)} value {alpha}"
        )
    first = coords[0]
    tail = coords[1] if len(coords) == 2 else Fraction(0)
    if tail == 0:
        return QuasiCut.principal(first)
    if tail > 0:
        return QuasiCut.above(first)
    return QuasiCut.below(first)


def sme_equivalent(alpha: GroupValue, beta: GroupValue) -> bool:
    """Whether two values induce the same quasi-cut on Q."""
    return qc_of_value(alpha) == qc_of_value(beta)


def qc_representative(delta: QuasiCut) -> GroupValue:
    """The fixed canonical value inducing the cut.

    Principal cuts map into the first coordinate; the just-below and
    just-above kinds take second coordinate -1 and +1.  This is a section
    of qc_of_value.
    """
    if delta.kind == PLUS_INFINITY:
        return INFINITY
    if delta.kind == PRINCIPAL:
        return GroupValue(delta.boundary, 0)
    if delta.kind == BELOW:
        return GroupValue(delta.boundary, -1)
    return GroupValue(delta.boundary, 1)


ATTAINED = "attained"
UNATTAINED = "unattained"
UNBOUNDED = "unbounded"
IRRATIONAL = "irrational"


@dataclass(frozen=True)
class LimitDescriptor:
    """Declared limiting behaviour of an increasing rational sequence."""

    kind: str
    limit: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind in (ATTAINED, UNATTAINED):
            if self.limit is None:
                raise ValueError(f"a {self.kind} descriptor needs a rational limit")
        elif self.kind in (UNBOUNDED, IRRATIONAL):
            if self.limit is not None:
                raise ValueError(f"a {self.kind} descriptor carries no rational limit")
        else:
            raise ValueError(f"unknown limit descriptor {self.kind!r}")

    @staticmethod
    def parse(text: str) -> "LimitDescriptor":
        text = text.strip()
        if text == "+inf":
            return LimitDescriptor(UNBOUNDED)
        if text == "irrational":
            return LimitDescriptor(IRRATIONAL)
        if text.endswith("-"):
            return LimitDescriptor(UNATTAINED, Fraction(text[:-1]))
        return LimitDescriptor(ATTAINED, Fraction(text))

    def __str__(self) -> str:
        if self.kind == UNBOUNDED:
            return "+inf"
        if self.kind == IRRATIONAL:
            return "irrational"
        if self.kind == UNATTAINED:
            return f"{self.limit}-"
        return str(self.limit)


@dataclass(frozen=True)
class RationalSequence:
    """A monotone rational sequence: an explicit increasing prefix plus a
    declared limit descriptor for the unseen tail."""

    prefix: tuple
    descriptor: LimitDescriptor

    def __post_init__(self):
        prefix = tuple(_as_fraction(q) for q in self.prefix)
        object.__setattr__(self, "prefix", prefix)
        for a, b in zip(prefix, prefix[1:]):
            if not a < b:
                raise ValueError(f"sequence prefix is not strictly increasing at {a}, {b}")
        d = self.descriptor
        if d.kind in (ATTAINED, UNATTAINED) and prefix:
            if d.kind == ATTAINED:
                if prefix[-1] != d.limit:
                    raise ValueError(
                        f"declared attained limit {d.limit} but the prefix tops out at {prefix[-1]}"
                    )
            else:
                if prefix[-1] >= d.limit:
                    raise ValueError(
                        f"prefix member {prefix[-1]} reaches the declared unattained limit {d.limit}"
                    )


def qc_sup(seq: RationalSequence) -> QuasiCut:
    """The quasi-cut of the supremum of an increasing rational sequence.

    An attained limit gives the principal cut (and requires a member equal
    to it), an unattained rational limit gives the just-below cut, and an
    unbounded sequence gives the top cut.  Irrational limits are out of
    reach of the four supported kinds and are rejected.
    """
    d = seq.descriptor
    if d.kind == IRRATIONAL:
        raise ValueError("irrational limit points have no supported quasi-cut representation")
    if d.kind == UNBOUNDED:
        return QuasiCut.plus_infinity()
    if d.kind == ATTAINED:
        if not seq.prefix or seq.prefix[-1] != d.limit:
            raise ValueError("an attained limit must appear as the last listed member")
        return QuasiCut.principal(d.limit)
    return QuasiCut.below(d.limit)
