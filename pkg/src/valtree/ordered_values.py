"""Exact arithmetic and order topology on lexicographic rational value groups.

Values live in Q^n ordered lexicographically, together with a single
absorbing top element (rendered ``inf``).  Values of different rank are
reconciled by zero-padding trailing coordinates, which preserves both the
order and the addition.  Everything here is immutable and pure, so values
can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

RationalLike = Union[Fraction, int, str]

LESS = -1
EQUAL = 0
GREATER = 1


def _as_fraction(q: RationalLike) -> Fraction:
    if isinstance(q, Fraction):
        return q
    return Fraction(q)


class GroupValue:
    """An element of Q^n with lexicographic order, or the top element.

    The first coordinate carries the archimedean (rational) part; later
    coordinates are infinitesimal refinements.  The top element is the
    singleton ``INFINITY`` and absorbs addition.
    """

    __slots__ = ("coords",)

    def __init__(self, *coords: RationalLike):
        if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
            coords = tuple(coords[0])
        if len(coords) == 0:
            raise ValueError("a finite group value needs at least one coordinate")
        object.__setattr__(self, "coords", tuple(_as_fraction(c) for c in coords))

    # -- construction -----------------------------------------------------

    @staticmethod
    def infinity() -> "GroupValue":
        return INFINITY

    @staticmethod
    def zero(rank: int = 1) -> "GroupValue":
        return GroupValue(*([0] * rank))

    @staticmethod
    def from_rational(q: RationalLike) -> "GroupValue":
        """Embed a rational in the first (archimedean) coordinate."""
        return GroupValue(_as_fraction(q))

    # -- basic structure --------------------------------------------------

    @property
    def is_infinity(self) -> bool:
        return self.coords is None

    @property
    def rank(self) -> int:
        if self.coords is None:
            raise ValueError("the top element has no rank")
        return len(self.coords)

    @property
    def first(self) -> Fraction:
        """The archimedean coordinate."""
        if self.coords is None:
            raise ValueError("the top element has no coordinates")
        return self.coords[0]

    def padded(self, rank: int) -> tuple:
        if self.coords is None:
            raise ValueError("cannot pad the top element")
        if len(self.coords) > rank:
            raise ValueError("cannot pad down")
        return self.coords + (Fraction(0),) * (rank - len(self.coords))

    def stripped(self) -> tuple:
        """Coordinates with trailing zeros removed (canonical embedding key)."""
        if self.coords is None:
            return ()
        coords = self.coords
        n = len(coords)
        while n > 1 and coords[n - 1] == 0:
            n -= 1
        return coords[:n]

    @property
    def has_infinitesimal_part(self) -> bool:
        """True when some coordinate beyond the first is nonzero."""
        if self.coords is None:
            raise ValueError("the top element is not a group element")
        return any(c != 0 for c in self.coords[1:])

    # -- order and arithmetic ----------------------------------------------

    def cmp(self, other: "GroupValue") -> int:
        if self.coords is None:
            return EQUAL if other.coords is None else GREATER
        if other.coords is None:
            return LESS
        rank = max(len(self.coords), len(other.coords))
        a, b = self.padded(rank), other.padded(rank)
        if a < b:
            return LESS
        if a > b:
            return GREATER
        return EQUAL

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupValue):
            return NotImplemented
        return self.cmp(other) == EQUAL

    def __hash__(self) -> int:
        return hash(self.stripped())

    def __lt__(self, other: "GroupValue") -> bool:
        return self.cmp(other) == LESS

    def __le__(self, other: "GroupValue") -> bool:
        return self.cmp(other) != GREATER

    def __gt__(self, other: "GroupValue") -> bool:
        return self.cmp(other) == GREATER

    def __ge__(self, other: "GroupValue") -> bool:
        return self.cmp(other) != LESS

    def __add__(self, other: "GroupValue") -> "GroupValue":
        if self.coords is None or other.coords is None:
            return INFINITY
        rank = max(len(self.coords), len(other.coords))
        return GroupValue(*(x + y for x, y in zip(self.padded(rank), other.padded(rank))))

    def __sub__(self, other: "GroupValue") -> "GroupValue":
        if self.coords is None or other.coords is None:
            raise ValueError("the top element cannot be subtracted")
        rank = max(len(self.coords), len(other.coords))
        return GroupValue(*(x - y for x, y in zip(self.padded(rank), other.padded(rank))))

    def __neg__(self) -> "GroupValue":
        if self.coords is None:
            raise ValueError("the top element has no negative")
        return GroupValue(*(-c for c in self.coords))

    def scale(self, q: RationalLike) -> "GroupValue":
        """Multiply by a rational scalar.  ``0 * inf`` is rejected."""
        q = _as_fraction(q)
        if self.coords is None:
            if q <= 0:
                raise ValueError("only positive multiples of the top element are defined")
            return INFINITY
        return GroupValue(*(q * c for c in self.coords))

    def __str__(self) -> str:
        if self.coords is None:
            return "inf"
        return "(" + ",".join(str(c) for c in self.coords) + ")"

    def __repr__(self) -> str:
        return f"GroupValue{str(self)}" if self.coords is not None else "GroupValue(inf)"


class _InfinityValue(GroupValue):
    __slots__ = ()

    def __init__(self):
        object.__setattr__(self, "coords", None)


INFINITY = _InfinityValue()

ONE = GroupValue(1)


def gv(*coords: RationalLike) -> GroupValue:
    """Shorthand constructor: ``gv(1, "-1/2")`` is the value (1,-1/2)."""
    return GroupValue(*coords)


def gv_cmp(a: GroupValue, b: GroupValue) -> int:
    """Total lexicographic comparison; returns -1, 0 or 1.  ``inf`` is maximal."""
    return a.cmp(b)


def gv_add(a: GroupValue, b: GroupValue) -> GroupValue:
    """Coordinatewise sum; the top element absorbs."""
    return a + b


def gv_scale(n: RationalLike, a: GroupValue) -> GroupValue:
    """n*a for a nonnegative integer multiplier; 0*inf is the rank-1 zero."""
    n = _as_fraction(n)
    if n == 0:
        return GroupValue.zero()
    return a.scale(n)


def midpoint(a: GroupValue, b: GroupValue) -> GroupValue:
    """The coordinatewise mean; strictly between a and b whenever a < b."""
    return (a + b).scale(Fraction(1, 2))


@dataclass(frozen=True)
class Interval:
    """An open set of the order topology on the value group with top element.

    Two kinds exist.  The default kind is a plain open interval: ``lower``
    may be None (unbounded below) and ``upper`` may be ``INFINITY``
    (unbounded above); the top element never belongs to this kind.  The
    ``ray`` kind is the basic neighbourhood of the top element,
    ``{y : y > lower}``, and contains it.
    """

    lower: Optional[GroupValue]
    upper: GroupValue = INFINITY
    ray: bool = False

    def __post_init__(self):
        if self.ray:
            if self.lower is None or self.lower.is_infinity:
                raise ValueError("a top-neighbourhood needs a finite lower endpoint")
            if not self.upper.is_infinity:
                raise ValueError("a top-neighbourhood has no upper endpoint")
            return
        if self.lower is not None and self.lower.is_infinity:
            raise ValueError("lower endpoint must be finite or None")
        if self.lower is not None and not self.upper.is_infinity:
            if not self.lower < self.upper:
                raise ValueError(
                    f"empty interval: lower {self.lower} must be below upper {self.upper}"
                )

    @staticmethod
    def above(y0: GroupValue) -> "Interval":
        """The neighbourhood {y : y > y0} of the top element."""
        return Interval(lower=y0, upper=INFINITY, ray=True)

    @staticmethod
    def open(lower: Optional[GroupValue], upper: GroupValue) -> "Interval":
        return Interval(lower=lower, upper=upper, ray=False)

    def contains(self, v: GroupValue) -> bool:
        if self.ray:
            return v.is_infinity or self.lower < v
        if v.is_infinity:
            return False
        if self.lower is not None and not self.lower < v:
            return False
        if not self.upper.is_infinity and not v < self.upper:
            return False
        return True

    def __contains__(self, v: GroupValue) -> bool:
        return self.contains(v)

    def intersect(self, other: "Interval") -> "Interval":
        """Intersection, which is again an interval; rejects empty results."""
        if self.ray and other.ray:
            return Interval.above(max(self.lower, other.lower))
        if self.ray or other.ray:
            r = self if self.ray else other
            o = other if self.ray else self
            lower = r.lower if o.lower is None else max(r.lower, o.lower)
            return Interval.open(lower, o.upper)
        if self.lower is None:
            lower = other.lower
        elif other.lower is None:
            lower = self.lower
        else:
            lower = max(self.lower, other.lower)
        upper = min(self.upper, other.upper)
        return Interval.open(lower, upper)

    def sample_points(self, count: int = 5) -> list:
        """Finitely many members, used by the property suites to probe openness."""
        pts = []
        if self.ray:
            pts.append(INFINITY)
            step = ONE
            for k in range(1, count + 1):
                pts.append(self.lower + step.scale(Fraction(1, k)))
            return pts
        if self.lower is None and self.upper.is_infinity:
            base = GroupValue.zero()
            return [base + ONE.scale(k) for k in range(-(count // 2), count - count // 2)]
        if self.lower is None:
            for k in range(1, count + 1):
                pts.append(self.upper - ONE.scale(k))
            return pts
        if self.upper.is_infinity:
            for k in range(1, count + 1):
                pts.append(self.lower + ONE.scale(k))
            return pts
        for k in range(1, count + 1):
            t = Fraction(k, count + 1)
            pts.append(self.lower + (self.upper - self.lower).scale(t))
        return pts

    def __str__(self) -> str:
        if self.ray:
            return "{y>" + str(self.lower) + "}"
        lo = "-inf" if self.lower is None else str(self.lower)
        return f"({lo},{self.upper})"


def separate(a: GroupValue, b: GroupValue) -> tuple:
    """Disjoint open sets U < U' around a < b (the order-separation witness).

    Every member of U is strictly below every member of U'.  For finite
    endpoints the split point is the coordinatewise midpoint; when b is the
    top element the split point is a + 1 and U' is the top-neighbourhood
    above it.
    """
    if not a < b:
        raise ValueError(f"separation needs strictly ordered inputs, got {a} and {b}")
    if b.is_infinity:
        alpha = a + ONE
        return Interval.open(None, alpha), Interval.above(alpha)
    alpha = midpoint(a, b)
    return Interval.open(None, alpha), Interval.open(alpha, INFINITY)


def sum_preimage(a: GroupValue, b: GroupValue, u: Interval) -> tuple:
    """Open sets V around a and V' around b with elementwise V + V' inside U.

    This is the continuity-of-addition witness.  The finite case splits the
    margins of U in half; when one or both inputs are the top element the
    sets are top-neighbourhoods chosen so that finite sums still clear U's
    lower endpoint.
    """
    total = a + b
    if not u.contains(total):
        raise ValueError(f"{a} + {b} = {total} does not lie in {u}")

    if a.is_infinity and b.is_infinity:
        # U is a top-neighbourhood {y > lo}; all mixed sums stay above lo.
        return Interval.above(u.lower), Interval.above(GroupValue.zero())

    if a.is_infinity or b.is_infinity:
        fin = b if a.is_infinity else a
        beta = ONE
        v_inf = Interval.above(u.lower - fin + beta)
        v_fin = Interval.above(fin - beta)
        if a.is_infinity:
            return v_inf, v_fin
        return v_fin, v_inf

    # Both finite.  Work out one-sided margins against U's endpoints.
    if u.ray or u.lower is not None:
        alpha = total - u.lower
    else:
        alpha = ONE
    if not u.ray and not u.upper.is_infinity:
        beta = u.upper - total
    else:
        beta = ONE
    half_a = alpha.scale(Fraction(1, 2))
    half_b = beta.scale(Fraction(1, 2))
    v1 = Interval.open(a - half_a, a + half_b)
    v2 = Interval.open(b - half_a, b + half_b)
    return v1, v2
