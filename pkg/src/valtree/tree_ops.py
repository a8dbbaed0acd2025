"""The tree order on valuation chains: comparison, meets, intervals,
rooted classes, tangent directions and dense betweenness.

The pointwise order quantifies over all polynomials, so equality and
incomparability verdicts here are sample-relative: a structural chain
extension is the only source of a certified strict comparison.  Every
operation that relies on a recipe rather than a definition (notably the
meet) re-verifies its output against the definition on the sample and
fails loudly instead of returning an unchecked answer.

All operations are pure over immutable chains.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .ordered_values import GroupValue, INFINITY, ONE, midpoint
from .polynomials import Poly
from .valuations import (
    ChainError,
    RESIDUE_TRANSCENDENTAL,
    ValuationChain,
    augment,
)

LT = "lt"
GT = "gt"
EQ = "eq"
INCOMPARABLE = "incomparable"

_X = Poly.variable()


@dataclass(frozen=True)
class ComparisonResult:
    """Verdict of a pointwise comparison plus certifying polynomials.

    An incomparable verdict carries two witnesses, one strict in either
    direction; strict verdicts carry one.  ``certified`` is True only when
    the verdict follows from chain structure rather than the sample.
    """

    verdict: str
    witnesses: Tuple[Poly, ...] = ()
    certified: bool = False

    @property
    def is_le(self) -> bool:
        return self.verdict in (LT, EQ)

    @property
    def is_ge(self) -> bool:
        return self.verdict in (GT, EQ)


def default_comparison_sample(
    mu: ValuationChain, nu: ValuationChain, extra: Sequence[Poly] = ()
) -> List[Poly]:
    """Polynomials likely to witness disagreement: the chains' pivots first
    (they are the canonical disagreement points), then products, shifts and
    monomials."""
    keys: List[Poly] = [_X]
    for chain in (mu, nu):
        for phi, _ in chain.canonical_seq():
            if phi not in keys:
                keys.append(phi)
    sample: List[Poly] = list(keys)
    for f, g in itertools.combinations_with_replacement(keys, 2):
        p = f * g
        if p not in sample:
            sample.append(p)
    for f in keys:
        for c in (1, 2):
            shifted = f + Poly.constant(c)
            if shifted not in sample:
                sample.append(shifted)
    max_deg = max(k.degree for k in keys)
    for k in range(1, max_deg + 2):
        m = Poly.monomial(k)
        if m not in sample:
            sample.append(m)
    for c in (2, 3, Fraction(1, 2)):
        sample.append(Poly.constant(c))
    for f in extra:
        if not f.is_zero and f not in sample:
            sample.append(f)
    return sample


def _common_prefix_len(a, b) -> int:
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k


def _structural_compare(mu: ValuationChain, nu: ValuationChain) -> Optional[ComparisonResult]:
    a, b = mu.canonical_seq(), nu.canonical_seq()
    k = _common_prefix_len(a, b)
    if k == len(a) == len(b):
        return ComparisonResult(EQ, certified=True)
    if k == len(a):
        return ComparisonResult(LT, (b[k][0],), certified=True)
    if k == len(b):
        return ComparisonResult(GT, (a[k][0],), certified=True)
    (phi, ga), (psi, gb) = a[k], b[k]
    if phi == psi:
        if ga < gb and k == len(a) - 1:
            return ComparisonResult(LT, (phi,), certified=True)
        if gb < ga and k == len(b) - 1:
            return ComparisonResult(GT, (phi,), certified=True)
    return None


def compare(
    mu: ValuationChain, nu: ValuationChain, samples: Sequence[Poly] = None
) -> ComparisonResult:
    """Decide the pointwise order between two chains.

    A structural fast path certifies extensions; otherwise the verdict is
    decided on the sample, searching the pivots first for incomparability
    witnesses.
    """
    if mu.prime != nu.prime:
        raise ValueError("chains over different base primes are not comparable")
    structural = _structural_compare(mu, nu)
    if structural is not None:
        return structural
    if samples is None:
        samples = default_comparison_sample(mu, nu)
    below: Optional[Poly] = None  # f with mu(f) < nu(f)
    above: Optional[Poly] = None  # g with mu(g) > nu(g)
    for f in samples:
        if f.is_zero:
            continue
        vm, vn = mu.evaluate(f), nu.evaluate(f)
        if vm < vn and below is None:
            below = f
        elif vm > vn and above is None:
            above = f
        if below is not None and above is not None:
            return ComparisonResult(INCOMPARABLE, (below, above))
    if below is not None:
        return ComparisonResult(LT, (below,))
    if above is not None:
        return ComparisonResult(GT, (above,))
    return ComparisonResult(EQ)


def le(mu: ValuationChain, nu: ValuationChain, samples: Sequence[Poly] = None) -> bool:
    return compare(mu, nu, samples).is_le


class MeetVerificationError(RuntimeError):
    """The structural meet recipe produced something that fails the
    definitional checks on the sample."""


def _chain_from_seq(template: ValuationChain, seq) -> ValuationChain:
    root = seq[0][1]
    return ValuationChain(template.prime, template.rank, root, tuple(seq[1:]))


def meet(
    mu: ValuationChain, nu: ValuationChain, samples: Sequence[Poly] = None
) -> ValuationChain:
    """The infimum of two chains in the tree.

    Comparable pairs have the smaller chain as their meet.  For an
    incomparable pair, walk the longest common canonical prefix, then try a
    one-step refinement at each divergence pivot, cut down to the smaller
    of the two chains' actual values there (a later step of a chain can
    raise an earlier pivot's value, so presentation values are not
    trusted).  Every candidate is a genuine lower bound by monomial or
    coefficientwise domination; the winner is still verified against the
    definitional maximality on the sample.
    """
    if samples is None:
        samples = default_comparison_sample(mu, nu)
    verdict = compare(mu, nu, samples)
    if verdict.is_le:
        candidate = mu
    elif verdict.is_ge:
        candidate = nu
    else:
        delta_x = min(mu.evaluate(_X), nu.evaluate(_X))
        rank = max(mu.rank, nu.rank, 1 if delta_x.is_infinity else delta_x.rank)
        candidate = ValuationChain(mu.prime, rank, delta_x)
        pivots: List[Poly] = []
        for chain in (mu, nu):
            for phi, _ in chain.canonical_seq():
                if phi not in pivots and phi != _X:
                    pivots.append(phi)
        pivots.sort(key=lambda p: p.degree)
        changed = True
        while changed:
            changed = False
            for pivot in pivots:
                if pivot.degree < candidate.last_key.degree:
                    continue
                delta = min(mu.evaluate(pivot), nu.evaluate(pivot))
                if delta.is_infinity or not candidate.evaluate(pivot) < delta:
                    continue
                try:
                    ext = augment(candidate, pivot, delta)
                except ChainError:
                    continue
                if compare(ext, mu, samples).is_le and compare(ext, nu, samples).is_le:
                    candidate = ext
                    changed = True
    _verify_meet(candidate, mu, nu, samples)
    return candidate


def _verify_meet(candidate, mu, nu, samples) -> None:
    if not compare(candidate, mu, samples).is_le or not compare(candidate, nu, samples).is_le:
        raise MeetVerificationError(
            f"candidate meet {candidate} is not a lower bound of {mu} and {nu}"
        )
    for bound in mu.prefixes() + nu.prefixes():
        if compare(bound, mu, samples).is_le and compare(bound, nu, samples).is_le:
            if not compare(bound, candidate, samples).is_le:
                raise MeetVerificationError(
                    f"sampled lower bound {bound} exceeds candidate meet {candidate}"
                )


def in_interval(
    eta: ValuationChain,
    mu: ValuationChain,
    nu: ValuationChain,
    samples: Sequence[Poly] = None,
) -> bool:
    """Whether eta lies on the path [mu, nu]: between the meet and one end."""
    if samples is None:
        samples = default_comparison_sample(mu, nu, extra=default_comparison_sample(eta, mu))
    bottom = meet(mu, nu, samples)
    if not compare(bottom, eta, samples).is_le:
        return False
    return compare(eta, mu, samples).is_le or compare(eta, nu, samples).is_le


def same_class(
    nu: ValuationChain,
    eta: ValuationChain,
    mu: ValuationChain,
    samples: Sequence[Poly] = None,
) -> bool:
    """The class relation at mu: two chains are together iff mu is not on
    the path between them.  Rejects arguments equal to mu."""
    if nu.canonical_seq() == mu.canonical_seq() or eta.canonical_seq() == mu.canonical_seq():
        raise ValueError("class membership at mu is defined away from mu itself")
    return not in_interval(mu, nu, eta, samples)


@dataclass(frozen=True)
class TangentResult:
    poly: Poly
    method: str  # "structural" or "bounded-search"


def _height_pool(bound: int) -> List[Fraction]:
    pool = []
    for den in range(1, bound + 1):
        for num in range(-bound, bound + 1):
            q = Fraction(num, den)
            if q.denominator == den:
                pool.append(q)
    pool.sort(key=lambda q: (q.denominator, abs(q.numerator), q < 0))
    return pool


def tangent_direction_ex(
    mu: ValuationChain,
    nu: ValuationChain,
    samples: Sequence[Poly] = None,
    height_bound: int = 16,
) -> TangentResult:
    """One monic polynomial of minimal degree where the larger chain is
    strictly larger.

    Structural path: the pivot at which the chains diverge (the last shared
    pivot when only its value grew).  Fallback: brute force over monic
    polynomials of increasing degree with coefficient height bounded, which
    is flagged as a bounded search.
    """
    verdict = compare(mu, nu, samples)
    if verdict.verdict != LT:
        raise ValueError("tangent directions are defined for strictly smaller first argument")
    a, b = mu.canonical_seq(), nu.canonical_seq()
    k = _common_prefix_len(a, b)
    if k == len(a) and k < len(b):
        return TangentResult(b[k][0], "structural")
    if k < len(a) and k < len(b) and a[k][0] == b[k][0]:
        return TangentResult(a[k][0], "structural")
    for degree in range(1, nu.last_key.degree + 1):
        pool = _height_pool(height_bound)
        for tail in itertools.product(pool, repeat=degree):
            phi = Poly(tuple(tail) + (Fraction(1),))
            if mu.evaluate(phi) < nu.evaluate(phi):
                return TangentResult(phi, "bounded-search")
    raise ValueError(
        f"no tangent direction found up to degree {nu.last_key.degree} "
        f"and height {height_bound} (bounded search exhausted)"
    )


def tangent_direction(
    mu: ValuationChain,
    nu: ValuationChain,
    samples: Sequence[Poly] = None,
    height_bound: int = 16,
) -> Poly:
    return tangent_direction_ex(mu, nu, samples, height_bound).poly


def _between_value(a: GroupValue, b: GroupValue) -> GroupValue:
    """Deterministic choice strictly between a < b: archimedean mean when
    both are purely rational, the rational just at b's archimedean part when
    that separates, else the coordinatewise mean; one above a when b is the
    top element."""
    if b.is_infinity:
        return a + ONE
    if not a.has_infinitesimal_part and not b.has_infinitesimal_part:
        return GroupValue((a.first + b.first) / 2)
    candidate = GroupValue(b.first)
    if a < candidate < b:
        return candidate
    return midpoint(a, b)


def strict_between(
    mu: ValuationChain, nu: ValuationChain, samples: Sequence[Poly] = None
) -> ValuationChain:
    """A chain strictly inside the open interval (mu, nu).

    For comparable inputs this augments mu along a tangent direction at a
    value strictly between the two values of that pivot; for incomparable
    inputs the meet already lies strictly between.  The strict inequalities
    are re-verified on the sample.
    """
    if samples is None:
        samples = default_comparison_sample(mu, nu)
    verdict = compare(mu, nu, samples)
    if verdict.verdict == INCOMPARABLE:
        return meet(mu, nu, samples)
    if verdict.verdict != LT:
        raise ValueError("strict betweenness needs mu strictly below nu (or incomparable)")
    phi = tangent_direction(mu, nu, samples)
    gamma = _between_value(mu.evaluate(phi), nu.evaluate(phi))
    eta = augment(mu, phi, gamma)
    if compare(mu, eta, samples).verdict != LT or compare(eta, nu, samples).verdict != LT:
        raise RuntimeError(
            f"betweenness construction failed verification for {mu} < {eta} < {nu}"
        )
    return eta


@dataclass(frozen=True)
class DirectionPartition:
    """The classes at mu of a finite sample of other chains.

    ``classes`` lists the sample partitioned by the class relation at mu;
    ``below_index`` points at the class of chains not above mu, when the
    sample has any.  ``tangents`` holds one tangent pivot per above-class.
    ``consistent`` records that the not-above chains formed exactly one
    class and that each above-class shared its tangent while distinct
    classes did not.
    """

    classes: Tuple[Tuple[ValuationChain, ...], ...]
    below_index: Optional[int]
    tangents: Tuple[Optional[Poly], ...]
    consistent: bool
    detail: str = ""


def classify_directions(
    mu: ValuationChain,
    sample: Sequence[ValuationChain],
    samples: Sequence[Poly] = None,
) -> DirectionPartition:
    """Partition a sample by the class relation at mu and cross-check the
    partition against the order and the tangent directions."""
    seq_mu = mu.canonical_seq()
    for rho in sample:
        if rho.canonical_seq() == seq_mu:
            raise ValueError("the reference chain must not occur in the sample")
    classes: List[List[ValuationChain]] = []
    for rho in sample:
        placed = False
        for group in classes:
            if same_class(group[0], rho, mu, samples):
                group.append(rho)
                placed = True
                break
        if not placed:
            classes.append([rho])

    above_flags = [compare(mu, rho, samples).verdict == LT for rho in sample]
    flag_of = dict(zip(map(id, sample), above_flags))
    below_index = None
    consistent = True
    detail = ""
    tangents: List[Optional[Poly]] = []
    for idx, group in enumerate(classes):
        group_above = [flag_of[id(rho)] for rho in group]
        if all(group_above):
            tangents.append(tangent_direction(mu, group[0], samples))
        elif not any(group_above):
            tangents.append(None)
            if below_index is not None:
                consistent = False
                detail = "chains not above the reference split into several classes"
            below_index = idx
        else:
            tangents.append(None)
            consistent = False
            detail = "a class mixes chains above and not above the reference"

    if consistent:
        for idx, group in enumerate(classes):
            phi = tangents[idx]
            if phi is None:
                continue
            base = mu.evaluate(phi)
            for rho in group:
                if not base < rho.evaluate(phi):
                    consistent = False
                    detail = f"class tangent {phi} is not shared by all members"
            for jdx, other in enumerate(classes):
                if jdx == idx or tangents[jdx] is None:
                    continue
                # A tangent pivot strict on a member of another class at the
                # same minimal degree would merge the two directions.
                if tangents[jdx].degree == phi.degree:
                    for rho in other:
                        if base < rho.evaluate(phi):
                            consistent = False
                            detail = (
                                f"tangent {phi} of one class is strict on {rho} "
                                "from another class of the same degree"
                            )
    return DirectionPartition(
        classes=tuple(tuple(g) for g in classes),
        below_index=below_index,
        tangents=tuple(tangents),
        consistent=consistent,
        detail=detail,
    )
