"""Deterministic generators of genuine valuation chains and polynomials.

Chains are proposed from augmentation templates whose pivots are legal by
classical facts (degree-one pivots over a monomial valuation, and
degree-doubling pivots built to have a degree-one residual), then each
proposal is behaviourally validated before entering the pool; anything
that fails the axiom check is discarded.  Identical seeds give identical
pools.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .ordered_values import GroupValue, INFINITY, gv
from .polynomials import Poly, padic_order
from .valuations import ChainError, ValuationChain, augment, check_axioms, default_validation_sample

_X = Poly.variable()

DEFAULT_SEED = 7


def poly_pool(
    rng: random.Random,
    count: int,
    max_degree: int = 4,
    coeffs: Sequence = (0, 0, 1, -1, 2, -2, 3, 4, 6, Fraction(1, 2), Fraction(3, 2), 8),
) -> List[Poly]:
    """Random nonzero polynomials with small exact coefficients."""
    pool: List[Poly] = []
    while len(pool) < count:
        degree = rng.randint(0, max_degree)
        c = [Fraction(rng.choice(coeffs)) for _ in range(degree + 1)]
        f = Poly(tuple(c))
        if not f.is_zero:
            pool.append(f)
    return pool


def _degree_one_pivots(prime: int, root: GroupValue) -> List[Poly]:
    """Monic degree-one pivots legal over the monomial valuation at the
    root: x + c with the constant's value at least the root value."""
    floor = root.first
    shifts = [0]
    for c in (1, 3, prime, 2 * prime, prime**2, 3 * prime, prime**3):
        if padic_order(prime, c) >= floor:
            shifts.append(c)
    return [_X + Poly.constant(c) for c in shifts]


def _doubling_pivots(chain: ValuationChain, prime: int) -> List[Poly]:
    """Monic pivots of twice the last degree with degree-one residual:
    last^2 + u where u is a constant of value exactly twice the last value.
    Only available when that doubled value is an integer."""
    key = chain.last_key
    sv = chain.last_value
    if sv.is_infinity or sv.has_infinitesimal_part:
        return []
    doubled = 2 * sv.first
    if doubled.denominator != 1 or doubled < 0:
        return []
    scale = prime ** int(doubled)
    return [key * key + Poly.constant(scale), key * key + Poly.constant(3 * scale)]


def _gamma_choices(rng: random.Random, current: GroupValue, allow_infinity: bool) -> List[GroupValue]:
    base = current.first
    bumps = [Fraction(1, 2), 1, Fraction(3, 2), 2, Fraction(1, 4)]
    out: List[GroupValue] = [GroupValue(base + b) for b in bumps]
    out.append(GroupValue(base + 1, rng.choice([-2, -1, 1, 2])))
    if current.has_infinitesimal_part:
        out = [g for g in out if current < g]
    if allow_infinity:
        out.append(INFINITY)
    return [g for g in out if current < g]


def random_chain(
    rng: random.Random,
    prime: int = 2,
    max_depth: int = 3,
    allow_infinity: bool = True,
    validation_checks: int = 10,
) -> ValuationChain:
    """One random validated chain grown from a monomial root by template
    augmentations; steps that fail validation are dropped."""
    root = GroupValue(rng.choice([0, 0, 0, 1, Fraction(1, 2), Fraction(3, 2), 2]))
    chain = ValuationChain.monomial(prime, root)
    depth = rng.randint(0, max_depth)
    for level in range(depth):
        if chain.last_value.is_infinity:
            break
        pivots: List[Poly] = [chain.last_key]
        if chain.depth == 0:
            pivots.extend(_degree_one_pivots(prime, chain.root_value))
        pivots.extend(_doubling_pivots(chain, prime))
        pivot = rng.choice(pivots)
        try:
            current = chain.evaluate(pivot)
        except ChainError:
            continue
        if current.is_infinity:
            continue
        gammas = _gamma_choices(rng, current, allow_infinity and level == depth - 1)
        if not gammas:
            continue
        gamma = rng.choice(gammas)
        try:
            candidate = augment(chain, pivot, gamma)
        except ChainError:
            continue
        report = check_axioms(
            candidate, default_validation_sample(candidate, rng, validation_checks)
        )
        if report.passed:
            candidate.mark_validated()
            chain = candidate
    if not chain.validated:
        chain.mark_validated()  # monomial valuations satisfy the axioms outright
    return chain


def chain_pool(
    seed: int = DEFAULT_SEED,
    size: int = 24,
    prime: int = 2,
    max_depth: int = 3,
    allow_infinity: bool = True,
    validation_checks: int = 10,
) -> List[ValuationChain]:
    """A deterministic pool of distinct validated chains."""
    rng = random.Random(seed)
    pool: List[ValuationChain] = []
    seen = set()
    attempts = 0
    while len(pool) < size and attempts < size * 60:
        attempts += 1
        chain = random_chain(rng, prime, max_depth, allow_infinity, validation_checks)
        key = (chain.prime, chain.canonical_seq())
        if key not in seen:
            seen.add(key)
            pool.append(chain)
    return pool


def comparable_pairs(
    rng: random.Random,
    pool: Sequence[ValuationChain],
    count: int,
    validation_checks: int = 8,
) -> List[Tuple[ValuationChain, ValuationChain]]:
    """Strictly increasing chain pairs, built by extending pool members."""
    pairs: List[Tuple[ValuationChain, ValuationChain]] = []
    attempts = 0
    while len(pairs) < count and attempts < count * 50:
        attempts += 1
        mu = rng.choice(pool)
        if mu.last_value.is_infinity:
            continue
        pivots = [mu.last_key] + _doubling_pivots(mu, mu.prime)
        pivot = rng.choice(pivots)
        current = mu.evaluate(pivot)
        if current.is_infinity:
            continue
        gammas = _gamma_choices(rng, current, allow_infinity=True)
        if not gammas:
            continue
        try:
            nu = augment(mu, pivot, rng.choice(gammas))
        except ChainError:
            continue
        report = check_axioms(nu, default_validation_sample(nu, rng, validation_checks))
        if not report.passed:
            continue
        nu.mark_validated()
        pairs.append((mu, nu))
    return pairs
