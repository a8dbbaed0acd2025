"""Valuations on Q[x] presented as finite augmentation chains.

A chain starts from a monomial valuation (the Gauss valuation when the
root value is 0) and grows by steps (phi, gamma): expand in the monic
pivot phi and take the minimum of the coefficient values plus j*gamma.
Key-polynomial status of a pivot is never decided symbolically here; a
chain is stamped unvalidated until the axiom checker has passed on a
sample, which is the only desk-scale surrogate available.

Chains are immutable after construction and evaluation is pure; a
per-chain memo cache is used internally but observable behaviour is that
of a pure function.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .ordered_values import EQUAL, GREATER, INFINITY, LESS, GroupValue, gv_scale
from .polynomials import Poly, base_val, q_expansion
from .quasicuts import sme_equivalent

NONTRIVIAL_SUPPORT = "nontrivial_support"
RESIDUE_TRANSCENDENTAL = "residue_transcendental"
VALUE_TRANSCENDENTAL = "value_transcendental"
VALUATION_ALGEBRAIC = "valuation_algebraic"

DEFAULT_RANDOM_CHECKS = 200

_X = Poly.variable()


class ChainError(ValueError):
    """An augmentation chain violating a construction invariant."""


@dataclass(frozen=True)
class ValuationChain:
    """A finite augmentation chain over the p-adic rationals.

    ``root_value`` is the monomial value of x at depth 0; ``steps`` is the
    ordered list of (pivot, value) augmentations.  Pivot degrees must be
    non-decreasing, each value must strictly exceed the previous chain's
    value of its pivot, and only the last step may carry the top element.
    A step that merely repeats the current value of the current pivot is
    dropped (it does not change the valuation).
    """

    prime: int
    rank: int
    root_value: GroupValue
    steps: Tuple[Tuple[Poly, GroupValue], ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ChainError("rank must be a positive integer")
        if self.root_value.is_infinity:
            raise ChainError("the root value of x must be finite")
        if self.root_value.rank > self.rank:
            raise ChainError("root value exceeds the declared rank")
        base_val(self.prime, 1)  # primality check
        object.__setattr__(self, "_memo", {})
        object.__setattr__(self, "_validated", False)
        kept: List[Tuple[Poly, GroupValue]] = []
        for phi, gamma in self.steps:
            current = self._partial(kept)
            if not phi.is_monic or phi.is_constant:
                raise ChainError(f"pivot {phi} must be monic and non-constant")
            if not gamma.is_infinity and gamma.rank > self.rank:
                raise ChainError(f"step value {gamma} exceeds the declared rank")
            last_key, _ = _last_pair(self.root_value, kept)
            prev = current.evaluate(phi)
            if prev.is_infinity:
                raise ChainError("cannot augment past a step carrying the top element")
            if gamma == prev and phi == last_key:
                continue  # redundant truncation step; identity on evaluation
            if not prev < gamma:
                raise ChainError(
                    f"step ({phi}, {gamma}) must exceed the current value {prev} of its pivot"
                )
            if kept:
                last_deg = kept[-1][0].degree
                if phi.degree < last_deg:
                    raise ChainError(
                        "pivot degrees must be non-decreasing along the chain "
                        f"({phi} after degree {last_deg})"
                    )
            kept.append((phi, gamma))
        object.__setattr__(self, "steps", tuple(kept))

    def _partial(self, steps: Sequence[Tuple[Poly, GroupValue]]) -> "ValuationChain":
        # Bypasses re-validation: prefixes of a legal chain are legal.
        chain = ValuationChain.__new__(ValuationChain)
        object.__setattr__(chain, "prime", self.prime)
        object.__setattr__(chain, "rank", self.rank)
        object.__setattr__(chain, "root_value", self.root_value)
        object.__setattr__(chain, "steps", tuple(steps))
        object.__setattr__(chain, "_memo", {})
        object.__setattr__(chain, "_validated", False)
        return chain

    # -- construction -----------------------------------------------------

    @staticmethod
    def monomial(prime: int, root_value: GroupValue = GroupValue(0), rank: int = 2) -> "ValuationChain":
        """The depth-0 monomial valuation; the Gauss valuation for root 0."""
        return ValuationChain(prime, rank, root_value)

    @staticmethod
    def gauss(prime: int, rank: int = 2) -> "ValuationChain":
        return ValuationChain.monomial(prime, GroupValue(0), rank)

    # -- structure ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        # Equality of presentations up to folding leading x-steps into the
        # root; equal chains evaluate identically.
        if not isinstance(other, ValuationChain):
            return NotImplemented
        return self.prime == other.prime and self.canonical_seq() == other.canonical_seq()

    def __hash__(self) -> int:
        return hash((self.prime, self.canonical_seq()))

    @property
    def depth(self) -> int:
        return len(self.steps)

    @property
    def validated(self) -> bool:
        return self._validated

    @property
    def last_key(self) -> Poly:
        """The final pivot; x itself for depth-0 chains."""
        return self.steps[-1][0] if self.steps else _X

    @property
    def last_value(self) -> GroupValue:
        return self.steps[-1][1] if self.steps else self.root_value

    def parent(self) -> "ValuationChain":
        """The chain with its last step removed; cached."""
        if not self.steps:
            raise ChainError("a depth-0 chain has no parent")
        cached = getattr(self, "_parent", None)
        if cached is None:
            cached = self._partial(self.steps[:-1])
            object.__setattr__(self, "_parent", cached)
        return cached

    def truncated(self, depth: int) -> "ValuationChain":
        """The chain shortened to the given number of steps."""
        if not 0 <= depth <= self.depth:
            raise ChainError(f"no truncation of depth {depth}")
        chain = self
        while chain.depth > depth:
            chain = chain.parent()
        return chain

    def prefixes(self) -> List["ValuationChain"]:
        """All truncations, shortest first, ending with the chain itself."""
        return [self.truncated(k) for k in range(self.depth + 1)]

    def canonical_seq(self) -> Tuple[Tuple[Poly, GroupValue], ...]:
        """Steps with the root folded in as a leading x-step and runs of the
        same pivot collapsed to their last value; two chains with the same
        sequence evaluate identically (a later step at the same pivot
        replaces the earlier one, since lower-degree coefficients keep their
        values)."""
        cached = getattr(self, "_canonical", None)
        if cached is not None:
            return cached
        seq: List[Tuple[Poly, GroupValue]] = [(_X, self.root_value)]
        for phi, gamma in self.steps:
            if seq[-1][0] == phi and not seq[-1][1].is_infinity:
                seq[-1] = (phi, gamma)
            else:
                seq.append((phi, gamma))
        seq_t = tuple(seq)
        object.__setattr__(self, "_canonical", seq_t)
        return seq_t

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, f: Poly) -> GroupValue:
        """The value of f: expand at the last pivot, evaluate coefficients in
        the truncated chain, take min of coefficient value + j * step value."""
        memo = self._memo
        cached = memo.get(f)
        if cached is not None:
            return cached
        value = self._evaluate(f)
        memo[f] = value
        return value

    def _evaluate(self, f: Poly) -> GroupValue:
        if f.is_zero:
            return INFINITY
        if f.is_constant:
            return base_val(self.prime, f.coeff(0))
        if not self.steps:
            best = None
            for j, c in enumerate(f.coeffs):
                if c == 0:
                    continue
                term = base_val(self.prime, c) + gv_scale(j, self.root_value)
                if best is None or term < best:
                    best = term
            return best
        phi, gamma = self.steps[-1]
        prev = self.parent()
        best = None
        for j, part in enumerate(q_expansion(f, phi)):
            if part.is_zero:
                continue
            if gamma.is_infinity and j > 0:
                continue
            term = prev.evaluate(part) + gv_scale(j, gamma)
            if best is None or term < best:
                best = term
        return INFINITY if best is None else best

    def __call__(self, f: Poly) -> GroupValue:
        return self.evaluate(f)

    # -- inspection -------------------------------------------------------------

    def support(self) -> Optional[Poly]:
        """The support generator: the last pivot when its value is the top
        element, else None."""
        if self.steps and self.steps[-1][1].is_infinity:
            return self.steps[-1][0]
        return None

    def classify(self) -> str:
        """Classification from the final value: top element means nontrivial
        support, a purely archimedean value is residue-transcendental, and an
        infinitesimal part makes it value-transcendental.  Finite chains are
        never valuation-algebraic."""
        gamma = self.last_value
        if gamma.is_infinity:
            return NONTRIVIAL_SUPPORT
        if gamma.has_infinitesimal_part:
            return VALUE_TRANSCENDENTAL
        return RESIDUE_TRANSCENDENTAL

    def degree_sv(self) -> Tuple[int, GroupValue]:
        """Degree of the last pivot and its value (x and the root at depth 0)."""
        return self.last_key.degree, self.last_value

    def mark_validated(self) -> None:
        object.__setattr__(self, "_validated", True)

    def __str__(self) -> str:
        steps = ", ".join(f"({phi.render()}, {gamma})" for phi, gamma in self.steps)
        return (
            "val { p: "
            + str(self.prime)
            + ", rank: "
            + str(self.rank)
            + ", root: "
            + str(self.root_value)
            + ", steps: ["
            + (f" {steps} " if steps else "")
            + "] }"
        )

    def __repr__(self) -> str:
        return f"ValuationChain<{self}>"


def _last_pair(root_value: GroupValue, steps: Sequence[Tuple[Poly, GroupValue]]):
    if steps:
        return steps[-1]
    return _X, root_value


def evaluate(nu: ValuationChain, f: Poly) -> GroupValue:
    return nu.evaluate(f)


def truncation_value(nu, q: Poly, f: Poly) -> GroupValue:
    """min over the q-expansion of f of the value of f_j * q^j.

    The products are evaluated literally, so the formula is meaningful even
    for maps that fail the multiplicative axiom.
    """
    best = None
    qj = Poly.one()
    for part in q_expansion(f, q):
        if not part.is_zero:
            term = nu.evaluate(part * qj)
            if best is None or term < best:
                best = term
        qj = qj * q
    return INFINITY if best is None else best


def augment(mu: ValuationChain, phi: Poly, gamma: GroupValue) -> ValuationChain:
    """Extend a chain by one step (phi, gamma).

    Requires phi monic of degree at least the last pivot's, a finite final
    step on mu, and gamma strictly above mu(phi).  The result is stamped
    unvalidated; run the axiom checker to certify that phi behaved as a
    legal pivot.
    """
    if not phi.is_monic or phi.is_constant:
        raise ChainError(f"augmentation pivot {phi} must be monic and non-constant")
    if mu.last_value.is_infinity:
        raise ChainError("cannot augment past a step carrying the top element")
    if phi.degree < mu.last_key.degree:
        raise ChainError(
            f"pivot degree {phi.degree} below the chain's last degree {mu.last_key.degree}"
        )
    current = mu.evaluate(phi)
    if not current < gamma:
        raise ChainError(f"need mu(phi) = {current} < gamma = {gamma}")
    return ValuationChain(mu.prime, mu.rank, mu.root_value, mu.steps + ((phi, gamma),))


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of checking the three valuation axioms on a finite sample."""

    passed: bool
    axiom: Optional[str] = None
    pair: Optional[Tuple[Poly, Poly]] = None
    detail: str = ""

    def __str__(self) -> str:
        if self.passed:
            return "axioms: pass"
        f, g = self.pair if self.pair else (None, None)
        return f"axioms: {self.axiom} fails on ({f}, {g}): {self.detail}"


def check_axioms(nu, sample_polys: Sequence[Poly]) -> AxiomReport:
    """Check multiplicativity and the ultrametric inequality on all pairs
    from the sample, and the normalisation axiom directly.

    A failure is reported, not raised: it certifies that some augmentation
    pivot was not a legal key polynomial.
    """
    one = nu.evaluate(Poly.one())
    if not (one == GroupValue(0)):
        return AxiomReport(False, "V3", (Poly.one(), Poly.one()), f"value of 1 is {one}")
    zero = nu.evaluate(Poly.zero())
    if not zero.is_infinity:
        return AxiomReport(False, "V3", (Poly.zero(), Poly.zero()), f"value of 0 is {zero}")
    sample = [f for f in sample_polys if not f.is_zero]
    values = {f: nu.evaluate(f) for f in sample}
    for i, f in enumerate(sample):
        for g in sample[i:]:
            product = nu.evaluate(f * g)
            expected = values[f] + values[g]
            if product != expected:
                return AxiomReport(
                    False, "V1", (f, g), f"v(fg) = {product} but v(f)+v(g) = {expected}"
                )
            total = nu.evaluate(f + g)
            floor = min(values[f], values[g])
            if total < floor:
                return AxiomReport(
                    False, "V2", (f, g), f"v(f+g) = {total} below min = {floor}"
                )
    return AxiomReport(True)


def default_validation_sample(
    chain: ValuationChain,
    rng: Optional[random.Random] = None,
    random_count: int = DEFAULT_RANDOM_CHECKS,
) -> List[Poly]:
    """Monomials up to twice the last pivot degree plus random polynomials."""
    rng = rng or random.Random(0)
    deg = chain.last_key.degree
    sample = [Poly.monomial(k) for k in range(0, 2 * deg + 1)]
    pool = [Fraction(n) for n in (-3, -2, -1, 0, 1, 2, 3, 5)] + [Fraction(1, 2), Fraction(3, 4)]
    for _ in range(random_count):
        coeffs = [rng.choice(pool) for _ in range(rng.randint(1, 2 * deg + 1))]
        f = Poly(tuple(coeffs))
        if not f.is_zero:
            sample.append(f)
    return sample


def validate_chain(
    chain: ValuationChain,
    rng: Optional[random.Random] = None,
    random_count: int = DEFAULT_RANDOM_CHECKS,
) -> AxiomReport:
    """Run the behavioural key-polynomial check and stamp the chain on success."""
    report = check_axioms(chain, default_validation_sample(chain, rng, random_count))
    if report.passed:
        chain.mark_validated()
    return report


def support(nu: ValuationChain) -> Optional[Poly]:
    return nu.support()


def classify(nu: ValuationChain) -> str:
    return nu.classify()


def degree_sv(nu: ValuationChain) -> Tuple[int, GroupValue]:
    return nu.degree_sv()


def equivalent(mu: ValuationChain, nu: ValuationChain, samples: Sequence[Poly]) -> bool:
    """Sample-relative equivalence of two validated chains.

    True when the final pivots agree (as polynomials, or each is a pivot of
    the other's final truncation on the sample), the chains agree on all
    sampled polynomials of lower degree, and the final values induce the
    same quasi-cut.  Certified only on the given sample.
    """
    if not mu.validated or not nu.validated:
        raise ValueError("equivalence is only defined for validated chains")
    deg_mu, sv_mu = mu.degree_sv()
    deg_nu, sv_nu = nu.degree_sv()
    if deg_mu != deg_nu:
        return False
    if not sme_equivalent(sv_mu, sv_nu):
        return False
    lower = [f for f in samples if not f.is_zero and f.degree < deg_mu]
    for f in lower:
        if mu.evaluate(f) != nu.evaluate(f):
            return False
    if mu.last_key != nu.last_key:
        # Each final pivot must act as a pivot for the other chain: the
        # other chain's truncation at it must reproduce that chain on the
        # sample.
        probe = [f for f in samples if not f.is_zero]
        for f in probe:
            if truncation_value(mu, nu.last_key, f) != mu.evaluate(f):
                return False
            if truncation_value(nu, mu.last_key, f) != nu.evaluate(f):
                return False
    return True
