"""Increasing families of valuations: stability, limit pivots, suprema.

A family is presented finitely, either as an explicit strictly increasing
list of chains or as a parametric rule: a base chain, a pivot, and a
symbolic increasing rational value sequence.  Stability of a polynomial
along a parametric family is decided symbolically from its pivot
expansion; explicit families certify only instability (a witness) or
report undetermined, never stability without a declared tail.

Family evaluation is pure given the presentation; the per-descriptor
checks of the net-limit verifier are independent of each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .ordered_values import GroupValue, INFINITY, gv_scale
from .polynomials import Poly, q_expansion
from .quasicuts import (
    ATTAINED,
    IRRATIONAL,
    LimitDescriptor,
    QuasiCut,
    RationalSequence,
    UNATTAINED,
    UNBOUNDED,
    qc_of_value,
    qc_representative,
    qc_sup,
)
from .tree_ops import LT, compare, default_comparison_sample, in_interval, same_class
from .valuations import (
    ChainError,
    VALUATION_ALGEBRAIC,
    ValuationChain,
    augment,
)

AFFINE = "affine"
GEOMETRIC = "geometric"


class UnstableQueryError(ValueError):
    """A stable-limit valuation was asked for an unstable polynomial."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class GammaRule:
    """A symbolic strictly increasing rational sequence.

    ``affine``: value(i) = a + b*i with b > 0 (unbounded).
    ``geometric``: value(i) = a - b*r^i with b > 0 and 0 < r < 1, increasing
    to the unattained limit a.
    """

    kind: str
    a: Fraction
    b: Fraction
    r: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.kind == AFFINE:
            if self.b <= 0:
                raise ValueError("an increasing affine rule needs a positive slope")
            if self.r is not None:
                raise ValueError("affine rules carry no ratio")
        elif self.kind == GEOMETRIC:
            if self.b <= 0:
                raise ValueError("a geometric rule needs a positive decay coefficient")
            r = Fraction(self.r)
            if not 0 < r < 1:
                raise ValueError("a geometric rule needs a ratio strictly between 0 and 1")
            object.__setattr__(self, "r", r)
        else:
            raise ValueError(f"unknown rule kind {self.kind!r}")

    def value(self, i: int) -> Fraction:
        if self.kind == AFFINE:
            return self.a + self.b * i
        return self.a - self.b * self.r**i

    def descriptor(self) -> LimitDescriptor:
        if self.kind == AFFINE:
            return LimitDescriptor(UNBOUNDED)
        return LimitDescriptor(UNATTAINED, self.a)

    def __str__(self) -> str:
        if self.kind == AFFINE:
            slope = "i" if self.b == 1 else f"{self.b}*i"
            return slope if self.a == 0 else f"{self.a} + {slope}"
        decay = f"{self.r}^i" if self.b == 1 else f"{self.b}*{self.r}^i"
        return f"{self.a} - {decay}"


PARAMETRIC = "parametric"
EXPLICIT = "explicit"


class IncreasingFamily:
    """A totally ordered family of chains with no maximum, finitely presented."""

    def __init__(
        self,
        kind: str,
        base: Optional[ValuationChain] = None,
        key: Optional[Poly] = None,
        rule: Optional[GammaRule] = None,
        members: Sequence[ValuationChain] = (),
        declared_tail_stable: bool = False,
        declared_limit: Optional[LimitDescriptor] = None,
        samples: Sequence[Poly] = None,
    ):
        self.kind = kind
        if kind == PARAMETRIC:
            if base is None or key is None or rule is None:
                raise ValueError("a parametric family needs a base chain, a pivot and a rule")
            if not key.is_monic or key.is_constant:
                raise ValueError("the family pivot must be monic and non-constant")
            if base.last_value.is_infinity:
                raise ValueError("the base chain must not carry the top element")
            self.base = base
            self.key = key
            self.rule = rule
            base_value = base.evaluate(key)
            first = GroupValue(rule.value(0))
            if first < base_value:
                raise ValueError(
                    f"rule value {first} at index 0 falls below the base value {base_value} of the pivot"
                )
            self.declared_limit = rule.descriptor()
            self.members_list: Tuple[ValuationChain, ...] = ()
            self.declared_tail_stable = False
        elif kind == EXPLICIT:
            members = tuple(members)
            if len(members) < 2:
                raise ValueError("an explicit family needs at least two members")
            probe = samples
            for a, b in zip(members, members[1:]):
                if probe is None:
                    probe = default_comparison_sample(a, b)
                if compare(a, b, probe).verdict != LT:
                    raise ValueError(
                        f"explicit members must strictly increase; {a} is not below {b}"
                    )
            self.members_list = members
            self.declared_tail_stable = declared_tail_stable
            self.declared_limit = declared_limit
            self.base = members[0]
            self.key = key
            self.rule = None
        else:
            raise ValueError(f"unknown family kind {kind!r}")

    # -- members -----------------------------------------------------------

    def member(self, i: int) -> ValuationChain:
        if self.kind == EXPLICIT:
            return self.members_list[i]
        gamma = GroupValue(self.rule.value(i))
        current = self.base.evaluate(self.key)
        if gamma == current:
            # The augmentation at the current value is the identity
            # truncation for a legal pivot.
            return self.base
        return augment(self.base, self.key, gamma)

    def members(self, count: int = 6) -> List[ValuationChain]:
        if self.kind == EXPLICIT:
            return list(self.members_list[:count])
        return [self.member(i) for i in range(count)]

    def member_count(self) -> Optional[int]:
        return len(self.members_list) if self.kind == EXPLICIT else None

    def __str__(self) -> str:
        if self.kind == PARAMETRIC:
            return (
                "fam { base: "
                + str(self.base)
                + ", key: "
                + self.key.render()
                + ', gamma: "'
                + str(self.rule)
                + '", limit: "'
                + str(self.declared_limit)
                + '" }'
            )
        body = ", ".join(str(m) for m in self.members_list)
        extras = ""
        if self.declared_limit is not None:
            extras += f', limit: "{self.declared_limit}"'
        if self.declared_tail_stable:
            extras += ", tail: stable"
        return "fam { explicit: [ " + body + " ]" + extras + " }"


STABLE = "stable"
UNSTABLE = "unstable"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class StabilityVerdict:
    """Whether a polynomial's values along the family become constant.

    ``stable`` carries the eventual value and the index from which it is
    taken; ``unstable`` carries a witness pair of indices with strictly
    increasing values.
    """

    kind: str
    value: Optional[GroupValue] = None
    index: Optional[int] = None
    witness: Optional[Tuple[int, int, GroupValue, GroupValue]] = None

    def __str__(self) -> str:
        if self.kind == STABLE:
            return f"stable({self.value} from index {self.index})"
        if self.kind == UNSTABLE:
            i, j, vi, vj = self.witness
            return f"unstable(v_{i} = {vi} < v_{j} = {vj})"
        return "undetermined"


def _parametric_value_at(fam: IncreasingFamily, parts: Sequence[Poly], i: int) -> GroupValue:
    gamma = GroupValue(fam.rule.value(i))
    best = None
    for j, part in enumerate(parts):
        if part.is_zero:
            continue
        term = fam.base.evaluate(part) + gv_scale(j, gamma)
        if best is None or term < best:
            best = term
    return INFINITY if best is None else best


def is_stable(f: Poly, fam: IncreasingFamily, cutoff: int = 64) -> StabilityVerdict:
    """Stability of f along the family.

    Parametric families are decided symbolically: the value sequence is a
    minimum of one constant term (the pivot-free coefficient) and finitely
    many strictly increasing terms, so f is stable exactly when each
    increasing term eventually clears the constant one.  Explicit families
    yield a witness, a declared-tail value, or undetermined at the cutoff.
    """
    if cutoff < 2:
        raise ValueError("the cutoff must be at least 2")
    if f.is_zero:
        return StabilityVerdict(STABLE, INFINITY, 0)
    if fam.kind == EXPLICIT:
        members = fam.members_list[:cutoff]
        values = [m.evaluate(f) for m in members]
        for i in range(len(values) - 1):
            if values[i] < values[i + 1]:
                return StabilityVerdict(
                    UNSTABLE, witness=(i, i + 1, values[i], values[i + 1])
                )
        if fam.declared_tail_stable:
            last = values[-1]
            index = len(values) - 1
            while index > 0 and values[index - 1] == last:
                index -= 1
            return StabilityVerdict(STABLE, last, index)
        return StabilityVerdict(UNDETERMINED)

    parts = q_expansion(f, fam.key)
    if len(parts) == 1:
        return StabilityVerdict(STABLE, fam.base.evaluate(f), 0)
    constant = fam.base.evaluate(parts[0]) if not parts[0].is_zero else None
    rule = fam.rule
    stable = constant is not None
    if stable and rule.kind == GEOMETRIC:
        for j, part in enumerate(parts):
            if j == 0 or part.is_zero:
                continue
            ceiling = fam.base.evaluate(part).first + j * rule.a
            if not constant.first < ceiling:
                stable = False
                break
    if not stable:
        v0 = _parametric_value_at(fam, parts, 0)
        v1 = _parametric_value_at(fam, parts, 1)
        if not v0 < v1:
            raise RuntimeError(f"expected strictly increasing values for unstable {f}")
        return StabilityVerdict(UNSTABLE, witness=(0, 1, v0, v1))
    index = 0
    while index < cutoff:
        gamma = GroupValue(rule.value(index))
        if all(
            part.is_zero or constant <= fam.base.evaluate(part) + gv_scale(j, gamma)
            for j, part in enumerate(parts)
            if j >= 1
        ):
            return StabilityVerdict(STABLE, constant, index)
        index += 1
    return StabilityVerdict(UNDETERMINED)


def stable_value(fam: IncreasingFamily, f: Poly, cutoff: int = 64) -> GroupValue:
    verdict = is_stable(f, fam, cutoff)
    if verdict.kind == STABLE:
        return verdict.value
    if verdict.kind == UNSTABLE:
        raise UnstableQueryError(
            f"{f} is unstable along the family: {verdict}", verdict.witness
        )
    raise UnstableQueryError(f"stability of {f} is undetermined at cutoff {cutoff}")


@dataclass(frozen=True)
class LimitKeyResult:
    poly: Poly
    method: str  # "parametric" or "bounded-search"


def limit_key_poly_ex(
    fam: IncreasingFamily, height_bound: int = 4, max_degree: int = 4
) -> LimitKeyResult:
    """A monic unstable polynomial of smallest degree.

    For a parametric family this is the family pivot: lower-degree
    polynomials are their own pivot expansion and take the constant base
    value.  For explicit families a bounded-height search is run and the
    result flagged accordingly; an all-stable family is an error.
    """
    if fam.kind == PARAMETRIC:
        return LimitKeyResult(fam.key, "parametric")
    pool = [Fraction(n, d) for d in (1, 2) for n in range(-height_bound * 2, height_bound * 2 + 1)]
    pool = sorted(set(pool), key=lambda q: (q.denominator, abs(q.numerator), q < 0))
    for degree in range(1, max_degree + 1):
        for tail in itertools.product(pool, repeat=degree):
            phi = Poly(tuple(tail) + (Fraction(1),))
            if is_stable(phi, fam).kind == UNSTABLE:
                return LimitKeyResult(phi, "bounded-search")
    raise UnstableQueryError(
        "no unstable polynomial found under the bounded search; "
        "an all-stable family has a stable limit instead"
    )


def limit_key_poly(fam: IncreasingFamily, height_bound: int = 4, max_degree: int = 4) -> Poly:
    return limit_key_poly_ex(fam, height_bound, max_degree).poly


def _value_cut(fam: IncreasingFamily, q: Poly) -> QuasiCut:
    """The quasi-cut of sup of the family's values at an unstable q."""
    verdict = is_stable(q, fam)
    if verdict.kind != UNSTABLE:
        raise ValueError(f"{q} is not unstable along the family ({verdict})")
    if fam.kind == PARAMETRIC:
        descriptor = fam.rule.descriptor()
        if q != fam.key:
            # Same-degree unstable pivots share the tail values with the key.
            if q.degree != fam.key.degree:
                raise ValueError("an unstable polynomial of non-minimal degree has no canonical cut")
        return qc_sup(RationalSequence((), descriptor))
    if fam.declared_limit is None:
        raise ValueError("an explicit family needs a declared limit descriptor for its sup")
    values = [m.evaluate(q) for m in fam.members_list]
    prefix: Tuple[Fraction, ...] = ()
    if all(not v.is_infinity and not v.has_infinitesimal_part for v in values):
        prefix = tuple(v.first for v in values)
    return qc_sup(RationalSequence(prefix, fam.declared_limit))


def sup_gamma(fam: IncreasingFamily, q: Poly) -> GroupValue:
    """The canonical representative of the cut defined by the family's
    values at an unstable q: a just-below representative or the top element.
    A strictly increasing value sequence never attains its limit, so a
    principal representative cannot occur."""
    return qc_representative(_value_cut(fam, q))


class LimitValuation:
    """A valuation obtained from an increasing family.

    ``stable`` kind: evaluation takes the stabilised family value and is
    classified valuation-algebraic.  ``augmented`` kind: evaluation expands
    at the limit pivot and takes min of stable coefficient values plus
    j * gamma."""

    def __init__(
        self,
        kind: str,
        family: IncreasingFamily,
        key: Optional[Poly] = None,
        gamma: Optional[GroupValue] = None,
    ):
        if kind not in ("stable", "augmented"):
            raise ValueError(f"unknown limit kind {kind!r}")
        self.kind = kind
        self.family = family
        self.key = key
        self.gamma = gamma
        self._memo = {}

    def evaluate(self, f: Poly) -> GroupValue:
        cached = self._memo.get(f)
        if cached is not None:
            return cached
        value = self._evaluate(f)
        self._memo[f] = value
        return value

    def _evaluate(self, f: Poly) -> GroupValue:
        if f.is_zero:
            return INFINITY
        if self.kind == "stable":
            return stable_value(self.family, f)
        best = None
        for j, part in enumerate(q_expansion(f, self.key)):
            if part.is_zero:
                continue
            if self.gamma.is_infinity and j > 0:
                continue
            term = stable_value(self.family, part) + gv_scale(j, self.gamma)
            if best is None or term < best:
                best = term
        return INFINITY if best is None else best

    def __call__(self, f: Poly) -> GroupValue:
        return self.evaluate(f)

    def classify(self) -> str:
        if self.kind == "stable":
            return VALUATION_ALGEBRAIC
        if self.gamma.is_infinity:
            return "nontrivial_support"
        if self.gamma.has_infinitesimal_part:
            return "value_transcendental"
        return "residue_transcendental"

    def degree_sv(self) -> Tuple[int, GroupValue]:
        if self.kind == "stable":
            raise ValueError("a stable limit has no final pivot data")
        return self.key.degree, self.gamma

    def as_chain(self) -> Optional[ValuationChain]:
        """An ordinary chain with the same evaluations, when one exists.

        Parametric augmented limits are the base chain augmented at the
        limit pivot; declared-tail explicit limits reduce to their last
        member (optionally augmented)."""
        if self.kind == "stable":
            if self.family.kind == EXPLICIT and self.family.declared_tail_stable:
                return self.family.members_list[-1]
            return None
        anchor: Optional[ValuationChain] = None
        if self.family.kind == PARAMETRIC:
            anchor = self.family.base
        elif self.family.declared_tail_stable:
            anchor = self.family.members_list[-1]
        if anchor is None:
            return None
        try:
            return augment(anchor, self.key, self.gamma)
        except ChainError:
            return None

    def __str__(self) -> str:
        if self.kind == "stable":
            return f"limit {{ stable, family: {self.family} }}"
        return f"limit {{ key: {self.key.render()}, gamma: {self.gamma}, family: {self.family} }}"


def limit_augment(fam: IncreasingFamily, q: Poly, gamma: GroupValue) -> LimitValuation:
    """The limit valuation at pivot q and value gamma above the whole family.

    q must be unstable of minimal degree; gamma must lie at or above the
    cut of the family's values at q (so it exceeds every member's value)."""
    if not q.is_monic or q.is_constant:
        raise ValueError("the limit pivot must be monic and non-constant")
    canonical = limit_key_poly(fam)
    if q.degree != canonical.degree:
        raise ValueError(
            f"limit pivot degree {q.degree} differs from the minimal unstable degree {canonical.degree}"
        )
    cut = _value_cut(fam, q)  # also checks q is unstable
    if not gamma.is_infinity:
        if qc_of_value(gamma) < cut:
            raise ValueError(f"gamma = {gamma} does not exceed the family values at {q}")
    if fam.kind == EXPLICIT:
        for member in fam.members_list:
            if not member.evaluate(q) < gamma:
                raise ValueError(
                    f"gamma = {gamma} does not exceed the value of {q} at a listed member"
                )
    return LimitValuation("augmented", fam, q, gamma)


def stable_limit(fam: IncreasingFamily) -> LimitValuation:
    """The valuation taking every polynomial to its stabilised value.

    Evaluation errors with a witness on any unstable query; classified
    valuation-algebraic."""
    return LimitValuation("stable", fam)


@dataclass(frozen=True)
class SupremumReport:
    """Sampled evidence that a limit valuation is the least upper bound."""

    upper_bound_ok: bool
    non_minimal: Tuple[str, ...]
    q_independence_ok: bool
    q_independence_tested: int
    details: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.upper_bound_ok and not self.non_minimal and self.q_independence_ok

    def __str__(self) -> str:
        lines = [
            f"upper bound on samples: {'ok' if self.upper_bound_ok else 'FAILED'}",
            (
                "minimality: ok"
                if not self.non_minimal
                else "minimality: non-minimal against " + "; ".join(self.non_minimal)
            ),
            f"pivot independence ({self.q_independence_tested} alternatives): "
            + ("ok" if self.q_independence_ok else "FAILED"),
        ]
        lines.extend(self.details)
        return "\n".join(lines)


def verify_supremum(
    limit,
    fam: IncreasingFamily,
    candidates: Sequence = (),
    samples: Sequence[Poly] = (),
    prefix_count: int = 6,
) -> SupremumReport:
    """Check the least-upper-bound contract of a limit on samples.

    Verifies that every prefix member stays below the limit, that no
    candidate upper bound sits strictly below it, and that rebuilding the
    limit from a shifted pivot q + h (h stable of lower degree, shift kept
    unstable) does not change any sampled evaluation.
    """
    samples = [f for f in samples if not f.is_zero]
    details: List[str] = []
    upper_ok = True
    for member in fam.members(prefix_count):
        for f in samples:
            if not member.evaluate(f) <= limit.evaluate(f):
                upper_ok = False
                details.append(f"member {member} exceeds the limit at {f}")
    non_minimal: List[str] = []
    for cand in candidates:
        is_upper = all(
            member.evaluate(f) <= cand.evaluate(f)
            for member in fam.members(prefix_count)
            for f in samples
        )
        below_limit = all(cand.evaluate(f) <= limit.evaluate(f) for f in samples)
        if is_upper and below_limit:
            agrees = all(cand.evaluate(f) == limit.evaluate(f) for f in samples)
            if not agrees:
                non_minimal.append(str(cand))
    q_ok = True
    tested = 0
    if getattr(limit, "kind", None) == "augmented":
        q = limit.key
        shifts: List[Poly] = []
        for h in samples:
            if h.degree is not None and h.degree < q.degree and len(shifts) < 4:
                candidate_pivot = q + h
                try:
                    if is_stable(candidate_pivot, fam).kind == UNSTABLE:
                        shifts.append(h)
                except UnstableQueryError:
                    continue
        for h in shifts:
            tested += 1
            alt = limit_augment(fam, q + h, limit.gamma)
            for f in samples:
                if alt.evaluate(f) != limit.evaluate(f):
                    q_ok = False
                    details.append(f"pivot shift by {h} changes the value at {f}")
    return SupremumReport(upper_ok, tuple(non_minimal), q_ok, tested, tuple(details))


@dataclass(frozen=True)
class NetLimitReport:
    """Cofinal membership thresholds of the family in sub-basic classes."""

    thresholds: Tuple[Optional[int], ...]
    prefix_count: int

    @property
    def passed(self) -> bool:
        return all(t is not None for t in self.thresholds)

    def __str__(self) -> str:
        parts = [
            f"descriptor {i}: " + (f"members in class from index {t}" if t is not None else "NO threshold")
            for i, t in enumerate(self.thresholds)
        ]
        return "\n".join(parts)


def net_limit_check(
    fam: IncreasingFamily,
    candidate,
    descriptors: Sequence[Tuple[ValuationChain, ValuationChain]],
    prefix_count: int = 12,
    samples: Sequence[Poly] = None,
) -> NetLimitReport:
    """For each sub-basic class containing the candidate, find an index past
    which all prefix members lie in the class.

    Each descriptor is a pair (mu, nu) naming the class at mu of nu; the
    candidate must belong to it, which is checked first.
    """
    cand_chain = candidate.as_chain() if isinstance(candidate, LimitValuation) else candidate
    if cand_chain is None:
        raise ValueError("the candidate has no chain form to run class checks on")
    thresholds: List[Optional[int]] = []
    members = fam.members(prefix_count)
    for mu, nu in descriptors:
        if cand_chain.canonical_seq() != nu.canonical_seq():
            if not same_class(nu, cand_chain, mu, samples):
                raise ValueError(
                    f"precondition failed: the candidate is not in the class of {nu} at {mu}"
                )
        flags = []
        for m in members:
            if m.canonical_seq() == mu.canonical_seq():
                flags.append(False)
            else:
                flags.append(same_class(nu, m, mu, samples))
        threshold: Optional[int] = None
        for start in range(len(flags)):
            if all(flags[start:]):
                threshold = start
                break
        thresholds.append(threshold)
    return NetLimitReport(tuple(thresholds), prefix_count)
