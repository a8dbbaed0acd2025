"""Executable topology: spectrum membership, density witnesses, finite
poset harnesses for the weak-tree and Scott topologies, and the
product-topology closedness certificates.

The closedness machinery works on finite partial tables (polynomial to
value), never on total functions: a certificate consists of finitely many
(polynomial, open window) constraints that the violating table satisfies
and every genuine valuation must escape.

Everything here is pure; poset matrices are computed once and then shared
read-only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from .ordered_values import (
    GroupValue,
    INFINITY,
    Interval,
    ONE,
    separate,
    sum_preimage,
)
from .polynomials import Poly, base_val, padic_order
from .tree_ops import (
    EQ,
    INCOMPARABLE,
    LT,
    compare,
    default_comparison_sample,
    in_interval,
    meet,
    same_class,
    strict_between,
)
from .valuations import ValuationChain, augment

SCOTT_FINITE_CAVEAT = (
    "finite-poset caveat: every directed subset of a finite poset contains "
    "its own supremum, so Scott-openness degenerates to being an upper set; "
    "this check does not witness the infinite densely-ordered statement"
)

_X = Poly.variable()
_ZERO_VALUE = GroupValue(0)


# ---------------------------------------------------------------------------
# Valuation spectrum


def spectrum_member(nu, f: Poly, g: Poly) -> bool:
    """Membership in the sub-basic spectrum set at (f, g): the value of f is
    at least that of g and g is not in the support."""
    vg = nu.evaluate(g)
    if vg.is_infinity:
        return False
    return nu.evaluate(f) >= vg


@dataclass(frozen=True)
class DensityWitness:
    """A valuation on polynomials in a fresh transcendental, reported with
    the value it gives that transcendental and a structural classification
    tag.  The step extending it to the full rational function field is
    non-constructive and out of scope, which the note records."""

    label: str
    value_of_h: GroupValue
    classification: str
    tag: str
    prime: int

    def evaluate(self, f_in_h: Poly) -> GroupValue:
        if f_in_h.is_zero:
            return INFINITY
        if self.label == "value_transcendental":
            # Values in the auxiliary group Z x Q, ordered lexicographically
            # with the fresh direction dominant.
            best = None
            for j, c in enumerate(f_in_h.coeffs):
                if c == 0:
                    continue
                term = GroupValue(j, padic_order(self.prime, c))
                if best is None or term < best:
                    best = term
            return best
        best = None
        for c in f_in_h.coeffs:
            if c == 0:
                continue
            term = base_val(self.prime, c)
            if best is None or term < best:
                best = term
        return best

    def __call__(self, f_in_h: Poly) -> GroupValue:
        return self.evaluate(f_in_h)


@dataclass(frozen=True)
class DensityResult:
    """Witnesses for a sub-basic spectrum set, or the degenerate verdict for
    scalar ratios: the set is everything when the scalar has nonnegative
    value and empty when it has negative value."""

    kind: str  # "witnesses" | "all" | "empty"
    rt: Optional[DensityWitness] = None
    vt: Optional[DensityWitness] = None
    note: str = ""


def density_witness(f: Poly, g: Poly, prime: int = 2) -> DensityResult:
    """Two witnesses on polynomials in the fresh transcendental h = f/g: the
    Gauss valuation (residue-transcendental) and the composite valuation
    dominated by h-order (value-transcendental); both give h a nonnegative
    value.  Scalar ratios get the degenerate whole-space or empty verdict."""
    if f.is_zero or g.is_zero:
        raise ValueError("density witnesses need nonzero polynomials")
    if f.degree == g.degree:
        a = f.leading / g.leading
        if f == g.scale(a):
            order = padic_order(prime, a)
            if order >= 0:
                return DensityResult(
                    "all",
                    note=(
                        f"the ratio is the scalar {a} of nonnegative value {order}; "
                        "every extension satisfies the inequality, the set is the whole space"
                    ),
                )
            return DensityResult(
                "empty",
                note=(
                    f"the ratio is the scalar {a} of negative value {order}; "
                    "no extension satisfies the inequality, the set is empty"
                ),
            )
    rt = DensityWitness(
        label="residue_transcendental",
        value_of_h=GroupValue(0),
        classification="residue_transcendental",
        tag=(
            "the Gauss valuation in h is its own truncation at h and the "
            "residue of h is transcendental over the base (structural tag)"
        ),
        prime=prime,
    )
    vt = DensityWitness(
        label="value_transcendental",
        value_of_h=GroupValue(1, 0),
        classification="value_transcendental",
        tag=(
            "the value of h in the auxiliary lexicographic group is not a "
            "torsion element over the base value group"
        ),
        prime=prime,
    )
    note = (
        "witnesses constructed on polynomials in the fresh transcendental "
        "h = f/g; extension to the full rational function field is "
        "non-constructive, out of scope"
    )
    return DensityResult("witnesses", rt=rt, vt=vt, note=note)


# ---------------------------------------------------------------------------
# Finite poset harness


class PosetError(ValueError):
    """A chain sample whose comparison matrix is not a valid tree order."""


class FinitePoset:
    """A finite sample of chains with its comparison matrix cached.

    The matrix is validated to be reflexive, antisymmetric and transitive
    on verdicts, and every element's down-set must be totally ordered (the
    tree property).  Sample-equal chains are collapsed to one
    representative.
    """

    def __init__(
        self,
        chains: Sequence[ValuationChain],
        samples: Sequence[Poly] = None,
        provenance: str = "",
    ):
        if not chains:
            raise PosetError("an empty poset is not useful")
        if samples is None:
            samples = _shared_sample(chains)
        self.samples = list(samples)
        self.provenance = provenance
        elements: List[ValuationChain] = []
        for chain in chains:
            if not any(compare(chain, e, self.samples).verdict == EQ for e in elements):
                elements.append(chain)
        self.elements: Tuple[ValuationChain, ...] = tuple(elements)
        n = len(elements)
        self.verdicts = [[EQ] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if i != j:
                    self.verdicts[i][j] = compare(elements[i], elements[j], self.samples).verdict
        self._validate()

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, chain: ValuationChain) -> int:
        for i, e in enumerate(self.elements):
            if e.canonical_seq() == chain.canonical_seq():
                return i
        for i, e in enumerate(self.elements):
            if compare(e, chain, self.samples).verdict == EQ:
                return i
        raise PosetError(f"{chain} is not in the poset")

    def le(self, i: int, j: int) -> bool:
        return self.verdicts[i][j] in (LT, EQ)

    def _validate(self) -> None:
        n = len(self.elements)
        for i in range(n):
            for j in range(n):
                a, b = self.verdicts[i][j], self.verdicts[j][i]
                flipped = {LT: "gt", "gt": LT, EQ: EQ, INCOMPARABLE: INCOMPARABLE}[a]
                if b != flipped:
                    raise PosetError(
                        f"asymmetric verdicts between {self.elements[i]} and {self.elements[j]}"
                    )
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.le(i, j) and self.le(j, k) and not self.le(i, k):
                        raise PosetError(
                            "comparison matrix is not transitive at "
                            f"{self.elements[i]}, {self.elements[j]}, {self.elements[k]}"
                        )
        for k in range(n):
            below = [i for i in range(n) if self.le(i, k)]
            for i, j in itertools.combinations(below, 2):
                if not self.le(i, j) and not self.le(j, i):
                    raise PosetError(
                        f"down-set of {self.elements[k]} is not totally ordered"
                    )

    def rooted_le(self, root: int):
        """The matrix of the order rooted at the given element: i is below j
        when element i lies on the path from the root to element j."""
        n = len(self.elements)
        matrix = [[False] * n for _ in range(n)]
        root_chain = self.elements[root]
        for j in range(n):
            for i in range(n):
                matrix[i][j] = in_interval(
                    self.elements[i], root_chain, self.elements[j], self.samples
                )
        return matrix


def _shared_sample(chains: Sequence[ValuationChain]) -> List[Poly]:
    keys: List[Poly] = [_X]
    for chain in chains:
        for phi, _ in chain.canonical_seq():
            if phi not in keys:
                keys.append(phi)
    sample = list(keys)
    for f, g in itertools.combinations_with_replacement(keys, 2):
        p = f * g
        if p not in sample:
            sample.append(p)
    for f in keys:
        for c in (1, 2):
            s = f + Poly.constant(c)
            if s not in sample:
                sample.append(s)
    max_deg = max(k.degree for k in keys)
    for k in range(1, max_deg + 2):
        m = Poly.monomial(k)
        if m not in sample:
            sample.append(m)
    sample.append(Poly.constant(2))
    sample.append(Poly.constant(3))
    return sample


def weak_class_in_sample(poset: FinitePoset, mu: ValuationChain, nu: ValuationChain):
    """The class at mu of nu, intersected with the poset's elements."""
    i_mu, i_nu = poset.index(mu), poset.index(nu)
    if i_mu == i_nu:
        raise ValueError("the class at mu is defined for elements other than mu")
    members = []
    for k, eta in enumerate(poset.elements):
        if k == i_mu:
            continue
        if same_class(poset.elements[i_nu], eta, poset.elements[i_mu], poset.samples):
            members.append(eta)
    return tuple(members)


def is_upper_set(poset: FinitePoset, subset, rooted_at: Optional[int] = None) -> bool:
    """Exhaustive upper-set check, under the plain order or the order rooted
    at the given element index."""
    indices = _as_indices(poset, subset)
    if rooted_at is None:
        le = poset.le
    else:
        matrix = poset.rooted_le(rooted_at)
        le = lambda i, j: matrix[i][j]
    for i in indices:
        for j in range(len(poset)):
            if le(i, j) and j not in indices:
                return False
    return True


@dataclass(frozen=True)
class ScottOpenResult:
    is_open: bool
    upper: bool
    inaccessible: bool
    caveat: str = SCOTT_FINITE_CAVEAT

    def __bool__(self) -> bool:
        return self.is_open

    def __str__(self) -> str:
        return (
            f"scott-open: {self.is_open} (upper set: {self.upper}, "
            f"directed-join inaccessible: {self.inaccessible})\n{self.caveat}"
        )


def is_scott_open_finite(
    poset: FinitePoset, subset, rooted_at: Optional[int] = None
) -> ScottOpenResult:
    """Scott-openness on a finite poset: upper set plus inaccessibility by
    directed joins, checked by enumerating every directed subset.  On a
    finite poset the two conditions coincide, which the attached caveat
    states on every result."""
    indices = _as_indices(poset, subset)
    n = len(poset)
    if rooted_at is None:
        le = poset.le
    else:
        matrix = poset.rooted_le(rooted_at)
        le = lambda i, j: matrix[i][j]
    upper = True
    for i in indices:
        for j in range(n):
            if le(i, j) and j not in indices:
                upper = False
    inaccessible = True
    for r in range(1, n + 1):
        for combo in itertools.combinations(range(n), r):
            if not _is_directed(combo, le):
                continue
            sup = _poset_sup(combo, le, n)
            if sup is not None and sup in indices and not any(d in indices for d in combo):
                inaccessible = False
    return ScottOpenResult(upper and inaccessible, upper, inaccessible)


def _as_indices(poset: FinitePoset, subset) -> Set[int]:
    indices: Set[int] = set()
    for item in subset:
        indices.add(item if isinstance(item, int) else poset.index(item))
    return indices


def _is_directed(combo, le) -> bool:
    for a, b in itertools.combinations(combo, 2):
        if not any(le(a, c) and le(b, c) for c in combo):
            return False
    return True


def _poset_sup(combo, le, n) -> Optional[int]:
    uppers = [k for k in range(n) if all(le(d, k) for d in combo)]
    for m in uppers:
        if all(le(m, k) for k in uppers):
            return m
    return None


@dataclass(frozen=True)
class WeakScottWitness:
    """Evidence that a sub-basic class below its base point is not an upper
    set, together with a Hausdorff separation of the pair by classes at an
    in-between element."""

    nu: ValuationChain
    mu: ValuationChain
    eta: ValuationChain
    class_contains_nu: bool
    class_excludes_mu: bool
    strictly_below: bool
    class_of_nu_at_eta: Tuple[ValuationChain, ...]
    class_of_mu_at_eta: Tuple[ValuationChain, ...]
    sample_size: int

    @property
    def non_upper_set(self) -> bool:
        """nu sits in its own class at mu, below mu, yet mu is outside: the
        class fails upward closure."""
        return self.class_contains_nu and self.class_excludes_mu and self.strictly_below

    @property
    def disjoint(self) -> bool:
        seqs_nu = {c.canonical_seq() for c in self.class_of_nu_at_eta}
        seqs_mu = {c.canonical_seq() for c in self.class_of_mu_at_eta}
        return not (seqs_nu & seqs_mu)

    @property
    def passed(self) -> bool:
        in_own = any(
            c.canonical_seq() == self.nu.canonical_seq() for c in self.class_of_nu_at_eta
        )
        mu_in_own = any(
            c.canonical_seq() == self.mu.canonical_seq() for c in self.class_of_mu_at_eta
        )
        return self.non_upper_set and self.disjoint and in_own and mu_in_own


def scott_weak_witness(
    nu: ValuationChain, mu: ValuationChain, samples: Sequence[Poly] = None
) -> WeakScottWitness:
    """For nu strictly below mu: exhibit that the class of nu at mu is not
    an upper set, and separate nu from mu by disjoint classes at an element
    strictly in between."""
    if samples is None:
        samples = default_comparison_sample(nu, mu)
    verdict = compare(nu, mu, samples)
    if verdict.verdict != LT:
        raise ValueError("the witness needs the first chain strictly below the second")
    class_contains_nu = same_class(nu, nu, mu, samples)
    class_excludes_mu = in_interval(mu, nu, mu, samples)
    eta = strict_between(nu, mu, samples)
    pool: List[ValuationChain] = [nu, mu, eta]
    try:
        pool.append(strict_between(nu, eta, samples))
        pool.append(strict_between(eta, mu, samples))
    except Exception:
        pass
    if not mu.last_value.is_infinity:
        try:
            pool.append(augment(mu, mu.last_key, mu.last_value + ONE))
        except Exception:
            pass
    sample_chains: List[ValuationChain] = []
    for c in pool:
        if not any(c.canonical_seq() == d.canonical_seq() for d in sample_chains):
            sample_chains.append(c)
    cls_nu = tuple(
        c
        for c in sample_chains
        if c.canonical_seq() != eta.canonical_seq() and same_class(nu, c, eta, samples)
    )
    cls_mu = tuple(
        c
        for c in sample_chains
        if c.canonical_seq() != eta.canonical_seq() and same_class(mu, c, eta, samples)
    )
    return WeakScottWitness(
        nu=nu,
        mu=mu,
        eta=eta,
        class_contains_nu=class_contains_nu,
        class_excludes_mu=class_excludes_mu,
        strictly_below=True,
        class_of_nu_at_eta=cls_nu,
        class_of_mu_at_eta=cls_mu,
        sample_size=len(sample_chains),
    )


# ---------------------------------------------------------------------------
# Closedness certificates


V1 = "V1"
V2 = "V2"
V3 = "V3"
RESTRICTION = "restriction"


class TableNotClosedError(ValueError):
    """The table lacks the entries any axiom check would need."""


@dataclass(frozen=True)
class Certificate:
    """A violated-axiom record: finitely many open window constraints that
    the offending table satisfies and every valuation escapes.

    ``narrative`` names the proof branch that produced the windows.
    """

    axiom: str
    constraints: Tuple[Tuple[Poly, Interval], ...]
    narrative: str = ""

    def __post_init__(self):
        if self.axiom not in (V1, V2, V3, RESTRICTION):
            raise ValueError(f"unknown axiom tag {self.axiom!r}")
        if not 1 <= len(self.constraints) <= 3:
            raise ValueError("a certificate carries between one and three constraints")

    def __str__(self) -> str:
        lines = [f"certificate {{ axiom: {self.axiom}"]
        for poly, window in self.constraints:
            lines.append(f"  constraint: ({poly.render()}) in {window}")
        if self.narrative:
            lines.append(f"  narrative: {self.narrative}")
        lines.append("}")
        return "\n".join(lines)


Table = Dict[Poly, GroupValue]


def certificate_check(cert: Certificate, subject) -> bool:
    """Whether the subject (a table or an evaluable valuation) satisfies
    every window constraint of the certificate."""
    for poly, window in cert.constraints:
        if isinstance(subject, dict):
            value = subject.get(poly)
            if value is None:
                return False
        else:
            value = subject.evaluate(poly)
        if not window.contains(value):
            return False
    return True


def _sorted_keys(table: Table) -> List[Poly]:
    return sorted(table.keys(), key=lambda p: (len(p.coeffs), p.coeffs))


def _window_pair_disjoint(s: GroupValue, w: GroupValue) -> Tuple[Interval, Interval]:
    """Disjoint open windows around two distinct values: symmetric of width
    the gap around the first, half that around the second; top-element cases
    use the basic neighbourhood above the finite one."""
    if s.is_infinity:
        around_w = Interval.open(w - ONE, w + ONE)
        return Interval.above(w + ONE), around_w
    if w.is_infinity:
        return Interval.open(s - ONE, s + ONE), Interval.above(s + ONE)
    gap = (w - s) if s < w else (s - w)
    half = gap.scale(Fraction(1, 2))
    quarter = gap.scale(Fraction(1, 4))
    return Interval.open(s - half, s + half), Interval.open(w - quarter, w + quarter)


def _v3_one_certificate(one: Poly, value: GroupValue) -> Certificate:
    if value.is_infinity:
        window = Interval.above(_ZERO_VALUE)
    elif value > _ZERO_VALUE:
        window = separate(_ZERO_VALUE, value)[1]
    else:
        window = separate(value, _ZERO_VALUE)[0]
    return Certificate(
        V3,
        ((one, window),),
        "the table value of 1 avoids 0; its open window excludes 0, which "
        "every valuation must hit",
    )


def _v3_zero_certificate(zero: Poly, value: GroupValue) -> Certificate:
    window = Interval.open(value - ONE, value + ONE)
    return Certificate(
        V3,
        ((zero, window),),
        "the table value of 0 is finite; a bounded window never contains "
        "the top element that every valuation assigns to 0",
    )


def nonvaluation_certificate(table: Table, probe_chains: Sequence = ()) -> Optional[Certificate]:
    """Scan a finite table for an axiom violation and build the separating
    open set as window constraints.

    Scanning is deterministic: the normalisation axiom first, then
    multiplicativity over sorted pairs whose product the table contains,
    then the ultrametric inequality over pairs with their sum present.
    Returns None when every applicable check passes; raises when the table
    is not closed under any applicable check.  The emitted certificate is
    re-checked against the table, and against any probe valuations handed
    in, before being returned.
    """
    keys = _sorted_keys(table)
    applicable = 0
    cert: Optional[Certificate] = None

    one = Poly.one()
    if one in table:
        applicable += 1
        if table[one] != _ZERO_VALUE:
            cert = _v3_one_certificate(one, table[one])
    zero = Poly.zero()
    if cert is None and zero in table:
        applicable += 1
        if not table[zero].is_infinity:
            cert = _v3_zero_certificate(zero, table[zero])

    missing: List[str] = []
    if cert is None:
        for a, b in itertools.combinations_with_replacement(keys, 2):
            if a.is_zero or b.is_zero:
                continue
            product = a * b
            if product not in table:
                missing.append(f"({a.render()})*({b.render()})")
                continue
            applicable += 1
            s = table[a] + table[b]
            w = table[product]
            if s != w:
                u, w_window = _window_pair_disjoint(s, w)
                v1, v2 = sum_preimage(table[a], table[b], u)
                cert = Certificate(
                    V1,
                    ((a, v1), (b, v2), (product, w_window)),
                    "multiplicativity fails: the windows around the factors "
                    "force sums inside a window disjoint from the product's",
                )
                break
    if cert is None:
        for a, b in itertools.combinations_with_replacement(keys, 2):
            total = a + b
            if total.is_zero or total not in table:
                if not total.is_zero:
                    missing.append(f"({a.render()})+({b.render()})")
                continue
            applicable += 1
            u_val = table[total]
            fa, fb = table[a], table[b]
            if u_val < fa and u_val < fb:
                u1, w1 = separate(u_val, fa)
                u2, w2 = separate(u_val, fb)
                cert = Certificate(
                    V2,
                    ((a, w1), (b, w2), (total, u1.intersect(u2))),
                    "the ultrametric inequality fails: the sum's window sits "
                    "strictly below both summand windows",
                )
                break

    if applicable == 0:
        raise TableNotClosedError(
            "no axiom check is applicable to the table; missing entries "
            "include " + ", ".join(missing[:6])
        )
    if cert is None:
        return None
    if not certificate_check(cert, table):
        raise RuntimeError(f"emitted certificate does not cover its own table: {cert}")
    for chain in probe_chains:
        if certificate_check(cert, chain):
            raise RuntimeError(
                f"a genuine valuation satisfies the certificate windows: {cert}"
            )
    return cert


def restriction_certificate(table: Table, prime: int = 2) -> Optional[Certificate]:
    """A one-constraint separator for a table that disagrees with the base
    valuation at a constant: the window around the table's value avoids the
    base value, which is a closed point by the separation property."""
    for key in _sorted_keys(table):
        if key.degree is not None and key.degree > 0:
            continue
        expected = base_val(prime, key.coeff(0))
        value = table[key]
        if value == expected:
            continue
        if value.is_infinity:
            window = Interval.above(expected + ONE)
        elif expected.is_infinity:
            window = Interval.open(value - ONE, value + ONE)
        elif value > expected:
            window = separate(expected, value)[1]
        else:
            window = separate(value, expected)[0]
        return Certificate(
            RESTRICTION,
            ((key, window),),
            "the table disagrees with the base valuation at a constant; the "
            "base value is a closed point, so one window suffices",
        )
    return None
