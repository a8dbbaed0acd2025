"""Seeded property suites over randomly generated chain pools.

Each suite drives one cluster of order/topology facts at desk scale and
returns a deterministic report: same suite, same seed, same sizes, same
report body.  Failures carry a self-contained reproduction command.

Suites run their cases sequentially and independently; reports list
failures by case index.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .limits import (
    AFFINE,
    GEOMETRIC,
    GammaRule,
    IncreasingFamily,
    PARAMETRIC,
    limit_augment,
    limit_key_poly,
    net_limit_check,
    stable_limit,
    sup_gamma,
    verify_supremum,
)
from .ordered_values import GroupValue, INFINITY, gv
from .polynomials import Poly, base_val
from .quasicuts import qc_of_value
from .sampling import DEFAULT_SEED, chain_pool, comparable_pairs, poly_pool
from .topologies import (
    FinitePoset,
    SCOTT_FINITE_CAVEAT,
    density_witness,
    is_upper_set,
    nonvaluation_certificate,
    certificate_check,
    scott_weak_witness,
    spectrum_member,
    weak_class_in_sample,
)
from .tree_ops import (
    EQ,
    INCOMPARABLE,
    LT,
    ComparisonResult,
    classify_directions,
    compare,
    meet,
    strict_between,
)
from .valuations import (
    RESIDUE_TRANSCENDENTAL,
    ValuationChain,
    augment,
    equivalent,
    validate_chain,
)

_X = Poly.variable()


@dataclass
class SuiteReport:
    """Outcome of one suite run; zero failures means success."""

    name: str
    seed: int
    cases: int
    failures: List[Dict[str, str]] = field(default_factory=list)
    caveats: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, case: int, detail: str, repro: str) -> None:
        self.failures.append({"case": str(case), "detail": detail, "repro": repro})

    def to_text(self) -> str:
        lines = [
            f"suite {self.name}: {'PASS' if self.passed else 'FAIL'} "
            f"({self.cases} cases, {len(self.failures)} failures, seed {self.seed})"
        ]
        for f in self.failures:
            lines.append(f"  case {f['case']}: {f['detail']}")
            lines.append(f"    repro: {f['repro']}")
        for c in self.caveats:
            lines.append(f"  caveat: {c}")
        return "\n".join(lines)

    def to_json(self) -> Dict:
        return {
            "suite": self.name,
            "seed": self.seed,
            "cases": self.cases,
            "failures": self.failures,
            "caveats": self.caveats,
            "passed": self.passed,
        }


class PoolContext:
    """Cached comparisons and meets over a fixed pool of chains."""

    def __init__(self, chains: Sequence[ValuationChain], samples: Sequence[Poly] = None):
        self.chains = list(chains)
        if samples is None:
            from .topologies import _shared_sample

            samples = _shared_sample(self.chains)
        self.samples = list(samples)
        self._cmp: Dict[Tuple, ComparisonResult] = {}
        self._meet: Dict[Tuple, ValuationChain] = {}

    def compare(self, a: ValuationChain, b: ValuationChain) -> ComparisonResult:
        key = (a.canonical_seq(), b.canonical_seq())
        hit = self._cmp.get(key)
        if hit is None:
            hit = compare(a, b, self.samples)
            self._cmp[key] = hit
        return hit

    def le(self, a, b) -> bool:
        return self.compare(a, b).is_le

    def meet(self, a: ValuationChain, b: ValuationChain) -> ValuationChain:
        key = frozenset((a.canonical_seq(), b.canonical_seq()))
        hit = self._meet.get(key)
        if hit is None:
            hit = meet(a, b, self.samples)
            self._meet[key] = hit
        return hit

    def in_interval(self, eta, mu, nu) -> bool:
        bottom = self.meet(mu, nu)
        if not self.le(bottom, eta):
            return False
        return self.le(eta, mu) or self.le(eta, nu)

    def same_class(self, nu, eta, mu) -> bool:
        return not self.in_interval(mu, nu, eta)


def _repro(name: str, seed: int, **sizes) -> str:
    parts = [f"valtree suite {name} --seed {seed}"]
    for k, v in sizes.items():
        parts.append(f"--{k} {v}")
    return " ".join(parts)


# ---------------------------------------------------------------------------


def suite_interval_triangle(seed: int = DEFAULT_SEED, cases: int = 500, pool_size: int = 24) -> SuiteReport:
    """Path inclusion: everything on the path between two chains lies on the
    union of the paths through any third chain."""
    report = SuiteReport("interval-triangle", seed, cases)
    pool = chain_pool(seed, pool_size)
    ctx = PoolContext(pool)
    rng = random.Random(seed)
    repro = _repro("interval-triangle", seed, cases=cases)
    for case in range(cases):
        mu, nu, eta = (rng.choice(pool) for _ in range(3))
        for omega in pool:
            if ctx.in_interval(omega, mu, eta):
                if not (ctx.in_interval(omega, mu, nu) or ctx.in_interval(omega, nu, eta)):
                    report.fail(
                        case,
                        f"{omega} in [{mu}, {eta}] escapes [{mu}, {nu}] and [{nu}, {eta}]",
                        repro,
                    )
    return report


def suite_meets(seed: int = DEFAULT_SEED, cases: int = 200, pool_size: int = 24) -> SuiteReport:
    """Meet laws: lower bound, idempotent, commutative, characterises the
    order, and meets of incomparable chains are residue-transcendental."""
    report = SuiteReport("meets", seed, cases)
    pool = chain_pool(seed, pool_size)
    ctx = PoolContext(pool)
    rng = random.Random(seed)
    repro = _repro("meets", seed, cases=cases)
    for case in range(cases):
        mu, nu = rng.choice(pool), rng.choice(pool)
        m = ctx.meet(mu, nu)
        if not (ctx.le(m, mu) and ctx.le(m, nu)):
            report.fail(case, f"meet {m} is not a lower bound of {mu}, {nu}", repro)
            continue
        if ctx.meet(nu, mu) != m:
            report.fail(case, f"meet of {mu}, {nu} is not commutative", repro)
        if ctx.meet(mu, mu) != mu:
            report.fail(case, f"meet of {mu} with itself moved", repro)
        verdict = ctx.compare(mu, nu).verdict
        if (verdict in (LT, EQ)) != (ctx.compare(m, mu).verdict == EQ):
            report.fail(case, f"meet({mu},{nu}) = {m} mischaracterises the order", repro)
        if verdict == INCOMPARABLE and m.classify() != RESIDUE_TRANSCENDENTAL:
            report.fail(
                case,
                f"incomparable pair has meet {m} classified {m.classify()}",
                repro,
            )
    return report


def _neighbourhood(rng: random.Random, pool, mu: ValuationChain, want: int):
    sample = []
    for chain in mu.prefixes()[:-1]:
        sample.append(chain)
    for other in rng.sample(pool, min(len(pool), want + 3)):
        if other.canonical_seq() != mu.canonical_seq():
            sample.append(other)
    if not mu.last_value.is_infinity:
        try:
            sample.append(augment(mu, mu.last_key, mu.last_value + gv(1)))
            sample.append(augment(mu, mu.last_key, mu.last_value + gv(2)))
        except Exception:
            pass
    out = []
    for c in sample:
        if c.canonical_seq() != mu.canonical_seq() and not any(
            c.canonical_seq() == d.canonical_seq() for d in out
        ):
            out.append(c)
    return out[:want]


def suite_classes(seed: int = DEFAULT_SEED, cases: int = 20, pool_size: int = 24) -> SuiteReport:
    """Direction partitions on sampled neighbourhoods: not-above chains form
    one class, classes above share tangents, and the class counts for
    value-transcendental and support-carrying references come out right."""
    report = SuiteReport("classes", seed, cases)
    pool = chain_pool(seed, pool_size)
    rng = random.Random(seed)
    repro = _repro("classes", seed, cases=cases)
    for case in range(cases):
        mu = rng.choice(pool)
        sample = _neighbourhood(rng, pool, mu, rng.randint(4, 6))
        if len(sample) < 2:
            continue
        try:
            part = classify_directions(mu, sample)
        except Exception as exc:  # noqa: BLE001 - report, do not crash the suite
            report.fail(case, f"partition at {mu} raised: {exc}", repro)
            continue
        if not part.consistent:
            report.fail(case, f"partition at {mu} inconsistent: {part.detail}", repro)

    # Targeted neighbourhoods with prescribed class counts.
    g = ValuationChain.gauss(2)
    mu1 = augment(g, _X, gv(Fraction(1, 2)))
    q = _X * _X + Poly.constant(2)
    vt = augment(mu1, q, gv(1, 1))
    vt_sample = [g, mu1, augment(mu1, q, gv(1, 2)), augment(mu1, q, gv(2)), augment(g, _X + Poly.one(), gv(1))]
    part = classify_directions(vt, vt_sample)
    if len(part.classes) != 2 or not part.consistent:
        report.fail(cases, f"value-transcendental reference gave {len(part.classes)} classes", repro)
    sup = augment(mu1, q, INFINITY)
    part = classify_directions(sup, [g, mu1, augment(g, _X, gv(1)), augment(g, _X + Poly.one(), gv(1))])
    if len(part.classes) != 1 or not part.consistent:
        report.fail(cases + 1, f"support-carrying reference gave {len(part.classes)} classes", repro)
    report.cases = cases + 2
    return report


def suite_between(seed: int = DEFAULT_SEED, cases: int = 200, pool_size: int = 24) -> SuiteReport:
    """Dense betweenness: every strictly comparable pair admits a verified
    strictly-in-between chain."""
    report = SuiteReport("between", seed, cases)
    pool = chain_pool(seed, pool_size)
    rng = random.Random(seed)
    pairs = comparable_pairs(rng, pool, cases)
    repro = _repro("between", seed, cases=cases)
    for case, (mu, nu) in enumerate(pairs):
        try:
            eta = strict_between(mu, nu)
        except Exception as exc:  # noqa: BLE001
            report.fail(case, f"betweenness failed for {mu} < {nu}: {exc}", repro)
            continue
        if compare(mu, eta).verdict != LT or compare(eta, nu).verdict != LT:
            report.fail(case, f"{eta} is not strictly between {mu} and {nu}", repro)
    report.cases = len(pairs)
    return report


def _stable_oracle_polys(rng: random.Random, count: int) -> List[Poly]:
    return poly_pool(rng, count, max_degree=4)


def suite_limits(seed: int = DEFAULT_SEED, cases: int = 100) -> SuiteReport:
    """The two canonical families: the unbounded one evaluates like the
    constant-term base valuation, the bounded one has a verified supremum
    with pivot independence, finite net-limit thresholds, and equivalent
    limits for equivalent value representatives."""
    report = SuiteReport("limits", seed, cases)
    rng = random.Random(seed)
    repro = _repro("limits", seed, cases=cases)
    g = ValuationChain.gauss(2)

    unbounded = IncreasingFamily(PARAMETRIC, base=g, key=_X, rule=GammaRule(AFFINE, 0, 1))
    gamma_inf = sup_gamma(unbounded, _X)
    lim_inf = limit_augment(unbounded, _X, gamma_inf)
    case = 0
    for f in _stable_oracle_polys(rng, cases):
        expected = base_val(2, f(0))
        got = lim_inf.evaluate(f)
        if got != expected:
            report.fail(case, f"unbounded limit at {f}: {got} vs constant-term value {expected}", repro)
        case += 1

    bounded = IncreasingFamily(
        PARAMETRIC, base=g, key=_X, rule=GammaRule(GEOMETRIC, 1, 1, Fraction(1, 2))
    )
    gamma = sup_gamma(bounded, _X)
    if gamma != gv(1, -1):
        report.fail(case, f"bounded family sup representative {gamma} is not (1,-1)", repro)
    case += 1
    lim_b = limit_augment(bounded, _X, gamma)
    samples = [
        _X,
        _X + Poly.one(),
        _X + Poly.constant(2),
        _X + Poly.constant(4),
        _X * _X,
        _X * _X + Poly.constant(2),
        Poly.constant(2),
        Poly.constant(3),
        Poly.constant(Fraction(1, 2)),
    ]
    sup_report = verify_supremum(
        lim_b,
        bounded,
        candidates=[augment(g, _X, gv(1)), augment(g, _X, gv(1, -1)), augment(g, _X, gv(1, -7))],
        samples=samples,
    )
    if not sup_report.passed:
        report.fail(case, f"supremum verification failed: {sup_report}", repro)
    case += 1
    if sup_report.q_independence_tested == 0:
        report.fail(case, "no pivot shift was exercised in the independence check", repro)
    case += 1

    cand_chain = lim_b.as_chain()
    descriptors = []
    for k in (1, 2, 3, 4, 5):
        descriptors.append((augment(g, _X, gv(Fraction(2**k - 1, 2**k))), cand_chain))
    descriptors.append((g, cand_chain))
    descriptors.append((augment(g, _X + Poly.one(), gv(1)), cand_chain))
    descriptors.append((augment(g, _X, gv(Fraction(1, 4))), cand_chain))
    descriptors.append((augment(g, _X + Poly.constant(2), gv(Fraction(1, 2))), cand_chain))
    descriptors.append((augment(g, _X, gv(1, -9)), cand_chain))
    net = net_limit_check(bounded, lim_b, descriptors, prefix_count=14)
    if not net.passed:
        report.fail(case, f"net-limit thresholds not all finite: {net}", repro)
    case += 1

    # Equivalent representatives of the same cut give equivalent limits.
    alt = limit_augment(bounded, _X, gv(1, -7))
    chain_a, chain_b = lim_b.as_chain(), alt.as_chain()
    validate_chain(chain_a, random.Random(seed), random_count=60)
    validate_chain(chain_b, random.Random(seed + 1), random_count=60)
    probe = poly_pool(rng, 60, max_degree=3)
    if not equivalent(chain_a, chain_b, probe):
        report.fail(case, "limits from two representatives of one cut are not equivalent", repro)
    case += 1
    report.cases = case
    return report


def _corrupt_tables(rng: random.Random, pool, count: int):
    """Non-valuation tables cycling the three axiom branches, including
    top-element variants."""
    tables = []
    polys = [
        _X,
        _X + Poly.one(),
        _X + Poly.constant(2),
        _X * _X,
        _X * _X + Poly.constant(2),
        _X.scale(2) + Poly.one(),
    ]
    kind_cycle = ["v1", "v2", "v3", "v1", "v2", "v1inf"]
    while len(tables) < count:
        kind = kind_cycle[len(tables) % len(kind_cycle)]
        nu = rng.choice(pool)
        a = rng.choice(polys)
        b = rng.choice(polys)
        if kind == "v3":
            if rng.random() < 0.5:
                tables.append({Poly.one(): gv(rng.choice([1, -1, 2]))})
            else:
                tables.append({Poly.zero(): gv(rng.choice([0, 1, 5]))})
            continue
        va, vb = nu.evaluate(a), nu.evaluate(b)
        if kind == "v1":
            if va.is_infinity or vb.is_infinity:
                continue
            w = va + vb + gv(rng.choice([1, 2, -1]))
            if w == va + vb:
                continue
            tables.append({a: va, b: vb, a * b: w})
        elif kind == "v1inf":
            if va.is_infinity or vb.is_infinity:
                continue
            tables.append({a: va, b: vb, a * b: INFINITY})
        else:
            total = a + b
            if total.is_zero:
                continue
            if va.is_infinity or vb.is_infinity:
                continue
            floor = min(va, vb)
            tables.append({a: va, b: vb, total: floor - gv(1)})
    return tables


def suite_closedness(seed: int = DEFAULT_SEED, tables: int = 30, chains: int = 50) -> SuiteReport:
    """Certificates: every corrupted table yields windows it satisfies and
    every genuine validated chain escapes."""
    report = SuiteReport("closedness", seed, tables)
    pool = chain_pool(seed, max(chains // 2, 12))
    probe = []
    rng = random.Random(seed)
    while len(probe) < chains:
        probe.extend(chain_pool(seed + len(probe), 12))
    probe = probe[:chains]
    repro = _repro("closedness", seed, tables=tables, chains=chains)
    for case, table in enumerate(_corrupt_tables(rng, pool, tables)):
        try:
            cert = nonvaluation_certificate(table)
        except Exception as exc:  # noqa: BLE001
            report.fail(case, f"certificate construction raised: {exc}", repro)
            continue
        if cert is None:
            report.fail(case, "corrupted table produced no certificate", repro)
            continue
        if not certificate_check(cert, table):
            report.fail(case, f"table escapes its own certificate {cert}", repro)
        for chain in probe:
            if certificate_check(cert, chain):
                report.fail(
                    case,
                    f"genuine chain {chain} satisfies certificate {cert}",
                    repro,
                )
                break
    return report


def suite_spectrum(seed: int = DEFAULT_SEED, cases: int = 100) -> SuiteReport:
    """Spectrum membership coherence and density witness bookkeeping."""
    report = SuiteReport("spectrum", seed, cases)
    rng = random.Random(seed)
    pool = chain_pool(seed, 10, max_depth=2)
    polys = poly_pool(rng, cases * 2, max_degree=3)
    zero_value = gv(0)
    repro = _repro("spectrum", seed, cases=cases)
    for case in range(cases):
        if case % 5 == 4:
            gpoly = polys[2 * case % len(polys)]
            scalar = Fraction(rng.choice([2, 3, Fraction(1, 2), 6, Fraction(3, 4)]))
            f, gq = gpoly.scale(scalar), gpoly
        else:
            f, gq = polys[2 * case % len(polys)], polys[(2 * case + 1) % len(polys)]
        try:
            result = density_witness(f, gq)
        except ValueError:
            continue
        if result.kind == "witnesses":
            for witness in (result.rt, result.vt):
                if not witness.value_of_h >= zero_value:
                    report.fail(case, f"witness value {witness.value_of_h} below zero", repro)
                if witness.evaluate(_X) != witness.value_of_h:
                    report.fail(case, "witness disagrees with its declared value at h", repro)
                if not witness.tag:
                    report.fail(case, "witness lacks a classification tag", repro)
            if result.rt.classification != "residue_transcendental":
                report.fail(case, "first witness misclassified", repro)
            if result.vt.classification != "value_transcendental":
                report.fail(case, "second witness misclassified", repro)
        else:
            expected = "all" if base_val(2, f.leading / gq.leading) >= zero_value else "empty"
            if result.kind != expected:
                report.fail(case, f"scalar verdict {result.kind} instead of {expected}", repro)
        nu = pool[case % len(pool)]
        vg = nu.evaluate(gq)
        member = spectrum_member(nu, f, gq)
        if member != (not vg.is_infinity and nu.evaluate(f) >= vg):
            report.fail(case, "membership disagrees with the defining inequality", repro)
        if not gq.is_zero and spectrum_member(nu, gq * gq, gq) != (not vg.is_infinity and vg >= zero_value):
            report.fail(case, "Krull-style one-argument membership incoherent", repro)
    return report


def suite_scott_weak(seed: int = DEFAULT_SEED, cases: int = 100, posets: int = 8) -> SuiteReport:
    """Non-upper-set witnesses with Hausdorff separation for comparable
    pairs, plus the exhaustive upper-set lemma on small posets."""
    report = SuiteReport("scott-weak", seed, cases)
    pool = chain_pool(seed, 20, allow_infinity=False)
    rng = random.Random(seed)
    pairs = comparable_pairs(rng, pool, cases)
    repro = _repro("scott-weak", seed, cases=cases)
    for case, (lower, upper) in enumerate(pairs):
        try:
            witness = scott_weak_witness(lower, upper)
        except Exception as exc:  # noqa: BLE001
            report.fail(case, f"witness construction raised for {lower} < {upper}: {exc}", repro)
            continue
        if not witness.non_upper_set:
            report.fail(case, f"no non-upper-set witness for {lower} < {upper}", repro)
        if not witness.disjoint or not witness.passed:
            report.fail(case, f"separation classes not disjoint for {lower} < {upper}", repro)
    checked = 0
    for p in range(posets):
        size = 5 + (p % 3)
        chains = rng.sample(pool, min(size, len(pool)))
        try:
            poset = FinitePoset(chains)
        except Exception as exc:  # noqa: BLE001
            report.fail(len(pairs) + p, f"poset construction failed: {exc}", repro)
            continue
        for i_mu in range(len(poset)):
            for i_nu in range(len(poset)):
                if i_mu == i_nu:
                    continue
                cls = weak_class_in_sample(poset, poset.elements[i_mu], poset.elements[i_nu])
                checked += 1
                if not is_upper_set(poset, cls, rooted_at=i_mu):
                    report.fail(
                        len(pairs) + p,
                        f"class of {poset.elements[i_nu]} at {poset.elements[i_mu]} is not an upper set",
                        repro,
                    )
    report.cases = len(pairs) + posets
    report.caveats.append(SCOTT_FINITE_CAVEAT)
    report.caveats.append(f"rooted upper-set lemma checked exhaustively on {checked} classes")
    return report


SUITES: Dict[str, Callable[..., SuiteReport]] = {
    "interval-triangle": suite_interval_triangle,
    "classes": suite_classes,
    "meets": suite_meets,
    "between": suite_between,
    "limits": suite_limits,
    "closedness": suite_closedness,
    "spectrum": suite_spectrum,
    "scott-weak": suite_scott_weak,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, **sizes) -> SuiteReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}")
    fn = SUITES[name]
    kwargs = {k: v for k, v in sizes.items() if v is not None}
    return fn(seed=seed, **kwargs)
