"""Independent checks over solved tables and the published listings.

Everything here is read-only over the tables: regenerate relations and
confirm they collapse to exactly zero, compare computed generator counts
against the Lyndon enumeration, validate the combinatorial structure of the
published weight-27/28 listings, and probe depth-sum minimality of computed
bases at small weights by re-running the elimination with perturbed scan
orders.  Expected dimensions are never hardcoded: every reference number is
recomputed from the enumerations.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    DEFAULT_KINDS,
    add_scaled,
    check_kinds,
    dual,
    hoffman_relation,
    shuffle_words,
    stuffle,
    weight_pairs,
)
from .lyndon import collapse_word, odd_lyndon_words, published_basis
from .solver import (
    RunConfig,
    SolvedWeight,
    product_value,
    solve_weight,
    substitute_tables,
)
from .words import Word, admissible_words, is_lyndon, render_word, weight


# ---------------------------------------------------------- relation recheck

@dataclass
class RecheckReport:
    weight: int
    population: dict[str, int]
    distinct_checked: int
    draws: int | None
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        out = [f"recheck.{self.weight}.population.{k} = {n}" for k, n in self.population.items()]
        out.append(f"recheck.{self.weight}.distinct_checked = {self.distinct_checked}")
        if self.draws is not None:
            out.append(f"recheck.{self.weight}.draws = {self.draws}")
        out.append(f"recheck.{self.weight}.failures = {len(self.failures)}")
        out.extend(f"recheck.{self.weight}.failure = {f}" for f in self.failures)
        return out


def relation_descriptors(w: int, kinds=DEFAULT_KINDS) -> list[tuple]:
    """All relation instances at weight ``w`` for the given kinds: one
    stuffle and/or shuffle product per unordered pair, one regularized
    relation per admissible word of weight w-1, one duality relation per
    non-self-dual orbit."""
    ks = check_kinds(kinds)
    descs: list[tuple] = []
    if "stuffle" in ks:
        descs.extend(("stuffle", u, v) for u, v in weight_pairs(w))
    if "shuffle" in ks:
        descs.extend(("shuffle", u, v) for u, v in weight_pairs(w))
    if "hoffman" in ks:
        descs.extend(("hoffman", v) for v in admissible_words(w - 1))
    if "duality" in ks:
        descs.extend(("duality", v) for v in admissible_words(w) if dual(v) > v)
    return descs


def relation_residual(desc: tuple, tables: dict[int, SolvedWeight]) -> dict:
    """Substitute one relation instance through the fully-reduced tables.
    The result is a combination of basis monomials that must be empty."""
    kind = desc[0]
    if kind in ("stuffle", "shuffle"):
        u, v = desc[1], desc[2]
        expand = stuffle if kind == "stuffle" else shuffle_words
        combo = {x: Fraction(c) for x, c in expand(u, v).items()}
        residual = substitute_tables(combo, tables)
        add_scaled(residual, product_value(u, v, tables), -1)
        return residual
    if kind == "hoffman":
        combo = {x: Fraction(c) for x, c in hoffman_relation(desc[1]).items()}
        return substitute_tables(combo, tables)
    if kind == "duality":
        v = desc[1]
        combo = {v: Fraction(1)}
        add_scaled(combo, {dual(v): Fraction(1)}, -1)
        return substitute_tables(combo, tables)
    raise ValueError(f"unknown relation descriptor {desc!r}")


def _describe(desc: tuple) -> str:
    if desc[0] in ("stuffle", "shuffle"):
        return f"{desc[0]} {render_word(desc[1])}*{render_word(desc[2])}"
    return f"{desc[0]} {render_word(desc[1])}"


def recheck_relations(
    w: int,
    tables: dict[int, SolvedWeight],
    kinds=DEFAULT_KINDS,
    sample: int | None = None,
    seed: int = 0,
) -> RecheckReport:
    """Regenerate relations at weight ``w`` and assert each collapses to
    exactly zero through the tables.

    With ``sample`` set, draws that many instances with replacement from the
    population (seeded), memoizing distinct checks; otherwise checks the
    whole population.  Either way failures carry the relation's origin.
    """
    descs = relation_descriptors(w, kinds)
    population: dict[str, int] = {}
    for d in descs:
        population[d[0]] = population.get(d[0], 0) + 1

    if sample is None:
        chosen = descs
        draws = None
    else:
        rng = random.Random(seed)
        chosen = [descs[rng.randrange(len(descs))] for _ in range(sample)]
        draws = sample

    failures: list[str] = []
    seen: set[tuple] = set()
    for desc in chosen:
        if desc in seen:
            continue
        seen.add(desc)
        residual = relation_residual(desc, tables)
        if residual:
            failures.append(f"{_describe(desc)} left {len(residual)} monomial(s)")
    return RecheckReport(w, population, len(seen), draws, failures)


# ---------------------------------------------------------- dimension report

@dataclass
class DimensionRow:
    weight: int
    monomial_count: int
    generator_count: int
    lyndon_count: int
    generators_agree: bool
    recursion_ok: bool | None  # monomial counts against d(W) = d(W-2) + d(W-3)

    def lines(self) -> list[str]:
        rec = "n/a" if self.recursion_ok is None else ("ok" if self.recursion_ok else "FAIL")
        return [
            f"dims.{self.weight}.monomials = {self.monomial_count}",
            f"dims.{self.weight}.generators = {self.generator_count}",
            f"dims.{self.weight}.lyndon_count = {self.lyndon_count}",
            f"dims.{self.weight}.generators_agree = {'yes' if self.generators_agree else 'NO'}",
            f"dims.{self.weight}.recursion = {rec}",
        ]


def monomial_count(solved: SolvedWeight) -> int:
    monos = set()
    for entry in solved.entries.values():
        monos.update(entry)
    return len(monos)


def dimension_report(tables: dict[int, SolvedWeight], max_weight: int) -> list[DimensionRow]:
    """Per weight: computed monomial dimension, computed generator count,
    the Lyndon count it should match, and an empirical check of the monomial
    recursion d(W) = d(W-2) + d(W-3) (reported, not asserted as truth).

    Weight 2 is the seeded special case: one generator, zero Lyndon words.
    """
    rows = []
    counts: dict[int, int] = {}
    for w in range(2, max_weight + 1):
        if w not in tables:
            raise KeyError(f"weight {w} not solved; cannot report dimensions")
        solved = tables[w]
        counts[w] = monomial_count(solved)
        expected = 1 if w == 2 else len(odd_lyndon_words(w))
        recursion: bool | None = None
        if w - 3 in counts:
            recursion = counts[w] == counts[w - 2] + counts[w - 3]
        rows.append(
            DimensionRow(
                weight=w,
                monomial_count=counts[w],
                generator_count=len(solved.generators),
                lyndon_count=len(odd_lyndon_words(w)),
                generators_agree=len(solved.generators) == expected,
                recursion_ok=recursion,
            )
        )
    return rows


# ------------------------------------------------------------- basis report

@dataclass
class BasisReport:
    weight: int
    generators: list[Word]
    generator_count: int
    monomial_count: int
    extension_profile: dict[int, int]
    depth_sum: int

    def lines(self) -> list[str]:
        profile = " ".join(f"{n}:{c}" for n, c in sorted(self.extension_profile.items()))
        return [
            f"basis.{self.weight}.generators = {' '.join(render_word(g) for g in self.generators) or '(none)'}",
            f"basis.{self.weight}.generator_count = {self.generator_count}",
            f"basis.{self.weight}.monomial_count = {self.monomial_count}",
            f"basis.{self.weight}.extension_profile = {profile or '(empty)'}",
            f"basis.{self.weight}.depth_sum = {self.depth_sum}",
        ]


def basis_report(solved: SolvedWeight) -> BasisReport:
    profile: dict[int, int] = {}
    for g in solved.generators:
        try:
            _, n = collapse_word(g)
        except ValueError:
            n = -1  # not of extended shape; flagged rather than hidden
        profile[n] = profile.get(n, 0) + 1
    return BasisReport(
        weight=solved.weight,
        generators=list(solved.generators),
        generator_count=len(solved.generators),
        monomial_count=monomial_count(solved),
        extension_profile=profile,
        depth_sum=sum(len(g) for g in solved.generators),
    )


# ------------------------------------------------- published-listing checks

@dataclass
class PublishedBasisReport:
    counts: dict[int, int]
    lyndon_counts: dict[int, int]
    bijection: dict[int, bool]
    twofold: dict[int, list[Word]]
    plain_all_lyndon: dict[int, bool]
    failures: list[str]
    seconds: float

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        out = []
        for w in sorted(self.counts):
            out.append(f"published.{w}.count = {self.counts[w]}")
            out.append(f"published.{w}.lyndon_count = {self.lyndon_counts[w]}")
            out.append(f"published.{w}.collapse_bijection = {'yes' if self.bijection[w] else 'NO'}")
            out.append(
                f"published.{w}.twofold = "
                + (" ".join(render_word(x) for x in self.twofold[w]) or "(none)")
            )
            out.append(
                f"published.{w}.plain_elements_lyndon = "
                f"{'yes' if self.plain_all_lyndon[w] else 'NO'}"
            )
        out.append(f"published.failures = {len(self.failures)}")
        out.extend(f"published.failure = {f}" for f in self.failures)
        out.append(f"published.seconds = {self.seconds:.3f}")
        return out


def published_basis_check() -> PublishedBasisReport:
    """Validate the shipped weight-27/28 listings purely combinatorially.

    Checks, per listing: every element has the listed weight; trailing-1
    runs have even length; collapsing maps the listing bijectively onto the
    odd Lyndon words of that weight; exactly one element is twofold
    extended; and every element without trailing 1s is itself Lyndon.
    Solver-independent by design, so it passes on a fresh checkout.
    """
    t0 = time.monotonic()
    failures: list[str] = []
    counts: dict[int, int] = {}
    lyndon_counts: dict[int, int] = {}
    bijection: dict[int, bool] = {}
    twofold: dict[int, list[Word]] = {}
    plain_ok: dict[int, bool] = {}
    for w in (27, 28):
        listing = published_basis(w)
        counts[w] = len(listing)
        lyndon = odd_lyndon_words(w)
        lyndon_counts[w] = len(lyndon)
        sources: list[Word] = []
        orders: list[int] = []
        for h in listing:
            if weight(h) != w:
                failures.append(f"{render_word(h)} has weight {weight(h)}, listed under {w}")
                continue
            try:
                source, n = collapse_word(h)
            except ValueError as exc:
                failures.append(f"{render_word(h)}: {exc}")
                continue
            sources.append(source)
            orders.append(n)
        ok = sorted(sources) == sorted(lyndon) and len(set(sources)) == len(sources)
        bijection[w] = ok
        if not ok:
            failures.append(f"weight {w}: collapse is not a bijection onto the Lyndon set")
        twofold[w] = [h for h, n in zip(listing, orders) if n == 2]
        if len(twofold[w]) != 1:
            failures.append(
                f"weight {w}: expected exactly one twofold-extended element, "
                f"found {len(twofold[w])}"
            )
        plain = [h for h, n in zip(listing, orders) if n == 0]
        bad = [h for h in plain if not is_lyndon(h)]
        plain_ok[w] = not bad
        failures.extend(f"{render_word(h)} is plain but not Lyndon" for h in bad)
        if counts[w] != lyndon_counts[w]:
            failures.append(
                f"weight {w}: listing has {counts[w]} elements but there are "
                f"{lyndon_counts[w]} Lyndon words"
            )
    return PublishedBasisReport(
        counts=counts,
        lyndon_counts=lyndon_counts,
        bijection=bijection,
        twofold=twofold,
        plain_all_lyndon=plain_ok,
        failures=failures,
        seconds=time.monotonic() - t0,
    )


# ------------------------------------------------------ depth-sum minimality

@dataclass
class MinimalDepthReport:
    weight: int
    depth_sum: int
    histogram: dict[int, int]
    alternatives_checked: int
    minimal_confirmed: bool | None  # None above the exhaustive-search cap

    def lines(self) -> list[str]:
        hist = " ".join(f"{d}:{c}" for d, c in sorted(self.histogram.items()))
        confirmed = (
            "not-checked" if self.minimal_confirmed is None
            else ("yes" if self.minimal_confirmed else "NO")
        )
        return [
            f"minimal_depth.{self.weight}.depth_sum = {self.depth_sum}",
            f"minimal_depth.{self.weight}.histogram = {hist or '(empty)'}",
            f"minimal_depth.{self.weight}.alternatives_checked = {self.alternatives_checked}",
            f"minimal_depth.{self.weight}.confirmed = {confirmed}",
        ]


MINIMALITY_CAP = 10


def minimal_depth_stats(
    w: int,
    tables: dict[int, SolvedWeight],
    kinds=DEFAULT_KINDS,
) -> MinimalDepthReport:
    """Depth-sum statistics of the computed basis at weight ``w``.

    Up to weight 10 the report verifies minimality exhaustively: for every
    Lyndon word shallower than the deepest computed generator, the
    elimination is re-run with that word forced to survive whenever the
    relations allow; if it then survives, the alternative basis it belongs
    to must not have a smaller depth sum.  Beyond the cap only the depth sum
    is reported, with no minimality claim.
    """
    solved = tables[w]
    histogram: dict[int, int] = {}
    for g in solved.generators:
        histogram[len(g)] = histogram.get(len(g), 0) + 1
    depth_sum = sum(len(g) for g in solved.generators)
    if w > MINIMALITY_CAP:
        return MinimalDepthReport(w, depth_sum, histogram, 0, None)

    lower = {k: v for k, v in tables.items() if k < w}
    max_depth = max((len(g) for g in solved.generators), default=0)
    candidates = [
        x
        for x in admissible_words(w)
        if is_lyndon(x) and x not in solved.generators and len(x) < max_depth
    ]
    confirmed = True
    checked = 0
    config = RunConfig(jobs=1, kinds=tuple(kinds))
    for x in candidates:
        checked += 1
        alt = solve_weight(w, lower, config, survivor_bias=x)
        if x in alt.generators:
            alt_sum = sum(len(g) for g in alt.generators)
            if alt_sum < depth_sum:
                confirmed = False
    return MinimalDepthReport(w, depth_sum, histogram, checked, confirmed)
