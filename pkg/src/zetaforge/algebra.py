"""Exact product algebras on index words, relation generation, and the
truncated-sum numerical oracle.

Two product rules on nested zeta sums are implemented exactly over the
integers: the stuffle (quasi-shuffle) product, which merges index sequences
with carry terms, and the shuffle product, which interleaves the binary
encodings.  Both expand a product of two sums into an integer combination of
single sums of the combined weight.  The difference of the two expansions of
one pair is a rational linear relation among same-weight words; together
with the regularized relations built from the divergent index 1 they form
the relation streams the solver consumes.

Linear combinations are plain dicts mapping a key (an index word, or a basis
monomial which is a tuple of generator words) to a nonzero
:class:`~fractions.Fraction`.  The helpers here maintain the no-zero-terms
invariant in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterator

from .words import (
    Word,
    admissible_words,
    dual,
    from_binary,
    is_admissible,
    render_word,
    to_binary,
    weight,
)

Monomial = tuple[Word, ...]

RELATION_KINDS = ("stuffle", "shuffle", "hoffman", "duality")
DEFAULT_KINDS = ("stuffle", "shuffle", "hoffman")

ZETA2 = math.pi ** 2 / 6


def check_kinds(kinds) -> frozenset[str]:
    """Validate a relation-kind selection before any work starts."""
    ks = frozenset(kinds)
    unknown = ks - set(RELATION_KINDS)
    if unknown:
        raise ValueError(
            f"unknown relation kinds {sorted(unknown)}; "
            f"choose from {', '.join(RELATION_KINDS)}"
        )
    if not ks:
        raise ValueError("relation kind selection is empty")
    return ks


# ------------------------------------------------- linear combination utils

def add_term(lc: dict, key, coeff) -> None:
    """lc[key] += coeff, dropping the key when the sum cancels."""
    new = lc.get(key, 0) + coeff
    if new:
        lc[key] = new
    else:
        lc.pop(key, None)


def add_scaled(lc: dict, other: dict, scale=1) -> None:
    """lc += scale * other, term by term."""
    for key, coeff in other.items():
        add_term(lc, key, scale * coeff)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    """Concatenate factor multisets, keeping the canonical factor order
    (descending weight, then ascending word)."""
    return tuple(sorted(a + b, key=lambda f: (-weight(f), f)))


def lc_mul(a: dict[Monomial, Fraction], b: dict[Monomial, Fraction]) -> dict[Monomial, Fraction]:
    """Product of two combinations of basis monomials."""
    out: dict[Monomial, Fraction] = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            add_term(out, mono_mul(ma, mb), ca * cb)
    return out


# ---------------------------------------------------------------- products

def stuffle(u: Word, v: Word) -> dict[Word, int]:
    """Stuffle (quasi-shuffle) expansion of the product of two nested sums.

    Recursion on leading letters: (a u') * (b v') contributes a-leading,
    b-leading, and merged (a+b)-leading terms.  Result words have the
    combined weight and depth at most the combined depth.  Admissibility of
    the inputs is not required; the regularized relations need the divergent
    word (1) transiently.
    """
    out: dict[Word, int] = {}

    def rec(x: Word, y: Word, prefix: Word) -> None:
        if not x:
            w = prefix + y
            out[w] = out.get(w, 0) + 1
            return
        if not y:
            w = prefix + x
            out[w] = out.get(w, 0) + 1
            return
        rec(x[1:], y, prefix + (x[0],))
        rec(x, y[1:], prefix + (y[0],))
        rec(x[1:], y[1:], prefix + (x[0] + y[0],))

    rec(u, v, ())
    return out


def shuffle_binary(a: str, b: str) -> dict[str, int]:
    """Shuffle expansion on binary words: all interleavings preserving the
    internal order of each factor, with multiplicity.  Total count is
    binomial(len(a)+len(b), len(a))."""
    out: dict[str, int] = {}
    n = len(a) + len(b)
    for positions in combinations(range(n), len(a)):
        letters = [""] * n
        for ai, p in enumerate(positions):
            letters[p] = a[ai]
        bi = 0
        for i in range(n):
            if not letters[i]:
                letters[i] = b[bi]
                bi += 1
        word = "".join(letters)
        out[word] = out.get(word, 0) + 1
    return out


def shuffle_words(u: Word, v: Word) -> dict[Word, int]:
    """Shuffle expansion mapped through the binary encoding.  Requires
    admissible factors so every interleaving decodes to an index word."""
    raw = shuffle_binary(to_binary(u), to_binary(v))
    out: dict[Word, int] = {}
    for b, c in raw.items():
        w = from_binary(b)
        out[w] = out.get(w, 0) + c
    return out


def hoffman_relation(v: Word) -> dict[Word, int]:
    """The regularized relation at weight(v)+1 built from the divergent
    index 1: stuffle((1), v) minus the Y-insertion shuffle of the encoding
    of v.  The single non-admissible term, the word 1v common to both
    products, cancels exactly; everything that survives is admissible.
    """
    if not is_admissible(v):
        raise ValueError(f"regularized relation needs an admissible word, got {v!r}")
    out: dict[Word, int] = dict(stuffle((1,), v))
    bv = to_binary(v)
    for i in range(len(bv) + 1):
        w = from_binary(bv[:i] + "Y" + bv[i:])
        add_term(out, w, -1)
    for w in out:
        if not is_admissible(w):
            raise AssertionError(
                f"non-admissible word {w!r} survived regularization of {v!r}"
            )
    return out


def duality_relation(v: Word) -> dict[Word, int] | None:
    """Z(v) - Z(dual(v)), or None when v is self-dual."""
    d = dual(v)
    if d == v:
        return None
    return {v: 1, d: -1}


# --------------------------------------------------------- relation stream

@dataclass
class Relation:
    """One generated relation at a fixed weight.

    ``combo`` maps index words to rational coefficients.  When ``product_of``
    is None the combination is identically zero as a statement about real
    numbers.  When ``product_of = (u, v)`` the combination equals the product
    Z(u)*Z(v); the solver attaches the product's value over lower-weight
    tables during substitution.
    """

    kind: str
    provenance: tuple
    combo: dict[Word, Fraction] = field(repr=False)
    product_of: tuple[Word, Word] | None = None


def weight_pairs(w: int) -> Iterator[tuple[Word, Word]]:
    """Unordered pairs of admissible words with weights summing to ``w``,
    in the documented deterministic order: lighter factor weight ascending,
    then each factor ascending, pairs of equal weight deduplicated."""
    for a in range(2, w - 1):
        b = w - a
        if b < a:
            break
        us = admissible_words(a)
        vs = admissible_words(b)
        for i, u in enumerate(us):
            for v in (vs[i:] if a == b else vs):
                yield u, v


def gen_relations(
    w: int,
    kinds=DEFAULT_KINDS,
    depth_cap: int | None = None,
) -> Iterator[Relation]:
    """The deterministic relation stream at weight ``w``.

    Emission order: product-pair relations first (when both product kinds
    are enabled the pair contributes the single difference relation, kind
    ``pair``; with exactly one product kind enabled each pair contributes
    that expansion tagged with ``product_of``), then the regularized
    relations over admissible words of weight w-1, then duality relations if
    enabled.  ``depth_cap`` drops any relation containing a word deeper than
    the cap, keeping every emitted relation a true identity.
    """
    ks = check_kinds(kinds)
    if w < 3:
        return

    def capped(combo: dict[Word, Fraction]) -> bool:
        return depth_cap is not None and any(len(x) > depth_cap for x in combo)

    both = "stuffle" in ks and "shuffle" in ks
    if "stuffle" in ks or "shuffle" in ks:
        for u, v in weight_pairs(w):
            if both:
                combo: dict[Word, Fraction] = {
                    x: Fraction(c) for x, c in stuffle(u, v).items()
                }
                for x, c in shuffle_words(u, v).items():
                    add_term(combo, x, Fraction(-c))
                rel = Relation("pair", (u, v), combo)
            elif "stuffle" in ks:
                combo = {x: Fraction(c) for x, c in stuffle(u, v).items()}
                rel = Relation("stuffle-product", (u, v), combo, product_of=(u, v))
            else:
                combo = {x: Fraction(c) for x, c in shuffle_words(u, v).items()}
                rel = Relation("shuffle-product", (u, v), combo, product_of=(u, v))
            if not capped(rel.combo):
                yield rel
    if "hoffman" in ks:
        for v in admissible_words(w - 1):
            combo = {x: Fraction(c) for x, c in hoffman_relation(v).items()}
            if not capped(combo):
                yield Relation("hoffman", (v,), combo)
    if "duality" in ks:
        for v in admissible_words(w):
            pair = duality_relation(v)
            if pair is None or dual(v) < v:
                continue
            combo = {x: Fraction(c) for x, c in pair.items()}
            if not capped(combo):
                yield Relation("duality", (v,), combo)


def render_relation(rel: Relation, pool: frozenset[Word]) -> str:
    """One dump line: ``0 = c1*Z(...) + c2*Z(...) # kind: ...`` with terms in
    elimination order (first-eliminated first) and rationals as p/q.  A
    relation equal to a product carries the product as a trailing -1 term."""
    from .words import elim_key

    terms = sorted(rel.combo.items(), key=lambda kv: elim_key(kv[0], pool), reverse=True)
    parts = [f"{c}*{render_word(x)}" for x, c in terms]
    if rel.product_of is not None:
        u, v = rel.product_of
        parts.append(f"-1*{render_word(u)}*{render_word(v)}")
    if not parts:
        parts = ["0"]
    prov = "*".join(render_word(x) for x in rel.provenance)
    return f"0 = {' + '.join(parts)} # kind: {rel.kind} {prov}"


# ---------------------------------------------------------- numeric oracle

def eval_truncated(w: Word, n_max: int) -> float:
    """Truncated nested sum over n1 > n2 > ... > nD >= 1 with n1 <= n_max.

    Plain double-precision summation by depth layers with prefix sums,
    O(depth * n_max).  Monotone nondecreasing in n_max; no convergence
    acceleration on purpose (the oracle stays independent and simple).
    """
    if not is_admissible(w):
        raise ValueError(f"truncated evaluation needs an admissible word, got {w!r}")
    if n_max < len(w):
        raise ValueError(f"cutoff {n_max} below depth of {w!r}")
    # prefix[n] = sum of the depth-(j..D) nested tail over chains with n_j <= n
    prefix = [0.0] * (n_max + 1)
    m = w[-1]
    for n in range(1, n_max + 1):
        prefix[n] = prefix[n - 1] + n ** -m
    for m in reversed(w[:-1]):
        nxt = [0.0] * (n_max + 1)
        for n in range(1, n_max + 1):
            nxt[n] = nxt[n - 1] + n ** -m * prefix[n - 1]
        prefix = nxt
    return prefix[n_max]


def truncation_tail_bound(w: Word, n_max: int) -> float:
    """Rigorous upper bound for the truncation tail of :func:`eval_truncated`.

    Every inner index >= 2 contributes at most its full sum (<= zeta(2)),
    with a k! saved per maximal run of k equal indices (a nested chain over
    one run is at most the k-th power of a single sum over k!).  The k inner
    1s contribute harmonic factors that still grow with the outer variable,
    so the outer tail is bounded against the integral of
    x**(-m1) * (1 + log x)**k, which integration by parts evaluates to
    N**(1-m1)/(m1-1) times a short polynomial in 1 + log N; one unimodal-peak
    term keeps the sum-vs-integral comparison valid unconditionally.  The
    bound is tight to a few percent for 1-heavy words and loose by orders of
    magnitude for large leading indices.
    """
    m1 = w[0]
    if m1 < 2:
        raise ValueError(f"tail bound needs an admissible word, got {w!r}")
    const = 1.0
    ones = 0
    i = 1
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        run = j - i
        if w[i] >= 2:
            const *= ZETA2 ** run / math.factorial(run)
        else:
            ones += run
            const /= math.factorial(run)
        i = j
    log_term = 1.0 + math.log(n_max)
    series = 0.0
    for j in range(ones + 1):
        series += (
            math.factorial(ones)
            / math.factorial(ones - j)
            * log_term ** (ones - j)
            / (m1 - 1) ** j
        )
    integral = n_max ** (1 - m1) / (m1 - 1) * series
    x_peak = max(n_max + 1.0, math.exp(ones / m1 - 1.0))
    peak = x_peak ** -m1 * (1.0 + math.log(x_peak)) ** ones
    return const * (integral + peak)


def eval_expansion(expansion: dict[Word, int], n_max: int) -> float:
    """Truncated evaluation of an integer combination of admissible words."""
    return sum(c * eval_truncated(x, n_max) for x, c in expansion.items())


def expansion_tolerance(expansion: dict[Word, int], n_max: int, floor: float = 1e-4) -> float:
    """Coefficient-weighted sum of per-word tail bounds, floored: how far a
    truncated evaluation of the expansion may sit from its exact limit."""
    return max(floor, sum(abs(c) * truncation_tail_bound(x, n_max) for x, c in expansion.items()))


def product_comparison_tolerance(
    u: Word, v: Word, expansion: dict[Word, int], n_max: int, floor: float = 1e-4
) -> float:
    """Certified tolerance for |eval_expansion(expansion) - S_u(N)*S_v(N)|
    given that the expansion equals the product exactly in the limit.

    Triangle inequality: the expansion side misses its limit by at most the
    per-term tails, and the truncated product misses the limit product by at
    most hat(u)*tail(v) + hat(v)*tail(u) with hat the truncated value plus
    its own tail.  Stuffle expansions match the truncated product exactly at
    every finite cutoff, so for them only the float-roundoff floor matters;
    shuffle expansions genuinely differ by truncation and need the full
    bound.
    """
    tail_u = truncation_tail_bound(u, n_max)
    tail_v = truncation_tail_bound(v, n_max)
    hat_u = eval_truncated(u, n_max) + tail_u
    hat_v = eval_truncated(v, n_max) + tail_v
    terms = sum(abs(c) * truncation_tail_bound(x, n_max) for x, c in expansion.items())
    return max(floor, terms + hat_u * tail_v + hat_v * tail_u)
