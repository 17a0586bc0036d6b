"""Weight-by-weight reduction onto the conjectured basis.

The pipeline per weight W, given fully-reduced tables for all lower weights:

1. Family reduction.  Stuffle relations mix only words sharing one index
   multiset (a family) plus lower-depth merge terms and lower-weight
   products, so each family is solved locally, depth ascending, producing an
   entry for every non-Lyndon admissible word over same-weight Lyndon words
   and products of lower-weight generators.  Families at one depth are
   independent given the lower depths, which is the parallel unit.

2. Bracketed elimination.  The remaining relation rows (regularized rows,
   shuffle product rows, optionally duality rows), with family entries
   substituted, are reduced over the Lyndon words of the weight in a fixed
   elimination order.  Words that never become a pivot survive as this
   weight's generators.  Row expansion is the parallel unit; pivot selection
   is sequential, so the result is independent of worker count.

3. Assembly.  Pivot brackets are back-substituted and composed with the
   family entries into the fully-reduced table: every admissible word of the
   weight maps to a combination of basis monomials (products of generators
   of total weight W).

Tables persist as one text file per weight plus a manifest with content
hashes; long phases checkpoint so an interrupted solve can resume, refusing
to reuse a checkpoint whose payload hash does not match.
"""

from __future__ import annotations

import hashlib
import json
import logging
import multiprocessing
import os
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable

from ._meta import BUILD_ID, TABLE_FORMAT
from .algebra import (
    DEFAULT_KINDS,
    Monomial,
    add_scaled,
    add_term,
    check_kinds,
    dual,
    hoffman_relation,
    lc_mul,
    shuffle_words,
    stuffle,
    weight_pairs,
)
from .lyndon import candidate_words, listing_key
from .words import (
    Word,
    admissible_words,
    elim_key,
    is_lyndon,
    parse_word,
    render_word,
    weight,
)

log = logging.getLogger(__name__)

Entry = dict[Monomial, Fraction]
WordCombo = dict[Word, Fraction]
MonoCombo = dict[Monomial, Fraction]
# A half-reduced expression: a part still over same-weight words plus a part
# already over basis monomials.
SplitCombo = tuple[WordCombo, MonoCombo]


class SolverError(Exception):
    """Base class for solve-time failures."""


class UnderdeterminedFamily(SolverError):
    """A family's stuffle relations could not express some non-Lyndon member."""


class InconsistentRelation(SolverError):
    """A relation reduced to 0 = nonzero; indicates a relation bug."""


class MissingTable(SolverError):
    """A required lower-weight table is absent."""


class StoreIntegrityError(SolverError):
    """A manifest or checkpoint hash does not match its payload."""


# ----------------------------------------------------------- configuration

@dataclass(frozen=True)
class RunConfig:
    """Solve configuration.  Worker count never affects results, so it is
    excluded from the checkpoint fingerprint."""

    jobs: int = 1
    kinds: tuple[str, ...] = DEFAULT_KINDS
    checkpoint_every: int = 1000

    def __post_init__(self) -> None:
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        if self.checkpoint_every < 1:
            raise ValueError(f"checkpoint interval must be >= 1, got {self.checkpoint_every}")
        check_kinds(self.kinds)

    def fingerprint(self) -> dict:
        return {"format": TABLE_FORMAT, "kinds": sorted(set(self.kinds))}


@dataclass
class SolvedWeight:
    """A fully-reduced substitution table for one weight.

    ``entries`` maps every admissible word of the weight (generators
    included, as their own single-factor monomial) to a combination of basis
    monomials.  ``generators`` are the surviving single words, in listing
    order.
    """

    weight: int
    generators: list[Word]
    entries: dict[Word, Entry]
    phase: str = "fully-reduced"
    stats: dict = field(default_factory=dict)


def seed_weight_2() -> SolvedWeight:
    """The base of the recursion: weight 2 with the single generator (2)."""
    return SolvedWeight(2, [(2,)], {(2,): {((2,),): Fraction(1)}})


# ------------------------------------------------------------ substitution

def product_value(u: Word, v: Word, tables: dict[int, SolvedWeight]) -> MonoCombo:
    """The product Z(u)*Z(v) expanded over basis monomials via the
    fully-reduced lower-weight tables."""
    return lc_mul(tables[weight(u)].entries[u], tables[weight(v)].entries[v])


def split_substitute(combo: WordCombo, entries: dict[Word, SplitCombo]) -> SplitCombo:
    """Apply half-reduced entries to a same-weight word combination.

    Entries are kept fully substituted against each other (their word parts
    mention only words without entries), so one pass suffices and the
    operation is idempotent.
    """
    word_part: WordCombo = {}
    mono_part: MonoCombo = {}
    for w, c in combo.items():
        entry = entries.get(w)
        if entry is None:
            add_term(word_part, w, c)
        else:
            add_scaled(word_part, entry[0], c)
            add_scaled(mono_part, entry[1], c)
    return word_part, mono_part


def substitute_tables(combo: WordCombo, tables: dict[int, SolvedWeight]) -> MonoCombo:
    """Fully reduce a weight-homogeneous word combination through the
    fully-reduced tables.  Idempotent in the sense that the result is already
    over basis monomials; errors name the first unresolved word."""
    out: MonoCombo = {}
    for w, c in combo.items():
        table = tables.get(weight(w))
        if table is None or w not in table.entries:
            raise MissingTable(f"no table entry for {render_word(w)}")
        add_scaled(out, table.entries[w], c)
    return out


# --------------------------------------------------------- family reduction

def family_partition(w: int, d: int) -> dict[tuple[int, ...], list[Word]]:
    """Admissible weight-w depth-d words grouped by index multiset (keys are
    the multiset sorted descending), each family's members sorted."""
    if not w > d >= 1:
        raise ValueError(f"need weight > depth >= 1, got weight {w} depth {d}")
    families: dict[tuple[int, ...], list[Word]] = {}
    for word in admissible_words(w):
        if len(word) == d:
            families.setdefault(tuple(sorted(word, reverse=True)), []).append(word)
    return families


def _multiset_splits(key: tuple[int, ...]) -> list[tuple[tuple, tuple]]:
    """Unordered splits of a multiset into two nonempty sub-multisets."""
    items = list(key)
    n = len(items)
    seen = set()
    out = []
    for r in range(1, n // 2 + 1):
        for picked in combinations(range(n), r):
            left = tuple(sorted((items[i] for i in picked), reverse=True))
            rest = tuple(
                sorted((items[i] for i in range(n) if i not in picked), reverse=True)
            )
            if 2 * r == n and left > rest:
                left, rest = rest, left
            if (left, rest) not in seen:
                seen.add((left, rest))
                out.append((left, rest))
    return out


def _admissible_orderings(mset: tuple[int, ...]) -> list[Word]:
    """Distinct admissible orderings of a multiset, sorted."""
    found = set()

    def rec(prefix: Word, rest: tuple[int, ...]) -> None:
        if not rest:
            found.add(prefix)
            return
        used = set()
        for i, m in enumerate(rest):
            if m in used:
                continue
            used.add(m)
            rec(prefix + (m,), rest[:i] + rest[i + 1:])

    rec((), mset)
    return sorted(w for w in found if w[0] >= 2)


def solve_family(
    key: tuple[int, ...],
    members: list[Word],
    pool: frozenset[Word],
    entries: dict[Word, SplitCombo],
    tables: dict[int, SolvedWeight],
) -> dict[Word, SplitCombo]:
    """Express every non-Lyndon member of one family over Lyndon words and
    tabled content, using the stuffle relations of all splits of the family
    multiset.  ``entries`` must already cover all lower depths of the same
    weight; the returned local entries are fully substituted."""
    unknowns = [w for w in members if not is_lyndon(w)]
    if not unknowns:
        return {}
    local: dict[Word, SplitCombo] = {}
    depth = len(key)

    for left, right in _multiset_splits(key):
        for u in _admissible_orderings(left):
            for v in _admissible_orderings(right):
                expansion = {w: Fraction(c) for w, c in stuffle(u, v).items()}
                word_part, mono_part = split_substitute(expansion, entries)
                add_scaled(mono_part, product_value(u, v, tables), -1)
                # local entries never reference each other's pivots (they are
                # rewritten whenever a new pivot lands), so one pass suffices
                word_part, local_monos = split_substitute(word_part, local)
                add_scaled(mono_part, local_monos, 1)
                pivot_choices = [
                    w for w in word_part if len(w) == depth and not is_lyndon(w)
                ]
                if not pivot_choices:
                    if word_part or mono_part:
                        raise InconsistentRelation(
                            f"family {key}: stuffle of {render_word(u)} and "
                            f"{render_word(v)} left a relation among Lyndon words"
                        )
                    continue
                pivot = max(pivot_choices, key=lambda w: elim_key(w, pool))
                scale = -1 / word_part.pop(pivot)
                expr_w = {w: c * scale for w, c in word_part.items()}
                expr_m = {m: c * scale for m, c in mono_part.items()}
                for prev, (prev_w, prev_m) in local.items():
                    c0 = prev_w.pop(pivot, None)
                    if c0 is not None:
                        add_scaled(prev_w, expr_w, c0)
                        add_scaled(prev_m, expr_m, c0)
                local[pivot] = (expr_w, expr_m)
    missing = [w for w in unknowns if w not in local]
    if missing:
        raise UnderdeterminedFamily(
            f"family {key} leaves {[render_word(w) for w in missing]} unexpressed"
        )
    return local


# --------------------------------------------------- parallel worker plumbing

# Fork-inherited read-only context for worker processes.  Set immediately
# before a Pool is created and cleared after; workers never mutate it.
_WORKER_CTX: dict = {}


def _set_worker_ctx(**ctx) -> None:
    global _WORKER_CTX
    _WORKER_CTX = ctx


def _clear_worker_ctx() -> None:
    global _WORKER_CTX
    _WORKER_CTX = {}


def _family_worker(key: tuple[int, ...]) -> tuple[tuple[int, ...], dict]:
    ctx = _WORKER_CTX
    return key, solve_family(
        key, ctx["families"][key], ctx["pool"], ctx["entries"], ctx["tables"]
    )


def _row_worker(desc: tuple) -> SplitCombo:
    ctx = _WORKER_CTX
    return expand_row(desc, ctx["entries"], ctx["tables"])


def _fork_context():
    try:
        return multiprocessing.get_context("fork")
    except ValueError:
        log.warning("fork start method unavailable; running single-process")
        return None


def _parallel_map_list(fn, items: list, jobs: int, chunksize: int = 1) -> list:
    """Ordered map over items, forked across ``jobs`` workers when possible.
    Falls back to sequential when jobs == 1 or fork is unavailable."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    ctx = _fork_context()
    if ctx is None:
        return [fn(item) for item in items]
    with ctx.Pool(min(jobs, len(items))) as pool:
        return list(pool.imap(fn, items, chunksize=chunksize))


def family_phase(
    w: int,
    tables: dict[int, SolvedWeight],
    pool: frozenset[Word],
    jobs: int = 1,
    on_depth_done: Callable[[int, dict[Word, SplitCombo]], None] | None = None,
    resume: tuple[int, dict[Word, SplitCombo]] | None = None,
) -> dict[Word, SplitCombo]:
    """Run family reduction for all depths of weight ``w``, ascending.

    Returns the entry map word -> (word part, monomial part) covering every
    non-Lyndon admissible word.  ``on_depth_done`` fires after each completed
    depth (the checkpoint hook); ``resume`` restarts after a completed depth.
    """
    entries: dict[Word, SplitCombo] = {}
    done_depth = 0
    if resume is not None:
        done_depth, entries = resume
    all_families: dict[int, dict] = {}
    for word in admissible_words(w):
        all_families.setdefault(len(word), {}).setdefault(
            tuple(sorted(word, reverse=True)), []
        ).append(word)
    for depth in sorted(all_families):
        if depth <= done_depth:
            continue
        families = all_families[depth]
        keys = sorted(k for k, members in families.items()
                      if any(not is_lyndon(m) for m in members))
        _set_worker_ctx(families=families, pool=pool, entries=entries, tables=tables)
        try:
            results = _parallel_map_list(_family_worker, keys, jobs)
        finally:
            _clear_worker_ctx()
        for _key, local in results:
            entries.update(local)
        if on_depth_done is not None:
            on_depth_done(depth, entries)
    return entries


# ------------------------------------------------------ bracketed elimination

MonoCol = tuple[str, int]


class MasterExpression:
    """Elimination state over one weight's Lyndon words.

    Each pivot bracket maps an eliminated word (a column index) to a monic
    row over later columns and monomial tail columns; reading the row as
    "word = minus the rest" gives the bracket's current right-hand side.
    Absorbing a relation row reduces it against existing brackets and either
    installs a new bracket at its leading column or discards it as redundant.
    Substitution is bracket-local by construction: absorbing or
    back-substituting one bracket never needs data from another bracket
    beyond its finished row, so brackets can be distributed.
    """

    def __init__(self, columns: list[Word]):
        self.columns = columns
        self.col_of = {w: i for i, w in enumerate(columns)}
        self.mono_ids: dict[Monomial, int] = {}
        self.monomials: list[Monomial] = []
        self.pivots: dict[int, dict] = {}
        self.redundant = 0
        self.consumed = 0
        self.total_terms = 0
        self.max_terms = 0

    def _mono_col(self, m: Monomial) -> MonoCol:
        mid = self.mono_ids.get(m)
        if mid is None:
            mid = len(self.monomials)
            self.mono_ids[m] = mid
            self.monomials.append(m)
        return ("m", mid)

    def absorb(self, split: SplitCombo, origin: str) -> bool:
        """Reduce one relation row into the bracket set.  Returns True when
        the row installed a new pivot bracket, False when redundant."""
        word_part, mono_part = split
        row: dict = {}
        for w, c in word_part.items():
            col = self.col_of.get(w)
            if col is None:
                raise InconsistentRelation(
                    f"{origin}: word {render_word(w)} missing a family entry"
                )
            add_term(row, col, c)
        for m, c in mono_part.items():
            add_term(row, self._mono_col(m), c)
        self.consumed += 1
        while True:
            lead = min((k for k in row if isinstance(k, int)), default=None)
            if lead is None:
                if row:
                    raise InconsistentRelation(f"{origin}: reduced to 0 = nonzero")
                self.redundant += 1
                return False
            holder = self.pivots.get(lead)
            if holder is None:
                scale = 1 / row[lead]
                self.pivots[lead] = {k: v * scale for k, v in row.items()}
                self.total_terms += len(row)
                self.max_terms = max(self.max_terms, self.total_terms)
                return True
            scale = row.pop(lead)
            for k, v in holder.items():
                if k != lead:
                    add_term(row, k, -scale * v)

    def back_substitute(self) -> None:
        """Remove pivot columns from every bracket, descending, leaving each
        bracket over survivor columns and monomial columns only."""
        for col in sorted(self.pivots, reverse=True):
            row = self.pivots[col]
            inner = sorted(
                k for k in row if isinstance(k, int) and k != col and k in self.pivots
            )
            for k in inner:
                scale = row.pop(k)
                for k2, v2 in self.pivots[k].items():
                    if k2 != k:
                        add_term(row, k2, -scale * v2)

    def survivors(self) -> list[Word]:
        return [w for i, w in enumerate(self.columns) if i not in self.pivots]

    # -------- checkpoint serialization

    def state(self) -> dict:
        def col_key(k) -> str:
            return f"c{k}" if isinstance(k, int) else f"m{k[1]}"

        return {
            "monomials": [_mono_str(m) for m in self.monomials],
            "pivots": {
                str(col): {col_key(k): str(v) for k, v in row.items()}
                for col, row in self.pivots.items()
            },
            "redundant": self.redundant,
            "consumed": self.consumed,
            "total_terms": self.total_terms,
            "max_terms": self.max_terms,
        }

    def restore(self, state: dict) -> None:
        self.monomials = [_parse_mono_str(s) for s in state["monomials"]]
        self.mono_ids = {m: i for i, m in enumerate(self.monomials)}

        def parse_col(s: str):
            return int(s[1:]) if s[0] == "c" else ("m", int(s[1:]))

        self.pivots = {
            int(col): {parse_col(k): Fraction(v) for k, v in row.items()}
            for col, row in state["pivots"].items()
        }
        self.redundant = state["redundant"]
        self.consumed = state["consumed"]
        self.total_terms = state["total_terms"]
        self.max_terms = state["max_terms"]


def elimination_rows(w: int, kinds: Iterable[str]) -> list[tuple]:
    """Descriptors of the elimination-phase relation rows, in the documented
    deterministic consumption order: regularized rows over sorted admissible
    words of weight w-1, then shuffle product rows over the standard pair
    order, then duality rows if enabled."""
    ks = frozenset(kinds)
    rows: list[tuple] = []
    if "hoffman" in ks:
        rows.extend(("hoffman", v) for v in admissible_words(w - 1))
    if "shuffle" in ks:
        rows.extend(("shuffle", u, v) for u, v in weight_pairs(w))
    if "duality" in ks:
        for v in admissible_words(w):
            if dual(v) > v:
                rows.append(("duality", v))
    return rows


def expand_row(
    desc: tuple,
    entries: dict[Word, SplitCombo],
    tables: dict[int, SolvedWeight],
) -> SplitCombo:
    """Expand one row descriptor into a half-reduced relation: family
    entries applied, lower-weight products resolved to monomials."""
    kind = desc[0]
    if kind == "hoffman":
        combo = {w: Fraction(c) for w, c in hoffman_relation(desc[1]).items()}
        return split_substitute(combo, entries)
    if kind == "shuffle":
        u, v = desc[1], desc[2]
        combo = {w: Fraction(c) for w, c in shuffle_words(u, v).items()}
        word_part, mono_part = split_substitute(combo, entries)
        add_scaled(mono_part, product_value(u, v, tables), -1)
        return word_part, mono_part
    if kind == "duality":
        v = desc[1]
        combo = {v: Fraction(1)}
        add_term(combo, dual(v), Fraction(-1))
        return split_substitute(combo, entries)
    raise ValueError(f"unknown row descriptor {desc!r}")


def _row_origin(desc: tuple) -> str:
    if desc[0] == "shuffle":
        return f"shuffle {render_word(desc[1])}*{render_word(desc[2])}"
    return f"{desc[0]} {render_word(desc[1])}"


# ------------------------------------------------------------- checkpointing

def _canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _payload_hash(payload: dict) -> str:
    return hashlib.sha256(_canonical_json(payload).encode("ascii")).hexdigest()


class Checkpointer:
    """Hash-guarded resume state for one weight's solve.

    The file holds a JSON payload plus its sha256; a payload that fails the
    hash check refuses to resume (the caller must delete the file to start
    over).  A checkpoint written under a different configuration fingerprint
    is ignored with a warning instead, since it describes a different run.
    """

    def __init__(self, path: Path, fingerprint: dict, every: int = 1000):
        self.path = Path(path)
        self.fingerprint = fingerprint
        self.every = max(1, every)

    def load(self) -> dict | None:
        if not self.path.exists():
            return None
        try:
            wrapper = json.loads(self.path.read_text(encoding="ascii"))
            payload = wrapper["payload"]
            recorded = wrapper["sha256"]
        except (ValueError, KeyError) as exc:
            raise StoreIntegrityError(f"unreadable checkpoint {self.path}: {exc}") from exc
        if _payload_hash(payload) != recorded:
            raise StoreIntegrityError(
                f"checkpoint {self.path} fails its hash check; refusing to resume "
                f"(delete the file to restart this weight)"
            )
        if payload.get("fingerprint") != self.fingerprint:
            log.warning("ignoring checkpoint %s from a different configuration", self.path)
            return None
        return payload

    def save(self, payload: dict) -> None:
        payload = dict(payload, fingerprint=self.fingerprint)
        wrapper = {"payload": payload, "sha256": _payload_hash(payload)}
        _atomic_write(self.path, json.dumps(wrapper))

    def clear(self) -> None:
        try:
            self.path.unlink()
        except FileNotFoundError:
            pass


def _entries_state(entries: dict[Word, SplitCombo]) -> dict:
    return {
        _word_str(w): {
            "w": {_word_str(x): str(c) for x, c in wp.items()},
            "m": {_mono_str(m): str(c) for m, c in mp.items()},
        }
        for w, (wp, mp) in entries.items()
    }


def _entries_restore(state: dict) -> dict[Word, SplitCombo]:
    out: dict[Word, SplitCombo] = {}
    for ws, parts in state.items():
        wp = {_parse_word_str(x): Fraction(c) for x, c in parts["w"].items()}
        mp = {_parse_mono_str(m): Fraction(c) for m, c in parts["m"].items()}
        out[_parse_word_str(ws)] = (wp, mp)
    return out


def _word_str(w: Word) -> str:
    return ",".join(str(m) for m in w)


def _parse_word_str(s: str) -> Word:
    return tuple(int(p) for p in s.split(","))


def _mono_str(m: Monomial) -> str:
    return "|".join(_word_str(f) for f in m)


def _parse_mono_str(s: str) -> Monomial:
    return tuple(_parse_word_str(p) for p in s.split("|"))


# ------------------------------------------------------------- weight solve

def solve_weight(
    w: int,
    tables: dict[int, SolvedWeight],
    config: RunConfig = RunConfig(),
    checkpointer: Checkpointer | None = None,
    survivor_bias: Word | None = None,
    progress: Callable[[str], None] | None = None,
) -> SolvedWeight:
    """Solve one weight given fully-reduced tables for all lower weights.

    ``survivor_bias`` moves one Lyndon word to the very end of the
    elimination scan so it survives whenever the relations allow; the
    verification module uses this for minimal-depth searches.  The bias is
    never part of a persisted run.
    """
    if w == 2:
        return seed_weight_2()
    if w < 2:
        raise ValueError(f"weight must be >= 2, got {w}")
    kinds = check_kinds(config.kinds)
    if "stuffle" not in kinds:
        raise ValueError("the solver requires the stuffle kind for family reduction")
    for lower in range(2, w):
        if lower not in tables:
            raise MissingTable(f"weight {lower} must be solved before weight {w}")

    def note(msg: str) -> None:
        if progress is not None:
            progress(msg)
        log.debug("%s", msg)

    pool = candidate_words(w)
    checkpoint = checkpointer.load() if checkpointer is not None else None

    # ---- family reduction
    t0 = time.monotonic()
    resume_families = None
    if checkpoint is not None and checkpoint["phase"] == "families":
        resume_families = (checkpoint["depth_done"], _entries_restore(checkpoint["entries"]))
        note(f"weight {w}: resuming family phase after depth {checkpoint['depth_done']}")

    def depth_done(depth: int, entries: dict) -> None:
        if checkpointer is not None:
            checkpointer.save(
                {
                    "weight": w,
                    "phase": "families",
                    "depth_done": depth,
                    "entries": _entries_state(entries),
                }
            )
        log.debug("weight %d: family depth %d done", w, depth)

    if checkpoint is not None and checkpoint["phase"] == "elimination":
        entries = _entries_restore(checkpoint["entries"])
    else:
        entries = family_phase(
            w, tables, pool, config.jobs, on_depth_done=depth_done, resume=resume_families
        )
    family_seconds = time.monotonic() - t0

    # ---- bracketed elimination
    t1 = time.monotonic()
    columns = sorted(
        (x for x in admissible_words(w) if is_lyndon(x)),
        key=lambda x: elim_key(x, pool),
        reverse=True,
    )
    if survivor_bias is not None:
        if survivor_bias not in columns:
            raise ValueError(f"survivor bias {survivor_bias!r} is not a Lyndon word at weight {w}")
        columns.remove(survivor_bias)
        columns.append(survivor_bias)
    master = MasterExpression(columns)
    rows = elimination_rows(w, kinds)
    start_at = 0
    if checkpoint is not None and checkpoint["phase"] == "elimination":
        master.restore(checkpoint["master"])
        start_at = master.consumed
        note(f"weight {w}: resuming elimination after {start_at} rows")

    pending = rows[start_at:]
    fork = _fork_context() if config.jobs > 1 and len(pending) > 1 else None
    _set_worker_ctx(entries=entries, tables=tables)
    try:
        if fork is not None:
            with fork.Pool(config.jobs) as procs:
                for desc, split in zip(
                    pending, procs.imap(_row_worker, pending, chunksize=16)
                ):
                    _absorb_checked(master, split, desc, checkpointer, w, entries)
        else:
            for desc in pending:
                _absorb_checked(
                    master, expand_row(desc, entries, tables), desc,
                    checkpointer, w, entries,
                )
    finally:
        _clear_worker_ctx()

    master.back_substitute()
    survivors = master.survivors()
    elimination_seconds = time.monotonic() - t1

    solved = _assemble(w, master, entries, survivors)
    solved.stats = {
        "families_seconds": round(family_seconds, 3),
        "elimination_seconds": round(elimination_seconds, 3),
        "rows": len(rows),
        "redundant_rows": master.redundant,
        "pivots": len(master.pivots),
        "max_bracket_terms": master.max_terms,
    }
    if checkpointer is not None:
        checkpointer.clear()
    note(
        f"weight {w}: {len(survivors)} generator(s), "
        f"{len(master.pivots)} pivots, {master.redundant} redundant rows"
    )
    return solved


def _absorb_checked(
    master: MasterExpression,
    split: SplitCombo,
    desc: tuple,
    checkpointer: Checkpointer | None,
    w: int,
    entries: dict[Word, SplitCombo],
) -> None:
    became_pivot = master.absorb(split, _row_origin(desc))
    if (
        checkpointer is not None
        and became_pivot
        and len(master.pivots) % checkpointer.every == 0
    ):
        checkpointer.save(
            {
                "weight": w,
                "phase": "elimination",
                "entries": _entries_state(entries),
                "master": master.state(),
            }
        )


def _assemble(
    w: int,
    master: MasterExpression,
    entries: dict[Word, SplitCombo],
    survivors: list[Word],
) -> SolvedWeight:
    """Compose pivot brackets and family entries into the fully-reduced
    table covering every admissible word of the weight."""
    columns = master.columns
    table: dict[Word, Entry] = {}
    for x in survivors:
        table[x] = {(x,): Fraction(1)}

    def bracket_entry(col: int, row: dict) -> Entry:
        entry: Entry = {}
        for k, v in row.items():
            if k == col:
                continue
            if isinstance(k, int):
                word = columns[k]
                if word not in table or k in master.pivots:
                    raise InconsistentRelation(
                        f"bracket for {render_word(columns[col])} still references "
                        f"{render_word(word)} after back-substitution"
                    )
                add_term(entry, (word,), -v)
            else:
                add_term(entry, master.monomials[k[1]], -v)
        return entry

    for col, row in master.pivots.items():
        table[columns[col]] = bracket_entry(col, row)
    for word in admissible_words(w):
        if word in table:
            continue
        word_part, mono_part = entries[word]
        entry = dict(mono_part)
        for x, c in word_part.items():
            add_scaled(entry, table[x], c)
        table[word] = {m: c for m, c in entry.items() if c}

    expected = 2 ** (w - 2)
    if len(table) != expected:
        raise SolverError(
            f"weight {w} table has {len(table)} entries, expected {expected}"
        )
    for word, entry in table.items():
        for mono in entry:
            if sum(weight(f) for f in mono) != w:
                raise SolverError(
                    f"entry for {render_word(word)} contains a monomial of wrong weight"
                )
    return SolvedWeight(
        weight=w,
        generators=sorted(survivors, key=listing_key),
        entries=table,
    )


# ---------------------------------------------------------------- rendering

def render_monomial(m: Monomial) -> str:
    return "*".join(render_word(f) for f in m)


def render_entry(word: Word, entry: Entry) -> str:
    if not entry:
        return f"{render_word(word)} = 0"
    terms = [f"{c}*{render_monomial(m)}" for m, c in sorted(entry.items())]
    return f"{render_word(word)} = {' + '.join(terms)}"


def render_table(solved: SolvedWeight) -> str:
    """The persistent text form of a fully-reduced table.  Entries appear in
    elimination order (first-eliminated first), so the file ends with the
    generators' self-entries; monomials within an entry are sorted, factors
    within a monomial descend by weight; all signs live in the coefficients."""
    pool = candidate_words(solved.weight)
    lines = [
        f"# weight: {solved.weight}",
        f"# phase: {solved.phase}",
        ("# generators: " + " ".join(render_word(g) for g in solved.generators)).rstrip(),
    ]
    order = sorted(
        solved.entries, key=lambda x: elim_key(x, pool), reverse=True
    )
    lines.extend(render_entry(word, solved.entries[word]) for word in order)
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> SolvedWeight:
    """Inverse of :func:`render_table`, with structural validation."""
    lines = text.splitlines()
    header: dict[str, str] = {}
    entries: dict[Word, Entry] = {}
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
            continue
        left, _, right = line.partition("=")
        word = parse_word(left)
        entry: Entry = {}
        right = right.strip()
        if right != "0":
            for term in right.split(" + "):
                coeff_s, _, mono_s = term.partition("*")
                mono = tuple(parse_word(f) for f in mono_s.split("*"))
                add_term(entry, mono, Fraction(coeff_s))
        if word in entries:
            raise ValueError(f"duplicate table entry for {render_word(word)}")
        entries[word] = entry
    try:
        w = int(header["weight"])
        phase = header["phase"]
        gen_field = header["generators"]
    except KeyError as exc:
        raise ValueError(f"table file missing header line {exc}") from exc
    generators = [parse_word(g) for g in gen_field.split()] if gen_field else []
    if phase != "fully-reduced":
        raise ValueError(f"unsupported table phase {phase!r}")
    if len(entries) != 2 ** (w - 2):
        raise ValueError(
            f"weight-{w} table has {len(entries)} entries, expected {2 ** (w - 2)}"
        )
    return SolvedWeight(weight=w, generators=generators, entries=entries, phase=phase)


# -------------------------------------------------------------- persistence

def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class TableStore:
    """Directory of per-weight table files plus a manifest of content hashes.

    Loads verify the file bytes against the manifest hash and fail loudly on
    mismatch; saves are atomic and keep the manifest in step.  The manifest
    also records the build identifier that produced each file.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def table_path(self, w: int) -> Path:
        return self.root / f"weight-{w:02d}.table"

    def checkpoint_path(self, w: int) -> Path:
        return self.root / f"weight-{w:02d}.checkpoint.json"

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def read_manifest(self) -> dict:
        if not self.manifest_path.exists():
            return {"build": BUILD_ID, "format": TABLE_FORMAT, "weights": {}}
        try:
            manifest = json.loads(self.manifest_path.read_text(encoding="ascii"))
            manifest["weights"]
        except (ValueError, KeyError) as exc:
            raise StoreIntegrityError(f"corrupt manifest {self.manifest_path}: {exc}") from exc
        return manifest

    def has(self, w: int) -> bool:
        return self.table_path(w).exists() and str(w) in self.read_manifest()["weights"]

    def save(self, solved: SolvedWeight) -> Path:
        text = render_table(solved)
        digest = hashlib.sha256(text.encode("ascii")).hexdigest()
        path = self.table_path(solved.weight)
        _atomic_write(path, text)
        manifest = self.read_manifest()
        manifest["build"] = BUILD_ID
        manifest["format"] = TABLE_FORMAT
        manifest["weights"][str(solved.weight)] = {
            "file": path.name,
            "entries": len(solved.entries),
            "generators": len(solved.generators),
            "sha256": digest,
        }
        manifest["weights"] = dict(
            sorted(manifest["weights"].items(), key=lambda kv: int(kv[0]))
        )
        _atomic_write(self.manifest_path, json.dumps(manifest, indent=2) + "\n")
        return path

    def load(self, w: int) -> SolvedWeight:
        path = self.table_path(w)
        if not path.exists():
            raise MissingTable(f"no table file for weight {w} in {self.root}")
        record = self.read_manifest()["weights"].get(str(w))
        if record is None:
            raise StoreIntegrityError(
                f"{path.name} exists but is not recorded in the manifest"
            )
        text = path.read_text(encoding="ascii")
        digest = hashlib.sha256(text.encode("ascii")).hexdigest()
        if digest != record["sha256"]:
            raise StoreIntegrityError(
                f"{path.name} does not match the manifest hash; refusing to load"
            )
        solved = parse_table(text)
        if solved.weight != w:
            raise StoreIntegrityError(f"{path.name} declares weight {solved.weight}")
        return solved


def ensure_solved(
    store: TableStore,
    up_to: int,
    config: RunConfig = RunConfig(),
    progress: Callable[[str], None] | None = None,
) -> dict[int, SolvedWeight]:
    """Load or solve every weight from 2 through ``up_to``, saving newly
    solved tables.  Already-stored weights are loaded (hash-verified), never
    recomputed, which makes repeated runs idempotent byte for byte."""
    if up_to < 2:
        raise ValueError(f"maximum weight must be >= 2, got {up_to}")
    tables: dict[int, SolvedWeight] = {}
    for w in range(2, up_to + 1):
        if store.has(w):
            tables[w] = store.load(w)
            continue
        checkpointer = Checkpointer(
            store.checkpoint_path(w), config.fingerprint(), config.checkpoint_every
        )
        solved = solve_weight(
            w, tables, config, checkpointer=checkpointer, progress=progress
        )
        store.save(solved)
        tables[w] = solved
        if progress is not None:
            progress(f"weight {w}: table saved ({len(solved.entries)} entries)")
    return tables


def solve_in_memory(
    up_to: int,
    config: RunConfig = RunConfig(),
    progress: Callable[[str], None] | None = None,
) -> dict[int, SolvedWeight]:
    """Solve weights 2..up_to without persistence (testing and verification
    reruns)."""
    tables: dict[int, SolvedWeight] = {}
    for w in range(2, up_to + 1):
        tables[w] = solve_weight(w, tables, config, progress=progress)
    return tables
