"""Index words for nested zeta sums, their binary encoding, and orderings.

An index word is a tuple of integers >= 1, printed ``Z(m1,...,mD)``.  Its
weight is the sum of the indices and its depth is their count.  A word is
admissible (the nested sum converges) iff the first index is >= 2.

Comparison convention used across the whole package: words compare as plain
Python tuples, so indices compare by integer value and a proper prefix sorts
before any of its extensions.  Every deterministic ordering in the package
(elimination priority, file layouts, relation streams) reduces to this one
convention plus the explicit keys defined here.
"""

from __future__ import annotations

from typing import Iterator, NamedTuple

Word = tuple[int, ...]


def weight(w: Word) -> int:
    return sum(w)


def depth(w: Word) -> int:
    return len(w)


def is_admissible(w: Word) -> bool:
    return len(w) >= 1 and w[0] >= 2


def check_word(w: Word) -> Word:
    """Validate an index word, returning it unchanged.

    Raises ValueError for empty words or non-positive indices.
    """
    if not isinstance(w, tuple) or len(w) == 0:
        raise ValueError(f"index word must be a nonempty tuple, got {w!r}")
    for m in w:
        if not isinstance(m, int) or m < 1:
            raise ValueError(f"index word entries must be integers >= 1, got {w!r}")
    return w


def compositions(total: int, min_part: int = 1) -> Iterator[Word]:
    """All compositions of ``total`` into parts >= ``min_part``, in tuple order
    of the first part (ascending) then recursively on the remainder."""
    if total == 0:
        yield ()
        return
    for first in range(min_part, total + 1):
        for rest in compositions(total - first, min_part):
            yield (first,) + rest


def admissible_words(w: int) -> list[Word]:
    """All admissible words of weight ``w``, sorted ascending.

    There are exactly 2**(w-2) of them for w >= 2.
    """
    if w < 2:
        return []
    return sorted(word for word in compositions(w) if word[0] >= 2)


# ----------------------------------------------------------------- encoding

def to_binary(w: Word) -> str:
    """Encode an index word over the two-letter alphabet: index k becomes
    k-1 letters X followed by one Y.  The encoding of an admissible word
    starts with X and ends with Y, and its length equals the weight."""
    return "".join("X" * (k - 1) + "Y" for k in w)


def from_binary(b: str) -> Word:
    """Inverse of :func:`to_binary`.  Rejects words not ending in Y, since a
    trailing run of X admits no index decomposition."""
    out = []
    run = 0
    for ch in b:
        if ch == "X":
            run += 1
        elif ch == "Y":
            out.append(run + 1)
            run = 0
        else:
            raise ValueError(f"binary word may contain only X and Y, got {b!r}")
    if run:
        raise ValueError(f"binary word does not end in Y: {b!r}")
    return tuple(out)


def dual(w: Word) -> Word:
    """Reverse-and-swap involution on the binary encoding.

    Induces equalities between nested sums; weight is preserved and the
    depth of the dual is weight minus depth.  Defined for admissible words
    only (otherwise the swapped word would end in X).
    """
    if not is_admissible(w):
        raise ValueError(f"dual is defined for admissible words only, got {w!r}")
    b = to_binary(w)
    swapped = "".join("X" if c == "Y" else "Y" for c in reversed(b))
    return from_binary(swapped)


# ------------------------------------------------------------------ Lyndon

def is_lyndon(w: Word) -> bool:
    """True iff ``w`` is strictly greater than every proper cyclic rotation
    of itself (which forces aperiodicity).  The maximal-rotation convention
    matches the listing convention where the largest index leads."""
    n = len(w)
    if n == 1:
        return True
    doubled = w + w
    for i in range(1, n):
        if w <= doubled[i:i + n]:
            return False
    return True


# ------------------------------------------------------------- text format

def render_word(w: Word) -> str:
    """``Z(m1,...,mD)`` with no spaces; the exact form used in table files
    and CLI output."""
    return "Z(" + ",".join(str(m) for m in w) + ")"


def parse_word(text: str) -> Word:
    """Inverse of :func:`render_word`."""
    s = text.strip()
    if not (s.startswith("Z(") and s.endswith(")")):
        raise ValueError(f"not a Z(...) word: {text!r}")
    body = s[2:-1]
    if not body:
        raise ValueError(f"empty index list: {text!r}")
    try:
        w = tuple(int(part) for part in body.split(","))
    except ValueError:
        raise ValueError(f"malformed index list: {text!r}") from None
    return check_word(w)


# ------------------------------------------------------- elimination order

class ElimKey(NamedTuple):
    """Sort key fixing the global elimination priority at one weight.

    The word with the LARGEST key is eliminated first, so comparing keys
    tells you who dies sooner.  Field order encodes the preference:
    non-candidates die before basis candidates, non-Lyndon words die before
    Lyndon words, deeper words die before shallower ones, and remaining ties
    break on the lexicographically larger word dying first.  The survivors
    of a full elimination are therefore shallow basis candidates.
    """

    non_candidate: bool
    non_lyndon: bool
    depth: int
    tiebreak: Word


def elim_key(w: Word, pool: frozenset[Word] | set[Word]) -> ElimKey:
    """Elimination key of ``w`` given the candidate ``pool`` for its weight."""
    return ElimKey(w not in pool, not is_lyndon(w), len(w), w)


def elim_compare(a: Word, b: Word, pool: frozenset[Word] | set[Word]) -> int:
    """Three-way comparison under the elimination order.

    Returns a negative, zero, or positive int as ``a`` outlives, equals, or
    dies before ``b``.  Only words of equal weight are comparable.
    """
    if weight(a) != weight(b):
        raise ValueError(
            f"elimination order compares equal weights only: {a!r} vs {b!r}"
        )
    ka, kb = elim_key(a, pool), elim_key(b, pool)
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0
