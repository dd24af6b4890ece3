"""Brute-force rewriting oracle for the two-generator Artin groups.

Decides word equality by breadth-first search over elementary moves:
free reduction, free insertion, and replacement of a segment of the
defining relator by the inverse of the complementary segment.  It
shares nothing with the Garside machinery; words are plain tuples of
signed integers (+1/-1 for the first generator, +2/-2 for the second).

The search explores the full equivalence class of a word inside a
length budget, so it is sound by construction (every move preserves
the group element) and complete whenever the class of interest is
connected within the budget; class-connectivity itself is asserted by
the tests that use this module.
"""

from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

Word = Tuple[int, ...]

A, B = 1, 2


def free_reduce(word: Iterable[int]) -> Word:
    out: List[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _alternating(first: int, length: int) -> List[int]:
    second = B if first == A else A
    return [first if i % 2 == 0 else second for i in range(length)]


def _inverse(word: Iterable[int]) -> Word:
    return tuple(-x for x in reversed(tuple(word)))


def relator_segments(n: int) -> List[Tuple[Word, Word]]:
    """All (segment, replacement) pairs coming from the relator cycle.

    The relator is the closed boundary word (aba..)_n (bab..)_n^{-1}.
    For every rotation of it or of its inverse, and every split into a
    nonempty prefix p and complement q, the pair (p, q^{-1}) is an
    equality of the group, applied left to right.
    """
    cycle = tuple(_alternating(A, n)) + _inverse(_alternating(B, n))
    variants = {cycle, _inverse(cycle)}
    rotations: Set[Word] = set()
    for w in variants:
        for i in range(len(w)):
            rotations.add(w[i:] + w[:i])
    pairs: Set[Tuple[Word, Word]] = set()
    for rho in rotations:
        for k in range(1, len(rho)):
            pairs.add((rho[:k], _inverse(rho[k:])))
    return sorted(pairs)


def neighbors(word: Word, segments: List[Tuple[Word, Word]], max_len: int) -> Iterable[Word]:
    # free insertions
    if len(word) + 2 <= max_len:
        for i in range(len(word) + 1):
            for x in (A, -A, B, -B):
                yield word[:i] + (x, -x) + word[i:]
    # free reductions
    for i in range(len(word) - 1):
        if word[i] == -word[i + 1]:
            yield word[:i] + word[i + 2 :]
    # relator segment replacements
    for seg, rep in segments:
        k = len(seg)
        if k > len(word):
            continue
        if len(word) - k + len(rep) > max_len:
            continue
        for i in range(len(word) - k + 1):
            if word[i : i + k] == seg:
                yield word[:i] + rep + word[i + k :]


class ClassTooLarge(Exception):
    pass


def equivalence_class(
    n: int, word: Iterable[int], max_len: int, max_states: int = 2_000_000
) -> Set[Word]:
    """All words of length <= max_len connected to ``word`` by moves."""
    segments = relator_segments(n)
    start = tuple(word)
    if len(start) > max_len:
        raise ValueError("starting word exceeds the length budget")
    seen: Set[Word] = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nxt in neighbors(cur, segments, max_len):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > max_states:
                    raise ClassTooLarge(f"class of {start} exceeded {max_states} states")
                queue.append(nxt)
    return seen


def canonical(n: int, word: Iterable[int], max_len: int) -> Word:
    """Shortest, lexicographically smallest word reachable within budget."""
    cls = equivalence_class(n, word, max_len)
    return min(cls, key=lambda w: (len(w), w))


def is_identity(n: int, word: Iterable[int], max_len: Optional[int] = None) -> bool:
    w = free_reduce(word)
    if max_len is None:
        max_len = len(w) + 4
    return () in equivalence_class(n, w, max_len)


def all_words(length: int) -> Iterable[Word]:
    """Every word of exactly this length, free cancellations included."""
    if length == 0:
        yield ()
        return
    for prefix in all_words(length - 1):
        for x in (A, -A, B, -B):
            yield prefix + (x,)


def to_letters(word: Word) -> str:
    """Word as compact letters, uppercase for inverses (mirrors parse_word)."""
    out = []
    for x in word:
        ch = "a" if abs(x) == A else "b"
        out.append(ch if x > 0 else ch.upper())
    return "".join(out)


if __name__ == "__main__":
    import sys

    n = int(sys.argv[1]) if len(sys.argv) > 1 else 3
    rel = tuple(_alternating(A, n)) + _inverse(_alternating(B, n))
    assert is_identity(n, rel)
    assert not is_identity(n, (A,))
    print(f"n={n}: relator collapses, single letter does not")
