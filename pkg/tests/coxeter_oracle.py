"""Reference word-length oracle for the reflection-group tests.

Independent route: instead of composing isometries and searching from
scratch, walk the word through the labeled chamber graph of a prebuilt
patch and then measure plain breadth-first hop distance in that graph.
Only patch data structures are consumed here; none of the distance code
under test is.
"""

from collections import deque
from typing import Dict, List, Sequence, Tuple


def labeled_adjacency(patch) -> Dict[Tuple, Dict[str, Tuple]]:
    """chamber key -> generator name -> neighbour key."""
    names = patch.triple.names
    adj: Dict[Tuple, Dict[str, Tuple]] = {k: {} for k in patch.chambers}
    for ek, edge in patch.edges.items():
        u, v = tuple(ek)
        name = names[edge.generator]
        adj[u][name] = v
        adj[v][name] = u
    return adj


def chamber_of_word(patch, word: Sequence[str]) -> Tuple:
    """Follow the word letter by letter from the base chamber."""
    adj = labeled_adjacency(patch)
    key = patch.base_key
    for name in word:
        if name not in adj[key]:
            raise ValueError(
                f"walk left the patch at {name!r}; use a larger radius"
            )
        key = adj[key][name]
    return key


def bfs_distance(patch, start: Tuple, goal: Tuple) -> int:
    if start == goal:
        return 0
    adj = {k: set() for k in patch.chambers}
    for ek in patch.edges:
        u, v = tuple(ek)
        adj[u].add(v)
        adj[v].add(u)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        k = queue.popleft()
        for nb in adj[k]:
            if nb in dist:
                continue
            dist[nb] = dist[k] + 1
            if nb == goal:
                return dist[nb]
            queue.append(nb)
    raise ValueError("goal chamber not reachable inside the patch")


def oracle_distance(patch, word1: Sequence[str], word2: Sequence[str]) -> int:
    return bfs_distance(
        patch, chamber_of_word(patch, word1), chamber_of_word(patch, word2)
    )
