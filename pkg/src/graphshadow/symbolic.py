"""Cover-transition relations and their walks (pseudo-orbit patterns)."""

from dataclasses import dataclass
from itertools import islice

from .errors import InputError
from .metric_graph import region_intersects
from .pl_map import image_region

__all__ = ["TransitionRelation", "compute_transition", "enumerate_patterns", "count_walks"]


@dataclass(frozen=True)
class TransitionRelation:
    """Directed graph on member indices ``0..k-1``: ``successors[i]`` is ``φ(i)``."""

    k: int
    successors: tuple

    def __post_init__(self):
        succ = tuple(frozenset(s) for s in self.successors)
        if len(succ) != self.k:
            raise InputError("successor table must have one entry per index")
        for i, s in enumerate(succ):
            if not s:
                raise InputError(f"φ({i}) is empty")
            if any(not 0 <= j < self.k for j in s):
                raise InputError(f"φ({i}) has an index out of range")
        object.__setattr__(self, "successors", succ)

    def __getitem__(self, i):
        return self.successors[i]

    def contains(self, other):
        """True when ``other[i] ⊆ self[i]`` for every ``i``."""
        return self.k == other.k and all(o <= s for s, o in zip(self.successors, other.successors))

    def is_walk(self, pattern):
        return all(0 <= j < self.k for j in pattern) and all(
            b in self.successors[a] for a, b in zip(pattern, pattern[1:])
        )

    def adjacency_text(self):
        """One line per index: ``i: j1 j2 ...``."""
        return "\n".join(f"{i}: " + " ".join(str(j) for j in sorted(s)) for i, s in enumerate(self.successors))

    @classmethod
    def complete(cls, k):
        return cls(k, tuple(frozenset(range(k)) for _ in range(k)))


def compute_transition(h, cover):
    """``φ(i) = {j : h(cl U_i) ∩ cl U_j ≠ ∅}``, exact."""
    if h.graph is not cover.graph:
        raise InputError("map and cover live on different graphs")
    closures = cover.closures
    succ = []
    for i in range(cover.k):
        img = image_region(h, closures[i])
        succ.append(frozenset(j for j in cover.candidates(img) if region_intersects(img, closures[j])))
    return TransitionRelation(cover.k, tuple(succ))


def _walks(rel, prefix, length):
    if len(prefix) == length:
        yield tuple(prefix)
        return
    for j in sorted(rel.successors[prefix[-1]]):
        prefix.append(j)
        yield from _walks(rel, prefix, length)
        prefix.pop()


def enumerate_patterns(rel, length, start=None, budget=None):
    """Lexicographically ordered walks with ``length`` symbols, lazily.

    ``start`` fixes the first symbol; ``budget`` caps how many are emitted.
    """
    if length < 1:
        raise InputError("pattern length must be at least 1")
    starts = range(rel.k) if start is None else [start]

    def gen():
        for s in starts:
            yield from _walks(rel, [s], length)

    stream = gen()
    return stream if budget is None else islice(stream, budget)


def count_walks(rel, length, start=None):
    """Number of walks with ``length`` symbols (dynamic programming)."""
    counts = [1] * rel.k
    for _ in range(length - 1):
        counts = [sum(counts[j] for j in rel.successors[i]) for i in range(rel.k)]
    return sum(counts) if start is None else counts[start]
