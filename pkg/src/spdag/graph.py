"""Directed acyclic graphs over vertices 0..p-1 and their separation structure.

A :class:`Dag` is immutable after construction and always acyclic; the
constructor rejects anything else. On top of it this module provides
d-separation queries, skeleton and collider extraction, Markov
equivalence via patterns, topological order enumeration, exhaustive
enumeration of all labeled DAGs on small vertex sets, and a plain text
serialization.

Vertex sets are passed around as ordinary iterables of ints. Internally
most routines work on bitmasks, which keeps the hot paths (d-separation
inside search loops) allocation free.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple, Sequence

from .exceptions import CapacityError, DagTextError

__all__ = [
    "Dag",
    "CycleError",
    "Permutation",
    "EquivClassPattern",
    "DagDocument",
    "d_separated",
    "skeleton",
    "v_structures",
    "unshielded_triples",
    "triangles",
    "pattern_of",
    "markov_equivalent",
    "topological_orders",
    "consistent_order",
    "enumerate_all_dags",
    "parse_dag_text",
    "format_dag_text",
    "load_dag_file",
]

ENUMERATION_CAP = 6


class CycleError(ValueError):
    """Raised when an edge set contains a directed cycle."""


def _bits(mask: int) -> Iterator[int]:
    """Yield set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Dag:
    """A directed acyclic graph on vertices ``0..p-1``.

    Parameters
    ----------
    p:
        Number of vertices.
    edges:
        Iterable of ``(j, k)`` pairs, each meaning an edge j -> k.
        Duplicates collapse; self loops and cycles raise.

    Instances are immutable and hashable; equality is by ``(p, edges)``.

    Examples
    --------
    >>> g = Dag(3, [(0, 1), (1, 2)])
    >>> sorted(g.parents(2))
    [1]
    >>> g.adjacent(0, 2)
    False
    """

    __slots__ = ("_p", "_edges", "_parent_masks", "_child_masks", "_hash")

    def __init__(self, p: int, edges: Iterable[tuple[int, int]] = ()):
        p = int(p)
        if p < 0:
            raise ValueError(f"vertex count must be nonnegative, got {p}")
        edge_set = frozenset((int(j), int(k)) for j, k in edges)
        parent_masks = [0] * p
        child_masks = [0] * p
        for j, k in edge_set:
            if not (0 <= j < p and 0 <= k < p):
                raise ValueError(f"edge ({j}, {k}) out of range for p={p}")
            if j == k:
                raise ValueError(f"self loop at vertex {j}")
            parent_masks[k] |= 1 << j
            child_masks[j] |= 1 << k
        self._p = p
        self._edges = edge_set
        self._parent_masks = tuple(parent_masks)
        self._child_masks = tuple(child_masks)
        self._hash = hash((p, edge_set))
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        # Kahn peeling on bitmasks; leftovers witness a cycle.
        indeg = [m.bit_count() for m in self._parent_masks]
        ready = [v for v in range(self._p) if indeg[v] == 0]
        seen = 0
        while ready:
            v = ready.pop()
            seen += 1
            for c in _bits(self._child_masks[v]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if seen != self._p:
            stuck = sorted(v for v in range(self._p) if indeg[v] > 0)
            raise CycleError(f"edge set contains a directed cycle through {stuck}")

    @property
    def p(self) -> int:
        return self._p

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self._edges

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def parents(self, k: int) -> frozenset[int]:
        return frozenset(_bits(self._parent_masks[k]))

    def children(self, j: int) -> frozenset[int]:
        return frozenset(_bits(self._child_masks[j]))

    def has_edge(self, j: int, k: int) -> bool:
        return (j, k) in self._edges

    def adjacent(self, j: int, k: int) -> bool:
        return (j, k) in self._edges or (k, j) in self._edges

    def ancestors(self, k: int) -> frozenset[int]:
        """Strict ancestors of ``k`` (``k`` itself excluded)."""
        return frozenset(_bits(self._ancestral_mask(1 << k) & ~(1 << k)))

    def descendants(self, j: int) -> frozenset[int]:
        """Strict descendants of ``j``."""
        mask = 0
        stack = [j]
        while stack:
            fresh = self._child_masks[stack.pop()] & ~mask
            mask |= fresh
            stack.extend(_bits(fresh))
        return frozenset(_bits(mask & ~(1 << j)))

    def _ancestral_mask(self, seed_mask: int) -> int:
        """Vertices in ``seed_mask`` together with all their ancestors."""
        mask = seed_mask
        stack = list(_bits(seed_mask))
        while stack:
            fresh = self._parent_masks[stack.pop()] & ~mask
            mask |= fresh
            stack.extend(_bits(fresh))
        return mask

    def with_edge(self, j: int, k: int) -> "Dag":
        """A new graph with edge j -> k added."""
        return Dag(self._p, self._edges | {(j, k)})

    def without_edge(self, j: int, k: int) -> "Dag":
        """A new graph with edge j -> k removed; missing edges raise."""
        if (j, k) not in self._edges:
            raise ValueError(f"no edge ({j}, {k}) to remove")
        return Dag(self._p, self._edges - {(j, k)})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self._p == other._p and self._edges == other._edges

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Dag(p={self._p}, edges={sorted(self._edges)})"


def _vertex_mask(p: int, vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        v = int(v)
        if not 0 <= v < p:
            raise ValueError(f"vertex {v} out of range for p={p}")
        mask |= 1 << v
    return mask


def _check_pair(g: Dag, j: int, k: int, s: Iterable[int]) -> int:
    """Validate a separation query and return the conditioning bitmask."""
    p = g.p
    if not (0 <= j < p and 0 <= k < p):
        raise ValueError(f"vertices ({j}, {k}) out of range for p={p}")
    if j == k:
        raise ValueError("separation queries need two distinct vertices")
    s_mask = _vertex_mask(p, s)
    if s_mask & ((1 << j) | (1 << k)):
        raise ValueError("conditioning set must exclude the queried pair")
    return s_mask


def d_separated(g: Dag, j: int, k: int, s: Iterable[int] = ()) -> bool:
    """Whether ``j`` and ``k`` are d-separated by ``s`` in ``g``.

    Uses ball-passing reachability: a trail is open at a vertex arriving
    from a child unless the vertex is conditioned on, and open at a
    vertex arriving from a parent toward its children unless conditioned,
    or back up toward its parents when the vertex has a descendant in
    ``s`` (the collider rule). ``j`` and ``k`` d-connect exactly when the
    ball started at ``j`` can reach ``k``.

    Parameters
    ----------
    g:
        The graph.
    j, k:
        Distinct query vertices, neither contained in ``s``.
    s:
        Conditioning vertices.

    Returns
    -------
    bool
        True when every trail between ``j`` and ``k`` is blocked by ``s``.
    """
    s_mask = _check_pair(g, j, k, s)
    anc_mask = g._ancestral_mask(s_mask) if s_mask else 0
    parent_masks = g._parent_masks
    child_masks = g._child_masks
    target = 1 << k
    # Direction flag: True when the ball arrived from a child (moving up).
    seen_up = 1 << j
    seen_down = 0
    stack = [(j, True)]
    while stack:
        v, up = stack.pop()
        v_bit = 1 << v
        if v_bit & target:
            return False
        if up:
            if not v_bit & s_mask:
                fresh_up = parent_masks[v] & ~seen_up
                seen_up |= fresh_up
                stack.extend((u, True) for u in _bits(fresh_up))
                fresh_down = child_masks[v] & ~seen_down
                seen_down |= fresh_down
                stack.extend((u, False) for u in _bits(fresh_down))
        else:
            if not v_bit & s_mask:
                fresh_down = child_masks[v] & ~seen_down
                seen_down |= fresh_down
                stack.extend((u, False) for u in _bits(fresh_down))
            if v_bit & anc_mask:
                fresh_up = parent_masks[v] & ~seen_up
                seen_up |= fresh_up
                stack.extend((u, True) for u in _bits(fresh_up))
    return True


def skeleton(g: Dag) -> frozenset[tuple[int, int]]:
    """Undirected adjacencies of ``g`` as sorted pairs (a, b) with a < b."""
    return frozenset((j, k) if j < k else (k, j) for j, k in g.edges)


def v_structures(g: Dag) -> frozenset[tuple[int, int, int]]:
    """Collider triples j -> l <- k with j, k nonadjacent, as (j, l, k), j < k."""
    out = set()
    for ell in range(g.p):
        for j, k in combinations(sorted(g.parents(ell)), 2):
            if not g.adjacent(j, k):
                out.add((j, ell, k))
    return frozenset(out)


def unshielded_triples(g: Dag) -> frozenset[tuple[int, int, int]]:
    """Triples (j, l, k), j < k, with l adjacent to both and j, k nonadjacent.

    Orientation is ignored; every v-structure is an unshielded triple but
    not conversely.
    """
    adj = [set() for _ in range(g.p)]
    for j, k in g.edges:
        adj[j].add(k)
        adj[k].add(j)
    out = set()
    for ell in range(g.p):
        for j, k in combinations(sorted(adj[ell]), 2):
            if k not in adj[j]:
                out.add((j, ell, k))
    return frozenset(out)


def triangles(g: Dag) -> frozenset[tuple[int, int, int]]:
    """Mutually adjacent vertex triples of the skeleton, sorted ascending."""
    skel = skeleton(g)
    adj = [set() for _ in range(g.p)]
    for a, b in skel:
        adj[a].add(b)
        adj[b].add(a)
    out = set()
    for a, b in skel:
        for c in adj[a] & adj[b]:
            out.add(tuple(sorted((a, b, c))))
    return frozenset(out)


@dataclass(frozen=True)
class EquivClassPattern:
    """Skeleton plus v-structures; equal patterns mean Markov equivalence."""

    skeleton: frozenset[tuple[int, int]]
    v_structures: frozenset[tuple[int, int, int]]

    def sort_key(self) -> tuple:
        """Canonical encoding used to order classes deterministically."""
        return (tuple(sorted(self.skeleton)), tuple(sorted(self.v_structures)))


def pattern_of(g: Dag) -> EquivClassPattern:
    """The Markov equivalence class pattern of ``g``."""
    return EquivClassPattern(skeleton(g), v_structures(g))


def markov_equivalent(g1: Dag, g2: Dag) -> bool:
    """Whether two graphs share skeleton and v-structures.

    Graphs over different vertex counts are not comparable and raise.
    """
    if g1.p != g2.p:
        raise ValueError(f"graphs have different vertex counts ({g1.p} vs {g2.p})")
    return pattern_of(g1) == pattern_of(g2)


class Permutation:
    """A total ordering of the vertices ``0..p-1``.

    ``order[i]`` is the vertex placed at position ``i``; construction
    validates that ``order`` is a bijection.
    """

    __slots__ = ("_order", "_pos")

    def __init__(self, order: Sequence[int]):
        order = tuple(int(v) for v in order)
        p = len(order)
        pos = [-1] * p
        for i, v in enumerate(order):
            if not 0 <= v < p or pos[v] != -1:
                raise ValueError(f"not a permutation of 0..{p - 1}: {order}")
            pos[v] = i
        self._order = order
        self._pos = tuple(pos)

    @classmethod
    def identity(cls, p: int) -> "Permutation":
        return cls(range(p))

    @property
    def order(self) -> tuple[int, ...]:
        return self._order

    def position(self, v: int) -> int:
        """Position of vertex ``v`` in the ordering (the inverse map)."""
        return self._pos[v]

    def inverse(self) -> "Permutation":
        return Permutation(self._pos)

    def __len__(self) -> int:
        return len(self._order)

    def __iter__(self) -> Iterator[int]:
        return iter(self._order)

    def __getitem__(self, i: int) -> int:
        return self._order[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, Permutation):
            return self._order == other._order
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._order)

    def __repr__(self) -> str:
        return f"Permutation({list(self._order)})"


def as_permutation(pi, p: int | None = None) -> Permutation:
    """Coerce a sequence or Permutation; optionally check its length."""
    perm = pi if isinstance(pi, Permutation) else Permutation(pi)
    if p is not None and len(perm) != p:
        raise ValueError(f"permutation has length {len(perm)}, expected {p}")
    return perm


def topological_orders(g: Dag) -> Iterator[Permutation]:
    """All orderings of ``g``'s vertices that place parents before children.

    Emitted in lexicographic order of the underlying vertex sequence.
    The count is factorial in the worst case (empty graph), so callers
    on large graphs should consume lazily.
    """
    p = g.p
    parent_masks = g._parent_masks
    prefix: list[int] = []

    def rec(placed_mask: int) -> Iterator[Permutation]:
        if len(prefix) == p:
            yield Permutation(prefix)
            return
        for v in range(p):
            bit = 1 << v
            if placed_mask & bit:
                continue
            if parent_masks[v] & ~placed_mask:
                continue
            prefix.append(v)
            yield from rec(placed_mask | bit)
            prefix.pop()

    return rec(0)


def consistent_order(g: Dag) -> Permutation:
    """The lexicographically smallest topological order of ``g``."""
    p = g.p
    parent_masks = g._parent_masks
    order = []
    placed = 0
    for _ in range(p):
        for v in range(p):
            if not placed >> v & 1 and not parent_masks[v] & ~placed:
                order.append(v)
                placed |= 1 << v
                break
    return Permutation(order)


@lru_cache(maxsize=8)
def _all_dag_edge_sets(p: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Edge sets of every labeled DAG on p vertices (cached for p <= 5)."""
    pairs = list(combinations(range(p), 2))
    n = len(pairs)
    out: list[tuple[tuple[int, int], ...]] = []
    edges: list[tuple[int, int]] = []

    def rec(i: int, reach: list[int]) -> None:
        # reach[v] = bitmask of vertices reachable from v by a directed path.
        if i == n:
            out.append(tuple(edges))
            return
        a, b = pairs[i]
        rec(i + 1, reach)
        for u, v in ((a, b), (b, a)):
            if reach[v] >> u & 1:
                continue
            new_reach = list(reach)
            gained = new_reach[v] | (1 << v)
            for w in range(p):
                if w == u or new_reach[w] >> u & 1:
                    new_reach[w] |= gained
            edges.append((u, v))
            rec(i + 1, new_reach)
            edges.pop()

    rec(0, [0] * p)
    return tuple(out)


def enumerate_all_dags(p: int) -> Iterator[Dag]:
    """Yield every labeled DAG on ``p`` vertices, in a fixed order.

    The count grows superexponentially (25 at p=3, 543 at p=4, 29281 at
    p=5), so this refuses p beyond ENUMERATION_CAP. Enumeration order is
    deterministic: pairs are scanned lexicographically and each pair
    takes the states absent, low to high, high to low.
    """
    p = int(p)
    if p < 0:
        raise ValueError("vertex count must be nonnegative")
    if p > ENUMERATION_CAP:
        raise CapacityError(
            f"enumerating all DAGs on p={p} vertices exceeds the cap "
            f"({ENUMERATION_CAP}); the count is astronomically large"
        )
    if p <= 5:
        for edge_set in _all_dag_edge_sets(p):
            yield Dag(p, edge_set)
        return
    # p == 6 streams uncached; 3.78 million graphs.
    pairs = list(combinations(range(p), 2))
    n = len(pairs)
    edges: list[tuple[int, int]] = []

    def rec(i: int, reach: list[int]) -> Iterator[Dag]:
        if i == n:
            yield Dag(p, edges)
            return
        a, b = pairs[i]
        yield from rec(i + 1, reach)
        for u, v in ((a, b), (b, a)):
            if reach[v] >> u & 1:
                continue
            new_reach = list(reach)
            gained = new_reach[v] | (1 << v)
            for w in range(p):
                if w == u or new_reach[w] >> u & 1:
                    new_reach[w] |= gained
            edges.append((u, v))
            yield from rec(i + 1, new_reach)
            edges.pop()

    yield from rec(0, [0] * p)


class DagDocument(NamedTuple):
    """A parsed DAG file: the graph plus the label base it was written in."""

    dag: Dag
    label_base: int


_HEADER_RE = re.compile(r"^\s*p\s*=\s*(\d+)\s*$")
_EDGE_RE = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*$")


def parse_dag_text(text: str) -> DagDocument:
    """Parse the plain text graph format.

    The first nonblank line is ``p=<int>``; every following nonblank line
    is ``j -> k``. Whitespace around tokens is ignored. Labels may be
    0-based or 1-based; the base is inferred (a 0 label forces 0-based, a
    label equal to p forces 1-based, otherwise 0-based is assumed) and
    reported in the returned document so output can echo the input
    convention. Out-of-range labels, self loops, duplicate edges and
    edges that close a directed cycle are rejected with the offending
    line number.
    """
    p = None
    raw_edges: list[tuple[int, int, int]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if p is None:
            m = _HEADER_RE.match(line)
            if not m:
                raise DagTextError(
                    f"expected header 'p=<int>', got {line.strip()!r}", line_no
                )
            p = int(m.group(1))
            continue
        m = _EDGE_RE.match(line)
        if not m:
            raise DagTextError(f"expected edge 'j -> k', got {line.strip()!r}", line_no)
        raw_edges.append((int(m.group(1)), int(m.group(2)), line_no))
    if p is None:
        raise DagTextError("empty input: missing 'p=<int>' header")

    labels = {j for j, _, _ in raw_edges} | {k for _, k, _ in raw_edges}
    if 0 in labels:
        base = 0
    elif p in labels:
        base = 1
    else:
        base = 0
    lo, hi = base, base + p - 1
    reach = [0] * p
    edges: set[tuple[int, int]] = set()
    for j_raw, k_raw, line_no in raw_edges:
        if not (lo <= j_raw <= hi and lo <= k_raw <= hi):
            raise DagTextError(
                f"label out of range for p={p} ({base}-based): {j_raw} -> {k_raw}",
                line_no,
            )
        j, k = j_raw - base, k_raw - base
        if j == k:
            raise DagTextError(f"self loop at vertex {j_raw}", line_no)
        if (j, k) in edges:
            raise DagTextError(f"duplicate edge {j_raw} -> {k_raw}", line_no)
        if reach[k] >> j & 1:
            raise DagTextError(
                f"edge {j_raw} -> {k_raw} closes a directed cycle", line_no
            )
        edges.add((j, k))
        gained = reach[k] | (1 << k)
        for w in range(p):
            if w == j or reach[w] >> j & 1:
                reach[w] |= gained
    return DagDocument(Dag(p, edges), base)


def format_dag_text(g: Dag, label_base: int = 0) -> str:
    """Serialize ``g`` in the text format, labels offset by ``label_base``."""
    lines = [f"p={g.p}"]
    lines.extend(f"{j + label_base} -> {k + label_base}" for j, k in sorted(g.edges))
    return "\n".join(lines) + "\n"


def load_dag_file(path) -> DagDocument:
    """Read and parse a DAG text file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_dag_text(fh.read())
