"""Constraint-based skeleton search baselines.

Two classical pipelines share the CiBackend interface: an exhaustive
variant that considers every conditioning set for every pair, and a
level-wise variant that only conditions on current neighbours.  Both
produce an undirected skeleton plus the separating sets that justified
each deletion; v-structure orientation turns that into an equivalence
class pattern.
"""

from __future__ import annotations

from itertools import combinations

from .exceptions import CapacityError, MissingSepsetError
from .graph import EquivClassPattern
from .oracle import CiBackend

SKELETON_CAP = 12

__all__ = [
    "SKELETON_CAP",
    "SepsetTable",
    "orient_v_structures",
    "pc_pattern",
    "pc_skeleton",
    "sgs_pattern",
    "sgs_skeleton",
]


class SepsetTable:
    """Separating sets recorded during skeleton search.

    Keys are unordered vertex pairs; the value is the first conditioning
    set that made the pair test independent.
    """

    __slots__ = ("_table",)

    def __init__(self):
        self._table = {}

    @staticmethod
    def _key(j: int, k: int) -> tuple[int, int]:
        if j == k:
            raise ValueError(f"a pair needs two distinct vertices, got {j}")
        return (j, k) if j < k else (k, j)

    def record(self, j: int, k: int, s) -> None:
        self._table[self._key(j, k)] = frozenset(s)

    def get(self, j: int, k: int) -> frozenset:
        try:
            return self._table[self._key(j, k)]
        except KeyError:
            raise MissingSepsetError(
                f"no separating set was recorded for pair ({j}, {k})"
            ) from None

    def __contains__(self, pair) -> bool:
        return self._key(*pair) in self._table

    def __len__(self) -> int:
        return len(self._table)

    def items(self):
        return self._table.items()

    def __repr__(self) -> str:
        return f"SepsetTable({self._table!r})"


def _check_cap(p: int) -> None:
    if p > SKELETON_CAP:
        raise CapacityError(
            f"skeleton search on {p} vertices exceeds the cap of "
            f"{SKELETON_CAP}; the subset sweep is exponential in p"
        )


def sgs_skeleton(ci: CiBackend, p: int | None = None):
    """Full-sweep skeleton: delete {j,k} iff some S c V\\{j,k} separates.

    Conditioning sets are tried smallest first, ties broken
    lexicographically, and the first hit is recorded, so the witness
    table is the same on every run.
    """
    p = _resolve_p(ci, p)
    _check_cap(p)
    edges = set()
    sepsets = SepsetTable()
    for j, k in combinations(range(p), 2):
        rest = [v for v in range(p) if v != j and v != k]
        hit = None
        for size in range(len(rest) + 1):
            for s in combinations(rest, size):
                if ci.is_independent(j, k, s):
                    hit = s
                    break
            if hit is not None:
                break
        if hit is None:
            edges.add((j, k))
        else:
            sepsets.record(j, k, hit)
    return frozenset(edges), sepsets


def pc_skeleton(ci: CiBackend, p: int | None = None):
    """Level-wise skeleton: condition only on current neighbours.

    At level l every ordered adjacent pair (j, k) is tested against all
    size-l subsets of adj(j)\\{k}; deletion takes effect immediately.
    The sweep stops once no neighbourhood can supply a bigger set.
    """
    p = _resolve_p(ci, p)
    _check_cap(p)
    adj = {v: set(range(p)) - {v} for v in range(p)}
    sepsets = SepsetTable()
    level = 0
    while True:
        any_big_enough = False
        for j in range(p):
            for k in range(p):
                if k == j or k not in adj[j]:
                    continue
                pool = sorted(adj[j] - {k})
                if len(pool) < level:
                    continue
                any_big_enough = True
                for s in combinations(pool, level):
                    if ci.is_independent(j, k, s):
                        adj[j].discard(k)
                        adj[k].discard(j)
                        sepsets.record(j, k, s)
                        break
        if not any_big_enough:
            break
        level += 1
    edges = frozenset(
        (j, k) for j in range(p) for k in adj[j] if j < k
    )
    return edges, sepsets


def orient_v_structures(skeleton, sepsets: SepsetTable) -> EquivClassPattern:
    """Mark colliders on unshielded triples.

    For each path j - l - k with {j,k} non-adjacent, the triple becomes
    a v-structure exactly when l is absent from the recorded separating
    set of (j, k).  A non-adjacent triple pair without a recorded set is
    a caller error and raises.
    """
    edges = frozenset(tuple(sorted(e)) for e in skeleton)
    nbrs: dict[int, set[int]] = {}
    for a, b in edges:
        nbrs.setdefault(a, set()).add(b)
        nbrs.setdefault(b, set()).add(a)
    vees = set()
    for mid, around in nbrs.items():
        for j, k in combinations(sorted(around), 2):
            if (j, k) in edges:
                continue
            if mid not in sepsets.get(j, k):
                vees.add((j, mid, k))
    return EquivClassPattern(skeleton=edges, v_structures=frozenset(vees))


def sgs_pattern(ci: CiBackend, p: int | None = None) -> EquivClassPattern:
    return orient_v_structures(*sgs_skeleton(ci, p))


def pc_pattern(ci: CiBackend, p: int | None = None) -> EquivClassPattern:
    return orient_v_structures(*pc_skeleton(ci, p))


def _resolve_p(ci: CiBackend, p: int | None) -> int:
    if p is None:
        return ci.p
    if p != ci.p:
        raise ValueError(f"backend covers {ci.p} variables, not {p}")
    return p
