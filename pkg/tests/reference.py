"""Slow, literal reference implementations used as test oracles.

Everything here favors being obviously correct over being fast: the
separation oracle enumerates every simple trail and applies the blocking
definition verbatim, graph enumeration filters raw adjacency matrices,
and ordering enumeration filters raw permutations. Production code must
agree with these on everything small enough to brute force.
"""

from itertools import combinations, permutations

from spdag.graph import Dag


def ancestral_closure(g: Dag, s) -> set:
    """``s`` together with every ancestor of a member of ``s``."""
    out = set(s)
    frontier = list(s)
    while frontier:
        v = frontier.pop()
        for u in g.parents(v):
            if u not in out:
                out.add(u)
                frontier.append(u)
    return out


def simple_trails(g: Dag, j: int, k: int):
    """All simple vertex sequences from j to k along skeleton adjacencies."""
    adj = [set() for _ in range(g.p)]
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    path = [j]
    on_path = {j}

    def rec(v):
        if v == k:
            yield tuple(path)
            return
        for w in sorted(adj[v]):
            if w not in on_path:
                path.append(w)
                on_path.add(w)
                yield from rec(w)
                path.pop()
                on_path.discard(w)

    yield from rec(j)


def d_separated_by_trails(g: Dag, j: int, k: int, s=()) -> bool:
    """Trail-enumeration d-separation, straight from the definition.

    A trail is blocked by s when some interior vertex is either a
    collider whose ancestral closure misses s, or a noncollider lying in
    s. j and k are d-separated when every simple trail between them is
    blocked.
    """
    s = set(s)
    anc = ancestral_closure(g, s)
    for trail in simple_trails(g, j, k):
        blocked = False
        for i in range(1, len(trail) - 1):
            prev, v, nxt = trail[i - 1], trail[i], trail[i + 1]
            collider = g.has_edge(prev, v) and g.has_edge(nxt, v)
            if collider:
                if v not in anc:
                    blocked = True
                    break
            elif v in s:
                blocked = True
                break
        if not blocked:
            return False
    return True


def d_separation_set_brute(g: Dag):
    """Every (j, k, s) with j < k that d-separates, via trail enumeration."""
    out = set()
    for j, k in combinations(range(g.p), 2):
        rest = [v for v in range(g.p) if v not in (j, k)]
        for size in range(len(rest) + 1):
            for s in combinations(rest, size):
                if d_separated_by_trails(g, j, k, s):
                    out.add((j, k, frozenset(s)))
    return frozenset(out)


def linear_extensions_brute(g: Dag):
    """All vertex orderings consistent with g, by filtering every ordering."""
    out = []
    for order in permutations(range(g.p)):
        pos = {v: i for i, v in enumerate(order)}
        if all(pos[j] < pos[k] for j, k in g.edges):
            out.append(order)
    return out


def all_dags_brute(p: int):
    """Edge sets of every labeled DAG on p vertices, by filtering matrices.

    Uses networkx for the acyclicity check so the filter shares no code
    with the production enumerator. Only sane for p <= 4.
    """
    import networkx as nx

    cells = [(j, k) for j in range(p) for k in range(p) if j != k]
    found = set()
    for bits in range(1 << len(cells)):
        edges = [cells[i] for i in range(len(cells)) if bits >> i & 1]
        dg = nx.DiGraph()
        dg.add_nodes_from(range(p))
        dg.add_edges_from(edges)
        if nx.is_directed_acyclic_graph(dg):
            found.add(frozenset(edges))
    return found


def partial_corr_by_inverse(sigma, j, k, s=()):
    """Partial correlation via full inversion of the principal submatrix.

    Independent route: invert the covariance block on s + {j, k} and read
    the normalized off-diagonal of the inverse, instead of forming a
    Schur complement.
    """
    import numpy as np

    idx = sorted(set(s) | {j, k})
    sub = np.asarray(sigma, dtype=float)[np.ix_(idx, idx)]
    inv = np.linalg.inv(sub)
    a, b = idx.index(j), idx.index(k)
    return float(-inv[a, b] / np.sqrt(inv[a, a] * inv[b, b]))
