"""Sparsest-ordering search over DAGs.

Every permutation of the vertices induces a DAG: scanning the order left
to right, vertex k receives an edge from each earlier vertex j that stays
dependent on k given the rest of the prefix.  The search scores each
permutation by the edge count of that DAG and returns every DAG attaining
the minimum, grouped into equivalence classes.

A Gaussian-only variant scores permutations by the fill of the upper
unitriangular Cholesky factor of the permuted precision matrix instead of
issuing conditional-independence queries; for an exact Gaussian oracle the
two routes coincide.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .exceptions import CapacityError, NumericalError
from .graph import Dag, EquivClassPattern, Permutation, _bits, as_permutation, pattern_of
from .oracle import CiBackend, CovarianceMatrix, _as_matrix

PERMUTATION_CAP = 9
CHOL_TOL = 1e-7

__all__ = [
    "CHOL_TOL",
    "PERMUTATION_CAP",
    "CholeskyFactor",
    "SpResult",
    "build_dag_for_permutation",
    "min_degree_order",
    "permuted_precision",
    "sp_search",
    "sp_search_cholesky",
    "upper_cholesky",
]


@dataclass(frozen=True)
class SpResult:
    """Outcome of a full scan over the permutation space.

    winners holds every minimal DAG (deduplicated as labeled graphs),
    classes the equivalence classes they fall into.  permutations_scanned
    is the size of the scanned space, p!, independent of any pruning.
    """

    min_edges: int
    winners: frozenset
    classes: frozenset
    unique_class: bool
    permutations_scanned: int

    def __post_init__(self):
        object.__setattr__(self, "winners", frozenset(self.winners))
        object.__setattr__(self, "classes", frozenset(self.classes))
        if not self.winners:
            raise ValueError("a scan always produces at least one winner")
        for g in self.winners:
            if g.num_edges != self.min_edges:
                raise ValueError(
                    f"winner has {g.num_edges} edges but min_edges={self.min_edges}"
                )
        if {pattern_of(g) for g in self.winners} != set(self.classes):
            raise ValueError("classes must be exactly the winner patterns")
        if self.unique_class != (len(self.classes) == 1):
            raise ValueError("unique_class must track the class count")

    def ordered_winners(self) -> list:
        return sorted(self.winners, key=lambda g: sorted(g.edges))

    def ordered_classes(self) -> list:
        return sorted(self.classes, key=EquivClassPattern.sort_key)


@dataclass(frozen=True)
class CholeskyFactor:
    """K = U @ diag(D) @ U.T with U upper unitriangular and D positive.

    nonzero_mask flags the strict upper entries of U exceeding the
    tolerance the factorization was run with.
    """

    U: np.ndarray
    D: np.ndarray
    nonzero_mask: np.ndarray

    @property
    def num_nonzero(self) -> int:
        return int(self.nonzero_mask.sum())

    def edges_for(self, pi) -> frozenset:
        """Map masked entries (i, j), i<j, to edges pi(i) -> pi(j)."""
        order = as_permutation(pi, len(self.D)).order
        rows, cols = np.nonzero(self.nonzero_mask)
        return frozenset((order[a], order[b]) for a, b in zip(rows, cols))


def build_dag_for_permutation(pi, ci: CiBackend) -> Dag:
    """Construct the DAG a single vertex ordering induces.

    Scanning pi left to right, each earlier vertex j points at the
    current vertex k exactly when the backend reports dependence given
    the remaining prefix {earlier vertices} minus {j}.  All edges follow
    the order, so the result is acyclic by construction.
    """
    order = as_permutation(pi, ci.p).order
    edges = []
    for b in range(1, len(order)):
        k = order[b]
        prefix = order[:b]
        for j in prefix:
            s = [v for v in prefix if v != j]
            if not ci.is_independent(j, k, s):
                edges.append((j, k))
    return Dag(len(order), edges)


def _set_of(mask: int) -> tuple:
    return tuple(_bits(mask))


def _scan_edges(ci: CiBackend, p: int, first_vertices, bound, seed_edges):
    """Depth-first walk of the permutation tree restricted to the given
    first vertices.

    Returns (best_count, set of winning edge frozensets).  A prefix is
    abandoned once its running edge count exceeds the incumbent; ties are
    always kept, so the winner set is complete for this subtree.
    """
    full = (1 << p) - 1
    memo: dict = {}
    is_independent = ci.is_independent

    def parents_of(mask: int, k: int) -> tuple:
        key = (mask, k)
        got = memo.get(key)
        if got is None:
            got = tuple(
                j
                for j in _bits(mask)
                if not is_independent(j, k, _set_of(mask & ~(1 << j)))
            )
            memo[key] = got
        return got

    best = bound if bound is not None else math.inf
    winners = set(seed_edges)
    path: list = []

    def extend(mask: int, count: int) -> None:
        nonlocal best
        if mask == full:
            edges = frozenset(path)
            if count < best:
                best = count
                winners.clear()
                winners.add(edges)
            elif count == best:
                winners.add(edges)
            return
        for k in range(p):
            if mask >> k & 1:
                continue
            incoming = parents_of(mask, k)
            nxt = count + len(incoming)
            if nxt > best:
                continue
            path.extend((j, k) for j in incoming)
            extend(mask | (1 << k), nxt)
            del path[len(path) - len(incoming):]

    for v in first_vertices:
        extend(1 << v, 0)
    return best, winners


def _finish(p: int, best, winners, scanned: int) -> SpResult:
    dags = frozenset(Dag(p, edges) for edges in winners)
    classes = frozenset(pattern_of(g) for g in dags)
    return SpResult(
        min_edges=int(best),
        winners=dags,
        classes=classes,
        unique_class=len(classes) == 1,
        permutations_scanned=scanned,
    )


def _check_cap(p: int, max_p: int) -> None:
    if p > max_p:
        raise CapacityError(
            f"scan over {p}! permutations exceeds the cap of {max_p} vertices; "
            f"raise --max-p to allow it"
        )


def sp_search(
    ci: CiBackend,
    p: int | None = None,
    *,
    max_p: int = PERMUTATION_CAP,
    workers: int = 1,
    warm_start: bool = False,
) -> SpResult:
    """Scan all p! orderings and keep every minimal induced DAG.

    The scan is exhaustive; pruning only cuts prefixes that already
    exceed the incumbent count, which cannot drop a tie.  warm_start
    seeds the incumbent with the DAG of a minimum-degree ordering.  With
    workers > 1 the tree is partitioned by first vertex across
    processes; the merged result is identical for any worker count.
    """
    if p is None:
        p = ci.p
    elif p != ci.p:
        raise ValueError(f"backend covers {ci.p} variables, not {p}")
    _check_cap(p, max_p)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")

    bound = None
    seed: set = set()
    if warm_start:
        g0 = build_dag_for_permutation(min_degree_order(ci), ci)
        bound = g0.num_edges
        seed = {g0.edges}

    scanned = math.factorial(p)
    if workers == 1 or p < 2:
        best, winners = _scan_edges(ci, p, range(p), bound, seed)
        return _finish(p, best, winners, scanned)

    parts = [list(range(w, p, workers)) for w in range(min(workers, p))]
    with ProcessPoolExecutor(max_workers=len(parts)) as pool:
        futures = [
            pool.submit(_scan_edges, ci, p, part, bound, seed) for part in parts
        ]
        results = [f.result() for f in futures]
    best = min(r[0] for r in results)
    winners = set()
    for local_best, local_winners in results:
        if local_best == best:
            winners |= local_winners
    # the warm-start seed survives in every subtree result; keep it only
    # if it is genuinely minimal
    winners = {e for e in winners if len(e) == best}
    return _finish(p, best, winners, scanned)


def min_degree_order(ci: CiBackend) -> Permutation:
    """Heuristic ordering: reverse minimum-degree elimination on the
    pairwise-dependence-given-everything-else graph.

    Only useful as a bound seed for sp_search; carries no optimality
    guarantee of its own.
    """
    p = ci.p
    every = set(range(p))
    adj = {v: set() for v in range(p)}
    for j in range(p):
        for k in range(j + 1, p):
            if not ci.is_independent(j, k, every - {j, k}):
                adj[j].add(k)
                adj[k].add(j)
    eliminated = []
    alive = set(range(p))
    while alive:
        v = min(alive, key=lambda u: (len(adj[u] & alive), u))
        rest = adj[v] & alive
        for a in rest:  # fill in: neighbours become a clique
            adj[a] |= rest - {a}
        alive.remove(v)
        eliminated.append(v)
    return Permutation(eliminated[::-1])


def permuted_precision(sigma, pi) -> CovarianceMatrix:
    """Invert the covariance and permute rows and columns by pi."""
    m = _as_matrix(sigma)
    order = as_permutation(pi, m.shape[0]).order
    try:
        k = cho_solve(cho_factor(m, lower=True), np.eye(m.shape[0]))
    except np.linalg.LinAlgError as err:
        raise NumericalError(f"covariance failed to factor: {err}") from None
    k = (k + k.T) / 2.0
    idx = np.asarray(order)
    return CovarianceMatrix(k[np.ix_(idx, idx)])


def upper_cholesky(k, *, chol_tol: float = CHOL_TOL) -> CholeskyFactor:
    """Factor an SPD matrix as U @ diag(D) @ U.T, U upper unitriangular.

    Implemented by reversing row and column order, taking the standard
    lower Cholesky factor, reversing back, and scaling columns by their
    pivots.  Entries of U at or below chol_tol in magnitude are treated
    as structural zeros in nonzero_mask.
    """
    m = _as_matrix(k)
    p = m.shape[0]
    rev = m[::-1, ::-1]
    try:
        low = np.linalg.cholesky(rev)
    except np.linalg.LinAlgError:
        raise NumericalError("matrix is not positive definite") from None
    uprime = low[::-1, ::-1]
    piv = np.diag(uprime).copy()
    d = piv**2
    u = uprime / piv[None, :]
    recon = (u * d[None, :]) @ u.T
    scale = np.abs(m).max()
    if np.abs(recon - m).max() > 1e-8 * scale:
        raise NumericalError("factor failed to reconstruct its input")
    mask = np.triu(np.abs(u) > chol_tol, k=1)
    u = u.copy()
    u.flags.writeable = False
    d.flags.writeable = False
    mask.flags.writeable = False
    return CholeskyFactor(U=u, D=d, nonzero_mask=mask)


def sp_search_cholesky(
    sigma,
    chol_tol: float = CHOL_TOL,
    *,
    max_p: int = PERMUTATION_CAP,
) -> SpResult:
    """Gaussian-only scan scoring each ordering by Cholesky fill.

    For each permutation the precision matrix is permuted and factored;
    the strict upper nonzeros of U, mapped back through the ordering,
    form the candidate DAG.  Winners minimize the fill count.
    """
    if chol_tol <= 0:
        raise ValueError(f"tolerance must be positive, got {chol_tol}")
    m = _as_matrix(sigma)
    p = m.shape[0]
    _check_cap(p, max_p)
    try:
        kfull = cho_solve(cho_factor(m, lower=True), np.eye(p))
    except np.linalg.LinAlgError as err:
        raise NumericalError(f"covariance failed to factor: {err}") from None
    kfull = (kfull + kfull.T) / 2.0

    best = math.inf
    winners: set = set()
    for order in itertools.permutations(range(p)):
        idx = np.asarray(order)
        kpi = kfull[np.ix_(idx, idx)]
        rev = kpi[::-1, ::-1]
        try:
            low = np.linalg.cholesky(rev)
        except np.linalg.LinAlgError:
            raise NumericalError(
                f"permuted precision failed to factor at order {order}"
            ) from None
        uprime = low[::-1, ::-1]
        u = uprime / np.diag(uprime)[None, :]
        rows, cols = np.nonzero(np.triu(np.abs(u) > chol_tol, k=1))
        count = len(rows)
        if count > best:
            continue
        edges = frozenset((order[a], order[b]) for a, b in zip(rows, cols))
        if count < best:
            best = count
            winners = {edges}
        else:
            winners.add(edges)
    return _finish(p, best, winners, math.factorial(p))
