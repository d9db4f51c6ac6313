"""Tests for the sparsest-ordering search and its Cholesky variant."""

import itertools
import math

import numpy as np
import pytest

from spdag.exceptions import CapacityError, NumericalError
from spdag.graph import (
    Dag,
    Permutation,
    d_separated,
    pattern_of,
    skeleton,
    topological_orders,
)
from spdag.oracle import (
    CovarianceMatrix,
    dsep_backend,
    explicit_backend,
    gaussian_exact_backend,
    iter_triples,
)
from spdag.sem import LinearSem, covariance_of, precision_of
from spdag.sp import (
    CholeskyFactor,
    SpResult,
    build_dag_for_permutation,
    min_degree_order,
    permuted_precision,
    sp_search,
    sp_search_cholesky,
    upper_cholesky,
)

from corpus import (
    CHAIN4,
    FOUR_CYCLE,
    edge_cancellation_backend,
    edge_cancellation_sem,
    marginal_cancellation_backend,
    missed_independence_backend,
    random_dag_pool,
    random_sem_pool,
)


def brute_force_scan(ci, shuffle_seed=None):
    """Reference: score every permutation directly, no pruning."""
    perms = list(itertools.permutations(range(ci.p)))
    if shuffle_seed is not None:
        np.random.default_rng(shuffle_seed).shuffle(perms)
    best, winners = None, set()
    for perm in perms:
        g = build_dag_for_permutation(perm, ci)
        if best is None or g.num_edges < best:
            best, winners = g.num_edges, {g}
        elif g.num_edges == best:
            winners.add(g)
    classes = frozenset(pattern_of(g) for g in winners)
    return SpResult(
        min_edges=best,
        winners=frozenset(winners),
        classes=classes,
        unique_class=len(classes) == 1,
        permutations_scanned=math.factorial(ci.p),
    )


def random_explicit_backends(seed, count, p=4, density=0.3):
    rng = np.random.default_rng(seed)
    triples = list(iter_triples(p))
    out = []
    for _ in range(count):
        out.append(explicit_backend(p, [t for t in triples if rng.random() < density]))
    return out


class TestBuildDag:
    def test_edge_cancellation_order(self):
        # placing vertex 3 second keeps five edges: the 0->1 edge is the
        # only one the cancellation removes, and it needs 3 in the prefix
        g = build_dag_for_permutation((0, 3, 1, 2), edge_cancellation_backend())
        assert g.edges == frozenset({(0, 2), (0, 3), (1, 2), (3, 1), (3, 2)})

    def test_marginal_cancellation_order(self):
        g = build_dag_for_permutation((0, 3, 2, 1), marginal_cancellation_backend())
        assert g.edges == frozenset({(0, 1), (0, 2), (2, 1), (3, 2)})

    def test_identity_on_chain(self):
        ci = dsep_backend(CHAIN4)
        g = build_dag_for_permutation(Permutation.identity(4), ci)
        assert g == CHAIN4

    def test_consistent_orders_never_beat_the_source(self):
        # along any topological order of the source graph, the induced
        # DAG stays within the source's skeleton and edge budget
        for g_star in random_dag_pool(31, 20, p_values=(3, 4)):
            ci = dsep_backend(g_star)
            for pi in topological_orders(g_star):
                g = build_dag_for_permutation(pi, ci)
                assert g.num_edges <= g_star.num_edges
                assert skeleton(g) <= skeleton(g_star)

    def test_accepts_raw_sequences(self):
        ci = dsep_backend(CHAIN4)
        assert build_dag_for_permutation([3, 2, 1, 0], ci) == \
            build_dag_for_permutation(Permutation((3, 2, 1, 0)), ci)


class TestSpSearch:
    def test_matches_brute_force_on_random_backends(self):
        for i, ci in enumerate(random_explicit_backends(71, 12)):
            want = brute_force_scan(ci, shuffle_seed=i)
            got = sp_search(ci)
            assert got == want

    def test_edge_cancellation_recovers_cycle_class(self):
        r = sp_search(edge_cancellation_backend())
        assert r.min_edges == 4
        assert r.unique_class
        assert r.classes == frozenset({pattern_of(FOUR_CYCLE)})
        assert len(r.winners) == 3
        assert r.permutations_scanned == 24

    def test_marginal_cancellation_splits_classes(self):
        r = sp_search(marginal_cancellation_backend())
        assert r.min_edges == 4
        assert not r.unique_class
        assert len(r.classes) == 2
        assert pattern_of(FOUR_CYCLE) in r.classes
        for g in r.winners:
            assert g.num_edges == 4

    def test_missed_independence_overshoots(self):
        # the backend hides one independence of a 3-edge chain, and no
        # ordering gets back under 4 edges
        r = sp_search(missed_independence_backend())
        assert r.min_edges == 4 > CHAIN4.num_edges

    def test_separation_oracles_recover_the_class(self):
        for g_star in random_dag_pool(902, 100, p_values=(3, 4, 5, 6)):
            r = sp_search(dsep_backend(g_star))
            assert r.min_edges == g_star.num_edges
            assert r.unique_class
            assert next(iter(r.classes)) == pattern_of(g_star)
            assert g_star in r.winners

    def test_every_induced_dag_is_markov_and_minimal(self):
        # each winner candidate G_pi satisfies: every separation it
        # encodes holds in the backend, and dropping any single edge
        # breaks that
        def is_markov(g, ci):
            for j in range(g.p):
                for k in range(j + 1, g.p):
                    for s_mask in range(1 << g.p):
                        if s_mask >> j & 1 or s_mask >> k & 1:
                            continue
                        s = [v for v in range(g.p) if s_mask >> v & 1]
                        if d_separated(g, j, k, s) and not ci.is_independent(j, k, s):
                            return False
            return True

        for g_star in random_dag_pool(903, 12, p_values=(3, 4)):
            ci = dsep_backend(g_star)
            for perm in itertools.permutations(range(g_star.p)):
                g = build_dag_for_permutation(perm, ci)
                assert is_markov(g, ci)
                for j, k in g.edges:
                    assert not is_markov(g.without_edge(j, k), ci)

    def test_warm_start_changes_nothing(self):
        backends = random_explicit_backends(77, 6)
        backends += [dsep_backend(g) for g in random_dag_pool(78, 6, p_values=(4, 5))]
        for ci in backends:
            assert sp_search(ci, warm_start=True) == sp_search(ci)

    def test_worker_count_changes_nothing(self):
        for ci in (edge_cancellation_backend(), marginal_cancellation_backend()):
            serial = sp_search(ci)
            assert sp_search(ci, workers=2) == serial
            assert sp_search(ci, workers=5) == serial

    def test_capacity_error_names_the_flag(self):
        ci = explicit_backend(10, [])
        with pytest.raises(CapacityError, match="--max-p"):
            sp_search(ci)
        r = sp_search(explicit_backend(3, []), max_p=3)
        assert r.min_edges == 3  # complete graph: nothing is independent

    def test_p_argument_is_checked(self):
        ci = explicit_backend(4, [])
        assert sp_search(ci, 4) == sp_search(ci)
        with pytest.raises(ValueError):
            sp_search(ci, 5)

    def test_result_invariants_enforced(self):
        g = Dag(2, [(0, 1)])
        with pytest.raises(ValueError):
            SpResult(0, frozenset({g}), frozenset({pattern_of(g)}), True, 2)
        with pytest.raises(ValueError):
            SpResult(1, frozenset({g}), frozenset({pattern_of(g)}), False, 2)
        with pytest.raises(ValueError):
            SpResult(1, frozenset({g}), frozenset(), False, 2)


class TestPermutedPrecision:
    def test_identity_is_plain_precision(self):
        sem = random_sem_pool(201, 1, p_values=(5,))[0]
        k1 = permuted_precision(covariance_of(sem), Permutation.identity(5))
        k2 = precision_of(sem)
        assert np.allclose(k1.values, k2.values, atol=1e-12)

    def test_round_trip_through_inverse(self):
        sem = random_sem_pool(202, 1, p_values=(5,))[0]
        sig = covariance_of(sem)
        pi = Permutation((3, 0, 4, 1, 2))
        kpi = permuted_precision(sig, pi).values
        inv_order = np.asarray(pi.inverse().order)
        back = kpi[np.ix_(inv_order, inv_order)]
        assert np.allclose(back, permuted_precision(sig, Permutation.identity(5)).values,
                           atol=1e-12)

    def test_two_variable_closed_forms(self):
        sig = CovarianceMatrix(np.array([[1.0, 0.5], [0.5, 1.0]]))
        kpi = permuted_precision(sig, Permutation((1, 0))).values
        assert np.allclose(kpi, np.array([[4 / 3, -2 / 3], [-2 / 3, 4 / 3]]), atol=1e-12)

        a = 0.7
        sem = LinearSem(Dag(2, [(0, 1)]), {(0, 1): a})
        sig2 = covariance_of(sem)
        k = permuted_precision(sig2, Permutation.identity(2)).values
        assert np.allclose(k, np.array([[1 + a * a, -a], [-a, 1.0]]), atol=1e-12)
        kswap = permuted_precision(sig2, Permutation((1, 0))).values
        assert np.allclose(kswap, np.array([[1.0, -a], [-a, 1 + a * a]]), atol=1e-12)

    def test_not_positive_definite(self):
        with pytest.raises(NumericalError):
            permuted_precision(np.array([[1.0, 2.0], [2.0, 1.0]]), Permutation((0, 1)))


class TestUpperCholesky:
    def test_diagonal_input(self):
        f = upper_cholesky(np.diag([4.0, 9.0, 0.25]))
        assert np.allclose(f.U, np.eye(3), atol=1e-14)
        assert np.allclose(f.D, [4.0, 9.0, 0.25], atol=1e-14)
        assert f.num_nonzero == 0

    def test_recovers_sem_coefficients(self):
        # for a model whose labels are already a valid order, the factor
        # of the precision matrix is exactly I - A with D the noise
        # precisions
        for sem in random_sem_pool(203, 25):
            kap = precision_of(sem)
            f = upper_cholesky(kap)
            want_u = np.eye(sem.p) - sem.weight_matrix()
            assert np.max(np.abs(f.U - want_u)) < 1e-10
            assert np.allclose(f.D, 1.0 / np.asarray(sem.noise_vars), atol=1e-10)

    def test_chain_precision_is_tridiagonal(self):
        sem = LinearSem(CHAIN4, {(0, 1): 1.0, (1, 2): 1.0, (2, 3): 1.0})
        kap = precision_of(sem).values
        want = np.array(
            [
                [2.0, -1.0, 0.0, 0.0],
                [-1.0, 2.0, -1.0, 0.0],
                [0.0, -1.0, 2.0, -1.0],
                [0.0, 0.0, -1.0, 1.0],
            ]
        )
        assert np.allclose(kap, want, atol=1e-12)
        f = upper_cholesky(kap)
        assert np.allclose(f.U, np.eye(4) - sem.weight_matrix(), atol=1e-10)
        assert np.allclose(f.D, np.ones(4), atol=1e-10)

    def test_reconstruction_on_random_spd(self):
        rng = np.random.default_rng(204)
        for _ in range(50):
            p = int(rng.integers(2, 8))
            m = rng.standard_normal((p, p))
            k = m @ m.T + p * np.eye(p)
            f = upper_cholesky(k)
            assert np.allclose(np.diag(f.U), 1.0, atol=1e-14)
            assert np.max(np.abs(np.tril(f.U, -1))) == 0.0
            assert (f.D > 0).all()
            recon = (f.U * f.D[None, :]) @ f.U.T
            assert np.max(np.abs(recon - k)) <= 1e-8 * np.abs(k).max()

    def test_mask_respects_tolerance(self):
        sem = edge_cancellation_sem()
        f = upper_cholesky(precision_of(sem), chol_tol=1e-7)
        masked = np.abs(f.U[np.triu_indices(4, k=1)])
        kept = masked[masked > 1e-7]
        assert f.num_nonzero == kept.size
        big = upper_cholesky(precision_of(sem), chol_tol=10.0)
        assert big.num_nonzero == 0

    def test_rejects_indefinite(self):
        with pytest.raises(NumericalError):
            upper_cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_edges_for_maps_through_order(self):
        sem = LinearSem(Dag(3, [(0, 2)]), {(0, 2): 0.5})
        f = upper_cholesky(precision_of(sem))
        assert f.edges_for(Permutation.identity(3)) == frozenset({(0, 2)})
        assert f.edges_for(Permutation((2, 1, 0))) == frozenset({(2, 0)})


class TestSpSearchCholesky:
    def test_diagonal_covariance(self):
        r = sp_search_cholesky(np.diag([1.0, 2.0, 3.0]))
        assert r.min_edges == 0
        assert r.winners == frozenset({Dag(3)})
        assert r.unique_class

    def test_agrees_with_ci_route(self):
        for sem in random_sem_pool(205, 50):
            sig = covariance_of(sem)
            a = sp_search_cholesky(sig)
            b = sp_search(gaussian_exact_backend(sig))
            assert a == b

    def test_cancellation_covariance_recovers_cycle(self):
        sig = covariance_of(edge_cancellation_sem())
        r = sp_search_cholesky(sig)
        assert r.min_edges == 4
        assert r.unique_class
        assert r.classes == frozenset({pattern_of(FOUR_CYCLE)})

    def test_tolerance_validation(self):
        with pytest.raises(ValueError):
            sp_search_cholesky(np.eye(3), chol_tol=0.0)

    def test_capacity(self):
        with pytest.raises(CapacityError, match="--max-p"):
            sp_search_cholesky(np.eye(10))


class TestMinDegreeOrder:
    def test_returns_valid_permutation(self):
        for g in random_dag_pool(206, 10, p_values=(4, 5)):
            pi = min_degree_order(dsep_backend(g))
            assert sorted(pi.order) == list(range(g.p))

    def test_chain_order_is_sparse(self):
        # on a chain the heuristic should find an ordering matching the
        # true edge count
        ci = dsep_backend(CHAIN4)
        g = build_dag_for_permutation(min_degree_order(ci), ci)
        assert g.num_edges == 3
