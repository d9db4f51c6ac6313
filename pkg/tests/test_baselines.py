"""Tests for the constraint-based skeleton baselines."""

import itertools
from itertools import combinations

import numpy as np
import pytest

from spdag.baselines import (
    SepsetTable,
    orient_v_structures,
    pc_pattern,
    pc_skeleton,
    sgs_pattern,
    sgs_skeleton,
)
from spdag.exceptions import CapacityError, MissingSepsetError
from spdag.graph import Dag, pattern_of, skeleton
from spdag.oracle import dsep_backend, explicit_backend, iter_triples
from spdag.sp import build_dag_for_permutation

from corpus import (
    CHAIN3,
    CHAIN4,
    FOUR_CYCLE,
    edge_cancellation_backend,
    marginal_cancellation_backend,
    missed_independence_backend,
    random_dag_pool,
)


def random_explicit_backends(seed, count, p=4, density=0.3):
    rng = np.random.default_rng(seed)
    triples = list(iter_triples(p))
    return [
        explicit_backend(p, [t for t in triples if rng.random() < density])
        for _ in range(count)
    ]


class TestSepsetTable:
    def test_round_trip_and_symmetry(self):
        t = SepsetTable()
        t.record(3, 1, [0, 2])
        assert t.get(1, 3) == frozenset({0, 2})
        assert (3, 1) in t and (1, 3) in t
        assert len(t) == 1

    def test_missing_pair_raises(self):
        t = SepsetTable()
        with pytest.raises(MissingSepsetError):
            t.get(0, 1)
        with pytest.raises(ValueError):
            t.record(2, 2, [])


class TestSgsSkeleton:
    def test_chain_recovery(self):
        sk, t = sgs_skeleton(dsep_backend(CHAIN3))
        assert sk == frozenset({(0, 1), (1, 2)})
        assert t.get(0, 2) == frozenset({1})

    def test_cancellation_deletes_a_true_edge(self):
        # the unfaithful independence 0 _||_ 1 | {3} kills the 0-1 edge
        sk, t = sgs_skeleton(edge_cancellation_backend())
        assert sk == frozenset({(0, 3), (1, 2), (2, 3)})
        assert t.get(0, 1) == frozenset({3})
        assert sk != skeleton(FOUR_CYCLE)

    def test_missed_independence_keeps_the_skeleton(self):
        sk, _ = sgs_skeleton(missed_independence_backend())
        assert sk == skeleton(CHAIN4)

    def test_witness_is_smallest_then_lexicographic(self):
        for ci in random_explicit_backends(11, 10):
            _, table = sgs_skeleton(ci)
            for (j, k), s in table.items():
                assert ci.is_independent(j, k, s)
                rest = [v for v in range(ci.p) if v not in (j, k)]
                for size in range(len(s) + 1):
                    for cand in combinations(rest, size):
                        if cand == tuple(sorted(s)):
                            break
                        assert not ci.is_independent(j, k, cand)
                    else:
                        continue
                    break

    def test_capacity(self):
        with pytest.raises(CapacityError):
            sgs_skeleton(explicit_backend(13, []))

    def test_p_mismatch(self):
        with pytest.raises(ValueError):
            sgs_skeleton(dsep_backend(CHAIN3), 4)


class TestPcSkeleton:
    def test_matches_sgs_under_separation_oracles(self):
        for g in random_dag_pool(12, 40, p_values=(3, 4, 5)):
            ci = dsep_backend(g)
            assert pc_skeleton(ci)[0] == sgs_skeleton(ci)[0] == skeleton(g)

    def test_fully_independent_backend(self):
        ci = explicit_backend(4, list(iter_triples(4)))
        sk, table = pc_skeleton(ci)
        assert sk == frozenset()
        # everything separated at level zero
        for (_, _), s in table.items():
            assert s == frozenset()

    def test_complete_graph_never_separates(self):
        g = Dag(4, [(j, k) for j in range(4) for k in range(j + 1, 4)])
        sk, table = pc_skeleton(dsep_backend(g))
        assert sk == skeleton(g)
        assert len(table) == 0

    def test_skeleton_contains_sgs_skeleton(self):
        # conditioning only on neighbours can only miss separations
        for ci in random_explicit_backends(13, 20):
            assert pc_skeleton(ci)[0] >= sgs_skeleton(ci)[0]

    def test_recorded_sets_witness_independence(self):
        for ci in random_explicit_backends(14, 10):
            _, table = pc_skeleton(ci)
            for (j, k), s in table.items():
                assert ci.is_independent(j, k, s)


class TestOrientation:
    def test_collider_marked(self):
        t = SepsetTable()
        t.record(0, 1, [])
        pat = orient_v_structures({(0, 2), (1, 2)}, t)
        assert pat.v_structures == frozenset({(0, 2, 1)})

    def test_chain_not_marked(self):
        t = SepsetTable()
        t.record(0, 2, [1])
        pat = orient_v_structures({(0, 1), (1, 2)}, t)
        assert pat.v_structures == frozenset()

    def test_missing_sepset_raises(self):
        with pytest.raises(MissingSepsetError):
            orient_v_structures({(0, 2), (1, 2)}, SepsetTable())

    def test_faithful_cycle_pipeline(self):
        assert sgs_pattern(dsep_backend(FOUR_CYCLE)) == pattern_of(FOUR_CYCLE)

    def test_shielded_triples_ignored(self):
        # triangle: no unshielded triple, nothing to orient, no lookup
        pat = orient_v_structures({(0, 1), (1, 2), (0, 2)}, SepsetTable())
        assert pat.v_structures == frozenset()


class TestConsistency:
    def test_pipelines_recover_pattern_under_faithfulness(self):
        for g in random_dag_pool(15, 100, p_values=(3, 4, 5, 6)):
            ci = dsep_backend(g)
            want = pattern_of(g)
            assert sgs_pattern(ci) == want
            assert pc_pattern(ci) == want

    def test_sgs_skeleton_inside_every_ordering_dag(self):
        # deleting an edge only needs one separating set, while the
        # per-ordering construction needs the specific prefix set to
        # separate, so the full-sweep skeleton is always a subset
        backends = random_explicit_backends(16, 8)
        backends += [
            edge_cancellation_backend(),
            marginal_cancellation_backend(),
            missed_independence_backend(),
        ]
        for ci in backends:
            sgs_sk, _ = sgs_skeleton(ci)
            for perm in itertools.permutations(range(ci.p)):
                g = build_dag_for_permutation(perm, ci)
                assert sgs_sk <= skeleton(g)
