import random

import pytest

from workatlas.coverage import coverage
from workatlas.sampling import (
    PoolUnit,
    SummaryStat,
    build_pool,
    chao1,
    permutation_sensitivity,
    sample_until_saturation,
)
from workatlas.taxonomy import TaxonomyKind

from conftest import random_corpus, synthetic_result, synthetic_taxonomy


class TestChao1:
    def test_no_singletons_returns_observed(self):
        assert chao1({"a": 3, "b": 2, "c": 5}) == 3.0

    def test_classic_branch(self):
        # S_obs 10, f1 4, f2 2 -> 10 + 16/4 = 14
        counts = {f"s{i}": 1 for i in range(4)}
        counts.update({f"d{i}": 2 for i in range(2)})
        counts.update({f"m{i}": 7 for i in range(4)})
        assert chao1(counts) == 14.0

    def test_bias_corrected_branch(self):
        # S_obs 5, f1 3, f2 0 -> 5 + 3*2/2 = 8
        counts = {"a": 1, "b": 1, "c": 1, "d": 3, "e": 4}
        assert chao1(counts) == 8.0

    def test_accepts_plain_count_sequence(self):
        assert chao1([1, 1, 1, 3, 4]) == 8.0

    def test_empty_input_is_error(self):
        with pytest.raises(ValueError, match="no observations"):
            chao1({})

    def test_zero_count_rejected(self):
        with pytest.raises(ValueError, match=">= 1"):
            chao1({"a": 0})

    def test_never_below_observed_richness(self):
        rng = random.Random(40)
        for _ in range(200):
            n = rng.randint(1, 30)
            counts = [rng.randint(1, 6) for _ in range(n)]
            assert chao1(counts) >= n
            if not any(c == 1 for c in counts):
                assert chao1(counts) == n


class TestBuildPool:
    def test_groups_results_by_example(self, domain_results, skill_results):
        pool = build_pool(list(domain_results) + list(skill_results))
        assert len(pool) == 20
        first = pool[0]
        assert set(first.paths) == {TaxonomyKind.DOMAIN, TaxonomyKind.SKILL}

    def test_order_follows_first_appearance(self, domain_results):
        pool = build_pool(domain_results)
        assert [u.key for u in pool] == [r.key for r in domain_results]


def constructed_pool(taxonomy, batches):
    """Pool whose i-th batch of 5 covers exactly the given leaf sets."""
    units = []
    counter = 0
    for batch in batches:
        leaves = list(batch)
        for i in range(5):
            indices = [leaves[i % len(leaves)]] if leaves else []
            units.append(synthetic_result(taxonomy, f"e{counter}", indices))
            counter += 1
    return units


class TestSampler:
    def test_pool_smaller_than_batch_stops_by_exhaustion(self):
        t = synthetic_taxonomy(10)
        pool = [synthetic_result(t, f"e{i}", [i]) for i in range(3)]
        run = sample_until_saturation(pool, t, None, batch_size=5, delta=0.1)
        assert run.stop_size == 3
        assert run.stopped_by == "exhausted"

    def test_constructed_two_batch_stop(self):
        # batch 1 covers 3 of 10 paths (gain 30 pp), batch 2 adds nothing
        t = synthetic_taxonomy(10)
        pool = constructed_pool(t, [[0, 1, 2], [0, 1, 2]])
        run = sample_until_saturation(pool, t, None, batch_size=5, delta=0.1)
        assert run.stop_batch_index == 2
        assert run.stop_size == 10
        assert run.stopped_by == "saturation"
        assert run.coverage_trace[TaxonomyKind.DOMAIN] == (0.3, 0.3)

    def test_always_consumes_at_least_one_batch(self):
        t = synthetic_taxonomy(10)
        pool = [synthetic_result(t, f"e{i}", []) for i in range(12)]
        run = sample_until_saturation(pool, t, None, batch_size=5, delta=0.1)
        assert run.stop_size == 5
        assert run.stop_batch_index == 1

    def test_stop_requires_both_kinds_below_delta(self):
        td = synthetic_taxonomy(10, kind="domain")
        ts = synthetic_taxonomy(10, kind="skill")
        # domain saturates immediately; skill keeps gaining in batch 2
        units = []
        for i in range(5):
            units.append(PoolUnit(key=("synth", f"a{i}"), paths={
                TaxonomyKind.DOMAIN: frozenset([next(iter(td.path_index))]),
                TaxonomyKind.SKILL: frozenset(),
            }))
        skill_paths = sorted(ts.path_index, key=str)
        for i in range(5):
            units.append(PoolUnit(key=("synth", f"b{i}"), paths={
                TaxonomyKind.DOMAIN: frozenset(),
                TaxonomyKind.SKILL: frozenset([skill_paths[i]]),
            }))
        run = sample_until_saturation(units, td, ts, batch_size=5, delta=0.1)
        # batch 2 still gains skill coverage, so the rule cannot fire before it
        assert run.stop_size == 10

    def test_stopping_soundness_invariant(self):
        rng = random.Random(77)
        t = synthetic_taxonomy(20)
        for trial in range(20):
            pool = random_corpus(t, rng.randint(5, 60), rng)
            run = sample_until_saturation(pool, t, None, batch_size=5, delta=0.1)
            trace = run.coverage_trace[TaxonomyKind.DOMAIN]
            gains = [
                (trace[i] - (trace[i - 1] if i else 0.0)) * 100 for i in range(len(trace))
            ]
            for gain in gains[:-1]:
                assert gain >= 0.1
            if run.stopped_by == "saturation":
                assert gains[-1] < 0.1

    def test_trace_equals_prefix_coverage(self, domain_results, skill_results,
                                          domain_taxonomy, skill_taxonomy):
        pool = build_pool(list(domain_results) + list(skill_results))
        run = sample_until_saturation(pool, domain_taxonomy, skill_taxonomy,
                                      batch_size=5, delta=0.1)
        selected = list(run.selected)
        domain_by_key = {r.key: r for r in domain_results}
        for batch_end, value in enumerate(run.coverage_trace[TaxonomyKind.DOMAIN]):
            prefix_keys = selected[: (batch_end + 1) * 5]
            prefix = [domain_by_key[k] for k in prefix_keys if k in domain_by_key]
            assert value == coverage(prefix, domain_taxonomy).coverage

    def test_trace_non_decreasing(self, domain_results, domain_taxonomy):
        run = sample_until_saturation(build_pool(domain_results), domain_taxonomy, None)
        trace = run.coverage_trace[TaxonomyKind.DOMAIN]
        assert all(a <= b for a, b in zip(trace, trace[1:]))

    def test_determinism(self, domain_results, skill_results, domain_taxonomy, skill_taxonomy):
        pool = build_pool(list(domain_results) + list(skill_results))
        runs = [
            sample_until_saturation(pool, domain_taxonomy, skill_taxonomy,
                                    rng_seed=5, shuffle=True)
            for _ in range(2)
        ]
        assert runs[0] == runs[1]

    def test_fraction_delta_unit(self):
        # a 30% first-batch gain passes delta=0.2 in fraction units but the
        # zero-gain second batch stops the run
        t = synthetic_taxonomy(10)
        pool = constructed_pool(t, [[0, 1, 2], [0, 1, 2]])
        run = sample_until_saturation(pool, t, None, batch_size=5, delta=0.2,
                                      delta_unit="fraction")
        assert run.stop_batch_index == 2
        assert run.stopped_by == "saturation"

    def test_stop_when_any_kind(self):
        td = synthetic_taxonomy(10, kind="domain")
        ts = synthetic_taxonomy(10, kind="skill")
        skill_paths = sorted(ts.path_index, key=str)
        units = [
            PoolUnit(key=("synth", f"u{i}"), paths={
                TaxonomyKind.DOMAIN: frozenset(),
                TaxonomyKind.SKILL: frozenset([skill_paths[i]]),
            })
            for i in range(10)
        ]
        # domain coverage never moves, so the permissive rule stops at once
        run = sample_until_saturation(units, td, ts, batch_size=5, delta=0.1,
                                      stop_when="any")
        assert run.stop_size == 5
        strict = sample_until_saturation(units, td, ts, batch_size=5, delta=0.1,
                                         stop_when="all")
        assert strict.stop_size == 10

    def test_parameter_validation(self, domain_taxonomy):
        pool = [synthetic_result(synthetic_taxonomy(3), "e0", [0])]
        with pytest.raises(ValueError, match="batch_size"):
            sample_until_saturation(pool, domain_taxonomy, None, batch_size=0)
        with pytest.raises(ValueError, match="delta"):
            sample_until_saturation(pool, domain_taxonomy, None, delta=0)
        with pytest.raises(ValueError, match="empty"):
            sample_until_saturation([], domain_taxonomy, None)
        with pytest.raises(ValueError, match="taxonomy"):
            sample_until_saturation(pool, None, None)
        with pytest.raises(ValueError, match="stop_when"):
            sample_until_saturation(pool, domain_taxonomy, None, stop_when="some")
        with pytest.raises(ValueError, match="delta_unit"):
            sample_until_saturation(pool, domain_taxonomy, None, delta_unit="percent")


class TestSensitivity:
    def test_single_batch_pool_is_point_mass(self):
        t = synthetic_taxonomy(6)
        pool = [synthetic_result(t, f"e{i}", [i]) for i in range(4)]
        summary = permutation_sensitivity(pool, t, None, permutations=100, rng_seed=1)
        assert summary.stop_size.median == 4.0
        assert summary.stop_size.ci_low == 4.0
        assert summary.stop_size.ci_high == 4.0
        assert set(summary.stop_sizes) == {4}

    def test_double_run_determinism(self):
        rng = random.Random(9)
        t = synthetic_taxonomy(12)
        pool = random_corpus(t, 40, rng)
        first = permutation_sensitivity(pool, t, None, permutations=500, rng_seed=123)
        second = permutation_sensitivity(pool, t, None, permutations=500, rng_seed=123)
        assert first == second

    def test_different_seeds_usually_differ(self):
        rng = random.Random(10)
        t = synthetic_taxonomy(30)
        pool = random_corpus(t, 80, rng, max_paths=2)
        a = permutation_sensitivity(pool, t, None, permutations=50, rng_seed=1)
        b = permutation_sensitivity(pool, t, None, permutations=50, rng_seed=2)
        assert a.stop_sizes != b.stop_sizes

    def test_intervals_contain_median(self):
        rng = random.Random(12)
        t = synthetic_taxonomy(25)
        pool = random_corpus(t, 70, rng, max_paths=2)
        summary = permutation_sensitivity(pool, t, None, permutations=200, rng_seed=3)
        stat = summary.stop_size
        assert stat.ci_low <= stat.median <= stat.ci_high
        for table in (summary.coverage_at_stop, summary.chao1_coverage):
            for entry in table.values():
                assert entry.ci_low <= entry.median <= entry.ci_high

    def test_chao1_richness_matches_direct_computation(self, domain_results, domain_taxonomy):
        pool = build_pool(domain_results)
        summary = permutation_sensitivity(pool, domain_taxonomy, None,
                                          permutations=10, rng_seed=4)
        occurrence = {}
        for unit in pool:
            for path in unit.paths[TaxonomyKind.DOMAIN]:
                occurrence[path] = occurrence.get(path, 0) + 1
        assert summary.chao1_richness[TaxonomyKind.DOMAIN] == chao1(occurrence)

    def test_permutations_validated(self, domain_results, domain_taxonomy):
        with pytest.raises(ValueError, match="permutations"):
            permutation_sensitivity(build_pool(domain_results), domain_taxonomy, None,
                                    permutations=0)


def test_summary_stat_from_values():
    stat = SummaryStat.from_values([1.0, 2.0, 3.0, 4.0])
    assert stat.median == 2.5
    assert stat.mean == 2.5
    assert stat.ci_low <= stat.median <= stat.ci_high
