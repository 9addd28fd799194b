import random

import pytest

from workatlas.coverage import (
    CoverageAccumulator,
    ForeignPathError,
    GroupLevel,
    breadth,
    coverage,
    effort_by_node,
)
from workatlas.mapping import MappingStatus

from conftest import random_corpus, synthetic_result, synthetic_taxonomy


class TestCoverage:
    def test_no_mapped_results_is_zero(self):
        t = synthetic_taxonomy(10)
        results = [synthetic_result(t, "e0", [])]
        assert coverage(results, t).coverage == 0.0

    def test_fixture_unique_paths(self):
        # paths {1, 2, 2, 4, 7} over a 10-path taxonomy -> 4 unique -> 0.4
        t = synthetic_taxonomy(10)
        results = [
            synthetic_result(t, "a", [1]),
            synthetic_result(t, "b", [2]),
            synthetic_result(t, "c", [2, 4]),
            synthetic_result(t, "d", [7]),
        ]
        report = coverage(results, t)
        assert report.coverage == 0.4
        assert len(report.covered_paths) == 4

    def test_brute_force_union_oracle(self):
        rng = random.Random(11)
        t = synthetic_taxonomy(15)
        results = random_corpus(t, 40, rng)
        report = coverage(results, t)
        expected = set()
        for r in results:
            if r.status is MappingStatus.MAPPED:
                expected |= set(r.paths)
        assert report.covered_paths == frozenset(expected)
        assert report.coverage == len(expected) / 15

    def test_bundled_corpus_coverage(self, domain_results, domain_taxonomy,
                                     skill_results, skill_taxonomy):
        assert coverage(domain_results, domain_taxonomy).coverage == pytest.approx(11 / 12)
        assert coverage(skill_results, skill_taxonomy).coverage == pytest.approx(8 / 10)

    def test_per_benchmark_uses_full_denominator(self, domain_results, domain_taxonomy):
        report = coverage(domain_results, domain_taxonomy)
        # each benchmark's covered count over the full 12-path denominator
        assert report.per_benchmark["codebench"] == 6 / 12
        assert report.per_benchmark["deskbench"] == 6 / 12
        assert report.per_benchmark["webbench"] == 6 / 12
        for fraction in report.per_benchmark.values():
            assert fraction <= report.coverage

    def test_foreign_kind_rejected(self, skill_results, domain_taxonomy):
        with pytest.raises(ForeignPathError):
            coverage(skill_results, domain_taxonomy)

    def test_monotone_under_additional_mappings(self):
        rng = random.Random(5)
        t = synthetic_taxonomy(12)
        part_a = random_corpus(t, 10, rng)
        part_b = [
            synthetic_result(t, f"x{i}", [rng.randrange(12)]) for i in range(10)
        ]
        cov_a = coverage(part_a, t).coverage
        cov_union = coverage(part_a + part_b, t).coverage
        assert cov_union >= cov_a

    def test_permutation_invariance(self):
        rng = random.Random(6)
        t = synthetic_taxonomy(9)
        results = random_corpus(t, 25, rng)
        shuffled = list(results)
        rng.shuffle(shuffled)
        assert coverage(results, t) == coverage(shuffled, t)


class TestAccumulator:
    def test_incremental_equals_scratch_on_every_prefix(self):
        rng = random.Random(21)
        t = synthetic_taxonomy(14)
        results = random_corpus(t, 30, rng)
        acc = CoverageAccumulator(t)
        for i, result in enumerate(results, start=1):
            acc.add(result)
            assert acc.coverage == coverage(results[:i], t).coverage
            assert acc.covered == set(coverage(results[:i], t).covered_paths)

    def test_kind_mismatch(self, skill_results):
        t = synthetic_taxonomy(4, kind="domain")
        acc = CoverageAccumulator(t)
        with pytest.raises(ForeignPathError):
            acc.add(skill_results[0])


class TestEffort:
    def test_two_paths_same_family_count_once(self):
        t = synthetic_taxonomy(8)
        results = [synthetic_result(t, "e0", [0, 3])]  # same family f0
        dist = effort_by_node(results, t, GroupLevel.DOMAIN_FAMILY)
        assert dist.counts == {"f0": 1}
        assert dist.total_incidences == 1

    def test_two_families_both_counted(self, domain_results, domain_taxonomy):
        dist = effort_by_node(domain_results, domain_taxonomy, GroupLevel.DOMAIN_FAMILY)
        # c05 reaches business and office; every count checked by hand
        assert dist.counts == {"fam-business": 6, "fam-computer": 7, "fam-office": 5}
        assert dist.total_examples == 20

    def test_skill_leaf_level(self, skill_results, skill_taxonomy):
        dist = effort_by_node(skill_results, skill_taxonomy, GroupLevel.SKILL_LEAF)
        assert dist.group_level is GroupLevel.SKILL_LEAF
        assert sum(dist.counts.values()) == dist.total_incidences

    def test_level_kind_mismatch(self, domain_results, domain_taxonomy):
        with pytest.raises(ValueError, match="invalid for"):
            effort_by_node(domain_results, domain_taxonomy, GroupLevel.SKILL_LEAF)

    def test_effort_conservation(self, domain_results, domain_taxonomy):
        dist = effort_by_node(domain_results, domain_taxonomy, GroupLevel.DOMAIN_FAMILY)
        stats = breadth(domain_results, domain_taxonomy, GroupLevel.DOMAIN_FAMILY)
        assert dist.total_incidences == sum(stats.per_example.values())

    def test_shares_sum_to_one(self, domain_results, domain_taxonomy):
        dist = effort_by_node(domain_results, domain_taxonomy, GroupLevel.DOMAIN_FAMILY)
        assert abs(sum(dist.shares().values()) - 1.0) < 1e-9


class TestBreadth:
    def test_single_path_breadth_one(self):
        t = synthetic_taxonomy(5)
        stats = breadth([synthetic_result(t, "e0", [2])], t, GroupLevel.DOMAIN_FAMILY)
        assert stats.per_example[("synth", "e0")] == 1
        assert stats.share_exactly_one == 1.0

    def test_fixture_two_families(self, domain_results, domain_taxonomy):
        stats = breadth(domain_results, domain_taxonomy, GroupLevel.DOMAIN_FAMILY)
        # c05 reconciles (business) and refunds (office)
        assert stats.per_example[("codebench", "c05")] == 2
        assert stats.histogram == {0: 3, 1: 16, 2: 1}

    def test_zero_breadth_kept_in_denominator(self, domain_results, domain_taxonomy):
        stats = breadth(domain_results, domain_taxonomy, GroupLevel.DOMAIN_FAMILY)
        assert stats.share_zero == 3 / 20
        assert abs(
            stats.share_zero + stats.share_exactly_one + stats.share_more_than_one - 1.0
        ) < 1e-9

    def test_histogram_sums_to_examples(self, skill_results, skill_taxonomy):
        stats = breadth(skill_results, skill_taxonomy, GroupLevel.SKILL_LEAF)
        assert sum(stats.histogram.values()) == len(stats.per_example) == 20

    def test_permutation_invariance(self, domain_results, domain_taxonomy):
        shuffled = list(domain_results)
        random.Random(1).shuffle(shuffled)
        assert (
            breadth(shuffled, domain_taxonomy, GroupLevel.DOMAIN_FAMILY)
            == breadth(domain_results, domain_taxonomy, GroupLevel.DOMAIN_FAMILY)
        )
