import json
import random

import pytest

from sapphire.corpus import (
    ConceptSet,
    Example,
    SplitSpec,
    build_splits,
    load_corpus,
    paper_split_specs,
    split_stats,
    write_corpus,
)
from sapphire.errors import CapacityError, CorpusValidationError, ParseError


def make_pool(sizes, refs_per=2):
    examples = []
    bank = [f"w{i}" for i in range(40)]
    rng = random.Random(7)
    for i, size in enumerate(sizes):
        concepts = tuple(rng.sample(bank, size))
        refs = tuple(f"sentence {i} number {j}" for j in range(refs_per))
        examples.append(Example(f"id{i}", ConceptSet(concepts), refs))
    return examples


class TestTypes:
    def test_rejects_duplicate_concepts(self):
        with pytest.raises(CorpusValidationError):
            ConceptSet(("dog", "Dog"))

    def test_rejects_whitespace_concept(self):
        with pytest.raises(CorpusValidationError):
            ConceptSet(("two words",))

    def test_rejects_empty_reference(self):
        with pytest.raises(CorpusValidationError):
            Example("x", ConceptSet(("dog",)), ("",))

    def test_split_spec_names(self):
        with pytest.raises(CorpusValidationError):
            SplitSpec("weird", {3: 1})
        spec = SplitSpec("dev_CG", {3: 2, 4: 1})
        assert spec.total == 3


class TestLoadCorpus:
    def test_round_trip_single_record(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id":"a1","concepts":["dog","run"],"references":["A dog runs."]}\n')
        examples = load_corpus(path)
        assert len(examples) == 1
        assert examples[0].id == "a1"
        assert examples[0].concepts == ("dog", "run")
        assert examples[0].references == ("A dog runs.",)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("")
        assert load_corpus(path) == []

    def test_missing_references_is_parse_error(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id":"a1","concepts":["dog"]}\n')
        with pytest.raises(ParseError) as err:
            load_corpus(path)
        assert ":1" in str(err.value)

    def test_bad_json_names_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id":"a1","concepts":["dog"],"references":["x"]}\n{oops\n')
        with pytest.raises(ParseError) as err:
            load_corpus(path)
        assert ":2" in str(err.value)

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        line = '{"id":"a1","concepts":["dog"],"references":["x"]}\n'
        path.write_text(line + line)
        with pytest.raises(CorpusValidationError):
            load_corpus(path)

    def test_concepts_lowercased_on_load(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id":"a1","concepts":["Dog","RUN"],"references":["x"]}\n')
        assert load_corpus(path)[0].concepts == ("dog", "run")

    def test_write_then_load_round_trip(self, tmp_path):
        examples = make_pool([3, 4, 5, 3])
        path = tmp_path / "c.jsonl"
        write_corpus(examples, path)
        assert split_stats(load_corpus(path)) == split_stats(examples)


class TestBuildSplits:
    def test_paper_counts(self):
        pool = make_pool([3] * 493 + [4] * 250 + [5] * 250)
        dev_spec, test_spec = paper_split_specs(seed=13)
        dev, test = build_splits(pool, dev_spec, test_spec)
        assert split_stats(dev)[3] == 120
        assert split_stats(dev)[4] == 60
        assert split_stats(dev)[5] == 60
        assert split_stats(test).get(3, 0) == 0
        assert split_stats(test)[4] == 180
        assert split_stats(test)[5] == 180

    def test_all_zero_specs(self):
        pool = make_pool([3, 4, 5])
        dev, test = build_splits(pool, SplitSpec("dev_CG", {}), SplitSpec("test_CG", {}))
        assert dev == [] and test == []

    def test_capacity_error_reports_deficit(self):
        pool = make_pool([5] * 250)
        with pytest.raises(CapacityError) as err:
            build_splits(pool, SplitSpec("dev_CG", {5: 500}), SplitSpec("test_CG", {}))
        assert err.value.requested == 500
        assert err.value.available == 250

    def test_deterministic_given_seed(self):
        pool = make_pool([3] * 30 + [4] * 30)
        dev_spec = SplitSpec("dev_CG", {3: 10, 4: 5}, seed=99)
        test_spec = SplitSpec("test_CG", {3: 5, 4: 10}, seed=99)
        first = build_splits(pool, dev_spec, test_spec)
        second = build_splits(pool, dev_spec, test_spec)
        assert [e.id for e in first[0]] == [e.id for e in second[0]]
        assert [e.id for e in first[1]] == [e.id for e in second[1]]

    def test_disjoint_and_exact_counts_random_specs(self):
        rng = random.Random(5)
        for trial in range(20):
            sizes = [rng.choice([3, 4, 5]) for _ in range(rng.randint(30, 60))]
            pool = make_pool(sizes)
            available = split_stats(pool)
            counts_dev, counts_test = {}, {}
            for size in (3, 4, 5):
                have = available.get(size, 0)
                counts_dev[size] = rng.randint(0, have)
                counts_test[size] = rng.randint(0, have - counts_dev[size])
            dev, test = build_splits(
                pool,
                SplitSpec("dev_CG", counts_dev, seed=trial),
                SplitSpec("test_CG", counts_test, seed=trial),
            )
            assert not {e.id for e in dev} & {e.id for e in test}
            for size in (3, 4, 5):
                assert split_stats(dev).get(size, 0) == counts_dev[size]
                assert split_stats(test).get(size, 0) == counts_test[size]

    def test_seed_changes_membership(self):
        pool = make_pool([3] * 40)
        spec_a = SplitSpec("dev_CG", {3: 10}, seed=1)
        spec_b = SplitSpec("dev_CG", {3: 10}, seed=2)
        dev_a, _ = build_splits(pool, spec_a, SplitSpec("test_CG", {}, seed=1))
        dev_b, _ = build_splits(pool, spec_b, SplitSpec("test_CG", {}, seed=2))
        assert [e.id for e in dev_a] != [e.id for e in dev_b]


class TestSplitStats:
    def test_empty(self):
        assert split_stats([]) == {"total_sets": 0, "total_sentences": 0}

    def test_sentence_sum(self):
        examples = make_pool([3, 5], refs_per=1)
        examples = [
            Example("a", ConceptSet(("x", "y", "z")), ("r1", "r2", "r3")),
            Example("b", ConceptSet(("q", "w", "e", "r", "t")), ("s1", "s2", "s3", "s4", "s5")),
        ]
        stats = split_stats(examples)
        assert stats["total_sentences"] == 8
        assert stats[3] == 1 and stats[5] == 1

    def test_dev_o_shape(self):
        pool = make_pool([3] * 493 + [4] * 250 + [5] * 250, refs_per=4)
        stats = split_stats(pool)
        assert stats[3] == 493 and stats[4] == 250 and stats[5] == 250
        assert stats["total_sets"] == 993
