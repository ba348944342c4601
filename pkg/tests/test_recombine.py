import pytest

from sapphire.corpus import ConceptSet, Example
from sapphire.errors import CorpusValidationError, MissingIdError, ProviderError
from sapphire.evaluation.metrics import coverage
from sapphire.keyphrase import RecombinedInput
from sapphire.recombine import (
    SEPARATOR,
    build_p2t_infer,
    build_p2t_train,
    p2t_generate,
)
from sapphire.providers import DecodeConfig, EchoGenerator, LookupGenerator


def rec(ex_id, elements, origin="reference"):
    return RecombinedInput(ex_id, tuple(elements), origin)


def ex(ex_id, concepts, references):
    return Example(ex_id, ConceptSet(tuple(concepts)), tuple(references))


class TestBuildP2TTrain:
    def test_two_element_order_fixed_per_seed(self):
        inputs = [rec("a", ["A", "B"])]
        examples = [ex("a", ["x"], ["ref one"])]
        first = build_p2t_train(inputs, examples, seed=5)
        second = build_p2t_train(inputs, examples, seed=5)
        assert first[0].input_text in ("A <s> B", "B <s> A")
        assert first[0].input_text == second[0].input_text

    def test_single_element_no_separator(self):
        records = build_p2t_train([rec("a", ["only"])], [ex("a", ["x"], ["r"])], seed=1)
        assert records[0].input_text == "only"
        assert SEPARATOR not in records[0].input_text

    def test_record_per_reference(self):
        examples = [ex("a", ["x"], ["r1", "r2", "r3"]), ex("b", ["y"], ["s1"])]
        inputs = [rec("a", ["A", "B"]), rec("b", ["C"])]
        records = build_p2t_train(inputs, examples, seed=2)
        assert len(records) == 4
        assert [r.target for r in records] == ["r1", "r2", "r3", "s1"]
        # all references of one example share the permutation
        assert len({r.input_text for r in records if r.id == "a"}) == 1

    def test_missing_example_id(self):
        with pytest.raises(MissingIdError):
            build_p2t_train([rec("ghost", ["A"])], [ex("a", ["x"], ["r"])], seed=1)

    def test_both_orders_occur_over_seeds(self):
        inputs = [rec("a", ["A", "B"])]
        examples = [ex("a", ["x"], ["r"])]
        identity = 0
        trials = 1000
        for seed in range(trials):
            records = build_p2t_train(inputs, examples, seed=seed)
            if records[0].input_text == "A <s> B":
                identity += 1
        assert 0.4 <= identity / trials <= 0.6

    def test_separator_collision_rejected(self):
        with pytest.raises(CorpusValidationError):
            build_p2t_train([rec("a", ["bad <s> element", "B"])], [ex("a", ["x"], ["r"])], seed=1)


class TestBuildP2TInfer:
    def test_targets_absent(self):
        records = build_p2t_infer([rec("a", ["A"]), rec("b", ["B", "C"]), rec("c", ["D"])], seed=3)
        assert len(records) == 3
        assert all(r.target is None for r in records)
        assert all("target" not in r.to_record() for r in records)

    def test_deterministic(self):
        inputs = [rec("a", ["A", "B", "C"])]
        assert build_p2t_infer(inputs, seed=9) == build_p2t_infer(inputs, seed=9)

    def test_round_trip_split(self):
        inputs = [rec("a", ["two words", "B", "three more words"])]
        record = build_p2t_infer(inputs, seed=4)[0]
        assert sorted(record.elements()) == sorted(["two words", "B", "three more words"])
        assert [record.elements()[i] for i in range(len(record.permutation))] == [
            inputs[0].elements[j] for j in record.permutation
        ]

    def test_coverage_preserved_in_input_text(self):
        concepts = ("boat", "lake", "drive")
        record = build_p2t_infer([rec("a", ["boat on the lake", "drive"])], seed=8)[0]
        assert coverage(concepts, record.input_text) == 100.0

    def test_train_infer_count_contract(self):
        examples = [ex("a", ["x"], ["r1", "r2"]), ex("b", ["y"], ["s1", "s2", "s3"])]
        inputs = [rec("a", ["A"]), rec("b", ["B"])]
        assert len(build_p2t_train(inputs, examples, seed=1)) == 5
        assert len(build_p2t_infer(inputs, seed=1)) == 2


class TestP2TGenerate:
    def test_echo_strips_separator(self):
        records = build_p2t_infer([rec("a", ["A B", "C"])], seed=2)
        outputs = p2t_generate(records, EchoGenerator())
        assert outputs[0][0] == "a"
        assert sorted(outputs[0][1].split()) == ["A", "B", "C"]

    def test_empty_records(self):
        assert p2t_generate([], EchoGenerator()) == []

    def test_memorized_pairs(self):
        records = build_p2t_infer([rec(f"m{i}", [f"elem{c}"]) for i, c in enumerate("abcde")], seed=1)
        table = {r.input_text: f"memorized {r.id}" for r in records}
        outputs = p2t_generate(records, LookupGenerator(table))
        assert [o for _, o in outputs] == [f"memorized m{i}" for i in range(5)]

    def test_provider_error_carries_id(self):
        records = build_p2t_infer([rec("failing", ["A"])], seed=1)
        with pytest.raises(ProviderError):
            p2t_generate(records, LookupGenerator({}))

    def test_decode_max_len_respected(self):
        records = build_p2t_infer([rec("a", [" ".join(["w"] * 50)])], seed=1)
        outputs = p2t_generate(records, EchoGenerator(), DecodeConfig(max_len=4))
        assert len(outputs[0][1].split()) == 4
