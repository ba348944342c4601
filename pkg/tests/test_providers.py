import numpy as np
import pytest

from sapphire.errors import ProviderError, RegistryError
from sapphire.providers import (
    DecodeConfig,
    EchoGenerator,
    HashPerplexityScorer,
    LookupGenerator,
    SimilarityEmbedder,
    StubAttention,
    StubEmbedder,
    StubInfiller,
    cosine,
    load_provider,
    stable_hash,
)


class TestCosine:
    def test_identical_vectors(self):
        assert cosine([1.0, 2.0], [1.0, 2.0]) == pytest.approx(1.0)

    def test_orthogonal_unit_vectors(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_known_value(self):
        # 32 / sqrt(14 * 77)
        assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(0.9746318461970762, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine([1, 2], [1, 2, 3])

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            cosine([0.0, 0.0], [1.0, 0.0])


class TestDecodeConfig:
    def test_defaults(self):
        config = DecodeConfig()
        assert config.beam_size == 5
        assert config.length_penalty == 0.6
        assert config.max_len == 32
        assert config.min_len == 1
        assert config.early_stop is True

    def test_round_trip(self):
        config = DecodeConfig()
        assert DecodeConfig.from_dict(config.to_dict()) == config

    def test_validation(self):
        with pytest.raises(ValueError):
            DecodeConfig(beam_size=0)
        with pytest.raises(ValueError):
            DecodeConfig(min_len=10, max_len=5)


class TestRegistry:
    def test_stub_embedder(self):
        provider = load_provider({"kind": "stub-embedder", "table": {"dog": [1.0, 0.0]}})
        assert list(provider.embed("dog")) == [1.0, 0.0]

    def test_hash_ppl(self):
        provider = load_provider({"kind": "hash-ppl", "seed": 7})
        value = provider.ppl("some text")
        assert 1.0 <= value <= 100.0

    def test_unknown_kind_lists_known(self):
        with pytest.raises(RegistryError) as err:
            load_provider({"kind": "xyz"})
        assert "hash-ppl" in str(err.value)

    def test_bad_params(self):
        with pytest.raises(ProviderError):
            load_provider({"kind": "hash-ppl", "bogus": 1})


class TestStubDeterminism:
    def test_hash_scorer_repeats(self):
        scorer = HashPerplexityScorer(seed=3)
        texts = [f"text {i}" for i in range(50)]
        assert [scorer.ppl(t) for t in texts] == [scorer.ppl(t) for t in texts]

    def test_hash_scorer_formula(self):
        scorer = HashPerplexityScorer(seed=3)
        h = stable_hash("abc", 3)
        assert scorer.ppl("abc") == 1.0 + (h % 10**6) / 10**6 * 99.0

    def test_embedder_repeats(self):
        embedder = StubEmbedder(dimension=8, seed=1)
        v1, v2 = embedder.embed("hippo"), embedder.embed("hippo")
        assert np.allclose(v1, v2) and v1.shape == (8,)

    def test_similarity_embedder_exact(self):
        embedder = SimilarityEmbedder({"x": 0.9, "y": 0.4})
        axis = embedder.embed("anything-not-in-table")
        assert cosine(embedder.embed("x"), axis) == pytest.approx(0.9, abs=1e-12)
        assert cosine(embedder.embed("y"), axis) == pytest.approx(0.4, abs=1e-12)


class TestStubAttention:
    def test_rows_sum_to_one(self):
        provider = StubAttention({"w1": 3.0, "w2": 1.0})
        tokens, att, alignment = provider.attend_checked("w1 w2 w3")
        assert np.allclose(att.sum(axis=-1), 1.0)
        assert tokens == ["w1", "w2", "w3"]
        assert alignment == [[0], [1], [2]]

    def test_received_mass_ordering(self):
        provider = StubAttention({"w1": 3.0, "w2": 1.0, "w3": 2.0})
        _, att, alignment = provider.attend_checked("w1 w2 w3")
        received = {}
        for w, pieces in enumerate(alignment):
            others = [i for i in range(att.shape[1]) if i not in pieces]
            received[w] = att[:, others, :][:, :, pieces].sum()
        assert received[0] > received[2] > received[1]

    def test_subword_split_alignment(self):
        provider = StubAttention({}, split_words={"running": 3})
        tokens, att, alignment = provider.attend_checked("dog running fast")
        assert alignment == [[0], [1, 2, 3], [4]]
        assert att.shape == (2, 5, 5)

    def test_row_drift_rejected(self):
        class Broken(StubAttention):
            def attend(self, sentence):
                tokens, att, alignment = super().attend(sentence)
                att = att.copy()
                att[..., 0] += 0.5
                return tokens, att, alignment

        with pytest.raises(ProviderError):
            Broken({}).attend_checked("a b c")

    def test_small_drift_renormalized(self):
        class Drifting(StubAttention):
            def attend(self, sentence):
                tokens, att, alignment = super().attend(sentence)
                return tokens, att * (1 + 5e-5), alignment

        _, att, _ = Drifting({}).attend_checked("a b c")
        assert np.allclose(att.sum(axis=-1), 1.0)


class TestGeneratorsAndInfillers:
    def test_echo_strips_separators(self):
        generator = EchoGenerator()
        out = generator.generate("a b <s> c d", DecodeConfig())
        assert out == "a b c d"

    def test_echo_respects_max_len(self):
        generator = EchoGenerator()
        out = generator.generate(" ".join(["w"] * 100), DecodeConfig(max_len=5))
        assert len(out.split()) == 5

    def test_lookup_generator(self):
        generator = LookupGenerator({"in": "out"})
        assert generator.generate("in", DecodeConfig()) == "out"
        with pytest.raises(ProviderError):
            generator.generate("unseen", DecodeConfig())

    def test_stub_infiller_empty_filler(self):
        infiller = StubInfiller("")
        assert infiller.infill("<mask> a <mask> b <mask>") == "a b"

    def test_stub_infiller_keeps_elements(self):
        infiller = StubInfiller("so")
        out = infiller.infill("<mask> dog runs <mask> park <mask>")
        assert "dog runs" in out and "park" in out
