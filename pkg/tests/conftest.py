import random

import pytest

from sapphire.corpus import ConceptSet, Example, build_splits, paper_split_specs, write_corpus

WORD_BANK = [
    "dog", "cat", "ball", "run", "jump", "throw", "catch", "river", "mountain",
    "walk", "sing", "dance", "table", "chair", "window", "garden", "drive",
    "boat", "lake", "field", "play", "climb", "swim", "read", "write", "cook",
    "paint", "wall", "hang", "wait", "sheep", "herd", "ride", "camel", "desert",
]

FILLER = ["the", "a", "on", "near", "with", "and", "then", "while", "quietly", "slowly"]


def make_example(idx, rng, size=None):
    size = size or rng.choice([3, 4, 5])
    concepts = rng.sample(WORD_BANK, size)
    refs = []
    for _ in range(rng.randint(1, 3)):
        words = []
        for c in concepts:
            words.append(c)
            words.append(rng.choice(FILLER))
        rng.shuffle(words)
        refs.append(" ".join(words) + ".")
    return Example(f"ex{idx}", ConceptSet(tuple(concepts)), tuple(refs))


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def toy_examples(rng):
    return [make_example(i, rng) for i in range(8)]


def build_dev_o_corpus(path, seed=13):
    """Synthetic pool shaped like the original dev split.

    993 sets (493/250/250 by size) and 4018 sentences, with reference
    counts distributed so the seeded re-carved splits land on the
    expected sentence totals (984 dev / 1583 test) exactly.
    """
    skeleton = []
    idx = 0
    for size, count in ((3, 493), (4, 250), (5, 250)):
        for _ in range(count):
            concepts = tuple(f"c{idx}x{j}" for j in range(size))
            skeleton.append(Example(f"dev{idx}", ConceptSet(concepts), ("placeholder",)))
            idx += 1
    dev_spec, test_spec = paper_split_specs(seed=seed)
    dev, test = build_splits(skeleton, dev_spec, test_spec)
    dev_ids = [e.id for e in dev]
    test_ids = [e.id for e in test]
    rest_ids = [e.id for e in skeleton if e.id not in set(dev_ids) | set(test_ids)]

    ref_count = {}
    for i, ex_id in enumerate(dev_ids):          # 216*4 + 24*5 = 984
        ref_count[ex_id] = 4 if i < 216 else 5
    for i, ex_id in enumerate(test_ids):         # 217*4 + 143*5 = 1583
        ref_count[ex_id] = 4 if i < 217 else 5
    for i, ex_id in enumerate(rest_ids):         # 272*4 + 121*3 = 1451
        ref_count[ex_id] = 4 if i < 272 else 3

    examples = [
        Example(
            ex.id,
            ex.concept_set,
            tuple(f"reference {j} of {ex.id}" for j in range(ref_count[ex.id])),
        )
        for ex in skeleton
    ]
    write_corpus(examples, path)
    return path
