"""SAPPHIRE: set augmentation and post-hoc phrase infilling/recombination.

A concept-to-text experimentation toolkit: corpus split construction,
concept-set augmentation, keyphrase extraction and recombination,
perplexity-guided mask infilling, and the evaluation / statistics
machinery to compare methods.  All neural-model access sits behind
pluggable provider interfaces with deterministic stubs.
"""

__version__ = "0.1.0"
