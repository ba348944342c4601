"""Training-config emission for an external fine-tuning harness.

The toolkit does not run gradient training; it emits the per-profile
hyperparameters (batch size, warmup steps, per-method learning rate),
the shared decode defaults, and the epoch-selection rule for an outside
trainer to consume.
"""

from __future__ import annotations

from .errors import SapphireError
from .providers import DecodeConfig

PROFILES = ("bart-base", "bart-large", "t5-base", "t5-large")
TRAIN_METHODS = ("baseline", "kw", "att", "p2t")

_BATCH = {"bart-base": 128, "t5-base": 128, "bart-large": 32, "t5-large": 16}
_WARMUP = {"bart-base": 400, "t5-base": 400, "t5-large": 400, "bart-large": 500}

# learning rate per (profile, method): {baseline, kw, att, p2t}
_LR = {
    "bart-base": {"baseline": 3e-05, "kw": 2e-05, "att": 3e-05, "p2t": 1e-05},
    "bart-large": {"baseline": 3e-05, "kw": 2e-05, "att": 2e-05, "p2t": 5e-06},
    "t5-base": {"baseline": 5e-05, "kw": 5e-05, "att": 5e-05, "p2t": 1e-05},
    "t5-large": {"baseline": 2e-05, "kw": 2e-05, "att": 2e-05, "p2t": 5e-06},
}


def emit_training_config(model_profile: str, method: str) -> dict:
    """Hyperparameter block for one (model profile, method) run."""
    profile = model_profile.lower()
    method = method.lower()
    if profile not in PROFILES:
        raise SapphireError(f"unknown model profile {model_profile!r}; known: {', '.join(PROFILES)}")
    if method not in TRAIN_METHODS:
        raise SapphireError(
            f"method {method!r} has no training stage; known: {', '.join(TRAIN_METHODS)}"
        )
    return {
        "model_profile": profile,
        "method": method,
        "learning_rate": _LR[profile][method],
        "batch_size": _BATCH[profile],
        "warmup_steps": _WARMUP[profile],
        "seeds_per_model": 2,
        "decode": DecodeConfig().to_dict(),
        "epoch_selection": {"metric": "rouge-2", "split": "dev", "rule": "argmax, earliest on ties"},
    }
