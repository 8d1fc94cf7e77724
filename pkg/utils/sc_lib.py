"""
Core utility functions shared across the simplicial sampling code.
Seed splitting, stable hashing and number formatting for result files.
"""

import json
import hashlib
from typing import Any, Iterable

import numpy as np

# Purpose codes of the seed splitting rule
SEED_SYNTHESIS = 1
SEED_NOISE = 2
SEED_SAMPLING = 3
SEED_DATASET = 4

PURPOSES = {
    "synthesis": SEED_SYNTHESIS,
    "noise": SEED_NOISE,
    "sampling": SEED_SAMPLING,
    "dataset": SEED_DATASET,
}


def sub_seed(master_seed: int, purpose: str, *index: int) -> np.random.SeedSequence:
    """Derive the seed for one purpose of one experiment cell.

    The rule is SeedSequence([master, purpose code, *index]), so every
    (purpose, index) pair draws from its own stream and adding trials never
    shifts the streams of earlier trials.
    """
    if purpose not in PURPOSES:
        raise KeyError(f"Unknown seed purpose: {purpose}")
    return np.random.SeedSequence([int(master_seed), PURPOSES[purpose], *[int(i) for i in index]])


def make_rng(seed) -> np.random.Generator:
    """Generator from an int, a SeedSequence or an existing Generator"""
    return np.random.default_rng(seed)


def seed_label(seed) -> Any:
    """JSON friendly description of a seed argument"""
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": seed.entropy, "spawn_key": list(seed.spawn_key)}
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    return None


def format_float(value: float) -> str:
    """Round-trip exact float text, identical across runs"""
    return repr(float(value))


def format_row(values: Iterable) -> str:
    parts = []
    for value in values:
        if isinstance(value, (float, np.floating)):
            parts.append(format_float(value))
        else:
            parts.append(str(value))
    return ",".join(parts)


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def stable_hash(data: Any) -> str:
    """sha256 of the canonical JSON text of data"""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def to_jsonable(value: Any) -> Any:
    """Convert numpy containers and scalars for json.dump"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value
