"""
Seed derivation: one global seed fans out into independent per-component streams
"""

import hashlib

import numpy as np


def tag_digest(tag: str) -> int:
    """Stable 64-bit integer for a component tag"""
    return int.from_bytes(hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest(), "big")


def derive_seed(global_seed: int, tag: str) -> int:
    """Seed for the component named `tag` under `global_seed`"""
    sequence = np.random.SeedSequence([int(global_seed), tag_digest(tag)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(global_seed: int, tag: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(global_seed, tag))
