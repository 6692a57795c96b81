import hashlib
from typing import Union

import numpy as np

Key = Union[str, int, float]


def _key_entropy(key: Key) -> int:
    digest = hashlib.sha256(str(key).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_seed_sequence(seed: int, *keys: Key) -> np.random.SeedSequence:
    """SeedSequence for (seed, *keys); the same keys always give the same stream."""
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFF, *(_key_entropy(k) for k in keys)])


def derive_rng(seed: int, *keys: Key) -> np.random.Generator:
    return np.random.default_rng(derive_seed_sequence(seed, *keys))


def derive_int(seed: int, *keys: Key) -> int:
    """Child integer seed, used for per-recording seeds stored in manifests."""
    return int(derive_seed_sequence(seed, *keys).generate_state(1, dtype=np.uint32)[0])
