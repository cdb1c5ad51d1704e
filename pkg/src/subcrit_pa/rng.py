"""Seed handling.

All randomness goes through :class:`numpy.random.Generator` on a Philox
bit generator (counter-based, 64-bit). Replica seeds are derived from a
stable hash so they do not depend on scheduling or on ``PYTHONHASHSEED``.
"""
import hashlib

import numpy as np


def make_rng(seed):
    """Return a Philox-backed Generator; an existing Generator passes through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("an explicit seed is required")
    return np.random.Generator(np.random.Philox(int(seed)))


def derive_seed(master_seed, task_id, index):
    """64-bit seed for replica ``index`` of ``task_id``."""
    key = f"{int(master_seed)}:{task_id}:{int(index)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def seed_record(seed):
    """JSON-friendly description of what was passed as a seed."""
    if isinstance(seed, np.random.Generator):
        return "generator"
    return int(seed)
