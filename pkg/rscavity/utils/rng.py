# rscavity/utils/rng.py

"""
Named, counter-based random substreams and the Poisson samplers.

Every random object in the package is drawn from ``substream(seed, *keys)``:
a Philox generator keyed by the user seed plus a tuple of names/indices.
Two calls with the same keys see the same stream no matter which thread
runs them or in what order, which is what makes outputs independent of
the thread count.
"""

import zlib
from typing import Optional, Union

import numpy as np
from scipy.stats import poisson

from .errors import InputError

# Below this mean Poisson variates come from inversion of the CDF,
# at or above it from numpy's rejection sampler.
POISSON_INVERSION_LIMIT = 30.0

Key = Union[int, str, float]


def _key_to_int(key: Key) -> int:
    if isinstance(key, (bool, np.bool_)):
        return int(key)
    if isinstance(key, (int, np.integer)):
        if key < 0:
            return zlib.crc32(f"neg:{int(key)}".encode("utf-8"))
        return int(key)
    if isinstance(key, float):
        key = repr(key)
    return zlib.crc32(str(key).encode("utf-8"))


def substream(seed: int, *keys: Key) -> np.random.Generator:
    """Generator for the substream named ``keys`` under ``seed``."""
    if int(seed) < 0:
        raise InputError(f"seed must be non-negative, got {seed}")
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key_to_int(k) for k in keys))
    return np.random.Generator(np.random.Philox(seq))


def sample_poisson(rng: np.random.Generator, lam: float, size: Optional[int] = None):
    """Po(lam) variates; scalar int when ``size`` is None."""
    if lam < 0 or not np.isfinite(lam):
        raise InputError(f"Poisson mean must be finite and non-negative, got {lam}")
    if lam == 0:
        return 0 if size is None else np.zeros(size, dtype=np.int64)
    if lam < POISSON_INVERSION_LIMIT:
        u = rng.random(size)
        # ppf(0) is -1 by scipy's convention
        values = np.maximum(poisson.ppf(u, lam), 0).astype(np.int64)
    else:
        values = np.asarray(rng.poisson(lam, size), dtype=np.int64)
    return int(values) if size is None else values


def sample_positive_poisson(rng: np.random.Generator, lam: float, size: int) -> np.ndarray:
    """Po(lam) conditioned on being at least 1, by inversion on the upper tail."""
    if lam <= 0 or not np.isfinite(lam):
        raise InputError(f"zero-truncated Poisson needs a positive mean, got {lam}")
    p0 = np.exp(-lam)
    u = p0 + (1.0 - p0) * rng.random(size)
    return np.maximum(poisson.ppf(u, lam), 1).astype(np.int64)
