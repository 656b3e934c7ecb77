"""Counter-based random numbers keyed by (seed, event, shot).

Each noise event in a circuit gets a fixed index; the uniform consumed by
shot s at event e is a pure function of (seed, e, s).  Sampling is therefore
bit-identical however shots are partitioned into batches or threads.

The mixer is the splitmix64 finalizer applied twice, once to fold the event
into the seed and once to fold in the shot counter.  That construction
passes the usual statistical batteries for this use (independent streams
indexed by a Weyl sequence).
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U53 = np.float64(1.0 / (1 << 53))

# uint64 wraparound is the point here, not an error.
_ERRSTATE = {"over": "ignore"}


def mix64(x: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    """splitmix64 finalizer, elementwise."""
    with np.errstate(**_ERRSTATE):
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
        return x ^ (x >> np.uint64(31))


def event_key(seed: int, event: int) -> np.uint64:
    """Per-event stream key."""
    with np.errstate(**_ERRSTATE):
        return mix64(np.uint64(seed) + _GAMMA * np.uint64(event + 1))


def uniforms(seed: int, event: int, first_shot: int, count: int) -> np.ndarray:
    """Uniforms in [0, 1) for shots first_shot..first_shot+count-1."""
    key = event_key(seed, event)
    shots = np.arange(first_shot, first_shot + count, dtype=np.uint64)
    with np.errstate(**_ERRSTATE):
        h = mix64(key ^ ((shots + np.uint64(1)) * _GAMMA))
    return (h >> np.uint64(11)).astype(np.float64) * _U53
