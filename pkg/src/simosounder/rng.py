"""Counter-based random streams keyed by simulation coordinates.

Every stochastic draw in the simulator comes from a Philox generator whose
128-bit key packs (seed, interval, snapshot, element, ray, purpose). Streams
with distinct keys are independent, so snapshots can be generated in any
order or on any number of threads without changing a single bit of output.
"""

import numpy as np

PURPOSE_FADING = 0
PURPOSE_NOISE = 1

_SNAPSHOT_BITS = 28
_ELEMENT_BITS = 8
_RAY_BITS = 8
_PURPOSE_BITS = 8
_INTERVAL_BITS = 64 - _SNAPSHOT_BITS - _ELEMENT_BITS - _RAY_BITS - _PURPOSE_BITS

_FIELD_LIMITS = {
    "interval": 1 << _INTERVAL_BITS,
    "snapshot": 1 << _SNAPSHOT_BITS,
    "element": 1 << _ELEMENT_BITS,
    "ray": 1 << _RAY_BITS,
    "purpose": 1 << _PURPOSE_BITS,
}


def stream_key(seed: int, interval: int, snapshot: int, element: int,
               ray: int = 0, purpose: int = PURPOSE_FADING) -> tuple:
    """Pack stream coordinates into the two 64-bit Philox key words."""
    fields = {
        "interval": interval,
        "snapshot": snapshot,
        "element": element,
        "ray": ray,
        "purpose": purpose,
    }
    for name, value in fields.items():
        if not 0 <= value < _FIELD_LIMITS[name]:
            raise ValueError(
                f"{name}={value} outside [0, {_FIELD_LIMITS[name]}) for keyed stream"
            )
    word0 = int(seed) & 0xFFFFFFFFFFFFFFFF
    word1 = (
        (interval << (_SNAPSHOT_BITS + _ELEMENT_BITS + _RAY_BITS + _PURPOSE_BITS))
        | (snapshot << (_ELEMENT_BITS + _RAY_BITS + _PURPOSE_BITS))
        | (element << (_RAY_BITS + _PURPOSE_BITS))
        | (ray << _PURPOSE_BITS)
        | purpose
    )
    return word0, word1


def stream(seed: int, interval: int, snapshot: int, element: int,
           ray: int = 0, purpose: int = PURPOSE_FADING) -> np.random.Generator:
    """Generator for one (seed, interval, snapshot, element, ray, purpose) cell."""
    key = np.array(stream_key(seed, interval, snapshot, element, ray, purpose),
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
