import json
import time
from typing import Any

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(base: int, *keys: int) -> int:
    """Deterministic 64-bit child seed for (base, keys...)."""
    state = np.random.SeedSequence([int(base), *[int(k) for k in keys]]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def elapsed_ms(start: float) -> float:
    """Milliseconds since a time.perf_counter() reading."""
    return (time.perf_counter() - start) * 1000.0


def dump_json(data: Any, indent: int = 2) -> str:
    """JSON text with sorted keys; floats use the shortest round-trip repr."""
    return json.dumps(data, indent=indent, sort_keys=True)


def safe_ratio(num: float | None, den: float | None) -> float | None:
    if num is None or den is None or den == 0:
        return None
    return num / den


def parse_int_list(text: str) -> list[int]:
    """Parse '1,2,5-7' into [1, 2, 5, 6, 7]."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            values.extend(range(int(lo), int(hi) + 1))
        else:
            values.append(int(part))
    return values
