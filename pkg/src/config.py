import os
from pathlib import Path

RESULTS_PATH = Path(os.getenv("RESULTS_PATH", "results"))

# Run history database (unset: no history is written).
RESULTS_DATABASE_URL = os.getenv("RESULTS_DATABASE_URL")

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

DEFAULT_STRUCTURES = (
    "learned_treap",
    "shuffled_learned_treap",
    "random_treap",
    "splay",
    "red_black",
)


def _parse_int(env_val: str | None, default: int, minimum: int = 0) -> int:
    if not env_val:
        return default
    try:
        value = int(env_val.strip(), 0)
    except ValueError:
        # ignore invalid values
        return default
    return value if value >= minimum else default


def _parse_structures(env_val: str | None):
    if not env_val:
        return DEFAULT_STRUCTURES
    parts = [p.strip() for p in env_val.split(",") if p.strip()]
    result = tuple(p for p in parts if p in DEFAULT_STRUCTURES)
    return result or DEFAULT_STRUCTURES


BENCH_SEED = _parse_int(os.getenv("BENCH_SEED"), 0)
BENCH_TRIALS = _parse_int(os.getenv("BENCH_TRIALS"), 30, minimum=1)
THEORY_TRIALS = _parse_int(os.getenv("THEORY_TRIALS"), 300, minimum=1)
BENCH_WORKERS = _parse_int(os.getenv("BENCH_WORKERS"), 1, minimum=1)
BENCH_STRUCTURES = _parse_structures(os.getenv("BENCH_STRUCTURES"))
# 2^61 - 1 unless overridden; accepts hex ("0x...") as well.
HASH_PRIME = _parse_int(os.getenv("HASH_PRIME"), (1 << 61) - 1, minimum=2)
