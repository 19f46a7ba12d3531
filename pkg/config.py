"""Configuration settings for ProgMon."""
import os
from dotenv import load_dotenv

load_dotenv()


def _int_setting(name: str, default: int) -> int:
    raw = os.getenv(name, str(default)).strip()
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


# Table Configuration
# 3^12 rows is the largest table we are willing to materialize
TABLE_VARIABLE_CAP = _int_setting("PROGMON_TABLE_CAP", 12)
DEFAULT_COUNT_MODE = os.getenv("PROGMON_COUNT_MODE", "step").strip().lower()
if DEFAULT_COUNT_MODE not in ("step", "full"):
    raise ValueError(f"PROGMON_COUNT_MODE must be 'step' or 'full', got {DEFAULT_COUNT_MODE!r}")
# Obligations reached during a run get their own trigger table up to this size
TRIGGER_SYNTH_CAP = _int_setting("PROGMON_TRIGGER_CAP", 8)
# Memoized tables; only tables within the trigger cap are kept
TABLE_CACHE_SIZE = _int_setting("PROGMON_TABLE_CACHE", 16)

# Logging Configuration
LOG_LEVEL = os.getenv("PROGMON_LOG_LEVEL", "INFO").strip().upper()
LOG_FORMAT = os.getenv("PROGMON_LOG_FORMAT", "plain").strip().lower()

# Bit accounting for run metrics
MSG_HEADER_BITS = 8
FORMULA_NODE_BITS = 8
KNOWLEDGE_ENTRY_BITS = 2

# Benchmark defaults
BENCH_COUNT = _int_setting("PROGMON_BENCH_COUNT", 200)
BENCH_PROCESSES = _int_setting("PROGMON_BENCH_PROCESSES", 3)
BENCH_TRACE_LENGTH = _int_setting("PROGMON_BENCH_TRACE_LENGTH", 50)
BENCH_ATOMS_PER_PROCESS = _int_setting("PROGMON_BENCH_ATOMS_PER_PROCESS", 2)
BENCH_WORKERS = _int_setting("PROGMON_BENCH_WORKERS", 1)

# API Configuration
PORT = _int_setting("PORT", 8080)
API_DOCS = os.getenv("PROGMON_API_DOCS", "1").strip() not in ("0", "false", "no")
