"""Text reuse detection over gapped word windows."""

import json

try:
    from ._palimpsest import (
        DataError,
        UsageError,
        analyze,
        enumerate_windows,
        f_beta,
        normalize_text,
        run_cli,
        stem,
        window_count,
    )
    from ._palimpsest import detect_json as _detect_json
except ImportError:  # in-tree build: extension next to the package
    from _palimpsest import (  # type: ignore[no-redef]
        DataError,
        UsageError,
        analyze,
        enumerate_windows,
        f_beta,
        normalize_text,
        run_cli,
        stem,
        window_count,
    )
    from _palimpsest import detect_json as _detect_json  # type: ignore[no-redef]


def detect(text_a, text_b, **params):
    """Pair report for two texts, as a dict."""
    return json.loads(_detect_json(text_a, text_b, **params))


__all__ = [
    "DataError",
    "UsageError",
    "analyze",
    "detect",
    "enumerate_windows",
    "f_beta",
    "normalize_text",
    "run_cli",
    "stem",
    "window_count",
]
