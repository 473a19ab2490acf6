"""LSTM kernel backend selection.

The compiled extension (``_lstm_cy``) and the numpy module (``_lstm_np``)
implement the identical interface. The compiled one is preferred when it
imported successfully; ``UNRAVEL_BACKEND=py`` or ``=cy`` forces a choice
(forcing ``cy`` raises if the extension is unavailable). Both backends
are deterministic run-to-run, but they are distinct floating-point
programs, so trained parameters are bit-reproducible only within one
backend.
"""

from __future__ import annotations

import os

_requested = os.environ.get("UNRAVEL_BACKEND", "").strip().lower()
if _requested not in ("", "cy", "py"):
    raise ImportError(
        f"UNRAVEL_BACKEND must be 'cy' or 'py', not {_requested!r}"
    )

if _requested == "py":
    from . import _lstm_np as _impl

    BACKEND = "py"
else:
    try:
        from . import _lstm_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cy"
    except ImportError:
        if _requested == "cy":
            raise
        from . import _lstm_np as _impl

        BACKEND = "py"

lstm_forward = _impl.lstm_forward
lstm_backward = _impl.lstm_backward
