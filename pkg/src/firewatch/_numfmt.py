"""Round-trip decimal rendering shared by the text formats.

Every file this package writes (wire frames, dataset CSVs, model files)
renders reals so that parsing the text back yields the identical float.
"""

from __future__ import annotations


def format_float(value: float) -> str:
    """Shortest decimal form of ``value`` that parses back bit-identically.

    Python's ``repr`` already emits the shortest round-trip digits; the
    one cosmetic adjustment is dropping a trailing ``.0`` so integral
    values read like the sensor firmware prints them (``670``, not
    ``670.0``). Callers must reject non-finite values beforehand.
    """
    text = repr(float(value))
    if text.endswith(".0"):
        return text[:-2]
    return text
