"""Delimiter-framed text protocol for sensor readings.

A frame is ``*<temperature>,<smoke>,<flame>#``. The parser scans for the
first ``*`` and the first ``#`` and ignores everything outside them, so a
whole HTTP response body can be fed in without any preprocessing. This
module is the single source of truth for the frame layout; the device
simulator emits frames with :func:`format_reading` and the receptor decodes
them with :func:`parse_reading`.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from ._numfmt import format_float
from .errors import ArityError, FrameError, InvalidInputError, NumericError

FRAME_START = "*"
FRAME_END = "#"
FIELD_SEPARATOR = ","

_FIELD_NAMES = ("temperature", "smoke", "flame")


class SensorReading(NamedTuple):
    """One raw telemetry triple, in native device units."""

    temperature: float
    smoke: float
    flame: float


def parse_reading(msg: str) -> SensorReading:
    """Extract the reading framed between the first ``*`` and the first ``#``.

    Raises:
        FrameError: either delimiter is missing, or ``#`` precedes ``*``.
        ArityError: the payload does not split into exactly three fields.
        NumericError: a field is not a finite decimal number.
    """
    start = msg.find(FRAME_START)
    end = msg.find(FRAME_END)
    if start < 0 and end < 0:
        raise FrameError("no frame delimiters '*' and '#' in message", raw=msg)
    if start < 0:
        raise FrameError("frame start '*' missing from message", raw=msg)
    if end < 0:
        raise FrameError("frame end '#' missing from message", raw=msg)
    if end < start:
        raise FrameError("frame end '#' appears before frame start '*'", raw=msg)

    fields = msg[start + 1 : end].split(FIELD_SEPARATOR)
    if len(fields) != len(_FIELD_NAMES):
        raise ArityError(
            f"expected {len(_FIELD_NAMES)} comma-separated fields, got {len(fields)}",
            raw=msg,
        )

    values = []
    for name, field in zip(_FIELD_NAMES, fields):
        text = field.strip()
        try:
            value = float(text)
        except ValueError:
            raise NumericError(f"{name} field {text!r} is not a number", raw=msg) from None
        if not math.isfinite(value):
            raise NumericError(f"{name} field {text!r} is not finite", raw=msg)
        values.append(value)
    return SensorReading(*values)


def format_reading(reading: SensorReading | tuple[float, float, float]) -> str:
    """Render a reading as a wire frame, inverse of :func:`parse_reading`.

    Values are written in round-trip precision, so
    ``parse_reading(format_reading(r)) == r`` exactly for finite readings.
    """
    values = tuple(reading)
    if len(values) != len(_FIELD_NAMES):
        raise InvalidInputError(f"a reading has {len(_FIELD_NAMES)} fields, got {len(values)}")
    for name, value in zip(_FIELD_NAMES, values):
        if not math.isfinite(value):
            raise InvalidInputError(f"{name} value {value!r} is not finite")
    body = FIELD_SEPARATOR.join(format_float(v) for v in values)
    return f"{FRAME_START}{body}{FRAME_END}"
