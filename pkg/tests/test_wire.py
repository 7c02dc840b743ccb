import math
import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from firewatch.errors import ArityError, FirewatchError, FrameError, InvalidInputError, NumericError
from firewatch.wire import SensorReading, format_reading, parse_reading

finite_floats = st.floats(allow_nan=False, allow_infinity=False)
noise_text = st.text(
    alphabet=st.characters(blacklist_characters="*#"), max_size=40
)


class TestParse:
    def test_http_noise_around_frame(self):
        reading = parse_reading("HTTP/1.1 OK *23.5,48.2,410.0# trailing")
        assert reading == SensorReading(23.5, 48.2, 410.0)

    def test_zero_payload(self):
        assert parse_reading("*0,0,0#") == SensorReading(0.0, 0.0, 0.0)

    def test_missing_both_delimiters(self):
        with pytest.raises(FrameError):
            parse_reading("no delimiters here")

    def test_missing_start(self):
        with pytest.raises(FrameError, match="'\\*' missing"):
            parse_reading("1,2,3#")

    def test_missing_end(self):
        with pytest.raises(FrameError, match="'#' missing"):
            parse_reading("*1,2,3")

    def test_end_before_start(self):
        with pytest.raises(FrameError, match="before"):
            parse_reading("# then *1,2,3")

    def test_first_star_wins(self):
        # two frames: the scan breaks on the first '*' and first '#'
        assert parse_reading("*1,2,3# *4,5,6#") == SensorReading(1.0, 2.0, 3.0)

    def test_too_few_fields(self):
        with pytest.raises(ArityError, match="got 2"):
            parse_reading("*1,2#")

    def test_too_many_fields(self):
        with pytest.raises(ArityError, match="got 4"):
            parse_reading("*1,2,3,4#")

    def test_non_numeric_field(self):
        with pytest.raises(NumericError, match="smoke"):
            parse_reading("*1,x,3#")

    def test_nan_rejected(self):
        with pytest.raises(NumericError, match="finite"):
            parse_reading("*nan,1,2#")

    def test_infinity_rejected(self):
        with pytest.raises(NumericError, match="finite"):
            parse_reading("*1,inf,2#")

    def test_whitespace_trimmed(self):
        assert parse_reading("* 1.5 ,\t2 , 3 #") == SensorReading(1.5, 2.0, 3.0)

    def test_scientific_notation(self):
        assert parse_reading("*1e2,-2.5e-1,3E0#") == SensorReading(100.0, -0.25, 3.0)

    def test_error_carries_raw_body(self):
        with pytest.raises(FrameError) as exc_info:
            parse_reading("junk")
        assert exc_info.value.raw == "junk"


class TestFormat:
    def test_sample_row_values(self):
        assert format_reading((25.977, 50.529, 464.37)) == "*25.977,50.529,464.37#"

    def test_integral_values_render_bare(self):
        assert format_reading((0.0, 0.0, 0.0)) == "*0,0,0#"

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidInputError):
            format_reading((math.nan, 1.0, 2.0))
        with pytest.raises(InvalidInputError):
            format_reading((1.0, math.inf, 2.0))

    @given(finite_floats, finite_floats, finite_floats)
    def test_frame_shape(self, a, b, c):
        frame = format_reading((a, b, c))
        assert frame.count("*") == 1
        assert frame.count("#") == 1
        assert frame.count(",") == 2
        assert frame.startswith("*") and frame.endswith("#")


class TestRoundTrip:
    @given(finite_floats, finite_floats, finite_floats)
    def test_parse_inverts_format(self, a, b, c):
        reading = SensorReading(a, b, c)
        assert parse_reading(format_reading(reading)) == reading

    @given(noise_text, noise_text, finite_floats, finite_floats, finite_floats)
    def test_prefix_suffix_immunity(self, prefix, suffix, a, b, c):
        reading = SensorReading(a, b, c)
        framed = prefix + format_reading(reading) + suffix
        assert parse_reading(framed) == reading

    def test_negative_zero_survives(self):
        reading = parse_reading(format_reading((-0.0, 1.0, 2.0)))
        assert math.copysign(1.0, reading.temperature) == -1.0


class TestFuzz:
    def test_arbitrary_text_never_crashes(self, rng):
        alphabet = string.printable + "*#,\x00\xff"
        for _ in range(2000):
            size = int(rng.integers(0, 60))
            chars = rng.integers(0, len(alphabet), size)
            text = "".join(alphabet[c] for c in chars)
            try:
                result = parse_reading(text)
                assert isinstance(result, SensorReading)
            except FirewatchError:
                pass
