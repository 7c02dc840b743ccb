"""Telemetry capture: the HTTP polling receptor and a simulated capture device.

The receptor issues GET requests against a device endpoint, runs each whole
response body through the frame parser, labels the reading, and appends it
to a CSV dataset. The simulator is the software stand-in for the sensor
board: a small threaded HTTP server whose ``/data`` endpoint hands out one
wire frame per request, either replaying a stored dataset or drawing
synthetic readings.
"""

from __future__ import annotations

import logging
import math
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import requests

from ._numfmt import format_float
from .dataset import DEFAULT_LABEL_RULE, GeneratorParams, LabelRule, load_dataset
from .errors import ConfigError, ParseError, TransportError
from .wire import SensorReading, format_reading, parse_reading

log = logging.getLogger(__name__)

LABEL_MODES = ("fixed-0", "fixed-1", "rule", "unlabeled")

_LABELED_HEADER = "Temp,Smoke,Flame,Label"
_UNLABELED_HEADER = "Temp,Smoke,Flame"


@dataclass(frozen=True)
class ReceptorConfig:
    """Polling loop settings for one capture session."""

    endpoint_url: str
    output_path: str | Path
    poll_interval_ms: int = 250
    max_samples: Optional[int] = None
    label_mode: str = "unlabeled"
    rule: LabelRule = DEFAULT_LABEL_RULE
    timeout_s: float = 5.0

    def __post_init__(self):
        if not self.endpoint_url:
            raise ConfigError("endpoint_url must be nonempty")
        if self.poll_interval_ms < 10:
            raise ConfigError(
                f"poll_interval_ms must be >= 10, got {self.poll_interval_ms}"
            )
        if self.max_samples is not None and self.max_samples < 0:
            raise ConfigError(f"max_samples must be >= 0, got {self.max_samples}")
        if self.label_mode not in LABEL_MODES:
            raise ConfigError(
                f"label_mode {self.label_mode!r} not in {LABEL_MODES}"
            )


@dataclass(frozen=True)
class IngestionSummary:
    appended: int
    failed: int


def poll_once(cfg: ReceptorConfig) -> SensorReading:
    """One HTTP GET; the entire response body is handed to the frame parser.

    Raises ``TransportError`` on network trouble or non-200 status, and the
    parser's frame/arity/numeric errors (carrying the raw body) on bad frames.
    """
    try:
        response = requests.get(cfg.endpoint_url, timeout=cfg.timeout_s)
    except requests.RequestException as exc:
        raise TransportError(f"GET {cfg.endpoint_url} failed: {exc}") from exc
    if response.status_code != 200:
        raise TransportError(
            f"GET {cfg.endpoint_url} returned status {response.status_code}"
        )
    return parse_reading(response.text)


def _label_for(cfg: ReceptorConfig, reading: SensorReading) -> Optional[int]:
    if cfg.label_mode == "fixed-0":
        return 0
    if cfg.label_mode == "fixed-1":
        return 1
    if cfg.label_mode == "rule":
        return int(cfg.rule.fires(reading))
    return None


def _open_output(path: Path, labeled: bool):
    header = _LABELED_HEADER if labeled else _UNLABELED_HEADER
    try:
        if path.exists() and path.stat().st_size > 0:
            with path.open("r", encoding="utf-8") as existing:
                first = existing.readline().rstrip("\n")
            if first != header:
                raise ConfigError(
                    f"{path}: existing header {first!r} does not match {header!r}"
                )
            return path.open("a", encoding="utf-8", newline="\n")
        handle = path.open("w", encoding="utf-8", newline="\n")
        handle.write(header + "\n")
        handle.flush()
        return handle
    except OSError as exc:
        raise ConfigError(f"cannot write dataset {path}: {exc}") from exc


def run_receptor(
    cfg: ReceptorConfig, stop: Optional[threading.Event] = None
) -> IngestionSummary:
    """Poll until ``max_samples`` readings are appended (or ``stop`` is set).

    Every successfully parsed reading becomes exactly one dataset row;
    transport and parse failures are logged and counted, never appended.
    With ``max_samples=0`` the dataset file is left untouched.
    """
    if cfg.max_samples == 0:
        return IngestionSummary(appended=0, failed=0)

    labeled = cfg.label_mode != "unlabeled"
    interval_s = cfg.poll_interval_ms / 1000.0
    appended = failed = 0
    with _open_output(Path(cfg.output_path), labeled) as out:
        while cfg.max_samples is None or appended < cfg.max_samples:
            if stop is not None and stop.is_set():
                break
            try:
                reading = poll_once(cfg)
            except TransportError as exc:
                failed += 1
                log.warning("poll failed (transport): %s", exc)
            except ParseError as exc:
                failed += 1
                log.warning("poll failed (bad frame %r): %s", exc.raw, exc)
            else:
                cells = [format_float(v) for v in reading]
                label = _label_for(cfg, reading)
                if label is not None:
                    cells.append(str(label))
                out.write(",".join(cells) + "\n")
                out.flush()
                appended += 1
            if cfg.max_samples is not None and appended >= cfg.max_samples:
                break
            time.sleep(interval_s)
    return IngestionSummary(appended=appended, failed=failed)


# ---------------------------------------------------------------------------
# Device simulator

@dataclass(frozen=True)
class SimulatorScenario:
    """What the simulated device serves.

    ``replay`` walks a stored dataset's readings in file order (wrapping by
    default); ``synthetic`` draws uniform readings from generator ranges.
    Per-feature Gaussian noise is added when any ``noise_std`` entry is
    positive. With a fixed seed and zero noise the served sequence is a pure
    function of the request count.
    """

    mode: str
    source: str | Path | GeneratorParams | None = None
    noise_std: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rng_seed: int = 0
    listen_address: str = "127.0.0.1:0"
    wrap: bool = True

    def __post_init__(self):
        if self.mode not in ("replay", "synthetic"):
            raise ConfigError(f"simulator mode {self.mode!r} not in ('replay', 'synthetic')")
        if len(self.noise_std) != 3 or any(
            not math.isfinite(s) or s < 0 for s in self.noise_std
        ):
            raise ConfigError(f"noise_std must be three nonnegative reals, got {self.noise_std!r}")
        if self.mode == "replay" and not isinstance(self.source, (str, Path)):
            raise ConfigError("replay mode needs a dataset path as source")


def _parse_listen_address(address: str) -> tuple[str, int]:
    host, sep, port_text = address.rpartition(":")
    if not sep or not host:
        raise ConfigError(f"listen address {address!r} is not host:port")
    try:
        port = int(port_text)
    except ValueError:
        raise ConfigError(f"listen address port {port_text!r} is not an integer") from None
    if not (0 <= port <= 65535):
        raise ConfigError(f"listen port {port} out of range")
    return host, port


class _FrameSource:
    """Thread-safe frame sequence; requests observe a single shared cursor."""

    def __init__(self, scenario: SimulatorScenario, frames: Optional[Sequence[str]]):
        self._lock = threading.Lock()
        self._cursor = 0
        self._rng = np.random.default_rng(scenario.rng_seed)
        self._noise = np.array(scenario.noise_std)
        self._noisy = bool((self._noise > 0).any())
        self._wrap = scenario.wrap
        self._fixed: Optional[list[str]] = list(frames) if frames is not None else None
        self._rows: Optional[list[SensorReading]] = None
        self._params: Optional[GeneratorParams] = None
        if self._fixed is not None:
            return
        if scenario.mode == "replay":
            dataset = load_dataset(scenario.source)
            if len(dataset) == 0:
                raise ConfigError(f"replay source {scenario.source} has no rows")
            self._rows = [SensorReading(*row.features) for row in dataset.rows]
        else:
            params = scenario.source if isinstance(scenario.source, GeneratorParams) else None
            self._params = params or GeneratorParams(n=1, rng_seed=scenario.rng_seed)

    def _base_reading(self) -> Optional[SensorReading]:
        if self._rows is not None:
            if self._cursor >= len(self._rows) and not self._wrap:
                return None
            return self._rows[self._cursor % len(self._rows)]
        lows = [lo for lo, _ in self._params.ranges]
        widths = [hi - lo for lo, hi in self._params.ranges]
        draw = self._rng.random(3)
        return SensorReading(
            *(lo + u * w for lo, u, w in zip(lows, draw, widths))
        )

    def next_frame(self) -> Optional[str]:
        with self._lock:
            if self._fixed is not None:
                if self._cursor >= len(self._fixed):
                    if not self._wrap:
                        return None
                    self._cursor %= len(self._fixed)
                frame = self._fixed[self._cursor]
                self._cursor += 1
                return frame
            reading = self._base_reading()
            if reading is None:
                return None
            if self._noisy:
                noise = self._rng.normal(0.0, 1.0, 3) * self._noise
                reading = SensorReading(*(v + e for v, e in zip(reading, noise)))
            self._cursor += 1
            return format_reading(reading)


class DeviceSimulator:
    """Threaded HTTP server: GET ``/data`` returns one wire frame per request.

    ``frames`` (testing hook) overrides the scenario with an explicit frame
    sequence, served verbatim — handy for injecting corrupt frames.
    """

    def __init__(self, scenario: SimulatorScenario, frames: Optional[Sequence[str]] = None):
        self.scenario = scenario
        self._source = _FrameSource(scenario, frames)
        self._server: Optional[ThreadingHTTPServer] = None
        self._thread: Optional[threading.Thread] = None
        self._served = 0
        self._served_lock = threading.Lock()

    def start(self) -> "DeviceSimulator":
        host, port = _parse_listen_address(self.scenario.listen_address)
        simulator = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):  # noqa: N802 (http.server API)
                if self.path.rstrip("/") != "/data":
                    self.send_error(404, "unknown path")
                    return
                frame = simulator._source.next_frame()
                with simulator._served_lock:
                    simulator._served += 1
                if frame is None:
                    self.send_error(410, "no data")
                    return
                body = frame.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/plain; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, format, *args):
                log.debug("simulator: " + format, *args)

        try:
            self._server = ThreadingHTTPServer((host, port), Handler)
        except OSError as exc:
            raise ConfigError(f"cannot listen on {host}:{port}: {exc}") from exc
        self._thread = threading.Thread(
            target=self._server.serve_forever, name="firewatch-simulator", daemon=True
        )
        self._thread.start()
        return self

    @property
    def address(self) -> tuple[str, int]:
        if self._server is None:
            raise ConfigError("simulator is not running")
        return self._server.server_address[0], self._server.server_address[1]

    @property
    def url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}/data"

    @property
    def requests_served(self) -> int:
        with self._served_lock:
            return self._served

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    def __enter__(self) -> "DeviceSimulator":
        if self._server is None:
            self.start()
        return self

    def __exit__(self, *exc_info) -> None:
        self.stop()
