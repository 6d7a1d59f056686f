"""Speed traces: ingestion, GPS-to-speed conversion, trip splitting, features."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .geo import MPH, haversine_m

STOP_SPEED = 0.45  # m/s; anything slower counts as stopped
BRAKE_DROP = 10 * MPH
MIN_TRIP_SECONDS = 180.0


class TraceError(ValueError):
    pass


class Source(str, enum.Enum):
    SPEEDOMETER = "speedometer"
    GPS_DERIVED = "gps_derived"


@dataclass(frozen=True)
class GpsFix:
    t: float
    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
            raise TraceError(f"fix at t={self.t}: coordinates out of range")


@dataclass(frozen=True)
class SpeedSample:
    t: float
    v: float

    def __post_init__(self):
        if not self.v >= 0:
            raise TraceError(f"sample at t={self.t}: negative speed {self.v}")


@dataclass(frozen=True)
class SpeedTrace:
    samples: tuple[SpeedSample, ...]
    source: Source = Source.SPEEDOMETER

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        for i in range(1, len(self.samples)):
            if self.samples[i].t <= self.samples[i - 1].t:
                raise TraceError(f"timestamps not strictly increasing at index {i}")

    @classmethod
    def from_arrays(cls, t: Iterable[float], v: Iterable[float], source: Source = Source.SPEEDOMETER) -> SpeedTrace:
        return cls(tuple(SpeedSample(float(a), float(b)) for a, b in zip(t, v)), source)

    def __len__(self) -> int:
        return len(self.samples)

    @cached_property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples], dtype=float)

    @cached_property
    def speeds(self) -> np.ndarray:
        return np.array([s.v for s in self.samples], dtype=float)

    @cached_property
    def odometer(self) -> np.ndarray:
        """Distance covered by the time of each sample.

        Each sample's speed is taken as the mean over the interval ending at
        that sample, so ``odometer[0] == 0``.
        """
        if len(self.samples) == 0:
            return np.zeros(0)
        d = np.zeros(len(self.samples))
        d[1:] = np.cumsum(self.speeds[1:] * np.diff(self.times))
        return d

    @property
    def duration(self) -> float:
        return self.samples[-1].t - self.samples[0].t if self.samples else 0.0

    @property
    def total_distance(self) -> float:
        return float(self.odometer[-1]) if self.samples else 0.0


def haversine(a: GpsFix, b: GpsFix) -> float:
    return haversine_m(a.lat, a.lon, b.lat, b.lon)


def gps_to_speed(track: Sequence[GpsFix]) -> SpeedTrace:
    """Speed per fix from the distance to the previous fix over the time step."""
    if len(track) < 2:
        raise TraceError("need at least two GPS fixes")
    out = []
    for i in range(1, len(track)):
        dt = track[i].t - track[i - 1].t
        if dt <= 0:
            raise TraceError(f"timestamps not increasing at fix {i}")
        out.append(SpeedSample(track[i].t, haversine(track[i - 1], track[i]) / dt))
    return SpeedTrace(tuple(out), Source.GPS_DERIVED)


def _zero_runs(v: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive index ranges of consecutive stopped samples."""
    runs = []
    i, n = 0, len(v)
    while i < n:
        if v[i] < STOP_SPEED:
            j = i
            while j + 1 < n and v[j + 1] < STOP_SPEED:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1
    return runs


def _trim(samples: list[SpeedSample]) -> list[SpeedSample]:
    lo, hi = 0, len(samples)
    while lo + 1 < hi and samples[lo].v < STOP_SPEED and samples[lo + 1].v < STOP_SPEED:
        lo += 1
    while hi - 1 > lo and samples[hi - 1].v < STOP_SPEED and samples[hi - 2].v < STOP_SPEED:
        hi -= 1
    return samples[lo:hi]


def split_trips(
    trace: SpeedTrace,
    stop_split: float = 300.0,
    gap_split: float = 5.0,
    min_duration: float = MIN_TRIP_SECONDS,
) -> list[SpeedTrace]:
    """Cut a recording into trips at long stops and at recording gaps.

    A stop longer than ``stop_split`` seconds or a gap between samples longer
    than ``gap_split`` starts a new trip. Each trip keeps at most one stopped
    sample at either end; trips shorter than ``min_duration`` are discarded.
    """
    samples = list(trace.samples)
    if not samples:
        return []
    segments: list[list[SpeedSample]] = [[samples[0]]]
    for prev, cur in zip(samples, samples[1:]):
        if cur.t - prev.t > gap_split:
            segments.append([cur])
        else:
            segments[-1].append(cur)

    pieces: list[list[SpeedSample]] = []
    for seg in segments:
        v = np.array([s.v for s in seg])
        start = 0
        for a, b in _zero_runs(v):
            if seg[b].t - seg[a].t > stop_split:
                pieces.append(seg[start : a + 1])
                start = b
        pieces.append(seg[start:])

    trips = []
    for piece in pieces:
        piece = _trim(piece)
        if len(piece) >= 2 and piece[-1].t - piece[0].t >= min_duration:
            trips.append(SpeedTrace(tuple(piece), trace.source))
    return trips


@dataclass(frozen=True)
class BehaviorFeatures:
    avg_speed: float
    avg_braking_decel: float
    braking_events: int
    stops: int


def braking_intervals(trace: SpeedTrace, min_drop: float = BRAKE_DROP) -> list[tuple[int, int]]:
    """Index pairs (first, last) of non-increasing speed runs dropping >= ``min_drop``.

    Plateaus at either end of a run are excluded so that cruising before or
    standing after the braking does not dilute its deceleration.
    """
    v = trace.speeds
    out = []
    i, n = 0, len(v)
    while i < n - 1:
        j = i
        while j + 1 < n and v[j + 1] <= v[j]:
            j += 1
        if j > i:
            a, b = i, j
            while a < b and v[a + 1] == v[a]:
                a += 1
            while b > a and v[b - 1] == v[b]:
                b -= 1
            if v[a] - v[b] >= min_drop - 1e-12:
                out.append((a, b))
        i = j + 1 if j > i else i + 1
    return out


def behavior_features(trace: SpeedTrace) -> BehaviorFeatures:
    if len(trace) < 2:
        raise TraceError("need at least two samples")
    v, t = trace.speeds, trace.times
    runs = braking_intervals(trace)
    decels = [(v[a] - v[b]) / (t[b] - t[a]) for a, b in runs]
    zero = _zero_runs(v)
    stops = len(zero)
    if not zero or zero[0][0] != 0:
        stops += 1
    if not zero or zero[-1][1] != len(v) - 1:
        stops += 1
    return BehaviorFeatures(
        avg_speed=float(v.mean()),
        avg_braking_decel=float(np.mean(decels)) if decels else 0.0,
        braking_events=len(runs),
        stops=max(2, stops),
    )


def linear_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Squared Pearson correlation of two equal-length samples."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValueError("need two equal-length samples of size >= 2")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ValueError("correlation undefined for zero-variance input")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, r * r)


# --- CSV boundaries -------------------------------------------------------

def read_speed_csv(path: str | Path) -> SpeedTrace:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return SpeedTrace.from_arrays([r["t"] for r in rows], [r["v_mps"] for r in rows])


def write_speed_csv(trace: SpeedTrace, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "v_mps"])
        for s in trace.samples:
            w.writerow([repr(s.t) if not float(s.t).is_integer() else int(s.t), repr(s.v)])


def read_gps_csv(path: str | Path) -> list[GpsFix]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [GpsFix(float(r["t"]), float(r["lat"]), float(r["lon"])) for r in csv.DictReader(fh)]
