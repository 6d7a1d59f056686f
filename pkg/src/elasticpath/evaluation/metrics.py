"""Destination error, per-trace records and the 250 m error histogram."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from ..geo import haversine_m
from ..trace import GpsFix

BIN_WIDTH = 250.0
N_FINITE_BINS = 13


class Method(str, enum.Enum):
    ELASTIC = "elastic"
    ELASTIC_ROUTING = "elastic+routing"
    NAIVE = "naive"


@dataclass
class EvalRecord:
    trace_id: str
    true_destination: GpsFix | None
    estimated_destination: GpsFix | None
    destination_error: float | None
    runtime: float
    explored_count: int
    method: Method = Method.ELASTIC

    def to_json(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        return d

    @classmethod
    def from_json(cls, d: dict) -> EvalRecord:
        fix = lambda x: None if x is None else GpsFix(**x)  # noqa: E731
        return cls(d["trace_id"], fix(d["true_destination"]), fix(d["estimated_destination"]),
                   d["destination_error"], d["runtime"], d["explored_count"], Method(d["method"]))


def destination_error(estimated: GpsFix, truth: GpsFix) -> float:
    return haversine_m(estimated.lat, estimated.lon, truth.lat, truth.lon)


def bin_index(error: float) -> int:
    """Half-open 250 m bins; an error on a boundary goes to the upper bin."""
    if error < 0:
        raise ValueError("negative destination error")
    return min(int(error // BIN_WIDTH), N_FINITE_BINS)


@dataclass
class ErrorHistogram:
    bins: list[int]
    total: int
    percents: list[float]

    @property
    def labels(self) -> list[str]:
        out = [f"{int(i * BIN_WIDTH)}-{int((i + 1) * BIN_WIDTH)}" for i in range(N_FINITE_BINS)]
        return out + [f">{int(N_FINITE_BINS * BIN_WIDTH)}"]

    def cumulative_percent(self, upto_m: float) -> float:
        k = int(upto_m // BIN_WIDTH)
        return 100.0 * sum(self.bins[:k]) / self.total

    def to_json(self) -> dict:
        return {"labels": self.labels, "bins": self.bins, "total": self.total, "percents": self.percents}

    def format_table(self) -> str:
        lines = [f"{'meters':>11}  {'count':>6}  {'percent':>8}"]
        for lab, c, p in zip(self.labels, self.bins, self.percents):
            lines.append(f"{lab:>11}  {c:>6}  {p:>7.2f}%")
        lines.append(f"{'total':>11}  {self.total:>6}  {100.0:>7.2f}%")
        return "\n".join(lines)


def histogram_from_counts(bins: Sequence[int]) -> ErrorHistogram:
    if len(bins) != N_FINITE_BINS + 1:
        raise ValueError(f"expected {N_FINITE_BINS + 1} bins")
    total = sum(bins)
    if total <= 0:
        raise ValueError("histogram needs at least one trace")
    return ErrorHistogram(list(bins), total, [100.0 * b / total for b in bins])


def histogram_from_errors(errors: Iterable[float]) -> ErrorHistogram:
    bins = [0] * (N_FINITE_BINS + 1)
    for e in errors:
        bins[bin_index(e)] += 1
    return histogram_from_counts(bins)


def bin_report(records: Sequence[EvalRecord]) -> ErrorHistogram:
    errors = [r.destination_error for r in records if r.destination_error is not None]
    if not errors:
        raise ValueError("bin_report needs at least one record with a known error")
    return histogram_from_errors(errors)


def within_rate(records: Sequence[EvalRecord], meters: float) -> float:
    errs = [r.destination_error for r in records if r.destination_error is not None]
    return sum(e < meters for e in errs) / len(errs) if errs else 0.0
