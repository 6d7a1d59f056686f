"""Baselines, synthetic ground truth, metrics and export."""

from .batch import EvalJob, SyntheticReport, SyntheticTrip, evaluate, run_batch, run_synthetic, synthetic_trips
from .geojson import export_geojson, write_geojson
from .metrics import (
    ErrorHistogram,
    EvalRecord,
    Method,
    bin_index,
    bin_report,
    destination_error,
    histogram_from_counts,
    histogram_from_errors,
    within_rate,
)
from .naive import naive_guess
from .synth import DriveProfile, grid_node_id, make_grid_map, random_route, simulate_drive, to_osm_xml

__all__ = [
    "DriveProfile", "ErrorHistogram", "EvalJob", "EvalRecord", "Method", "SyntheticReport", "SyntheticTrip",
    "bin_index", "bin_report", "destination_error", "evaluate", "export_geojson", "grid_node_id",
    "histogram_from_counts", "histogram_from_errors", "make_grid_map", "naive_guess", "random_route",
    "run_batch", "run_synthetic", "simulate_drive", "synthetic_trips", "to_osm_xml", "within_rate", "write_geojson",
]
