"""Spherical geometry helpers shared by the map, trace and evaluation code."""

from __future__ import annotations

import math

EARTH_RADIUS_M = 6_371_000.0

MPH = 0.44704  # m/s
FOOT = 0.3048  # m
KMH = 1.0 / 3.6  # m/s
KNOT = 1852.0 / 3600.0  # m/s


def haversine_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters on a sphere of radius 6,371 km."""
    phi1 = math.radians(lat1)
    phi2 = math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(max(0.0, a))))


def local_xy(lat: float, lon: float, lat0: float, lon0: float) -> tuple[float, float]:
    """Equirectangular projection of (lat, lon) about (lat0, lon0), in meters."""
    k = math.pi / 180.0 * EARTH_RADIUS_M
    return (lon - lon0) * k * math.cos(math.radians(lat0)), (lat - lat0) * k


def offset_latlon(lat0: float, lon0: float, east_m: float, north_m: float) -> tuple[float, float]:
    """Inverse of :func:`local_xy`."""
    k = math.pi / 180.0 * EARTH_RADIUS_M
    return lat0 + north_m / k, lon0 + east_m / (k * math.cos(math.radians(lat0)))


def interpolate(lat1: float, lon1: float, lat2: float, lon2: float, frac: float) -> tuple[float, float]:
    # linear in degrees; segments are short
    return lat1 + (lat2 - lat1) * frac, lon1 + (lon2 - lon1) * frac
