"""Turn feasibility: safe radius for a speed versus the radius a junction allows."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geo import FOOT, MPH
from .mapgraph import DEFAULT_LANE_WIDTH, TurnDescriptor

# the 15 in the safe-radius formula assumes mph in and feet out
_RADIUS_CONSTANT = 15.0


@dataclass(frozen=True)
class TurnModelParams:
    friction: float = 0.30
    elevation_pct: float = 8.0
    lane_width: float = DEFAULT_LANE_WIDTH
    car_offset: float = 5.0

    def __post_init__(self):
        if self.friction <= 0:
            raise ValueError("friction must be positive")
        if not 0.0 <= self.elevation_pct <= 12.0:
            raise ValueError("elevation_pct must be within [0, 12]")
        if self.lane_width <= 0:
            raise ValueError("lane_width must be positive")

    @property
    def _denominator(self) -> float:
        return _RADIUS_CONSTANT * (0.01 * self.elevation_pct + self.friction)


def safe_turn_radius(v: float, p: TurnModelParams = TurnModelParams()) -> float:
    """Minimum radius in meters at which a car at ``v`` m/s can turn safely."""
    if v < 0:
        raise ValueError("speed must be non-negative")
    mph = v / MPH
    return mph * mph / p._denominator * FOOT


def max_turn_speed(r: float, p: TurnModelParams = TurnModelParams()) -> float:
    """Inverse of :func:`safe_turn_radius`: the fastest speed for radius ``r``."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    if math.isinf(r):
        return math.inf
    return math.sqrt(r / FOOT * p._denominator) * MPH


def intersection_turn_radius(x: float, y: float, alpha: float) -> float:
    """Largest arc radius through a junction with path widths ``x`` and ``y``.

    ``alpha`` is the heading change of the turn (0 = straight on). A heading
    change this small is reported as ``math.inf``, i.e. no constraint.
    """
    if x <= 0 or y <= 0:
        raise ValueError("path widths must be positive")
    if alpha <= 1e-9:
        return math.inf
    c = math.cos(alpha)
    return (x + y + math.sqrt(max(0.0, 2.0 * x * y * (1.0 + c)))) / (1.0 - c)


def turn_radius(turn: TurnDescriptor) -> float:
    if turn.alpha >= math.pi - 1e-9:
        return math.inf
    return intersection_turn_radius(turn.entry_width_x, turn.exit_width_y, turn.deflection)


def turn_speed_limit(turn: TurnDescriptor, p: TurnModelParams = TurnModelParams()) -> float:
    return max_turn_speed(turn_radius(turn), p)


def can_make_turn(v: float, turn: TurnDescriptor, p: TurnModelParams = TurnModelParams()) -> bool:
    r = turn_radius(turn)
    if math.isinf(r):
        return True
    return r >= safe_turn_radius(v, p)
