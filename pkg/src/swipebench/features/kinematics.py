"""Derived per-swipe series: velocities, accelerations, deviations, angles.

Conventions used throughout (and mirrored by the feature definitions):
forward differences; dt in seconds for velocity (px/s) and acceleration
(px/s^2); accelerations divide velocity steps by the spacing of segment
midpoints; deviations are absolute perpendicular distances from the
start->stop chord (plain distance to the start point when the chord is
degenerate); pairwise angles are the signed turn atan2(cross, dot) between
consecutive displacement vectors; phase angles are atan2(dy, dx) per
displacement in screen coordinates (y grows downward), range (-pi, pi];
angular velocity is the turn angle over the midpoint time spacing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..touchdata import Swipe


@dataclass
class KinematicSeries:
    dt_ms: np.ndarray          # n-1 inter-sample gaps, milliseconds
    seg_dx: np.ndarray         # n-1 displacement components
    seg_dy: np.ndarray
    seg_len: np.ndarray        # n-1 displacement lengths
    velocity: np.ndarray       # n-1, px/s
    acceleration: np.ndarray   # n-2, px/s^2
    deviation: np.ndarray      # n absolute chord deviations
    pairwise_angle: np.ndarray  # n-2 signed turn angles
    phase_angle: np.ndarray    # n-1 displacement directions
    angular_velocity: np.ndarray  # n-2, rad/s
    pressure_delta: np.ndarray  # n-1
    area_delta: np.ndarray     # n-1

    @property
    def ldp_index(self) -> int:
        """Index of the largest-deviation point (first on ties)."""
        return int(np.argmax(self.deviation))

    def point_velocity(self, i: int) -> float:
        """Velocity attributed to sample i: the segment starting there,
        the final segment for the last sample."""
        v = self.velocity
        return float(v[min(i, len(v) - 1)])


def chord_deviations(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Absolute perpendicular distance of every point from the start->stop
    chord; distance to the start point when start == stop."""
    ax, ay = xs[0], ys[0]
    bx, by = xs[-1], ys[-1]
    cx, cy = bx - ax, by - ay
    norm = np.hypot(cx, cy)
    if norm == 0.0:
        return np.hypot(xs - ax, ys - ay)
    return np.abs(cx * (ys - ay) - cy * (xs - ax)) / norm


def compute_kinematics(swipe: Swipe) -> KinematicSeries:
    """Build every derived series for one swipe (needs >= 2 samples)."""
    t = swipe.t_ms
    if len(t) < 2:
        raise ValueError("kinematics need at least 2 samples")
    xs, ys = swipe.xs, swipe.ys

    dt_ms = np.diff(t)
    dt_s = dt_ms / 1000.0
    seg_dx = np.diff(xs)
    seg_dy = np.diff(ys)
    seg_len = np.hypot(seg_dx, seg_dy)
    velocity = seg_len / dt_s

    # Midpoint spacing: velocity i lives at (t_i + t_{i+1}) / 2.
    if len(velocity) >= 2:
        mid_dt_s = (t[2:] - t[:-2]) / 2000.0
        acceleration = np.diff(velocity) / mid_dt_s
    else:
        mid_dt_s = np.empty(0)
        acceleration = np.empty(0)

    deviation = chord_deviations(xs, ys)
    phase_angle = np.arctan2(seg_dy, seg_dx)

    if len(seg_dx) >= 2:
        cross = seg_dx[:-1] * seg_dy[1:] - seg_dy[:-1] * seg_dx[1:]
        dot = seg_dx[:-1] * seg_dx[1:] + seg_dy[:-1] * seg_dy[1:]
        pairwise_angle = np.arctan2(cross, dot)
        angular_velocity = pairwise_angle / mid_dt_s
    else:
        pairwise_angle = np.empty(0)
        angular_velocity = np.empty(0)

    return KinematicSeries(
        dt_ms=dt_ms.astype(float),
        seg_dx=seg_dx, seg_dy=seg_dy, seg_len=seg_len,
        velocity=velocity, acceleration=acceleration,
        deviation=deviation,
        pairwise_angle=pairwise_angle, phase_angle=phase_angle,
        angular_velocity=angular_velocity,
        pressure_delta=np.diff(swipe.pressures),
        area_delta=np.diff(swipe.areas),
    )
