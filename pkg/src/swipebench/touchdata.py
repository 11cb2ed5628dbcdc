"""Core data model: touch samples, swipes, sessions, datasets, segmentation.

A swipe is a single-finger down -> move* -> up trace. Segmentation consumes
per-session event streams and is order independent: events are sorted by a
canonical key before strokes are cut, so a shuffled copy of the same stream
yields an identical dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NoEligibleUsers

PHASES = ("down", "move", "up")
_PHASE_RANK = {"down": 0, "move": 1, "up": 2}

MIN_SAMPLES = 4
MIN_DURATION_MS = 30

CHANNELS = ("pressure", "area")


@dataclass(frozen=True, slots=True)
class TouchSample:
    """One touch event.

    t is in milliseconds. pressure/area may be NaN when the capture device
    did not report that channel; coordinates and time must be finite.
    """

    dataset: str
    user_id: str
    session_id: str
    device_model: str
    t: int
    phase: str
    x: float
    y: float
    pressure: float
    area: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", int(self.t))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "pressure", float(self.pressure))
        object.__setattr__(self, "area", float(self.area))
        if self.t < 0:
            raise ValueError(f"negative timestamp {self.t}")
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase {self.phase!r}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("non-finite coordinates")
        for name in CHANNELS:
            v = getattr(self, name)
            if not math.isnan(v) and not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be >= 0 or NaN, got {v}")


def sample_sort_key(s: TouchSample) -> tuple:
    # Full-content key: ties at equal t resolve identically however the
    # input was ordered, which keeps duplicate collapse deterministic.
    return (s.t, _PHASE_RANK[s.phase], s.x, s.y, s.pressure, s.area)


@dataclass
class Swipe:
    """A validated stroke. Samples are strictly increasing in t."""

    samples: tuple[TouchSample, ...]
    _arrays: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def user_id(self) -> str:
        return self.samples[0].user_id

    @property
    def session_id(self) -> str:
        return self.samples[0].session_id

    @property
    def device_model(self) -> str:
        return self.samples[0].device_model

    @property
    def start_ms(self) -> int:
        return self.samples[0].t

    @property
    def end_ms(self) -> int:
        return self.samples[-1].t

    @property
    def duration_ms(self) -> int:
        return self.samples[-1].t - self.samples[0].t

    def _array(self, name: str) -> np.ndarray:
        arr = self._arrays.get(name)
        if arr is None:
            arr = np.array([getattr(s, name) for s in self.samples], dtype=float)
            self._arrays[name] = arr
        return arr

    @property
    def t_ms(self) -> np.ndarray:
        return self._array("t")

    @property
    def xs(self) -> np.ndarray:
        return self._array("x")

    @property
    def ys(self) -> np.ndarray:
        return self._array("y")

    @property
    def pressures(self) -> np.ndarray:
        return self._array("pressure")

    @property
    def areas(self) -> np.ndarray:
        return self._array("area")

    def validate(self, min_samples: int = MIN_SAMPLES,
                 min_duration_ms: int = MIN_DURATION_MS) -> None:
        """Raise ValueError unless this swipe satisfies the type invariants."""
        if self.n < min_samples:
            raise ValueError(f"swipe has {self.n} samples, needs >= {min_samples}")
        ts = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("timestamps not strictly increasing")
        if self.duration_ms < min_duration_ms:
            raise ValueError(f"duration {self.duration_ms} ms < {min_duration_ms} ms")
        phases = [s.phase for s in self.samples]
        if phases[0] != "down" or phases[-1] != "up":
            raise ValueError("swipe must start with down and end with up")
        if any(p != "move" for p in phases[1:-1]):
            raise ValueError("interior samples must be move events")
        keys = {(s.user_id, s.session_id) for s in self.samples}
        if len(keys) != 1:
            raise ValueError("samples span multiple users or sessions")


@dataclass
class SegmentationCounts:
    """Per-sample accounting for one segmentation run.

    Invariant: samples_in == samples_kept + the four discard buckets.
    """

    samples_in: int = 0
    samples_kept: int = 0
    discarded_orphan: int = 0
    discarded_unterminated: int = 0
    discarded_short: int = 0
    discarded_duplicate: int = 0
    swipes: int = 0
    taps_discarded: int = 0
    strokes_unterminated: int = 0

    def merge(self, other: "SegmentationCounts") -> None:
        for f in ("samples_in", "samples_kept", "discarded_orphan",
                  "discarded_unterminated", "discarded_short",
                  "discarded_duplicate", "swipes", "taps_discarded",
                  "strokes_unterminated"):
            setattr(self, f, getattr(self, f) + getattr(other, f))

    def check_conservation(self) -> None:
        total = (self.samples_kept + self.discarded_orphan
                 + self.discarded_unterminated + self.discarded_short
                 + self.discarded_duplicate)
        if total != self.samples_in:
            raise AssertionError(
                f"sample conservation violated: {self.samples_in} in, {total} accounted")

    def as_dict(self) -> dict:
        return {
            "samples_in": self.samples_in,
            "samples_kept": self.samples_kept,
            "discarded_orphan": self.discarded_orphan,
            "discarded_unterminated": self.discarded_unterminated,
            "discarded_short": self.discarded_short,
            "discarded_duplicate": self.discarded_duplicate,
            "swipes": self.swipes,
            "taps_discarded": self.taps_discarded,
            "strokes_unterminated": self.strokes_unterminated,
        }


def _collapse_duplicates(run: list[TouchSample]) -> tuple[list[TouchSample], int]:
    """Keep the last sample at each timestamp. Input must be sorted."""
    kept: list[TouchSample] = []
    dropped = 0
    for s in run:
        if kept and kept[-1].t == s.t:
            kept[-1] = s
            dropped += 1
        else:
            kept.append(s)
    return kept, dropped


def _normalize_phases(run: list[TouchSample]) -> list[TouchSample]:
    # Duplicate collapse may have eaten the original down/up events, so the
    # boundary phases are structural, not inherited.
    out = []
    last = len(run) - 1
    for i, s in enumerate(run):
        want = "down" if i == 0 else ("up" if i == last else "move")
        out.append(s if s.phase == want else replace(s, phase=want))
    return out


def segment_strokes(events, min_samples: int = MIN_SAMPLES,
                    min_duration_ms: int = MIN_DURATION_MS,
                    ) -> tuple[list[Swipe], SegmentationCounts]:
    """Cut one session's event stream into validated swipes.

    Events may arrive in any order. A down opens a candidate; a down while a
    candidate is open discards the open one as unterminated. Candidates that
    end up with fewer than min_samples samples or shorter than min_duration_ms
    are discarded as taps. Every input sample lands either in a swipe or in
    exactly one discard bucket.
    """
    counts = SegmentationCounts(samples_in=len(events))
    ordered = sorted(events, key=sample_sort_key)

    swipes: list[Swipe] = []
    open_run: list[TouchSample] | None = None

    def close_unterminated(run: list[TouchSample]) -> None:
        counts.discarded_unterminated += len(run)
        counts.strokes_unterminated += 1

    def finish(run: list[TouchSample]) -> None:
        run, dropped = _collapse_duplicates(run)
        counts.discarded_duplicate += dropped
        duration = run[-1].t - run[0].t
        if len(run) < min_samples or duration < min_duration_ms:
            counts.discarded_short += len(run)
            counts.taps_discarded += 1
            return
        swipe = Swipe(samples=tuple(_normalize_phases(run)))
        swipe.validate(min_samples=min_samples, min_duration_ms=min_duration_ms)
        counts.samples_kept += swipe.n
        counts.swipes += 1
        swipes.append(swipe)

    for s in ordered:
        if s.phase == "down":
            if open_run is not None:
                close_unterminated(open_run)
            open_run = [s]
        elif open_run is None:
            counts.discarded_orphan += 1
        else:
            open_run.append(s)
            if s.phase == "up":
                finish(open_run)
                open_run = None
    if open_run is not None:
        close_unterminated(open_run)

    counts.check_conservation()
    return swipes, counts


@dataclass
class Session:
    session_id: str
    device_model: str
    swipes: list[Swipe]

    @property
    def start_ms(self) -> int:
        return self.swipes[0].start_ms if self.swipes else 0


@dataclass
class UserData:
    user_id: str
    sessions: list[Session]

    @property
    def n_swipes(self) -> int:
        return sum(len(s.swipes) for s in self.sessions)

    def all_swipes(self) -> list[Swipe]:
        return [sw for s in self.sessions for sw in s.swipes]


@dataclass
class Dataset:
    name: str
    users: dict[str, UserData]

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_swipes(self) -> int:
        return sum(u.n_swipes for u in self.users.values())

    def user_ids(self) -> list[str]:
        return sorted(self.users)


def assemble_dataset(name: str, records,
                     min_samples: int = MIN_SAMPLES,
                     min_duration_ms: int = MIN_DURATION_MS,
                     ) -> tuple[Dataset, SegmentationCounts]:
    """Group raw samples by (user, session), segment, and order sessions
    chronologically (first event time, ties by session id)."""
    groups: dict[tuple[str, str], list[TouchSample]] = {}
    devices: dict[tuple[str, str], str] = {}
    for rec in records:
        key = (rec.user_id, rec.session_id)
        groups.setdefault(key, []).append(rec)
        devices.setdefault(key, rec.device_model)

    totals = SegmentationCounts()
    per_user: dict[str, list[Session]] = {}
    for (user_id, session_id), events in groups.items():
        swipes, counts = segment_strokes(events, min_samples, min_duration_ms)
        totals.merge(counts)
        if swipes:
            per_user.setdefault(user_id, []).append(
                Session(session_id=session_id,
                        device_model=devices[(user_id, session_id)],
                        swipes=swipes))

    users: dict[str, UserData] = {}
    for user_id in sorted(per_user):
        sessions = sorted(per_user[user_id], key=lambda s: (s.start_ms, s.session_id))
        users[user_id] = UserData(user_id=user_id, sessions=sessions)
    return Dataset(name=name, users=users), totals


@dataclass(frozen=True, slots=True)
class EligibilityCriteria:
    min_sessions: int = 2
    required_channels: tuple[str, ...] = CHANNELS

    def __post_init__(self) -> None:
        if self.min_sessions < 1:
            raise ValueError("min_sessions must be >= 1")
        for ch in self.required_channels:
            if ch not in CHANNELS:
                raise ValueError(f"unknown channel {ch!r}")


def _channels_complete(sessions: list[Session], channels: tuple[str, ...]) -> bool:
    for session in sessions:
        for swipe in session.swipes:
            for ch in channels:
                vals = swipe.pressures if ch == "pressure" else swipe.areas
                if np.isnan(vals).any():
                    return False
    return True


def filter_eligible(dataset: Dataset, criteria: EligibilityCriteria = EligibilityCriteria(),
                    ) -> tuple[Dataset, dict]:
    """Apply the enrollment rules.

    Per user, keep only the largest same-device group of sessions (ties break
    toward the lexicographically smallest device name); the user survives
    when that group has >= min_sessions sessions and every kept sample
    reports all required channels. Raises NoEligibleUsers when nobody does.
    """
    kept: dict[str, UserData] = {}
    report = {"users_in": dataset.n_users, "users_kept": 0,
              "dropped_few_sessions": 0, "dropped_missing_channels": 0}
    for user_id in sorted(dataset.users):
        user = dataset.users[user_id]
        by_device: dict[str, list[Session]] = {}
        for session in user.sessions:
            by_device.setdefault(session.device_model, []).append(session)
        best_device = max(sorted(by_device), key=lambda d: len(by_device[d]))
        sessions = by_device[best_device]
        if len(sessions) < criteria.min_sessions:
            report["dropped_few_sessions"] += 1
            continue
        if not _channels_complete(sessions, criteria.required_channels):
            report["dropped_missing_channels"] += 1
            continue
        kept[user_id] = UserData(user_id=user_id, sessions=sessions)
    report["users_kept"] = len(kept)
    if not kept:
        raise NoEligibleUsers(
            f"no users in {dataset.name!r} satisfy {criteria}")
    return Dataset(name=dataset.name, users=kept), report
