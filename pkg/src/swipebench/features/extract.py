"""Per-swipe feature extraction and dataset-level feature tables.

Every swipe yields a 149-slot vector plus a defined-mask. Features whose
definition cannot be evaluated (no previous stroke for the inter-stroke
time, too few observations for skewness/kurtosis, zero-length denominators)
are imputed as 0 with mask false; every mask-true value is finite. Units:
coordinates px, durations ms, velocities px/s, accelerations px/s^2,
angles rad.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyMatrix
from ..touchdata import Dataset, Swipe
from .catalog import ALL_IDS, FEATURE_COUNT, resolve_feature_ids
from .kinematics import KinematicSeries, compute_kinematics


def sample_skewness(a: np.ndarray) -> tuple[float, bool]:
    """Bias-uncorrected moment skewness; needs >= 3 observations.
    A zero-variance series is defined as 0."""
    if len(a) < 3:
        return 0.0, False
    d = a - a.mean()
    m2 = float(np.mean(d * d))
    if m2 == 0.0:
        return 0.0, True
    return float(np.mean(d ** 3) / m2 ** 1.5), True


def sample_kurtosis(a: np.ndarray) -> tuple[float, bool]:
    """Bias-uncorrected excess kurtosis; needs >= 4 observations.
    A zero-variance series is defined as 0."""
    if len(a) < 4:
        return 0.0, False
    d = a - a.mean()
    m2 = float(np.mean(d * d))
    if m2 == 0.0:
        return 0.0, True
    return float(np.mean(d ** 4) / (m2 * m2) - 3.0), True


def _iqr(a: np.ndarray) -> float:
    return float(np.percentile(a, 75) - np.percentile(a, 25))


@dataclass
class FeatureVector:
    """All 149 feature values for one swipe, with a defined mask."""

    values: np.ndarray
    defined: np.ndarray

    def value(self, fid: int) -> float:
        return float(self.values[fid - 1])

    def is_defined(self, fid: int) -> bool:
        return bool(self.defined[fid - 1])

    def take(self, ids) -> tuple[np.ndarray, np.ndarray]:
        idx = np.asarray(ids, dtype=int) - 1
        return self.values[idx], self.defined[idx]


def extract_features(swipe: Swipe, prev_end_ms: int | None = None) -> FeatureVector:
    """Compute the full feature vector for one swipe.

    prev_end_ms is the final timestamp of the previous swipe in the same
    session; the inter-stroke time (id 10) is masked without it.
    """
    kin = compute_kinematics(swipe)
    n = swipe.n
    t = swipe.t_ms
    xs, ys = swipe.xs, swipe.ys
    pr, ar = swipe.pressures, swipe.areas
    vel, acc = kin.velocity, kin.acceleration
    dev, seg = kin.deviation, kin.seg_len
    pa, ph, av = kin.pairwise_angle, kin.phase_angle, kin.angular_velocity

    vals = np.zeros(FEATURE_COUNT)
    mask = np.ones(FEATURE_COUNT, dtype=bool)

    def put(fid: int, value, defined: bool = True) -> None:
        v = float(value)
        if not (defined and math.isfinite(v)):
            vals[fid - 1] = 0.0
            mask[fid - 1] = False
        else:
            vals[fid - 1] = v

    chord_dx = float(xs[-1] - xs[0])
    chord_dy = float(ys[-1] - ys[0])
    chord_len = math.hypot(chord_dx, chord_dy)
    traj_len = float(seg.sum())
    duration_ms = float(t[-1] - t[0])
    i_mid = (n - 1) // 2
    ldp = kin.ldp_index

    put(1, xs[0])
    put(2, ys[0])
    put(3, xs[-1])
    put(4, ys[-1])
    put(5, duration_ms)
    put(6, chord_len)
    put(7, pr[i_mid])
    put(8, ar[i_mid])
    put(9, traj_len)
    if prev_end_ms is None:
        put(10, 0.0, defined=False)
    else:
        put(10, float(t[0]) - prev_end_ms)
    put(11, float(np.hypot(np.mean(np.cos(ph)), np.mean(np.sin(ph)))))

    k5 = min(5, n)
    put(12, float(np.median(acc[:k5 - 2])))
    put(13, float(np.median(vel[-2:])))
    put(14, float(vel.mean()))

    direct_angle = math.atan2(chord_dy, chord_dx)
    if -math.pi / 4 <= direct_angle < math.pi / 4:
        sector = 0  # right
    elif math.pi / 4 <= direct_angle < 3 * math.pi / 4:
        sector = 1  # down: screen y grows downward
    elif -3 * math.pi / 4 <= direct_angle < -math.pi / 4:
        sector = 3  # up
    else:
        sector = 2  # left
    put(15, float(sector))
    put(16, direct_angle)
    put(17, math.atan2(float(np.mean(np.sin(ph))), float(np.mean(np.cos(ph)))))
    put(18, chord_len / traj_len if traj_len > 0 else 0.0, defined=traj_len > 0)

    for fid, q in ((19, 20), (20, 50), (21, 80)):
        put(fid, float(np.percentile(vel, q)))
    for fid, q in ((22, 20), (23, 50), (24, 80)):
        put(fid, float(np.percentile(acc, q)))
    for fid, q in ((25, 20), (26, 50), (27, 80)):
        put(fid, float(np.percentile(dev, q)))
    put(28, float(dev.max()))

    put(29, pr[0])
    put(30, ar[0])
    put(31, float(ph[0]))
    put(32, float(ph.mean()))
    put(33, float(np.abs(pa).mean()) if len(pa) else 0.0, defined=len(pa) > 0)

    # Distance of each interior point to the chord of its two neighbours.
    if n >= 3:
        cd = []
        for i in range(1, n - 1):
            ax_, ay_ = xs[i - 1], ys[i - 1]
            bx_, by_ = xs[i + 1], ys[i + 1]
            ex, ey = bx_ - ax_, by_ - ay_
            nrm = math.hypot(ex, ey)
            if nrm == 0.0:
                cd.append(math.hypot(xs[i] - ax_, ys[i] - ay_))
            else:
                cd.append(abs(ex * (ys[i] - ay_) - ey * (xs[i] - ax_)) / nrm)
        put(34, float(np.mean(cd)))
    else:
        put(34, 0.0, defined=False)

    put(35, float(pr.mean()))
    put(36, float(ar.mean()))
    # argmax/argmin would return a NaN's index, a junk-but-finite position
    put(37, float(np.argmax(ar)) / (n - 1), defined=not bool(np.isnan(ar).any()))
    put(38, float(np.argmin(pr)) / (n - 1), defined=not bool(np.isnan(pr).any()))
    put(39, float(acc.mean()))
    put(40, float(pr.std()))
    put(41, float(ar.std()))
    put(42, float(vel.std()))
    put(43, float(acc.std()))
    for fid, series in ((44, pr), (45, ar), (46, vel), (47, acc)):
        put(fid, float(np.percentile(series, 25)))
    for fid, series in ((48, pr), (49, ar), (50, vel), (51, acc)):
        put(fid, float(np.percentile(series, 75)))

    e1 = int(np.argmax(np.hypot(xs - xs[0], ys - ys[0])))
    e2 = int(np.argmax(np.hypot(xs - xs[-1], ys - ys[-1])))
    put(52, xs[e1])
    put(53, ys[e1])
    put(54, xs[e2])
    put(55, ys[e2])
    put(56, float(ph[-1]))
    put(57, float(vel[0]))
    put(58, ar[-1])
    put(59, pr[-1])
    put(60, float(vel[-1]))
    put(61, float(ph[-1]))
    put(62, float(seg.mean()))
    put(63, float(seg.std()))

    put(64, xs[ldp])
    put(65, ys[ldp])
    put(66, ar[ldp])
    put(67, pr[ldp])
    put(68, kin.point_velocity(ldp))
    put(69, float(t[ldp] - t[0]))
    start_ldp = math.hypot(float(xs[ldp] - xs[0]), float(ys[ldp] - ys[0]))
    ldp_stop = math.hypot(float(xs[-1] - xs[ldp]), float(ys[-1] - ys[ldp]))
    put(70, start_ldp)
    put(71, math.atan2(float(ys[ldp] - ys[0]), float(xs[ldp] - xs[0])))
    put(72, float(t[-1] - t[ldp]))
    put(73, ldp_stop)
    put(74, math.atan2(float(ys[-1] - ys[ldp]), float(xs[-1] - xs[ldp])))
    put(75, start_ldp / chord_len if chord_len > 0 else 0.0, defined=chord_len > 0)

    put(76, chord_len)
    put(77, chord_len / traj_len if traj_len > 0 else 0.0, defined=traj_len > 0)
    put(78, float(np.median(seg)))
    put(79, _iqr(seg))
    put(80, *sample_skewness(seg))
    put(81, *sample_kurtosis(seg))
    put(82, float(dev.mean()))
    put(83, float(dev.std()))
    put(84, _iqr(dev))
    put(85, *sample_skewness(dev))
    put(86, *sample_kurtosis(dev))

    for base, series in ((87, pa), (93, ph)):
        put(base, float(series.mean()) if len(series) else 0.0, defined=len(series) > 0)
        put(base + 1, float(np.median(series)) if len(series) else 0.0,
            defined=len(series) > 0)
        put(base + 2, float(series.std()) if len(series) else 0.0,
            defined=len(series) > 0)
        put(base + 3, _iqr(series) if len(series) else 0.0, defined=len(series) > 0)
        put(base + 4, *sample_skewness(series))
        put(base + 5, *sample_kurtosis(series))

    put(99, chord_len / (duration_ms / 1000.0))
    put(100, _iqr(vel))
    put(101, *sample_skewness(vel))
    put(102, *sample_kurtosis(vel))

    put(103, float(av.mean()) if len(av) else 0.0, defined=len(av) > 0)
    put(104, float(np.median(av)) if len(av) else 0.0, defined=len(av) > 0)
    put(105, float(av.std()) if len(av) else 0.0, defined=len(av) > 0)
    put(106, _iqr(av) if len(av) else 0.0, defined=len(av) > 0)
    put(107, *sample_skewness(av))
    put(108, *sample_kurtosis(av))

    put(109, _iqr(acc))
    put(110, *sample_skewness(acc))
    put(111, *sample_kurtosis(acc))
    put(112, _iqr(pr))
    put(113, *sample_skewness(pr))
    put(114, *sample_kurtosis(pr))

    put(115, float(pr.min()))
    put(116, float(pr.max()))
    put(117, float(ar.min()))
    put(118, float(ar.max()))
    put(119, float(vel.min()))
    put(120, float(vel.max()))

    prd, ard = kin.pressure_delta, kin.area_delta
    put(121, float(prd.min()))
    put(122, float(prd.max()))
    put(123, float(prd.mean()))
    put(124, float(np.median(prd)))
    put(125, float(ard.min()))
    put(126, float(ard.max()))
    put(127, float(ard.mean()))
    put(128, float(np.median(ard)))

    vmax = int(np.argmax(vel))
    vmin = int(np.argmin(vel))
    put(129, xs[vmax])
    put(130, ys[vmax])
    put(131, xs[vmin])
    put(132, ys[vmin])

    # Quadratic pressure profile over normalized arc position (falls back to
    # normalized sample index when the trajectory has zero length).
    if traj_len > 0:
        s = np.concatenate(([0.0], np.cumsum(seg))) / traj_len
    else:
        s = np.arange(n) / (n - 1)
    if len(np.unique(s)) >= 3:
        vander = np.column_stack([s * s, s, np.ones(n)])
        coef, *_ = np.linalg.lstsq(vander, pr, rcond=None)
        put(133, coef[0])
        put(134, coef[1])
        put(135, coef[2])
    else:
        for fid in (133, 134, 135):
            put(fid, 0.0, defined=False)

    put(136, float(kin.dt_ms.min()))
    put(137, float(kin.dt_ms.max()))
    put(138, float(kin.dt_ms.mean()))

    dxm = np.abs(xs - xs.mean())
    dym = np.abs(ys - ys.mean())
    put(139, float(dxm.max()))
    put(140, float(dym.max()))
    put(141, float(np.percentile(dxm, 20)))
    put(142, float(np.percentile(dym, 20)))
    put(143, float(np.median(dxm)))
    put(144, float(np.median(dym)))
    put(145, float(np.percentile(dxm, 80)))
    put(146, float(np.percentile(dym, 80)))

    if chord_len > 0:
        put(147, chord_dx / chord_len)
        put(148, chord_dy / chord_len)
    else:
        put(147, 0.0, defined=False)
        put(148, 0.0, defined=False)
    put(149, 1.0 if abs(chord_dx) >= abs(chord_dy) else 0.0)

    return FeatureVector(values=vals, defined=mask)


@dataclass
class FeatureTable:
    """Feature vectors for every swipe of a dataset, in deterministic order
    (users sorted, sessions chronological, swipes in stream order)."""

    dataset_name: str
    feature_ids: tuple[int, ...]
    X: np.ndarray            # (n_swipes, n_features)
    defined: np.ndarray      # same shape, bool
    user_ids: list[str]
    session_ids: list[str]
    user_sessions: dict[str, list[tuple[str, np.ndarray]]]

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    def labels(self) -> np.ndarray:
        return np.array(self.user_ids, dtype=object)

    def rows_of_user(self, user_id: str) -> np.ndarray:
        return np.concatenate([idx for _, idx in self.user_sessions[user_id]])

    def select(self, ids) -> "FeatureTable":
        """A table restricted to the given feature ids (columns copied)."""
        ids = resolve_feature_ids(ids)
        col = {fid: i for i, fid in enumerate(self.feature_ids)}
        try:
            take = [col[fid] for fid in ids]
        except KeyError as err:
            raise EmptyMatrix(f"feature id {err} not in table") from None
        return FeatureTable(
            dataset_name=self.dataset_name, feature_ids=ids,
            X=self.X[:, take].copy(), defined=self.defined[:, take].copy(),
            user_ids=self.user_ids, session_ids=self.session_ids,
            user_sessions=self.user_sessions)


def build_feature_table(dataset: Dataset, ids=ALL_IDS) -> FeatureTable:
    """Extract vectors for every swipe, threading inter-stroke context
    through each session."""
    ids = resolve_feature_ids(ids)
    idx = np.asarray(ids, dtype=int) - 1
    rows, defs = [], []
    user_ids: list[str] = []
    session_ids: list[str] = []
    user_sessions: dict[str, list[tuple[str, np.ndarray]]] = {}
    row = 0
    for user_id in dataset.user_ids():
        sessions = []
        for session in dataset.users[user_id].sessions:
            first = row
            prev_end: int | None = None
            for swipe in session.swipes:
                fv = extract_features(swipe, prev_end_ms=prev_end)
                rows.append(fv.values[idx])
                defs.append(fv.defined[idx])
                user_ids.append(user_id)
                session_ids.append(session.session_id)
                prev_end = swipe.end_ms
                row += 1
            sessions.append((session.session_id, np.arange(first, row)))
        user_sessions[user_id] = sessions
    if not rows:
        raise EmptyMatrix(f"dataset {dataset.name!r} has no swipes")
    return FeatureTable(
        dataset_name=dataset.name, feature_ids=ids,
        X=np.vstack(rows), defined=np.vstack(defs),
        user_ids=user_ids, session_ids=session_ids,
        user_sessions=user_sessions)


def export_table_csv(table: FeatureTable) -> str:
    """CSV dump; undefined cells are left empty."""
    header = ["dataset", "user_id", "session_id", "row"] + [
        f"f{fid}" for fid in table.feature_ids]
    lines = [",".join(header)]
    for i in range(table.n_rows):
        cells = [table.dataset_name, table.user_ids[i], table.session_ids[i], str(i)]
        for j in range(len(table.feature_ids)):
            cells.append(repr(float(table.X[i, j])) if table.defined[i, j] else "")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def export_table_json(table: FeatureTable) -> dict:
    out = []
    for i in range(table.n_rows):
        out.append({
            "user_id": table.user_ids[i],
            "session_id": table.session_ids[i],
            "row": i,
            "values": {str(fid): float(table.X[i, j])
                       for j, fid in enumerate(table.feature_ids)},
            "undefined": [int(fid) for j, fid in enumerate(table.feature_ids)
                          if not table.defined[i, j]],
        })
    return {"dataset": table.dataset_name,
            "feature_ids": list(table.feature_ids),
            "rows": out}
