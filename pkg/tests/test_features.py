"""Feature extraction against the independent definitional oracle."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from helpers import build_swipe, random_swipe
from oracles import oracle_features
from swipebench.errors import EmptyMatrix
from swipebench.features.extract import build_feature_table, extract_features
from swipebench.touchdata import Dataset, Session, UserData

GOLDEN = Path(__file__).parent / "data" / "golden_feature_vector.json"

N_FUZZED = 60
FUZZ_SEED = 7741


def assert_vectors_match(fv, vals, defined, tol=1e-9):
    for i in range(149):
        fid = i + 1
        assert bool(fv.defined[i]) == bool(defined[i]), f"id {fid} mask"
        a, b = float(fv.values[i]), float(vals[i])
        bound = tol * max(1.0, abs(a), abs(b))
        assert abs(a - b) <= bound, f"id {fid}: {a} != {b}"


def oracle_of(swipe, prev_end_ms=None):
    return oracle_features(
        [int(v) for v in swipe.t_ms], list(swipe.xs), list(swipe.ys),
        list(swipe.pressures), list(swipe.areas), prev_end_ms)


def golden_swipe():
    doc = json.loads(GOLDEN.read_text())
    sw = doc["swipe"]
    swipe = build_swipe(sw["t_ms"], sw["x"], sw["y"], sw["pressure"],
                        sw["area"])
    return doc, swipe


def test_golden_vector_matches_extraction():
    doc, swipe = golden_swipe()
    fv = extract_features(swipe, prev_end_ms=doc["swipe"]["prev_end_ms"])
    assert_vectors_match(fv, doc["values"], doc["defined"])
    assert all(doc["defined"])


def test_golden_vector_matches_oracle_recomputation():
    # guards the frozen file against accidental edits of either side
    doc, swipe = golden_swipe()
    vals, defined = oracle_of(swipe, doc["swipe"]["prev_end_ms"])
    assert vals == pytest.approx(doc["values"], abs=0, rel=0)
    assert defined == doc["defined"]


def test_fuzzed_swipes_match_oracle():
    rng = np.random.default_rng(FUZZ_SEED)
    for case in range(N_FUZZED):
        swipe = random_swipe(rng)
        prev = int(swipe.start_ms - rng.integers(50, 4000))
        fv = extract_features(swipe, prev_end_ms=prev)
        vals, defined = oracle_of(swipe, prev)
        assert_vectors_match(fv, vals, defined)


def test_minimum_length_swipe_matches_oracle():
    swipe = build_swipe([100, 112, 125, 140], [10.0, 30.0, 55.0, 85.0],
                        [20.0, 28.0, 31.0, 44.0],
                        [0.2, 0.4, 0.5, 0.3], [0.1, 0.2, 0.25, 0.15])
    fv = extract_features(swipe)
    vals, defined = oracle_of(swipe)
    assert_vectors_match(fv, vals, defined)
    # n=4: kurtosis needs 4 obs (segments have 3), turn angles have 2
    for fid in (81, 91, 92, 107, 108):
        assert not fv.is_defined(fid)
    assert fv.is_defined(80)


def test_inter_stroke_time_masked_without_context():
    swipe = build_swipe([0, 15, 30, 50], [0, 10, 20, 30], [0, 5, 15, 30])
    fv = extract_features(swipe)
    assert not fv.is_defined(10)
    fv2 = extract_features(swipe, prev_end_ms=-120)
    assert fv2.is_defined(10)
    assert fv2.value(10) == 120.0


def test_stationary_swipe_masks_ratio_features():
    swipe = build_swipe([0, 20, 40, 60, 80], [50.0] * 5, [70.0] * 5,
                        [0.3, 0.4, 0.5, 0.4, 0.3], [0.2] * 5)
    fv = extract_features(swipe)
    for fid in (18, 75, 77, 147, 148):
        assert not fv.is_defined(fid), fid
    assert fv.value(6) == 0.0 and fv.value(9) == 0.0
    # trajectory has zero length, so the pressure fit runs on sample index
    vals, defined = oracle_of(swipe)
    assert_vectors_match(fv, vals, defined)
    assert fv.is_defined(133)


def test_straight_horizontal_swipe():
    xs = [10.0, 40.0, 80.0, 130.0, 190.0]
    swipe = build_swipe([0, 12, 26, 43, 61], xs, [300.0] * 5)
    fv = extract_features(swipe)
    assert fv.value(15) == 0.0          # rightward sector
    assert fv.value(28) == 0.0          # no chord deviation anywhere
    assert fv.value(149) == 1.0
    assert fv.value(85) == 0.0 and fv.is_defined(85)
    assert fv.value(6) == pytest.approx(fv.value(9))
    assert_vectors_match(fv, *oracle_of(swipe))


def test_sector_feature_covers_all_quadrants():
    def sector_of(dx, dy):
        swipe = build_swipe([0, 15, 30, 50],
                            [0.0, dx / 3, 2 * dx / 3, dx],
                            [0.0, dy / 3, 2 * dy / 3, dy])
        return extract_features(swipe).value(15)

    assert sector_of(100.0, 0.0) == 0.0      # right
    assert sector_of(0.0, 100.0) == 1.0      # down on screen
    assert sector_of(-100.0, 0.0) == 2.0     # left
    assert sector_of(0.0, -100.0) == 3.0     # up
    assert sector_of(100.0, 100.0) == 1.0    # boundary goes to down
    assert sector_of(100.0, -100.0) == 0.0   # boundary goes to right


def test_nan_pressure_masks_pressure_features():
    pr = [0.2, float("nan"), 0.5, 0.4]
    swipe = build_swipe([0, 15, 30, 50], [0, 10, 25, 45], [5, 15, 30, 50],
                        pr, [0.1, 0.2, 0.3, 0.2])
    fv = extract_features(swipe)
    for fid in (35, 38, 40, 44, 48, 112, 113, 115, 116,
                121, 122, 123, 124, 133, 134, 135):
        assert not fv.is_defined(fid), fid
    # area-side features stay defined
    for fid in (30, 36, 37, 41, 58, 117, 118):
        assert fv.is_defined(fid), fid
    # single-sample lookups hit finite samples here and stay defined
    assert fv.is_defined(29) and fv.value(29) == 0.2
    assert fv.is_defined(59) and fv.value(59) == 0.4
    # mid-sample pressure is index 1 here, the NaN itself
    assert not fv.is_defined(7)


def test_largest_deviation_point_block():
    # spike at index 2 is the unique farthest point from the chord
    swipe = build_swipe([0, 10, 25, 40, 55, 70],
                        [0.0, 20.0, 40.0, 60.0, 80.0, 100.0],
                        [0.0, 2.0, 60.0, 4.0, 2.0, 0.0],
                        [0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
                        [0.6, 0.5, 0.4, 0.3, 0.2, 0.1])
    fv = extract_features(swipe)
    assert fv.value(64) == 40.0 and fv.value(65) == 60.0
    assert fv.value(66) == 0.4 and fv.value(67) == 0.3
    assert fv.value(69) == 25.0 and fv.value(72) == 45.0
    assert fv.value(70) == pytest.approx(math.hypot(40.0, 60.0))
    assert fv.value(73) == pytest.approx(math.hypot(60.0, 60.0))
    assert fv.value(75) == pytest.approx(math.hypot(40.0, 60.0) / 100.0)
    assert_vectors_match(fv, *oracle_of(swipe))


def test_feature_vector_accessors():
    _, swipe = golden_swipe()
    fv = extract_features(swipe)
    assert fv.value(5) == float(fv.values[4])
    vals, defs = fv.take([3, 1, 149])
    assert vals.shape == (3,) and defs.shape == (3,)
    assert vals[0] == fv.value(3) and vals[2] == fv.value(149)


def make_two_session_dataset():
    rng = np.random.default_rng(42)
    s1 = [random_swipe(rng, user="ua", session="s1") for _ in range(3)]
    s2 = [random_swipe(rng, user="ua", session="s2") for _ in range(2)]
    sb = [random_swipe(rng, user="ub", session="s9") for _ in range(4)]
    users = {
        "ua": UserData(user_id="ua", sessions=[
            Session(session_id="s1", device_model="d", swipes=s1),
            Session(session_id="s2", device_model="d", swipes=s2)]),
        "ub": UserData(user_id="ub", sessions=[
            Session(session_id="s9", device_model="d", swipes=sb)]),
    }
    return Dataset(name="two", users=users)


def test_build_feature_table_layout():
    ds = make_two_session_dataset()
    table = build_feature_table(ds)
    assert table.X.shape == (9, 149)
    assert table.defined.shape == (9, 149)
    assert table.user_ids == ["ua"] * 5 + ["ub"] * 4
    assert table.session_ids == ["s1", "s1", "s1", "s2", "s2"] + ["s9"] * 4
    assert [sid for sid, _ in table.user_sessions["ua"]] == ["s1", "s2"]
    np.testing.assert_array_equal(table.rows_of_user("ub"), [5, 6, 7, 8])


def test_build_feature_table_threads_inter_stroke_time():
    ds = make_two_session_dataset()
    table = build_feature_table(ds)
    col10 = 9  # feature id 10 lives at column index 9
    defined10 = table.defined[:, col10]
    # first swipe of each session has no predecessor
    assert not defined10[0] and not defined10[3] and not defined10[5]
    assert defined10[1] and defined10[2] and defined10[4]
    swipes = ds.users["ua"].sessions[0].swipes
    expected = swipes[1].start_ms - swipes[0].end_ms
    assert table.X[1, col10] == float(expected)


def test_table_select_subsets_columns():
    table = build_feature_table(make_two_session_dataset())
    sub = table.select([5, 9, 120])
    assert sub.feature_ids == (5, 9, 120)
    np.testing.assert_array_equal(sub.X[:, 0], table.X[:, 4])
    np.testing.assert_array_equal(sub.X[:, 2], table.X[:, 119])
    sub2 = sub.select([9])
    np.testing.assert_array_equal(sub2.X[:, 0], table.X[:, 8])
    with pytest.raises(EmptyMatrix):
        sub.select([6])


def test_empty_dataset_raises():
    with pytest.raises(EmptyMatrix):
        build_feature_table(Dataset(name="empty", users={}))
