"""Canonical format parsing, writing, and raw-export adapters."""

import math

import pytest

from swipebench.errors import (ConfigError, EmptyDataset,
                               MalformedRateExceeded, UnparseableHeader)
from swipebench.ingest import (AdapterConfig, convert_raw, load_canonical,
                               parse_canonical, write_canonical)
from swipebench.touchdata import assemble_dataset

HEADER = "dataset,user_id,session_id,device_model,t_ms,phase,x,y,pressure,area"


def csv_line(t, phase, *, x=1.0, y=2.0, pressure="0.5", area="0.3",
             user="u1", session="s1"):
    return f"unit,{user},{session},dev,{t},{phase},{x},{y},{pressure},{area}"


def stroke_lines(t0, n, **kw):
    phases = ["down"] + ["move"] * (n - 2) + ["up"]
    return [csv_line(t0 + 20 * i, ph, x=float(i), y=float(2 * i), **kw)
            for i, ph in enumerate(phases)]


def test_parse_csv_roundtrip_fields():
    text = "\n".join([HEADER] + stroke_lines(0, 5)) + "\n"
    records, report = parse_canonical(text)
    assert len(records) == 5
    assert report.lines_total == 5 and report.lines_malformed == 0
    first = records[0]
    assert (first.user_id, first.session_id, first.phase) == ("u1", "s1", "down")
    assert first.pressure == 0.5


def test_parse_jsonl():
    lines = []
    for i, phase in enumerate(["down", "move", "move", "up"]):
        lines.append(
            '{"dataset": "unit", "user_id": "u1", "session_id": "s1", '
            '"device_model": "dev", "t_ms": %d, "phase": "%s", '
            '"x": %f, "y": 2.0, "pressure": null, "area": 0.3}'
            % (i * 20, phase, float(i)))
    records, report = parse_canonical("\n".join(lines))
    assert len(records) == 4
    assert math.isnan(records[0].pressure)
    assert records[0].area == 0.3


def test_empty_channel_becomes_nan():
    text = "\n".join([HEADER, csv_line(0, "down", pressure="", area="nan")])
    records, _ = parse_canonical(text)
    assert math.isnan(records[0].pressure) and math.isnan(records[0].area)


def test_malformed_lines_tolerated_below_rate():
    lines = [HEADER] + stroke_lines(0, 120)
    lines.insert(5, "unit,u1,s1,dev,not-a-number,move,1,2,0.5,0.3")
    records, report = parse_canonical("\n".join(lines),
                                      max_malformed_rate=0.05)
    assert report.lines_malformed == 1
    assert len(records) == 120
    assert report.malformed_examples and "line 6" in report.malformed_examples[0]


def test_malformed_rate_exceeded_raises():
    lines = [HEADER] + stroke_lines(0, 5)
    lines.append("unit,u1,s1,dev,bad,move,1,2,0.5,0.3")
    with pytest.raises(MalformedRateExceeded):
        parse_canonical("\n".join(lines), max_malformed_rate=0.01)


def test_non_integer_millisecond_is_malformed():
    lines = [HEADER] + stroke_lines(0, 5)
    lines.append(csv_line("7.25", "move"))
    records, report = parse_canonical("\n".join(lines), max_malformed_rate=0.5)
    assert report.lines_malformed == 1
    assert len(records) == 5


def test_header_validation():
    with pytest.raises(UnparseableHeader):
        parse_canonical("a,b,c\n1,2,3\n")
    with pytest.raises(EmptyDataset):
        parse_canonical("   \n")


def test_write_and_load_roundtrip(tmp_path):
    text = "\n".join([HEADER] + stroke_lines(0, 5)
                     + stroke_lines(1000, 4, session="s2")
                     + stroke_lines(0, 6, user="u2")) + "\n"
    records, _ = parse_canonical(text)
    ds, _ = assemble_dataset("unit", records)

    for fmt, fname in (("csv", "out.csv"), ("jsonl", "out.jsonl")):
        path = tmp_path / fname
        write_canonical(ds, path, fmt=fmt)
        ds2, report = load_canonical(path)
        assert ds2.user_ids() == ds.user_ids()
        assert ds2.n_swipes == ds.n_swipes
        for uid in ds.user_ids():
            a = [sw.samples for s in ds.users[uid].sessions for sw in s.swipes]
            b = [sw.samples for s in ds2.users[uid].sessions for sw in s.swipes]
            assert a == b


def test_write_canonical_is_deterministic(tmp_path):
    text = "\n".join([HEADER] + stroke_lines(0, 5)) + "\n"
    records, _ = parse_canonical(text)
    ds, _ = assemble_dataset("unit", records)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_canonical(ds, p1)
    write_canonical(ds, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_write_canonical_rejects_unknown_format(tmp_path):
    text = "\n".join([HEADER] + stroke_lines(0, 5)) + "\n"
    records, _ = parse_canonical(text)
    ds, _ = assemble_dataset("unit", records)
    with pytest.raises(ConfigError):
        write_canonical(ds, tmp_path / "x.bin", fmt="parquet")


ADAPTER = """
# maps a headerless vendor export
dataset = vendor
has_header = false
col.device_model = 0
col.user_id = 1
col.session_id = 2
col.t = 3
col.phase = 4
col.x = 6
col.y = 7
col.pressure = 8
col.area = 9
phase.0 = down
phase.1 = up
phase.2 = move
"""


def raw_rows():
    rows = []
    for i, code in enumerate(["0", "2", "2", "2", "1"]):
        rows.append(f"phone9,42,7,{i * 20},{code},9,{10.0 + i},{20.0 + i},0.4,0.2")
    return rows


def test_adapter_loads_and_converts(tmp_path):
    conf = tmp_path / "vendor.conf"
    conf.write_text(ADAPTER)
    adapter = AdapterConfig.load(conf)
    assert adapter.dataset == "vendor"
    assert not adapter.has_header
    assert adapter.phase_map == {"0": "down", "1": "up", "2": "move"}

    raw = tmp_path / "raw.csv"
    raw.write_text("\n".join(raw_rows()) + "\n")
    records, report = convert_raw(raw, adapter)
    assert len(records) == 5
    assert report.lines_malformed == 0
    first = records[0]
    assert first.dataset == "vendor"
    assert (first.user_id, first.session_id) == ("42", "7")
    assert first.device_model == "phone9"
    assert first.phase == "down"
    ds, counts = assemble_dataset(adapter.dataset, records)
    assert counts.swipes == 1


def test_adapter_validation(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("dataset = d\ncol.user_id = 0\n")
    with pytest.raises(ConfigError):
        AdapterConfig.load(conf)
    conf.write_text("dataset = d\ncol.user_id = 0\ncol.session_id = 1\n"
                    "col.t = 2\ncol.phase = 3\ncol.x = 4\ncol.y = 5\n"
                    "phase.0 = hover\n")
    with pytest.raises(ConfigError):
        AdapterConfig.load(conf)
    conf.write_text("col.user_id = 0\n")
    with pytest.raises(ConfigError):
        AdapterConfig.load(conf)


def test_adapter_time_scaling(tmp_path):
    conf = tmp_path / "sec.conf"
    conf.write_text(ADAPTER + "t_unit = s\n")
    adapter = AdapterConfig.load(conf)
    raw = tmp_path / "raw.csv"
    rows = []
    for i, code in enumerate(["0", "2", "2", "1"]):
        rows.append(f"p,1,1,{i * 0.5},{code},9,{float(i)},{float(i)},0.4,0.2")
    raw.write_text("\n".join(rows) + "\n")
    records, _ = convert_raw(raw, adapter)
    assert [r.t for r in records] == [0, 500, 1000, 1500]


def test_packaged_touchalytics_adapter_parses():
    from importlib import resources
    ref = resources.files("swipebench.data") / "adapters" / "touchalytics.conf"
    with resources.as_file(ref) as path:
        adapter = AdapterConfig.load(path)
    assert not adapter.has_header
    assert set(adapter.phase_map.values()) == {"down", "move", "up"}
    for fld in ("user_id", "session_id", "t", "phase", "x", "y",
                "pressure", "area", "device_model"):
        assert fld in adapter.columns, fld
