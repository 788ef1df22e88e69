import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from meterfuse import (
    ColumnMap,
    MeasurementId,
    SystemTag,
    TimeFormat,
    load_corpus,
    load_manifest,
    parse_csv,
    series_to_csv,
)
from meterfuse.errors import (
    DuplicateId,
    IoError,
    MissingColumn,
    UnparseableTime,
    UnparseableValue,
)

from conftest import mkseries

ION_X = MeasurementId(SystemTag.ION, "ION-X")
COLS = ColumnMap("ts", "val")


def test_parse_epoch_millis():
    s = parse_csv(b"ts,val\n1000,0.5\n2000,0.7\n", ION_X, COLS, TimeFormat.EPOCH_MILLIS)
    assert s.samples == [(1000, 0.5), (2000, 0.7)]


def test_parse_epoch_seconds_scales():
    s = parse_csv(b"ts,val\n1000,0.5\n2000,0.7\n", ION_X, COLS, TimeFormat.EPOCH_SECONDS)
    assert s.samples == [(1_000_000, 0.5), (2_000_000, 0.7)]


def test_parse_iso8601():
    s = parse_csv(
        b"ts,val\n1970-01-01T00:00:01Z,1.5\n1970-01-01T00:00:02+00:00,2.5\n",
        ION_X,
        COLS,
        TimeFormat.ISO8601,
    )
    assert s.samples == [(1000, 1.5), (2000, 2.5)]


def test_missing_column():
    with pytest.raises(MissingColumn):
        parse_csv(b"ts,other\n1,2\n", ION_X, COLS)


def test_blank_value_rows_skipped():
    s = parse_csv(b"ts,val\n1,\n2,5.0\n3,  \n", ION_X, COLS)
    assert s.samples == [(2, 5.0)]


def test_unparseable_time_reports_row():
    with pytest.raises(UnparseableTime) as exc:
        parse_csv(b"ts,val\n1,1.0\nnope,2.0\n", ION_X, COLS)
    assert exc.value.row == 2


def test_negative_epoch_rejected():
    with pytest.raises(UnparseableTime):
        parse_csv(b"ts,val\n-5,1.0\n", ION_X, COLS)


def test_unparseable_value_reports_row():
    with pytest.raises(UnparseableValue) as exc:
        parse_csv(b"ts,val\n1,abc\n", ION_X, COLS)
    assert exc.value.row == 1


def test_parse_sorts_out_of_order_rows():
    s = parse_csv(b"ts,val\n5,1.0\n2,2.0\n", ION_X, COLS)
    assert s.samples == [(2, 2.0), (5, 1.0)]


@given(
    st.lists(
        st.tuples(st.integers(0, 10**13), st.floats(-1e9, 1e9, allow_nan=False)),
        max_size=40,
    )
)
def test_csv_round_trip(pairs):
    from meterfuse import validate_series

    s = validate_series(mkseries(pairs, name="ION-X"))
    text = series_to_csv(s, TimeFormat.EPOCH_MILLIS)
    assert parse_csv(text, s.id) == s


def test_round_trip_epoch_seconds():
    s = mkseries([(1500, 0.25), (7000, -3.5)], name="ION-X")
    text = series_to_csv(s, TimeFormat.EPOCH_SECONDS)
    assert parse_csv(text, s.id, time_format=TimeFormat.EPOCH_SECONDS) == s


def _write_corpus(tmp_path, names):
    entries = []
    for system, name in names:
        path = tmp_path / f"{name}.csv"
        path.write_text("timestamp,value\n1000,1.0\n2000,2.0\n", encoding="utf-8")
        entries.append(
            {
                "system": system,
                "name": name,
                "path": path.name,
                "time_column": "timestamp",
                "value_column": "value",
                "time_format": "EPOCH_MILLIS",
            }
        )
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"entries": entries}), encoding="utf-8")
    return manifest


def test_load_empty_manifest(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"entries": []}), encoding="utf-8")
    corpus = load_corpus(load_manifest(manifest))
    assert len(corpus) == 0


def test_load_corpus_partitions(tmp_path):
    manifest = _write_corpus(
        tmp_path,
        [("ION", "ION-1"), ("ION", "ION-2"), ("HIST", "H-1"), ("HIST", "H-2"), ("HIST", "H-3")],
    )
    corpus = load_corpus(load_manifest(manifest))
    assert len(corpus.partition(SystemTag.ION)) == 2
    assert len(corpus.partition(SystemTag.HIST)) == 3


def test_duplicate_id_rejected(tmp_path):
    manifest = _write_corpus(tmp_path, [("ION", "ION-1"), ("ION", "ION-1")])
    with pytest.raises(DuplicateId):
        load_corpus(load_manifest(manifest))


def test_missing_file_is_io_error(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(
        json.dumps(
            {
                "entries": [
                    {
                        "system": "ION",
                        "name": "ION-1",
                        "path": "nowhere.csv",
                        "time_column": "timestamp",
                        "value_column": "value",
                        "time_format": "EPOCH_MILLIS",
                    }
                ]
            }
        ),
        encoding="utf-8",
    )
    with pytest.raises(IoError):
        load_corpus(load_manifest(manifest))


def test_parse_error_tagged_with_entry(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,value\nx,1.0\n", encoding="utf-8")
    manifest = tmp_path / "manifest.json"
    manifest.write_text(
        json.dumps(
            {
                "entries": [
                    {
                        "system": "HIST",
                        "name": "HIST-bad",
                        "path": "bad.csv",
                        "time_column": "timestamp",
                        "value_column": "value",
                        "time_format": "EPOCH_MILLIS",
                    }
                ]
            }
        ),
        encoding="utf-8",
    )
    with pytest.raises(UnparseableTime) as exc:
        load_corpus(load_manifest(manifest))
    assert exc.value.entry == "HIST-bad"


def test_load_corpus_deterministic(tmp_path):
    manifest = _write_corpus(tmp_path, [("ION", "ION-1"), ("HIST", "H-1")])
    a = load_corpus(load_manifest(manifest))
    b = load_corpus(load_manifest(manifest))
    assert a.series_by_id == b.series_by_id
