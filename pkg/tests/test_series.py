import numpy as np
import pytest

from driven_cavity import TimeSeries, read_series, write_series
from driven_cavity.series import write_rows


def test_round_trip_is_exact(tmp_path, rng):
    ts = TimeSeries(np.linspace(0, 1, 11), {"a": rng.normal(size=11), "b": rng.random(11) * 1e-300})
    write_series(ts, tmp_path / "s.csv")
    back = read_series(tmp_path / "s.csv")
    assert np.array_equal(back.times, ts.times)
    for name in ts.columns:
        assert np.array_equal(back[name], ts[name])


def test_header_and_column_count(tmp_path):
    write_series(TimeSeries([0.0, 0.5], {"x": [1, 2], "y": [3, 4]}), tmp_path / "s.csv", time_label="time")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "time,x,y"
    assert all(line.count(",") == 2 for line in lines)


def test_negative_zero_is_written_as_zero(tmp_path):
    write_series(TimeSeries([0.0], {"x": [-0.0]}), tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text().splitlines()[1] == "0,0"


@pytest.mark.parametrize("bad", [np.nan, np.inf])
def test_refuses_non_finite(tmp_path, bad):
    with pytest.raises(ValueError):
        write_series(TimeSeries([0.0, 1.0], {"x": [1.0, bad]}), tmp_path / "s.csv")


def test_mismatched_column():
    with pytest.raises(ValueError):
        TimeSeries([0.0, 1.0], {"x": [1.0]})


def test_byte_identical_rewrites(tmp_path, rng):
    ts = TimeSeries(np.arange(5) * 0.1, {"x": rng.normal(size=5)})
    write_series(ts, tmp_path / "a.csv")
    write_series(ts, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_rows(tmp_path):
    write_rows(tmp_path / "sub" / "j.csv", ["time", "channel"], [[0.25, "cavity"], [1.5, "spontaneous"]])
    assert (tmp_path / "sub" / "j.csv").read_text() == "time,channel\n0.25,cavity\n1.5,spontaneous\n"
