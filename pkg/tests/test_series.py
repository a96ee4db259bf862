import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from popcurve.errors import EmptyFile, MalformedCsv, TooShort
from popcurve.series import RawSeries, ingest_csv, preprocess


def make_raw(values, name="sp"):
    return RawSeries(values=np.asarray(values, dtype=float), species_name=name)


def test_preprocess_max_scales_25000_example():
    vals = [25000.0, 12500.0] + [0.0] * 398
    out = preprocess(make_raw(vals), 400)
    assert out.values[0] == 1.0
    assert out.values[1] == 0.5
    assert out.values[2] == 0.0
    assert len(out) == 400


def test_preprocess_constant_rescales_to_unity():
    out = preprocess(make_raw([7.0] * 400), 400)
    assert np.all(out.values == 1.0)


def test_preprocess_all_zero_stays_zero():
    out = preprocess(make_raw([0.0] * 400), 400)
    assert np.all(out.values == 0.0)


def test_preprocess_too_short():
    with pytest.raises(TooShort):
        preprocess(make_raw([1.0] * 399), 400)


def test_preprocess_truncates_to_prefix():
    vals = list(range(1, 500))
    out = preprocess(make_raw(vals), 400)
    assert len(out) == 400
    # max over the truncated window, not the full series
    assert out.values[-1] == 1.0


def test_preprocess_idempotent():
    rng = np.random.default_rng(0)
    raw = make_raw(rng.uniform(0, 100, 400))
    once = preprocess(raw, 400)
    twice = preprocess(make_raw(once.values), 400)
    np.testing.assert_array_equal(once.values, twice.values)


@given(st.floats(min_value=1e-6, max_value=1e6), st.integers(0, 2**31 - 1))
@settings(max_examples=50, deadline=None)
def test_preprocess_scale_invariant(k, seed):
    vals = np.random.default_rng(seed).uniform(0, 50, 40)
    base = preprocess(make_raw(vals), 40)
    scaled = preprocess(make_raw(vals * k), 40)
    np.testing.assert_allclose(base.values, scaled.values, rtol=1e-12, atol=1e-15)


def test_raw_series_rejects_bad_values():
    with pytest.raises(ValueError):
        make_raw([1.0, -2.0])
    with pytest.raises(ValueError):
        make_raw([1.0, np.nan])
    with pytest.raises(ValueError):
        make_raw([])


def test_ingest_csv_basic(tmp_path):
    path = tmp_path / "m1.csv"
    rows = ["t,wolves,sheep"] + [f"{t},{t * 2},{t * 3}" for t in range(400)]
    path.write_text("\n".join(rows))
    series = ingest_csv(path)
    assert len(series) == 2
    assert [s.species_name for s in series] == ["wolves", "sheep"]
    assert series[0].model_id == "m1"
    assert series[0].values.size == 400


def test_ingest_csv_single_row_then_too_short(tmp_path):
    path = tmp_path / "m2.csv"
    path.write_text("t,a\n0,5\n")
    (raw,) = ingest_csv(path)
    assert raw.values.size == 1
    with pytest.raises(TooShort):
        preprocess(raw, 400)


def test_ingest_csv_non_numeric_names_row_and_column(tmp_path):
    path = tmp_path / "m3.csv"
    rows = ["t,a"] + [f"{t},1" for t in range(3)]
    rows[3] = "2,abc"
    path.write_text("\n".join(rows))
    with pytest.raises(MalformedCsv) as exc:
        ingest_csv(path)
    assert "row 4" in str(exc.value)
    assert "column 2" in str(exc.value)


def test_ingest_csv_ragged_rows(tmp_path):
    path = tmp_path / "m4.csv"
    path.write_text("t,a,b\n0,1,2\n1,3\n")
    with pytest.raises(MalformedCsv):
        ingest_csv(path)


def test_ingest_csv_empty(tmp_path):
    path = tmp_path / "m5.csv"
    path.write_text("")
    with pytest.raises(EmptyFile):
        ingest_csv(path)


def test_ingest_csv_rejects_negative(tmp_path):
    path = tmp_path / "m6.csv"
    path.write_text("t,a\n0,1\n1,-4\n")
    with pytest.raises(MalformedCsv):
        ingest_csv(path)
