import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emgmix.errors import DegenerateWindowError, DomainError
from emgmix.signals import CsvFormatError, SignalWindow, as_samples, concatenate, ingest_csv, window_signal


def write(tmp_path, text, name="sig.csv"):
    p = tmp_path / name
    p.write_bytes(text.encode())
    return p


def test_ingest_single_column(tmp_path):
    w = ingest_csv(write(tmp_path, "0\n1\n-1\n"), 2000)
    np.testing.assert_array_equal(w.samples, [0.0, 1.0, -1.0])
    assert w.sample_rate_hz == 2000.0 and w.label == "sig"


def test_ingest_header_and_time_column(tmp_path):
    w = ingest_csv(write(tmp_path, "t,emg\n0,0.5\n"), 2000)
    np.testing.assert_array_equal(w.samples, [0.5])


def test_ingest_crlf_and_blank_lines(tmp_path):
    w = ingest_csv(write(tmp_path, "value\r\n1.5\r\n\r\n-2\r\n"), 1000, label="x")
    np.testing.assert_array_equal(w.samples, [1.5, -2.0])
    assert w.label == "x"


def test_ingest_rejects_nan_with_line(tmp_path):
    with pytest.raises(CsvFormatError, match=":3:"):
        ingest_csv(write(tmp_path, "0\n1\nnan\n"), 2000)


@pytest.mark.parametrize("text, pattern", [
    ("", "no samples"),
    ("header\n", "no samples"),
    ("1,2,3\n", "columns"),
    ("1\nabc\n", ":2:"),
    ("1\ninf\n", "non-finite"),
])
def test_ingest_errors(tmp_path, text, pattern):
    with pytest.raises(CsvFormatError, match=pattern):
        ingest_csv(write(tmp_path, text), 2000)


def test_ingest_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        ingest_csv(tmp_path / "nope.csv", 2000)


def test_window_validation():
    with pytest.raises(DegenerateWindowError):
        SignalWindow(np.array([]))
    with pytest.raises(DomainError):
        SignalWindow(np.array([1.0, np.inf]))
    with pytest.raises(DomainError):
        SignalWindow(np.array([1.0]), sample_rate_hz=0.0)
    w = SignalWindow([1.0, 2.0, 3.0], 2.0)
    assert len(w) == 3 and w.duration_s == 1.5
    with pytest.raises(ValueError):
        w.samples[0] = 5.0


def test_mean_subtracted_and_concat():
    a = SignalWindow([1.0, 3.0], 10.0, "a")
    np.testing.assert_allclose(a.mean_subtracted().samples, [-1.0, 1.0])
    c = concatenate([a, SignalWindow([5.0], 10.0)], label="ab")
    np.testing.assert_array_equal(c.samples, [1.0, 3.0, 5.0])
    with pytest.raises(DomainError):
        concatenate([a, SignalWindow([5.0], 20.0)])
    with pytest.raises(DegenerateWindowError):
        concatenate([])


def test_as_samples():
    np.testing.assert_array_equal(as_samples([[1, 2], [3, 4]]), [1.0, 2.0, 3.0, 4.0])
    with pytest.raises(DegenerateWindowError):
        as_samples([])


def test_trailing_window():
    sig = SignalWindow(np.arange(20000.0), 2000.0)
    (w,) = window_signal(sig, 5.0)
    assert len(w) == 10000
    np.testing.assert_array_equal(w.samples, np.arange(10000.0, 20000.0))


def test_sliding_windows():
    sig = SignalWindow(np.arange(20000.0), 2000.0)
    ws = window_signal(sig, 2.0, 2.0, mode="sliding")
    assert len(ws) == 5 and all(len(w) == 4000 for w in ws)
    ws = window_signal(sig, 3.0, mode="sliding")
    assert len(ws) == 3  # final partial window dropped
    ws = window_signal(sig, 2.0, 1.0, mode="sliding")
    assert len(ws) == 9 and ws[1].samples[0] == 2000.0


def test_window_errors():
    sig = SignalWindow(np.zeros(6000), 2000.0)
    with pytest.raises(DomainError, match="shorter"):
        window_signal(sig, 5.0)
    with pytest.raises(DomainError):
        window_signal(sig, 0.0005)
    with pytest.raises(DomainError):
        window_signal(sig, 1.0, mode="hopping")


@given(st.integers(2, 3000), st.integers(2, 400), st.integers(1, 400))
def test_sliding_count_and_coverage(total, n, step):
    sig = SignalWindow(np.arange(float(total)), 1000.0)
    if total < n:
        with pytest.raises(DomainError):
            window_signal(sig, n / 1000.0, step / 1000.0, mode="sliding")
        return
    ws = window_signal(sig, n / 1000.0, step / 1000.0, mode="sliding")
    assert len(ws) == (total - n) // step + 1
    assert all(len(w) == n for w in ws)
    assert ws[-1].samples[-1] <= total - 1
