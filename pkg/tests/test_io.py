import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resfluor import (GridSpec, ParseError, SampledSpectrum, evaluate_spectrum,
                      general_lines, make_params, read_lines, read_params,
                      read_spectrum, write_lines, write_params, write_spectrum)

from conftest import assert_lines_equal


def params(n, rabi, dd, det=0.0):
    return make_params(n, rabi, dd, det, warn=False)


class TestSpectrumFiles:
    def test_round_trip_is_exact_at_declared_precision(self, tmp_path):
        p = params(2, 50, 20)
        spec = evaluate_spectrum(general_lines(p), np.linspace(-120, 120, 1001))
        path = tmp_path / "spec.csv"
        write_spectrum(spec, path, provenance={"generator": "test"})
        back = read_spectrum(path)
        # 12 significant digits quantize to <= 5e-12 relative per point
        np.testing.assert_allclose(back.grid, spec.grid, rtol=5e-12)
        np.testing.assert_allclose(back.values, spec.values, rtol=5e-12)

    def test_write_read_write_is_byte_stable(self, tmp_path):
        p = params(3, 50, 20)
        spec = evaluate_spectrum(general_lines(p), np.linspace(-130, 130, 257))
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        write_spectrum(spec, first, provenance={"generator": "test"})
        write_spectrum(read_spectrum(first), second, provenance={"generator": "test"})
        assert first.read_bytes() == second.read_bytes()

    def test_header_records_provenance(self, tmp_path):
        spec = SampledSpectrum(grid=np.array([0.0, 1.0]), values=np.array([1.0, 2.0]))
        path = tmp_path / "spec.csv"
        write_spectrum(spec, path, provenance={"generator": "spectrum --model general",
                                               "params": "n_emitters=2"})
        text = path.read_text()
        assert "# generator: spectrum --model general" in text
        assert "# params: n_emitters=2" in text

    def test_whitespace_delimiter_accepted(self, tmp_path):
        path = tmp_path / "spec.dat"
        path.write_text("# comment\n0.0 1.5\n1.0\t2.5\n2.0,3.5\n")
        spec = read_spectrum(path)
        np.testing.assert_array_equal(spec.grid, [0.0, 1.0, 2.0])
        np.testing.assert_array_equal(spec.values, [1.5, 2.5, 3.5])

    def test_decreasing_offsets_name_the_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1\n2,1\n1,1\n")
        with pytest.raises(ParseError, match="line 3"):
            read_spectrum(path)

    def test_wrong_column_count_names_the_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1\n1,2,3\n")
        with pytest.raises(ParseError, match="line 2"):
            read_spectrum(path)

    def test_non_numeric_names_the_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1\nx,2\n")
        with pytest.raises(ParseError, match="line 2"):
            read_spectrum(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1\n1,nan\n")
        with pytest.raises(ParseError, match="line 2"):
            read_spectrum(path)

    def test_header_only_file_is_an_error(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("# resfluor spectrum\n# columns: offset,intensity\n")
        with pytest.raises(ParseError, match="no data"):
            read_spectrum(path)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=60, unique=True),
           st.data())
    def test_random_round_trips(self, xs, data):
        grid = np.sort(np.array(xs))
        if np.diff(grid).min() <= 1e-5 * np.abs(grid).max():
            return  # offsets that collide at 12 significant digits
        values = np.array(data.draw(st.lists(
            st.floats(0, 1e6), min_size=len(xs), max_size=len(xs))))
        spec = SampledSpectrum(grid=grid, values=values)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "spec.csv"
            write_spectrum(spec, path)
            back = read_spectrum(path)
        np.testing.assert_allclose(back.grid, grid, rtol=1e-11, atol=1e-300)
        np.testing.assert_allclose(back.values, values, rtol=1e-11, atol=1e-300)


class TestLinesFiles:
    def test_round_trip_preserves_the_multiset(self, tmp_path):
        lines = general_lines(params(3, 50, 20))
        path = tmp_path / "lines.json"
        write_lines(lines, path, provenance={"generator": "test"})
        back = read_lines(path)
        assert back.kind == "general"
        assert back.params == lines.params
        assert_lines_equal(back, lines)

    def test_round_trip_is_byte_stable(self, tmp_path):
        lines = general_lines(params(2, 50, 20))
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_lines(lines, a)
        write_lines(read_lines(a), b)
        assert a.read_bytes() == b.read_bytes()

    def test_missing_key_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"kind": "general", "lines": []}')
        with pytest.raises(ParseError, match="params"):
            read_lines(path)

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            read_lines(path)


class TestParamsFiles:
    def test_round_trip(self, tmp_path):
        p = params(2, 50, 20)
        path = tmp_path / "params.json"
        write_params(p, path, grid=GridSpec(-120.0, 120.0, 1001))
        doc = read_params(path)
        assert doc.params == p
        assert doc.grid == GridSpec(-120.0, 120.0, 1001)

    def test_grid_is_optional(self, tmp_path):
        path = tmp_path / "params.json"
        write_params(params(4, 10, 3), path)
        assert read_params(path).grid is None

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "params.json"
        path.write_text('{"n_emitters": 2, "rabi": 50, "dd_coupling": 20, '
                        '"detuning": 0, "bogus": 1}')
        with pytest.raises(ParseError, match="bogus"):
            read_params(path)

    def test_zero_emitters_rejected_on_read(self, tmp_path):
        path = tmp_path / "params.json"
        path.write_text('{"n_emitters": 0, "rabi": 50, "dd_coupling": 20, '
                        '"detuning": 0}')
        with pytest.raises(ParseError):
            read_params(path)

    def test_non_integer_count_rejected(self, tmp_path):
        path = tmp_path / "params.json"
        path.write_text('{"n_emitters": 2.5, "rabi": 50, "dd_coupling": 20, '
                        '"detuning": 0}')
        with pytest.raises(ParseError):
            read_params(path)

    def test_bad_grid_rejected(self, tmp_path):
        path = tmp_path / "params.json"
        path.write_text('{"n_emitters": 2, "rabi": 50, "dd_coupling": 20, '
                        '"detuning": 0, "grid": {"min": 5, "max": -5, "points": 10}}')
        with pytest.raises(ParseError):
            read_params(path)

    def test_grid_needs_at_least_two_points(self):
        with pytest.raises(ValueError):
            GridSpec(-1.0, 1.0, 1)
