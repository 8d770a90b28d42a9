import json

import numpy as np
import pytest

from fairpia import ModelFormatError
from fairpia.modelio import (
    dumps_model_document,
    load_model,
    model_document,
    parse_model_document,
    parse_range_spec,
    save_model,
)
from fairpia.models import make_spiral_model, make_wavy_surface

from conftest import random_curve, random_surface


class TestRoundTrip:
    def test_curve_round_trip_value_identical(self, rng, tmp_path):
        curve = random_curve(rng, 12)
        path = tmp_path / "curve.json"
        save_model(path, curve, weights=np.full(12, 1e-6), metadata={"name": "demo", "units": "mm"})
        loaded = load_model(path)
        assert loaded.kind == "curve"
        assert np.array_equal(loaded.geometry.control_points, curve.control_points)
        assert np.array_equal(loaded.geometry.knots.knots, curve.knots.knots)
        assert np.array_equal(loaded.weights, np.full(12, 1e-6))
        assert loaded.metadata == {"name": "demo", "units": "mm"}

    def test_surface_round_trip(self, rng, tmp_path):
        surf = random_surface(rng, 5, 7)
        path = tmp_path / "surf.json"
        save_model(path, surf)
        loaded = load_model(path)
        assert loaded.kind == "surface"
        assert np.array_equal(loaded.geometry.control_net, surf.control_net)

    def test_resave_byte_identical(self, rng, tmp_path):
        curve = random_curve(rng, 9)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_model(p1, curve)
        save_model(p2, load_model(p1).geometry)
        assert p1.read_bytes() == p2.read_bytes()

    def test_seventeen_digit_serialization(self, tmp_path):
        curve = make_spiral_model()
        text = dumps_model_document(model_document(curve))
        doc = json.loads(text)
        assert np.array_equal(np.asarray(doc["points"]), curve.control_points)

    def test_lf_line_endings(self, rng, tmp_path):
        path = tmp_path / "m.json"
        save_model(path, random_curve(rng, 8))
        assert b"\r" not in path.read_bytes()


class TestValidation:
    def _curve_doc(self, rng):
        return model_document(random_curve(rng, 8))

    def test_bad_kind(self, rng):
        doc = self._curve_doc(rng)
        doc["kind"] = "mesh"
        with pytest.raises(ModelFormatError, match="kind|schema"):
            parse_model_document(doc)

    def test_surface_requires_v_fields(self, rng):
        doc = model_document(random_surface(rng, 4, 5))
        doc.pop("knotsV")
        with pytest.raises(ModelFormatError):
            parse_model_document(doc)

    def test_weight_count_mismatch(self, rng):
        doc = self._curve_doc(rng)
        doc["weights"] = [1e-6] * 3
        with pytest.raises(ModelFormatError, match="weights"):
            parse_model_document(doc)

    def test_weights_outside_interval(self, rng):
        doc = self._curve_doc(rng)
        doc["weights"] = [1.5] * 8
        with pytest.raises(ModelFormatError):
            parse_model_document(doc)

    def test_unclamped_knots_rejected(self, rng):
        doc = self._curve_doc(rng)
        doc["knotsU"] = list(np.linspace(0, 1, len(doc["knotsU"])))
        with pytest.raises(ModelFormatError, match="clamped"):
            parse_model_document(doc)

    def test_points_shape_mismatch(self, rng):
        doc = model_document(random_surface(rng, 4, 5))
        doc["pointsShape"] = [5, 5]
        with pytest.raises(ModelFormatError):
            parse_model_document(doc)

    def test_invalid_json_reports_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"formatVersion": 1,,}')
        with pytest.raises(ModelFormatError, match="line 1"):
            load_model(path)

    def test_non_finite_rejected_on_save(self, rng, tmp_path):
        curve = random_curve(rng, 8)
        pts = curve.control_points.copy()
        pts[0, 0] = np.nan
        with pytest.raises(ValueError):
            curve.with_points(pts)  # KnotVector/curve level accepts, serializer must reject
        doc = model_document(curve)
        doc["points"][0][0] = float("nan")
        with pytest.raises(ModelFormatError, match="non-finite"):
            dumps_model_document(doc)


class TestRangeSpec:
    def test_spec_example(self):
        w = parse_range_spec("25-32:1e-5,46-57:8e-6,default:1e-6", 60)
        assert np.all(w[24:32] == 1e-5)
        assert np.all(w[45:57] == 8e-6)
        assert np.all(w[:24] == 1e-6)
        assert np.all(w[57:] == 1e-6)

    def test_last_wins_on_overlap(self):
        w = parse_range_spec("1-10:0.1,5-6:0.2,default:0.3", 10)
        assert np.all(w[4:6] == 0.2)
        assert np.all(w[:4] == 0.1)
        assert np.all(w[6:] == 0.1)

    def test_single_index(self):
        w = parse_range_spec("3:0.5,default:0.25", 5)
        assert w[2] == 0.5
        assert w[0] == 0.25

    def test_default_first_then_ranges(self):
        w = parse_range_spec("default:0.1,2-3:0.9", 4)
        assert list(w) == [0.1, 0.9, 0.9, 0.1]

    def test_missing_coverage_rejected(self):
        with pytest.raises(ValueError, match="no weight"):
            parse_range_spec("1-3:0.1", 5)

    def test_base_fills_uncovered(self):
        base = np.full(5, 0.25)
        w = parse_range_spec("2-2:0.5", 5, base)
        assert list(w) == [0.25, 0.5, 0.25, 0.25, 0.25]

    def test_out_of_bounds(self):
        with pytest.raises(ValueError, match="out of bounds"):
            parse_range_spec("4-9:0.1,default:0.2", 5)

    def test_bad_value(self):
        with pytest.raises(ValueError, match="bad weight value"):
            parse_range_spec("1-2:abc", 5)

    def test_bad_entry(self):
        with pytest.raises(ValueError, match="expected"):
            parse_range_spec("1-2", 5)

    def test_empty_spec(self):
        with pytest.raises(ValueError, match="empty"):
            parse_range_spec("   ", 5)


class TestWavySurfaceDocument:
    def test_surface_document_fields(self):
        surf = make_wavy_surface(5, 6)
        doc = model_document(surf)
        assert doc["kind"] == "surface"
        assert doc["pointsShape"] == [5, 6]
        assert len(doc["points"]) == 30
        assert list(doc)[:2] == ["formatVersion", "kind"]
