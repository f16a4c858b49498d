"""Field serialization round trips and integrity checks."""

import numpy as np
import pytest

from specenergy import Grid
from specenergy.fieldio import (
    field_from_record,
    field_to_record,
    load_field,
    save_field,
)
from conftest import random_field


class TestRecordRoundTrip:
    @pytest.mark.parametrize("shape,components", [((16,), 1), ((8, 8), 2),
                                                  ((8, 8, 8), 3)])
    def test_exact_round_trip(self, shape, components):
        g = Grid.make(shape)
        f = random_field(g, components=components, seed=1, mean_zero=False)
        back = field_from_record(field_to_record(f))
        assert back.grid == f.grid
        assert back.components == f.components
        assert back.mean_zero == f.mean_zero
        assert np.array_equal(back.coeffs, f.coeffs)

    def test_record_layout(self):
        g = Grid.make(8, 4 * np.pi)
        f = random_field(g, seed=2)
        rec = field_to_record(f)
        assert rec["grid"] == {"d": 1, "N": [8], "L": [4 * np.pi]}
        assert len(rec["coeffs"]) == 2 * 8
        # interleaved (re, im) in row-major order
        assert rec["coeffs"][0] == f.coeffs[0, 0].real
        assert rec["coeffs"][1] == f.coeffs[0, 0].imag

    def test_payload_size_checked(self):
        g = Grid.make(8)
        f = random_field(g, seed=3)
        rec = field_to_record(f)
        rec["coeffs"] = rec["coeffs"][:-2]
        with pytest.raises(ValueError, match="payload"):
            field_from_record(rec)

    def test_dimension_consistency_checked(self):
        g = Grid.make((8, 8))
        f = random_field(g, seed=4)
        rec = field_to_record(f)
        rec["grid"]["d"] = 1
        with pytest.raises(ValueError, match="dimension"):
            field_from_record(rec)


class TestFileRoundTrip:
    def test_save_load(self, tmp_path):
        g = Grid.make((8, 8))
        f = random_field(g, components=2, seed=5, mean_zero=False)
        path = tmp_path / "field.json"
        save_field(f, path)
        back = load_field(path)
        assert np.array_equal(back.coeffs, f.coeffs)
