"""Bit-exact round trips of the field file formats."""

import numpy as np
import pytest

from sigmalab.fieldio import load_field, save_field


def cases():
    r = np.random.default_rng(0)
    return [
        ("scalar", r.standard_normal((6, 5))),
        ("map", r.standard_normal((6, 5, 3))),
        ("vectorspinor", r.standard_normal((6, 5, 3, 4))),
        ("gravitino", r.standard_normal((6, 5, 2, 4))),
    ]


@pytest.mark.parametrize("ext", [".csv", ".json"])
def test_round_trip_bit_exact(tmp_path, ext):
    for kind, array in cases():
        path = tmp_path / f"field_{kind}{ext}"
        save_field(path, array, kind)
        back, back_kind = load_field(path)
        assert back_kind == kind
        assert back.shape == array.shape
        assert np.array_equal(back, array)


def test_header_carries_metadata(tmp_path):
    _, array = cases()[1]
    path = tmp_path / "phi.csv"
    save_field(path, array, "map")
    first = path.read_text().splitlines()[0]
    assert first == "# sigmalab-field kind=map n1=6 n2=5 K=3"


def test_bad_files_rejected(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("no header\n1,2,3\n")
    with pytest.raises(ValueError):
        load_field(p)
    q = tmp_path / "x.txt"
    with pytest.raises(ValueError):
        save_field(q, np.zeros((4, 4)), "scalar")
    with pytest.raises(ValueError):
        save_field(tmp_path / "y.csv", np.zeros((4, 4, 3)), "scalar")


def test_row_major_site_order(tmp_path):
    array = np.arange(24, dtype=float).reshape(4, 6)
    path = tmp_path / "s.csv"
    save_field(path, array, "scalar")
    lines = path.read_text().splitlines()
    # data starts on line 3; site (i, j) -> row i * n2 + j
    assert lines[2] == "0.0"
    assert lines[2 + 6] == "6.0"
