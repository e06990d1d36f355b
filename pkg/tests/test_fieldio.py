"""Tests for field dumps, CSV export and state files."""

import csv
import json
import struct

import numpy as np
import pytest

from hybridwigner import fieldio, states, wigner
from hybridwigner.errors import DumpFormatError
from hybridwigner.grids import CvGrid, SphereGrid
from hybridwigner.operators import Operator


@pytest.fixture
def grids():
    return CvGrid((-2, 2), (-1, 1), 5, 3), SphereGrid(4, 6)


class TestFieldDump:
    def test_hybrid_round_trip(self, tmp_path, grids):
        cv, sp = grids
        field = wigner.evaluate_hybrid(states.bell_fock("+", 4).proj(), cv, sp, "phi+")
        fieldio.write_field(tmp_path / "f.bin", field)
        dump = fieldio.read_field(tmp_path / "f.bin")
        assert dump.kind == "hybrid" and dump.state_label == "phi+"
        assert dump.cv_grid == cv and dump.sphere_grid == sp
        np.testing.assert_array_equal(dump.values, field.values)
        assert wigner.integrate(dump.to_hybrid()) == pytest.approx(wigner.integrate(field))

    def test_layout(self, tmp_path, grids):
        cv, _ = grids
        values = np.arange(15, dtype=float).reshape(5, 3)
        fieldio.write_field(tmp_path / "f.bin", values, cv_grid=cv, trace_target=0.5)
        blob = (tmp_path / "f.bin").read_bytes()
        (hlen,) = struct.unpack("<Q", blob[:8])
        head = json.loads(blob[8:8 + hlen])
        assert head["shape"] == [5, 3] and head["kind"] == "cv"
        assert head["trace_target"] == 0.5
        data = np.frombuffer(blob[8 + hlen:], dtype="<f8")
        np.testing.assert_array_equal(data, np.arange(15))  # row-major

    def test_dv_round_trip(self, tmp_path, grids):
        _, sp = grids
        values = np.random.default_rng(2).normal(size=sp.shape)
        fieldio.write_field(tmp_path / "d.bin", values, sphere_grid=sp)
        dump = fieldio.read_field(tmp_path / "d.bin")
        assert dump.kind == "dv"
        np.testing.assert_array_equal(dump.values, values)

    def test_shape_mismatch(self, tmp_path, grids):
        cv, _ = grids
        with pytest.raises(DumpFormatError):
            fieldio.write_field(tmp_path / "x.bin", np.zeros((2, 2)), cv_grid=cv)

    def test_truncated_prefix(self, tmp_path):
        (tmp_path / "x.bin").write_bytes(b"\x01\x02")
        with pytest.raises(DumpFormatError, match="offset 0"):
            fieldio.read_field(tmp_path / "x.bin")

    def test_malformed_header_offset(self, tmp_path):
        head = b'{"format": "hybridwigner-field", oops}'
        (tmp_path / "x.bin").write_bytes(struct.pack("<Q", len(head)) + head)
        with pytest.raises(DumpFormatError) as info:
            fieldio.read_field(tmp_path / "x.bin")
        # the bad token starts 32 bytes into the header, after the 8-byte prefix
        assert info.value.offset == 8 + head.index(b"oops")

    def test_wrong_data_length(self, tmp_path, grids):
        cv, _ = grids
        fieldio.write_field(tmp_path / "f.bin", np.zeros(cv.shape), cv_grid=cv)
        blob = (tmp_path / "f.bin").read_bytes()
        (tmp_path / "g.bin").write_bytes(blob[:-8])
        with pytest.raises(DumpFormatError) as info:
            fieldio.read_field(tmp_path / "g.bin")
        assert info.value.offset == 8 + struct.unpack("<Q", blob[:8])[0]

    def test_not_a_dump(self, tmp_path):
        head = b'{"format": "other"}'
        (tmp_path / "x.bin").write_bytes(struct.pack("<Q", len(head)) + head)
        with pytest.raises(DumpFormatError):
            fieldio.read_field(tmp_path / "x.bin")


class TestCsv:
    def test_cv(self, tmp_path, grids):
        cv, _ = grids
        values = np.arange(15, dtype=float).reshape(5, 3)
        fieldio.write_csv(tmp_path / "f.csv", values, cv_grid=cv)
        rows = list(csv.reader(open(tmp_path / "f.csv")))
        assert rows[0] == ["re_alpha", "im_alpha", "W"]
        assert len(rows) == 16
        assert [float(x) for x in rows[4]] == [-1.0, -1.0, 3.0]

    def test_needs_grid(self, tmp_path):
        with pytest.raises(DumpFormatError):
            fieldio.write_csv(tmp_path / "f.csv", np.zeros((2, 2)))


class TestStateFiles:
    def test_ket(self, tmp_path):
        psi = states.bell_cat(1.5, 20)
        fieldio.write_state(tmp_path / "s.json", psi, spec={"kind": "bell_cat"})
        back = fieldio.read_state(tmp_path / "s.json")
        np.testing.assert_array_equal(back.data, psi.data)
        assert back.dims == (20, 2)

    def test_density(self, tmp_path):
        rho = states.lossy_bell_cat(1.0, 0.3, 16)
        fieldio.write_state(tmp_path / "s.json", rho)
        back = fieldio.read_state(tmp_path / "s.json")
        assert isinstance(back, Operator)
        np.testing.assert_array_equal(back.data, rho.data)

    def test_bad_json(self, tmp_path):
        (tmp_path / "s.json").write_text('{"format": ')
        with pytest.raises(DumpFormatError):
            fieldio.read_state(tmp_path / "s.json")
