import numpy as np
import pytest

from deflact import read_rgrid, write_rgrid
from deflact.gridio import MAGIC


def test_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    grid = rng.standard_normal((5, 7))
    path = tmp_path / "g.rg"
    write_rgrid(path, grid)
    back = read_rgrid(path)
    assert back.shape == (5, 7)
    np.testing.assert_array_equal(back, grid)


def test_header_layout(tmp_path):
    path = tmp_path / "g.rg"
    write_rgrid(path, np.arange(6.0).reshape(2, 3))
    raw = path.read_bytes()
    assert raw.startswith(MAGIC + b" 2 3\n")
    assert len(raw) == len(MAGIC + b" 2 3\n") + 6 * 8
    payload = np.frombuffer(raw.split(b"\n", 1)[1], dtype="<f8")
    np.testing.assert_array_equal(payload, np.arange(6.0))


def test_write_is_deterministic(tmp_path):
    grid = np.random.default_rng(3).standard_normal((4, 4))
    a, b = tmp_path / "a.rg", tmp_path / "b.rg"
    write_rgrid(a, grid)
    write_rgrid(b, grid)
    assert a.read_bytes() == b.read_bytes()


def test_1d_becomes_row(tmp_path):
    path = tmp_path / "v.rg"
    write_rgrid(path, np.arange(4.0))
    assert read_rgrid(path).shape == (1, 4)


def test_rejects_garbage(tmp_path):
    path = tmp_path / "bad.rg"
    path.write_bytes(b"not a grid at all\n\x00\x00")
    with pytest.raises(ValueError, match="not an RGRID"):
        read_rgrid(path)


def test_rejects_truncated(tmp_path):
    path = tmp_path / "t.rg"
    write_rgrid(path, np.ones((3, 3)))
    data = path.read_bytes()
    path.write_bytes(data[:-8])
    with pytest.raises(ValueError, match="truncated"):
        read_rgrid(path)
