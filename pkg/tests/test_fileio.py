import numpy as np
import pytest

from pursuitlab.fileio import (
    FileFormatError,
    dump_json,
    read_matrix,
    read_vector,
    recovery_payload,
    write_matrix,
    write_vector,
)
from pursuitlab import make_instance, subspace_pursuit


def rng(seed=0):
    return np.random.Generator(np.random.PCG64(seed))


def test_matrix_round_trip_bitwise(tmp_path):
    phi = rng(1).normal(size=(5, 7))
    path = tmp_path / "phi.csv"
    write_matrix(path, phi)
    again = read_matrix(path)
    assert np.array_equal(again, phi)
    # Re-writing the parsed matrix reproduces the file byte for byte.
    path2 = tmp_path / "phi2.csv"
    write_matrix(path2, again)
    assert path.read_bytes() == path2.read_bytes()


def test_vector_round_trip_bitwise(tmp_path):
    v = rng(2).normal(size=9)
    path = tmp_path / "v.csv"
    write_vector(path, v)
    assert np.array_equal(read_vector(path), v)


def test_matrix_header_is_exact(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("#dense 2 2\n1,2\n3,4\n")
    with pytest.raises(FileFormatError, match="line 1"):
        read_matrix(path)
    path.write_text("# sparse 2 2\n1,2\n3,4\n")
    with pytest.raises(FileFormatError, match="line 1"):
        read_matrix(path)
    path.write_text("# dense  2 2\n1,2\n3,4\n")  # non-canonical spacing
    with pytest.raises(FileFormatError, match="exactly"):
        read_matrix(path)
    path.write_text("# vector 2 \n1\n2\n")
    with pytest.raises(FileFormatError, match="exactly"):
        read_vector(path)


def test_matrix_errors_name_line_and_field(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# dense 2 3\n1,2,3\n4,abc,6\n")
    with pytest.raises(FileFormatError, match=r"line 3, field 2"):
        read_matrix(path)
    path.write_text("# dense 2 3\n1,2,3\n4,5\n")
    with pytest.raises(FileFormatError, match=r"line 3: expected 3 values, got 2"):
        read_matrix(path)
    path.write_text("# dense 3 2\n1,2\n3,4\n")
    with pytest.raises(FileFormatError, match="expected 3 data rows"):
        read_matrix(path)
    path.write_text("")
    with pytest.raises(FileFormatError, match="empty file"):
        read_matrix(path)
    path.write_text("# dense 1 1\ninf\n")
    with pytest.raises(FileFormatError, match="finite"):
        read_matrix(path)


def test_vector_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# vector x\n1\n")
    with pytest.raises(FileFormatError, match="line 1"):
        read_vector(path)
    path.write_text("# vector 2\n1\n")
    with pytest.raises(FileFormatError, match="expected 2 values"):
        read_vector(path)
    path.write_text("# vector 1\nnan\n")
    with pytest.raises(FileFormatError, match="finite"):
        read_vector(path)


def test_dump_json_is_canonical():
    a = dump_json({"b": 1, "a": [1.5, 2.25]})
    b = dump_json({"a": [1.5, 2.25], "b": 1})
    assert a == b
    assert a.endswith("\n")


def test_recovery_payload_trace_levels():
    inst = make_instance("exact-sparse", 16, 32, 3, 0.0, 6)
    result = subspace_pursuit(inst.phi, inst.y, 3, truth=inst.x)
    none_payload = recovery_payload(result, trace="none")
    assert none_payload["iterations"] == []
    assert none_payload["residual_history"]
    norms_payload = recovery_payload(result, trace="norms")
    assert norms_payload["iterations"]
    assert "estimate" not in norms_payload["iterations"][0]
    assert "signal_error" in norms_payload["iterations"][0]
    full_payload = recovery_payload(result, trace="full")
    assert "estimate" in full_payload["iterations"][0]
    assert full_payload["schema_version"] == 1
