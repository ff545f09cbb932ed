import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cgauss
from phasebounds.frames import generate_frame
from phasebounds.io import (
    DocumentError,
    doc_to_frame,
    doc_to_matrix,
    dumps,
    frame_to_doc,
    loads,
    matrix_to_doc,
    read_json,
    write_json,
)

finite = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=12))
def test_matrix_round_trip_bit_exact(pairs):
    X = np.array([complex(a, b) for a, b in pairs]).reshape(1, -1)
    Y = doc_to_matrix(loads(dumps(matrix_to_doc(X))))
    assert np.array_equal(X.view(np.uint64), Y.view(np.uint64))


def test_special_doubles_round_trip():
    vals = [5e-324, -0.0, 2.2250738585072014e-308, 1.7976931348623157e308, 0.1, 1 / 3]
    X = np.array([complex(v, -v) for v in vals]).reshape(2, 3)
    Y = doc_to_matrix(loads(dumps(matrix_to_doc(X))))
    assert np.array_equal(X.view(np.uint64), Y.view(np.uint64))
    assert np.signbit(Y[0, 1].real)


def test_frame_round_trip(tmp_path):
    F = generate_frame("random_hermitian", 3, 7, seed=2, r=2)
    p = tmp_path / "f.json"
    text = write_json(str(p), frame_to_doc(F))
    assert p.read_text() == text
    G = doc_to_frame(read_json(str(p)))
    assert G.target_r == 2 and G.m == 7
    assert all(np.array_equal(a, b) for a, b in zip(F.members, G.members))
    assert dumps(frame_to_doc(G)) + "\n" == text


def test_output_is_valid_json():
    doc = {"a": 1, "b": [1.0, 2.5], "c": {"d": True, "e": None, "f": "x"}, "g": []}
    assert json.loads(dumps(doc)) == doc
    assert dumps(1.0) == "1.0"


def test_non_hermitian_member_is_named(rng):
    doc = frame_to_doc(generate_frame("random_hermitian", 3, 4, seed=1))
    doc["members"][2] = matrix_to_doc(cgauss(rng, (3, 3)))
    with pytest.raises(DocumentError, match="member 3"):
        doc_to_frame(doc)


@pytest.mark.parametrize(
    "doc",
    [
        {"rows": 0, "cols": 2, "data": []},
        {"rows": 1, "cols": 2, "data": [[1, 0]]},
        {"rows": 1, "cols": 1, "data": [[1, 0, 0]]},
        {"rows": 1, "cols": 1, "data": [["a", 0]]},
        {"rows": "1", "cols": 1, "data": [[1, 0]]},
        {"cols": 1, "data": [[1, 0]]},
        [1, 2],
    ],
)
def test_malformed_matrices_rejected(doc):
    with pytest.raises(DocumentError):
        doc_to_matrix(doc)


def test_nonfinite_rejected():
    with pytest.raises(DocumentError):
        loads('{"rows": 1, "cols": 1, "data": [[NaN, 0]]}')
    with pytest.raises(DocumentError):
        dumps(float("inf"))
    with pytest.raises(DocumentError):
        matrix_to_doc(np.array([[np.nan]]))
    with pytest.raises(DocumentError):
        matrix_to_doc(np.zeros((0, 3)))
    with pytest.raises(DocumentError):
        loads("{not json")


def test_frame_count_mismatch():
    doc = frame_to_doc(generate_frame("pauli", 2, 4))
    doc["m"] = 5
    with pytest.raises(DocumentError):
        doc_to_frame(doc)


def test_missing_file():
    with pytest.raises(DocumentError):
        read_json("/nonexistent/frame.json")
