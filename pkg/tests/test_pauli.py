import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legoqec.pauli import (
    DimensionError,
    PauliOperator,
    commutes,
    gf2_rank,
    has_minus_identity,
    in_span,
    multiply,
    rref,
    tensor,
)
from oracles import dense


def paulis(n):
    return st.builds(
        lambda x, z, ph: PauliOperator(n, x, z, ph),
        st.integers(0, 2**n - 1),
        st.integers(0, 2**n - 1),
        st.sampled_from([0, 2]),
    )


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(paulis(n), paulis(n))))
def test_multiply_matches_dense(pair):
    a, b = pair
    assert np.allclose(dense(multiply(a, b)), dense(a) @ dense(b))


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(paulis(n), paulis(n))))
def test_commutation_matches_dense(pair):
    a, b = pair
    da, db = dense(a), dense(b)
    assert commutes(a, b) == np.allclose(da @ db, db @ da)


def test_parse_and_print_round_trip():
    for text in ["+XZZXI", "-YY", "+I", "-ZIY"]:
        assert str(PauliOperator.from_str(text)) == text
    assert PauliOperator.from_str("XX") == PauliOperator.from_str("+XX")
    assert not PauliOperator.from_str("+iY").is_hermitian


def test_y_is_i_x_z():
    x, z = PauliOperator.from_str("X"), PauliOperator.from_str("Z")
    assert multiply(x, z).times_i() == PauliOperator.from_str("+Y")


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(PauliOperator.from_str("X"), PauliOperator.from_str("XX"))


def test_tensor_places_second_factor_on_high_qubits():
    p = tensor(PauliOperator.from_str("X"), PauliOperator.from_str("-Z"))
    assert str(p) == "-XZ"


def test_rref_spans_same_group():
    rows = [PauliOperator.from_str(s) for s in ["+XXI", "+IXX", "+XIX", "-ZZI"]]
    basis, rank = rref(rows)
    assert rank == gf2_rank(rows) == 3
    assert all(in_span(r, basis) for r in rows)


def test_minus_identity_detected():
    rows = [PauliOperator.from_str(s) for s in ["+XX", "-XX"]]
    assert has_minus_identity(rows)
    assert not has_minus_identity([PauliOperator.from_str("+XX"), PauliOperator.from_str("+ZZ")])


@settings(max_examples=50)
@given(st.lists(paulis(3), min_size=1, max_size=5))
def test_rank_bounded(rows):
    assert gf2_rank(rows) <= min(len(rows), 6)
