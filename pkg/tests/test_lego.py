import numpy as np
import pytest

from legoqec.lego import (
    DEFAULT_PALETTE,
    DegenerateContractionError,
    InvalidAssignmentError,
    LegoError,
    LegoNetwork,
    bell_block,
    derive_code,
    five_qubit_block,
    t6_block,
)
from legoqec.codes import distance_by_enumeration
from oracles import check_code_against_dense, check_network_against_dense, random_network


def test_entanglement_swapping():
    net = LegoNetwork.from_blocks([bell_block(), bell_block()]).contract((0, 1), (1, 0))
    assert sorted(str(g) for g in net.canonical_group()) == ["+XX", "+ZZ"]


def test_bell_self_trace_is_scalar():
    net = LegoNetwork.from_blocks([bell_block()]).contract((0, 0), (0, 1))
    assert net.is_scalar


def test_yy_contraction_flips_sign():
    # |Phi-> style block: -YY survives as +... after gluing the pair
    from legoqec.lego import LegoBlock

    blk = LegoBlock.from_strings("y", ["+XX", "-ZZ"])  # stabilizes (|00> - |11>)/sqrt2, holds +YY
    net = LegoNetwork.from_blocks([blk, bell_block()]).contract((0, 1), (1, 0))
    check_network_against_dense(net)
    assert sorted(str(g) for g in net.canonical_group()) == ["+XX", "-ZZ"]


def test_degenerate_contraction():
    from legoqec.lego import LegoBlock

    minus = LegoBlock.from_strings("m", ["+XX", "-ZZ"])
    with pytest.raises(DegenerateContractionError):
        # <Phi+|Phi-> = 0
        LegoNetwork.from_blocks([minus]).contract((0, 0), (0, 1))


def test_t6_gives_distance_two_code():
    code = derive_code(LegoNetwork.from_blocks([t6_block()]).assign_logical((0, 5)))
    assert (code.n, code.k) == (5, 1)
    assert distance_by_enumeration(code, 3) == 2


def test_five_qubit_block_gives_513():
    net = LegoNetwork.from_blocks([five_qubit_block()]).assign_logical((0, 5))
    code = derive_code(net)
    assert distance_by_enumeration(code, 3) == 3
    check_code_against_dense(net, code)


def test_two_t6_reach_distance_three():
    net = LegoNetwork.from_blocks([t6_block(), t6_block()])
    net = net.contract((0, 4), (1, 4)).contract((0, 5), (1, 5)).assign_logical((0, 0))
    code = derive_code(net)
    assert code.n == 7 and distance_by_enumeration(code, 3) == 3


def test_illegal_moves():
    net = LegoNetwork.from_blocks([t6_block()]).assign_logical((0, 0))
    with pytest.raises(LegoError):
        net.contract((0, 0), (0, 1))
    with pytest.raises(LegoError):
        net.contract((0, 1), (0, 1))
    with pytest.raises(LegoError):
        net.assign_logical((0, 0))
    with pytest.raises(LegoError):
        net.contract((0, 1), (3, 1))


def test_unassigned_network_has_no_code():
    with pytest.raises(InvalidAssignmentError):
        derive_code(LegoNetwork.from_blocks([bell_block()]).contract((0, 0), (0, 1)))


def test_text_round_trip():
    net = LegoNetwork.from_blocks([t6_block(), bell_block()]).contract((0, 2), (1, 0)).assign_logical((1, 1))
    again = LegoNetwork.from_text(net.to_text(), DEFAULT_PALETTE)
    assert again == net
    assert derive_code(again).canonical_key() == derive_code(net).canonical_key()


@pytest.mark.parametrize("seed", range(40))
def test_random_networks_match_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    net, failed = random_network(rng)
    check_network_against_dense(net, failed)
    if failed is None and net.n_open >= 2:
        net = net.assign_logical(net.open_legs[int(rng.integers(net.n_open))])
        try:
            code = derive_code(net)
        except InvalidAssignmentError:
            return
        check_code_against_dense(net, code)
