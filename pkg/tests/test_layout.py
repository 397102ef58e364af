import pytest

from legoqec.codes import five_qubit_code, steane_code
from legoqec.layout import (
    CapacityError,
    CouplingGraph,
    LayoutError,
    all_to_all,
    generator_cost,
    heavy_hex,
    layout_cost,
    line,
    optimize_generators,
    place_ancillas,
)
from legoqec.pauli import PauliOperator


def test_mst_cost_on_line():
    g = line(5)
    assert generator_cost(PauliOperator.from_str("XIIIX"), g) == 4
    assert generator_cost(PauliOperator.from_str("XXIII"), g) == 1
    assert generator_cost(PauliOperator.from_str("XIIII"), g) == 0
    assert generator_cost(PauliOperator.from_str("XIIIX"), all_to_all(5)) == 1


def test_optimizer_never_increases_cost():
    for code, graph in [(five_qubit_code(), line(5)), (steane_code(), line(7))]:
        better = optimize_generators(code, graph)
        assert layout_cost(better.stabilizers, graph) <= layout_cost(code.stabilizers, graph)
        assert better.canonical_key() == code.canonical_key()


def test_heavy_hex_is_connected_with_low_degree():
    g = heavy_hex(2, 9)
    deg = [0] * g.n
    for a, b in g.edges:
        deg[a] += 1
        deg[b] += 1
    assert max(deg) <= 3


def test_graph_text_round_trip(tmp_path):
    g = heavy_hex(3, 5)
    g.save(tmp_path / "g.txt")
    assert CouplingGraph.load(tmp_path / "g.txt") == g
    assert CouplingGraph.from_text(all_to_all(4).to_text()).all_to_all


def test_disconnected_graph_rejected():
    with pytest.raises(LayoutError):
        CouplingGraph(4, ((0, 1), (2, 3)))


def test_ancilla_capacity():
    with pytest.raises(CapacityError):
        place_ancillas(line(5), list(range(5)), five_qubit_code().stabilizers)
    anc = place_ancillas(line(9), list(range(5)), five_qubit_code().stabilizers)
    assert sorted(anc) == [5, 6, 7, 8]
