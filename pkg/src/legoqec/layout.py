"""Coupling graphs, generator-choice optimisation and SWAP routing."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree, shortest_path

from .circuits import TWO_QUBIT, CliffordCircuit, Gate
from .codes import CheckMatrix
from .pauli import PauliOperator, multiply


class LayoutError(ValueError):
    pass


class CapacityError(LayoutError):
    pass


@dataclass(frozen=True)
class CouplingGraph:
    n: int
    edges: tuple[tuple[int, int], ...] = ()
    all_to_all: bool = False
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if self.all_to_all:
            edges = tuple((a, b) for a in range(self.n) for b in range(a + 1, self.n))
        else:
            edges = tuple(sorted({(min(a, b), max(a, b)) for a, b in self.edges}))
        if any(a == b or not (0 <= a < self.n and 0 <= b < self.n) for a, b in edges):
            raise LayoutError("edges must join distinct vertices of the graph")
        object.__setattr__(self, "edges", edges)
        if self.n > 1:
            ncomp, _ = connected_components(self._adjacency(), directed=False)
            if ncomp != 1:
                raise LayoutError("coupling graph must be connected")

    def _adjacency(self) -> csr_matrix:
        rows = [a for a, b in self.edges] + [b for a, b in self.edges]
        cols = [b for a, b in self.edges] + [a for a, b in self.edges]
        return csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def distances(self) -> np.ndarray:
        if self.n == 1:
            return np.zeros((1, 1))
        return shortest_path(self._adjacency(), unweighted=True, directed=False)

    @cached_property
    def _predecessors(self) -> np.ndarray:
        _, pred = shortest_path(self._adjacency(), unweighted=True, directed=False, return_predecessors=True)
        return pred

    def is_edge(self, a: int, b: int) -> bool:
        return self.all_to_all or self.distances[a, b] == 1

    def path(self, a: int, b: int) -> list[int]:
        """Shortest path ``a -> b`` (deterministic via scipy predecessors)."""
        out = [b]
        while out[-1] != a:
            nxt = int(self._predecessors[a, out[-1]])
            if nxt < 0:
                raise LayoutError(f"no path from {a} to {b}")
            out.append(nxt)
        return out[::-1]

    def to_text(self) -> str:
        if self.all_to_all:
            return f"# all-to-all\nVERTICES {self.n}\nALL\n"
        return f"VERTICES {self.n}\n" + "".join(f"{a} {b}\n" for a, b in self.edges)

    @classmethod
    def from_text(cls, text: str) -> "CouplingGraph":
        n = None
        edges = []
        all_to_all = False
        for line in text.splitlines():
            tok = line.split()
            if not tok or tok[0].startswith("#"):
                continue
            if tok[0] == "VERTICES":
                n = int(tok[1])
            elif tok[0] == "ALL":
                all_to_all = True
            else:
                edges.append((int(tok[0]), int(tok[1])))
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
        return cls(n, tuple(edges), all_to_all)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "CouplingGraph":
        return cls.from_text(Path(path).read_text())


def all_to_all(n: int) -> CouplingGraph:
    return CouplingGraph(n, all_to_all=True, name="all-to-all")


def line(n: int) -> CouplingGraph:
    return CouplingGraph(n, tuple((i, i + 1) for i in range(n - 1)), name="line")


def heavy_hex(rows: int = 2, length: int = 9) -> CouplingGraph:
    """Heavy-hex-like lattice: horizontal chains joined by degree-2 bridge vertices."""
    edges = []
    idx = lambda r, c: r * length + c  # noqa: E731
    for r in range(rows):
        edges += [(idx(r, c), idx(r, c + 1)) for c in range(length - 1)]
    nxt = rows * length
    for r in range(rows - 1):
        for c in range(2 * (r % 2), length, 4):
            edges += [(idx(r, c), nxt), (nxt, idx(r + 1, c))]
            nxt += 1
    return CouplingGraph(nxt, tuple(edges), name="heavy-hex")


def generator_cost(p: PauliOperator, graph: CouplingGraph, placement: Sequence[int] | None = None) -> float:
    """Edge count of a minimum spanning tree over the support under graph distance."""
    verts = [placement[q] if placement is not None else q for q in p.support]
    if len(verts) < 2:
        return 0.0
    sub = graph.distances[np.ix_(verts, verts)]
    return float(minimum_spanning_tree(csr_matrix(sub)).sum())


def layout_cost(stabilizers, graph: CouplingGraph, placement=None) -> float:
    return sum(generator_cost(s, graph, placement) for s in stabilizers)


def optimize_generators(code: CheckMatrix, graph: CouplingGraph, placement=None) -> CheckMatrix:
    """Greedy descent over ``g_i -> g_i g_j`` moves; first strict improvement wins, scan order i, j."""
    stabs = list(code.stabilizers)
    costs = [generator_cost(s, graph, placement) for s in stabs]
    improved = True
    while improved:
        improved = False
        for i in range(len(stabs)):
            for j in range(len(stabs)):
                if i == j:
                    continue
                cand = multiply(stabs[i], stabs[j])
                c = generator_cost(cand, graph, placement)
                if c < costs[i] - 1e-12:
                    stabs[i], costs[i] = cand, c
                    improved = True
                    break
            if improved:
                break
    return code.with_stabilizers(stabs).validate()


def place_ancillas(graph: CouplingGraph, data_vertices: Sequence[int], checks) -> list[int]:
    """Each ancilla takes the free vertex with least total distance to its check's support."""
    used = set(data_vertices)
    if len(used) + len(checks) > graph.n:
        raise CapacityError(f"layout has {graph.n} vertices; need {len(used) + len(checks)}")
    out = []
    for p in checks:
        support = [data_vertices[q] for q in p.support]
        free = [v for v in range(graph.n) if v not in used]
        best = min(free, key=lambda v: (sum(graph.distances[v, s] for s in support), v))
        used.add(best)
        out.append(best)
    return out


def route_circuit(circuit: CliffordCircuit, graph: CouplingGraph, placement: Sequence[int]) -> CliffordCircuit:
    """Relabel qubits onto vertices; non-adjacent two-qubit gates get SWAP chains there and back."""
    if circuit.n_qubits > graph.n:
        raise CapacityError(f"layout has {graph.n} vertices; circuit uses {circuit.n_qubits}")
    if len(set(placement)) != len(placement):
        raise LayoutError("placement must be injective")
    gates: list[Gate] = []
    for g in circuit.gates:
        qs = [placement[q] for q in g.qubits]
        if g.kind in TWO_QUBIT and not graph.is_edge(*qs):
            path = graph.path(qs[0], qs[1])
            hops = [Gate("SWAP", (path[i], path[i + 1])) for i in range(len(path) - 2)]
            gates += hops
            gates.append(Gate(g.kind, (path[-2], path[-1]), g.param))
            gates += hops[::-1]
        else:
            gates.append(Gate(g.kind, qs, g.param))
    return CliffordCircuit(graph.n, tuple(gates))


def check_connectivity(circuit: CliffordCircuit, graph: CouplingGraph) -> list[Gate]:
    """Two-qubit gates that do not sit on an edge."""
    return [g for g in circuit.gates if g.kind in TWO_QUBIT and not graph.is_edge(*g.qubits)]
