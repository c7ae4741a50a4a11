"""Coined quantum walk on arbitrary undirected graphs.

Amplitudes live on arcs (ordered vertex pairs along edges). The coin is the
per-vertex Grover diffusion of local degree, the shift swaps each arc with
its reverse, and marked vertices get the scheme's effective coin exactly as
on the grid. Includes the witness constructions for stationary states over
two, three, and ring-of-r marked vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .grid import CoinScheme, OracleTooLargeError

__all__ = [
    "DEFAULT_GRAPH_ORACLE_CAP",
    "GenericThreeSpec",
    "Graph",
    "GraphDecomposition",
    "GraphState",
    "InvalidGraphError",
    "build_generic_three",
    "build_symmetric_ring",
    "build_two_marked",
    "decompose_graph_initial",
    "graph_check_conditions",
    "graph_dense_step_matrix",
    "graph_marked_probability",
    "graph_overlap",
    "graph_step",
    "graph_uniform_state",
    "parse_edge_list",
    "parse_vertex_ids",
    "torus_graph",
]

DEFAULT_GRAPH_ORACLE_CAP = 400


class InvalidGraphError(ValueError):
    """Graph unsuitable for the walk (isolated vertex, self-loop, ...)."""


class Graph:
    """Simple undirected graph with a fixed arc ordering.

    Neighbors are stored sorted ascending; arc (i, j) gets the position of j
    within vertex i's neighbor list, offset by the degree prefix sum. The
    ``partner`` array maps each arc to its reverse, which is what the shift
    permutes.
    """

    def __init__(self, n: int, adjacency: list[list[int]]):
        self.n = n
        self.adjacency = [sorted(nbrs) for nbrs in adjacency]
        self.degrees = np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.intp)
        if n == 0:
            raise InvalidGraphError("graph has no vertices")
        isolated = np.flatnonzero(self.degrees == 0)
        if isolated.size:
            raise InvalidGraphError(
                f"vertex {int(isolated[0])} is isolated; the coin is undefined there"
            )
        self.offsets = np.zeros(n + 1, dtype=np.intp)
        np.cumsum(self.degrees, out=self.offsets[1:])
        self.arcs: list[tuple[int, int]] = [
            (i, j) for i in range(n) for j in self.adjacency[i]
        ]
        self._arc_pos = {arc: k for k, arc in enumerate(self.arcs)}
        self.partner = np.array(
            [self._arc_pos[(j, i)] for (i, j) in self.arcs], dtype=np.intp
        )

    @property
    def arc_count(self) -> int:
        """Total number of arcs; equals deg(G) = 2|E|."""
        return len(self.arcs)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adjacency: list[set[int]] = [set() for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InvalidGraphError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidGraphError(f"parallel edge ({u}, {v})")
            seen.add(key)
            adjacency[u].add(v)
            adjacency[v].add(u)
        return cls(n, [sorted(s) for s in adjacency])

    def arc_index(self, i: int, j: int) -> int:
        return self._arc_pos[(i, j)]

    def arc_slice(self, v: int) -> slice:
        return slice(int(self.offsets[v]), int(self.offsets[v + 1]))

    def check_marked(self, marked: Iterable[int]) -> tuple[int, ...]:
        out = tuple(sorted(set(int(v) for v in marked)))
        for v in out:
            if not 0 <= v < self.n:
                raise ValueError(f"marked vertex {v} out of range for n={self.n}")
        return out

    def marked_arc_indices(self, marked: Iterable[int]) -> np.ndarray:
        """Indices of all arcs whose tail vertex is marked."""
        vs = self.check_marked(marked)
        if not vs:
            return np.empty(0, dtype=np.intp)
        return np.concatenate(
            [np.arange(self.offsets[v], self.offsets[v + 1], dtype=np.intp) for v in vs]
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.arc_count // 2})"


@dataclass
class GraphState:
    """Real amplitude per arc, in the graph's arc ordering."""

    graph: Graph
    amp: np.ndarray

    def copy(self) -> "GraphState":
        return GraphState(self.graph, self.amp.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.amp, self.amp)))


def parse_edge_list(text: str) -> Graph:
    """Graph from plain text: one ``u v`` pair per line, 0-based ids, ``#`` comments."""
    edges: list[tuple[int, int]] = []
    top = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidGraphError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InvalidGraphError(f"line {lineno}: non-integer vertex id in {raw!r}")
        if u < 0 or v < 0:
            raise InvalidGraphError(f"line {lineno}: negative vertex id in {raw!r}")
        edges.append((u, v))
        top = max(top, u, v)
    if not edges:
        raise InvalidGraphError("edge list is empty")
    return Graph.from_edges(top + 1, edges)


def parse_vertex_ids(text: str) -> list[int]:
    """Vertex ids, one per line; ``#`` comments and blank lines ignored."""
    ids: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            ids.append(int(line))
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer vertex id {raw!r}")
    return ids


def torus_graph(n: int) -> Graph:
    """The n x n torus as a Graph; vertex (x, y) gets id x * n + y."""
    if n < 3:
        raise InvalidGraphError("torus graph needs n >= 3 to stay simple")
    edges = []
    for x in range(n):
        for y in range(n):
            edges.append((x * n + y, ((x + 1) % n) * n + y))
            edges.append((x * n + y, x * n + (y + 1) % n))
    return Graph.from_edges(n * n, edges)


def graph_uniform_state(g: Graph) -> GraphState:
    """Equal superposition over all arcs, amplitude 1/sqrt(deg(G)).

    deg(G) is the number of arcs, so the state is unit-norm; on the torus
    expressed as a graph this is exactly the grid walk's 1/sqrt(4N).
    """
    if g.n == 0 or np.any(g.degrees == 0):
        raise InvalidGraphError("walk undefined: graph empty or has an isolated vertex")
    a = 1.0 / math.sqrt(g.arc_count)
    return GraphState(g, np.full(g.arc_count, a, dtype=float))


def graph_step(
    state: GraphState, marked: Iterable[int], scheme: CoinScheme
) -> GraphState:
    """One walk step: fused query+coin per vertex, then the arc swap.

    Unmarked vertices get degree-d Grover diffusion (alpha -> 2 s / d - alpha);
    marked vertices get -I under AKR and -D under GROVER, the query's sign
    already folded in, exactly as on the grid.
    """
    g = state.graph
    amp = state.amp
    sums = np.add.reduceat(amp, g.offsets[:-1])
    coin = np.repeat(2.0 * sums / g.degrees, g.degrees) - amp
    idxs = g.marked_arc_indices(marked)
    if idxs.size:
        if scheme is CoinScheme.AKR:
            coin[idxs] = -amp[idxs]
        else:
            coin[idxs] = -coin[idxs]
    return GraphState(g, coin[g.partner])


def graph_dense_step_matrix(
    g: Graph,
    marked: Iterable[int],
    scheme: CoinScheme,
    cap: int = DEFAULT_GRAPH_ORACLE_CAP,
) -> np.ndarray:
    """Explicit S C Q over the arc basis, for cross-checking ``graph_step``."""
    if g.arc_count > cap:
        raise OracleTooLargeError(f"oracle for {g.arc_count} arcs exceeds cap {cap}")
    vs = set(g.check_marked(marked))
    dim = g.arc_count

    q = np.eye(dim)
    for v in vs:
        sl = g.arc_slice(v)
        q[sl, sl] = -np.eye(sl.stop - sl.start)

    c = np.zeros((dim, dim))
    for v in range(g.n):
        d = int(g.degrees[v])
        sl = g.arc_slice(v)
        if v in vs and scheme is CoinScheme.AKR:
            block = np.eye(d)
        else:
            block = (2.0 / d) * np.ones((d, d)) - np.eye(d)
        c[sl, sl] = block

    s = np.zeros((dim, dim))
    for k in range(dim):
        s[g.partner[k], k] = 1.0

    return s @ c @ q


def graph_marked_probability(state: GraphState, marked: Iterable[int]) -> float:
    """Probability of measuring the location register on a marked vertex."""
    idxs = state.graph.marked_arc_indices(marked)
    if not idxs.size:
        return 0.0
    sel = state.amp[idxs]
    return float(np.dot(sel, sel))


def graph_overlap(a: GraphState, b: GraphState) -> float:
    """Real inner product of two states on the same graph."""
    if a.graph is not b.graph and a.graph.arcs != b.graph.arcs:
        raise ValueError("states live on different graphs")
    return float(np.dot(a.amp, b.amp))


def graph_check_conditions(
    state: GraphState, marked: Iterable[int], tol: float = 1e-12
) -> tuple[bool, bool, bool]:
    """The three stationarity conditions on a graph state.

    1. all arcs leaving unmarked vertices carry the same amplitude,
    2. each marked vertex's arc amplitudes sum to zero,
    3. each arc equals its reverse arc.
    """
    g = state.graph
    vs = g.check_marked(marked)
    marked_arcs = g.marked_arc_indices(vs)
    unmarked_mask = np.ones(g.arc_count, dtype=bool)
    unmarked_mask[marked_arcs] = False

    vals = state.amp[unmarked_mask]
    cond1 = vals.size == 0 or bool(np.max(np.abs(vals - vals.mean())) <= tol)

    cond2 = True
    for v in vs:
        if abs(float(state.amp[g.arc_slice(v)].sum())) > tol:
            cond2 = False
            break

    cond3 = bool(np.max(np.abs(state.amp - state.amp[g.partner])) <= tol)
    return cond1, cond2, cond3


@dataclass
class GraphDecomposition:
    """Split of the uniform start state: psi0 = stationary + delta."""

    stationary: GraphState
    delta: GraphState
    delta_norm_sq: float


def decompose_graph_initial(
    state: GraphState, marked: Iterable[int]
) -> GraphDecomposition:
    """Split psi0 against a stationary witness.

    The witness is first rescaled so its unmarked-side amplitude matches the
    uniform amplitude 1/sqrt(deg(G)); the remainder is then supported on
    the marked-to-marked arcs only.
    """
    g = state.graph
    vs = set(g.check_marked(marked))
    baseline = None
    for k, (i, j) in enumerate(g.arcs):
        if i not in vs or j not in vs:
            baseline = float(state.amp[k])
            break
    if baseline is None:
        raise ValueError("witness has no arc with an unmarked endpoint")
    if baseline == 0.0:
        raise ValueError("witness unmarked baseline is zero; cannot rescale")
    a0 = 1.0 / math.sqrt(g.arc_count)
    phi = state.amp * (a0 / baseline)
    delta = graph_uniform_state(g).amp - phi
    return GraphDecomposition(
        GraphState(g, phi), GraphState(g, delta), float(np.dot(delta, delta))
    )


@dataclass(frozen=True)
class GenericThreeSpec:
    """Shared-arc weights for the generic three-vertex construction.

    Each marked pair (p, q) shares l_pq arcs' worth of weight; marked vertex
    p then needs m_p = sum of its two l values private unmarked neighbors so
    its amplitudes can cancel.
    """

    l12: int
    l23: int
    l31: int

    def __post_init__(self):
        for name, v in (("l12", self.l12), ("l23", self.l23), ("l31", self.l31)):
            if v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")

    @property
    def m1(self) -> int:
        return self.l12 + self.l31

    @property
    def m2(self) -> int:
        return self.l12 + self.l23

    @property
    def m3(self) -> int:
        return self.l23 + self.l31


def _assemble_witness(
    r: int,
    core: Sequence[tuple[int, int, float]],
    private_counts: Sequence[int],
    unmarked_mult: float,
    a: float | None,
) -> tuple[Graph, tuple[int, ...], GraphState]:
    """Marked core plus private unmarked neighbors, closed into a cycle.

    ``core`` lists (p, q, w): marked vertices p, q are adjacent and their arc
    pair carries amplitude -w * a. Private neighbors carry unmarked_mult * a
    everywhere. The private cycle keeps every unmarked vertex's amplitudes
    uniform, which is all the stationarity conditions ask of them.
    """
    edges: list[tuple[int, int]] = [(p, q) for p, q, _ in core]
    privates: list[int] = []
    nxt = r
    for p in range(r):
        for _ in range(private_counts[p]):
            edges.append((p, nxt))
            privates.append(nxt)
            nxt += 1
    if len(privates) == 2:
        edges.append((privates[0], privates[1]))
    elif len(privates) >= 3:
        edges.extend(
            (privates[i], privates[(i + 1) % len(privates)])
            for i in range(len(privates))
        )
    g = Graph.from_edges(nxt, edges)
    if a is None:
        a = 1.0 / math.sqrt(g.arc_count)
    amp = np.full(g.arc_count, unmarked_mult * a, dtype=float)
    for p, q, w in core:
        amp[g.arc_index(p, q)] = -w * a
        amp[g.arc_index(q, p)] = -w * a
    return g, tuple(range(r)), GraphState(g, amp)


def build_two_marked(
    k: int, a: float | None = None
) -> tuple[Graph, tuple[int, ...], GraphState]:
    """Witness for two adjacent marked vertices with k private neighbors each.

    All arcs carry ``a`` except the pair between the marked vertices at
    ``-k a``. Defaults ``a`` to the uniform amplitude so psi0 minus the
    witness is supported on that arc pair alone.
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return _assemble_witness(2, [(0, 1, float(k))], [k, k], 1.0, a)


def build_generic_three(
    spec: GenericThreeSpec, a: float | None = None
) -> tuple[Graph, tuple[int, ...], GraphState]:
    """Witness for three mutually adjacent marked vertices with unequal degrees.

    Marked pair (p, q) carries -l_pq * a on both arcs; vertex p gets its m_p
    private neighbors, so each marked vertex's amplitudes sum to zero.
    """
    core = [
        (0, 1, float(spec.l12)),
        (1, 2, float(spec.l23)),
        (2, 0, float(spec.l31)),
    ]
    return _assemble_witness(3, core, [spec.m1, spec.m2, spec.m3], 1.0, a)


def build_symmetric_ring(
    r: int, k: int, a: float | None = None
) -> tuple[Graph, tuple[int, ...], GraphState]:
    """Witness with r marked vertices in a cycle, k private neighbors each.

    For r = 2 this is exactly :func:`build_two_marked`. For r >= 3 the
    marked-to-marked arcs carry -(k/2) a when k is even; for odd k all
    amplitudes are scaled integrally instead (unmarked arcs 2a, marked arcs
    -k a), which keeps the same zero sums.
    """
    if r < 2:
        raise ValueError(f"need at least 2 marked vertices, got {r}")
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if r == 2:
        return build_two_marked(k, a)
    if k % 2 == 0:
        weight, mult = k / 2.0, 1.0
    else:
        weight, mult = float(k), 2.0
    core = [(p, (p + 1) % r, weight) for p in range(r)]
    return _assemble_witness(r, core, [k] * r, mult, a)
