"""Directed observation networks.

An edge i -> j means agent i observes agent j.  This module holds the
immutable adjacency structure, a seeded growth model (random pair

attachment, triadic closure, periodic edge turnover), symmetrization,
canonical constructions, and the text formats: edge lists and Graphviz
DOT snapshots.
"""

from __future__ import annotations

import logging
import math
from bisect import insort
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Iterable, Sequence

from .rational import as_fraction

log = logging.getLogger(__name__)


class NetworkParseError(ValueError):
    """Raised when an edge-list file violates the format or an invariant."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class DirectedNetwork:
    """Out-neighbor adjacency: out_neighbors[i] lists exactly who i observes.

    Neighbor lists are canonicalized to sorted tuples; self-loops and
    duplicate edges are rejected.
    """

    n_nodes: int
    out_neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be positive")
        if len(self.out_neighbors) != self.n_nodes:
            raise ValueError(
                f"out_neighbors has {len(self.out_neighbors)} rows for {self.n_nodes} nodes"
            )
        canon = []
        for i, nbrs in enumerate(self.out_neighbors):
            row = tuple(sorted(nbrs))
            if len(set(row)) != len(row):
                raise ValueError(f"duplicate edge out of node {i}")
            for j in row:
                if j == i:
                    raise ValueError(f"self-loop at node {i}")
                if not 0 <= j < self.n_nodes:
                    raise ValueError(f"edge {i} -> {j} out of range")
            canon.append(row)
        object.__setattr__(self, "out_neighbors", tuple(canon))

    @classmethod
    def from_edges(cls, n_nodes: int, edges: Iterable[tuple[int, int]]) -> "DirectedNetwork":
        out: list[list[int]] = [[] for _ in range(n_nodes)]
        for i, j in edges:
            if not 0 <= i < n_nodes:
                raise ValueError(f"edge ({i}, {j}) out of range")
            out[i].append(j)
        return cls(n_nodes, tuple(tuple(row) for row in out))

    def out_degree(self, i: int) -> int:
        return len(self.out_neighbors[i])

    @property
    def n_edges(self) -> int:
        return sum(len(row) for row in self.out_neighbors)

    def edges(self) -> list[tuple[int, int]]:
        """All edges in (src, dst) lexicographic order."""
        return [(i, j) for i in range(self.n_nodes) for j in self.out_neighbors[i]]

    def in_neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Reverse adjacency: who observes each node."""
        ins: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for i, j in self.edges():
            ins[j].append(i)
        return tuple(tuple(row) for row in ins)

    def isolated_nodes(self) -> tuple[int, ...]:
        """Nodes that observe nobody (their utility is undefined)."""
        return tuple(i for i in range(self.n_nodes) if not self.out_neighbors[i])


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs for the growth model; the seed fully determines the output."""

    n_nodes: int = 100
    max_out_degree: int = 5
    n_iterations: int = 100
    pairs_per_iter: int = 3
    # Strong closure drives most out-degrees to the cap, giving the high
    # clustering the growth model is meant for; sparser settings leave the
    # observation graph anchored enough that pure equilibria become reachable.
    triad_attempts_per_iter: int = 40
    break_fraction: Fraction = Fraction(1, 200)
    rng_seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "break_fraction", as_fraction(self.break_fraction))
        if self.n_nodes < 2:
            raise ValueError("n_nodes must be at least 2")
        if self.max_out_degree < 1:
            raise ValueError("max_out_degree must be at least 1")
        if min(self.n_iterations, self.pairs_per_iter, self.triad_attempts_per_iter) < 0:
            raise ValueError("iteration counts must be non-negative")
        if not 0 <= self.break_fraction < 1:
            raise ValueError("break_fraction must lie in [0, 1)")


class _GrowState:
    """Mutable adjacency used only while growing a network."""

    def __init__(self, n_nodes: int, max_out_degree: int):
        self.n = n_nodes
        self.cap = max_out_degree
        self.out: list[list[int]] = [[] for _ in range(n_nodes)]
        self.ins: list[list[int]] = [[] for _ in range(n_nodes)]
        self.edge_set: set[tuple[int, int]] = set()
        # recip[k] = number of mutual pairs k belongs to; kept incrementally
        # so triad sampling can weight nodes in O(1) each.
        self.recip = [0] * n_nodes
        self.n_edges = 0

    def can_add(self, i: int, j: int) -> bool:
        return len(self.out[i]) < self.cap and (i, j) not in self.edge_set

    def add(self, i: int, j: int) -> None:
        self.edge_set.add((i, j))
        insort(self.out[i], j)
        insort(self.ins[j], i)
        if (j, i) in self.edge_set:
            self.recip[i] += 1
            self.recip[j] += 1
        self.n_edges += 1

    def remove(self, i: int, j: int) -> None:
        self.edge_set.remove((i, j))
        self.out[i].remove(j)
        self.ins[j].remove(i)
        if (j, i) in self.edge_set:
            self.recip[i] -= 1
            self.recip[j] -= 1
        self.n_edges -= 1

    def edge_list(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in self.out[i]]

    def network(self) -> DirectedNetwork:
        return DirectedNetwork(self.n, tuple(tuple(row) for row in self.out))


def _break_count(n_edges: int, fraction: Fraction) -> int:
    """How many edges the turnover step removes: ceil(fraction * n_edges).

    At least one whenever edges exist and the fraction is positive, so the
    edge count strictly drops across any turnover step that has work to do.
    """
    if n_edges == 0:
        return 0
    return math.ceil(fraction * n_edges)


def _triad_attempt(st: _GrowState, rng: Random) -> None:
    """One triadic-closure attempt.

    Draws uniformly over all ordered triples (i, k, j) of distinct nodes
    where i observes k and either k observes j or j observes k, then adds
    i -> j if i has spare out-degree and the edge is new.  Every in-neighbor
    i of k sees the same candidate set nb(k) minus itself, so the instance
    count factors as in_degree(k) * (|nb(k)| - 1) per node k; sampling picks
    k by that weight, then i, then j, which is uniform over instances.
    """
    weights = []
    total = 0
    for k in range(st.n):
        indeg = len(st.ins[k])
        w = indeg * (len(st.out[k]) + indeg - st.recip[k] - 1) if indeg else 0
        weights.append(w)
        total += w
    if total == 0:
        return
    r = rng.randrange(total)
    for k, w in enumerate(weights):
        if r < w:
            break
        r -= w
    ins_k = st.ins[k]
    i = ins_k[rng.randrange(len(ins_k))]
    cands = sorted((set(st.out[k]) | set(ins_k)) - {i})
    j = cands[rng.randrange(len(cands))]
    if st.can_add(i, j):
        st.add(i, j)


def generate(params: GeneratorParams) -> DirectedNetwork:
    """Grow a directed network; a pure function of params including the seed.

    Each iteration: (1) draw pairs of nodes uniformly and attach i -> j if i
    has spare out-degree and the edge is new, else try j -> i the same way;
    (2) run triadic-closure attempts; (3) break ceil(break_fraction * edges)
    edges drawn uniformly without replacement.
    """
    rng = Random(params.rng_seed)
    st = _GrowState(params.n_nodes, params.max_out_degree)
    for _ in range(params.n_iterations):
        for _ in range(params.pairs_per_iter):
            i, j = rng.sample(range(params.n_nodes), 2)
            if st.can_add(i, j):
                st.add(i, j)
            elif st.can_add(j, i):
                st.add(j, i)
        for _ in range(params.triad_attempts_per_iter):
            _triad_attempt(st, rng)
        n_break = _break_count(st.n_edges, params.break_fraction)
        if n_break:
            for i, j in rng.sample(st.edge_list(), n_break):
                st.remove(i, j)
    net = st.network()
    isolated = net.isolated_nodes()
    if isolated:
        log.info(
            "generated network (seed=%d) has %d isolated node(s): %s",
            params.rng_seed, len(isolated), list(isolated),
        )
    log.debug(
        "generated network (seed=%d): %d nodes, %d edges",
        params.rng_seed, net.n_nodes, net.n_edges,
    )
    return net


def symmetrize(network: DirectedNetwork) -> DirectedNetwork:
    """Insert the reciprocal of every edge, unconditionally.

    Out-degree caps are deliberately not enforced here; the undirected
    variant of an experiment keeps every original edge and mirrors it.
    """
    ins = network.in_neighbors()
    rows = tuple(
        tuple(sorted(set(network.out_neighbors[k]) | set(ins[k])))
        for k in range(network.n_nodes)
    )
    return DirectedNetwork(network.n_nodes, rows)


def directed_cycle(n_nodes: int = 3) -> DirectedNetwork:
    """The n-node ring 0 -> 1 -> ... -> 0; each node observes its successor.

    The 3-node ring is the canonical odd cycle on which no profile is stable
    once the uniqueness weight exceeds 1: everyone wants to sit at distance
    exactly 1 from the node they observe, which an odd cycle cannot satisfy.
    """
    if n_nodes < 2:
        raise ValueError("a directed cycle needs at least 2 nodes")
    return DirectedNetwork(n_nodes, tuple(((i + 1) % n_nodes,) for i in range(n_nodes)))


def write_network(network: DirectedNetwork) -> str:
    """Edge-list text: node count header, then 'src dst' lines in lex order."""
    lines = [str(network.n_nodes)]
    lines.extend(f"{i} {j}" for i, j in network.edges())
    return "\n".join(lines) + "\n"


def read_network(text: str) -> DirectedNetwork:
    """Parse edge-list text; raises NetworkParseError naming the bad line.

    Blank lines and lines starting with '#' are skipped.  Rejects malformed
    lines, out-of-range indices, duplicate edges, and self-loops.
    """
    n_nodes: int | None = None
    seen: set[tuple[int, int]] = set()
    out: list[list[int]] = []
    last_line = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        last_line = line_no
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n_nodes is None:
            try:
                n_nodes = int(line)
            except ValueError:
                raise NetworkParseError(line_no, f"expected node count, got {raw!r}") from None
            if n_nodes < 1:
                raise NetworkParseError(line_no, "node count must be positive")
            out = [[] for _ in range(n_nodes)]
            continue
        parts = line.split()
        if len(parts) != 2:
            raise NetworkParseError(line_no, f"expected 'src dst', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise NetworkParseError(line_no, f"non-integer node index in {raw!r}") from None
        if not (0 <= i < n_nodes and 0 <= j < n_nodes):
            raise NetworkParseError(line_no, f"node index out of range in {raw!r}")
        if i == j:
            raise NetworkParseError(line_no, f"self-loop {i} -> {j}")
        if (i, j) in seen:
            raise NetworkParseError(line_no, f"duplicate edge {i} -> {j}")
        seen.add((i, j))
        out[i].append(j)
    if n_nodes is None:
        raise NetworkParseError(last_line + 1, "missing node count header")
    return DirectedNetwork(n_nodes, tuple(tuple(row) for row in out))


def save_network(network: DirectedNetwork, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_network(network))


def load_network(path) -> DirectedNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return read_network(fh.read())


def write_dot(
    network: DirectedNetwork,
    identities: Sequence[tuple[int, ...]],
    value_range: tuple[int, int] | None = None,
) -> str:
    """Graphviz DOT snapshot: filled nodes shaded by expressed identity.

    Shading maps the first identity coordinate linearly onto grayscale,
    white at the low end of the observed (or given) value range and black at
    the high end.  Edges keep their direction as arrows.
    """
    if len(identities) != network.n_nodes:
        raise ValueError("need one identity per node")
    vals = [x[0] for x in identities]
    lo, hi = value_range if value_range is not None else (min(vals), max(vals))
    span = hi - lo
    lines = ["digraph identity_snapshot {", "  node [shape=circle style=filled];"]
    for i, v in enumerate(vals):
        if span == 0:
            shade = 100
        else:
            shade = 100 - round(100 * (min(max(v, lo), hi) - lo) / span)
        lines.append(f'  n{i} [fillcolor="gray{shade}"];')
    for i, j in network.edges():
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
