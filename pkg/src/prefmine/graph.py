"""Directed multigraph road network with a d-dimensional cost vector per edge.

The on-disk interchange format is line oriented:

    # comment
    d <cost_dim> <name_1> ... <name_d>
    n <node_id>
    e <edge_id> <src> <dst> <c_1> ... <c_d>

The ``d`` header must precede all ``e`` records. Node and edge ids are
integers; parallel edges and self-loops are allowed, and edges are always
identified by edge id, never by their endpoint pair.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateCostError,
    DimensionMismatchError,
    ParseError,
    UnknownEdgeError,
    ValidationError,
)

EdgeTuple = tuple[int, int, int, Sequence[float]]


@dataclass(frozen=True)
class Edge:
    """A directed road segment with one traversal cost per cost type."""

    id: int
    source: int
    target: int
    costs: np.ndarray

    @property
    def is_self_loop(self) -> bool:
        return self.source == self.target


class RoadNetwork:
    """Immutable directed multigraph with per-edge cost vectors.

    Construction validates every invariant (endpoint existence, finite
    nonnegative costs, consistent cost dimension) and precomputes the CSR
    adjacency used by the shortest-path kernels. Out-edges of each node are
    stored in ascending edge-id order, which the kernels rely on for the
    lexicographic tie-break. Instances are safe to share across workers.
    """

    def __init__(
        self,
        nodes: Iterable[int],
        edges: Iterable[EdgeTuple],
        cost_names: Sequence[str],
    ):
        node_ids = []
        seen = set()
        for nid in nodes:
            nid = int(nid)
            if nid in seen:
                raise ValidationError(f"duplicate node id {nid}")
            seen.add(nid)
            node_ids.append(nid)
        self._node_ids: tuple[int, ...] = tuple(node_ids)
        self._node_index = {nid: i for i, nid in enumerate(node_ids)}

        self.cost_names: tuple[str, ...] = tuple(str(n) for n in cost_names)
        d = len(self.cost_names)
        if d < 1:
            raise ValidationError("cost dimension must be >= 1")
        if len(set(self.cost_names)) != d:
            raise ValidationError("cost names must be unique")

        eids, srcs, dsts, costs = [], [], [], []
        eseen = set()
        for eid, src, dst, cvec in edges:
            eid, src, dst = int(eid), int(src), int(dst)
            if eid in eseen:
                raise ValidationError(f"duplicate edge id {eid}")
            eseen.add(eid)
            if src not in self._node_index:
                raise ValidationError(f"edge {eid} references unknown node {src}")
            if dst not in self._node_index:
                raise ValidationError(f"edge {eid} references unknown node {dst}")
            vec = np.asarray(cvec, dtype=np.float64)
            if vec.shape != (d,):
                raise ValidationError(
                    f"edge {eid} has {vec.size} costs, expected {d}"
                )
            if not np.all(np.isfinite(vec)):
                raise ValidationError(f"edge {eid} has a non-finite cost")
            if np.any(vec < 0.0):
                raise ValidationError(f"edge {eid} has a negative cost")
            eids.append(eid)
            srcs.append(src)
            dsts.append(dst)
            costs.append(vec)

        m = len(eids)
        self._edge_ids: tuple[int, ...] = tuple(eids)
        self._edge_index = {eid: i for i, eid in enumerate(eids)}
        self._edge_src = np.array(
            [self._node_index[s] for s in srcs], dtype=np.int32
        )
        self._edge_dst = np.array(
            [self._node_index[t] for t in dsts], dtype=np.int32
        )
        self.cost_matrix = (
            np.vstack(costs) if m else np.empty((0, d), dtype=np.float64)
        )
        self.cost_matrix.setflags(write=False)

        self._build_csr()

    # ------------------------------------------------------------------
    # CSR adjacency (forward and reverse), consumed by the kernels.
    # ------------------------------------------------------------------
    def _build_csr(self) -> None:
        n, m = self.num_nodes, self.num_edges
        order = sorted(
            range(m), key=lambda i: (self._edge_src[i], self._edge_ids[i])
        )
        self.csr_order = np.array(order, dtype=np.int32)
        self.csr_head = self._edge_dst[self.csr_order].astype(np.int32)
        counts = np.bincount(self._edge_src, minlength=n)
        self.csr_indptr = np.zeros(n + 1, dtype=np.int32)
        np.cumsum(counts, out=self.csr_indptr[1:])
        self.csr_costs = (
            self.cost_matrix[self.csr_order]
            if m
            else np.empty((0, self.cost_dim))
        )
        for arr in (self.csr_order, self.csr_head, self.csr_indptr, self.csr_costs):
            arr.setflags(write=False)

        rev_order = sorted(range(m), key=lambda p: int(self.csr_head[p]))
        rev_counts = np.bincount(self.csr_head, minlength=n)
        self.rev_indptr = np.zeros(n + 1, dtype=np.int32)
        np.cumsum(rev_counts, out=self.rev_indptr[1:])
        self.rev_src = np.array(
            [self._edge_src[self.csr_order[p]] for p in rev_order], dtype=np.int32
        )
        self.rev_pos = np.array(rev_order, dtype=np.int32)
        for arr in (self.rev_indptr, self.rev_src, self.rev_pos):
            arr.setflags(write=False)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------
    @property
    def num_nodes(self) -> int:
        return len(self._node_ids)

    @property
    def num_edges(self) -> int:
        return len(self._edge_ids)

    @property
    def cost_dim(self) -> int:
        return len(self.cost_names)

    @property
    def node_ids(self) -> tuple[int, ...]:
        return self._node_ids

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return self._edge_ids

    def has_node(self, node_id: int) -> bool:
        return node_id in self._node_index

    def node_index(self, node_id: int) -> int:
        try:
            return self._node_index[node_id]
        except KeyError:
            raise ValidationError(f"unknown node id {node_id}") from None

    def node_id_at(self, index: int) -> int:
        return self._node_ids[index]

    def has_edge(self, edge_id: int) -> bool:
        return edge_id in self._edge_index

    def edge_dense_index(self, edge_id: int) -> int:
        try:
            return self._edge_index[edge_id]
        except KeyError:
            raise UnknownEdgeError(f"unknown edge id {edge_id}") from None

    def edge(self, edge_id: int) -> Edge:
        i = self.edge_dense_index(edge_id)
        return Edge(
            id=edge_id,
            source=self._node_ids[self._edge_src[i]],
            target=self._node_ids[self._edge_dst[i]],
            costs=self.cost_matrix[i],
        )

    def edges(self) -> Iterable[Edge]:
        for eid in self._edge_ids:
            yield self.edge(eid)

    def edge_id_at_csr(self, pos: int) -> int:
        return self._edge_ids[self.csr_order[pos]]

    def out_edge_ids(self, node_id: int) -> tuple[int, ...]:
        i = self.node_index(node_id)
        lo, hi = self.csr_indptr[i], self.csr_indptr[i + 1]
        return tuple(self._edge_ids[self.csr_order[p]] for p in range(lo, hi))

    def cost_name_index(self, name: str) -> int:
        try:
            return self.cost_names.index(name)
        except ValueError:
            raise ValidationError(f"unknown cost name {name!r}") from None

    def edge_costs_by_ids(self, edge_ids: Sequence[int]) -> np.ndarray:
        """Rows of the cost matrix for the given edge ids, in order."""
        idx = [self.edge_dense_index(e) for e in edge_ids]
        return self.cost_matrix[idx] if idx else np.empty((0, self.cost_dim))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RoadNetwork):
            return NotImplemented
        return (
            self._node_ids == other._node_ids
            and self._edge_ids == other._edge_ids
            and self.cost_names == other.cost_names
            and np.array_equal(self.cost_matrix, other.cost_matrix)
            and np.array_equal(self._edge_src, other._edge_src)
            and np.array_equal(self._edge_dst, other._edge_dst)
        )

    def __repr__(self) -> str:
        return (
            f"RoadNetwork(nodes={self.num_nodes}, edges={self.num_edges}, "
            f"d={self.cost_dim})"
        )

    def with_cost_matrix(self, matrix: np.ndarray) -> "RoadNetwork":
        """New network with identical topology and a replaced cost matrix."""
        if matrix.shape != self.cost_matrix.shape:
            raise DimensionMismatchError(
                f"cost matrix shape {matrix.shape}, "
                f"expected {self.cost_matrix.shape}"
            )
        edges = [
            (
                eid,
                self._node_ids[self._edge_src[i]],
                self._node_ids[self._edge_dst[i]],
                matrix[i],
            )
            for i, eid in enumerate(self._edge_ids)
        ]
        return RoadNetwork(self._node_ids, edges, self.cost_names)


def normalize_costs(network: RoadNetwork) -> RoadNetwork:
    """Divide each cost dimension by its mean so every dimension averages 1.

    Raises DegenerateCostError if any dimension is identically zero. The
    operation is idempotent up to floating-point roundoff.
    """
    if network.num_edges == 0:
        raise DegenerateCostError("cannot normalize a network without edges")
    means = network.cost_matrix.mean(axis=0)
    zero = np.flatnonzero(means == 0.0)
    if zero.size:
        names = ", ".join(network.cost_names[i] for i in zero)
        raise DegenerateCostError(f"cost dimension(s) identically zero: {names}")
    return network.with_cost_matrix(network.cost_matrix / means)


# ----------------------------------------------------------------------
# Text format
# ----------------------------------------------------------------------


def _parse_float(token: str, where: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{where}: bad float {token!r}") from None
    if math.isnan(value):
        raise ValidationError(f"{where}: NaN cost")
    return value


def _parse_int(token: str, where: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{where}: bad integer {token!r}") from None


def load_network(source) -> RoadNetwork:
    """Parse a network from a path, text stream, or string content."""
    if isinstance(source, str) and "\n" in source:
        lines = source.splitlines()
    elif hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()

    cost_names: tuple[str, ...] | None = None
    nodes: list[int] = []
    edges: list[EdgeTuple] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        tag, rest = tokens[0], tokens[1:]
        where = f"line {lineno}"
        if tag == "d":
            if cost_names is not None:
                raise ParseError(f"{where}: duplicate 'd' header")
            if len(rest) < 2:
                raise ParseError(f"{where}: 'd' needs a dimension and names")
            dim = _parse_int(rest[0], where)
            names = rest[1:]
            if dim < 1 or len(names) != dim:
                raise ParseError(
                    f"{where}: expected {rest[0]} cost names, got {len(names)}"
                )
            cost_names = tuple(names)
        elif tag == "n":
            if len(rest) != 1:
                raise ParseError(f"{where}: 'n' takes exactly one node id")
            nodes.append(_parse_int(rest[0], where))
        elif tag == "e":
            if cost_names is None:
                raise ParseError(f"{where}: 'e' record before 'd' header")
            if len(rest) != 3 + len(cost_names):
                raise ParseError(
                    f"{where}: 'e' needs id, src, dst and {len(cost_names)} costs"
                )
            eid = _parse_int(rest[0], where)
            src = _parse_int(rest[1], where)
            dst = _parse_int(rest[2], where)
            vec = [_parse_float(tok, where) for tok in rest[3:]]
            edges.append((eid, src, dst, vec))
        else:
            raise ParseError(f"{where}: unknown record tag {tag!r}")

    if cost_names is None:
        raise ParseError("missing 'd' header")
    return RoadNetwork(nodes, edges, cost_names)


def dump_network(network: RoadNetwork, target=None) -> str | None:
    """Serialize a network to the text format; returns the text if no target.

    Floats are written with shortest round-trip repr, so load -> dump -> load
    reproduces the network exactly and repeated dumps are byte identical.
    """
    buf = io.StringIO()
    buf.write("d %d %s\n" % (network.cost_dim, " ".join(network.cost_names)))
    for nid in network.node_ids:
        buf.write(f"n {nid}\n")
    for e in network.edges():
        costs = " ".join(repr(float(c)) for c in e.costs)
        buf.write(f"e {e.id} {e.source} {e.target} {costs}\n")
    text = buf.getvalue()
    if target is None:
        return text
    if hasattr(target, "write"):
        target.write(text)
        return None
    with open(target, "w", encoding="utf-8") as fh:
        fh.write(text)
    return None
