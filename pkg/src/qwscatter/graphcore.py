"""Graph and gadget data model.

A gadget is a finite simple graph with an ordered list of terminal vertices;
semi-infinite paths are attached to the terminals when the gadget is used as
a scatterer.  Terminal order fixes the row/column order of the S-matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class GadgetError(ValueError):
    """Invalid gadget document or construction."""


@dataclass(frozen=True)
class Momentum:
    """Momentum k in (-pi, 0).

    When ``frac`` is set the momentum is exactly ``-pi * frac`` and equality
    and hashing go through the fraction; otherwise only ``value`` is known.
    """

    value: float
    frac: Fraction | None = field(default=None)

    def __post_init__(self):
        if not (-math.pi < self.value < 0.0):
            raise ValueError(f"momentum {self.value!r} outside (-pi, 0)")
        if self.frac is not None and not (0 < self.frac < 1):
            raise ValueError(f"fraction {self.frac} outside (0, 1)")

    @classmethod
    def pi_fraction(cls, p: int, q: int = 1) -> "Momentum":
        """k = -pi * p / q, reduced."""
        f = Fraction(p, q)
        if not (0 < f < 1):
            raise ValueError(f"need 0 < p/q < 1, got {p}/{q}")
        return cls(-math.pi * f.numerator / f.denominator, f)

    @classmethod
    def from_float(cls, k: float) -> "Momentum":
        return cls(float(k), None)

    @classmethod
    def parse(cls, text: str) -> "Momentum":
        """Parse the CLI syntax ``"p/q"`` meaning -pi*p/q."""
        try:
            f = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad momentum {text!r}; expected p/q") from exc
        return cls.pi_fraction(f.numerator, f.denominator)

    @property
    def numerator(self) -> int | None:
        return None if self.frac is None else self.frac.numerator

    @property
    def denominator(self) -> int | None:
        return None if self.frac is None else self.frac.denominator

    @property
    def energy(self) -> float:
        return 2.0 * math.cos(self.value)

    @property
    def label(self) -> str:
        if self.frac is None:
            return repr(self.value)
        return f"{self.frac.numerator}/{self.frac.denominator}"

    def __eq__(self, other):
        if not isinstance(other, Momentum):
            return NotImplemented
        if self.frac is not None and other.frac is not None:
            return self.frac == other.frac
        return self.value == other.value

    def __hash__(self):
        return hash(self.frac) if self.frac is not None else hash(self.value)

    def __repr__(self):
        if self.frac is not None:
            return f"Momentum(-pi*{self.label})"
        return f"Momentum({self.value!r})"


def momentum_grid(q: int) -> list[Momentum]:
    """{-pi j / q : j = 1..q-1}, deduplicated after reduction."""
    if q < 2:
        raise ValueError("grid denominator must be >= 2")
    seen = []
    for j in range(1, q):
        k = Momentum.pi_fraction(j, q)
        if k not in seen:
            seen.append(k)
    return seen


def union_grid(*qs: int) -> list[Momentum]:
    out: list[Momentum] = []
    for q in qs:
        for k in momentum_grid(q):
            if k not in out:
                out.append(k)
    return sorted(out, key=lambda m: -m.value)


def _normalize_edges(edges: Iterable[Sequence[int]]) -> tuple[tuple[int, int], ...]:
    out = set()
    for e in edges:
        if len(e) != 2:
            raise GadgetError(f"edge {e!r} is not a pair")
        u, v = int(e[0]), int(e[1])
        if u == v:
            raise GadgetError(f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in out:
            raise GadgetError(f"duplicate edge {key}")
        out.add(key)
    return tuple(sorted(out))


@dataclass(frozen=True)
class Gadget:
    """Finite simple graph with ordered terminals.

    An empty terminal list denotes a closed graph (used for the truncated
    finite proxies and for the subgraphs inside gadget constructions).
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    terminals: tuple[int, ...] = ()
    name: str | None = None

    def __post_init__(self):
        if self.vertex_count < 1:
            raise GadgetError("vertex_count must be positive")
        edges = _normalize_edges(self.edges)
        for u, v in edges:
            if u < 0 or v >= self.vertex_count:
                raise GadgetError(f"edge ({u}, {v}) out of range for {self.vertex_count} vertices")
        terminals = tuple(int(t) for t in self.terminals)
        for t in terminals:
            if not 0 <= t < self.vertex_count:
                raise GadgetError(f"terminal {t} out of range")
        if len(set(terminals)) != len(terminals):
            dup = sorted({t for t in terminals if terminals.count(t) > 1})
            raise GadgetError(f"duplicate terminal {dup}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "terminals", terminals)

    @property
    def n_terminals(self) -> int:
        return len(self.terminals)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def internal(self) -> tuple[int, ...]:
        ts = set(self.terminals)
        return tuple(v for v in range(self.vertex_count) if v not in ts)

    def adjacency(self, dtype=float) -> np.ndarray:
        A = np.zeros((self.vertex_count, self.vertex_count), dtype=dtype)
        for u, v in self.edges:
            A[u, v] = 1
            A[v, u] = 1
        return A

    def neighbors(self, v: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return sorted(out)

    def with_terminals(self, terminals: Sequence[int], name: str | None = None) -> "Gadget":
        return Gadget(self.vertex_count, self.edges, tuple(terminals), name or self.name)

    def induced(self, keep: Sequence[int]) -> tuple["Gadget", dict[int, int]]:
        """Induced closed subgraph on ``keep``; returns it with the old->new id map."""
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Gadget(len(keep), tuple(edges)), index

    def to_document(self) -> dict:
        doc = {
            "vertices": self.vertex_count,
            "edges": [list(e) for e in self.edges],
            "terminals": list(self.terminals),
        }
        if self.name is not None:
            doc["name"] = self.name
        return doc

    def to_networkx(self):
        import networkx as nx

        G = nx.Graph()
        for v in range(self.vertex_count):
            role = self.terminals.index(v) if v in self.terminals else -1
            G.add_node(v, terminal=role)
        G.add_edges_from(self.edges)
        return G


def load_gadget(document: str | dict) -> Gadget:
    """Parse a JSON gadget document (string or already-decoded dict)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GadgetError(f"parse failure: {exc}") from exc
    if not isinstance(document, dict):
        raise GadgetError("gadget document must be a JSON object")
    unknown = set(document) - {"vertices", "edges", "terminals", "name"}
    if unknown:
        raise GadgetError(f"unknown keys {sorted(unknown)}")
    try:
        n = document["vertices"]
        edges = document["edges"]
        terminals = document.get("terminals", [])
    except KeyError as exc:
        raise GadgetError(f"missing key {exc}") from exc
    if not isinstance(n, int) or isinstance(n, bool):
        raise GadgetError("'vertices' must be an integer")
    if not isinstance(edges, list) or not all(isinstance(e, list) for e in edges):
        raise GadgetError("'edges' must be a list of pairs")
    if not isinstance(terminals, list) or not all(isinstance(t, int) for t in terminals):
        raise GadgetError("'terminals' must be a list of integers")
    name = document.get("name")
    if name is not None and not isinstance(name, str):
        raise GadgetError("'name' must be a string")
    return Gadget(n, tuple(tuple(e) for e in edges), tuple(terminals), name)


def save_gadget(g: Gadget) -> str:
    """Canonical JSON: edges sorted, keys in fixed order."""
    return json.dumps(g.to_document())


def disjoint_union(g1: Gadget, g2: Gadget) -> Gadget:
    """Side-by-side copy; g2's vertices are shifted past g1's, terminals concatenated."""
    n1 = g1.vertex_count
    edges = list(g1.edges) + [(u + n1, v + n1) for u, v in g2.edges]
    terminals = list(g1.terminals) + [t + n1 for t in g2.terminals]
    return Gadget(n1 + g2.vertex_count, tuple(edges), tuple(terminals))


def merge_terminals(g1: Gadget, g2: Gadget, pairs: Sequence[tuple[int, int]]) -> Gadget:
    """Identify terminal ``g1.terminals[i]`` with ``g2.terminals[j]`` for each (i, j).

    Identified vertices become internal.  Remaining terminals keep their
    order, g1's first.
    """
    if not pairs:
        raise GadgetError("nothing to merge")
    out_idx = [i for i, _ in pairs]
    in_idx = [j for _, j in pairs]
    for i in out_idx:
        if not 0 <= i < g1.n_terminals:
            raise GadgetError(f"output terminal index {i} out of range")
    for j in in_idx:
        if not 0 <= j < g2.n_terminals:
            raise GadgetError(f"input terminal index {j} out of range")
    if len(set(out_idx)) != len(out_idx) or len(set(in_idx)) != len(in_idx):
        raise GadgetError("terminal used twice in merge")

    n1 = g1.vertex_count
    glue = {g2.terminals[j]: g1.terminals[i] for i, j in pairs}
    relabel = {}
    nxt = n1
    for v in range(g2.vertex_count):
        if v in glue:
            relabel[v] = glue[v]
        else:
            relabel[v] = nxt
            nxt += 1
    edges = list(g1.edges)
    for u, v in g2.edges:
        a, b = relabel[u], relabel[v]
        if a == b:
            raise GadgetError(f"merge would create a self-loop at {a}")
        edges.append((a, b))
    try:
        normalized = _normalize_edges(edges)
    except GadgetError as exc:
        raise GadgetError(f"merge would create a multi-edge: {exc}") from exc
    terminals = [t for i, t in enumerate(g1.terminals) if i not in out_idx]
    terminals += [relabel[t] for j, t in enumerate(g2.terminals) if j not in in_idx]
    return Gadget(nxt, normalized, tuple(terminals))


def series_merge(g1: Gadget, out_terminal: int, g2: Gadget, in_terminal: int) -> Gadget:
    """Identify g1's output terminal with g2's input terminal."""
    return merge_terminals(g1, g2, [(out_terminal, in_terminal)])


def chain(g: Gadget, copies: int) -> Gadget:
    """``copies`` copies of a two-terminal gadget, each output merged into the next input."""
    if g.n_terminals != 2:
        raise GadgetError("chain needs a two-terminal gadget")
    if copies < 1:
        raise GadgetError("need at least one copy")
    out = g
    for _ in range(copies - 1):
        out = series_merge(out, 1, g, 0)
    return out


@dataclass(frozen=True)
class TruncatedGraph:
    """Gadget with finite pendant paths standing in for the semi-infinite ones.

    ``locator[(x, j)]`` is the vertex id at distance x along path j (x = 1 is
    the original terminal, x runs to length + 1; j is the 0-based terminal
    index).
    """

    graph: Gadget
    locator: dict
    length: int
    n_paths: int
    core_size: int

    def path_ids(self, j: int) -> list[int]:
        return [self.locator[(x, j)] for x in range(1, self.length + 2)]


def attach_truncated_paths(g: Gadget, length: int) -> TruncatedGraph:
    """Hang a path of ``length`` new vertices off every terminal."""
    if length < 1:
        raise GadgetError("path length must be >= 1")
    n = g.vertex_count
    edges = list(g.edges)
    locator = {}
    nxt = n
    for j, t in enumerate(g.terminals):
        locator[(1, j)] = t
        prev = t
        for x in range(2, length + 2):
            locator[(x, j)] = nxt
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    closed = Gadget(nxt, tuple(edges), (), g.name)
    return TruncatedGraph(closed, locator, length, g.n_terminals, n)


def is_isomorphic(g1: Gadget, g2: Gadget, respect_terminals: bool = True) -> bool:
    """Graph isomorphism; with ``respect_terminals`` the terminal order must map onto itself."""
    import networkx as nx
    from networkx.algorithms.isomorphism import categorical_node_match

    if g1.vertex_count != g2.vertex_count or g1.edge_count != g2.edge_count:
        return False
    match = categorical_node_match("terminal", -1) if respect_terminals else None
    return nx.is_isomorphic(g1.to_networkx(), g2.to_networkx(), node_match=match)
