"""Gadget families, named graphs, and eigenvector certificates.

Type 1 R/T gadget layout: a finite graph G0 whose attachment vertices S are
all joined to a connector vertex ``a``; ``a`` is joined to both terminals.
With |S| = 1 the gadget is type 2.  G0 keeps its own vertex ids, then come
``a`` and the two terminals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graphcore import (
    Gadget,
    GadgetError,
    Momentum,
    chain,
    disjoint_union,
    merge_terminals,
    momentum_grid,
    union_grid,
)
from .scatter import RTClassification, s_matrix, state_residual

EIGEN_MATCH_TOL = 1e-8
CERT_TOL = 1e-9

# e^{i phi} of the phase gadget
EXP_IPHI = complex(2 * math.sqrt(2) / 3, 1 / 3)


@dataclass(frozen=True)
class Type1Spec:
    g0: Gadget
    attach: tuple[int, ...]
    name: str | None = None

    def __post_init__(self):
        attach = tuple(int(v) for v in self.attach)
        if not attach:
            raise GadgetError("attachment set is empty")
        if len(set(attach)) != len(attach):
            raise GadgetError("attachment vertices must be distinct")
        for v in attach:
            if not 0 <= v < self.g0.vertex_count:
                raise GadgetError(f"attachment vertex {v} not in G0")
        object.__setattr__(self, "attach", attach)

    @property
    def is_type2(self) -> bool:
        return len(self.attach) == 1

    def inner(self) -> tuple[Gadget | None, list[int]]:
        """Induced subgraph g0 on V(G0) minus S, and the G0 ids it keeps."""
        keep = [v for v in range(self.g0.vertex_count) if v not in self.attach]
        if not keep:
            return None, []
        sub, _ = self.g0.induced(keep)
        return sub, keep


@dataclass(frozen=True, eq=False)
class EigenCertificate:
    kind: str  # "reflect" or "transmit"
    momentum: Momentum
    eigenvector: np.ndarray
    constant_c: float | None = None


@dataclass(frozen=True)
class Family:
    gadget: Gadget
    spec: Type1Spec
    predicted: RTClassification


def build_type1(spec: Type1Spec) -> Gadget:
    n0 = spec.g0.vertex_count
    a, t1, t2 = n0, n0 + 1, n0 + 2
    edges = list(spec.g0.edges) + [(a, v) for v in spec.attach] + [(t1, a), (t2, a)]
    return Gadget(n0 + 3, tuple(edges), (t1, t2), spec.name)


def connector(spec: Type1Spec) -> int:
    return spec.g0.vertex_count


def eigenspace(A: np.ndarray, E: float, tol: float = EIGEN_MATCH_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the E-eigenspace of a real symmetric matrix."""
    if A.shape[0] == 0:
        return np.zeros((0, 0))
    w, V = np.linalg.eigh(A)
    return V[:, np.abs(w - E) < tol]


def lemma1_predict(spec: Type1Spec, k: Momentum) -> EigenCertificate | None:
    """Reflection certificate: a 2cos(k)-eigenvector of G0 with nonzero sum over S."""
    Q = eigenspace(spec.g0.adjacency(), k.energy)
    if Q.shape[1] == 0:
        return None
    ind = np.zeros(spec.g0.vertex_count)
    ind[list(spec.attach)] = 1.0
    chi = Q @ (Q.T @ ind)
    if abs(chi[list(spec.attach)].sum()) <= CERT_TOL:
        return None
    return EigenCertificate("reflect", k, chi)


def lemma2_predict(spec: Type1Spec, k: Momentum) -> EigenCertificate | None:
    """Transmission certificate: a 2cos(k)-eigenvector of g0 whose neighbor sums
    around every attachment vertex share one nonzero value."""
    sub, keep = spec.inner()
    if sub is None:
        return None
    Q = eigenspace(sub.adjacency(), k.energy)
    if Q.shape[1] == 0:
        return None
    pos = {v: i for i, v in enumerate(keep)}
    B = np.zeros((len(spec.attach), len(keep)))
    for i, v in enumerate(spec.attach):
        for u in spec.g0.neighbors(v):
            if u in pos:
                B[i, pos[u]] = 1.0
    BQ = B @ Q
    ones = np.ones(len(spec.attach))
    # absolute cutoff: Q is orthonormal and B is 0/1, so tiny singular values are round-off
    U, sv, Vt = np.linalg.svd(BQ, full_matrices=False)
    keep = sv > CERT_TOL
    y = Vt[keep].T @ ((U[:, keep].T @ ones) / sv[keep])
    if np.max(np.abs(BQ @ y - ones)) > CERT_TOL:
        return None
    return EigenCertificate("transmit", k, Q @ y, constant_c=1.0)


# closed-form spectra used by the path and cycle families

def path_eigenvector(L: int, j: int) -> tuple[float, np.ndarray]:
    """Eigenpair of the path with L edges: sin(pi j x / (L + 2)), x = 1..L+1."""
    x = np.arange(1, L + 2)
    return 2 * math.cos(math.pi * j / (L + 2)), np.sin(math.pi * j * x / (L + 2))


def cycle_eigenvector(r: int, m: int) -> tuple[float, np.ndarray]:
    """Eigenpair of the r-cycle: exp(2 pi i x m / r), x = 1..r."""
    x = np.arange(1, r + 1)
    return 2 * math.cos(2 * math.pi * m / r), np.exp(2j * math.pi * x * m / r)


def path_graph(n: int) -> Gadget:
    return Gadget(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(r: int) -> Gadget:
    return Gadget(r, tuple((i, (i + 1) % r) for i in range(r)))


def path_spec(l1: int, l2: int) -> Type1Spec:
    """Path with l1 + l2 - 2 edges attached at its l1-th vertex."""
    if l1 < 2 or l2 < 2:
        raise GadgetError("path family needs l1, l2 >= 2")
    return Type1Spec(path_graph(l1 + l2 - 1), (l1 - 1,), f"path({l1},{l2})")


def cycle_spec(r: int) -> Type1Spec:
    if r < 3:
        raise GadgetError("cycle family needs r >= 3")
    return Type1Spec(cycle_graph(r), (r - 1,), f"cycle({r})")


def predicted_path_sets(l1: int, l2: int) -> tuple[list[Momentum], list[Momentum]]:
    s = l1 + l2
    R = [Momentum.pi_fraction(j, s) for j in range(1, s) if Fraction(j * l1, s).denominator != 1]
    T: list[Momentum] = []
    for l in (l1, l2):
        for j in range(1, l):
            k = Momentum.pi_fraction(j, l)
            if k not in T:
                T.append(k)
    return R, T


def predicted_cycle_sets(r: int) -> tuple[list[Momentum], list[Momentum]]:
    R = [Momentum.pi_fraction(j, r) for j in range(1, r) if j % 2 == 0]
    T = [Momentum.pi_fraction(j, r) for j in range(1, r) if j % 2 == 1]
    return R, T


def path_gadget(l1: int, l2: int) -> Family:
    spec = path_spec(l1, l2)
    R, T = predicted_path_sets(l1, l2)
    grid = union_grid(l1, l2, l1 + l2)
    return Family(build_type1(spec), spec, RTClassification(tuple(R), tuple(T), 0.0, tuple(grid)))


def cycle_gadget(r: int) -> Family:
    spec = cycle_spec(r)
    R, T = predicted_cycle_sets(r)
    grid = momentum_grid(r)
    return Family(build_type1(spec), spec, RTClassification(tuple(R), tuple(T), 0.0, tuple(grid)))


# reversal and switch assembly

def _type2_parts(spec: Type1Spec):
    if not spec.is_type2:
        raise GadgetError("construction needs a type 2 spec (|S| = 1)")
    (v,) = spec.attach
    sub, keep = spec.inner()
    if sub is None:
        raise GadgetError("type 2 spec has an empty inner graph")
    pos = {u: i for i, u in enumerate(keep)}
    ws = [pos[u] for u in spec.g0.neighbors(v)]
    if not ws:
        raise GadgetError(f"attachment vertex {v} has no neighbors in G0")
    return sub, ws


def reversal_spec(spec: Type1Spec) -> Type1Spec:
    """Two copies of g0 joined through a new vertex; the first copy's w's are the new S."""
    sub, ws = _type2_parts(spec)
    m = sub.vertex_count
    hub = 2 * m
    edges = list(sub.edges) + [(u + m, v + m) for u, v in sub.edges]
    edges += [(hub, w) for w in ws] + [(hub, w + m) for w in ws]
    g0 = Gadget(2 * m + 1, tuple(edges))
    name = f"reversal({spec.name})" if spec.name else None
    return Type1Spec(g0, tuple(ws), name)


def reversal(spec: Type1Spec) -> Gadget:
    return build_type1(reversal_spec(spec))


@dataclass(frozen=True)
class SwitchLayout:
    gadget: Gadget
    center: int
    v: int
    hub: int
    copy1: tuple[int, ...]  # reversal copy wired to terminal 3
    copy2: tuple[int, ...]  # reversal copy behind the hub
    copy3: tuple[int, ...]  # the type 2 gadget's own g0


def switch_layout(spec: Type1Spec) -> SwitchLayout:
    """Claw with the type 2 gadget on leaf 2 and its reversal on leaf 3."""
    sub, ws = _type2_parts(spec)
    m = sub.vertex_count
    center, t1, t2, t3 = 0, 1, 2, 3
    v = 4
    c3 = tuple(range(5, 5 + m))
    c1 = tuple(range(5 + m, 5 + 2 * m))
    c2 = tuple(range(5 + 2 * m, 5 + 3 * m))
    hub = 5 + 3 * m
    edges = [(center, t1), (center, t2), (center, t3), (t2, v)]
    for copy in (c1, c2, c3):
        edges += [(copy[a], copy[b]) for a, b in sub.edges]
    edges += [(v, c3[w]) for w in ws]
    edges += [(t3, c1[w]) for w in ws]
    edges += [(hub, c1[w]) for w in ws] + [(hub, c2[w]) for w in ws]
    name = f"switch({spec.name})" if spec.name else None
    g = Gadget(hub + 1, tuple(edges), (t1, t2, t3), name)
    return SwitchLayout(g, center, v, hub, c1, c2, c3)


def switch_from_type2(spec: Type1Spec) -> Gadget:
    return switch_layout(spec).gadget


def switch_witness(spec: Type1Spec, k: Momentum):
    """Explicit eigenstate routing momentum k in the transmission set from path 1 to path 2.

    Returns (gadget, amplitudes, incoming, outgoing, residual), or None when
    the type 2 gadget has no transmission certificate at k.
    """
    cert = lemma2_predict(spec, k)
    if cert is None:
        return None
    lay = switch_layout(spec)
    g = lay.gadget
    xi, c = cert.eigenvector, cert.constant_c
    eik = complex(math.cos(k.value), math.sin(k.value))
    psi = np.zeros(g.vertex_count, dtype=complex)
    psi[lay.center] = 1.0
    psi[g.terminals[0]] = 1 / eik
    psi[g.terminals[1]] = eik
    psi[list(lay.copy1)] = -xi / c
    psi[list(lay.copy2)] = xi / c
    psi[list(lay.copy3)] = -eik * xi / c
    incoming = [1.0, 0.0, 0.0]
    outgoing = [0.0, 1.0, 0.0]
    return g, psi, incoming, outgoing, state_residual(g, k, psi, incoming, outgoing)


# named graphs

def cgw13_switch() -> Gadget:
    """Three-terminal switch between -pi/4 (1 -> 3) and -pi/2 (1 -> 2)."""
    drawn = [(2, 4), (4, 5), (3, 7), (1, 6), (6, 4), (6, 7), (7, 5), (7, 8), (8, 9), (8, 10),
             (11, 5), (11, 12), (11, 13)]
    return Gadget(13, tuple((a - 1, b - 1) for a, b in drawn), (1, 2, 0), "cgw13_switch")


def basis_change() -> Gadget:
    """Four-terminal basis-changing graph; terminals (1,1), (1,2) on the left, (1,3), (1,4) on the right."""
    ids = {1: 0, 2: 1, 3: 2, 4: 3, 5: 4, 6: 5, 7: 6, 8: 7, 9: 8, 0: 9}
    drawn = [(7, 1), (8, 2), (3, 9), (4, 0), (1, 3), (1, 5), (2, 4), (2, 5), (3, 6), (4, 6)]
    return Gadget(10, tuple((ids[a], ids[b]) for a, b in drawn), (6, 7, 8, 9), "basis_change")


def cycle3_switch() -> Gadget:
    """Hand-entered switch between -pi/3 and -2pi/3 (3-cycle construction)."""
    drawn = [(0, 1), (0, 2), (0, 3), (2, 4), (4, 5), (5, 6), (6, 4),
             (3, 7), (7, 9), (9, 10), (10, 11), (11, 9), (9, 8), (8, 3), (7, 8)]
    return Gadget(12, tuple(drawn), (1, 2, 3), "cycle3_switch")


# phase gadget: vertices L, R (terminals), C (center), TL, BL, TR, BR corners,
# X drawn on the lower-left spoke.  The drawing leaves X's wiring ambiguous.
_PH_L, _PH_R, _PH_C, _PH_TL, _PH_BL, _PH_TR, _PH_BR, _PH_X = range(8)
_PH_BASE = [(_PH_C, _PH_TL), (_PH_TL, _PH_L), (_PH_L, _PH_BL), (_PH_C, _PH_TR), (_PH_TR, _PH_R),
            (_PH_R, _PH_BR), (_PH_BR, _PH_C), (_PH_L, _PH_C), (_PH_BL, _PH_BR), (_PH_X, _PH_BR)]
PHASE_CANDIDATES = {
    "subdivided-spoke": [(_PH_BL, _PH_X), (_PH_X, _PH_C)],
    "spoke-plus-triangle": [(_PH_BL, _PH_C), (_PH_X, _PH_BL), (_PH_X, _PH_C)],
    "spoke-x-to-center": [(_PH_BL, _PH_C), (_PH_X, _PH_C)],
    "spoke-x-to-corner": [(_PH_BL, _PH_C), (_PH_X, _PH_BL)],
    "spoke-x-pendant": [(_PH_BL, _PH_C)],
}


def phase_candidate(label: str) -> Gadget:
    return Gadget(8, tuple(_PH_BASE + PHASE_CANDIDATES[label]), (_PH_L, _PH_R), "phase_gadget")


def phase_gate_error(g: Gadget) -> float:
    """Distance of the transmission coefficients from -e^{i phi} at -pi/4 and e^{i phi} at -3pi/4."""
    t1 = s_matrix(g, Momentum.pi_fraction(1, 4)).entries[1, 0]
    t3 = s_matrix(g, Momentum.pi_fraction(3, 4)).entries[1, 0]
    return max(abs(t1 + EXP_IPHI), abs(t3 - EXP_IPHI))


def reconstruct_phase_gadget(tol: float = 1e-9) -> tuple[Gadget, list[str], list[str]]:
    """First drawing-consistent wiring that passes the transmission gate.

    Returns the accepted gadget, the names of every passing candidate (the
    first is the one kept), and the names of the rejected ones.
    """
    passing, rejected = [], []
    for label in PHASE_CANDIDATES:
        g = phase_candidate(label)
        (passing if phase_gate_error(g) < tol else rejected).append((label, g))
    if not passing:
        raise GadgetError("no phase gadget candidate reproduces the target transmission")
    return passing[0][1], [p[0] for p in passing], [r[0] for r in rejected]


def phase_gadget() -> Gadget:
    return reconstruct_phase_gadget()[0]


def two_edge_path() -> Gadget:
    return Gadget(3, ((0, 1), (1, 2)), (0, 2), "two_edge_path")


def approx_switch(m: int) -> Gadget:
    """Basis change, m phase gadgets in series beside a two-edge path, basis change."""
    if m < 1 or m % 2 == 0:
        raise GadgetError("approx_switch needs odd m >= 1")
    top = chain(phase_gadget(), m)
    rails = disjoint_union(top, two_edge_path())  # terminals: top in, top out, bottom in, bottom out
    bc = basis_change()
    left = merge_terminals(bc, rails, [(2, 0), (3, 2)])
    full = merge_terminals(left, bc, [(2, 0), (3, 1)])
    return full.with_terminals(full.terminals, f"approx_switch({m})")


NAMED = {
    "cgw13_switch": cgw13_switch,
    "basis_change": basis_change,
    "phase_gadget": phase_gadget,
    "cycle3_switch": cycle3_switch,
    "two_edge_path": two_edge_path,
}


def named_gadget(name: str, m: int | None = None) -> Gadget:
    if name == "approx_switch":
        if m is None:
            raise GadgetError("approx_switch needs m")
        return approx_switch(m)
    if name.startswith("approx_switch(") and name.endswith(")"):
        return approx_switch(int(name[len("approx_switch("):-1]))
    try:
        return NAMED[name]()
    except KeyError:
        raise GadgetError(f"unknown gadget {name!r}") from None


CATALOG = [
    ("cgw13_switch", "three-terminal switch between -pi/4 and -pi/2 from the multi-particle universality construction"),
    ("cycle3_switch", "switch between -pi/3 and -2pi/3 built from the 3-cycle gadget and its reversal"),
    ("basis_change", "four-terminal basis-changing graph, block S-matrix at -pi/4 and -3pi/4"),
    ("phase_gadget", "two-terminal graph with transmission -e^{i phi} at -pi/4 and e^{i phi} at -3pi/4"),
    ("two_edge_path", "two-edge path, transmission 1 at every momentum"),
    ("approx_switch(m)", "approximate switch between -pi/4 and -3pi/4 with m phase gadgets, m odd"),
    ("path(l1,l2)", "type 2 R/T family: path with l1+l2-2 edges attached at vertex l1"),
    ("cycle(r)", "type 2 R/T family: r-cycle attached at one vertex"),
    ("reversal(spec)", "R/T set reversal of a type 2 gadget"),
    ("switch(spec)", "momentum switch from a type 2 gadget and its reversal on a claw"),
]
