"""Reproducible gadget collections for property checks."""

from __future__ import annotations

import numpy as np

from . import constructions as C
from .graphcore import Gadget


def random_graph(rng: np.random.Generator, n: int, p: float = 0.45) -> Gadget:
    iu = np.triu_indices(n, 1)
    mask = rng.random(len(iu[0])) < p
    edges = tuple(zip(iu[0][mask].tolist(), iu[1][mask].tolist()))
    return Gadget(n, edges)


def random_type1_specs(count: int, seed: int = 0, max_g0: int = 7, type2: bool | None = None,
                       min_g0: int = 1) -> list[C.Type1Spec]:
    """Random (G0, S) pairs; type2=True forces |S| = 1, False forces |S| >= 2."""
    rng = np.random.default_rng(seed)
    specs = []
    while len(specs) < count:
        n = int(rng.integers(min_g0, max_g0 + 1))
        g0 = random_graph(rng, n)
        if type2:
            size = 1
        elif type2 is False:
            if n < 2:
                continue
            size = int(rng.integers(2, n + 1))
        else:
            size = int(rng.integers(1, n + 1))
        attach = tuple(sorted(rng.choice(n, size, replace=False).tolist()))
        specs.append(C.Type1Spec(g0, attach, f"random{seed}-{len(specs)}"))
    return specs


def family_specs(max_l: int = 8, max_r: int = 12) -> list[C.Type1Spec]:
    specs = [C.path_spec(a, b) for a in range(2, max_l + 1) for b in range(2, max_l + 1)]
    return specs + [C.cycle_spec(r) for r in range(3, max_r + 1)]


def type2_specs(seed: int = 0, random_count: int = 10) -> list[C.Type1Spec]:
    """Type 2 instances with nonempty inner graph, family ones first."""
    specs = [C.cycle_spec(r) for r in range(3, 9)]
    specs += [C.path_spec(a, b) for a, b in [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4)]]
    pool = random_type1_specs(4 * random_count, seed, max_g0=6, type2=True, min_g0=2)
    specs += [s for s in pool if s.g0.neighbors(s.attach[0])][:random_count]
    return specs


def two_terminal_corpus(max_vertices: int = 12, seed: int = 0, random_count: int = 20) -> list[Gadget]:
    """Path, cycle and random type 1 gadgets up to max_vertices, plus small named ones."""
    out = [Gadget(2, ((0, 1),), (0, 1), "edge"), C.two_edge_path(), C.phase_gadget()]
    for a in range(2, max_vertices):
        for b in range(a, max_vertices):
            if a + b + 2 <= max_vertices:
                out.append(C.path_gadget(a, b).gadget)
    out += [C.cycle_gadget(r).gadget for r in range(3, max_vertices - 2)]
    for spec in random_type1_specs(random_count, seed, max_g0=max_vertices - 3):
        out.append(C.build_type1(spec))
    return out + [C.build_type1(s) for s in sqrt2_specs() if s.g0.vertex_count + 3 <= max_vertices]


def sqrt2_specs() -> list[C.Type1Spec]:
    """Type 1 specs on the 3- and 7-vertex paths, both of which have eigenvalue sqrt2."""
    specs = []
    for n, subsets in ((3, [(0,), (1,), (0, 1), (0, 2), (0, 1, 2)]),
                       (7, [(0,), (2,), (0, 6), (1, 5), (3,), (0, 3, 6)])):
        for S in subsets:
            specs.append(C.Type1Spec(C.path_graph(n), S, f"P{n}{list(S)}"))
    return specs


def scattering_corpus(seed: int = 0) -> list[Gadget]:
    """Two-, three- and four-terminal gadgets for unitarity and symmetry checks."""
    out = two_terminal_corpus(seed=seed)
    out += [C.cgw13_switch(), C.cycle3_switch(), C.basis_change(), C.approx_switch(1)]
    out += [C.switch_from_type2(C.cycle_spec(r)) for r in (4, 5)]
    out.append(C.reversal(C.path_spec(2, 3)))
    claw = Gadget(4, ((0, 1), (0, 2), (0, 3)), (1, 2, 3), "claw")
    out.append(claw)
    return out
