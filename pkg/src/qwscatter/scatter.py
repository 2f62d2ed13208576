"""Scattering states and S-matrices of gadgets with semi-infinite paths.

On path j' the incoming scattering state for path j has the form

    <x, j'| sc_j(k)> = delta_{j', j} exp(-i k x) + S_{j', j}(k) exp(i k x),   x >= 1,

with x = 1 at the terminal.  Substituting this into the eigenvalue equation
H psi = 2 cos(k) psi at the vertices of the finite graph gives a square
linear system in the N entries S_{., j} and the internal amplitudes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graphcore import Gadget, GadgetError, Momentum

DEFAULT_TOL = 1e-9
RESIDUAL_TOL = 1e-9
BAND_EDGE_TOL = 1e-6


class ScatteringError(RuntimeError):
    """The scattering system could not be solved consistently."""


@dataclass(frozen=True, eq=False)
class ScatteringSolution:
    momentum: Momentum
    incoming: int
    s_row: np.ndarray
    amplitudes: np.ndarray  # one entry per vertex of the finite graph, terminals included
    energy: float
    residual: float
    confined_dim: int = 0

    @property
    def internal_amplitudes(self) -> np.ndarray:
        return self.amplitudes


@dataclass(frozen=True, eq=False)
class SMatrix:
    momentum: Momentum
    entries: np.ndarray

    def unitarity_error(self) -> float:
        S = self.entries
        return float(np.max(np.abs(S.conj().T @ S - np.eye(S.shape[0]))))

    def symmetry_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.T)))

    def __getitem__(self, idx):
        return self.entries[idx]


@dataclass(frozen=True)
class RTClassification:
    reflect_set: tuple[Momentum, ...]
    transmit_set: tuple[Momentum, ...]
    tolerance: float
    grid: tuple[Momentum, ...]


@dataclass(frozen=True)
class SwitchVerdict:
    is_switch: bool
    to_second: dict = field(default_factory=dict)  # k in D -> |S_{1,2}(k)|
    to_third: dict = field(default_factory=dict)  # p in D' -> |S_{1,3}(p)|


def _as_momentum(k) -> Momentum:
    return k if isinstance(k, Momentum) else Momentum.from_float(k)


def _check_inputs(g: Gadget, k: Momentum):
    if g.n_terminals < 1:
        raise GadgetError("gadget needs at least one terminal")
    if abs(math.sin(k.value)) < BAND_EDGE_TOL:
        raise ValueError(f"momentum {k} too close to a band edge")


def _system(g: Gadget, k: Momentum):
    """Matrix of the scattering system and one right-hand side per incoming path."""
    n, N = g.vertex_count, g.n_terminals
    E = 2.0 * math.cos(k.value)
    eik = cmath.exp(1j * k.value)
    H = g.adjacency(complex) - E * np.eye(n)

    to_psi = np.zeros((n, n), dtype=complex)
    for jp, t in enumerate(g.terminals):
        to_psi[t, jp] = eik
    for idx, w in enumerate(g.internal):
        to_psi[w, N + idx] = 1.0
    incoming = np.zeros((n, N), dtype=complex)
    for j, t in enumerate(g.terminals):
        incoming[t, j] = 1.0 / eik

    M = H @ to_psi
    R = H @ incoming
    for jp, t in enumerate(g.terminals):
        # second path vertex: delta exp(-2ik) + S exp(2ik)
        M[t, jp] += eik * eik
        R[t, jp] += 1.0 / (eik * eik)
    return M, -R, to_psi, incoming


def _solve(g: Gadget, k: Momentum):
    M, rhs, to_psi, incoming = _system(g, k)
    N = g.n_terminals
    u, s, vh = np.linalg.svd(M)
    cutoff = RESIDUAL_TOL * max(1.0, s[0])
    rank = int(np.sum(s > cutoff))
    # minimum-norm solution restricted to the numerically nonzero singular values
    coeffs = (u[:, :rank].conj().T @ rhs) / s[:rank, None]
    X = vh[:rank].conj().T @ coeffs
    residual = float(np.max(np.abs(M @ X - rhs)))
    if residual > RESIDUAL_TOL:
        raise ScatteringError(f"inconsistent scattering system at {k} (residual {residual:.2e})")
    null = vh[rank:].conj().T
    if null.size and np.max(np.abs(null[:N])) > RESIDUAL_TOL:
        raise ScatteringError(f"S-matrix not determined at {k}: null space touches terminals")
    amps = to_psi @ X + incoming
    return X[:N], amps, residual, null.shape[1]


def scattering_solve(g: Gadget, k, incoming: int) -> ScatteringSolution:
    """Row ``incoming`` of the S-matrix together with the amplitudes on the finite graph."""
    k = _as_momentum(k)
    _check_inputs(g, k)
    if not 0 <= incoming < g.n_terminals:
        raise GadgetError(f"incoming path {incoming} out of range")
    S, amps, residual, confined = _solve(g, k)
    return ScatteringSolution(
        momentum=k,
        incoming=incoming,
        s_row=S[:, incoming].copy(),
        amplitudes=amps[:, incoming].copy(),
        energy=2.0 * math.cos(k.value),
        residual=residual,
        confined_dim=confined,
    )


def s_matrix(g: Gadget, k) -> SMatrix:
    k = _as_momentum(k)
    _check_inputs(g, k)
    S, _, _, _ = _solve(g, k)
    return SMatrix(k, S)


def state_residual(g: Gadget, k, amplitudes, incoming, outgoing) -> float:
    """Eigenvalue-equation residual of a state on the infinite graph.

    The state is given by its amplitudes on the finite graph and by
    ``incoming[j] * exp(-ikx) + outgoing[j] * exp(ikx)`` on path j.  The path
    vertices beyond the terminal satisfy the equation automatically, so the
    residual covers the finite graph and the match at each terminal.
    """
    k = _as_momentum(k)
    E = 2.0 * math.cos(k.value)
    psi = np.asarray(amplitudes, dtype=complex)
    a_in = np.asarray(incoming, dtype=complex)
    a_out = np.asarray(outgoing, dtype=complex)
    r = g.adjacency(complex) @ psi - E * psi
    worst = 0.0
    for j, t in enumerate(g.terminals):
        on_path1 = a_in[j] * cmath.exp(-1j * k.value) + a_out[j] * cmath.exp(1j * k.value)
        on_path2 = a_in[j] * cmath.exp(-2j * k.value) + a_out[j] * cmath.exp(2j * k.value)
        worst = max(worst, abs(on_path1 - psi[t]))
        r[t] += on_path2
    return max(worst, float(np.max(np.abs(r))))


def classify_rt(g: Gadget, grid: Sequence[Momentum], tol: float = DEFAULT_TOL) -> RTClassification:
    """Momenta of the grid at which a two-terminal gadget perfectly reflects or transmits."""
    if g.n_terminals != 2:
        raise GadgetError(f"R/T classification needs 2 terminals, got {g.n_terminals}")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    reflect, transmit = [], []
    for k in grid:
        S = s_matrix(g, k).entries
        if abs(abs(S[0, 0]) - 1.0) < tol:
            reflect.append(k)
        elif abs(abs(S[1, 0]) - 1.0) < tol:
            transmit.append(k)
    return RTClassification(tuple(reflect), tuple(transmit), tol, tuple(grid))


def is_momentum_switch(g: Gadget, D: Sequence[Momentum], Dp: Sequence[Momentum],
                       tol: float = DEFAULT_TOL) -> SwitchVerdict:
    """Perfect transmission 1->2 on D and 1->3 on D'."""
    if g.n_terminals != 3:
        raise GadgetError(f"momentum switch needs 3 terminals, got {g.n_terminals}")
    if set(D) & set(Dp):
        raise ValueError("momentum sets overlap")
    to2 = {k: float(abs(s_matrix(g, k).entries[0, 1])) for k in D}
    to3 = {p: float(abs(s_matrix(g, p).entries[0, 2])) for p in Dp}
    ok = all(abs(v - 1.0) < tol for v in to2.values()) and all(abs(v - 1.0) < tol for v in to3.values())
    return SwitchVerdict(ok, to2, to3)


def downgrade_terminal(g: Gadget, t: int) -> Gadget:
    """Remove terminal ``t`` from the terminal list; the vertex stays, now internal."""
    if g.n_terminals < 2:
        raise GadgetError("cannot downgrade the only terminal")
    if not 0 <= t < g.n_terminals:
        raise GadgetError(f"terminal index {t} out of range")
    return g.with_terminals([v for i, v in enumerate(g.terminals) if i != t])


def series_transmission(t1: complex, t2: complex, k) -> complex:
    """Transmission of two perfectly transmitting gadgets merged in series."""
    k = _as_momentum(k)
    if abs(abs(t1) - 1) > DEFAULT_TOL or abs(abs(t2) - 1) > DEFAULT_TOL:
        raise ValueError("series composition needs |t1| = |t2| = 1")
    return cmath.exp(2j * k.value) * t1 * t2
