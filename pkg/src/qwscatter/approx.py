"""Closed-form analysis of the approximate -pi/4 / -3pi/4 switch.

m phase gadgets in series give transmission -i^(m-1) e^{i m phi} at -pi/4
and i^(m-1) e^{i m phi} at -3pi/4; sandwiched between two basis-change
graphs this yields the 2x2 transmission blocks V(k).  The switch targets are
diag(-1, 1) at -pi/4 and [[0, i], [i, 0]] at -3pi/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constructions import approx_switch
from .graphcore import Momentum
from .scatter import s_matrix

SQRT2 = math.sqrt(2.0)

U_BC = -np.array([[1j, 1], [1, 1j]]) / SQRT2
TARGET_QUARTER = np.array([[-1, 0], [0, 1]], dtype=complex)
TARGET_THREEQUARTER = np.array([[0, 1j], [1j, 0]], dtype=complex)

K_QUARTER = Momentum.pi_fraction(1, 4)
K_THREEQUARTER = Momentum.pi_fraction(3, 4)


@dataclass(frozen=True)
class PhaseConstant:
    exp_iphi: complex = complex(2 * SQRT2 / 3, 1 / 3)
    phi: float = math.atan(1 / (2 * SQRT2))


PHASE = PhaseConstant()


@dataclass(frozen=True, eq=False)
class SwitchApproximant:
    m: int
    V_quarter: np.ndarray
    V_threequarter: np.ndarray
    error: float
    error_frobenius: float
    error_quarter: float
    error_threequarter: float


def _check_m(m: int):
    if m < 1 or m % 2 == 0:
        raise ValueError(f"m must be odd and >= 1, got {m}")


def rail_phase(m: int) -> complex:
    """i^(m-1) e^{i m phi}; the top rail transmits minus this at -pi/4 and this at -3pi/4."""
    return 1j ** ((m - 1) % 4) * np.exp(1j * m * PHASE.phi)


def u_m(m: int, k: Momentum) -> np.ndarray:
    _check_m(m)
    z = rail_phase(m)
    if k == K_QUARTER:
        return np.diag([-z, 1.0 + 0j])
    if k == K_THREEQUARTER:
        return np.diag([z, 1.0 + 0j])
    raise ValueError("U_m is only defined at -pi/4 and -3pi/4")


def v_closed_form(m: int) -> tuple[np.ndarray, np.ndarray]:
    """The two V matrices written out entrywise (independent of the matrix product)."""
    _check_m(m)
    e = np.exp(1j * m * PHASE.phi)
    i = 1j
    Vq = -0.5 * np.array([
        [-i ** (m + 1) * e + 1, -i ** m * e + i],
        [-i ** m * e + i, -i ** (m - 1) * e - 1],
    ])
    Vt = -0.5 * np.array([
        [i ** (m + 1) * e + 1, -i ** m * e - i],
        [-i ** m * e - i, i ** (m - 1) * e - 1],
    ])
    return Vq, Vt


def v_matrices(m: int) -> SwitchApproximant:
    _check_m(m)
    Vq = -U_BC @ u_m(m, K_QUARTER) @ U_BC
    Ubs = U_BC.conj()
    Vt = -Ubs @ u_m(m, K_THREEQUARTER) @ Ubs
    dq, dt = Vq - TARGET_QUARTER, Vt - TARGET_THREEQUARTER
    eq, et = np.linalg.norm(dq, 2), np.linalg.norm(dt, 2)
    fro = max(np.linalg.norm(dq, "fro"), np.linalg.norm(dt, "fro"))
    return SwitchApproximant(m, Vq, Vt, float(max(eq, et)), float(fro), float(eq), float(et))


def _batch_errors(ms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spectral and Frobenius switch errors for an array of odd m."""
    z = (1j ** ((ms - 1) % 4)) * np.exp(1j * ms * PHASE.phi)
    Um_q = np.zeros((len(ms), 2, 2), dtype=complex)
    Um_q[:, 0, 0] = -z
    Um_q[:, 1, 1] = 1.0
    Um_t = Um_q.copy()
    Um_t[:, 0, 0] = z
    Ub = U_BC.conj()
    dq = -(U_BC @ Um_q @ U_BC) - TARGET_QUARTER
    dt = -(Ub @ Um_t @ Ub) - TARGET_THREEQUARTER
    spec = np.maximum(np.linalg.svd(dq, compute_uv=False)[:, 0], np.linalg.svd(dt, compute_uv=False)[:, 0])
    fro = np.maximum(np.linalg.norm(dq, axis=(1, 2)), np.linalg.norm(dt, axis=(1, 2)))
    return spec, fro


def error_table(m_max: int, chunk: int = 1 << 16):
    """Rows (m, spectral error, Frobenius error, is_record) for odd m <= m_max."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    best = math.inf
    for start in range(1, m_max + 1, 2 * chunk):
        ms = np.arange(start, min(m_max, start + 2 * chunk - 1) + 1, 2)
        spec, fro = _batch_errors(ms)
        for m, e, f in zip(ms.tolist(), spec.tolist(), fro.tolist()):
            record = e < best
            if record:
                best = e
            yield m, e, f, record


def search_best_m(m_max: int) -> list[tuple[int, float]]:
    """Odd m whose error beats every smaller odd m."""
    return [(m, e) for m, e, _, rec in error_table(m_max) if rec]


@dataclass(frozen=True)
class GraphValidation:
    m: int
    deviation: float
    passed: bool
    graph_error_quarter: float
    graph_error_threequarter: float


def validate_against_graph(m: int, tol: float = 1e-8) -> GraphValidation:
    """Compare the closed-form V(k) with the transmission block of the assembled graph."""
    _check_m(m)
    g = approx_switch(m)
    ref = v_matrices(m)
    dev = 0.0
    blocks = {}
    for k, V in ((K_QUARTER, ref.V_quarter), (K_THREEQUARTER, ref.V_threequarter)):
        S = s_matrix(g, k).entries
        block = S[2:, :2]
        dev = max(dev, float(np.max(np.abs(block - V))), float(np.max(np.abs(S[:2, :2]))),
                  float(np.max(np.abs(S[2:, 2:]))))
        blocks[k] = block
    return GraphValidation(
        m, dev, dev < tol,
        float(np.linalg.norm(blocks[K_QUARTER] - TARGET_QUARTER, 2)),
        float(np.linalg.norm(blocks[K_THREEQUARTER] - TARGET_THREEQUARTER, 2)),
    )
