import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import green_s_matrix
from qwscatter import constructions as C
from qwscatter.approx import U_BC
from qwscatter.corpus import scattering_corpus, two_terminal_corpus
from qwscatter.graphcore import Gadget, GadgetError, Momentum, momentum_grid, series_merge
from qwscatter.scatter import (
    classify_rt, downgrade_terminal, is_momentum_switch, s_matrix,
    scattering_solve, series_transmission, state_residual,
)

EDGE = Gadget(2, ((0, 1),), (0, 1))
Q, H, TQ = Momentum.pi_fraction(1, 4), Momentum.pi_fraction(1, 2), Momentum.pi_fraction(3, 4)
W = np.exp(-1j * math.pi / 4)

# displayed S-matrices of the CGW13 switch
SWITCH13_QUARTER = np.array([[0, 0, W], [0, -1, 0], [W, 0, 0]])
SWITCH13_HALF = np.array([[0, -1, 0], [-1, 0, 0], [0, 0, 1]])


def test_single_edge_half():
    sol = scattering_solve(EDGE, H, 0)
    # E = 0: psi(t2) = -psi(2,1) and psi(t1) = -psi(2,2) force R = 0, T = e^{-ik} = i
    assert abs(sol.s_row[0]) < 1e-12
    assert sol.s_row[1] == pytest.approx(1j, abs=1e-12)
    assert sol.energy == pytest.approx(0.0, abs=1e-15)
    assert sol.residual < 1e-12


@pytest.mark.parametrize("k", [Momentum.pi_fraction(j, 21) for j in range(1, 21)])
def test_two_edge_path_transmits_one(k):
    row = scattering_solve(C.two_edge_path(), k, 0).s_row
    assert abs(row[0]) < 1e-10 and abs(row[1] - 1) < 1e-10


def test_switch13_quarter_row():
    row = scattering_solve(C.cgw13_switch(), Q, 0).s_row
    np.testing.assert_allclose(row, [0, 0, W], atol=1e-8)


def test_switch13_matrices():
    g = C.cgw13_switch()
    np.testing.assert_allclose(s_matrix(g, Q).entries, SWITCH13_QUARTER, atol=1e-8)
    np.testing.assert_allclose(s_matrix(g, H).entries, SWITCH13_HALF, atol=1e-8)


def test_basis_change_blocks():
    g = C.basis_change()
    Sq, St = s_matrix(g, Q).entries, s_matrix(g, TQ).entries
    Z = np.zeros((2, 2))
    np.testing.assert_allclose(Sq, np.block([[Z, U_BC], [U_BC, Z]]), atol=1e-8)
    np.testing.assert_allclose(St, np.block([[Z, -U_BC.conj()], [-U_BC.conj(), Z]]), atol=1e-8)


def test_rejects_band_edges_and_range():
    with pytest.raises(ValueError):
        scattering_solve(EDGE, Momentum.from_float(-1e-9), 0)
    with pytest.raises((ValueError, GadgetError)):
        scattering_solve(EDGE, H, 2)


def test_rank_deficient_row_unique():
    # path(4,4) has a state confined to G0 at -pi/4 energy
    g = C.path_gadget(4, 4).gadget
    sol = scattering_solve(g, Q, 0)
    assert sol.confined_dim >= 1
    assert sol.residual < 1e-9
    np.testing.assert_allclose(sol.s_row, green_s_matrix(g, Q.value)[:, 0], atol=1e-10)
    # shifting the internal amplitudes by a confined state keeps the state valid
    A = g.adjacency()
    w, V = np.linalg.eigh(A)
    for vec in V[:, np.abs(w - Q.energy) < 1e-9].T:
        if np.max(np.abs(vec[list(g.terminals)])) < 1e-12:
            shifted = sol.amplitudes + 0.7 * vec
            r = state_residual(g, Q, shifted, np.eye(2)[0], sol.s_row)
            assert r < 1e-9


def test_oracle_agreement_corpus():
    rng = np.random.default_rng(1)
    for g in scattering_corpus()[::3]:
        for k in -rng.uniform(0.05, math.pi - 0.05, 4):
            S = s_matrix(g, Momentum.from_float(k)).entries
            np.testing.assert_allclose(S, green_s_matrix(g, k), atol=1e-9)


def test_unitary_symmetric_corpus():
    rng = np.random.default_rng(7)
    corpus = scattering_corpus()
    assert len(corpus) >= 50
    worst = 0.0
    for g in corpus:
        for k in -rng.uniform(0.01, math.pi - 0.01, 50):
            S = s_matrix(g, Momentum.from_float(k))
            worst = max(worst, S.unitarity_error(), S.symmetry_error())
    assert worst < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(two_terminal_corpus()), st.floats(0.01, math.pi - 0.01))
def test_two_terminal_norm_identity(g, k):
    S = s_matrix(g, Momentum.from_float(-k)).entries
    assert abs(abs(S[0, 0]) ** 2 + abs(S[1, 0]) ** 2 - 1) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(two_terminal_corpus()), st.floats(0.01, math.pi - 0.01))
def test_solution_residual_and_norm(g, k):
    sol = scattering_solve(g, Momentum.from_float(-k), 1)
    assert sol.residual < 1e-9
    assert abs(np.linalg.norm(sol.s_row) - 1) < 1e-9


def test_type1_connector_identity():
    # <a|sc_1> = 1 + R = T on type 1 gadgets
    rng = np.random.default_rng(3)
    from qwscatter.corpus import random_type1_specs
    specs = random_type1_specs(15, seed=11) + [C.path_spec(2, 3), C.cycle_spec(5)]
    for spec in specs:
        g = C.build_type1(spec)
        a = C.connector(spec)
        for k in -rng.uniform(0.05, math.pi - 0.05, 5):
            sol = scattering_solve(g, Momentum.from_float(k), 0)
            R, T = sol.s_row
            assert abs(sol.amplitudes[a] - (1 + R)) < 1e-9
            assert abs(1 + R - T) < 1e-9


@pytest.mark.parametrize("g, grid, R, T", [
    (C.path_gadget(2, 2).gadget, momentum_grid(4), ["1/4", "3/4"], ["1/2"]),
    (C.cycle_gadget(4).gadget, momentum_grid(4), ["1/2"], ["1/4", "3/4"]),
    (C.cycle_gadget(3).gadget, momentum_grid(3), ["2/3"], ["1/3"]),
])
def test_classify_examples(g, grid, R, T):
    res = classify_rt(g, grid)
    assert [k.label for k in res.reflect_set] == R
    assert [k.label for k in res.transmit_set] == T
    assert not set(res.reflect_set) & set(res.transmit_set)
    assert set(res.reflect_set) <= set(grid) and set(res.transmit_set) <= set(grid)


def test_classify_wrong_terminal_count():
    with pytest.raises(GadgetError):
        classify_rt(C.cgw13_switch(), momentum_grid(4))


def test_family_sets_match_predictions():
    for l1 in range(2, 9):
        for l2 in range(2, 9):
            fam = C.path_gadget(l1, l2)
            res = classify_rt(fam.gadget, fam.predicted.grid)
            assert set(res.reflect_set) == set(fam.predicted.reflect_set), (l1, l2)
            assert set(res.transmit_set) == set(fam.predicted.transmit_set), (l1, l2)
    for r in range(3, 13):
        fam = C.cycle_gadget(r)
        res = classify_rt(fam.gadget, fam.predicted.grid)
        assert set(res.reflect_set) == set(fam.predicted.reflect_set), r
        assert set(res.transmit_set) == set(fam.predicted.transmit_set), r


def test_switch_examples():
    g4, g8 = C.cgw13_switch(), C.cycle3_switch()
    assert is_momentum_switch(g4, [H], [Q]).is_switch
    assert is_momentum_switch(g8, [Momentum.pi_fraction(1, 3)], [Momentum.pi_fraction(2, 3)]).is_switch
    swapped = is_momentum_switch(g4, [Q], [H])
    assert not swapped.is_switch
    assert swapped.to_second[Q] < 1e-8


def test_switch_errors():
    with pytest.raises(GadgetError):
        is_momentum_switch(EDGE, [H], [Q])
    with pytest.raises(ValueError):
        is_momentum_switch(C.cgw13_switch(), [H], [H])


def test_downgrade_switch13():
    g = C.cgw13_switch()
    grid = momentum_grid(4)
    drop3 = classify_rt(downgrade_terminal(g, 2), grid)
    assert H in drop3.transmit_set and Q in drop3.reflect_set
    drop2 = classify_rt(downgrade_terminal(g, 1), grid)
    assert Q in drop2.transmit_set and H in drop2.reflect_set


def test_downgrade_claw():
    claw = Gadget(4, ((0, 1), (0, 2), (0, 3)), (1, 2, 3))
    g = downgrade_terminal(claw, 2)
    assert g.terminals == (1, 2) and g.edges == claw.edges
    with pytest.raises(GadgetError):
        downgrade_terminal(claw, 3)
    with pytest.raises(GadgetError):
        downgrade_terminal(EDGE.with_terminals((0,)), 0)


def test_series_transmission_phase_gadgets():
    ph = C.phase_gadget()
    t1 = s_matrix(ph, Q)[1, 0]
    assert t1 == pytest.approx(-C.EXP_IPHI, abs=1e-9)
    predicted = series_transmission(t1, t1, Q)
    assert predicted == pytest.approx(-1j * C.EXP_IPHI ** 2, abs=1e-9)
    merged = series_merge(ph, 1, ph, 0)
    assert s_matrix(merged, Q)[1, 0] == pytest.approx(predicted, abs=1e-9)


def test_series_transmission_precondition():
    with pytest.raises(ValueError):
        series_transmission(0.5, 1.0, Q)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([C.two_edge_path(), C.phase_gadget(), C.path_gadget(2, 2).gadget,
                        C.cycle_gadget(4).gadget, C.cycle_gadget(3).gadget]),
       st.sampled_from([C.two_edge_path(), C.phase_gadget(), C.cycle_gadget(4).gadget]),
       st.sampled_from([Q, H, TQ, Momentum.pi_fraction(1, 3), Momentum.pi_fraction(2, 3)]))
def test_series_composition(g1, g2, k):
    T1, T2 = s_matrix(g1, k)[1, 0], s_matrix(g2, k)[1, 0]
    if abs(abs(T1) - 1) > 1e-9 or abs(abs(T2) - 1) > 1e-9:
        return
    merged = s_matrix(series_merge(g1, 1, g2, 0), k)[1, 0]
    assert abs(merged - series_transmission(T1, T2, k)) < 1e-9
