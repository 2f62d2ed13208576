import cmath
import math

import numpy as np
import pytest

from qwscatter import approx as A
from qwscatter.constructions import approx_switch
from qwscatter.graphcore import Momentum
from qwscatter.scatter import downgrade_terminal, s_matrix


def test_phase_constant():
    assert abs(A.PHASE.exp_iphi) == pytest.approx(1.0, abs=1e-15)
    assert cmath.exp(1j * A.PHASE.phi) == pytest.approx(A.PHASE.exp_iphi, abs=1e-15)


def test_phase_orbit_never_closes():
    j = np.arange(1, 10 ** 6 + 1)
    assert np.min(np.abs(np.exp(2j * j * A.PHASE.phi) - 1)) > 1e-12


def test_u_m_sign_flip():
    for m in range(1, 100, 2):
        Uq, Ut = A.u_m(m, A.K_QUARTER), A.u_m(m, A.K_THREEQUARTER)
        assert Ut[0, 0] == pytest.approx(-Uq[0, 0])
        assert Ut[1, 1] == Uq[1, 1] == 1
        assert Ut[0, 1] == Ut[1, 0] == Uq[0, 1] == Uq[1, 0] == 0


def test_u_m_momentum_restriction():
    with pytest.raises(ValueError):
        A.u_m(3, Momentum.pi_fraction(1, 2))


@pytest.mark.parametrize("m", [0, 2, -1])
def test_even_m_rejected(m):
    with pytest.raises(ValueError):
        A.v_matrices(m)


def test_v_unitary():
    for m in range(1, 1000, 2):
        ap = A.v_matrices(m)
        for V in (ap.V_quarter, ap.V_threequarter):
            assert np.max(np.abs(V.conj().T @ V - np.eye(2))) < 1e-12


@pytest.mark.parametrize("m", [1, 3, 5, 37, 101])
def test_closed_form_matches_product(m):
    Vq, Vt = A.v_closed_form(m)
    ap = A.v_matrices(m)
    np.testing.assert_allclose(Vq, ap.V_quarter, atol=1e-14)
    np.testing.assert_allclose(Vt, ap.V_threequarter, atol=1e-14)


def test_error_values():
    assert A.v_matrices(37).error == pytest.approx(0.0076, abs=5e-4)
    assert A.v_matrices(379).error == pytest.approx(0.0071, abs=5e-4)
    # m = 1: i^0 e^{i phi}, so the error is |e^{i phi} - 1| = 2 sin(phi/2)
    e1 = A.v_matrices(1).error
    assert e1 == pytest.approx(abs(A.PHASE.exp_iphi - 1), abs=1e-12)
    assert e1 == pytest.approx(2 * math.sin(A.PHASE.phi / 2), abs=1e-12)


def test_error_matches_scalar_form():
    for m in range(1, 400, 2):
        ap = A.v_matrices(m)
        assert ap.error == pytest.approx(abs(1 - A.rail_phase(m)), abs=1e-12)
        # V - target = -U (U_m - target') U has rank one, so the two norms agree
        assert ap.error == pytest.approx(ap.error_frobenius, abs=1e-12)


def test_batch_agrees_with_single():
    rows = list(A.error_table(201))
    for m, e, f, _ in rows[::7]:
        ap = A.v_matrices(m)
        assert e == pytest.approx(ap.error, abs=1e-13)
        assert f == pytest.approx(ap.error_frobenius, abs=1e-13)


def test_search_records():
    rec = A.search_best_m(400)
    ms = [m for m, _ in rec]
    assert ms[-2:] == [37, 379]
    assert not [m for m in ms if 37 < m < 379]
    errs = [e for _, e in rec]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert A.search_best_m(1) == [(1, A.v_matrices(1).error)]


def test_search_large():
    rec = A.search_best_m(10 ** 5)
    assert rec[-1][1] < 0.0071
    # frozen regression value
    assert rec[-1][0] == 58323
    assert rec[-1][1] == pytest.approx(1.86e-5, rel=0.01)


@pytest.mark.parametrize("m", [1, 3, 5])
def test_validate_against_graph(m):
    v = A.validate_against_graph(m)
    assert v.passed and v.deviation < 1e-8


def test_validate_37():
    v = A.validate_against_graph(37)
    assert v.deviation < 1e-8
    assert v.graph_error_quarter == pytest.approx(0.0076, abs=5e-4)
    assert v.graph_error_threequarter == pytest.approx(0.0076, abs=5e-4)


@pytest.mark.parametrize("m", [1, 3, 37])
def test_downgraded_switch(m):
    g = downgrade_terminal(approx_switch(m), 1)
    bound = 1 - 2 * A.v_matrices(m).error
    assert abs(s_matrix(g, A.K_QUARTER)[1, 0]) >= bound
    assert abs(s_matrix(g, A.K_THREEQUARTER)[2, 0]) >= bound
