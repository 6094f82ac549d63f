import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qspacetime import quantum as qm
from qspacetime.linops import (
    ComplexMatrix,
    DimensionError,
    is_unitary,
    make_rng,
    partial_trace,
    partial_transpose,
    random_density,
    random_matrix,
    swap_operator,
)

import oracles

X, Y, Z, I2 = qm.PAULI_X, qm.PAULI_Y, qm.PAULI_Z, qm.PAULI_I


def test_density_operator_validation():
    with pytest.raises(qm.ValidationError):
        qm.density_operator(np.diag([0.5, 0.6]))
    with pytest.raises(qm.ValidationError):
        qm.density_operator(np.diag([1.5, -0.5]))
    with pytest.raises(qm.ValidationError):
        qm.density_operator(np.array([[0.5, 0.1], [0.2, 0.5]]))
    rho = qm.density_operator(np.eye(2) / 2)
    assert rho.dims == (2,)


def test_kets():
    assert np.abs(qm.projector("+").data - 0.5 * (I2 + X)).max() < 1e-15
    assert np.abs(qm.projector("-i").data - 0.5 * (I2 - Y)).max() < 1e-15
    with pytest.raises(ValueError):
        qm.ket("2")


def test_non_tp_kraus_rejected():
    with pytest.raises(qm.ValidationError):
        qm.QuantumChannel([np.diag([1.0, 0.0])])
    ch = qm.QuantumChannel([np.diag([1.0, 0.0])], validate=False)
    assert not qm.is_cptp(ch)


def test_identity_jamiolkowski_is_swap():
    j = qm.jamiolkowski(qm.identity_channel(2))
    assert np.abs(j.data - swap_operator(2).data).max() < 1e-15


def test_identity_choi_is_unnormalised_bell():
    c = qm.choi(qm.identity_channel(2)).data
    phi = np.array([1, 0, 0, 1.0])
    assert np.abs(c - np.outer(phi, phi)).max() < 1e-15


@pytest.mark.parametrize("din,dout,rank", [(2, 2, 1), (2, 2, 3), (2, 3, 2), (3, 2, 4), (3, 3, 2)])
def test_jamiolkowski_matches_loops(din, dout, rank):
    ch = qm.random_channel(din, dout, rank, make_rng(din * 10 + dout + rank))
    assert np.abs(qm.jamiolkowski(ch).data - oracles.jam_loop(ch.kraus)).max() < 1e-12


def test_inverse_jamiolkowski_roundtrip():
    rng = make_rng(4)
    for din, dout in [(2, 2), (2, 3), (3, 2)]:
        ch = qm.random_channel(din, dout, 2, rng)
        lm = qm.inverse_jamiolkowski(qm.jamiolkowski(ch), din, dout)
        x = random_matrix(din, rng).data
        assert np.abs(lm(x) - ch(x)).max() < 1e-12
        # J of the recovered map is the same operator
        assert np.abs(qm.jamiolkowski(lm).data - qm.jamiolkowski(ch).data).max() < 1e-15


def test_jamiolkowski_of_general_linear_map():
    rng = make_rng(9)
    jam = random_matrix(6, rng).data
    lm = qm.inverse_jamiolkowski(jam, 2, 3)
    again = np.zeros((2, 3, 2, 3), dtype=complex)
    for i, j in np.ndindex(2, 2):
        unit = np.zeros((2, 2))
        unit[j, i] = 1
        again[i, :, j, :] = lm(unit)
    assert np.abs(again.reshape(6, 6) - jam).max() < 1e-14


def test_choi_is_partial_transpose():
    ch = qm.random_channel(2, 3, 2, make_rng(2))
    pt = partial_transpose(qm.jamiolkowski(ch), [0]).data
    assert np.abs(qm.choi(ch).data - pt).max() < 1e-15


def test_kraus_from_jamiolkowski_reproduces_channel():
    rng = make_rng(12)
    ch = qm.random_channel(3, 2, 3, rng)
    ops = qm.kraus_from_jamiolkowski(qm.jamiolkowski(ch), 3, 2)
    rebuilt = qm.QuantumChannel(ops)
    x = random_matrix(3, rng).data
    assert np.abs(rebuilt(x) - ch(x)).max() < 1e-12
    assert len(ops) <= 3


def test_kraus_from_non_cp_fails():
    # the transpose map has J = |phi><phi| and Choi = SWAP, which is not positive
    phi = np.array([1, 0, 0, 1.0])
    with pytest.raises(qm.ValidationError):
        qm.kraus_from_jamiolkowski(np.outer(phi, phi), 2, 2)


def test_named_channels():
    rho = qm.projector("0").data
    assert np.abs(qm.pauli_channel("X")(rho) - qm.projector("1").data).max() < 1e-15
    r = qm.rotation("Y", np.pi / 2)
    assert np.abs(r @ qm.ket("0") - qm.ket("+")).max() < 1e-15
    # dephasing shrinks coherences by cos(theta)
    th = 0.7
    out = qm.dephasing(th)(qm.projector("+").data)
    assert np.abs(out - 0.5 * np.array([[1, np.cos(th)], [np.cos(th), 1]])).max() < 1e-15


def test_depolarizing():
    rng = make_rng(1)
    for d in (2, 3):
        rho = random_density(d, rng).data
        out = qm.depolarizing(0.3, d)(rho)
        assert np.abs(out - (0.7 * rho + 0.3 * np.eye(d) / d)).max() < 1e-12
    with pytest.raises(ValueError):
        qm.depolarizing(1.5)


def test_compose_and_tensor():
    rng = make_rng(3)
    a, b = qm.random_channel(2, 3, 2, rng), qm.random_channel(3, 2, 2, rng)
    x = random_matrix(2, rng).data
    assert np.abs(qm.compose(b, a)(x) - b(a(x))).max() < 1e-12
    t = qm.tensor_channels(a, b)
    y = random_matrix(3, rng).data
    assert np.abs(t(np.kron(x, y)) - np.kron(a(x), b(y))).max() < 1e-12
    with pytest.raises(DimensionError):
        qm.compose(a, a)


def test_dynamics_dimension_check():
    with pytest.raises(DimensionError):
        qm.Dynamics(qm.maximally_mixed(3), qm.identity_channel(2))


def test_purify():
    rho = random_density(3, make_rng(6), rank=2)
    psi = qm.purify(rho)
    assert psi.dims == (3, 2)
    reduced = partial_trace(psi.projector(), [0]).data
    assert np.abs(reduced - rho.data).max() < 1e-12


@pytest.mark.parametrize("din,dout,rank", [(2, 2, 1), (2, 2, 4), (2, 3, 3), (3, 2, 2), (3, 3, 5)])
def test_stinespring_reproduces_channel(din, dout, rank):
    rng = make_rng(100 + rank)
    ch = qm.random_channel(din, dout, rank, rng)
    for dil in (qm.stinespring(ch), qm.stinespring(ch, rng=rng)):
        assert is_unitary(dil.unitary, 1e-12)
        for _ in range(3):
            x = random_density(din, rng).data
            assert np.abs(dil.channel_output(x) - ch(x)).max() < 1e-12


def test_random_channel_rank_limits():
    with pytest.raises(ValueError):
        qm.random_channel(4, 2, 1, make_rng(0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 3), st.integers(2, 3), st.integers(1, 4))
def test_random_channels_are_cptp(seed, din, dout, rank):
    if dout * rank < din:
        return
    ch = qm.random_channel(din, dout, rank, make_rng(seed))
    assert qm.is_cptp(ch)
    # tracing the output of J gives the identity on A
    j = qm.jamiolkowski(ch)
    assert np.abs(partial_trace(j, [0]).data - np.eye(din)).max() < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_channel_linearity(seed):
    rng = make_rng(seed)
    ch = qm.random_channel(2, 3, 2, rng)
    a, b = random_matrix(2, rng).data, random_matrix(2, rng).data
    c = complex(*rng.standard_normal(2))
    assert np.abs(ch(a + c * b) - ch(a) - c * ch(b)).max() < 1e-12


def test_maximally_mixed_state():
    m = qm.maximally_mixed(3)
    assert isinstance(m, ComplexMatrix)
    assert abs(m.trace() - 1) < 1e-15
