import numpy as np
import pytest

from qspacetime import quantum as qm
from qspacetime.fixtures import (
    EXAMPLE2_FP,
    EXAMPLE2_L1,
    EXAMPLE2_L2,
    TABLE,
    example3_fp,
    example3_left,
)
from qspacetime.linops import (
    frobenius_distance,
    is_unitary,
    make_rng,
    random_density,
    random_unitary,
    swap_operator,
)
from qspacetime.qsot import mix, star_fp, star_left
from qspacetime.timesym import (
    CompassSetup,
    compass_interference,
    compass_interventions,
    compass_marginal,
    compass_qsot,
    compass_recover_left,
    pauli_pairs,
)

import oracles

P = qm.projector
X, Y, Z, I2 = qm.PAULI_X, qm.PAULI_Y, qm.PAULI_Z, qm.PAULI_I


def ex2(first, second):
    return CompassSetup([qm.Dynamics(P("0"), qm.pauli_channel(first)),
                         qm.Dynamics(P("1"), qm.pauli_channel(second))], [0.5, 0.5])


def test_compass_qsot_marginal_is_fp():
    setup = CompassSetup(qm.Dynamics(P("0"), qm.identity_channel(2)))
    q = compass_qsot(setup)
    assert q.dims == (4, 4)
    marg = compass_marginal(q, 2, 2)
    assert np.abs(marg.data - star_fp(qm.identity_channel(2), P("0")).data).max() < 1e-14


def test_compass_qsot_mixture_branchwise():
    q = compass_qsot(ex2("X", "Y"))
    assert np.abs(compass_marginal(q, 2, 2).data - EXAMPLE2_FP).max() < 1e-14


def test_compass_qsot_trace_and_hermitian():
    rng = make_rng(17)
    for _ in range(100):
        din, dout = int(rng.choice([2, 3])), int(rng.choice([2, 3]))
        setup = CompassSetup(qm.Dynamics(random_density(din, rng), qm.random_channel(din, dout, 2, rng)))
        q = compass_qsot(setup)
        assert abs(q.matrix.trace() - 1) < 1e-12
        assert np.abs(q.data - q.data.conj().T).max() < 1e-13


def test_compass_interventions():
    vt, _ = compass_interventions(I2, I2)
    assert np.abs(vt - np.kron(I2, X)).max() < 1e-15
    vt, _ = compass_interventions(Z, I2)
    assert np.abs(vt - np.kron(Z, X)).max() < 1e-15
    rng = make_rng(0)
    for _ in range(100):
        v, w = random_unitary(3, rng).data, random_unitary(2, rng).data
        vt, wt = compass_interventions(v, w)
        assert is_unitary(vt, 1e-12) and is_unitary(wt, 1e-12)
    with pytest.raises(ValueError):
        compass_interventions(np.diag([1.0, 2.0]), I2)


def test_compass_interference_identity():
    setup = CompassSetup(qm.Dynamics(P("0"), qm.identity_channel(2)))
    assert abs(compass_interference(setup, I2, I2) - 1) < 1e-12


def test_compass_interference_all_pauli_pairs():
    rng = make_rng(44)
    for _ in range(10):
        rho, ch = random_density(2, rng), qm.random_channel(2, 2, 2, rng)
        setup = CompassSetup(qm.Dynamics(rho, ch))
        left = oracles.left_loop(ch.kraus, rho.data)
        for v in pauli_pairs()[0]:
            for w in pauli_pairs()[1]:
                got = compass_interference(setup, v, w)
                assert abs(got - np.trace(np.kron(v, w) @ left).real) < 1e-10


def test_compass_example2_signs():
    # with (X, Y) both real parts vanish; the sign sits in Im, read out by the (iX, Y) run
    a, b = ex2("X", "Y"), ex2("Y", "X")
    assert abs(compass_interference(a, X, Y)) < 1e-12 and abs(compass_interference(b, X, Y)) < 1e-12
    ra, rb = compass_interference(a, 1j * X, Y), compass_interference(b, 1j * X, Y)
    assert abs(ra + 1) < 1e-12 and abs(rb - 1) < 1e-12
    for m, sign in ((EXAMPLE2_L1, 1), (EXAMPLE2_L2, -1)):
        assert abs(np.trace(np.kron(X, Y) @ m) - sign * 1j) < 1e-15


def test_recover_left_x_table():
    setup = CompassSetup(qm.Dynamics(P("0"), qm.pauli_channel("X")))
    rec = compass_recover_left(setup, basis=pauli_pairs())
    assert np.abs(rec.data - TABLE[("X", "00")]).max() < 1e-10


def test_recover_example2_distance():
    l1 = compass_recover_left(ex2("X", "Y"))
    l2 = compass_recover_left(ex2("Y", "X"))
    assert np.abs(l1.data - EXAMPLE2_L1).max() < 1e-9
    assert np.abs(l2.data - EXAMPLE2_L2).max() < 1e-9
    assert abs(frobenius_distance(l1.matrix, l2.matrix) - np.sqrt(2)) < 1e-9


def test_recover_identity_on_mixed():
    setup = CompassSetup(qm.Dynamics(qm.maximally_mixed(2), qm.identity_channel(2)))
    rec = compass_recover_left(setup)
    assert np.abs(rec.data - swap_operator(2).data / 2).max() < 1e-10


def test_recover_roundtrip_random():
    rng = make_rng(5)
    for din, dout in [(2, 2), (2, 3), (3, 2)]:
        rho, ch = random_density(din, rng), qm.random_channel(din, dout, 2, rng)
        rec = compass_recover_left(CompassSetup(qm.Dynamics(rho, ch)))
        assert np.abs(rec.data - star_left(ch, rho).data).max() < 1e-9


def test_recover_rejects_non_spanning_family():
    setup = CompassSetup(qm.Dynamics(P("0"), qm.identity_channel(2)))
    with pytest.raises(ValueError):
        compass_recover_left(setup, basis=([I2, Z], [I2, Z]))


def test_setup_validation():
    with pytest.raises(ValueError):
        CompassSetup([qm.Dynamics(P("0"), qm.identity_channel(2))] * 2, [0.7, 0.7])


def test_example3_family():
    for th in (np.pi / 6, np.pi / 3, np.pi / 2):
        dz = lambda t: qm.rotation_channel("Z", t)
        l1 = mix([0.5, 0.5], [star_left(dz(th), P("0")), star_left(dz(-th), P("1"))])
        l2 = mix([0.5, 0.5], [star_left(dz(-th), P("0")), star_left(dz(th), P("1"))])
        f1 = mix([0.5, 0.5], [star_fp(dz(th), P("0")), star_fp(dz(-th), P("1"))])
        f2 = mix([0.5, 0.5], [star_fp(dz(-th), P("0")), star_fp(dz(th), P("1"))])
        assert np.abs(l1.data - example3_left(th, 1)).max() < 1e-12
        assert np.abs(l2.data - example3_left(th, 2)).max() < 1e-12
        assert frobenius_distance(l1.matrix, l2.matrix) > 0.1
        for f in (f1, f2):
            assert np.abs(f.data - example3_fp(th)).max() < 1e-12
        # off-diagonal FP entries are cos(theta)/2
        assert abs(f1.data[1, 2] - np.cos(th) / 2) < 1e-12 and abs(f1.data[2, 1] - np.cos(th) / 2) < 1e-12
        assert np.abs(star_fp(qm.dephasing(th), qm.maximally_mixed(2)).data - f1.data).max() < 1e-12


def test_example3_left_entries_carry_one_phase():
    # both off-diagonal corners carry e^{i theta} in rho1 (the Hermitian-looking print is a typo)
    th = np.pi / 3
    l1 = mix([0.5, 0.5], [star_left(qm.rotation_channel("Z", th), P("0")),
                          star_left(qm.rotation_channel("Z", -th), P("1"))]).data
    assert abs(l1[1, 2] - l1[2, 1]) < 1e-15
    assert abs(l1[1, 2] - 0.5 * np.exp(1j * th)) < 1e-15
    ref = oracles.left_loop([qm.rotation("Z", th)], np.diag([1.0, 0])) * 0.5 + \
        oracles.left_loop([qm.rotation("Z", -th)], np.diag([0, 1.0])) * 0.5
    assert np.abs(ref - l1).max() < 1e-15
