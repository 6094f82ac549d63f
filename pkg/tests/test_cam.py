import numpy as np
import pytest
import scipy.linalg

from qspacetime import quantum as qm
from qspacetime.cam import commutator_check, controlled_blocks, controlled_unitary_check, embed_couplings, generator
from qspacetime.linops import make_rng, random_unitary, swap_operator

X, Y, Z, I2 = qm.PAULI_X, qm.PAULI_Y, qm.PAULI_Z, qm.PAULI_I
P0, P1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])


def random_hermitian(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def test_embedding_by_brute_force():
    rng = make_rng(0)
    hx, hy = random_hermitian(4, rng), random_hermitian(6, rng)  # X=2,R=2 ; Y=3,R=2
    a, b = embed_couplings(hx, hy, 2, 3, 2)
    ta = hx.reshape(2, 2, 2, 2)
    tb = hy.reshape(3, 2, 3, 2)
    ref_a = np.zeros((12, 12), dtype=complex)
    ref_b = np.zeros((12, 12), dtype=complex)
    for x, y, r, x2, y2, r2 in np.ndindex(2, 3, 2, 2, 3, 2):
        i, j = (x * 3 + y) * 2 + r, (x2 * 3 + y2) * 2 + r2
        ref_a[i, j] = ta[x, r, x2, r2] * (y == y2)
        ref_b[i, j] = tb[y, r, y2, r2] * (x == x2)
    assert np.abs(a - ref_a).max() < 1e-15 and np.abs(b - ref_b).max() < 1e-15


def test_shared_probe_fails():
    ok, norm = commutator_check(np.kron(X, X), np.kron(Z, Z), 2, 2, 2)
    assert not ok
    assert abs(norm - 4 * np.sqrt(2)) < 1e-12


def test_disjoint_supports_commute():
    rng = make_rng(1)
    a, b = random_hermitian(2, rng), random_hermitian(3, rng)
    ok, norm = commutator_check(np.kron(a, I2), np.kron(b, I2), 2, 3, 2)
    assert ok and norm < 1e-12


def test_controlled_hamiltonians_commute():
    rng = make_rng(2)
    hx = sum(np.kron(random_hermitian(2, rng), p) for p in (P0, P1))
    hy = sum(np.kron(random_hermitian(2, rng), p) for p in (P0, P1))
    assert commutator_check(hx, hy, 2, 2, 2)[0]


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        commutator_check(np.triu(np.ones((4, 4))), np.eye(4), 2, 2, 2)


def test_controlled_unitary_by_construction():
    rng = make_rng(3)
    v, v2 = random_unitary(2, rng).data, random_unitary(2, rng).data
    u = np.kron(v, P0) + np.kron(v2, P1)
    assert controlled_unitary_check(u, [P0, P1], 2)
    blocks, off, resid = controlled_blocks(u, [P0, P1], 2)
    assert np.abs(blocks[0] - v).max() < 1e-12 and off < 1e-12 and resid < 1e-12


def test_swap_is_not_controlled():
    assert not controlled_unitary_check(swap_operator(2).data, [P0, P1], 2)


def test_global_phase_single_sector():
    rng = make_rng(4)
    v = random_unitary(2, rng).data
    assert controlled_unitary_check(np.exp(0.3j) * np.kron(v, I2), [I2], 2)


def test_higher_rank_sectors():
    rng = make_rng(5)
    pa, pb = np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])
    u = np.kron(random_unitary(2, rng).data, pa) + np.kron(random_unitary(2, rng).data, pb)
    assert controlled_unitary_check(u, [pa, pb], 2)
    # permuting R levels across sectors leaves off-block terms
    perm = np.eye(3)[[0, 2, 1]]
    assert not controlled_unitary_check(np.kron(I2, perm), [pa, pb], 2)
    # block diagonal but entangling inside the rank-2 sector: SWAP of X with that qubit
    u = np.zeros((6, 6), dtype=complex)
    for x, r in np.ndindex(2, 2):
        u[r * 3 + x, x * 3 + r] = 1
    u[2, 2] = u[5, 5] = 1
    assert not controlled_unitary_check(u, [pa, pb], 2)


def test_sector_validation():
    with pytest.raises(ValueError):
        controlled_unitary_check(np.eye(4), [P0], 2)
    with pytest.raises(ValueError):
        controlled_unitary_check(np.eye(4), [P0, P0 + 0.1], 2)


def test_generator_principal_branch():
    rng = make_rng(6)
    h = random_hermitian(3, rng) * 0.5
    u = scipy.linalg.expm(-1j * h)
    assert np.abs(generator(u) - h).max() < 1e-10
    assert generator(np.diag([1.0, -1.0])) is None


def test_theorem_directions_agree():
    # controlled unitaries over shared sectors have commuting generators
    rng = make_rng(7)
    checked = skipped = 0
    for _ in range(50):
        ux = sum(np.kron(random_unitary(2, rng).data, p) for p in (P0, P1))
        uy = sum(np.kron(random_unitary(3, rng).data, p) for p in (P0, P1))
        assert controlled_unitary_check(ux, [P0, P1], 2) and controlled_unitary_check(uy, [P0, P1], 3)
        hx, hy = generator(ux), generator(uy)
        if hx is None or hy is None:
            skipped += 1
            continue
        ok, norm = commutator_check(hx, hy, 2, 3, 2, tol=1e-9)
        assert ok, norm
        checked += 1
    assert checked > 40
