"""Time-reversal symmetric phenomena: the compass-qubit protocol that
recovers the left product from FP-product (time-symmetric) statistics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .interferometer import ComputationFault, interference_from_qsot
from .linops import TOL, ComplexMatrix, DimensionError, is_unitary, partial_trace
from .qsot import Qsot, left_product, mix, star_fp
from .quantum import Dynamics, QuantumChannel, tensor_channels, identity_channel

_KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
_RAISE = np.array([[0, 0], [1, 0]], dtype=complex)    # |1><0|
_LOWER = np.array([[0, 1], [0, 0]], dtype=complex)    # |0><1|


@dataclass(frozen=True)
class CompassSetup:
    """A dynamics (or weighted mixture of dynamics) accompanied by a compass qubit
    that starts in |0><0| and undergoes the identity channel."""

    dynamics: tuple
    weights: tuple = (1.0,)

    def __init__(self, dynamics, weights: Sequence[float] | None = None):
        dyns = (dynamics,) if isinstance(dynamics, Dynamics) else tuple(dynamics)
        w = tuple(float(x) for x in (weights if weights is not None else [1.0 / len(dyns)] * len(dyns)))
        if len(w) != len(dyns) or not dyns:
            raise ValueError("need one weight per dynamics")
        if any(x < 0 for x in w) or abs(sum(w) - 1) > 1e-12:
            raise ValueError("weights must form a probability vector")
        shapes = {(d.channel.in_dim, d.channel.out_dim) for d in dyns}
        if len(shapes) != 1:
            raise DimensionError("all branches must share dimensions")
        object.__setattr__(self, "dynamics", dyns)
        object.__setattr__(self, "weights", w)

    @property
    def in_dim(self) -> int:
        return self.dynamics[0].channel.in_dim

    @property
    def out_dim(self) -> int:
        return self.dynamics[0].channel.out_dim


def _branch_qsot(dyn: Dynamics) -> Qsot:
    channel: QuantumChannel = tensor_channels(dyn.channel, identity_channel(2))
    state = np.kron(dyn.initial.data, _KET0)
    return star_fp(channel, ComplexMatrix(state))


def compass_qsot(setup: CompassSetup) -> Qsot:
    """(E (x) id_C) *_FP (rho (x) |0><0|) over regions (A C_A, B C_B).

    Mixtures are built branch by branch and then combined.
    """
    parts = [_branch_qsot(d) for d in setup.dynamics]
    if len(parts) == 1:
        return parts[0]
    q = mix(setup.weights, parts)
    return Qsot(q.matrix, "fp")


def compass_marginal(q: Qsot, in_dim: int, out_dim: int) -> Qsot:
    """Trace out both compass qubits."""
    m = partial_trace(q.matrix.with_dims((in_dim, 2, out_dim, 2)), [0, 2])
    return Qsot(m, "fp")


def compass_interventions(v, w) -> tuple[np.ndarray, np.ndarray]:
    """V~ = V (x) |1><0| + V^dagger (x) |0><1| and W~ = W (x) |0><1| + W^dagger (x) |1><0|."""
    v, w = np.asarray(v, dtype=complex), np.asarray(w, dtype=complex)
    if not (is_unitary(v) and is_unitary(w)):
        raise ValueError("compass interventions need unitary V and W")
    vt = np.kron(v, _RAISE) + np.kron(v.conj().T, _LOWER)
    wt = np.kron(w, _LOWER) + np.kron(w.conj().T, _RAISE)
    return vt, wt


def compass_interference(setup: CompassSetup, v, w, tol: float = TOL) -> float:
    """Interference of the compass QSOT under (V~, W~); equals Re Tr[(V (x) W) L]."""
    vt, wt = compass_interventions(v, w)
    value = interference_from_qsot(compass_qsot(setup), (vt, wt))
    if abs(value.imag) > tol:
        raise ComputationFault(f"compass interference has imaginary part {value.imag:.3g}")
    expected = sum(p * interference_from_qsot(_left(d), (v, w)).real
                   for p, d in zip(setup.weights, setup.dynamics))
    if abs(value.real - expected) > tol:
        raise ComputationFault(
            f"compass interference {value.real!r} differs from Re Tr[(V(x)W)L] = {expected!r}")
    return float(value.real)


def _left(d: Dynamics) -> ComplexMatrix:
    return left_product(d.channel, d.initial)


def pauli_pairs() -> tuple[list[np.ndarray], list[np.ndarray]]:
    from .quantum import PAULIS
    ops = [PAULIS[k] for k in "IXYZ"]
    return ops, ops


def compass_recover_left(setup: CompassSetup, basis=None, rank_tol: float = 1e-9) -> Qsot:
    """Recover the (mixed) left product from compass experiments.

    For every pair (V_k, W_l) two runs are made: (V, W) gives Re T and
    (iV, W) gives -Im T with T = Tr[(V (x) W) L]. The complex values are then
    inverted against the operator family {V_k (x) W_l} by least squares,
    which is exact when the family spans the operator space.
    """
    if basis is None:
        from .tomography import weyl_basis
        basis = (weyl_basis(setup.in_dim), weyl_basis(setup.out_dim))
    vs, ws = basis
    da, db = setup.in_dim, setup.out_dim
    rows, values = [], []
    for v in vs:
        for w in ws:
            re = compass_interference(setup, v, w)
            im = -compass_interference(setup, 1j * np.asarray(v), w)
            op = np.kron(v, w)
            # Tr[op L] = sum_ij op[j, i] L[i, j] = vec(op^T) . vec(L)
            rows.append(op.T.reshape(-1))
            values.append(complex(re, im))
    a = np.array(rows)
    rank = np.linalg.matrix_rank(a.conj().T @ a, tol=rank_tol)
    if rank < (da * db) ** 2:
        raise ValueError(f"intervention family spans only {rank} of {(da * db) ** 2} dimensions")
    sol, *_ = np.linalg.lstsq(a, np.array(values), rcond=None)
    return Qsot(ComplexMatrix(sol.reshape(da * db, da * db), (da, db)), "reconstructed")
