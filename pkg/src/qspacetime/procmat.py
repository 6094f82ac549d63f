"""Process matrices on A A' B B' (unprimed: inputs to the labs, primed: outputs).

Only causally ordered processes (state on A, Alice's lab A -> A', channel
A' -> B, Bob's lab B -> B') get a constructor. The construction is a linear
inversion against matrix units and is checked against direct composition.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .linops import TOL, ComplexMatrix, DimensionError, as_matrix, is_hermitian, partial_trace, permute
from .quantum import Dynamics, LinearMap, QuantumChannel, ValidationError, apply, jamiolkowski

SPACES = ("A", "A'", "B", "B'")


@dataclass(frozen=True)
class ProcessMatrix:
    matrix: ComplexMatrix

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if len(m.dims) != 4:
            raise DimensionError("process matrix needs dims (A, A', B, B')")
        if not is_hermitian(m.data, TOL):
            raise ValidationError("process matrix is not Hermitian")
        object.__setattr__(self, "matrix", m)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.matrix.dims


def _jam_ordered(m, d_a: int, d_b: int, d_a2: int, d_b2: int) -> np.ndarray:
    """J[M] for M: AB -> A'B', laid out in (A, A', B, B') order."""
    if m.in_dim != d_a * d_b or m.out_dim != d_a2 * d_b2:
        raise DimensionError(f"map {m.in_dim}->{m.out_dim} does not fit AB -> A'B'")
    j = jamiolkowski(m).with_dims((d_a, d_b, d_a2, d_b2))
    return permute(j, [0, 2, 1, 3]).data


def born(w: ProcessMatrix, m) -> complex:
    """Generalised Born rule Tr[J[M] W] for a linear map M: AB -> A'B'."""
    d_a, d_a2, d_b, d_b2 = w.dims
    return complex(np.einsum("ij,ji->", _jam_ordered(m, d_a, d_b, d_a2, d_b2), w.matrix.data))


def product_map(m_a, m_b) -> LinearMap:
    """M_A (x) M_B as a single map AB -> A'B'."""
    ja = jamiolkowski(m_a).data.reshape(m_a.in_dim, m_a.out_dim, m_a.in_dim, m_a.out_dim)
    jb = jamiolkowski(m_b).data.reshape(m_b.in_dim, m_b.out_dim, m_b.in_dim, m_b.out_dim)
    # (A, A', B, B') x2  ->  (A, B, A', B') x2
    j = np.einsum("apcq,brds->abprcdqs", ja, jb)
    din, dout = m_a.in_dim * m_b.in_dim, m_a.out_dim * m_b.out_dim
    return LinearMap(j.reshape(din * dout, din * dout), din, dout)


def composition_probability(dyn: Dynamics, m_a, m_b) -> complex:
    """Tr[M_B(E(M_A(rho)))]: the direct oracle for ordered processes."""
    return complex(np.trace(apply(m_b, apply(dyn.channel, apply(m_a, dyn.initial.data)))))


def _unit(d: int, m: int, n: int) -> np.ndarray:
    g = np.zeros((d, d), dtype=complex)
    g[m, n] = 1.0
    return g


def ordered_process_matrix(dyn: Dynamics) -> ProcessMatrix:
    """Process matrix of the ordered process rho -> Alice -> E -> Bob.

    With G_k = |m><n| on A A' and G_l on B B', the dual of G_k (x) G_l under
    the pairing Tr[X W] is |n><m| (x) ..., so W[(n_k, n_l), (m_k, m_l)] equals
    the composition probability for the maps whose Jamiolkowski operators
    are G_k and G_l.
    """
    d_a = dyn.initial.size
    d_a2 = dyn.channel.in_dim
    d_b = dyn.channel.out_dim
    d_b2 = d_b
    na, nb = d_a * d_a2, d_b * d_b2
    # Y_k = E(M_k(rho)) for every Alice matrix unit
    ys = {}
    for m, n in itertools.product(range(na), repeat=2):
        m_k = LinearMap(_unit(na, m, n), d_a, d_a2)
        ys[m, n] = apply(dyn.channel, apply(m_k, dyn.initial.data))
    # Tr[M_l(Y)] for M_l with J = |p><q|: J[i, a, j, b] nonzero only at
    # (p, q); M_l(Y) = sum Y[j, i] J[i, :, j, :] so the trace picks Y[j, i] when a == b
    w = np.zeros((na * nb, na * nb), dtype=complex)
    for (m, n), y in ys.items():
        for p, q in itertools.product(range(nb), repeat=2):
            i, a = divmod(p, d_b2)
            j, b = divmod(q, d_b2)
            val = y[j, i] if a == b else 0.0
            w[n * nb + q, m * nb + p] = val
    return ProcessMatrix(ComplexMatrix(w, (d_a, d_a2, d_b, d_b2)))


def first_order(w: ProcessMatrix) -> ComplexMatrix:
    """W1 = Tr_AB[SWAP_AB W], an operator on A'B'."""
    d_a, d_a2, d_b, d_b2 = w.dims
    if d_a != d_a2 or d_b != d_b2:
        raise DimensionError("first-order approximation needs A' ~ A and B' ~ B")
    t = w.matrix.data.reshape(w.dims + w.dims)
    # SWAP exchanges A<->A' and B<->B' on the row side:
    # (SWAP W)[a, a', b, b'; c, c', e, e'] = W[a', a, b', b; c, c', e, e']
    # then trace over A (a = c) and B (b = e)
    w1 = np.einsum("paqbarbs->pqrs", t)
    return ComplexMatrix(w1.reshape(d_a * d_b, d_a * d_b), (d_a, d_b))


def weak_measurement_check(w: ProcessMatrix, k, p: float, tol: float = TOL):
    """Compare the exact Born probability of M(X) = p(1-K/2) X (1-K^dagger/2)
    with its first-order value Re Tr[p(1-K) W1].

    Returns (exact, approx, |exact - approx|).
    """
    d_a, _, d_b, _ = w.dims
    k = np.asarray(k, dtype=complex)
    eye = np.eye(d_a * d_b)
    if k.shape != eye.shape:
        raise DimensionError("K must act on AB")
    op = eye - k / 2
    povm = p * op.conj().T @ op
    if np.linalg.eigvalsh(0.5 * (povm + povm.conj().T)).max() > 1 + tol:
        raise ValidationError("POVM element exceeds the identity")
    m = QuantumChannel([np.sqrt(p) * op], validate=False)
    exact = born(w, m)
    approx = float(np.trace(p * (eye - k) @ first_order(w).data).real)
    return exact.real, approx, abs(exact - approx)


def interferometric_maps(v, wop) -> tuple[QuantumChannel, QuantumChannel]:
    """CP maps X -> (1 +- V(x)W) X (1 +- V(x)W)^dagger / 4 of a max-visibility interferometer."""
    op = np.kron(np.asarray(v, dtype=complex), np.asarray(wop, dtype=complex))
    eye = np.eye(op.shape[0])
    return (QuantumChannel([(eye + op) / 2], validate=False),
            QuantumChannel([(eye - op) / 2], validate=False))
