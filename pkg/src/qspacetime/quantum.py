"""Density operators, channels (Kraus / Jamiolkowski / Choi), purification
and Stinespring dilation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linops import (
    CONSTRUCT_TOL,
    TOL,
    ComplexMatrix,
    DimensionError,
    StateVector,
    as_matrix,
    is_hermitian,
    partial_trace,
    partial_transpose,
    random_unitary,
)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


class ValidationError(ValueError):
    """An object violates one of its defining invariants."""


def density_operator(rho, tol: float = TOL) -> ComplexMatrix:
    """Validate ``rho`` as a density operator and return it as a ComplexMatrix."""
    rho = as_matrix(rho)
    if not is_hermitian(rho.data, CONSTRUCT_TOL):
        raise ValidationError("density operator is not Hermitian")
    if abs(rho.trace() - 1) > CONSTRUCT_TOL:
        raise ValidationError(f"density operator trace {rho.trace():.6g} != 1")
    evals = np.linalg.eigvalsh(0.5 * (rho.data + rho.data.conj().T))
    if evals.min() < -tol:
        raise ValidationError(f"density operator has negative eigenvalue {evals.min():.3g}")
    return rho


def ket(label: str) -> np.ndarray:
    """Named single-qubit kets: 0, 1, +, -, +i, -i."""
    s = 1 / np.sqrt(2)
    table = {
        "0": [1, 0],
        "1": [0, 1],
        "+": [s, s],
        "-": [s, -s],
        "+i": [s, 1j * s],
        "-i": [s, -1j * s],
    }
    try:
        return np.array(table[label], dtype=complex)
    except KeyError:
        raise ValueError(f"unknown ket label {label!r}") from None


def projector(label: str) -> ComplexMatrix:
    v = ket(label)
    return ComplexMatrix(np.outer(v, v.conj()))


def maximally_mixed(d: int) -> ComplexMatrix:
    return ComplexMatrix(np.eye(d) / d)


class QuantumChannel:
    """CPTP map in Kraus form. Jamiolkowski and Choi operators are derived."""

    def __init__(self, kraus: Sequence, name: str | None = None, validate: bool = True):
        ops = tuple(np.array(k, dtype=complex) for k in kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in ops):
            raise DimensionError("Kraus operators must share one 2-d shape")
        for k in ops:
            k.setflags(write=False)
        self.kraus = ops
        self.out_dim, self.in_dim = shape
        self.name = name
        if validate:
            gap = np.max(np.abs(self.tp_defect()))
            if gap > TOL:
                raise ValidationError(f"channel is not trace preserving (defect {gap:.3g})")

    def tp_defect(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.kraus) - np.eye(self.in_dim)

    def __call__(self, x) -> np.ndarray:
        return apply(self, x)

    def __repr__(self):
        label = self.name or f"{len(self.kraus)} Kraus ops"
        return f"QuantumChannel({label}, {self.in_dim}->{self.out_dim})"

    @property
    def rank(self) -> int:
        return len(self.kraus)


class LinearMap:
    """General linear map between operator spaces, stored by its Jamiolkowski operator."""

    def __init__(self, jam, in_dim: int, out_dim: int):
        jam = np.asarray(jam, dtype=complex)
        if jam.shape != (in_dim * out_dim, in_dim * out_dim):
            raise DimensionError(
                f"Jamiolkowski operator of shape {jam.shape} does not fit {in_dim}->{out_dim}"
            )
        self.jam = jam
        self.in_dim, self.out_dim = in_dim, out_dim

    def __call__(self, x) -> np.ndarray:
        return apply(self, x)


@dataclass(frozen=True)
class Dynamics:
    """An initial state on A together with a channel A -> B."""

    initial: ComplexMatrix
    channel: QuantumChannel

    def __post_init__(self):
        rho = density_operator(self.initial)
        object.__setattr__(self, "initial", rho)
        if self.channel.in_dim != rho.size:
            raise DimensionError(
                f"channel input dimension {self.channel.in_dim} != state dimension {rho.size}"
            )


# -- channel action and representations ----------------------------------

def apply(channel, x) -> np.ndarray:
    """Action of a channel (or linear map) on an arbitrary operator."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (channel.in_dim, channel.in_dim):
        raise DimensionError(f"operator of shape {x.shape} does not fit input dim {channel.in_dim}")
    if isinstance(channel, LinearMap):
        # E(X) = Tr_A[(X (x) 1) J[E]]
        j = channel.jam.reshape(channel.in_dim, channel.out_dim, channel.in_dim, channel.out_dim)
        return np.einsum("ji,iajb->ab", x, j)
    return sum(k @ x @ k.conj().T for k in channel.kraus)


def jamiolkowski(channel) -> ComplexMatrix:
    """J[E] = sum_ij |i><j| (x) E(|j><i|) on A (x) B."""
    if isinstance(channel, LinearMap):
        return ComplexMatrix(channel.jam, (channel.in_dim, channel.out_dim))
    din, dout = channel.in_dim, channel.out_dim
    j = np.zeros((din, dout, din, dout), dtype=complex)
    for i, jj in itertools.product(range(din), repeat=2):
        unit = np.zeros((din, din), dtype=complex)
        unit[jj, i] = 1.0
        j[i, :, jj, :] = apply(channel, unit)
    return ComplexMatrix(j.reshape(din * dout, din * dout), (din, dout))


def choi(channel) -> ComplexMatrix:
    """Choi matrix sum_ij |i><j| (x) E(|i><j|): the partial transpose of J on A."""
    return partial_transpose(jamiolkowski(channel), [0])


def inverse_jamiolkowski(jam, in_dim: int, out_dim: int) -> LinearMap:
    """The unique linear map whose Jamiolkowski operator is ``jam``."""
    jam = as_matrix(jam)
    if jam.size != in_dim * out_dim:
        raise DimensionError(f"J of size {jam.size} does not match {in_dim}x{out_dim}")
    return LinearMap(jam.data, in_dim, out_dim)


def is_cptp(channel, tol: float = TOL) -> bool:
    c = choi(channel).data
    tp = partial_trace(ComplexMatrix(c, (channel.in_dim, channel.out_dim)), [0]).data
    if np.max(np.abs(tp - np.eye(channel.in_dim))) > tol:
        return False
    return bool(np.linalg.eigvalsh(0.5 * (c + c.conj().T)).min() >= -tol)


def kraus_from_jamiolkowski(jam, in_dim: int, out_dim: int, tol: float = TOL) -> list[np.ndarray]:
    """Kraus operators of a CP map given its Jamiolkowski operator."""
    c = partial_transpose(as_matrix(jam, (in_dim, out_dim)), [0]).data
    c = 0.5 * (c + c.conj().T)
    w, v = np.linalg.eigh(c)
    if w.min() < -tol:
        raise ValidationError(f"map is not completely positive (Choi eigenvalue {w.min():.3g})")
    ops = []
    for val, vec in zip(w, v.T):
        if val > tol:
            # vec indexed (i, b): K[b, i] = sqrt(val) vec[i, b]
            ops.append(np.sqrt(val) * vec.reshape(in_dim, out_dim).T)
    return ops


# -- named channels -------------------------------------------------------

def unitary_channel(u, name: str | None = None) -> QuantumChannel:
    return QuantumChannel([np.asarray(u, dtype=complex)], name=name)


def identity_channel(d: int = 2) -> QuantumChannel:
    return QuantumChannel([np.eye(d)], name="id" if d == 2 else f"id{d}")


def pauli_channel(label: str) -> QuantumChannel:
    """Unitary conjugation by a single Pauli matrix."""
    return unitary_channel(PAULIS[label], name=label)


def rotation(axis: str, theta: float) -> np.ndarray:
    """exp(-i theta P / 2) for P in {X, Y, Z}."""
    p = PAULIS[axis]
    return np.cos(theta / 2) * PAULI_I - 1j * np.sin(theta / 2) * p


def rotation_channel(axis: str, theta: float) -> QuantumChannel:
    return unitary_channel(rotation(axis, theta), name=f"{axis}[{theta!r}]")


def dephasing(theta: float) -> QuantumChannel:
    """Equal mixture of z-rotations by +theta and -theta.

    Off-diagonal elements get multiplied by cos(theta).
    """
    s = 1 / np.sqrt(2)
    return QuantumChannel(
        [s * rotation("Z", theta), s * rotation("Z", -theta)], name=f"dephase[{theta!r}]"
    )


def depolarizing(p: float, d: int = 2) -> QuantumChannel:
    """rho -> (1-p) rho + p Tr(rho) 1/d, written with Weyl operators."""
    if not 0 <= p <= 1:
        raise ValidationError(f"depolarizing parameter {p} out of range")
    omega = np.exp(2j * np.pi / d)
    ops = []
    for a, b in itertools.product(range(d), repeat=2):
        w = np.zeros((d, d), dtype=complex)
        for k in range(d):
            w[(k + b) % d, k] = omega ** (a * k)
        weight = 1 - p + p / (d * d) if (a, b) == (0, 0) else p / (d * d)
        ops.append(np.sqrt(weight) * w)
    return QuantumChannel(ops, name=f"depolarize[{p!r}]")


def compose(outer: QuantumChannel, inner: QuantumChannel) -> QuantumChannel:
    """outer after inner."""
    if outer.in_dim != inner.out_dim:
        raise DimensionError("cannot compose: dimension mismatch")
    return QuantumChannel([a @ b for a in outer.kraus for b in inner.kraus])


def tensor_channels(first: QuantumChannel, second: QuantumChannel) -> QuantumChannel:
    return QuantumChannel([np.kron(a, b) for a in first.kraus for b in second.kraus])


def random_channel(in_dim: int, out_dim: int, rank: int, rng: np.random.Generator) -> QuantumChannel:
    """Kraus operators cut from the first columns of a Haar unitary."""
    if out_dim * rank < in_dim:
        raise DimensionError("out_dim * rank must be at least in_dim for a CPTP map")
    iso = random_unitary(out_dim * rank, rng).data[:, :in_dim]
    ops = [iso[k * out_dim:(k + 1) * out_dim, :] for k in range(rank)]
    return QuantumChannel(ops)


def random_kraus_normalized(in_dim: int, out_dim: int, rank: int, rng: np.random.Generator) -> QuantumChannel:
    """Arbitrary Gaussian Kraus set rescaled by S^{-1/2}, S = sum K^dagger K."""
    ops = [rng.standard_normal((out_dim, in_dim)) + 1j * rng.standard_normal((out_dim, in_dim))
           for _ in range(rank)]
    s = sum(k.conj().T @ k for k in ops)
    w, v = np.linalg.eigh(s)
    s_inv_half = v @ np.diag(w ** -0.5) @ v.conj().T
    return QuantumChannel([k @ s_inv_half for k in ops])


# -- purification and dilation -------------------------------------------

def purify(rho, tol: float = TOL) -> StateVector:
    """Purification on S (x) E with dim E equal to the rank of rho."""
    rho = as_matrix(rho)
    h = 0.5 * (rho.data + rho.data.conj().T)
    if not is_hermitian(rho.data, CONSTRUCT_TOL):
        raise ValidationError("cannot purify a non-Hermitian operator")
    w, v = np.linalg.eigh(h)
    if w.min() < -tol:
        raise ValidationError(f"cannot purify: eigenvalue {w.min():.3g} is negative")
    w = np.clip(w, 0.0, None)
    keep = [k for k in range(len(w)) if w[k] > CONSTRUCT_TOL] or [int(np.argmax(w))]
    d = rho.size
    psi = np.zeros((d, len(keep)), dtype=complex)
    for col, k in enumerate(keep):
        psi[:, col] = np.sqrt(w[k]) * v[:, k]
    psi /= np.linalg.norm(psi)
    return StateVector(psi.reshape(-1), (d, len(keep)))


def _complete_columns(cols: np.ndarray, dim: int, tol: float = 1e-10) -> np.ndarray:
    """Extend orthonormal columns to a unitary by Gram-Schmidt over the
    standard basis, in index order."""
    basis = [c for c in cols.T]
    for e in np.eye(dim, dtype=complex):
        if len(basis) == dim:
            break
        r = e.copy()
        for _ in range(2):
            for b in basis:
                r = r - np.vdot(b, r) * b
        nrm = np.linalg.norm(r)
        if nrm > tol:
            basis.append(r / nrm)
    return np.array(basis).T


@dataclass(frozen=True)
class Dilation:
    """Unitary U: A (x) K -> B (x) K' with the ancilla K prepared in |0>."""

    unitary: np.ndarray
    in_dims: tuple[int, int]
    out_dims: tuple[int, int]

    @property
    def ancilla(self) -> ComplexMatrix:
        tau = np.zeros((self.in_dims[1], self.in_dims[1]), dtype=complex)
        tau[0, 0] = 1.0
        return ComplexMatrix(tau)

    def embed_input(self, x) -> np.ndarray:
        """Operator X on A mapped to X (x) 1_K on the dilated input."""
        return np.kron(np.asarray(x), np.eye(self.in_dims[1]))

    def embed_output(self, y) -> np.ndarray:
        return np.kron(np.asarray(y), np.eye(self.out_dims[1]))

    def channel_output(self, x) -> np.ndarray:
        big = self.unitary @ np.kron(np.asarray(x), self.ancilla.data) @ self.unitary.conj().T
        return partial_trace(ComplexMatrix(big, self.out_dims), [0]).data


def stinespring(channel: QuantumChannel, rng: np.random.Generator | None = None) -> Dilation:
    """Stinespring dilation completed to a unitary.

    The ancilla K has dimension equal to the Kraus rank whenever input and
    output dimensions agree; otherwise both ancillas are padded so the total
    dimensions match. Passing ``rng`` mixes the completion columns by a Haar
    unitary, which gives a different but equally valid dilation.
    """
    if not isinstance(channel, QuantumChannel) or np.max(np.abs(channel.tp_defect())) > TOL:
        raise ValidationError("Stinespring dilation needs a CPTP channel")
    din, dout, r = channel.in_dim, channel.out_dim, channel.rank
    total = int(np.lcm(din, dout))
    while total < dout * r:
        total += int(np.lcm(din, dout))
    k_in, k_out = total // din, total // dout
    # isometry columns: |a>|0>_K -> sum_k K_k|a> (x) |k>_K'
    iso = np.zeros((total, din), dtype=complex)
    for k, op in enumerate(channel.kraus):
        for a in range(din):
            for b in range(dout):
                iso[b * k_out + k, a] = op[b, a]
    full = _complete_columns(iso, total)
    rest = full[:, din:]
    if rng is not None and rest.shape[1] > 0:
        rest = rest @ random_unitary(rest.shape[1], rng).data
    u = np.zeros((total, total), dtype=complex)
    first_cols = [a * k_in for a in range(din)]
    other_cols = [c for c in range(total) if c not in first_cols]
    u[:, first_cols] = iso
    u[:, other_cols] = rest
    return Dilation(u, (din, k_in), (dout, k_out))
