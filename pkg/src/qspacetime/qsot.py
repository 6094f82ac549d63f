"""Quantum states over time: the left, right and Fullwood-Parzygnat products,
mixtures, Markov chains and the synchronization gap."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linops import (
    TOL,
    ComplexMatrix,
    DimensionError,
    as_matrix,
    frobenius_distance,
    hermitian_part,
    is_hermitian,
    permute,
    tensor,
)
from .quantum import (
    Dynamics,
    QuantumChannel,
    ValidationError,
    density_operator,
    jamiolkowski,
)

PROVENANCE = ("left", "right", "fp", "mixture", "reconstructed", "other")
KINDS = ("left", "right", "fp")


@dataclass(frozen=True)
class Qsot:
    """Unit-trace operator over a list of regions (one tensor factor per region).

    Left and right products are in general neither Hermitian nor positive.
    """

    matrix: ComplexMatrix
    provenance: str = "other"

    def __post_init__(self):
        m = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance tag {self.provenance!r}")
        if abs(m.trace() - 1) > TOL:
            raise ValidationError(f"QSOT trace is {m.trace():.6g}, expected 1")
        if self.provenance == "fp" and not is_hermitian(m.data, TOL):
            raise ValidationError("FP-product QSOT is not Hermitian")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.matrix.dims

    @property
    def regions(self) -> int:
        return len(self.matrix.dims)

    @property
    def data(self) -> np.ndarray:
        return self.matrix.data


def _operand(x) -> ComplexMatrix:
    if isinstance(x, Qsot):
        return x.matrix
    return as_matrix(x)


def _embedded_jam(channel: QuantumChannel, dims: tuple[int, ...]) -> np.ndarray:
    if channel.in_dim != dims[-1]:
        raise DimensionError(
            f"channel input dimension {channel.in_dim} != last region dimension {dims[-1]}"
        )
    front = int(np.prod(dims[:-1])) if len(dims) > 1 else 1
    return np.kron(np.eye(front), jamiolkowski(channel).data)


def left_product(channel: QuantumChannel, x) -> ComplexMatrix:
    """(X (x) 1_B)(1 (x) J[E]) with the channel acting on the last factor of X.

    Linear in X; no normalisation is required, so operators such as |0><1|
    are accepted.
    """
    x = _operand(x)
    j = _embedded_jam(channel, x.dims)
    out = np.kron(x.data, np.eye(channel.out_dim)) @ j
    return ComplexMatrix(out, x.dims + (channel.out_dim,))


def right_product(channel: QuantumChannel, x) -> ComplexMatrix:
    """(1 (x) J[E])(X (x) 1_B), the mirror image of :func:`left_product`."""
    x = _operand(x)
    j = _embedded_jam(channel, x.dims)
    out = j @ np.kron(x.data, np.eye(channel.out_dim))
    return ComplexMatrix(out, x.dims + (channel.out_dim,))


def fp_product(channel: QuantumChannel, x) -> ComplexMatrix:
    return 0.5 * (left_product(channel, x) + right_product(channel, x))


_RAW = {"left": left_product, "right": right_product, "fp": fp_product}


def _state_arg(x):
    if isinstance(x, Qsot):
        return x
    return density_operator(x)


def star(kind: str, channel: QuantumChannel, state) -> Qsot:
    """QSOT product of the given kind; ``state`` is a density operator or a Qsot."""
    if kind not in KINDS:
        raise ValueError(f"unknown product kind {kind!r}; expected one of {KINDS}")
    return Qsot(_RAW[kind](channel, _state_arg(state)), kind)


def star_left(channel, state) -> Qsot:
    return star("left", channel, state)


def star_right(channel, state) -> Qsot:
    return star("right", channel, state)


def star_fp(channel, state) -> Qsot:
    return star("fp", channel, state)


def from_dynamics(dyn: Dynamics, kind: str = "left") -> Qsot:
    return star(kind, dyn.channel, dyn.initial)


def mix(weights: Sequence[float], qsots: Sequence[Qsot]) -> Qsot:
    w = np.asarray(weights, dtype=float)
    if len(w) != len(qsots) or len(w) == 0:
        raise ValueError("need one weight per QSOT")
    if np.any(w < 0):
        raise ValidationError("mixture weights must be non-negative")
    if abs(w.sum() - 1) > 1e-12:
        raise ValidationError(f"mixture weights sum to {w.sum()!r}, expected 1")
    dims = qsots[0].dims
    if any(q.dims != dims for q in qsots):
        raise DimensionError("cannot mix QSOTs over different region dimensions")
    data = sum(wi * q.data for wi, q in zip(w, qsots))
    return Qsot(ComplexMatrix(data, dims), "mixture")


def markov_chain(rho, channels: Sequence[QuantumChannel], kind: str = "left") -> Qsot:
    """E_n * ( ... (E_1 * rho)) with each channel acting on the newest region."""
    state = Qsot(density_operator(rho), "other") if not isinstance(rho, Qsot) else rho
    for ch in channels:
        state = star(kind, ch, state)
    return state


def synchronization_gap(e: QuantumChannel, f: QuantumChannel, rho, sigma, kind: str = "fp") -> float:
    """Distance between (E (x) F) * (rho (x) sigma) and (E * rho) (x) (F * sigma).

    Both sides are laid out in region order (A_X, A_Y, B_X, B_Y).
    """
    from .quantum import tensor_channels

    rho, sigma = density_operator(rho), density_operator(sigma)
    joint_state = tensor(rho, sigma)
    joint = _RAW[kind](tensor_channels(e, f), ComplexMatrix(joint_state.data))
    joint = joint.with_dims((rho.size, sigma.size, e.out_dim, f.out_dim))
    apart = tensor(_RAW[kind](e, rho), _RAW[kind](f, sigma))  # (A_X, B_X, A_Y, B_Y)
    apart = permute(apart, [0, 2, 1, 3])
    return frobenius_distance(joint, apart)


def factorize_in_larger_space(weights: Sequence[float], dynamics: Sequence[Dynamics],
                              kind: str = "left") -> tuple[Dynamics, Qsot]:
    """Write sum_i p_i F_i * rho_i as a marginal of one factorizable QSOT.

    A classical flag register of dimension len(dynamics) is attached to both
    ends: the initial state is sum_j p_j rho_j (x) |j><j| and the channel
    applies F_i conditioned on flag i, keeping the flag. The returned QSOT
    has regions (A (x) flag, B (x) flag).
    """
    w = np.asarray(weights, dtype=float)
    n = len(dynamics)
    if len(w) != n or n == 0:
        raise ValueError("need one weight per dynamics")
    if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise ValidationError("weights must form a probability vector")
    din = dynamics[0].channel.in_dim
    dout = dynamics[0].channel.out_dim
    if any(d.channel.in_dim != din or d.channel.out_dim != dout for d in dynamics):
        raise DimensionError("all dynamics must share input and output dimensions")
    state = np.zeros((din * n, din * n), dtype=complex)
    kraus = []
    for i, (wi, dyn) in enumerate(zip(w, dynamics)):
        flag = np.zeros((n, n))
        flag[i, i] = 1.0
        state += wi * np.kron(dyn.initial.data, flag)
        kraus.extend(np.kron(k, flag) for k in dyn.channel.kraus)
    big = Dynamics(ComplexMatrix(state), QuantumChannel(kraus, name="flag-controlled"))
    return big, from_dynamics(big, kind)


def trace_flags(q: Qsot, in_dim: int, out_dim: int) -> Qsot:
    """Marginal of an enlarged QSOT over both flag registers."""
    from .linops import partial_trace

    n = q.dims[0] // in_dim
    m = partial_trace(q.matrix.with_dims((in_dim, n, out_dim, n)), [0, 2])
    return Qsot(m, "mixture")


def channel_distance(e1: QuantumChannel, e2: QuantumChannel) -> float:
    return frobenius_distance(jamiolkowski(e1), jamiolkowski(e2))

