"""Dense complex linear algebra over tensor-product spaces.

Every operator carries the list of subsystem dimensions it acts on, so that
partial traces and factor reorderings are checked rather than assumed.
Storage is a plain row-major ``numpy`` array.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

#: comparison tolerance used by validators and equality checks
TOL = 1e-10
#: tolerance used while constructing objects from exact data
CONSTRUCT_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when subsystem dimensions do not line up."""


def _prod(dims: Iterable[int]) -> int:
    return int(reduce(lambda a, b: a * b, dims, 1))


@dataclass(frozen=True)
class ComplexMatrix:
    """Square complex matrix with attached subsystem dimensions."""

    data: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {data.shape}")
        dims = tuple(int(d) for d in self.dims) if self.dims else (data.shape[0],)
        if any(d < 1 for d in dims):
            raise DimensionError(f"dims must be positive, got {dims}")
        if _prod(dims) != data.shape[0]:
            raise DimensionError(f"dims {dims} do not match matrix size {data.shape[0]}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

    @property
    def size(self) -> int:
        return self.data.shape[0]

    def with_dims(self, dims: Sequence[int]) -> "ComplexMatrix":
        """Same data viewed with a different (compatible) factorisation."""
        return ComplexMatrix(self.data, tuple(dims))

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def __matmul__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        if self.dims != other.dims:
            raise DimensionError(f"dims mismatch {self.dims} vs {other.dims}")
        return ComplexMatrix(self.data @ other.data, self.dims)

    def __add__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        if self.dims != other.dims:
            raise DimensionError(f"dims mismatch {self.dims} vs {other.dims}")
        return ComplexMatrix(self.data + other.data, self.dims)

    def __sub__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        if self.dims != other.dims:
            raise DimensionError(f"dims mismatch {self.dims} vs {other.dims}")
        return ComplexMatrix(self.data - other.data, self.dims)

    def __mul__(self, scalar: complex) -> "ComplexMatrix":
        return ComplexMatrix(scalar * self.data, self.dims)

    __rmul__ = __mul__

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.data, dtype=dtype)


@dataclass(frozen=True)
class StateVector:
    """Normalised pure state with subsystem dimensions."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).reshape(-1)
        dims = tuple(int(d) for d in self.dims) if self.dims else (amp.size,)
        if _prod(dims) != amp.size:
            raise DimensionError(f"dims {dims} do not match vector length {amp.size}")
        if abs(np.linalg.norm(amp) - 1.0) > CONSTRUCT_TOL:
            raise ValueError(f"state vector not normalised (norm {np.linalg.norm(amp)!r})")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "dims", dims)

    def projector(self) -> ComplexMatrix:
        return ComplexMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


def as_matrix(m, dims: Sequence[int] | None = None) -> ComplexMatrix:
    """Coerce an array (or ComplexMatrix) into a ComplexMatrix."""
    if isinstance(m, ComplexMatrix):
        if dims is not None and tuple(dims) != m.dims:
            return m.with_dims(dims)
        return m
    return ComplexMatrix(np.asarray(m, dtype=complex), tuple(dims) if dims else ())


def tensor(*ms) -> ComplexMatrix:
    """Kronecker product; dims are concatenated left to right."""
    mats = [as_matrix(m) for m in ms]
    data = reduce(np.kron, (m.data for m in mats))
    dims = tuple(d for m in mats for d in m.dims)
    return ComplexMatrix(data, dims)


def _check_indices(dims: Sequence[int], idx: Iterable[int]) -> list[int]:
    out = sorted(set(int(i) for i in idx))
    for i in out:
        if i < 0 or i >= len(dims):
            raise IndexError(f"subsystem index {i} out of range for dims {tuple(dims)}")
    return out


def partial_trace(m, keep: Iterable[int]) -> ComplexMatrix:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems retain their original relative order.
    """
    m = as_matrix(m)
    keep = _check_indices(m.dims, keep)
    n = len(m.dims)
    t = m.data.reshape(m.dims + m.dims)
    # trace from the highest index down so axis numbers stay valid
    for k in reversed(range(n)):
        if k in keep:
            continue
        cur = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + cur)
    kdims = tuple(m.dims[k] for k in keep)
    if not kdims:
        return ComplexMatrix(np.array([[complex(t)]]), (1,))
    d = _prod(kdims)
    return ComplexMatrix(t.reshape(d, d), kdims)


def permute(m, perm: Sequence[int]) -> ComplexMatrix:
    """Reorder tensor factors: output factor ``k`` is input factor ``perm[k]``."""
    m = as_matrix(m)
    n = len(m.dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise DimensionError(f"{perm} is not a permutation of {n} factors")
    t = m.data.reshape(m.dims + m.dims)
    t = t.transpose(perm + [p + n for p in perm])
    dims = tuple(m.dims[p] for p in perm)
    return ComplexMatrix(t.reshape(m.size, m.size), dims)


def partial_transpose(m, sub: Iterable[int]) -> ComplexMatrix:
    m = as_matrix(m)
    sub = _check_indices(m.dims, sub)
    n = len(m.dims)
    t = m.data.reshape(m.dims + m.dims)
    axes = list(range(2 * n))
    for k in sub:
        axes[k], axes[k + n] = axes[k + n], axes[k]
    return ComplexMatrix(t.transpose(axes).reshape(m.size, m.size), m.dims)


def dagger(m) -> ComplexMatrix:
    m = as_matrix(m)
    return ComplexMatrix(m.data.conj().T, m.dims)


def hermitian_part(m) -> ComplexMatrix:
    m = as_matrix(m)
    return ComplexMatrix(0.5 * (m.data + m.data.conj().T), m.dims)


def frobenius_distance(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.size != b.size:
        raise DimensionError(f"cannot compare {a.size}x{a.size} with {b.size}x{b.size}")
    return float(np.linalg.norm(a.data - b.data))


def max_abs_diff(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def is_hermitian(m, tol: float = TOL) -> bool:
    a = np.asarray(m)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def is_unitary(u, tol: float = CONSTRUCT_TOL) -> bool:
    a = np.asarray(u)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol)


def swap_operator(d1: int, d2: int | None = None) -> ComplexMatrix:
    """Operator exchanging two factors: |i>|j> -> |j>|i>."""
    d2 = d1 if d2 is None else d2
    s = np.zeros((d1 * d2, d1 * d2), dtype=complex)
    for i in range(d1):
        for j in range(d2):
            s[j * d1 + i, i * d2 + j] = 1.0
    return ComplexMatrix(s, (d1, d2) if d1 == d2 else (d1 * d2,))


# -- random objects -------------------------------------------------------

def make_rng(seed=None) -> np.random.Generator:
    """Counter-based generator; ``spawn`` gives independent children."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def random_unitary(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar-distributed unitary via QR with phase-normalised R diagonal."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return ComplexMatrix(q * ph, (dim,))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> ComplexMatrix:
    """Random density operator G G^dagger / Tr, G a Ginibre matrix."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T) / np.trace(rho).real
    return ComplexMatrix(rho, (dim,))


def random_matrix(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    return ComplexMatrix(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)), (dim,))
