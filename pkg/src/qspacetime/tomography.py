"""Reconstruction of a state over spacetime from interference terms.

Interventions must be unitary, so the operator basis is the Weyl-Heisenberg
(clock-and-shift) family rather than Gell-Mann matrices.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .interferometer import Intervention, ProbeConfig, interference_from_qsot, probabilities, sample
from .interferometer import InterferenceRecord
from .linops import ComplexMatrix, DimensionError, make_rng
from .qsot import Qsot


def weyl_operator(d: int, p: int, q: int) -> np.ndarray:
    """W_{p,q} = sum_k omega^{pk} |k+q mod d><k|."""
    omega = np.exp(2j * np.pi / d)
    w = np.zeros((d, d), dtype=complex)
    for k in range(d):
        w[(k + q) % d, k] = omega ** (p * k)
    return w


def weyl_basis(d: int) -> list[np.ndarray]:
    """All d^2 Weyl operators in lexicographic (p, q) order."""
    if d < 2:
        raise ValueError("Weyl basis needs d >= 2")
    return [weyl_operator(d, p, q) for p in range(d) for q in range(d)]


def basis_labels(dims: Sequence[int]) -> list[tuple[tuple[int, int], ...]]:
    """Basis tuple labels, lexicographic in (region, p, q)."""
    per_region = [[(p, q) for p in range(d) for q in range(d)] for d in dims]
    return list(itertools.product(*per_region))


class ExactOracle:
    """Interference terms Tr[(V_1 (x) ... (x) V_n) rho] of a known QSOT."""

    def __init__(self, qsot: Qsot):
        self.qsot = qsot
        self.dims = qsot.dims

    def __call__(self, iv: Intervention) -> complex:
        return interference_from_qsot(self.qsot, iv)


class NoisyOracle:
    """Finite-shot interferometer: returns outcome counts (n+, n-)."""

    def __init__(self, qsot: Qsot, probe: ProbeConfig | None = None):
        self.qsot = qsot
        self.dims = qsot.dims
        self.probe = probe or ProbeConfig.max_visibility()

    def __call__(self, iv: Intervention, shots: int, rng: np.random.Generator) -> tuple[int, int]:
        i = interference_from_qsot(self.qsot, iv)
        p, m = probabilities(self.probe, i)
        return sample(InterferenceRecord(i, p, m), shots, rng)


@dataclass
class Reconstruction:
    qsot: Qsot
    labels: list
    values: list
    residual: float = float("nan")
    error_estimate: float | None = None
    low_confidence: bool = False
    meta: dict = field(default_factory=dict)


def _assemble(dims, values) -> np.ndarray:
    total = int(np.prod(dims))
    bases = [weyl_basis(d) for d in dims]
    rho = np.zeros((total, total), dtype=complex)
    for value, ops in zip(values, itertools.product(*bases)):
        big = ops[0]
        for o in ops[1:]:
            big = np.kron(big, o)
        rho += value * big.conj().T
    return rho / total


def _check_dims(oracle, dims):
    od = getattr(oracle, "dims", None)
    if od is not None and tuple(od) != tuple(dims):
        raise DimensionError(f"oracle acts on {tuple(od)}, requested {tuple(dims)}")


def reconstruct(oracle: Callable[[Intervention], complex], dims: Sequence[int]) -> Reconstruction:
    """rho = (prod d_i)^{-1} sum_k I(W_k) W_k^dagger over Weyl basis tuples."""
    dims = tuple(int(d) for d in dims)
    _check_dims(oracle, dims)
    bases = [weyl_basis(d) for d in dims]
    labels = basis_labels(dims)
    values = [complex(oracle(Intervention(ops))) for ops in itertools.product(*bases)]
    rho = _assemble(dims, values)
    q = Qsot(ComplexMatrix(rho, dims), "reconstructed")
    # replay every setting against the assembled operator
    residual = max(abs(interference_from_qsot(q, ops) - v)
                   for v, ops in zip(values, itertools.product(*bases)))
    return Reconstruction(q, labels, values, residual,
                          meta={"basis": "weyl", "order": "lexicographic (region, p, q)"})


#: phases applied to the first region's unitary; four runs per basis tuple
_PHASES = (1, 1j, -1, -1j)


def reconstruct_noisy(oracle, dims: Sequence[int], shots_per_setting: int,
                      rng: np.random.Generator | int | None = None,
                      probe: ProbeConfig | None = None,
                      low_confidence_above: float = 0.1) -> Reconstruction:
    """Estimate every interference term from counts and assemble the QSOT.

    For each basis tuple the first region's unitary is multiplied by the
    phases 1, i, -1, -i. With any probe, Pr(+) = S+ + 2 Re[A+ c I] for phase
    c, so Re[A+ c I] is estimated by (n+/N - S+)/2 and the four runs give Re
    and Im of A+ I, which is then divided by A+. The error estimate is the
    worst-case (p(1-p) <= 1/4) standard deviation of a matrix entry. The
    all-identity setting is not measured; normalisation fixes it to 1.
    """
    if shots_per_setting <= 0:
        raise ValueError("shots_per_setting must be positive")
    dims = tuple(int(d) for d in dims)
    _check_dims(oracle, dims)
    probe = probe or getattr(oracle, "probe", None) or ProbeConfig.max_visibility()
    s_plus, a_plus = probe.s_coeff(1), probe.a_coeff(1)
    if abs(a_plus) < 1e-12:
        raise ValueError("probe has no interference visibility")
    rng = make_rng(rng)
    bases = [weyl_basis(d) for d in dims]
    labels = basis_labels(dims)
    children = rng.spawn(len(labels))
    values = []
    n = shots_per_setting
    for k, (child, ops) in enumerate(zip(children, itertools.product(*bases))):
        if k == 0:
            # all-identity setting: I = Tr[rho] = 1 by normalisation
            values.append(1.0 + 0j)
            continue
        est = []
        for c in _PHASES:
            n_plus, _ = oracle(Intervention((c * ops[0],) + tuple(ops[1:])), n, child)
            est.append((n_plus / n - s_plus) / 2)           # Re[A+ c I]
        re = 0.5 * (est[0] - est[2])
        im = -0.5 * (est[1] - est[3])                        # Re[i z] = -Im z
        values.append(complex(re, im) / a_plus)
    rho = _assemble(dims, values)
    total = int(np.prod(dims))
    # Var(n+/N) <= 1/(4N); each of Re, Im averages two runs and divides by 2|A+|
    var_component = 2 * (1 / (4 * n)) / 4 / 4 / abs(a_plus) ** 2
    var_value = 2 * var_component
    # every matrix entry collects exactly `total` unit-modulus contributions
    err = float(np.sqrt(total * var_value) / total)
    q = Qsot(ComplexMatrix(rho, dims), "reconstructed")
    return Reconstruction(q, labels, values, error_estimate=err,
                          low_confidence=err > low_confidence_above,
                          meta={"basis": "weyl", "order": "lexicographic (region, p, q)",
                                "shots_per_setting": n, "phases": "1,i,-1,-i"})
