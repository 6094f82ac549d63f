"""Two-arm interferometry.

Interference terms are computed from closed forms and, independently, from an
explicit state-vector simulation (purification + Stinespring dilation + probe
qubit) which is treated as the reference.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linops import CONSTRUCT_TOL, TOL, ComplexMatrix, DimensionError, as_matrix, is_unitary, tensor
from .qsot import Qsot, left_product, right_product
from .quantum import Dynamics, apply, density_operator, purify, stinespring

log = logging.getLogger(__name__)

#: paths must agree to this level before a record is returned
AGREEMENT_TOL = 1e-8


class ComputationFault(RuntimeError):
    """Independent computation paths disagree."""


def _unit_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != 2 or abs(np.linalg.norm(v) - 1) > CONSTRUCT_TOL:
        raise ValueError("probe basis vectors must be normalised 2-vectors")
    return v


@dataclass(frozen=True)
class ProbeConfig:
    """Probe amplitudes alpha0|0> + alpha1|1> and the final measurement basis."""

    alpha0: complex
    alpha1: complex
    basis_plus: np.ndarray
    basis_minus: np.ndarray

    def __post_init__(self):
        a0, a1 = complex(self.alpha0), complex(self.alpha1)
        if abs(abs(a0) ** 2 + abs(a1) ** 2 - 1) > CONSTRUCT_TOL:
            raise ValueError("probe amplitudes are not normalised")
        bp, bm = _unit_vector(self.basis_plus), _unit_vector(self.basis_minus)
        if abs(np.vdot(bp, bm)) > CONSTRUCT_TOL:
            raise ValueError("measurement basis vectors are not orthogonal")
        object.__setattr__(self, "alpha0", a0)
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "basis_plus", bp)
        object.__setattr__(self, "basis_minus", bm)

    @classmethod
    def max_visibility(cls) -> "ProbeConfig":
        s = 1 / np.sqrt(2)
        return cls(s, s, np.array([s, s]), np.array([s, -s]))

    def _basis(self, sign: int) -> np.ndarray:
        return self.basis_plus if sign > 0 else self.basis_minus

    def s_coeff(self, sign: int) -> float:
        b = self._basis(sign)
        return abs(self.alpha0 * b[0].conjugate()) ** 2 + abs(self.alpha1 * b[1].conjugate()) ** 2

    def a_coeff(self, sign: int) -> complex:
        b = self._basis(sign)
        # alpha0^* alpha1 <0|b><b|1>
        return self.alpha0.conjugate() * self.alpha1 * b[0] * b[1].conjugate()

    @property
    def coefficients(self) -> dict:
        return {"S+": self.s_coeff(1), "S-": self.s_coeff(-1),
                "A+": self.a_coeff(1), "A-": self.a_coeff(-1)}


@dataclass(frozen=True)
class Intervention:
    """One unitary per region."""

    unitaries: tuple

    def __post_init__(self):
        us = tuple(np.asarray(u, dtype=complex) for u in self.unitaries)
        for u in us:
            if not is_unitary(u, CONSTRUCT_TOL):
                raise ValueError("intervention operators must be unitary")
        object.__setattr__(self, "unitaries", us)

    def operator(self) -> ComplexMatrix:
        return tensor(*self.unitaries)


@dataclass(frozen=True)
class InterferenceRecord:
    interference: complex
    prob_plus: float
    prob_minus: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if abs(self.prob_plus + self.prob_minus - 1) > CONSTRUCT_TOL:
            raise ComputationFault("outcome probabilities do not sum to one")
        if min(self.prob_plus, self.prob_minus) < -CONSTRUCT_TOL:
            # a modelling error upstream; report it instead of clamping
            log.warning("negative outcome probability: %s", self)


def interference_from_qsot(q, iv) -> complex:
    """Tr[(V_1 (x) ... (x) V_n) rho]."""
    m = q.matrix if isinstance(q, Qsot) else as_matrix(q)
    ops = iv.unitaries if isinstance(iv, Intervention) else tuple(iv)
    if len(ops) != len(m.dims) or any(np.shape(u)[0] != d for u, d in zip(ops, m.dims)):
        raise DimensionError(f"intervention does not fit region dims {m.dims}")
    op = tensor(*ops).data
    return complex(np.einsum("ij,ji->", op, m.data))


def probabilities(probe: ProbeConfig, interference: complex) -> tuple[float, float]:
    """Pr(+-) = S+- + 2 Re[A+- I]."""
    p = probe.s_coeff(1) + 2 * (probe.a_coeff(1) * interference).real
    m = probe.s_coeff(-1) + 2 * (probe.a_coeff(-1) * interference).real
    if min(p, m) < -CONSTRUCT_TOL:
        log.warning("negative probability for I=%r with probe %r", interference, probe.coefficients)
    return float(p), float(m)


# -- state-vector reference simulation -----------------------------------

def _probe_outcomes(probe: ProbeConfig, arm0: np.ndarray, arm1: np.ndarray):
    """Project the probe of alpha0|arm0>|0> + alpha1|arm1>|1> onto b+-."""
    out = []
    for sign in (1, -1):
        b = probe._basis(sign)
        phi = probe.alpha0 * b[0].conjugate() * arm0 + probe.alpha1 * b[1].conjugate() * arm1
        out.append(float(np.vdot(phi, phi).real))
    return out[0], out[1], complex(np.vdot(arm0, arm1))


def _oracle_temporal(initial, dilation, v, w, probe):
    """Full state vector on B E K R; returns (p+, p-, I)."""
    psi = purify(initial)
    d_e = psi.dims[1]
    # ordering A, E, K  ->  amplitudes indexed (a, e, k)
    start = np.zeros((psi.dims[0], d_e, dilation.in_dims[1]), dtype=complex)
    start[:, :, 0] = psi.amplitudes.reshape(psi.dims)
    u = dilation.unitary.reshape(dilation.out_dims + dilation.in_dims)

    def evolve(t, before, after):
        t = np.einsum("xa,aek->xek", before, t)
        t = np.einsum("bjak,aek->bej", u, t)
        return np.einsum("yb,bej->yej", after, t)

    eye_a, eye_b = np.eye(v.shape[0]), np.eye(w.shape[0])
    arm0 = evolve(start, eye_a, eye_b).reshape(-1)
    arm1 = evolve(start, v, w).reshape(-1)
    return _probe_outcomes(probe, arm0, arm1)


def _oracle_spatial(rho, v, w, dims, probe):
    psi = purify(as_matrix(rho, dims))
    amp = psi.amplitudes.reshape(psi.dims)
    arm1 = (np.kron(v, w) @ amp).reshape(-1)
    return _probe_outcomes(probe, amp.reshape(-1), arm1)


def _check(values: dict, tol: float = AGREEMENT_TOL) -> float:
    vals = list(values.values())
    worst = max(abs(a - b) for a in vals for b in vals)
    if worst > tol:
        raise ComputationFault(f"interference paths disagree by {worst:.3g}: {values}")
    return worst


def simulate_temporal(dyn: Dynamics, v, w, probe: ProbeConfig | None = None,
                      dilation=None) -> InterferenceRecord:
    """Interferometry on a dynamics with V applied before and W after the channel."""
    probe = probe or ProbeConfig.max_visibility()
    v, w = np.asarray(v, dtype=complex), np.asarray(w, dtype=complex)
    rho, ch = dyn.initial.data, dyn.channel
    if v.shape != (ch.in_dim, ch.in_dim) or w.shape != (ch.out_dim, ch.out_dim):
        raise DimensionError("interventions do not fit the dynamics")
    dilation = dilation or stinespring(ch)
    i_direct = complex(np.trace(w @ apply(ch, v @ rho)))
    i_left = interference_from_qsot(left_product(ch, dyn.initial), (v, w))
    p, m, i_oracle = _oracle_temporal(dyn.initial, dilation, v, w, probe)
    worst = _check({"direct": i_direct, "left": i_left, "oracle": i_oracle})
    return InterferenceRecord(i_oracle, p, m, {"direct": i_direct, "left_product": i_left,
                                                "max_path_gap": worst})


def simulate_spatial(rho_ab, v, w, probe: ProbeConfig | None = None, dims=None) -> InterferenceRecord:
    probe = probe or ProbeConfig.max_visibility()
    v, w = np.asarray(v, dtype=complex), np.asarray(w, dtype=complex)
    dims = tuple(dims) if dims else (v.shape[0], w.shape[0])
    rho = density_operator(as_matrix(rho_ab, dims))
    i_formula = interference_from_qsot(rho, (v, w))
    p, m, i_oracle = _oracle_spatial(rho.data, v, w, dims, probe)
    worst = _check({"formula": i_formula, "oracle": i_oracle})
    return InterferenceRecord(i_oracle, p, m, {"formula": i_formula, "max_path_gap": worst})


def _oracle_reversed(initial, dilation, v, w, probe):
    """Reversed dilated dynamics: start from U(rho (x) tau)U^dagger at B,
    apply W, run U^dagger back to A, apply V."""
    psi = purify(initial)
    d_e = psi.dims[1]
    start = np.zeros((psi.dims[0], d_e, dilation.in_dims[1]), dtype=complex)
    start[:, :, 0] = psi.amplitudes.reshape(psi.dims)
    u = dilation.unitary.reshape(dilation.out_dims + dilation.in_dims)
    phi = np.einsum("bjak,aek->bej", u, start)          # state at B-time
    udg = u.conj()                                       # U^dagger entries by index swap

    def back(t, before, after):
        t = np.einsum("yb,bej->yej", before, t)
        t = np.einsum("bjak,bej->aek", udg, t)
        return np.einsum("xa,aek->xek", after, t)

    eye_a, eye_b = np.eye(v.shape[0]), np.eye(w.shape[0])
    arm0 = back(phi, eye_b, eye_a).reshape(-1)
    arm1 = back(phi, w, v).reshape(-1)
    return _probe_outcomes(probe, arm0, arm1)


def simulate_time_reversed(dyn: Dynamics, v, w, probe: ProbeConfig | None = None,
                           dilation=None) -> InterferenceRecord:
    """Equal mixture of the forward dilated dynamics and its time reverse."""
    probe = probe or ProbeConfig.max_visibility()
    v, w = np.asarray(v, dtype=complex), np.asarray(w, dtype=complex)
    ch = dyn.channel
    if v.shape != (ch.in_dim, ch.in_dim) or w.shape != (ch.out_dim, ch.out_dim):
        raise DimensionError("interventions do not fit the dynamics")
    dilation = dilation or stinespring(ch)
    pf, mf, i_fwd = _oracle_temporal(dyn.initial, dilation, v, w, probe)
    pr, mr, i_rev = _oracle_reversed(dyn.initial, dilation, v, w, probe)
    i_mix = 0.5 * (i_fwd + i_rev)
    left = left_product(ch, dyn.initial)
    right = right_product(ch, dyn.initial)
    i_right = interference_from_qsot(right, (v, w))
    i_fp = interference_from_qsot(0.5 * (left + right), (v, w))
    _check({"reversed": i_rev, "right_product": i_right})
    worst = _check({"mixture": i_mix, "fp_product": i_fp})
    return InterferenceRecord(i_mix, 0.5 * (pf + pr), 0.5 * (mf + mr),
                              {"forward": i_fwd, "reversed": i_rev, "fp_product": i_fp,
                               "max_path_gap": worst})


def simulate_mixture(weights: Sequence[float], dynamics: Sequence[Dynamics], v, w,
                     probe: ProbeConfig | None = None, time_reversed: bool = False) -> InterferenceRecord:
    """Probabilistic mixture of dynamics; interference and probabilities mix linearly."""
    sim = simulate_time_reversed if time_reversed else simulate_temporal
    recs = [sim(d, v, w, probe) for d in dynamics]
    wt = np.asarray(weights, dtype=float)
    if np.any(wt < 0) or abs(wt.sum() - 1) > 1e-12:
        raise ValueError("mixture weights must form a probability vector")
    return InterferenceRecord(
        complex(sum(a * r.interference for a, r in zip(wt, recs))),
        float(sum(a * r.prob_plus for a, r in zip(wt, recs))),
        float(sum(a * r.prob_minus for a, r in zip(wt, recs))),
    )


def povm_elements(probe: ProbeConfig, v, w) -> tuple[np.ndarray, np.ndarray]:
    """M+- = Hermitian part of S+- 1 + 2 A+- (V (x) W)."""
    op = np.kron(np.asarray(v, dtype=complex), np.asarray(w, dtype=complex))
    eye = np.eye(op.shape[0])
    out = []
    for sign in (1, -1):
        m = probe.s_coeff(sign) * eye + 2 * probe.a_coeff(sign) * op
        out.append(0.5 * (m + m.conj().T))
    return out[0], out[1]


def sample(record: InterferenceRecord, shots: int, rng: np.random.Generator) -> tuple[int, int]:
    """Binomial counts (n+, n-) for ``shots`` repetitions."""
    if shots < 0:
        raise ValueError("shots must be non-negative")
    p = record.prob_plus
    if p < -CONSTRUCT_TOL or p > 1 + CONSTRUCT_TOL or record.prob_minus < -CONSTRUCT_TOL:
        raise ValueError(f"invalid outcome probabilities ({record.prob_plus}, {record.prob_minus})")
    if shots == 0:
        return 0, 0
    n = int(rng.binomial(shots, min(max(p, 0.0), 1.0)))
    return n, shots - n
