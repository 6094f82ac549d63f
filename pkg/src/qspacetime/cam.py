"""Checkable conditions for causally agnostic measurements: commuting
probe couplings and controlled-unitary structure over caller-supplied
probe sectors. Sector discovery itself is not attempted."""
from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg

from .linops import TOL, ComplexMatrix, is_hermitian, is_unitary, partial_trace, permute


def embed_couplings(h_xr, h_yr, d_x: int, d_y: int, d_r: int) -> tuple[np.ndarray, np.ndarray]:
    """H_XR (x) 1_Y and H_YR (x) 1_X, both laid out on X (x) Y (x) R."""
    h_xr, h_yr = np.asarray(h_xr, dtype=complex), np.asarray(h_yr, dtype=complex)
    if h_xr.shape != (d_x * d_r,) * 2 or h_yr.shape != (d_y * d_r,) * 2:
        raise ValueError("coupling shapes do not match the given dimensions")
    a = permute(ComplexMatrix(np.kron(h_xr, np.eye(d_y)), (d_x, d_r, d_y)), [0, 2, 1]).data
    b = permute(ComplexMatrix(np.kron(h_yr, np.eye(d_x)), (d_y, d_r, d_x)), [2, 0, 1]).data
    return a, b


def commutator_check(h_xr, h_yr, d_x: int, d_y: int, d_r: int,
                     tol: float = TOL) -> tuple[bool, float]:
    """Whether the two probe couplings commute once embedded on X Y R."""
    for h in (h_xr, h_yr):
        if not is_hermitian(h, tol):
            raise ValueError("coupling Hamiltonians must be Hermitian")
    a, b = embed_couplings(h_xr, h_yr, d_x, d_y, d_r)
    norm = float(np.linalg.norm(a @ b - b @ a))
    return norm <= tol, norm


def _check_sectors(sectors: Sequence[np.ndarray], d_r: int, tol: float) -> list[np.ndarray]:
    projs = [np.asarray(p, dtype=complex) for p in sectors]
    if not projs:
        raise ValueError("need at least one sector")
    for i, p in enumerate(projs):
        if p.shape != (d_r, d_r) or np.abs(p @ p - p).max() > tol or not is_hermitian(p, tol):
            raise ValueError(f"sector {i} is not an orthogonal projector on R")
        for q in projs[i + 1:]:
            if np.abs(p @ q).max() > tol:
                raise ValueError("sectors are not mutually orthogonal")
    if np.abs(sum(projs) - np.eye(d_r)).max() > tol:
        raise ValueError("sectors do not resolve the identity on R")
    return projs


def controlled_blocks(u, sectors, d_x: int, tol: float = TOL):
    """Per-sector X unitaries U_i extracted from U on X (x) R, with residuals.

    Returns (blocks, off_block_norm, max_block_residual).
    """
    u = np.asarray(u, dtype=complex)
    d_r = u.shape[0] // d_x
    projs = _check_sectors(sectors, d_r, tol)
    lifts = [np.kron(np.eye(d_x), p) for p in projs]
    off = 0.0
    for i, li in enumerate(lifts):
        for j, lj in enumerate(lifts):
            if i != j:
                off = max(off, float(np.linalg.norm(li @ u @ lj)))
    blocks, resid = [], 0.0
    for p, li in zip(projs, lifts):
        block = li @ u @ li
        rank = int(round(np.trace(p).real))
        ui = partial_trace(ComplexMatrix(block, (d_x, d_r)), [0]).data / rank
        resid = max(resid, float(np.linalg.norm(block - np.kron(ui, p))))
        blocks.append(ui)
    return blocks, off, resid


def controlled_unitary_check(u, sectors, d_x: int, tol: float = TOL) -> bool:
    """True iff U = sum_i U_i (x) Pi_i with every U_i unitary."""
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, tol):
        return False
    blocks, off, resid = controlled_blocks(u, sectors, d_x, tol)
    return off <= tol and resid <= tol and all(is_unitary(b, tol) for b in blocks)


def generator(u, margin: float = 1e-6) -> np.ndarray | None:
    """H with U = exp(-iH) on the principal branch, or None when the
    spectrum of U comes within ``margin`` of -1."""
    u = np.asarray(u, dtype=complex)
    if np.min(np.abs(np.linalg.eigvals(u) + 1)) < margin:
        return None
    h = 1j * scipy.linalg.logm(u)
    return 0.5 * (h + h.conj().T)
