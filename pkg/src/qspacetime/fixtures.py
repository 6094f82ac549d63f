"""Worked examples as executable fixtures.

Each fixture pairs a printed matrix with the same object recomputed by the
library. ``run_fixtures`` replays all of them.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .io import parse_channel_spec, parse_state_spec
from .linops import TOL, ComplexMatrix, frobenius_distance, max_abs_diff
from .qsot import left_product, mix, star_fp, star_left
from .quantum import QuantumChannel, maximally_mixed

ANGLES = {"pi/6": np.pi / 6, "pi/3": np.pi / 3, "pi/2": np.pi / 2}


def _m(rows, scale=1.0):
    return scale * np.array(rows, dtype=complex)


EXAMPLE1 = _m([[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 1, 0], [-1, 0, 0, 0]], 0.5)
EXAMPLE2_L1 = _m([[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [-1, 0, 0, 0]], 0.5)
EXAMPLE2_L2 = _m([[0, 0, 0, -1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]], 0.5)
EXAMPLE2_FP = _m([[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]], 0.5)


def example3_left_printed(theta: float, which: int) -> np.ndarray:
    """Left products exactly as printed (Hermitian, hence inconsistent with
    the printed FP part; see :func:`example3_left`)."""
    ph = np.exp(1j * theta) if which == 1 else np.exp(-1j * theta)
    return _m([[1, 0, 0, 0], [0, 0, ph, 0], [0, np.conj(ph), 0, 0], [0, 0, 0, 1]], 0.5)


def example3_left(theta: float, which: int) -> np.ndarray:
    """Left products with the (2,1) entry corrected: both off-diagonal
    entries carry the same phase, so the Hermitian part has cos(theta)."""
    ph = np.exp(1j * theta) if which == 1 else np.exp(-1j * theta)
    return _m([[1, 0, 0, 0], [0, 0, ph, 0], [0, ph, 0, 0], [0, 0, 0, 1]], 0.5)


def example3_fp(theta: float) -> np.ndarray:
    c = np.cos(theta)
    return _m([[1, 0, 0, 0], [0, 0, c, 0], [0, c, 0, 0], [0, 0, 0, 1]], 0.5)


# printed left products of the Pauli channels on |0><0|, |1><1|, |0><1|, |1><0|
TABLE = {
    ("id", "00"): [[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
    ("Z", "00"): [[1, 0, 0, 0], [0, 0, -1, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
    ("X", "00"): [[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
    ("Y", "00"): [[0, 0, 0, -1], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
    ("id", "11"): [[0, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
    ("Z", "11"): [[0, 0, 0, 0], [0, 0, 0, 0], [0, -1, 0, 0], [0, 0, 0, 1]],
    ("X", "11"): [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]],
    ("Y", "11"): [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0], [-1, 0, 0, 0]],
    ("id", "01"): [[0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]],
    ("Z", "01"): [[0, -1, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]],
    ("X", "01"): [[0, 0, 1, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
    ("Y", "01"): [[0, 0, 1, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
    ("id", "10"): [[0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0]],
    ("Z", "10"): [[0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0], [0, 0, -1, 0]],
    ("X", "10"): [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 1, 0, 0]],
    ("Y", "10"): [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, -1], [0, 1, 0, 0]],
}


def matrix_unit(label: str) -> np.ndarray:
    u = np.zeros((2, 2), dtype=complex)
    u[int(label[0]), int(label[1])] = 1.0
    return u


@dataclass
class FixtureResult:
    name: str
    deviation: float
    passed: bool
    expected: np.ndarray
    computed: np.ndarray
    seconds: float = 0.0
    error: str | None = None

    def to_json(self) -> dict:
        # timings are left out so reports stay byte-identical across runs
        dev = self.deviation if np.isfinite(self.deviation) else None
        return {"name": self.name, "status": "PASS" if self.passed else "FAIL",
                "max_deviation": dev, "error": self.error}


class _Channels:
    def __init__(self, overrides: Mapping[str, QuantumChannel] | None):
        self.overrides = dict(overrides or {})

    def __call__(self, spec: str) -> QuantumChannel:
        if spec in self.overrides:
            return self.overrides[spec]
        return parse_channel_spec(spec)


def _fixtures(ch: _Channels) -> list[tuple[str, Callable[[], np.ndarray], np.ndarray]]:
    p = parse_state_spec
    out = [
        ("example1/ensemble-1",
         lambda: mix([0.5, 0.5], [star_left(ch("id"), p("0")), star_left(ch("Y[pi]"), p("1"))]).data,
         EXAMPLE1),
        ("example1/ensemble-2",
         lambda: mix([0.5, 0.5], [star_left(ch("Y[-pi/2]"), p("+")),
                                  star_left(ch("Y[pi/2]"), p("-"))]).data,
         EXAMPLE1),
    ]

    def ex2(first, second, kind):
        prod = star_left if kind == "L" else star_fp
        return lambda: mix([0.5, 0.5], [prod(ch(first), p("0")), prod(ch(second), p("1"))]).data

    out += [
        ("example2/rho1_L", ex2("X", "Y", "L"), EXAMPLE2_L1),
        ("example2/rho2_L", ex2("Y", "X", "L"), EXAMPLE2_L2),
        ("example2/rho1_FP", ex2("X", "Y", "FP"), EXAMPLE2_FP),
        ("example2/rho2_FP", ex2("Y", "X", "FP"), EXAMPLE2_FP),
    ]
    for label, theta in ANGLES.items():
        plus, minus = f"Z[{label}]", f"Z[-{label}]"
        out += [
            (f"example3/theta={label}/rho1_L", ex2(plus, minus, "L"), example3_left(theta, 1)),
            (f"example3/theta={label}/rho2_L", ex2(minus, plus, "L"), example3_left(theta, 2)),
            (f"example3/theta={label}/rho1_FP", ex2(plus, minus, "FP"), example3_fp(theta)),
            (f"example3/theta={label}/rho2_FP", ex2(minus, plus, "FP"), example3_fp(theta)),
            (f"example3/theta={label}/dephase_FP_mixed",
             (lambda lab=label: star_fp(ch(f"dephase[{lab}]"), maximally_mixed(2)).data),
             example3_fp(theta)),
        ]
    for (name, unit), printed in TABLE.items():
        out.append((f"table/{name}*L|{unit[0]}><{unit[1]}|",
                     (lambda n=name, u=unit: left_product(ch(n), ComplexMatrix(matrix_unit(u))).data),
                     _m(printed)))
    return out


def run_fixtures(tol: float = TOL, overrides: Mapping[str, QuantumChannel] | None = None) -> list[FixtureResult]:
    """Recompute every fixture; ``overrides`` replaces named channels."""
    results = []
    for name, compute, expected in _fixtures(_Channels(overrides)):
        t0 = time.perf_counter()
        err = None
        try:
            computed = np.asarray(compute(), dtype=complex)
            dev = max_abs_diff(computed, expected)
        except Exception as exc:  # a broken override must surface as a failed fixture
            computed, dev, err = np.full_like(expected, np.nan), float("inf"), str(exc)
        results.append(FixtureResult(name, dev, bool(dev < tol), expected, computed,
                                     time.perf_counter() - t0, err))
    return results


def example2_distances() -> dict:
    """Frobenius distances between the two Example-2 mixtures."""
    l1, l2 = ComplexMatrix(EXAMPLE2_L1), ComplexMatrix(EXAMPLE2_L2)
    return {"left": frobenius_distance(l1, l2), "fp": 0.0}
