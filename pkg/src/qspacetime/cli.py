"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input or validation error.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import itertools
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import io
from . import linops
from .cam import commutator_check, controlled_unitary_check
from .fixtures import run_fixtures
from .interferometer import (
    ComputationFault,
    InterferenceRecord,
    ProbeConfig,
    sample,
    simulate_mixture,
)
from .linops import DimensionError, frobenius_distance, make_rng
from .procmat import first_order, ordered_process_matrix
from .qsot import star
from .quantum import ValidationError
from .timesym import CompassSetup, compass_recover_left
from .tomography import ExactOracle, NoisyOracle, reconstruct, reconstruct_noisy, weyl_basis

log = logging.getLogger("qspacetime")

EXIT_OK, EXIT_VERIFY, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _write(text: str, out: str | None) -> None:
    """Write atomically so a failure never leaves partial output."""
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _is_file(arg: str) -> bool:
    return Path(arg).is_file()


def _load_json(path: str):
    if not Path(path).is_file():
        raise InputError(f"no such file: {path}")
    return io.load(path)


def _state(arg: str):
    return io.state_from_json(_load_json(arg)) if _is_file(arg) else io.parse_state_spec(arg)


def _channel(arg: str):
    return io.channel_from_json(_load_json(arg)) if _is_file(arg) else io.parse_channel_spec(arg)


def _unitary(arg: str) -> np.ndarray:
    if _is_file(arg):
        obj = _load_json(arg)
        return io.rect_from_json(obj) if "shape" in obj else io.matrix_from_json(obj).data
    return io.parse_unitary_spec(arg)


def _dynamics(files: list[str]):
    pairs = []
    for f in files:
        obj = _load_json(f)
        pairs.append((("weight" in obj), io.dynamics_from_json(obj)))
    if not any(has for has, _ in pairs):
        weights = [1.0 / len(pairs)] * len(pairs)
    else:
        weights = [w for _, (w, _) in pairs]
    return weights, [d for _, (_, d) in pairs]


def _dims(text: str) -> list[int]:
    try:
        dims = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"cannot parse dims {text!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise InputError(f"invalid dims {text!r}")
    return dims


def _report_matrix(m) -> dict:
    return io.matrix_to_json(m)


# -- subcommands ----------------------------------------------------------

def cmd_product(args) -> int:
    q = star(args.kind, _channel(args.channel), _state(args.state))
    _write(io.dumps(io.qsot_to_json(q)), args.out)
    return EXIT_OK


def _sweep(args, weights, dyns, probe) -> int:
    d_in, d_out = dyns[0].channel.in_dim, dyns[0].channel.out_dim
    vs = weyl_basis(d_in) if d_in > 1 else [np.eye(1)]
    ws = weyl_basis(d_out) if d_out > 1 else [np.eye(1)]
    rng = make_rng(args.seed)
    pairs = list(itertools.product(range(len(vs)), range(len(ws))))
    children = rng.spawn(len(pairs))
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["intervention_id", "re_I", "im_I", "p_plus", "p_minus",
                     "n_plus", "n_minus", "shots", "seed"])
    for (i, j), child in zip(pairs, children):
        rec = simulate_mixture(weights, dyns, vs[i], ws[j], probe, args.time_reversed)
        n_p, n_m = sample(rec, args.shots, child) if args.shots else (0, 0)
        writer.writerow([f"V{i}-W{j}", repr(rec.interference.real), repr(rec.interference.imag),
                         repr(rec.prob_plus), repr(rec.prob_minus), n_p, n_m, args.shots,
                         "" if args.seed is None else args.seed])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_interfere(args) -> int:
    if args.dynamics:
        weights, dyns = _dynamics(args.dynamics)
    elif args.state and args.channel:
        from .quantum import Dynamics
        weights, dyns = [1.0], [Dynamics(_state(args.state), _channel(args.channel))]
    else:
        raise InputError("give --dynamics FILES or both --state and --channel")
    probe = io.probe_from_json(_load_json(args.probe)) if args.probe else ProbeConfig.max_visibility()
    if args.sweep:
        return _sweep(args, weights, dyns, probe)
    v, w = _unitary(args.V), _unitary(args.W)
    rec = simulate_mixture(weights, dyns, v, w, probe, time_reversed=args.time_reversed)
    out = io.record_to_json(rec)
    out["time_reversed"] = bool(args.time_reversed)
    out["product"] = "fp" if args.time_reversed else "left"
    if args.shots:
        n_p, n_m = sample(rec, args.shots, make_rng(args.seed))
        out.update({"n_plus": n_p, "n_minus": n_m, "shots": args.shots, "seed": args.seed})
    _write(io.dumps(out), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    rec = io.record_from_json(_load_json(args.record))
    n_p, n_m = sample(rec, args.shots, make_rng(args.seed))
    out = io.record_to_json(rec)
    out.update({"n_plus": n_p, "n_minus": n_m, "shots": args.shots, "seed": args.seed})
    _write(io.dumps(out), args.out)
    return EXIT_OK


def cmd_tomo(args) -> int:
    mode, _, path = args.oracle.partition(":")
    if mode not in ("self", "noisy") or not path:
        raise InputError("--oracle must be self:FILE or noisy:FILE")
    q = io.qsot_from_json(_load_json(path))
    dims = _dims(args.dims) if args.dims else list(q.dims)
    if mode == "self":
        rec = reconstruct(ExactOracle(q), dims)
    else:
        if not args.shots:
            raise InputError("noisy tomography needs --shots")
        rec = reconstruct_noisy(NoisyOracle(q), dims, args.shots, make_rng(args.seed))
    report = {
        "mode": mode,
        "dims": dims,
        "basis": rec.meta["basis"],
        "basis_order": rec.meta["order"],
        "labels": [[list(pq) for pq in lab] for lab in rec.labels],
        "values": [[v.real, v.imag] for v in rec.values],
        "qsot": io.qsot_to_json(rec.qsot),
        "residual": None if np.isnan(rec.residual) else rec.residual,
        "error_estimate": rec.error_estimate,
        "low_confidence": rec.low_confidence,
        "max_deviation_from_source": linops.max_abs_diff(rec.qsot.data, q.data),
    }
    if mode == "noisy":
        report.update({"shots_per_setting": args.shots, "seed": args.seed})
    _write(io.dumps(report), args.out)
    return EXIT_OK


def cmd_compass(args) -> int:
    weights, dyns = _dynamics(args.dynamics)
    first = compass_recover_left(CompassSetup(dyns, weights))
    report = {"recovered_left": io.qsot_to_json(first)}
    if args.against:
        w2, d2 = _dynamics(args.against)
        second = compass_recover_left(CompassSetup(d2, w2))
        report["recovered_left_against"] = io.qsot_to_json(second)
        report["distance"] = frobenius_distance(first.matrix, second.matrix)
    _write(io.dumps(report), args.out)
    return EXIT_OK


def cmd_procmat(args) -> int:
    weights, dyns = _dynamics([args.dynamics])
    w = ordered_process_matrix(dyns[0])
    if args.first_order:
        from .qsot import Qsot
        out = io.qsot_to_json(Qsot(first_order(w), "other"))
    else:
        out = io.process_matrix_to_json(w)
    _write(io.dumps(out), args.out)
    return EXIT_OK


def cmd_cam_check(args) -> int:
    if args.mode == "commutator":
        if not (args.hxr and args.hyr and args.dims):
            raise InputError("commutator mode needs --hxr, --hyr and --dims x,y,r")
        d_x, d_y, d_r = _dims(args.dims)
        ok, norm = commutator_check(_unitary(args.hxr), _unitary(args.hyr), d_x, d_y, d_r,
                                    tol=args.tolerance)
        out = {"check": "commutator", "commutes": ok, "norm": norm}
    else:
        if not (args.unitary and args.sectors and args.dims):
            raise InputError("controlled mode needs --unitary, --sectors and --dims x")
        (d_x,) = _dims(args.dims)[:1]
        sectors = [_unitary(s) for s in args.sectors]
        ok = controlled_unitary_check(_unitary(args.unitary), sectors, d_x, tol=args.tolerance)
        out = {"check": "controlled_unitary", "controlled": ok}
    _write(io.dumps(out), args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_verify_examples(args) -> int:
    overrides = {}
    for item in args.override_channel or []:
        name, sep, path = item.partition("=")
        if not sep:
            raise InputError("--override-channel expects NAME=FILE")
        overrides[name] = io.channel_from_json(_load_json(path), validate=False)
    results = run_fixtures(args.tolerance, overrides)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<42s} max deviation {r.deviation:.3e}")
        if r.error:
            print(f"  error: {r.error}")
        elif not r.passed:
            print("  expected:\n" + np.array2string(r.expected, precision=6))
            print("  computed:\n" + np.array2string(r.computed, precision=6))
            print("  diff:\n" + np.array2string(r.computed - r.expected, precision=6))
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} fixtures passed")
    if args.json:
        _write(io.dumps({"tolerance": args.tolerance,
                         "fixtures": [r.to_json() for r in results],
                         "failed": failed}), args.json)
    return EXIT_VERIFY if failed else EXIT_OK


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=linops.TOL,
                        help="comparison tolerance (default %(default)g)")
    common.add_argument("--seed", type=int, default=None, help="RNG seed")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="qspacetime", description=__doc__.splitlines()[0],
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("product", parents=[common], help="compute a QSOT product")
    s.add_argument("--kind", choices=["left", "right", "fp"], default="left")
    s.add_argument("--state", required=True, help="density JSON file or name (0, 1, +, -, mixed)")
    s.add_argument("--channel", required=True, help="channel JSON file or name (id, X, Y[pi/2], dephase[t])")
    s.set_defaults(func=cmd_product)

    s = sub.add_parser("interfere", parents=[common], help="simulate two-arm interferometry")
    s.add_argument("--dynamics", nargs="+", help="dynamics JSON files (mixed by their weights)")
    s.add_argument("--state", help="initial state (alternative to --dynamics)")
    s.add_argument("--channel", help="channel (alternative to --dynamics)")
    s.add_argument("--V", default="I", help="intervention before the channel")
    s.add_argument("--W", default="I", help="intervention after the channel")
    s.add_argument("--probe", help="probe JSON (default: maximum visibility)")
    s.add_argument("--time-reversed", action="store_true", help="time-symmetric (FP) pathway")
    s.add_argument("--shots", type=int, default=0)
    s.add_argument("--sweep", action="store_true", help="sweep Weyl pairs, write CSV")
    s.set_defaults(func=cmd_interfere)

    s = sub.add_parser("sample", parents=[common], help="draw counts for an interference record")
    s.add_argument("--record", required=True)
    s.add_argument("--shots", type=int, required=True)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("tomo", parents=[common], help="reconstruct a QSOT from interference terms")
    s.add_argument("--oracle", required=True, help="self:FILE (exact) or noisy:FILE")
    s.add_argument("--dims", help="comma-separated region dims (default: from FILE)")
    s.add_argument("--shots", type=int, default=0)
    s.set_defaults(func=cmd_tomo)

    s = sub.add_parser("compass", parents=[common], help="recover the left product with a compass qubit")
    s.add_argument("--dynamics", nargs="+", required=True)
    s.add_argument("--against", nargs="+", help="second mixture to compare with")
    s.set_defaults(func=cmd_compass)

    s = sub.add_parser("procmat", parents=[common], help="process matrix of an ordered dynamics")
    s.add_argument("--dynamics", required=True)
    s.add_argument("--first-order", action="store_true", help="emit W1 = Tr_AB[SWAP W]")
    s.set_defaults(func=cmd_procmat)

    s = sub.add_parser("cam-check", parents=[common], help="causally agnostic measurement checks")
    s.add_argument("--mode", choices=["commutator", "controlled"], required=True)
    s.add_argument("--hxr")
    s.add_argument("--hyr")
    s.add_argument("--unitary")
    s.add_argument("--sectors", nargs="+")
    s.add_argument("--dims")
    s.set_defaults(func=cmd_cam_check)

    s = sub.add_parser("verify-examples", parents=[common], help="replay the worked examples")
    s.add_argument("--json", help="write a machine-readable report here")
    s.add_argument("--override-channel", action="append", metavar="NAME=FILE",
                   help="replace a named channel (e.g. Y=bad.json)")
    s.set_defaults(func=cmd_verify_examples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, io.FormatError, ValidationError, DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ComputationFault as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
