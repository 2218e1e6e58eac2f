"""Command-line interface and the JSON tensor file format.

Tensor files are single JSON documents::

    {"order": 2, "dim": 2, "name": "optional",
     "entries": [{"index": [1, 1], "value": 1.0}, {"index": [2, 2], "value": 1.0}]}

Indices are 1-based and any permutation of an index tuple names the same
symmetric entry; unlisted entries are zero. A matrix may instead be given
as ``{"matrix": [[...], ...]}``.

Exit codes: 0 copositive, 1 not copositive, 2 inconclusive, 3 input error,
4 solver failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .detect import DetectionReport, Verdict, detect_copositivity
from .instances import HYPERGRAPH_TABLE, NAMES, PARAMS, builtin_example
from .oracle import simplex_minimize
from .polyalg import SymmetricTensor, tensor_from_entries
from .relax import build_classic, build_tight
from .sdp import Status, solve

EXIT_COPOSITIVE = 0
EXIT_NOT_COPOSITIVE = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3
EXIT_SOLVER = 4

_VERDICT_EXIT = {
    Verdict.COPOSITIVE: EXIT_COPOSITIVE,
    Verdict.NOT_COPOSITIVE: EXIT_NOT_COPOSITIVE,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class TensorFileError(ValueError):
    """Malformed or inconsistent tensor file."""


# -- file format ------------------------------------------------------------


def parse_tensor_text(text: str, source: str = "<string>") -> SymmetricTensor:
    """Parse the JSON tensor format; errors name the offending field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorFileError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise TensorFileError(f"{source}: top level must be a JSON object")
    if "matrix" in doc:
        return _parse_matrix(doc, source)
    for key in ("order", "dim", "entries"):
        if key not in doc:
            raise TensorFileError(f"{source}: missing field {key!r}")
    order, dim = doc["order"], doc["dim"]
    for key, val in (("order", order), ("dim", dim)):
        if not isinstance(val, int) or isinstance(val, bool) or val < 1:
            raise TensorFileError(f"{source}: field {key!r} must be a positive integer, got {val!r}")
    if not isinstance(doc["entries"], list):
        raise TensorFileError(f"{source}: field 'entries' must be a list")
    entries = []
    for i, ent in enumerate(doc["entries"]):
        where = f"{source}: entries[{i}]"
        if not isinstance(ent, dict) or "index" not in ent or "value" not in ent:
            raise TensorFileError(f"{where}: expected an object with 'index' and 'value'")
        idx, val = ent["index"], ent["value"]
        if not isinstance(idx, list) or not all(isinstance(j, int) and not isinstance(j, bool) for j in idx):
            raise TensorFileError(f"{where}.index: expected a list of integers, got {idx!r}")
        if len(idx) != order:
            raise TensorFileError(f"{where}.index: expected {order} indices, got {len(idx)}")
        if not isinstance(val, (int, float)) or isinstance(val, bool) or not math.isfinite(val):
            raise TensorFileError(f"{where}.value: expected a finite number, got {val!r}")
        entries.append((tuple(idx), float(val)))
    try:
        return tensor_from_entries(order, dim, entries)
    except (ValueError, IndexError) as exc:
        raise TensorFileError(f"{source}: {exc}") from None


def _parse_matrix(doc: dict, source: str) -> SymmetricTensor:
    try:
        a = np.asarray(doc["matrix"], dtype=float)
    except (TypeError, ValueError):
        raise TensorFileError(f"{source}: field 'matrix' must be a rectangular array of numbers") from None
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise TensorFileError(f"{source}: field 'matrix' must be a nonempty square array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise TensorFileError(f"{source}: field 'matrix' has non-finite entries")
    if "order" in doc and doc["order"] != 2:
        raise TensorFileError(f"{source}: a 'matrix' document has order 2, got {doc['order']!r}")
    if "dim" in doc and doc["dim"] != a.shape[0]:
        raise TensorFileError(f"{source}: 'dim' {doc['dim']!r} disagrees with matrix size {a.shape[0]}")
    try:
        return SymmetricTensor.from_matrix(a)
    except ValueError as exc:
        raise TensorFileError(f"{source}: {exc}") from None


def parse_tensor_file(path) -> SymmetricTensor:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise TensorFileError(f"{path}: {exc.strerror or exc}") from None
    return parse_tensor_text(text, str(path))


def tensor_to_json(A: SymmetricTensor, name: str | None = None) -> dict:
    """Document for :func:`parse_tensor_text`, sorted indices, 1-based."""
    doc = {"order": A.order, "dim": A.dim}
    if name:
        doc["name"] = name
    doc["entries"] = [
        {"index": [i + 1 for i in idx], "value": float(v)} for idx, v in sorted(A.entries.items())
    ]
    return doc


def serialize_tensor(A: SymmetricTensor, name: str | None = None) -> str:
    return json.dumps(tensor_to_json(A, name), indent=1)


def write_tensor_file(A: SymmetricTensor, path, name: str | None = None) -> None:
    Path(path).write_text(serialize_tensor(A, name) + "\n")


# -- reporting --------------------------------------------------------------


def fmt(v: float, full: bool = False) -> str:
    """Four decimals, or one significant digit of scientific notation for small values."""
    if full:
        return repr(float(v))
    if v == 0 or abs(v) >= 1e-3:
        return f"{v:.4f}"
    return f"{v:.1e}"


def _report_text(rep: DetectionReport, full: bool) -> str:
    lines = ["k    v_k"]
    lines += [f"{k:<4d} {fmt(v, full)}" for k, v in rep.bounds]
    lines.append(f"verdict: {rep.verdict.value} (order {rep.order_reached}, seed {rep.seed})")
    if rep.refutation is not None:
        u = ", ".join(fmt(x, full) for x in rep.refutation.u)
        lines.append(f"refuting point u = ({u})")
        lines.append(f"A(u) = {fmt(rep.refutation.value, full)}")
    for d in rep.diagnostics:
        lines.append(f"note: {d}")
    return "\n".join(lines)


def _emit(payload: dict, text: str, fmt_: str, out) -> None:
    if fmt_ == "json":
        out.write(json.dumps(payload, indent=1) + "\n")
    else:
        out.write(text + "\n")


# -- argument handling ------------------------------------------------------


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise TensorFileError(f"parameter {item!r} is not of the form name=value")
        key, val = item.split("=", 1)
        try:
            vals = [float(v) for v in val.split(",")]
        except ValueError:
            raise TensorFileError(f"parameter {key!r}: cannot parse {val!r} as numbers") from None
        params[key.strip()] = vals if len(vals) > 1 else vals[0]
    return params


def load_tensor(source: str, params: dict | None = None) -> tuple:
    """Resolve a builtin name or a tensor file path; returns ``(tensor, label)``."""
    params = params or {}
    if source in NAMES:
        try:
            inst = builtin_example(source, **params)
        except (KeyError, ValueError) as exc:
            raise TensorFileError(str(exc)) from None
        return inst.tensor, source
    if params:
        raise TensorFileError("--param applies to builtin examples only")
    if not Path(source).exists():
        raise TensorFileError(f"{source!r} is neither a builtin example ({', '.join(NAMES)}) nor a file")
    return parse_tensor_file(source), source


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("tensor", help="builtin example name or path to a JSON tensor file")
    p.add_argument("--param", action="append", metavar="NAME=VALUE",
                   help="builtin parameter, e.g. rho=4.352 or psi=0.5,0.5,0.5,0.5,0.5")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--full-precision", action="store_true", help="print all digits")


def _add_detect_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--order-max", type=int, default=None, help="highest relaxation order (k_max)")
    p.add_argument("--tol-sign", type=float, default=1e-6)
    p.add_argument("--tol-refute", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coposdp", description="Copositivity of symmetric tensors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the full detection loop")
    _add_common(p)
    _add_detect_opts(p)

    for name, what in (("bound", "tight lower bound v_k"), ("classic", "classical bound nu_k")):
        p = sub.add_parser(name, help=f"{what} at one order")
        _add_common(p)
        p.add_argument("--order", "-k", type=int, required=True)

    p = sub.add_parser("minimize", help="grid and local search upper bound on min A over the simplex")
    _add_common(p)
    p.add_argument("--grid-depth", type=int, default=None)
    p.add_argument("--starts", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sweep", help="repeat check over values of one builtin parameter")
    _add_common(p)
    _add_detect_opts(p)
    p.add_argument("--sweep-param", default=None, help="parameter to vary (default: the builtin's scalar one)")
    p.add_argument("--values", default=None, help="comma-separated values (default: the reference table)")

    p = sub.add_parser("examples", help="list builtin examples")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


# -- commands ---------------------------------------------------------------


def _cmd_check(args, out) -> int:
    A, label = load_tensor(args.tensor, _parse_params(args.param))
    rep = detect_copositivity(A, k_max=args.order_max, tol_sign=args.tol_sign,
                              tol_refute=args.tol_refute, seed=args.seed)
    payload = {"tensor": label, **rep.to_dict()}
    _emit(payload, _report_text(rep, args.full_precision), args.format, out)
    return _VERDICT_EXIT[rep.verdict]


def _cmd_bound(args, out, classic: bool) -> int:
    A, label = load_tensor(args.tensor, _parse_params(args.param))
    builder = build_classic if classic else build_tight
    t0 = time.perf_counter()
    try:
        prog = builder(A, args.order)
    except ValueError as exc:
        raise TensorFileError(str(exc)) from None
    sol = solve(prog)
    elapsed = time.perf_counter() - t0
    value = prog.value(sol.y) if sol.y is not None else None
    name = "nu_k" if classic else "v_k"
    payload = {"tensor": label, "kind": prog.kind, "k": args.order, "value": value,
               "status": sol.status.value, "residuals": {k: float(v) for k, v in sol.residuals.items()},
               "iterations": sol.iterations, "seconds": elapsed}
    shown = "none" if value is None else fmt(value, args.full_precision)
    text = f"{name} at k={args.order}: {shown}  [{sol.status.value}, {sol.iterations} iterations, {elapsed:.2f}s]"
    _emit(payload, text, args.format, out)
    return 0 if sol.status is Status.OPTIMAL else EXIT_SOLVER


def _cmd_minimize(args, out) -> int:
    A, label = load_tensor(args.tensor, _parse_params(args.param))
    res = simplex_minimize(A, grid_depth=args.grid_depth, n_starts=args.starts, seed=args.seed)
    full = args.full_precision
    payload = {"tensor": label, "best_value": res.best_value, "best_point": res.best_point.tolist(),
               "kkt_residual": res.kkt_residual, "evaluations": res.evaluations}
    pt = ", ".join(fmt(x, full) for x in res.best_point)
    text = (f"min A over the simplex <= {fmt(res.best_value, full)} at ({pt})\n"
            f"kkt residual {res.kkt_residual:.1e}, {res.evaluations} evaluations")
    _emit(payload, text, args.format, out)
    return 0


def _sweep_values(args) -> tuple:
    if args.tensor not in NAMES:
        raise TensorFileError("sweep needs a builtin example")
    scalar = [p for p in PARAMS.get(args.tensor, {}) if p != "psi"]
    param = args.sweep_param or (scalar[0] if scalar else None)
    if param is None or param not in PARAMS.get(args.tensor, {}):
        raise TensorFileError(f"builtin {args.tensor!r} has no sweepable parameter {param!r}")
    if args.values:
        try:
            values = [float(v) for v in args.values.split(",")]
        except ValueError:
            raise TensorFileError(f"cannot parse --values {args.values!r}") from None
    elif args.tensor == "hypergraph-ex48" and param == "rho":
        values = sorted(HYPERGRAPH_TABLE)
    else:
        raise TensorFileError("--values is required for this builtin")
    return param, values


def _cmd_sweep(args, out) -> int:
    param, values = _sweep_values(args)
    base = _parse_params(args.param)
    rows, worst = [], EXIT_COPOSITIVE
    for val in sorted(values):
        A, _ = load_tensor(args.tensor, {**base, param: val})
        rep = detect_copositivity(A, k_max=args.order_max, tol_sign=args.tol_sign,
                                  tol_refute=args.tol_refute, seed=args.seed)
        rows.append((val, rep))
        if rep.verdict is Verdict.INCONCLUSIVE:
            worst = EXIT_INCONCLUSIVE
    full = args.full_precision
    payload = {"tensor": args.tensor, "param": param,
               "runs": [{param: v, **r.to_dict()} for v, r in rows]}
    lines = [f"{param:<8} {'k':<3} {'v_k':<12} verdict"]
    for v, r in rows:
        k, vk = r.bounds[-1] if r.bounds else (r.order_reached, math.nan)
        lines.append(f"{v:<8g} {k:<3d} {fmt(vk, full):<12} {r.verdict.value}")
    _emit(payload, "\n".join(lines), args.format, out)
    return worst


def _cmd_examples(args, out) -> int:
    items = []
    for name in NAMES:
        inst = builtin_example(name)
        items.append({"name": name, "order": inst.tensor.order, "dim": inst.tensor.dim,
                      "params": PARAMS.get(name, {}), "expected": inst.expected, "note": inst.note})
    lines = []
    for it in items:
        extra = "; ".join(f"{k}: {v}" for k, v in it["params"].items())
        lines.append(f"{it['name']:<16} order {it['order']} dim {it['dim']}" + (f"  [{extra}]" if extra else ""))
    _emit({"examples": items}, "\n".join(lines), args.format, out)
    return 0


def run(argv=None, out=None, err=None) -> int:
    """Parse ``argv``, run the command, and return the exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which would collide with Inconclusive
        return EXIT_INPUT if exc.code not in (0, None) else 0
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s", stream=err)
    try:
        if args.command == "check":
            return _cmd_check(args, out)
        if args.command in ("bound", "classic"):
            return _cmd_bound(args, out, classic=args.command == "classic")
        if args.command == "minimize":
            return _cmd_minimize(args, out)
        if args.command == "sweep":
            return _cmd_sweep(args, out)
        return _cmd_examples(args, out)
    except TensorFileError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (np.linalg.LinAlgError, FloatingPointError, MemoryError) as exc:
        err.write(f"solver failure: {exc}\n")
        return EXIT_SOLVER


def main() -> None:
    sys.exit(run())
