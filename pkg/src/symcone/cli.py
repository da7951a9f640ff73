"""Command-line front end: solve / verify / decompose / identify.

Documents are JSON with a ``"schema": 1`` marker.  Cone descriptors are
trees of ``{"family": "orthant"|"lorentz"|"sympsd"|"sum", "param": n,
"children": [...]}``; problems add weights, offset, a dense column list
for the subspace and the two anchor points; reports, solutions, tensors
and decompositions have their own documents (see the ``*_doc``
functions).  Matrices are row-major nested arrays throughout.

Results go to stdout (9 significant digits), diagnostics to stderr.
Exit codes: 0 success, 1 input error, 2 iteration limit, 3 numerical
failure.  The default seed is read from the SYMCONE_SEED variable.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

import numpy as np

from .algebra import Algebra, DirectSum, Element, Lorentz, Orthant, SymPSD
from .barrier import SelfScaledBarrier, VerificationReport, verify_self_scaled
from .decompose import (StructureTensor, identify_barrier_weights, scramble,
                        split_irreducible, structure_constants)
from .ipm import SolveStatus, Solution, build_problem, solve

__all__ = [
    "algebra_from_doc",
    "algebra_to_doc",
    "main",
    "parse_cone_spec",
    "problem_from_doc",
    "report_doc",
    "solution_doc",
]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ITERATION_LIMIT = 2
EXIT_NUMERICAL_FAILURE = 3


class InputError(ValueError):
    """A schema or semantic problem with user input."""


def _fmt(v: float) -> str:
    return f"{float(v):.9g}"


def _default_seed() -> int:
    try:
        return int(os.environ.get("SYMCONE_SEED", "0"))
    except ValueError:
        return 0


# ---------------------------------------------------------------------------
# cone descriptors


def algebra_to_doc(cone: Algebra) -> dict:
    if isinstance(cone, Orthant):
        return {"family": "orthant", "param": cone.n}
    if isinstance(cone, Lorentz):
        return {"family": "lorentz", "param": cone.n}
    if isinstance(cone, SymPSD):
        return {"family": "sympsd", "param": cone.k}
    if isinstance(cone, DirectSum):
        return {"family": "sum",
                "children": [algebra_to_doc(p) for p in cone.parts]}
    raise InputError(f"cone {cone!r} has no descriptor document")


def algebra_from_doc(doc) -> Algebra:
    if not isinstance(doc, dict) or "family" not in doc:
        raise InputError("cone: expected an object with a 'family' field")
    family = doc["family"]
    if family == "sum":
        children = doc.get("children")
        if not isinstance(children, list) or not children:
            raise InputError("cone: 'sum' needs a non-empty 'children' list")
        return DirectSum([algebra_from_doc(c) for c in children])
    param = doc.get("param")
    if not isinstance(param, int) or param < 1:
        raise InputError(f"cone: family '{family}' needs a positive integer "
                         f"'param'")
    if family == "orthant":
        return Orthant(param)
    if family == "lorentz":
        return Lorentz(param)
    if family == "sympsd":
        return SymPSD(param)
    raise InputError(f"cone: unknown family '{family}'")


_SPEC_TOKEN = re.compile(r"^\s*([a-z]+)\s*(?::\s*(\d+))?\s*$")


def parse_cone_spec(spec: str, dims: int | None = None) -> Algebra:
    """Parse 'orthant:2', 'sum(lorentz:3, orthant:2)' or nested sums."""
    spec = spec.strip()
    if spec.startswith("sum(") and spec.endswith(")"):
        inner_spec = spec[4:-1]
        parts, depth, start = [], 0, 0
        for i, ch in enumerate(inner_spec):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                parts.append(inner_spec[start:i])
                start = i + 1
        parts.append(inner_spec[start:])
        if any(not p.strip() for p in parts):
            raise InputError(f"cone spec '{spec}' has an empty summand")
        return DirectSum([parse_cone_spec(p) for p in parts])
    m = _SPEC_TOKEN.match(spec)
    if not m:
        raise InputError(f"cannot parse cone spec '{spec}'")
    family, param = m.group(1), m.group(2)
    if param is None:
        if dims is None:
            raise InputError(f"cone spec '{spec}' needs a dimension "
                             f"(use family:n or --dims)")
        param = dims
    doc = {"family": family, "param": int(param)}
    return algebra_from_doc(doc)


# ---------------------------------------------------------------------------
# documents


def _require(doc: dict, key: str, kind, what: str):
    if key not in doc:
        raise InputError(f"{what}: missing field '{key}'")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise InputError(f"{what}: field '{key}' has the wrong type")
    return value


def _vector(doc: dict, key: str, length: int, what: str) -> np.ndarray:
    raw = _require(doc, key, list, what)
    try:
        vec = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{what}: field '{key}' is not a numeric array")
    if vec.shape != (length,):
        raise InputError(f"{what}: field '{key}' must have length {length}")
    return vec


def _check_schema(doc: dict, what: str) -> None:
    if not isinstance(doc, dict):
        raise InputError(f"{what}: expected a JSON object")
    if doc.get("schema") != 1:
        raise InputError(f"{what}: field 'schema' must be 1")


def problem_from_doc(doc: dict):
    """Build (cone, barrier, problem) from a problem document."""
    _check_schema(doc, "problem")
    cone = algebra_from_doc(_require(doc, "cone", dict, "problem"))
    weights = _require(doc, "weights", list, "problem")
    offset = float(doc.get("offset", 0.0))
    try:
        barrier = SelfScaledBarrier(cone, weights, offset)
    except ValueError as exc:
        raise InputError(f"problem: weights: {exc}")
    raw_L = _require(doc, "L", list, "problem")
    cols = [np.asarray(c, dtype=float) for c in raw_L]
    for c in cols:
        if c.shape != (cone.dim,):
            raise InputError(f"problem: each L column must have length {cone.dim}")
    L = np.column_stack(cols) if cols else np.zeros((cone.dim, 0))
    x0 = Element(cone, _vector(doc, "x0", cone.dim, "problem"))
    s0 = Element(cone, _vector(doc, "s0", cone.dim, "problem"))
    try:
        problem = build_problem(cone, barrier, L, x0, s0)
    except ValueError as exc:
        raise InputError(f"problem: {exc}")
    return cone, barrier, problem


def problem_doc(cone, weights, offset, L, x0, s0) -> dict:
    return {
        "schema": 1,
        "cone": algebra_to_doc(cone),
        "weights": [float(w) for w in weights],
        "offset": float(offset),
        "L": [list(map(float, col)) for col in np.asarray(L, dtype=float).T],
        "x0": list(map(float, x0)),
        "s0": list(map(float, s0)),
    }


def solution_doc(sol: Solution) -> dict:
    return {
        "schema": 1,
        "status": sol.status.value,
        "objective": sol.objective,
        "gap": sol.gap,
        "iterations": sol.iterations,
        "res_primal": sol.res_primal,
        "res_dual": sol.res_dual,
        "x": list(map(float, sol.x.coords)),
        "s": list(map(float, sol.s.coords)),
    }


def report_doc(report: VerificationReport) -> dict:
    doc = {"schema": 1}
    doc.update(report.as_dict())
    return doc


def tensor_doc(T: StructureTensor) -> dict:
    return {"schema": 1, "dim": T.dim, "tensor": T.tensor.tolist()}


def decomposition_doc(result) -> dict:
    return {
        "schema": 1,
        "residual": result.residual,
        "blocks": [{
            "dim": b.dim,
            "rank": b.rank,
            "family": b.family,
            "basis": b.basis.T.tolist(),
        } for b in result.blocks],
    }


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read '{path}': {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, "
                         f"column {exc.colno}: {exc.msg}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args) -> int:
    doc = _load_json(args.problem)
    _, _, problem = problem_from_doc(doc)
    sol = solve(problem, gap_tol=args.gap_tol, max_iter=args.max_iter)
    if args.json:
        print(json.dumps(solution_doc(sol), indent=2))
    else:
        print(f"status {sol.status.value}")
        print(f"objective {_fmt(sol.objective)}")
        print(f"gap {_fmt(sol.gap)}")
        print(f"iterations {sol.iterations}")
    if sol.status is SolveStatus.OPTIMAL:
        return EXIT_OK
    if sol.status is SolveStatus.ITERATION_LIMIT:
        return EXIT_ITERATION_LIMIT
    return EXIT_NUMERICAL_FAILURE


def _parse_weights(text: str | None, default_count: int) -> list[float]:
    if text is None:
        return [1.0] * default_count
    try:
        return [float(tok) for tok in re.split(r"[,\s]+", text.strip()) if tok]
    except ValueError:
        raise InputError(f"cannot parse weights '{text}'")


def cmd_verify(args) -> int:
    cone = parse_cone_spec(args.family, args.dims)
    weights = _parse_weights(args.weights, len(cone.leaves()))
    try:
        barrier = SelfScaledBarrier(cone, weights)
    except ValueError as exc:
        raise InputError(str(exc))
    report = verify_self_scaled(barrier, trials=args.trials, seed=args.seed,
                                tol=args.tol)
    if args.json:
        print(json.dumps(report_doc(report), indent=2))
    else:
        print(f"cone {cone!r}  weights {list(barrier.weights)}  "
              f"nu {_fmt(barrier.nu)}")
        print(report.format_table())
    return EXIT_OK if report.overall_pass else EXIT_INPUT


def _tensor_from_arg(arg: str, dims: int | None) -> StructureTensor:
    if os.path.exists(arg):
        doc = _load_json(arg)
        _check_schema(doc, "tensor")
        if "tensor" in doc:
            raw = np.asarray(_require(doc, "tensor", list, "tensor"),
                             dtype=float)
            try:
                return StructureTensor(tensor=raw)
            except ValueError as exc:
                raise InputError(f"tensor: {exc}")
        if "cone" in doc:
            cone = algebra_from_doc(doc["cone"])
            return structure_constants(cone)
        raise InputError("tensor: document needs a 'tensor' or 'cone' field")
    return structure_constants(parse_cone_spec(arg, dims))


def cmd_decompose(args) -> int:
    T = _tensor_from_arg(args.input, args.dims)
    if args.scramble_seed is not None:
        T = scramble(T, seed=args.scramble_seed)
    try:
        result = split_irreducible(T, seed=args.seed)
    except (ValueError, RuntimeError) as exc:
        raise InputError(str(exc))
    if args.json:
        print(json.dumps(decomposition_doc(result), indent=2))
    else:
        print("dim  rank  family")
        for b in result.blocks:
            print(f"{b.dim:>3}  {b.rank:>4}  {b.family}")
        print(f"residual {_fmt(result.residual)}")
    return EXIT_OK


def _declared_blocks(cone: Algebra, barrier: SelfScaledBarrier):
    """(dim, rank, weight) of each irreducible block, in leaf order."""
    out = []
    pos = 0
    for leaf, _ in cone.leaves():
        if isinstance(leaf, Orthant):
            for _ in range(leaf.dim):
                out.append((1, 1, barrier.weights[pos]))
                pos += 1
        else:
            out.append((leaf.dim, leaf.rank, barrier.weights[pos]))
            pos += 1
    return out


def cmd_identify(args) -> int:
    doc = _load_json(args.input)
    _check_schema(doc, "identify")
    cone = algebra_from_doc(_require(doc, "cone", dict, "identify"))
    weights = _require(doc, "weights", list, "identify")
    offset = float(doc.get("offset", 0.0))
    try:
        barrier = SelfScaledBarrier(cone, weights, offset)
    except ValueError as exc:
        raise InputError(f"identify: weights: {exc}")
    T = structure_constants(cone)
    seed = doc.get("scramble_seed", args.scramble_seed)
    if seed is not None:
        T = scramble(T, seed=int(seed))
    try:
        result = split_irreducible(T, seed=args.seed)
    except (ValueError, RuntimeError) as exc:
        raise InputError(str(exc))
    oracle = lambda c: barrier.value(T.source_element(c))
    c0_hat, w_hat = identify_barrier_weights(oracle, result, T)
    declared = sorted(_declared_blocks(cone, barrier))
    recovered = sorted((b.dim, b.rank, w)
                       for b, w in zip(result.blocks, w_hat))
    ok = (len(declared) == len(recovered)
          and abs(c0_hat - barrier.offset) <= 1e-5
          and all(d[:2] == r[:2] and abs(d[2] - r[2]) <= 1e-5
                  for d, r in zip(declared, recovered)))
    if args.json:
        print(json.dumps({
            "schema": 1,
            "match": bool(ok),
            "offset": {"declared": barrier.offset, "recovered": c0_hat},
            "blocks": [{"dim": r[0], "rank": r[1],
                        "declared_weight": d[2], "recovered_weight": r[2]}
                       for d, r in zip(declared, recovered)],
        }, indent=2))
    else:
        print("dim  rank  declared    recovered")
        for d, r in zip(declared, recovered):
            print(f"{r[0]:>3}  {r[1]:>4}  {_fmt(d[2]):>9}  {_fmt(r[2]):>12}")
        print(f"offset declared {_fmt(barrier.offset)}  "
              f"recovered {_fmt(c0_hat)}")
        print("match" if ok else "MISMATCH")
    return EXIT_OK if ok else EXIT_INPUT


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symcone",
        description="Symmetric-cone toolkit: conic solves, barrier identity "
                    "verification, cone decomposition and weight recovery.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a conic problem file")
    p.add_argument("problem", help="path to a problem JSON document")
    p.add_argument("--gap-tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--json", action="store_true",
                   help="emit the solution document instead of text")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="verify the self-scaled identities")
    p.add_argument("--family", required=True,
                   help="cone spec: e.g. 'sympsd', 'orthant:5', "
                        "'sum(lorentz:3, orthant:2)'")
    p.add_argument("--dims", type=int, default=None,
                   help="dimension for a bare family name")
    p.add_argument("--weights", default=None,
                   help="comma-separated block weights (default all 1)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose",
                       help="split a cone or structure tensor into "
                            "irreducible blocks")
    p.add_argument("input",
                   help="tensor/cone JSON file, or a cone spec string")
    p.add_argument("--dims", type=int, default=None)
    p.add_argument("--scramble-seed", type=int, default=None,
                   help="scramble the basis before decomposing")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("identify",
                       help="recover barrier weights from a cone file with "
                            "embedded weights")
    p.add_argument("input", help="JSON file with cone, weights and offset")
    p.add_argument("--scramble-seed", type=int, default=None)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_identify)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
