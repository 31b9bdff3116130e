"""Command-line front end.

    qentangle measure  --state bell:phi+ --measure negativity
    qentangle check    --state ghz:3 --all-cuts
    qentangle distill  --grid 0:1:0.1 --iterations 3 --out yield.csv --verify
    qentangle schmidt  --state partial:0.5235987755982988
    qentangle dump     --state w --out w.json

Subsystems are numbered from 1 on the command line. Exit codes: 0 ok,
2 parse error, 3 precondition violation, 4 optimizer did not converge.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from pathlib import Path
from typing import Union

import numpy as np

from . import mixed, pure, separable
from .errors import EntanglementError, UnknownName
from .protocols import distill_step, simulate_distill_step, total_yield
from .states import DensityOperator, PureState, as_density, min_pt_eigenvalue, normalize_cut, standard_state

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_NO_CONVERGENCE = 0, 2, 3, 4
LOAD_TOL = 1e-8

MEASURES = (
    "entropy",
    "entropy-of-entanglement",
    "schmidt",
    "concurrence",
    "eof",
    "negativity",
    "log-negativity",
    "relative-entropy-of-entanglement",
    "bures",
    "trace-distance-to-separable",
)

_OPTIMIZED = {
    "relative-entropy-of-entanglement": "relative-entropy",
    "bures": "bures",
    "trace-distance-to-separable": "trace",
}


class ParseError(Exception):
    pass


State = Union[PureState, DensityOperator]


def builtin_state(spec: str) -> State:
    """Resolve ``bell:phi+``, ``ghz:3``, ``w``, ``wreduced``, ``maxmixed:2``,
    ``partial:0.3``, ``phid:3`` or ``sepexample``."""
    name, _, arg = spec.partition(":")
    name = name.lower()
    try:
        if name == "bell":
            return standard_state(arg)
        if name in ("ghz", "maxmixed", "phid"):
            key = "phi_d" if name == "phid" else name
            return standard_state(key, int(arg)) if arg else standard_state(key)
        if name == "partial":
            return standard_state("partial", float(arg))
        if name in ("w", "wreduced", "sepexample") and not arg:
            return standard_state(name)
    except (UnknownName, ValueError) as exc:
        raise ParseError(f"bad built-in state {spec!r}: {exc}") from None
    raise ParseError(f"unknown built-in state {spec!r}")


def _complex(pair) -> complex:
    if not (isinstance(pair, list) and len(pair) == 2):
        raise ParseError(f"expected a [re, im] pair, got {pair!r}")
    re, im = pair
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
        raise ParseError(f"non-numeric entry {pair!r}")
    return complex(re, im)


def state_from_document(doc) -> State:
    """Build a state from the parsed state-file document.

    Raises ParseError for structural problems; invariant violations surface as
    EntanglementError subclasses.
    """
    if not isinstance(doc, dict):
        raise ParseError("state file must hold an object")
    try:
        dims = [int(d) for d in doc["dims"]]
        kind = doc["kind"]
        data = doc["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"state file needs dims, kind and data ({exc})") from None
    n = math.prod(dims) if dims else 0
    if kind == "pure":
        if not isinstance(data, list) or len(data) != n:
            raise ParseError(f"pure data must list {n} amplitudes")
        amps = np.array([_complex(x) for x in data])
        norm = np.linalg.norm(amps)
        if abs(norm * norm - 1) > LOAD_TOL:
            return PureState(tuple(dims), amps)  # raises with the invariant's message
        return PureState(tuple(dims), amps / norm)
    if kind == "mixed":
        if not isinstance(data, list) or len(data) != n or any(
            not isinstance(row, list) or len(row) != n for row in data
        ):
            raise ParseError(f"mixed data must be {n} rows of {n} entries")
        m = np.array([[_complex(x) for x in row] for row in data])
        return DensityOperator.from_matrix(m, dims, tol=LOAD_TOL)
    raise ParseError(f"kind must be 'pure' or 'mixed', got {kind!r}")


def state_to_document(state: State) -> dict:
    def pair(z):
        return [float(z.real), float(z.imag)]

    if isinstance(state, PureState):
        return {"dims": list(state.dims), "kind": "pure", "data": [pair(z) for z in state.amplitudes]}
    return {
        "dims": list(state.dims),
        "kind": "mixed",
        "data": [[pair(z) for z in row] for row in state.matrix],
    }


def load_state(spec: str) -> State:
    path = Path(spec)
    if path.exists():
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read state file {spec}: {exc}") from None
        return state_from_document(doc)
    if spec.startswith("builtin:"):
        spec = spec[len("builtin:"):]
    return builtin_state(spec)


def parse_cut(spec: str, state: State) -> tuple[int, ...]:
    try:
        idx = tuple(int(tok) - 1 for tok in spec.split(","))
    except ValueError:
        raise ParseError(f"bad cut {spec!r}; expected comma-separated subsystem numbers") from None
    side_a, _ = normalize_cut(state.dims, idx)
    return side_a


def _number(x: float):
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return float(x)


def emit(record: dict) -> None:
    sys.stdout.write(json.dumps(record, indent=2, sort_keys=True) + "\n")


def _one_based(cut) -> list[int]:
    return [i + 1 for i in cut]


def cmd_measure(args) -> int:
    state = load_state(args.state)
    _maybe_dump(args, state)
    cut = parse_cut(args.cut, state)
    name = args.measure
    diagnostics = {"converged": True, "iterations": 0, "seed": args.seed}
    if name == "entropy":
        value = pure.von_neumann_entropy(state)
    elif name in ("entropy-of-entanglement", "schmidt"):
        if not isinstance(state, PureState):
            raise EntanglementError(f"{name} needs a pure state (invariant: kind == pure)")
        if name == "schmidt":
            value = pure.schmidt_number(state, cut)
        else:
            value = pure.entropy_of_entanglement(state, cut)
    elif name == "concurrence":
        value = mixed.concurrence(state)
    elif name == "eof":
        value = mixed.eof_two_qubit(state)
    elif name == "negativity":
        value = mixed.negativity(state, cut)
    elif name == "log-negativity":
        value = mixed.log_negativity(state, cut)
    else:
        opts = separable.OptimizerOptions(seed=args.seed, tol=args.tol, restarts=args.restarts)
        res = separable.distance_to_separable(state, cut, _OPTIMIZED[name], opts)
        value = res.value
        diagnostics = {
            "converged": res.converged,
            "iterations": res.iterations,
            "seed": args.seed,
            "achieved_tolerance": res.achieved_tolerance,
        }
    emit(
        {
            "command": "measure",
            "measure": name,
            "value": _number(value),
            "cut": _one_based(cut),
            "tolerance": args.tol,
            "diagnostics": diagnostics,
        }
    )
    return EXIT_OK if diagnostics["converged"] else EXIT_NO_CONVERGENCE


def _all_cuts(n: int):
    rest = range(1, n)
    for r in range(0, n - 1):
        for extra in itertools.combinations(rest, r):
            yield (0,) + extra


def _verdict(ppt: bool, d_a: int, d_b: int) -> str:
    if not ppt:
        return "entangled"
    if sorted((d_a, d_b)) in ([2, 2], [2, 3]):
        return "separable"
    return "PPT (separability undecided)"


def cmd_check(args) -> int:
    state = load_state(args.state)
    _maybe_dump(args, state)
    cuts = list(_all_cuts(len(state.dims))) if args.all_cuts else [parse_cut(args.cut, state)]
    rows = []
    for cut in cuts:
        side_a, side_b = normalize_cut(state.dims, cut)
        d_a = math.prod(state.dims[i] for i in side_a)
        d_b = math.prod(state.dims[i] for i in side_b)
        lo = min_pt_eigenvalue(state, side_a)
        ppt = lo >= -1e-9
        rows.append(
            {
                "cut": _one_based(side_a),
                "complement": _one_based(side_b),
                "dims": [d_a, d_b],
                "ppt": ppt,
                "min_pt_eigenvalue": lo,
                "verdict": _verdict(ppt, d_a, d_b),
            }
        )
    emit({"command": "check", "dims": list(state.dims), "cuts": rows})
    return EXIT_OK


def parse_grid(spec: str) -> list[float]:
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise EntanglementError(f"bad grid {spec!r}; expected start:stop:step") from None
    if step <= 0 or stop < start or not (0 <= start <= 1 and 0 <= stop <= 1):
        raise EntanglementError(f"bad grid {spec!r}; need 0 <= start <= stop <= 1 and step > 0")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _g12(x: float) -> str:
    return f"{x:.12g}"


def cmd_distill(args) -> int:
    if args.grid:
        grid = parse_grid(args.grid)
    elif args.p is not None:
        grid = [args.p]
    else:
        raise EntanglementError("distill needs --p or --grid")
    if args.iterations < 1:
        raise EntanglementError("--iterations must be >= 1")
    tol = args.tol if args.tol is not None else 1e-14
    header = ["p"] + [f"yield_k{k}" for k in range(1, args.iterations + 1)] + ["yield_converged"]
    lines = [",".join(header)]
    worst = 0.0
    for p in grid:
        curve = total_yield(p, args.iterations, tol=tol)
        lines.append(",".join(_g12(v) for v in (p, *curve.yields, curve.converged)))
        if args.verify:
            worst = max(worst, _step_deviation(p))
    text = "\n".join(lines) + "\n"
    verified = worst <= 1e-9
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        record = {"command": "distill", "out": args.out, "rows": len(grid)}
        if args.verify:
            record.update({"verified": verified, "max_deviation": worst})
        emit(record)
    else:
        sys.stdout.write(text)
        if args.verify:
            sys.stderr.write(json.dumps({"verified": verified, "max_deviation": worst}) + "\n")
    if args.verify and not verified:
        return EXIT_PRECONDITION
    return EXIT_OK


def _step_deviation(p: float) -> float:
    a, b = distill_step(p), simulate_distill_step(p)
    dev = max(abs(a.p_success - b.p_success), abs(a.p_00 - b.p_00))
    if b.retry_state is not None:
        dev = max(dev, abs(a.p_next - b.p_next))
        dev = max(dev, float(np.max(np.abs(a.retry_state.matrix - b.retry_state.matrix))))
    if b.success_state is not None:
        dev = max(dev, float(np.max(np.abs(a.success_state.matrix - b.success_state.matrix))))
    return dev


def cmd_schmidt(args) -> int:
    state = load_state(args.state)
    _maybe_dump(args, state)
    if not isinstance(state, PureState):
        raise EntanglementError("schmidt needs a pure state (invariant: kind == pure)")
    cut = parse_cut(args.cut, state)
    dec = pure.schmidt_decompose(state, cut)
    emit(
        {
            "command": "schmidt",
            "cut": _one_based(cut),
            "coefficients": [float(c) for c in dec.coefficients],
            "schmidt_number": dec.rank,
            "entropy_of_entanglement": pure.entropy_of_entanglement(state, cut),
        }
    )
    return EXIT_OK


def _maybe_dump(args, state: State) -> None:
    target = getattr(args, "dump", None)
    if target:
        Path(target).write_text(json.dumps(state_to_document(state)) + "\n", encoding="utf-8")


def cmd_dump(args) -> int:
    state = load_state(args.state)
    text = json.dumps(state_to_document(state)) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qentangle", description="Entanglement measures and LOCC protocols.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def state_args(p, cut=True):
        p.add_argument("--state", required=True, help="state file or built-in name, e.g. bell:phi+")
        if cut:
            p.add_argument("--cut", default="1", help="side-A subsystems, e.g. 1 or 1,3")
            p.add_argument("--dump", metavar="PATH", help="also write the parsed state to PATH")

    p = sub.add_parser("measure", help="evaluate one entanglement measure")
    state_args(p)
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--restarts", type=int, default=8)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("check", help="PPT test across one or all bipartitions")
    state_args(p)
    p.add_argument("--all-cuts", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("distill", help="yield curve of the recurrence distillation protocol")
    p.add_argument("--p", type=float)
    p.add_argument("--grid", help="start:stop:step, inclusive")
    p.add_argument("--iterations", type=int, default=3)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("schmidt", help="Schmidt coefficients of a pure state")
    state_args(p)
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("dump", help="write a state as a state file")
    state_args(p, cut=False)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dump)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except EntanglementError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
