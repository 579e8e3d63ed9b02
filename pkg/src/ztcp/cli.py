"""Command-line front end.

Subcommands: classify, solve, sparsest, verify, rho, permz, gen.
Exit codes: 0 success/converged, 1 usage or parse errors, 2 structural
preconditions not applicable, 3 non-convergence (or generation failure).
Diagnostics go to stderr; structured output (text or JSON lines) to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .classify import (
    classify_tensor,
    find_z_permutation,
    is_partially_z_tensor,
    m_split,
    spectral_radius,
)
from .errors import GenerationError, NotApplicableError, ParseError, ZtcpError
from .io import (
    generate_instance,
    parse_tensor,
    parse_vector,
    serialize_tensor,
    serialize_vector,
)
from .solvers import (
    Scheme,
    SolveStatus,
    SolverConfig,
    TcpInstance,
    check_system_equivalence,
    solve_multilinear,
    tcp_residual,
)
from .sparsity import sparsest_solve
from .tensor import apply

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_APPLICABLE = 2
EXIT_NO_CONVERGENCE = 3

_SCHEMES = {"jacobi": Scheme.JACOBI, "gauss-seidel": Scheme.GAUSS_SEIDEL}


@dataclass
class RunConfig:
    """Documented defaults shared by the solving subcommands."""

    tol: float = 1e-10
    max_iter: int = 100_000
    scheme: str = "jacobi"
    zero_threshold: float = 1e-8
    divergence_bound: float = 1e12
    rng_seed: int = 0

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            tol=self.tol,
            max_iter=self.max_iter,
            scheme=_SCHEMES[self.scheme],
            divergence_bound=self.divergence_bound,
        )


_DEFAULTS = RunConfig()


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _jsonable(value):
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _text_value(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, np.ndarray):
        return " ".join(repr(float(v)) for v in value)
    if isinstance(value, (list, tuple)):
        return " ".join(_text_value(v) for v in value) if len(value) else "(empty)"
    return str(value)


def _emit(record: dict, mode: str):
    if mode == "json-lines":
        print(json.dumps(_jsonable(record), separators=(",", ":")))
    else:
        for key, value in record.items():
            print(f"{key}: {_text_value(value)}")


def _load_tensor(path: str):
    with open(path, "r", encoding="ascii") as handle:
        return parse_tensor(handle.read())


def _load_vector(path: str):
    with open(path, "r", encoding="ascii") as handle:
        return parse_vector(handle.read())


def _status_exit(status: SolveStatus, detail: str) -> int:
    if status is SolveStatus.CONVERGED:
        return EXIT_OK
    if status is SolveStatus.NOT_APPLICABLE:
        print(f"not applicable: {detail}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    print(f"did not converge: {detail or status.value}", file=sys.stderr)
    return EXIT_NO_CONVERGENCE


def _permutation_rows(P) -> list[int] | None:
    if P is None:
        return None
    return [int(np.argmax(P[i]) + 1) for i in range(P.shape[0])]


def _cmd_classify(args) -> int:
    A = _load_tensor(args.tensor)
    cls = classify_tensor(A, tol=args.tol, max_iter=args.max_iter)
    bracket = cls.spectral_radius_bracket
    record = {
        "command": "classify",
        "is_z": cls.is_z,
        "is_partially_z": cls.is_partially_z,
        "m_split_s": cls.m_split[0] if cls.m_split else None,
        "spectral_lo": bracket.lo if bracket else None,
        "spectral_hi": bracket.hi if bracket else None,
        "spectral_iterations": bracket.iterations if bracket else None,
        "spectral_converged": bracket.converged if bracket else None,
        "is_strong_m": "undetermined" if cls.is_strong_m is None else cls.is_strong_m,
        "z_permutation": _permutation_rows(cls.z_permutation),
    }
    _emit(record, args.output)
    return EXIT_OK


def _solve_record(command: str, report, scheme: str) -> dict:
    return {
        "command": command,
        "status": report.status.value,
        "scheme": scheme,
        "x": report.x,
        "residual_inf": report.residual_inf,
        "iterations": report.iterations,
        "monotone": report.monotone,
        "detail": report.detail,
    }


def _cmd_solve(args) -> int:
    inst = TcpInstance(_load_tensor(args.tensor), _load_vector(args.rhs))
    cfg = _run_config(args)
    report = solve_multilinear(inst, cfg.solver_config())
    _emit(_solve_record("solve", report, cfg.scheme), args.output)
    return _status_exit(report.status, report.detail)


def _cmd_sparsest(args) -> int:
    inst = TcpInstance(_load_tensor(args.tensor), _load_vector(args.rhs))
    cfg = _run_config(args)
    result = sparsest_solve(
        inst, cfg.solver_config(), zero_threshold=cfg.zero_threshold, run_oracle=args.oracle
    )
    record = {
        "command": "sparsest",
        "status": result.report.status.value,
        "x_star": result.x_star,
        "support": [i + 1 for i in result.support],
        "l0": result.l0,
        "objective": result.objective,
        "relaxation_valid": result.relaxation_valid,
        "residual_inf": result.report.residual_inf,
        "iterations": result.report.iterations,
        "monotone": result.report.monotone,
        "detail": result.report.detail,
    }
    if args.oracle:
        if result.oracle is None:
            record["oracle_min_support_size"] = None
            record["oracle_match"] = False
            oracle_line = "NONE"
        else:
            record["oracle_min_support_size"] = result.oracle.min_support_size
            record["oracle_witness"] = result.oracle.witness
            record["oracle_enumerated_supports"] = result.oracle.enumerated_supports
            match = result.oracle.min_support_size == result.l0
            record["oracle_match"] = match
            oracle_line = (
                f"MATCH (l0={result.l0})"
                if match
                else f"MISMATCH (l0={result.l0}, oracle={result.oracle.min_support_size})"
            )
    _emit(record, args.output)
    if args.oracle and args.output == "text":
        print(f"oracle: {oracle_line}")
    return _status_exit(result.report.status, result.report.detail)


def _cmd_verify(args) -> int:
    A = _load_tensor(args.tensor)
    b = _load_vector(args.rhs)
    x = _load_vector(args.solution)
    inst = TcpInstance(A, b)
    primal, dual, gap = tcp_residual(inst, x)
    ok = max(primal, dual, gap) <= args.tol
    record = {
        "command": "verify",
        "primal_violation": primal,
        "dual_violation": dual,
        "complementarity_gap": gap,
        "tcp_ok": ok,
    }
    equivalence_ok = None
    if is_partially_z_tensor(A) and np.all(b >= 0):
        record["equation_residual"] = float(np.max(np.abs(apply(A, x) - b)))
        equivalence_ok = check_system_equivalence(inst, x, args.tol)
        record["equivalence_ok"] = equivalence_ok
    else:
        record["equation_residual"] = None
        record["equivalence_ok"] = None
    _emit(record, args.output)
    if ok and equivalence_ok is not False:
        return EXIT_OK
    print("solution failed verification", file=sys.stderr)
    return EXIT_NO_CONVERGENCE


def _cmd_rho(args) -> int:
    A = _load_tensor(args.tensor)
    if A.nnz and np.any(A.values < 0):
        print("not applicable: tensor has negative entries", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    bracket = spectral_radius(A, tol=args.tol, max_iter=args.max_iter)
    record = {
        "command": "rho",
        "lo": bracket.lo,
        "hi": bracket.hi,
        "iterations": bracket.iterations,
        "converged": bracket.converged,
    }
    _emit(record, args.output)
    if bracket.converged:
        return EXIT_OK
    print("bracket did not close; bounds remain valid", file=sys.stderr)
    return EXIT_NO_CONVERGENCE


def _cmd_permz(args) -> int:
    A = _load_tensor(args.tensor)
    P = find_z_permutation(A)
    record = {
        "command": "permz",
        "found": P is not None,
        "permutation": _permutation_rows(P),
    }
    _emit(record, args.output)
    if P is None:
        print("not applicable: no permutation makes the tensor a Z-tensor", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    return EXIT_OK


def _cmd_gen(args) -> int:
    inst = generate_instance(
        args.n, args.m, args.density, args.margin, args.seed, redraw_budget=args.redraw_budget
    )
    tensor_path = args.out_prefix + ".tsr"
    rhs_path = args.out_prefix + ".vec"
    with open(tensor_path, "w", encoding="ascii", newline="\n") as handle:
        handle.write(serialize_tensor(inst.tensor))
    with open(rhs_path, "w", encoding="ascii", newline="\n") as handle:
        handle.write(serialize_vector(inst.rhs))
    s, _ = m_split(inst.tensor)
    record = {
        "command": "gen",
        "tensor_path": tensor_path,
        "rhs_path": rhs_path,
        "n": args.n,
        "m": args.m,
        "density": args.density,
        "margin": args.margin,
        "seed": args.seed,
        "nnz": inst.tensor.nnz,
        "m_split_s": s,
    }
    _emit(record, args.output)
    return EXIT_OK


def _run_config(args) -> RunConfig:
    return RunConfig(
        tol=args.tol,
        max_iter=args.max_iter,
        scheme=getattr(args, "scheme", _DEFAULTS.scheme),
        zero_threshold=getattr(args, "zero_threshold", _DEFAULTS.zero_threshold),
        divergence_bound=getattr(args, "divergence_bound", _DEFAULTS.divergence_bound),
        rng_seed=getattr(args, "seed", _DEFAULTS.rng_seed),
    )


def _add_common(parser):
    parser.add_argument(
        "--output", choices=("text", "json-lines"), default="text", help="output format"
    )
    parser.add_argument(
        "--threads", type=int, default=1,
        help="upper bound on internal parallelism (the implementation is serial)",
    )


def _add_solver_flags(parser, tol_default):
    parser.add_argument("--tol", type=float, default=tol_default, help="residual tolerance")
    parser.add_argument("--max-iter", type=int, default=_DEFAULTS.max_iter, dest="max_iter")
    parser.add_argument("--scheme", choices=tuple(_SCHEMES), default=_DEFAULTS.scheme)
    parser.add_argument(
        "--zero-threshold", type=float, default=_DEFAULTS.zero_threshold, dest="zero_threshold"
    )
    parser.add_argument(
        "--divergence-bound", type=float, default=_DEFAULTS.divergence_bound,
        dest="divergence_bound",
    )
    parser.add_argument("--seed", type=int, default=_DEFAULTS.rng_seed)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ztcp", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("classify", help="structural classification of a tensor")
    p.add_argument("tensor")
    p.add_argument("--tol", type=float, default=_DEFAULTS.tol)
    p.add_argument("--max-iter", type=int, default=10_000, dest="max_iter")
    _add_common(p)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("solve", help="least nonnegative solution of A x^{m-1} = b")
    p.add_argument("tensor")
    p.add_argument("rhs")
    _add_solver_flags(p, _DEFAULTS.tol)
    _add_common(p)
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("sparsest", help="sparsest complementarity solution via the least element")
    p.add_argument("tensor")
    p.add_argument("rhs")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against brute-force support enumeration")
    _add_solver_flags(p, _DEFAULTS.tol)
    _add_common(p)
    p.set_defaults(handler=_cmd_sparsest)

    p = sub.add_parser("verify", help="check a solution against the complementarity conditions")
    p.add_argument("tensor")
    p.add_argument("rhs")
    p.add_argument("solution")
    p.add_argument("--tol", type=float, default=1e-8)
    _add_common(p)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("rho", help="spectral-radius bracket of a nonnegative tensor")
    p.add_argument("tensor")
    p.add_argument("--tol", type=float, default=_DEFAULTS.tol)
    p.add_argument("--max-iter", type=int, default=10_000, dest="max_iter")
    _add_common(p)
    p.set_defaults(handler=_cmd_rho)

    p = sub.add_parser("permz", help="permutation certificate for the permuted-Z class")
    p.add_argument("tensor")
    _add_common(p)
    p.set_defaults(handler=_cmd_permz)

    p = sub.add_parser("gen", help="generate a random strong-M instance")
    p.add_argument("-n", type=int, required=True, help="dimension")
    p.add_argument("-m", type=int, required=True, help="order")
    p.add_argument("--density", type=float, default=0.3, help="off-diagonal density of B")
    p.add_argument("--margin", type=float, default=0.5, help="relative spectral margin of s")
    p.add_argument("--seed", type=int, default=_DEFAULTS.rng_seed)
    p.add_argument("--redraw-budget", type=int, default=500, dest="redraw_budget")
    p.add_argument("--out-prefix", required=True, dest="out_prefix")
    _add_common(p)
    p.set_defaults(handler=_cmd_gen)

    return parser


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.threads < 1:
        print("usage error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotApplicableError as exc:
        print(f"not applicable: {exc}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    except GenerationError as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (OSError, ValueError, ZtcpError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
