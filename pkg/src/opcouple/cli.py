"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a mathematical check fails or
the relation does not hold, 2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .bsop import BsopInstance, bsop_to_json, check_banprops, solve_bsop
from .decomp import decompose, verify_decomposition
from .eae import KernelCokernelIso, WitnessParams, build_eae_witness, check_special_form, eae_test, verify_eae, verify_eae_condition
from .errors import DimensionMismatch, MatrixFormatError, NotEae, NotSquare
from .fuzz import FuzzConfig, run_fuzz
from .ratmat import DEFAULT_ENTRY_BOUND, RatMatrix, corank, nullity, rank
from .sc import EaeSplit, ScWitness, sc_checks, sc_construct, seae_params, seae_test

SCHEMA = "opcouple/1"
ENTRY_BOUND_ENV = "OPCOUPLE_ENTRY_BOUND"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class Check:
    name: str
    passed: bool
    witness: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "pass": self.passed, "witness": self.witness}


@dataclass
class Report:
    command: str
    inputs: str
    checks: list[Check] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, ok: bool, witness: str | None = None) -> None:
        self.checks.append(Check(name, bool(ok), None if witness is None else f"#/witnesses/{witness}"))

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": {"sha256": self.inputs},
            "pass": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "info": self.info,
            "witnesses": self.witnesses,
            "elapsed_seconds": round(self.elapsed, 6),
        }

    def render(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}"]
        for key, value in self.info.items():
            lines.append(f"  {key}: {json.dumps(value)}")
        for c in self.checks:
            lines.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}")
        return "\n".join(lines)


def digest(payload: bytes | Any) -> str:
    if not isinstance(payload, bytes):
        payload = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()


def load_matrix(path: str) -> tuple[RatMatrix, bytes]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return RatMatrix.from_json(json.loads(raw)), raw
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None
    except MatrixFormatError as exc:
        raise UsageError(f"{path}: malformed matrix: {exc}") from None


def load_json(path: str) -> tuple[Any, bytes]:
    try:
        raw = Path(path).read_bytes()
        return json.loads(raw), raw
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None


def resolve_entry_bound(flag: int | None) -> int:
    """Flag, then environment, then the library default."""
    if flag is not None:
        value = flag
    elif os.environ.get(ENTRY_BOUND_ENV):
        try:
            value = int(os.environ[ENTRY_BOUND_ENV])
        except ValueError:
            raise UsageError(f"{ENTRY_BOUND_ENV} must be an integer, got {os.environ[ENTRY_BOUND_ENV]!r}") from None
    else:
        value = DEFAULT_ENTRY_BOUND
    if value < 1:
        raise UsageError("entry bound must be at least 1")
    return value


def write_out(path: str | None, payload: Any) -> None:
    if path is None:
        return
    try:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


# -- subcommands ----------------------------------------------------------------


def cmd_decompose(args: argparse.Namespace) -> Report:
    U, raw = load_matrix(args.u)
    d = decompose(U)
    rep = Report("decompose", digest(raw))
    rep.info.update(shape=list(U.shape), rank=d.rank, kernel_dim=d.kernel_dim, cokernel_dim=d.cokernel_dim)
    rep.witnesses["decomposition"] = d.to_json()
    rep.check("decomposition_verified", verify_decomposition(U, d), "decomposition")
    write_out(args.out, d.to_json())
    return rep


def _pair(args: argparse.Namespace, command: str) -> tuple[RatMatrix, RatMatrix, Report]:
    U, raw_u = load_matrix(args.u)
    V, raw_v = load_matrix(args.v)
    rep = Report(command, digest(raw_u + b"\0" + raw_v))
    rep.info.update(
        u_shape=list(U.shape),
        v_shape=list(V.shape),
        kernel_dims=[nullity(U), nullity(V)],
        cokernel_dims=[corank(U), corank(V)],
    )
    return U, V, rep


def cmd_eae_check(args: argparse.Namespace) -> Report:
    U, V, rep = _pair(args, "eae-check")
    rep.check("kernel_dims_match", nullity(U) == nullity(V))
    rep.check("cokernel_dims_match", corank(U) == corank(V))
    return rep


def cmd_eae_witness(args: argparse.Namespace) -> Report:
    U, V, rep = _pair(args, "eae-witness")
    if eae_test(U, V) is None:
        rep.check("eae_test", False)
        return rep
    rep.check("eae_test", True)
    du, dv = decompose(U), decompose(V)
    if args.strong:
        if not (U.is_square and V.is_square):
            raise UsageError("--strong needs square operators")
        params, iso = seae_params(U, V)
    elif args.random_params:
        bound = resolve_entry_bound(args.entry_bound)
        rng = random.Random(args.seed)
        iso = KernelCokernelIso.random(rng, du.kernel_dim, du.cokernel_dim, bound)
        params = WitnessParams.random(rng, du, dv, bound)
    else:
        params, iso = None, None
    w = build_eae_witness(U, V, iso, params)
    rep.witnesses["witness"] = w.to_json()
    rep.check("verify_eae", verify_eae(U, V, w.e, w.f), "witness")
    rep.check("special_form", check_special_form(w.e, w.f, U, V), "witness")
    rep.check("eae_condition", verify_eae_condition(U, V, w.e, w.f, du, dv), "witness")
    rep.check("f_inverse_closed_form", (w.f @ w.f_inv_claimed).is_identity(), "witness")
    strong = seae_test(w.e, w.f, EaeSplit.of(U, V))
    if args.strong:
        rep.check("seae", strong, "witness")
    else:
        rep.info["seae"] = strong
    write_out(args.out, w.to_json())
    return rep


def cmd_sc_build(args: argparse.Namespace) -> Report:
    U, V, rep = _pair(args, "sc-build")
    if not (U.is_square and V.is_square):
        raise UsageError("Schur coupling needs square operators")
    try:
        m = sc_construct(U, V)
    except NotEae as exc:
        rep.info["reason"] = str(exc)
        rep.check("eae_test", False)
        return rep
    rep.check("eae_test", True)
    rep.witnesses["coupling"] = m.to_json()
    if args.check:
        for name, ok in sc_checks(U, V, m).items():
            rep.check(name, ok, "coupling")
        params, iso = seae_params(U, V)
        w = build_eae_witness(U, V, iso, params)
        rep.witnesses["strong_witness"] = w.to_json()
        rep.check("seae_witness", verify_eae(U, V, w.e, w.f) and seae_test(w.e, w.f, EaeSplit.of(U, V)), "strong_witness")
    write_out(args.out, m.to_json())
    return rep


def cmd_sc_verify(args: argparse.Namespace) -> Report:
    U, raw_u = load_matrix(args.u)
    V, raw_v = load_matrix(args.v)
    obj, raw_m = load_json(args.m)
    try:
        m = ScWitness.from_json(obj)
    except (KeyError, TypeError, MatrixFormatError) as exc:
        raise UsageError(f"{args.m}: malformed coupling: {exc}") from None
    rep = Report("sc-verify", digest(raw_u + b"\0" + raw_v + b"\0" + raw_m))
    try:
        checks = sc_checks(U, V, m)
    except DimensionMismatch as exc:
        raise UsageError(str(exc)) from None
    rep.witnesses["coupling"] = m.to_json()
    for name, ok in checks.items():
        rep.check(name, ok, "coupling")
    return rep


def cmd_bsop(args: argparse.Namespace) -> Report:
    v, w, z1, z2 = args.dims
    try:
        inst = BsopInstance(v, w, z1, z2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = Report("bsop", digest(inst.to_json()))
    rep.check("banprops", check_banprops(inst))
    if not rep.passed:
        rep.info["reason"] = "no invertible T exists: dim Z1 != dim Z2"
        rep.witnesses["problem"] = bsop_to_json(inst, None)
        return rep
    sol = solve_bsop(inst)
    rep.witnesses["problem"] = bsop_to_json(inst, sol)
    rep.info["rank_t"] = rank(sol.t)
    rep.check("t_invertible", sol.verify(), "problem")
    write_out(args.out, bsop_to_json(inst, sol))
    return rep


def cmd_fuzz(args: argparse.Namespace) -> Report:
    try:
        cfg = FuzzConfig(args.seed, args.trials, args.max_dim, resolve_entry_bound(args.entry_bound))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    config = {"seed": cfg.seed, "trials": cfg.trials, "max_dim": cfg.max_dim, "entry_bound": cfg.entry_bound}
    rep = Report("fuzz", digest(config))
    results = run_fuzz(cfg, args.workers)
    failed = 0
    for r in results:
        key = f"trial-{r['trial']:04d}"
        if r["pass"]:
            rep.checks.append(Check(key, True, f"seed:{r['seed']}"))
        else:
            failed += 1
            rep.witnesses[key] = {"checks": r["checks"], "instances": r["failed"]}
            rep.check(key, False, key)
    rep.info.update(config=config, passed=len(results) - failed, failed=failed)
    return rep


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print the JSON report")

    parser = argparse.ArgumentParser(prog="opcouple", description="Exact EAE / Schur coupling toolkit.")
    parser.add_argument("--json", action="store_true", default=False, help="print the JSON report")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("decompose", parents=[common], help="split a matrix as diag(core, 0)")
    p.add_argument("u", metavar="U.json")
    p.add_argument("--out", help="write the decomposition to this file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("eae-check", parents=[common], help="compare kernel and cokernel dimensions")
    p.add_argument("u", metavar="U.json")
    p.add_argument("v", metavar="V.json")
    p.set_defaults(func=cmd_eae_check)

    p = sub.add_parser("eae-witness", parents=[common], help="build and verify an EAE witness")
    p.add_argument("u", metavar="U.json")
    p.add_argument("v", metavar="V.json")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--random-params", action="store_true", help="draw the free parameters at random")
    mode.add_argument("--strong", action="store_true", help="choose parameters giving a strong witness")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--entry-bound", type=int, default=None)
    p.add_argument("--out", help="write the witness to this file")
    p.set_defaults(func=cmd_eae_witness)

    p = sub.add_parser("sc-build", parents=[common], help="construct a Schur coupling")
    p.add_argument("u", metavar="U.json")
    p.add_argument("v", metavar="V.json")
    p.add_argument("--check", action="store_true", help="verify every identity of the coupling")
    p.add_argument("--out", help="write the coupling to this file")
    p.set_defaults(func=cmd_sc_build)

    p = sub.add_parser("sc-verify", parents=[common], help="verify a Schur coupling")
    p.add_argument("u", metavar="U.json")
    p.add_argument("v", metavar="V.json")
    p.add_argument("m", metavar="M.json", help="coupling blocks {a, b, c, d}")
    p.set_defaults(func=cmd_sc_verify)

    p = sub.add_parser("bsop", parents=[common], help="solve the block-operator problem for given dimensions")
    p.add_argument("--dims", type=int, nargs=4, required=True, metavar=("V", "W", "Z1", "Z2"))
    p.add_argument("--out", help="write {dims, solution} to this file")
    p.set_defaults(func=cmd_bsop)

    p = sub.add_parser("fuzz", parents=[common], help="run the seeded property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-dim", type=int, default=6)
    p.add_argument("--entry-bound", type=int, default=None)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    p.set_defaults(func=cmd_fuzz)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        rep = args.func(args)
    except UsageError as exc:
        print(f"opcouple: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotSquare as exc:
        print(f"opcouple: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep.elapsed = time.perf_counter() - start
    if args.json:
        print(json.dumps(rep.to_json(), indent=2, sort_keys=True))
    else:
        print(rep.render())
    return EXIT_OK if rep.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())
