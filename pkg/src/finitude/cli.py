"""Command-line front end: parse, rewrite, classify, and verify formulas.

Exit codes: 0 success (including conjecture-relevant anomalies), 1 usage or
parse error, 2 unconditional refutation or selftest failure, 3 resource cap
exceeded (branch or sieve limits).

JSON reports are deterministic byte-for-byte across runs and worker counts;
wall-clock timing is added only with --timings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import normalize as normalize_mod
from . import report as report_mod
from . import selftest as selftest_mod
from . import verify as verify_mod
from .decide import Classification, decide_exists_basic
from .formula import ParseError, parse_formula, parse_mixed, render
from .normalize import BranchCapExceeded
from .randomness import Instance, get_oracle
from .verify import MemoryCapExceeded

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REFUTED = 2
EXIT_RESOURCE = 3


def _default_workers() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class CommandConfig:
    command: str
    predicate: str = "squarefree"
    formula: str | None = None
    bounds: tuple[int, ...] = (100_000,)
    seed: int = 0
    density: float = 0.5
    workers: int = field(default_factory=_default_workers)
    output: str = "text"
    report_dir: str | None = None
    timings: bool = False
    branch_cap: int = normalize_mod.DEFAULT_BRANCH_CAP
    max_sieve: int = verify_mod.DEFAULT_MAX_SIEVE
    solutions_cap: int = verify_mod.SOLUTION_CAP
    samples: int = 100
    quick: bool = False
    criteria: tuple[int, ...] | None = None


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="finitude",
        description=(
            "Decide whether systems of (negated) predicate constraints on "
            "linear integer terms have empty, finite, or infinite solution "
            "sets, and verify the verdicts against sieves."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, formula=False, oracle=False, scan=False, cap=False):
        if formula:
            p.add_argument("--formula", required=True, help="formula source text")
        if oracle:
            p.add_argument(
                "--predicate",
                choices=("primes", "squarefree", "generic"),
                default="squarefree",
            )
            p.add_argument("--seed", type=int, default=0, help="generic-oracle seed")
            p.add_argument(
                "--density", type=float, default=0.5, help="generic-oracle density"
            )
        if scan:
            p.add_argument(
                "--bounds", type=int, nargs="+", default=[100_000],
                help="window bounds, strictly increasing",
            )
            p.add_argument("--workers", type=int, default=_default_workers())
            p.add_argument("--max-sieve", type=int, default=verify_mod.DEFAULT_MAX_SIEVE)
            p.add_argument(
                "--solutions-cap", type=int, default=verify_mod.SOLUTION_CAP,
                help="maximum solutions listed in reports",
            )
            p.add_argument(
                "--report-dir",
                help="directory for CSV and figure output alongside the report",
            )
        if cap:
            p.add_argument(
                "--branch-cap", type=int, default=normalize_mod.DEFAULT_BRANCH_CAP
            )
        p.add_argument("--output", choices=("text", "json"), default="text")
        p.add_argument(
            "--timings", action="store_true", help="include elapsed_ms in JSON output"
        )

    p = sub.add_parser("normalize", help="rewrite a formula into plain-P branches")
    add_common(p, formula=True, cap=True)

    p = sub.add_parser("decide", help="classify: Inconsistent, Finite, or Infinite")
    add_common(p, formula=True, oracle=True, cap=True)

    p = sub.add_parser("chi", help="show the boundary and residue clauses")
    add_common(p, formula=True, oracle=True)

    p = sub.add_parser("verify", help="classify, then audit against sieve scans")
    add_common(p, formula=True, oracle=True, scan=True, cap=True)

    p = sub.add_parser("axioms", help="spot-check the oracle contract")
    add_common(p, oracle=True, scan=True)
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("mixed", help="count solutions of a Pr/SF conjunction")
    add_common(p, formula=True, scan=True)

    p = sub.add_parser("selftest", help="run the bundled acceptance suite")
    p.add_argument("--quick", action="store_true", help="reduced scales")
    p.add_argument(
        "--criteria", type=int, nargs="+", help="run only these criteria (1-9)"
    )
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.add_argument("--timings", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> CommandConfig:
    kwargs = {"command": args.command}
    mapping = {
        "predicate": "predicate",
        "formula": "formula",
        "seed": "seed",
        "density": "density",
        "workers": "workers",
        "output": "output",
        "report_dir": "report_dir",
        "timings": "timings",
        "branch_cap": "branch_cap",
        "max_sieve": "max_sieve",
        "solutions_cap": "solutions_cap",
        "samples": "samples",
        "quick": "quick",
    }
    for attr, key in mapping.items():
        if hasattr(args, attr):
            kwargs[key] = getattr(args, attr)
    if hasattr(args, "bounds"):
        kwargs["bounds"] = tuple(args.bounds)
    if getattr(args, "criteria", None):
        kwargs["criteria"] = tuple(args.criteria)
    return CommandConfig(**kwargs)


# --- payload builders --------------------------------------------------------


def _classification_payload(c: Classification) -> dict:
    payload = {
        "verdict": c.verdict,
        "solutions": list(c.solutions) if c.solutions is not None else None,
        "witness_k": c.witness_k,
        "conditionality": c.conditionality,
    }
    if c.compatible is not None:
        payload["compatible"] = c.compatible
    return payload


def _parse_for_decide(text: str):
    try:
        return parse_formula(text)
    except ParseError:
        try:
            parse_mixed(text)
        except ParseError:
            raise
        raise ValueError(
            "mixed prime/square-free formulas cannot be classified; "
            "use the 'mixed' command to count them"
        ) from None


def _run_normalize(config: CommandConfig) -> tuple[dict, int]:
    f = parse_formula(config.formula)
    branches = normalize_mod.normalize_basic(f, branch_cap=config.branch_cap)
    payload = {
        "command": "normalize",
        "formula": render(f),
        "branch_count": len(branches),
        "branches": [
            {
                "witness": {
                    "modulus": br.witness_class.modulus,
                    "residue": br.witness_class.residue,
                },
                "subst": str(br.subst_term),
                "psi": render(br.psi),
                "trace": {
                    "unified_coeff": br.trace.unified_coeff,
                    "combined_coeff": br.trace.combined_coeff,
                    "combined_modulus": br.trace.combined_modulus,
                    "shared_divisor": br.trace.shared_divisor,
                    "reduced_coeff": br.trace.reduced_coeff,
                    "reduced_modulus": br.trace.reduced_modulus,
                    "inverse_unit": br.trace.inverse_unit,
                    "shift_constant": br.trace.shift_constant,
                    "index_span": br.trace.index_span,
                    "residue_choice": br.trace.residue_choice,
                    "divided_constants": list(br.trace.divided_constants),
                },
            }
            for br in branches
        ],
    }
    return payload, EXIT_OK


def _run_decide(config: CommandConfig) -> tuple[dict, int]:
    f = _parse_for_decide(config.formula)
    oracle = get_oracle(config.predicate, config.seed, config.density)
    cls = decide_exists_basic(f, oracle, branch_cap=config.branch_cap)
    payload = {
        "command": "decide",
        "formula": render(f),
        "oracle": oracle.name,
        **_classification_payload(cls),
        "branches": cls.branch_count if cls.branch_count is not None else 1,
        "chi": list(cls.branch_chi) if cls.branch_chi is not None else None,
    }
    return payload, EXIT_OK


def _run_chi(config: CommandConfig) -> tuple[dict, int]:
    f = parse_formula(config.formula)
    primary = f.as_primary()
    if any(t.coeff == 0 for t in primary.positive + primary.negative):
        raise ValueError("constant terms carry no residue information; drop them")
    inst = Instance.from_primary(primary)
    oracle = get_oracle(config.predicate, config.seed, config.density)
    condition = oracle.build_chi(inst)
    holds = oracle.chi_holds(inst)
    constants = tuple(t.const for t in inst.positive)
    payload = {
        "command": "chi",
        "formula": render(primary),
        "oracle": oracle.name,
        "boundary": list(condition.boundary),
        "clauses": [c.render_at(constants) for c in condition.clauses],
        "chi": holds,
        "witness_k": None if holds else oracle.positive_failing_modulus(inst),
    }
    return payload, EXIT_OK


def _run_verify(config: CommandConfig) -> tuple[dict, int]:
    f = _parse_for_decide(config.formula)
    oracle = get_oracle(config.predicate, config.seed, config.density)
    rep = verify_mod.audit(
        f,
        oracle,
        list(config.bounds),
        workers=config.workers,
        cap=config.solutions_cap,
        branch_cap=config.branch_cap,
        max_sieve=config.max_sieve,
    )
    payload = {
        "command": "verify",
        "formula": rep.formula,
        "oracle": rep.oracle,
        "verdict": _classification_payload(rep.verdict),
        "counts": [[b, c] for b, c in rep.counts],
        "solutions": list(rep.window_solutions),
        "status": rep.status,
    }
    if config.timings:
        payload["elapsed_ms"] = round(rep.elapsed_ms, 3)
    code = EXIT_REFUTED if rep.status == verify_mod.REFUTED else EXIT_OK
    return payload, code


def _run_axioms(config: CommandConfig) -> tuple[dict, int]:
    oracle = get_oracle(config.predicate, config.seed, config.density)
    rep = verify_mod.check_axioms(
        oracle,
        config.samples,
        max(config.bounds),
        config.seed,
        workers=config.workers,
        max_sieve=config.max_sieve,
    )
    payload = {
        "command": "axioms",
        "oracle": rep.oracle,
        "samples": rep.samples,
        "bound": rep.bound,
        "seed": rep.seed,
        "window_hit": {"checked": rep.hit_checked, "passed": rep.hit_passed},
        "residue_sweep": {"checked": rep.sweep_checked, "passed": rep.sweep_passed},
        "trapped_set": {"checked": rep.trap_checked, "passed": rep.trap_passed},
        "anomalies": list(rep.hit_anomalies),
        "failures": list(rep.failures),
        "status": rep.status,
    }
    if config.timings:
        payload["elapsed_ms"] = round(rep.elapsed_ms, 3)
    code = EXIT_REFUTED if rep.status == "fail" else EXIT_OK
    return payload, code


def _run_mixed(config: CommandConfig) -> tuple[dict, int]:
    mixed = parse_mixed(config.formula)
    counts = []
    solutions: list[int] = []
    for b in config.bounds:
        cnt, sols = verify_mod.count_solutions(
            mixed,
            None,
            b,
            workers=config.workers,
            cap=config.solutions_cap,
            max_sieve=config.max_sieve,
        )
        counts.append([b, cnt])
        solutions = sols
    payload = {
        "command": "mixed",
        "formula": render(mixed),
        "counts": counts,
        "solutions": solutions,
    }
    return payload, EXIT_OK


_RUNNERS = {
    "normalize": _run_normalize,
    "decide": _run_decide,
    "chi": _run_chi,
    "verify": _run_verify,
    "axioms": _run_axioms,
    "mixed": _run_mixed,
}


def execute_payload(config: CommandConfig) -> tuple[dict, int]:
    """Run a non-selftest command and return (payload, exit_code)."""
    return _RUNNERS[config.command](config)


# --- text rendering ----------------------------------------------------------


def _format_text(payload: dict) -> str:
    lines: list[str] = []
    command = payload["command"]
    if command == "normalize":
        lines.append(f"formula: {payload['formula']}")
        lines.append(f"branches: {payload['branch_count']}")
        for i, br in enumerate(payload["branches"], 1):
            witness = f"x = {br['witness']['residue']} mod {br['witness']['modulus']}"
            psi = br["psi"] or "true"
            lines.append(f"[{i}] when {witness}: t(x) = {br['subst']}, psi = {psi}")
            t = br["trace"]
            lines.append(
                "    trace: m={unified_coeff} l={combined_coeff} n={combined_modulus} "
                "d={shared_divisor} l'={reduced_coeff} n'={reduced_modulus} "
                "u={inverse_unit} shift={shift_constant} N={index_span} "
                "m0={residue_choice} divided={divided_constants}".format(**t)
            )
    elif command == "decide":
        for key in ("formula", "oracle", "verdict"):
            lines.append(f"{key}: {payload[key]}")
        if payload["verdict"] == "Finite":
            lines.append(f"solutions: {payload['solutions']}")
            lines.append(f"witness_k: {payload['witness_k']}")
        if payload["verdict"] == "Infinite":
            lines.append(f"conditionality: {payload['conditionality']}")
        lines.append(f"branches: {payload['branches']}")
        if payload["chi"] is not None:
            lines.append(f"chi per branch: {payload['chi']}")
    elif command == "chi":
        for key in ("formula", "oracle", "boundary"):
            lines.append(f"{key}: {payload[key]}")
        for clause in payload["clauses"]:
            lines.append(f"  clause: {clause}")
        lines.append(f"chi: {payload['chi']}")
        if payload["witness_k"] is not None:
            lines.append(f"witness_k: {payload['witness_k']}")
    elif command == "verify":
        lines.append(f"formula: {payload['formula']}")
        lines.append(f"oracle: {payload['oracle']}")
        verdict = payload["verdict"]
        tail = ""
        if verdict["verdict"] == "Infinite":
            tail = f" ({verdict['conditionality']})"
        if verdict["verdict"] == "Finite":
            tail = f" {verdict['solutions']}"
        lines.append(f"verdict: {verdict['verdict']}{tail}")
        lines.append(
            "counts: " + ", ".join(f"{b} -> {c}" for b, c in payload["counts"])
        )
        sols = payload["solutions"]
        shown = ", ".join(map(str, sols[:20]))
        more = f" ... ({len(sols)} listed)" if len(sols) > 20 else ""
        lines.append(f"solutions: [{shown}]{more}")
        lines.append(f"status: {payload['status']}")
        if "elapsed_ms" in payload:
            lines.append(f"elapsed_ms: {payload['elapsed_ms']}")
    elif command == "axioms":
        lines.append(f"oracle: {payload['oracle']}")
        lines.append(
            f"samples: {payload['samples']}  bound: {payload['bound']}  "
            f"seed: {payload['seed']}"
        )
        for key in ("window_hit", "residue_sweep", "trapped_set"):
            ck = payload[key]
            lines.append(f"{key}: {ck['passed']}/{ck['checked']} passed")
        for note in payload["anomalies"]:
            lines.append(f"  anomaly: {note}")
        for failure in payload["failures"]:
            lines.append(f"  FAILURE: {failure}")
        lines.append(f"status: {payload['status']}")
        if "elapsed_ms" in payload:
            lines.append(f"elapsed_ms: {payload['elapsed_ms']}")
    elif command == "mixed":
        lines.append(f"formula: {payload['formula']}")
        lines.append(
            "counts: " + ", ".join(f"{b} -> {c}" for b, c in payload["counts"])
        )
        sols = payload["solutions"]
        shown = ", ".join(map(str, sols[:20]))
        more = f" ... ({len(sols)} listed)" if len(sols) > 20 else ""
        lines.append(f"solutions: [{shown}]{more}")
    return "\n".join(lines)


def _write_reports(config: CommandConfig, payload: dict) -> None:
    out = config.report_dir
    command = payload["command"]
    if command in ("verify", "mixed"):
        rows = [(b, c) for b, c in payload["counts"]]
        report_mod.write_counts_csv(os.path.join(out, f"{command}_counts.csv"), rows)
        report_mod.plot_count_growth(
            os.path.join(out, f"{command}_growth.png"),
            rows,
            f"{payload['formula']}",
        )
    elif command == "axioms":

        class _Summary:
            oracle = payload["oracle"]
            hit_checked = payload["window_hit"]["checked"]
            hit_passed = payload["window_hit"]["passed"]
            sweep_checked = payload["residue_sweep"]["checked"]
            sweep_passed = payload["residue_sweep"]["passed"]
            trap_checked = payload["trapped_set"]["checked"]
            trap_passed = payload["trapped_set"]["passed"]

        report_mod.write_axioms_csv(os.path.join(out, "axioms_summary.csv"), _Summary)
        report_mod.plot_axioms_summary(os.path.join(out, "axioms_summary.png"), _Summary)


def run(config: CommandConfig) -> int:
    """Execute one command; reports go to stdout, errors to stderr."""
    if config.command == "selftest":
        results = selftest_mod.run_selftest(
            list(config.criteria) if config.criteria else None,
            quick=config.quick,
            workers=config.workers,
            stream=sys.stdout,
        )
        if config.output == "json":
            payload = {
                "command": "selftest",
                "criteria": [
                    {
                        "index": r.index,
                        "title": r.title,
                        "passed": r.passed,
                        "detail": r.detail,
                        "anomalies": list(r.anomalies),
                    }
                    for r in results
                ],
                "passed": all(r.passed for r in results),
            }
            print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK if all(r.passed for r in results) else EXIT_REFUTED

    try:
        payload, code = execute_payload(config)
    except ParseError as exc:
        print(f"finitude: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BranchCapExceeded, MemoryCapExceeded) as exc:
        print(f"finitude: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"finitude: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if config.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(_format_text(payload))
    if config.report_dir:
        _write_reports(config, payload)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
