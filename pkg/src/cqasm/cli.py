"""``cqasm`` command-line driver.

Exit status: 0 on success, 1 on lex/parse/semantic errors, 2 on I/O errors.
Display events go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from .errors import CqasmError
from .ir import Program, analyze, emit_ir
from .runtime import run
from .scheduler import DurationConfigError, DurationTable, report_json, schedule
from .syntax import parse, tokenize

@dataclass
class CliConfig:
    command: str
    input: str
    seed: int = 0
    shots: int = 1
    format: str = "text"
    durations: str | None = None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not -(1 << 63) <= value < (1 << 64):
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cqasm", description="cQASM v1.0 toolchain")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("run", "simulate a program and print display events"),
        ("check", "parse and validate a program"),
        ("schedule", "print bundle start cycles and total duration"),
        ("emit-ir", "print the canonical program IR as JSON"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="cQASM source file (.qc)")
        if name == "run":
            p.add_argument("--seed", type=_seed, default=None,
                           help="RNG seed (default: $CQASM_SEED or 0)")
            p.add_argument("--shots", type=_positive, default=1)
        if name in ("run", "schedule"):
            p.add_argument("--format", choices=("text", "json"), default="text")
        if name == "schedule":
            p.add_argument("--durations", default=None,
                           help="file of 'mnemonic = cycles' lines")
    return parser


def parse_args(argv: Sequence[str] | None) -> CliConfig:
    ns = build_parser().parse_args(argv)
    seed = getattr(ns, "seed", None)
    if seed is None:
        env = os.environ.get("CQASM_SEED")
        seed = _seed(env) if env else 0
    return CliConfig(
        command=ns.command,
        input=ns.input,
        seed=seed,
        shots=getattr(ns, "shots", 1),
        format=getattr(ns, "format", "text"),
        durations=getattr(ns, "durations", None),
    )


def _load(path: str) -> Program:
    with open(path, encoding="utf-8") as fh:
        source = fh.read()
    return analyze(parse(tokenize(source)))


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = parse_args(argv)
    except ValueError as exc:
        print(f"cqasm: error: {exc}", file=sys.stderr)
        return 2
    try:
        program = _load(config.input)
        if config.command == "check":
            n_bundles = sum(len(s.body) for s in program.subcircuits)
            print(f"{config.input}: ok ({program.qubit_count} qubits, {n_bundles} bundles)")
        elif config.command == "emit-ir":
            sys.stdout.write(emit_ir(program))
        elif config.command == "schedule":
            table = DurationTable.load(config.durations) if config.durations else DurationTable()
            report = schedule(program, table)
            if config.format == "json":
                sys.stdout.write(report_json(report))
            else:
                print(report.to_text())
        else:
            record = run(program, seed=config.seed, shots=config.shots)
            if config.format == "json":
                print(json.dumps(record.to_json()))
            else:
                for event in record.events:
                    print(event.to_text())
    except CqasmError as exc:
        where = config.durations if isinstance(exc, DurationConfigError) else config.input
        print(exc.format(where), file=sys.stderr)
        return 1
    except (OSError, UnicodeDecodeError) as exc:
        print(f"cqasm: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
