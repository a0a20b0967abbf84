"""Cycle-level timing of a program under in-order, bundle-granular issue."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import CqasmError
from .ir import Instruction, Op, Program


class DurationConfigError(CqasmError):
    kind = "config error"


@dataclass(frozen=True)
class DurationTable:
    """Mnemonic -> cycles. Missing entries take ``default`` (1 cycle)."""

    durations: Mapping[str, int] = field(default_factory=dict)
    default: int = 1

    def __post_init__(self):
        for name, cycles in self.durations.items():
            if not isinstance(cycles, int) or cycles < 1:
                raise DurationConfigError(f"duration of {name!r} must be an integer >= 1, got {cycles!r}")

    def duration(self, instr: Instruction) -> int:
        if instr.op is Op.WAIT:
            return instr.cycles
        name = instr.mnemonic
        if name in self.durations:
            return self.durations[name]
        # c-x falls back to x, measure to measure_z
        if instr.control_bits and instr.gate.value in self.durations:
            return self.durations[instr.gate.value]
        if name == "measure" and "measure_z" in self.durations:
            return self.durations["measure_z"]
        return self.default

    @classmethod
    def parse(cls, text: str) -> DurationTable:
        """Read ``mnemonic = cycles`` lines; ``#`` starts a comment."""
        table: dict[str, int] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            name, sep, value = line.partition("=")
            name = name.strip().lower()
            if not sep or not name:
                raise DurationConfigError("expected 'mnemonic = cycles'", lineno, 1)
            try:
                cycles = int(value.strip())
            except ValueError:
                raise DurationConfigError(f"invalid cycle count {value.strip()!r}", lineno, 1) from None
            if cycles < 1:
                raise DurationConfigError(f"duration of {name!r} must be >= 1", lineno, 1)
            table[name] = cycles
        return cls(table)

    @classmethod
    def load(cls, path: str | Path) -> DurationTable:
        return cls.parse(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ScheduledBundle:
    subcircuit: str
    iteration: int
    start_cycle: int
    duration: int
    qubits: tuple[int, ...]
    text: str


@dataclass(frozen=True)
class ScheduleReport:
    bundles: tuple[ScheduledBundle, ...]
    total_cycles: int

    @property
    def starts(self) -> list[int]:
        return [b.start_cycle for b in self.bundles]

    def to_json(self) -> dict[str, Any]:
        return {
            "total_cycles": self.total_cycles,
            "bundles": [
                {
                    "subcircuit": b.subcircuit,
                    "iteration": b.iteration,
                    "start": b.start_cycle,
                    "duration": b.duration,
                    "qubits": list(b.qubits),
                    "instructions": b.text,
                }
                for b in self.bundles
            ],
        }

    def to_text(self) -> str:
        rows = [f"{'start':>7}  {'dur':>4}  {'subcircuit':<16} instructions"]
        for b in self.bundles:
            label = b.subcircuit if b.iteration == 0 else f"{b.subcircuit}#{b.iteration}"
            rows.append(f"{b.start_cycle:>7}  {b.duration:>4}  {label:<16} {b.text}")
        rows.append(f"total cycles: {self.total_cycles}")
        return "\n".join(rows)


def schedule(program: Program, durations: DurationTable | None = None) -> ScheduleReport:
    """Each bundle starts when the previous one finishes; a bundle lasts as
    long as its slowest member."""
    durations = durations or DurationTable()
    n = program.qubit_count
    clock = 0
    out: list[ScheduledBundle] = []
    for sub, iteration, bundle in program.iter_bundles():
        length = max(durations.duration(i) for i in bundle.instructions)
        qubits = sorted({q for i in bundle.instructions for q in i.touched_qubits(n)})
        out.append(ScheduledBundle(sub.name, iteration, clock, length, tuple(qubits), bundle.to_text()))
        clock += length
    return ScheduleReport(tuple(out), clock)


def report_json(report: ScheduleReport) -> str:
    return json.dumps(report.to_json(), indent=2) + "\n"
