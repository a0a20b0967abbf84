"""Program execution: loops, bundles, classical feedback, averaging and display."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .ir import Instruction, Op, Program
from .statevector import StateVector, gate_matrix

_SEED_MASK = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator; any 64-bit integer (signed or not) is accepted."""
    return np.random.default_rng(seed & _SEED_MASK)


@dataclass
class AveragingCounter:
    count_plus: int = 0
    count_minus: int = 0
    latest: int | None = None

    def record(self, bit: int) -> None:
        if bit:
            self.count_minus += 1
        else:
            self.count_plus += 1
        self.latest = bit

    def reset(self) -> None:
        self.count_plus = 0
        self.count_minus = 0

    @property
    def total(self) -> int:
        return self.count_plus + self.count_minus

    @property
    def average(self) -> float | None:
        """Fraction of +1 (ground-state) outcomes, None before any measurement."""
        if not self.total:
            return None
        return self.count_plus / self.total


@dataclass
class ClassicalState:
    bits: list[int]
    averaging: list[AveragingCounter]

    @classmethod
    def fresh(cls, n: int) -> ClassicalState:
        return cls([0] * n, [AveragingCounter() for _ in range(n)])

    def store(self, qubit: int, bit: int) -> None:
        self.bits[qubit] = bit
        self.averaging[qubit].record(bit)


@dataclass(frozen=True)
class DisplayEvent:
    type: str  # "bit" or "state"
    shot: int
    bit: int | None = None
    latest: int | None = None
    average: float | None = None
    count_plus: int | None = None
    count_minus: int | None = None
    amplitudes: tuple[complex, ...] | None = None
    bits: tuple[int, ...] | None = None

    @property
    def measurements(self) -> int | None:
        if self.count_plus is None:
            return None
        return self.count_plus + self.count_minus

    def to_json(self) -> dict[str, Any]:
        if self.type == "bit":
            return {
                "type": "bit",
                "shot": self.shot,
                "bit": self.bit,
                "latest": self.latest,
                "average": self.average,
                "measurements": self.measurements,
                "count_plus": self.count_plus,
                "count_minus": self.count_minus,
            }
        return {
            "type": "state",
            "shot": self.shot,
            "amplitudes": [[a.real, a.imag] for a in self.amplitudes],
            "bits": list(self.bits),
        }

    def to_text(self) -> str:
        if self.type == "bit":
            avg = "n/a" if self.average is None else f"{self.average:.6f}"
            latest = "-" if self.latest is None else str(self.latest)
            return (f"b[{self.bit}]  latest={latest}  average={avg}  "
                    f"measurements={self.measurements}  (+1: {self.count_plus}, -1: {self.count_minus})")
        return format_state(self.amplitudes, self.bits)


def format_state(amplitudes, bits) -> str:
    """One line per non-zero basis state, qubit N-1 printed first."""
    n = len(bits)
    lines = ["state:"]
    for index, a in enumerate(amplitudes):
        prob = abs(a) ** 2
        if prob < 1e-24:
            continue
        label = format(index, f"0{n}b")
        lines.append(f"  |{label}⟩  {a.real:+.8f}  {a.imag:+.8f}  {prob:.8f}")
    lines.append("  bits: " + "".join(str(b) for b in reversed(bits)))
    return "\n".join(lines)


def display(target: int | None, qstate: StateVector, cstate: ClassicalState, shot: int = 0) -> DisplayEvent:
    if target is None:
        return DisplayEvent("state", shot, amplitudes=tuple(complex(a) for a in qstate.amplitudes),
                            bits=tuple(cstate.bits))
    counter = cstate.averaging[target]
    return DisplayEvent("bit", shot, bit=target, latest=counter.latest, average=counter.average,
                        count_plus=counter.count_plus, count_minus=counter.count_minus)


def execute_instruction(instr: Instruction, qstate: StateVector, cstate: ClassicalState,
                        rng: np.random.Generator, shot: int = 0,
                        capture: bool = True) -> list[DisplayEvent]:
    """Execute one instruction in place; returns any display events it produced."""
    op = instr.op
    if instr.control_bits and not all(cstate.bits[b] for b in instr.control_bits):
        return []
    if op is Op.GATE:
        qstate.apply(gate_matrix(instr.gate, instr.angle, instr.k), instr.qubits)
    elif op is Op.MEASURE:
        q = instr.qubits[0]
        cstate.store(q, qstate.measure(q, instr.axis, rng))
    elif op is Op.MEASURE_PARITY:
        bit = qstate.measure_parity(list(zip(instr.qubits, instr.parity_axes)), rng)
        for q in instr.qubits:
            cstate.store(q, bit)
    elif op is Op.MEASURE_ALL:
        for q, bit in enumerate(qstate.measure_all(rng)):
            cstate.store(q, bit)
    elif op is Op.PREP:
        qstate.prepare(instr.qubits[0], instr.axis, rng)
    elif op is Op.NOT:
        for b in instr.bits:
            cstate.bits[b] ^= 1
    elif op is Op.RESET_AVERAGING:
        for q in instr.qubits or range(len(cstate.averaging)):
            cstate.averaging[q].reset()
    elif op is Op.DISPLAY:
        if capture:
            return [display(instr.bits[0] if instr.bits else None, qstate, cstate, shot)]
    elif op is Op.WAIT:
        pass
    else:  # pragma: no cover
        raise RuntimeError(f"unhandled instruction {instr!r}")
    return []


@dataclass(frozen=True)
class ExecutionRecord:
    seed: int
    shots: int
    events: tuple[DisplayEvent, ...]
    bits: tuple[int, ...]
    amplitudes: np.ndarray = field(repr=False)
    shot_bits: tuple[tuple[int, ...], ...] = field(repr=False)
    averaging: tuple[AveragingCounter, ...] = field(repr=False)

    def to_json(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "shots": self.shots,
            "events": [e.to_json() for e in self.events],
            "bits": list(self.bits),
            "amplitudes": [[a.real, a.imag] for a in self.amplitudes.tolist()],
        }


def run(program: Program, seed: int = 0, shots: int = 1) -> ExecutionRecord:
    """Execute ``program`` ``shots`` times from ``|0...0>``.

    Quantum state and bits restart every shot; averaging counters persist.
    Only display events of the final shot are kept.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = program.qubit_count
    rng = make_rng(seed)
    qstate = StateVector(n)
    cstate = ClassicalState.fresh(n)
    flat = [i for _, _, bundle in program.iter_bundles() for i in bundle.instructions]
    prefix_len, prefix_amps = _deterministic_prefix(flat, n) if shots > 1 else (0, None)
    events: list[DisplayEvent] = []
    shot_bits: list[tuple[int, ...]] = []
    for shot in range(shots):
        cstate.bits = [0] * n
        last = shot == shots - 1
        start = 0
        if last or prefix_amps is None:
            qstate.reset()
        else:
            qstate.amplitudes = prefix_amps.copy()
            start = prefix_len
        for instr in flat[start:]:
            produced = execute_instruction(instr, qstate, cstate, rng, shot, capture=last)
            if produced:
                events.extend(produced)
        shot_bits.append(tuple(cstate.bits))
    averaging = tuple(AveragingCounter(c.count_plus, c.count_minus, c.latest) for c in cstate.averaging)
    return ExecutionRecord(seed, shots, tuple(events), tuple(cstate.bits), qstate.amplitudes.copy(),
                           tuple(shot_bits), averaging)


def _deterministic_prefix(flat: list[Instruction], n: int) -> tuple[int, np.ndarray | None]:
    """Length of the leading run of instructions that neither draw random
    numbers nor touch classical state, and the state vector after it.

    Every shot starts from the same state with all bits 0, so this prefix
    yields bit-identical amplitudes each time. Controlled gates never fire in
    it and display only matters on the final shot, which is run in full.
    """
    state = StateVector(n)
    count = 0
    for instr in flat:
        if instr.op is Op.GATE:
            if not instr.control_bits:
                state.apply(gate_matrix(instr.gate, instr.angle, instr.k), instr.qubits)
        elif instr.op not in (Op.WAIT, Op.DISPLAY):
            break
        count += 1
    if count == 0:
        return 0, None
    return count, state.amplitudes
