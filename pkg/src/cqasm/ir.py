"""Semantic analysis: resolve aliases, check operands, expand SGMQ sets and
build the executable :class:`Program`."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator, Sequence, Union

from .errors import SemanticError
from .syntax import (
    BundleNode,
    IndexRef,
    Location,
    MapStmt,
    Name,
    Number,
    QubitsStmt,
    RawInstruction,
    SubcircuitHeader,
    SyntaxNode,
    VersionStmt,
    format_indices,
    format_number,
    parse_source,
)

AXES = ("x", "y", "z")


class GateKind(str, Enum):
    I = "i"
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    X90 = "x90"
    Y90 = "y90"
    MX90 = "mx90"
    MY90 = "my90"
    S = "s"
    SDAG = "sdag"
    T = "t"
    TDAG = "tdag"
    CNOT = "cnot"
    TOFFOLI = "toffoli"
    CZ = "cz"
    SWAP = "swap"
    CRK = "crk"
    CR = "cr"

    @property
    def arity(self) -> int:
        if self is GateKind.TOFFOLI:
            return 3
        if self in _TWO_QUBIT:
            return 2
        return 1

    @property
    def parameter(self) -> str | None:
        """Name of the extra numeric operand, if any: ``"angle"`` or ``"k"``."""
        if self in (GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CR):
            return "angle"
        if self is GateKind.CRK:
            return "k"
        return None


_TWO_QUBIT = frozenset({GateKind.CNOT, GateKind.CZ, GateKind.SWAP, GateKind.CRK, GateKind.CR})


class Op(str, Enum):
    GATE = "gate"
    PREP = "prep"
    MEASURE = "measure"
    MEASURE_ALL = "measure_all"
    MEASURE_PARITY = "measure_parity"
    NOT = "not"
    WAIT = "wait"
    DISPLAY = "display"
    RESET_AVERAGING = "reset_averaging"


# mnemonic -> (op, axis)
_NON_GATE = {
    "prep_x": (Op.PREP, "x"),
    "prep_y": (Op.PREP, "y"),
    "prep_z": (Op.PREP, "z"),
    "measure": (Op.MEASURE, "z"),
    "measure_x": (Op.MEASURE, "x"),
    "measure_y": (Op.MEASURE, "y"),
    "measure_z": (Op.MEASURE, "z"),
    "measure_all": (Op.MEASURE_ALL, None),
    "measure_parity": (Op.MEASURE_PARITY, None),
    "not": (Op.NOT, None),
    "wait": (Op.WAIT, None),
    "display": (Op.DISPLAY, None),
    "reset_averaging": (Op.RESET_AVERAGING, None),
}

MNEMONICS = frozenset(g.value for g in GateKind) | frozenset(_NON_GATE)
_RESERVED_NAMES = MNEMONICS | frozenset(AXES) | {"q", "b", "version", "qubits", "map"}


def resolve_control_prefix(mnemonic: str) -> tuple[Union[GateKind, str], bool]:
    """Split an optional ``c-`` prefix off a folded mnemonic.

    Gates resolve to their :class:`GateKind`; other instructions resolve to
    their mnemonic string and are never controllable.
    """
    controlled = mnemonic.startswith("c-")
    base = mnemonic[2:] if controlled else mnemonic
    try:
        return GateKind(base), controlled
    except ValueError:
        pass
    if base in _NON_GATE:
        if controlled:
            raise SemanticError(f"'c-' prefix is only allowed on gates, not {base!r}")
        return base, False
    raise SemanticError(f"unknown instruction {mnemonic!r}")


@dataclass(frozen=True)
class Instruction:
    op: Op
    qubits: tuple[int, ...] = ()
    gate: GateKind | None = None
    axis: str | None = None
    parity_axes: tuple[str, ...] | None = None
    control_bits: tuple[int, ...] = ()
    bits: tuple[int, ...] = ()
    angle: float | None = None
    k: int | None = None
    cycles: int | None = None
    loc: Location | None = field(default=None, compare=False, repr=False)

    @property
    def mnemonic(self) -> str:
        """Canonical mnemonic, used for printing and duration lookup."""
        if self.op is Op.GATE:
            return ("c-" if self.control_bits else "") + self.gate.value
        if self.op is Op.PREP:
            return f"prep_{self.axis}"
        if self.op is Op.MEASURE:
            return "measure" if self.axis == "z" else f"measure_{self.axis}"
        return self.op.value

    def touched_qubits(self, n_qubits: int) -> tuple[int, ...]:
        if self.op is Op.MEASURE_ALL or (self.op is Op.RESET_AVERAGING and not self.qubits):
            return tuple(range(n_qubits))
        return self.qubits

    def written_bits(self, n_qubits: int) -> tuple[int, ...]:
        if self.op in (Op.MEASURE, Op.MEASURE_PARITY):
            return self.qubits
        if self.op is Op.MEASURE_ALL:
            return tuple(range(n_qubits))
        if self.op is Op.NOT:
            return self.bits
        return ()

    def to_text(self) -> str:
        args: list[str] = []
        if self.control_bits:
            args.append(f"b[{format_indices(self.control_bits)}]")
        if self.op is Op.MEASURE_PARITY:
            for q, a in zip(self.qubits, self.parity_axes):
                args += [f"q[{q}]", a]
        elif self.op is not Op.MEASURE_ALL:
            args += [f"q[{q}]" for q in self.qubits]
        if self.bits:
            args.append(f"b[{format_indices(self.bits)}]")
        if self.angle is not None:
            args.append(format_number(self.angle))
        if self.k is not None:
            args.append(str(self.k))
        if self.cycles is not None:
            args.append(str(self.cycles))
        return self.mnemonic + (" " + ", ".join(args) if args else "")

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"op": self.mnemonic}
        if self.control_bits:
            out["control_bits"] = list(self.control_bits)
        if self.qubits:
            out["qubits"] = list(self.qubits)
        if self.parity_axes is not None:
            out["axes"] = list(self.parity_axes)
        if self.bits:
            out["bits"] = list(self.bits)
        if self.angle is not None:
            out["angle"] = self.angle
        if self.k is not None:
            out["k"] = self.k
        if self.cycles is not None:
            out["cycles"] = self.cycles
        return out


@dataclass(frozen=True)
class Bundle:
    instructions: tuple[Instruction, ...]
    loc: Location | None = field(default=None, compare=False, repr=False)

    def to_text(self) -> str:
        if len(self.instructions) == 1:
            return self.instructions[0].to_text()
        return "{ " + " | ".join(i.to_text() for i in self.instructions) + " }"


@dataclass(frozen=True)
class SubCircuit:
    name: str
    iterations: int = 1
    body: tuple[Bundle, ...] = ()


@dataclass(frozen=True)
class Program:
    qubit_count: int
    qubit_aliases: dict[str, int]
    bit_aliases: dict[str, int]
    subcircuits: tuple[SubCircuit, ...]

    def iter_bundles(self) -> Iterator[tuple[SubCircuit, int, Bundle]]:
        """Yield ``(subcircuit, iteration, bundle)`` with loops unrolled."""
        for sub in self.subcircuits:
            for it in range(sub.iterations):
                for bundle in sub.body:
                    yield sub, it, bundle

    def to_json(self) -> dict[str, Any]:
        return {
            "qubits": self.qubit_count,
            "aliases": {
                "qubits": dict(sorted(self.qubit_aliases.items(), key=lambda kv: (kv[1], kv[0]))),
                "bits": dict(sorted(self.bit_aliases.items(), key=lambda kv: (kv[1], kv[0]))),
            },
            "subcircuits": [
                {
                    "name": sub.name,
                    "iterations": sub.iterations,
                    "bundles": [[i.to_json() for i in b.instructions] for b in sub.body],
                }
                for sub in self.subcircuits
            ],
        }

    def to_text(self) -> str:
        lines = ["version 1.0", f"qubits {self.qubit_count}"]
        for name, idx in sorted(self.qubit_aliases.items(), key=lambda kv: (kv[1], kv[0])):
            lines.append(f"map q[{idx}], {name}")
        for name, idx in sorted(self.bit_aliases.items(), key=lambda kv: (kv[1], kv[0])):
            lines.append(f"map b[{idx}], {name}")
        for sub in self.subcircuits:
            lines.append(f".{sub.name}" + (f"({sub.iterations})" if sub.iterations != 1 else ""))
            lines += ["    " + b.to_text() for b in sub.body]
        return "\n".join(lines) + "\n"


def emit_ir(program: Program) -> str:
    """Canonical JSON rendering of a program (stable key order)."""
    return json.dumps(program.to_json(), indent=2) + "\n"


# ---------------------------------------------------------------------------
# Analysis

def _err(message: str, loc: Location | None) -> SemanticError:
    return SemanticError(message, *((loc.line, loc.column) if loc else (None, None)))


def validate_bundle(bundle: Bundle, n_qubits: int) -> Bundle:
    """Check that instructions in a parallel bundle do not collide.

    Two instructions may not touch the same qubit, nor write the same
    measurement bit. ``wait`` must stand alone and ``display`` may only be
    grouped with other ``display`` instructions.
    """
    instrs = bundle.instructions
    if not instrs:
        raise _err("empty bundle", bundle.loc)
    if len(instrs) > 1:
        ops = {i.op for i in instrs}
        if Op.WAIT in ops:
            raise _err("'wait' cannot be combined with other instructions in a bundle", bundle.loc)
        if Op.DISPLAY in ops and ops != {Op.DISPLAY}:
            raise _err("'display' cannot share a bundle with other instructions", bundle.loc)
    seen_q: dict[int, Instruction] = {}
    seen_b: dict[int, Instruction] = {}
    for instr in instrs:
        for q in instr.touched_qubits(n_qubits):
            if q in seen_q:
                raise _err(f"qubit {q} is used by more than one instruction in a parallel bundle",
                           instr.loc or bundle.loc)
            seen_q[q] = instr
        for b in instr.written_bits(n_qubits):
            if b in seen_b:
                raise _err(f"bit {b} is written by more than one instruction in a parallel bundle",
                           instr.loc or bundle.loc)
            seen_b[b] = instr
    return bundle


class Analyzer:
    def __init__(self, nodes: Sequence[SyntaxNode]):
        self.nodes = list(nodes)
        self.n_qubits: int | None = None
        self.qubit_aliases: dict[str, int] = {}
        self.bit_aliases: dict[str, int] = {}
        self.declared_later = {n.name for n in self.nodes if isinstance(n, MapStmt)}

    def run(self) -> Program:
        subcircuits: list[SubCircuit] = []
        current_name, current_iter, current_body = "default", 1, []
        explicit_seen = False
        for pos, node in enumerate(self.nodes):
            if isinstance(node, VersionStmt):
                if pos != 0:
                    raise _err("'version' must be the first statement", node.loc)
                if node.version != 1.0:
                    raise _err(f"unsupported cQASM version {node.version}", node.loc)
            elif isinstance(node, QubitsStmt):
                if self.n_qubits is not None:
                    raise _err("repeated 'qubits' declaration", node.loc)
                if node.count < 1:
                    raise _err("qubit count must be at least 1", node.loc)
                self.n_qubits = node.count
            elif isinstance(node, MapStmt):
                self._require_qubits(node.loc)
                self._map(node)
            elif isinstance(node, SubcircuitHeader):
                self._require_qubits(node.loc)
                if explicit_seen or current_body:
                    subcircuits.append(SubCircuit(current_name, current_iter, tuple(current_body)))
                explicit_seen = True
                iterations = 1 if node.iterations is None else node.iterations
                if iterations < 1:
                    raise _err(f"loop count must be at least 1, got {iterations}", node.loc)
                current_name, current_iter, current_body = node.name, iterations, []
            else:
                self._require_qubits(node.loc)
                current_body.append(self.bundle(node))
        if self.n_qubits is None:
            raise SemanticError("missing 'qubits' declaration", 1, 1)
        subcircuits.append(SubCircuit(current_name, current_iter, tuple(current_body)))
        return Program(self.n_qubits, dict(self.qubit_aliases), dict(self.bit_aliases),
                       tuple(subcircuits))

    def _require_qubits(self, loc: Location | None) -> None:
        if self.n_qubits is None:
            raise _err("'qubits' must be declared before any instruction", loc)

    # -- aliases ----------------------------------------------------------
    def _map(self, node: MapStmt) -> None:
        name = node.name
        if name in _RESERVED_NAMES:
            raise _err(f"alias {name!r} collides with a reserved word", node.loc)
        if name in self.qubit_aliases or name in self.bit_aliases:
            raise _err(f"duplicate alias {name!r}", node.loc)
        target = node.target
        if isinstance(target, Name):
            reg, idx = self._resolve_name(target)
            indices = (idx,)
        elif isinstance(target, IndexRef):
            reg, indices = target.register, target.indices
        else:
            raise _err("map expects a qubit or bit reference", node.loc)
        if len(indices) != 1:
            raise _err("map expects a single qubit or bit", node.loc)
        self._check_index(indices[0], target.loc or node.loc)
        (self.qubit_aliases if reg == "q" else self.bit_aliases)[name] = indices[0]

    def _resolve_name(self, op: Name) -> tuple[str, int]:
        if op.name in self.qubit_aliases:
            return "q", self.qubit_aliases[op.name]
        if op.name in self.bit_aliases:
            return "b", self.bit_aliases[op.name]
        if op.name in self.declared_later:
            raise _err(f"alias {op.name!r} used before its 'map' statement", op.loc)
        raise _err(f"unknown name {op.name!r}", op.loc)

    def _check_index(self, idx: int, loc: Location | None) -> None:
        if not 0 <= idx < self.n_qubits:
            raise _err(f"index {idx} out of range (register has {self.n_qubits} entries)", loc)

    def _ref(self, op, register: str) -> tuple[int, ...] | None:
        """Indices of ``op`` if it refers to ``register``, otherwise None."""
        if isinstance(op, IndexRef):
            if op.register != register:
                return None
            for idx in op.indices:
                self._check_index(idx, op.loc)
            return op.indices
        if isinstance(op, Name) and op.name not in AXES:
            reg, idx = self._resolve_name(op)
            return (idx,) if reg == register else None
        return None

    def _qubits(self, op, instr: RawInstruction) -> tuple[int, ...]:
        got = self._ref(op, "q")
        if got is None:
            raise _err(f"'{instr.mnemonic}' expects a qubit operand", getattr(op, "loc", None) or instr.loc)
        return got

    def _bits(self, op, instr: RawInstruction) -> tuple[int, ...]:
        got = self._ref(op, "b")
        if got is None:
            raise _err(f"'{instr.mnemonic}' expects a bit operand", getattr(op, "loc", None) or instr.loc)
        return got

    # -- instructions -----------------------------------------------------
    def bundle(self, node: BundleNode) -> Bundle:
        instrs: list[Instruction] = []
        for raw in node.instructions:
            instrs.extend(self.expand(raw))
        return validate_bundle(Bundle(tuple(instrs), node.loc), self.n_qubits)

    def expand(self, raw: RawInstruction) -> list[Instruction]:
        try:
            kind, controlled = resolve_control_prefix(raw.mnemonic)
        except SemanticError as exc:
            raise _err(exc.message, raw.loc) from None
        if isinstance(kind, GateKind):
            return self._gate(raw, kind, controlled)
        op, axis = _NON_GATE[kind]
        ops = raw.operands
        loc = raw.loc
        if op in (Op.PREP, Op.MEASURE):
            self._arity(raw, 1)
            return [Instruction(op, (q,), axis=axis, loc=loc) for q in self._qubits(ops[0], raw)]
        if op is Op.MEASURE_ALL:
            self._arity(raw, 0)
            return [Instruction(op, loc=loc)]
        if op is Op.MEASURE_PARITY:
            return [self._parity(raw)]
        if op is Op.NOT:
            if not ops:
                raise _err("'not' expects at least one bit operand", loc)
            bits: dict[int, None] = {}
            for o in ops:
                bits.update(dict.fromkeys(self._bits(o, raw)))
            return [Instruction(op, bits=tuple(bits), loc=loc)]
        if op is Op.WAIT:
            self._arity(raw, 1)
            n = ops[0]
            if not isinstance(n, Number) or not n.is_integer:
                raise _err("'wait' expects an integer cycle count", loc)
            if n.value < 1:
                raise _err(f"wait cycles must be at least 1, got {n.value}", loc)
            return [Instruction(op, cycles=n.value, loc=loc)]
        if op is Op.DISPLAY:
            if not ops:
                return [Instruction(op, loc=loc)]
            self._arity(raw, 1)
            return [Instruction(op, bits=(b,), loc=loc) for b in self._bits(ops[0], raw)]
        # reset_averaging
        if not ops:
            return [Instruction(op, loc=loc)]
        out = []
        for o in ops:
            out += [Instruction(op, (q,), loc=loc) for q in self._qubits(o, raw)]
        return out

    def _arity(self, raw: RawInstruction, n: int) -> None:
        if len(raw.operands) != n:
            raise _err(f"'{raw.mnemonic}' expects {n} operand(s), got {len(raw.operands)}", raw.loc)

    def _gate(self, raw: RawInstruction, gate: GateKind, controlled: bool) -> list[Instruction]:
        ops = list(raw.operands)
        control: dict[int, None] = {}
        if controlled:
            while ops and (bits := self._ref(ops[0], "b")) is not None:
                control.update(dict.fromkeys(bits))
                ops.pop(0)
            if not control:
                raise _err(f"'{raw.mnemonic}' expects control bit operand(s) first", raw.loc)
        n_params = 1 if gate.parameter else 0
        if len(ops) != gate.arity + n_params:
            raise _err(
                f"'{raw.mnemonic}' expects {gate.arity} qubit operand(s)"
                + (f" and a {gate.parameter} parameter" if n_params else "")
                + f", got {len(ops)} operand(s)",
                raw.loc,
            )
        qubit_sets = [self._qubits(o, raw) for o in ops[:gate.arity]]
        params: dict[str, Any] = {}
        if gate.parameter:
            p = ops[-1]
            if not isinstance(p, Number):
                raise _err(f"'{raw.mnemonic}' expects a numeric {gate.parameter}", raw.loc)
            if gate.parameter == "k":
                if not p.is_integer:
                    raise _err("'crk' expects an integer k", raw.loc)
                if p.value < 1:
                    raise _err(f"crk requires k >= 1, got {p.value}", raw.loc)
                params["k"] = p.value
            else:
                params["angle"] = float(p.value)
        cb = tuple(control)
        if gate.arity == 1:
            return [Instruction(Op.GATE, (q,), gate=gate, control_bits=cb, loc=raw.loc, **params)
                    for q in qubit_sets[0]]
        if any(len(s) != 1 for s in qubit_sets):
            raise _err(f"multi-qubit operand sets are not allowed on '{raw.mnemonic}'", raw.loc)
        qubits = tuple(s[0] for s in qubit_sets)
        if len(set(qubits)) != len(qubits):
            raise _err(f"'{raw.mnemonic}' operands must be distinct qubits", raw.loc)
        return [Instruction(Op.GATE, qubits, gate=gate, control_bits=cb, loc=raw.loc, **params)]

    def _parity(self, raw: RawInstruction) -> Instruction:
        ops = raw.operands
        if not ops or len(ops) % 2:
            raise _err("'measure_parity' expects (qubit, axis) operand pairs", raw.loc)
        qubits: list[int] = []
        axes: list[str] = []
        for q_op, a_op in zip(ops[::2], ops[1::2]):
            q = self._qubits(q_op, raw)
            if len(q) != 1:
                raise _err("'measure_parity' takes one qubit per axis", raw.loc)
            if not isinstance(a_op, Name) or a_op.name not in AXES:
                raise _err("'measure_parity' axis must be x, y or z", getattr(a_op, "loc", None) or raw.loc)
            qubits.append(q[0])
            axes.append(a_op.name)
        if len(set(qubits)) != len(qubits):
            raise _err("'measure_parity' qubits must be distinct", raw.loc)
        return Instruction(Op.MEASURE_PARITY, tuple(qubits), parity_axes=tuple(axes), loc=raw.loc)


def analyze(nodes: Sequence[SyntaxNode]) -> Program:
    """Resolve and validate a parsed syntax tree into a :class:`Program`."""
    return Analyzer(nodes).run()


def expand_sgmq(raw: RawInstruction, program_or_n: Union[Program, int]) -> list[Instruction]:
    """Expand one raw instruction into resolved instructions, one per addressed qubit."""
    analyzer = Analyzer([])
    if isinstance(program_or_n, Program):
        analyzer.n_qubits = program_or_n.qubit_count
        analyzer.qubit_aliases = dict(program_or_n.qubit_aliases)
        analyzer.bit_aliases = dict(program_or_n.bit_aliases)
    else:
        analyzer.n_qubits = program_or_n
    return analyzer.expand(raw)


def load_program(source: str) -> Program:
    """Tokenize, parse and analyze ``source`` in one step."""
    return analyze(parse_source(source))


def flatten(program: Program) -> Iterable[Bundle]:
    return (bundle for _, _, bundle in program.iter_bundles())
