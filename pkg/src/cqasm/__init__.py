"""Toolchain for the cQASM v1.0 quantum assembly language."""

from .errors import CqasmError, LexError, ParseError, SemanticError
from .ir import GateKind, Instruction, Op, Program, analyze, emit_ir, load_program
from .runtime import ExecutionRecord, run
from .scheduler import DurationTable, ScheduleReport, schedule
from .statevector import StateVector, gate_matrix
from .syntax import parse, parse_index_expression, tokenize

__all__ = [
    "CqasmError", "LexError", "ParseError", "SemanticError",
    "GateKind", "Instruction", "Op", "Program", "analyze", "emit_ir", "load_program",
    "ExecutionRecord", "run",
    "DurationTable", "ScheduleReport", "schedule",
    "StateVector", "gate_matrix",
    "parse", "parse_index_expression", "tokenize",
]

__version__ = "0.1.0"
