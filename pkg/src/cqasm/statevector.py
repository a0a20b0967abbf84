"""Dense state-vector simulator.

Basis state ``b`` stores qubit ``i`` in bit ``i`` of ``b`` (qubit 0 is the
least significant bit). Gate matrices act with their first target as the
most significant bit of the matrix index, so ``cnot`` with targets
``(control, target)`` uses the textbook matrix.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .ir import GateKind

_SQ2 = 1 / np.sqrt(2)

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
IDENTITY = np.eye(2, dtype=complex)

# applied after a -1 outcome to map the axis' -1 eigenstate onto its +1 eigenstate
_PREP_CORRECTION = {"z": PAULI["x"], "x": PAULI["z"], "y": PAULI["z"]}


def _rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


def _controlled_phase(phi: float) -> np.ndarray:
    return np.diag([1, 1, 1, np.exp(1j * phi)]).astype(complex)


_FIXED = {
    GateKind.I: IDENTITY,
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.X: PAULI["x"],
    GateKind.Y: PAULI["y"],
    GateKind.Z: PAULI["z"],
    GateKind.X90: _rx(np.pi / 2),
    GateKind.MX90: _rx(-np.pi / 2),
    GateKind.Y90: _ry(np.pi / 2),
    GateKind.MY90: _ry(-np.pi / 2),
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.SDAG: np.diag([1, -1j]).astype(complex),
    GateKind.T: np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
    GateKind.TDAG: np.diag([1, np.exp(-1j * np.pi / 4)]).astype(complex),
    GateKind.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}
_toffoli = np.eye(8, dtype=complex)
_toffoli[6:, 6:] = [[0, 1], [1, 0]]
_FIXED[GateKind.TOFFOLI] = _toffoli
for _m in _FIXED.values():
    _m.setflags(write=False)


def gate_matrix(kind: GateKind, angle: float | None = None, k: int | None = None) -> np.ndarray:
    """Unitary for ``kind``; ``angle`` is in radians, ``k`` is the crk exponent."""
    if kind in _FIXED:
        return _FIXED[kind]
    if kind is GateKind.RX:
        return _rx(angle)
    if kind is GateKind.RY:
        return _ry(angle)
    if kind is GateKind.RZ:
        return _rz(angle)
    if kind is GateKind.CRK:
        return _controlled_phase(np.pi / 2**k)
    if kind is GateKind.CR:
        return _controlled_phase(angle)
    raise ValueError(f"no matrix for {kind}")


@lru_cache(maxsize=None)
def _basis_bits(n: int) -> np.ndarray:
    """``(2**n, n)`` table: row ``b`` holds the bits of ``b`` (qubit 0 first)."""
    idx = np.arange(2**n)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.int8)


class StateVector:
    """``n_qubits`` qubits, initialised to ``|0...0>``."""

    def __init__(self, n_qubits: int, amplitudes: np.ndarray | None = None):
        self.n_qubits = n_qubits
        if amplitudes is None:
            amplitudes = np.zeros(2**n_qubits, dtype=complex)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.array(amplitudes, dtype=complex)
            if amplitudes.shape != (2**n_qubits,):
                raise ValueError("amplitude vector has the wrong length")
        self.amplitudes = amplitudes

    @classmethod
    def from_basis(cls, n_qubits: int, index: int) -> StateVector:
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    def copy(self) -> StateVector:
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def reset(self) -> None:
        self.amplitudes[:] = 0
        self.amplitudes[0] = 1.0

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    # -- unitaries ----------------------------------------------------------
    def _transformed(self, amps: np.ndarray, matrix: np.ndarray, targets: Sequence[int]) -> np.ndarray:
        n, m = self.n_qubits, len(targets)
        psi = amps.reshape((2,) * n)
        axes = [n - 1 - t for t in targets]
        op = matrix.reshape((2,) * (2 * m))
        out = np.tensordot(op, psi, axes=(list(range(m, 2 * m)), axes))
        return np.moveaxis(out, list(range(m)), axes).reshape(-1)

    def apply(self, matrix: np.ndarray, targets: Sequence[int]) -> StateVector:
        """Apply ``matrix`` to the ordered ``targets``."""
        self.amplitudes = self._transformed(self.amplitudes, matrix, targets)
        return self

    def apply_gate(self, kind: GateKind, targets: Sequence[int], angle: float | None = None,
                   k: int | None = None) -> StateVector:
        return self.apply(gate_matrix(kind, angle, k), targets)

    def apply_pauli_string(self, pairs: Sequence[tuple[int, str]]) -> np.ndarray:
        """Return ``P|psi>`` for the Pauli string ``pairs`` without modifying the state."""
        amps = self.amplitudes
        for qubit, axis in pairs:
            amps = self._transformed(amps, PAULI[axis], [qubit])
        return amps

    # -- measurement --------------------------------------------------------
    def measure_parity(self, pairs: Sequence[tuple[int, str]], rng: np.random.Generator) -> int:
        """Projectively measure a Pauli string; return 0 for +1, 1 for -1.

        Only the single eigenvalue is extracted; the state collapses onto the
        corresponding eigenspace of the string.
        """
        flipped = self.apply_pauli_string(pairs)
        plus = (self.amplitudes + flipped) / 2
        p_plus = float(np.vdot(plus, plus).real)
        # snap round-off so a branch of zero weight can never be sampled
        if p_plus < 1e-14:
            p_plus = 0.0
        elif p_plus > 1 - 1e-14:
            p_plus = 1.0
        bit = 0 if rng.random() < p_plus else 1
        projected = plus if bit == 0 else (self.amplitudes - flipped) / 2
        prob = p_plus if bit == 0 else 1.0 - p_plus
        self.amplitudes = projected / np.sqrt(prob)
        return bit

    def measure(self, qubit: int, axis: str, rng: np.random.Generator) -> int:
        """Measure one qubit along ``axis``; 0 means the +1 eigenvalue."""
        return self.measure_parity([(qubit, axis)], rng)

    def prepare(self, qubit: int, axis: str, rng: np.random.Generator) -> StateVector:
        """Reset ``qubit`` into the +1 eigenstate of ``axis``."""
        if self.measure(qubit, axis, rng):
            self.apply(_PREP_CORRECTION[axis], [qubit])
        return self

    def measure_all(self, rng: np.random.Generator) -> list[int]:
        """Sample a basis state, collapse onto it and return its bits (qubit 0 first)."""
        probs = self.probabilities()
        cdf = np.cumsum(probs)
        index = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
        index = min(index, len(probs) - 1)
        amp = self.amplitudes[index]
        self.amplitudes = np.zeros_like(self.amplitudes)
        self.amplitudes[index] = amp / abs(amp)
        return [int(b) for b in _basis_bits(self.n_qubits)[index]]

    def expectation_pauli(self, pairs: Sequence[tuple[int, str]]) -> float:
        """``<psi|P|psi>`` for a Pauli string."""
        return float(np.vdot(self.amplitudes, self.apply_pauli_string(pairs)).real)
