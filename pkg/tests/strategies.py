"""Hypothesis strategies producing semantically valid cQASM bodies."""

from hypothesis import strategies as st

SINGLE = ["i", "h", "x", "y", "z", "x90", "y90", "mx90", "my90", "s", "sdag", "t", "tdag"]
ROTATIONS = ["rx", "ry", "rz"]
TWO = ["cnot", "cz", "swap"]


@st.composite
def gate_line(draw, n: int, measurements: bool = True):
    """One valid instruction line on an ``n``-qubit register."""
    q = st.integers(0, n - 1)
    choices = ["single", "rot"]
    if n >= 2:
        choices += ["two", "crk", "cr"]
    if n >= 3:
        choices.append("toffoli")
    if measurements:
        choices += ["measure", "parity", "cgate", "prep", "not"]
    form = draw(st.sampled_from(choices))
    if form == "single":
        return f"{draw(st.sampled_from(SINGLE))} q[{draw(q)}]"
    if form == "rot":
        return f"{draw(st.sampled_from(ROTATIONS))} q[{draw(q)}], {draw(st.floats(-7, 7)):.5f}"
    distinct = draw(st.permutations(range(n)))
    if form == "two":
        return f"{draw(st.sampled_from(TWO))} q[{distinct[0]}], q[{distinct[1]}]"
    if form == "crk":
        return f"crk q[{distinct[0]}], q[{distinct[1]}], {draw(st.integers(1, 6))}"
    if form == "cr":
        return f"cr q[{distinct[0]}], q[{distinct[1]}], {draw(st.floats(-7, 7)):.5f}"
    if form == "toffoli":
        return f"toffoli q[{distinct[0]}], q[{distinct[1]}], q[{distinct[2]}]"
    if form == "measure":
        return f"{draw(st.sampled_from(['measure', 'measure_x', 'measure_y', 'measure_z']))} q[{draw(q)}]"
    if form == "prep":
        return f"{draw(st.sampled_from(['prep_x', 'prep_y', 'prep_z']))} q[{draw(q)}]"
    if form == "not":
        return f"not b[{draw(q)}]"
    if form == "cgate":
        return f"c-{draw(st.sampled_from(['x', 'z', 'h']))} b[{draw(q)}], q[{draw(q)}]"
    k = draw(st.integers(1, n))
    axes = draw(st.lists(st.sampled_from("xyz"), min_size=k, max_size=k))
    return "measure_parity " + ", ".join(f"q[{distinct[i]}], {axes[i]}" for i in range(k))


@st.composite
def program_source(draw, max_qubits: int = 4, measurements: bool = True):
    n = draw(st.integers(1, max_qubits))
    lines = ["version 1.0", f"qubits {n}"]
    for _ in range(draw(st.integers(0, 3))):
        if draw(st.booleans()):
            lines.append(f".sub{draw(st.integers(0, 9))}({draw(st.integers(1, 3))})")
        lines += draw(st.lists(gate_line(n, measurements), max_size=6))
    return "\n".join(lines) + "\n"
