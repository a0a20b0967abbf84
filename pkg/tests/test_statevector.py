import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqasm.ir import GateKind
from cqasm.statevector import PAULI, StateVector, gate_matrix

from oracles import CNOT, H, X, Y, Z, embed, exp_pauli, kron_state, random_state

S2 = 1 / np.sqrt(2)
PLUS = np.array([S2, S2])
ZERO, ONE = np.array([1, 0]), np.array([0, 1])


def rng(seed=0):
    return np.random.default_rng(seed)


def _params(g):
    return {"angle": {"angle": 0.731}, "k": {"k": 2}, None: {}}[g.parameter]


class TestGateMatrix:
    def test_crk_k1(self):
        np.testing.assert_allclose(gate_matrix(GateKind.CRK, k=1), np.diag([1, 1, 1, 1j]), atol=1e-12)

    def test_identity(self):
        np.testing.assert_array_equal(gate_matrix(GateKind.I), np.eye(2))

    def test_rx_pi(self):
        expected = exp_pauli(X, np.pi)
        np.testing.assert_allclose(expected, [[0, -1j], [-1j, 0]], atol=1e-12)
        np.testing.assert_allclose(gate_matrix(GateKind.RX, angle=np.pi), expected, atol=1e-12)

    @pytest.mark.parametrize("theta", [-2.5, 0.0, 0.3, 1.57, 3.14])
    @pytest.mark.parametrize("kind,pauli", [(GateKind.RX, X), (GateKind.RY, Y), (GateKind.RZ, Z)])
    def test_rotations_match_exponential(self, kind, pauli, theta):
        np.testing.assert_allclose(gate_matrix(kind, angle=theta), exp_pauli(pauli, theta), atol=1e-12)

    @pytest.mark.parametrize("kind,axis,theta", [
        (GateKind.X90, X, np.pi / 2), (GateKind.MX90, X, -np.pi / 2),
        (GateKind.Y90, Y, np.pi / 2), (GateKind.MY90, Y, -np.pi / 2),
    ])
    def test_quarter_turns(self, kind, axis, theta):
        np.testing.assert_allclose(gate_matrix(kind), exp_pauli(axis, theta), atol=1e-12)

    def test_phase_gates(self):
        np.testing.assert_allclose(gate_matrix(GateKind.S), np.diag([1, 1j]), atol=1e-12)
        np.testing.assert_allclose(gate_matrix(GateKind.T), np.diag([1, (1 + 1j) * S2]), atol=1e-12)
        np.testing.assert_allclose(gate_matrix(GateKind.TDAG), gate_matrix(GateKind.T).conj().T, atol=1e-12)
        np.testing.assert_allclose(gate_matrix(GateKind.CR, angle=0.4), np.diag([1, 1, 1, np.exp(0.4j)]),
                                   atol=1e-12)

    @pytest.mark.parametrize("kind", list(GateKind))
    def test_unitary(self, kind):
        u = gate_matrix(kind, **_params(kind))
        assert u.shape == (2**kind.arity,) * 2
        np.testing.assert_allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-12)


class TestApply:
    def test_h_on_q0(self):
        s = StateVector(2).apply_gate(GateKind.H, [0])
        np.testing.assert_allclose(s.amplitudes, [S2, S2, 0, 0], atol=1e-12)

    def test_bell(self):
        s = StateVector(2).apply_gate(GateKind.H, [0]).apply_gate(GateKind.CNOT, [0, 1])
        np.testing.assert_allclose(s.amplitudes, [S2, 0, 0, S2], atol=1e-12)

    def test_identity(self):
        psi = random_state(rng(3), 3)
        s = StateVector(3, psi).apply_gate(GateKind.I, [1])
        np.testing.assert_allclose(s.amplitudes, psi, atol=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from(list(GateKind)), st.integers(3, 5), st.data())
    def test_matches_embedded_operator(self, kind, n, data):
        targets = data.draw(st.permutations(range(n)))[:kind.arity]
        psi = random_state(rng(data.draw(st.integers(0, 10**6))), n)
        u = gate_matrix(kind, **_params(kind))
        got = StateVector(n, psi).apply(u, targets).amplitudes
        np.testing.assert_allclose(got, embed(u, targets, n) @ psi, atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.tuples(st.sampled_from(list(GateKind)), st.integers(0, 10**6)), max_size=40))
    def test_norm_preserved(self, ops):
        n = 4
        s = StateVector(n)
        r = rng(1)
        for kind, seed in ops:
            targets = list(np.random.default_rng(seed).permutation(n)[:kind.arity])
            s.apply_gate(kind, targets, angle=r.uniform(-7, 7), k=int(r.integers(1, 8)))
        assert abs(s.norm() - 1) < 1e-10


class TestPrepare:
    def test_prep_z_on_one(self):
        for seed in range(5):
            s = StateVector.from_basis(1, 1).prepare(0, "z", rng(seed))
            np.testing.assert_allclose(s.amplitudes, [1, 0], atol=1e-12)

    def test_prep_z_on_zero(self):
        s = StateVector(1).prepare(0, "z", rng())
        np.testing.assert_array_equal(s.amplitudes, [1, 0])

    def test_prep_x_on_zero(self):
        for seed in range(8):
            s = StateVector(1).prepare(0, "x", rng(seed))
            np.testing.assert_allclose(s.amplitudes, PLUS, atol=1e-12)

    def test_prep_y(self):
        for seed in range(8):
            s = StateVector(1).prepare(0, "y", rng(seed))
            np.testing.assert_allclose(s.amplitudes, [S2, 1j * S2], atol=1e-12)

    def test_prep_breaks_entanglement(self):
        for seed in range(8):
            s = StateVector(2).apply_gate(GateKind.H, [0]).apply_gate(GateKind.CNOT, [0, 1])
            s.prepare(0, "z", rng(seed))
            # qubit 0 is |0>, qubit 1 is left in a basis state
            p = s.probabilities()
            assert p[1] + p[3] < 1e-12
            assert max(p) == pytest.approx(1)


class TestMeasure:
    def test_eigenstate(self):
        s = StateVector.from_basis(1, 1)
        assert s.measure(0, "z", rng()) == 1
        np.testing.assert_allclose(s.amplitudes, [0, 1])

    def test_plus_in_z_is_fair(self):
        r = rng(11)
        outcomes = [StateVector(1, PLUS).measure(0, "z", r) for _ in range(4000)]
        assert abs(np.mean(outcomes) - 0.5) < 0.03  # 3.8 sigma

    def test_plus_in_x(self):
        r = rng(2)
        assert all(StateVector(1, PLUS).measure(0, "x", r) == 0 for _ in range(50))

    def test_collapse(self):
        r = rng(5)
        for _ in range(20):
            s = StateVector(1, PLUS)
            bit = s.measure(0, "z", r)
            np.testing.assert_allclose(s.amplitudes, ONE if bit else ZERO, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**6), st.sampled_from("xyz"), st.integers(0, 2))
    def test_axis_equals_basis_change(self, seed, axis, qubit):
        psi = random_state(rng(seed), 3)
        direct = StateVector(3, psi)
        bit_direct = direct.measure(qubit, axis, rng(seed + 1))
        # rotate the axis onto z, measure z, rotate back
        sdag = np.diag([1, -1j])
        to_z = {"x": H, "y": H @ sdag, "z": np.eye(2)}[axis]
        rotated = StateVector(3, embed(to_z, [qubit], 3) @ psi)
        bit_rot = rotated.measure(qubit, "z", rng(seed + 1))
        back = embed(to_z.conj().T, [qubit], 3) @ rotated.amplitudes
        assert bit_direct == bit_rot
        np.testing.assert_allclose(direct.amplitudes, back, atol=1e-10)


class TestParity:
    def test_zz_on_bell(self):
        bell = np.array([S2, 0, 0, S2])
        for seed in range(10):
            s = StateVector(2, bell)
            assert s.measure_parity([(0, "z"), (1, "z")], rng(seed)) == 0
            np.testing.assert_allclose(s.amplitudes, bell, atol=1e-12)

    def test_z0z2_probability_on_parity_listing_state(self):
        # h q0, h q1, h q2, cnot q2,q3 built with kron products
        product = kron_state(PLUS, PLUS, PLUS, ZERO)
        psi = embed(CNOT, [2, 3], 4) @ product
        z0z2 = np.diag([1.0 if ((b & 1) ^ ((b >> 2) & 1)) == 0 else 0.0 for b in range(16)])
        p_plus_oracle = float(np.real(psi.conj() @ z0z2 @ psi))
        assert p_plus_oracle == pytest.approx(0.5, abs=1e-12)
        s = StateVector(4)
        for q in (0, 1, 2):
            s.apply_gate(GateKind.H, [q])
        s.apply_gate(GateKind.CNOT, [2, 3])
        p_plus = (1 + s.expectation_pauli([(0, "z"), (2, "z")])) / 2
        assert p_plus == pytest.approx(p_plus_oracle, abs=1e-12)

    def test_single_pair_is_axis_measurement(self):
        a = StateVector.from_basis(1, 1)
        assert a.measure_parity([(0, "z")], rng()) == 1
        assert StateVector.from_basis(1, 1).measure(0, "z", rng()) == 1

    def test_only_one_bit_extracted(self):
        # X1 Y3 parity on a state where each factor alone is random
        r = rng(9)
        for _ in range(20):
            s = StateVector(4)
            for q in range(4):
                s.apply_gate(GateKind.H, [q])
            before = s.expectation_pauli([(1, "x")])
            s.measure_parity([(0, "z"), (2, "z")], r)
            # measuring Z0 Z2 must not disturb X1
            assert s.expectation_pauli([(1, "x")]) == pytest.approx(before, abs=1e-12)
            # Z0 alone is still undetermined
            assert s.expectation_pauli([(0, "z")]) == pytest.approx(0, abs=1e-12)

    def test_projection_matches_oracle(self):
        psi = random_state(rng(4), 3)
        pairs = [(0, "x"), (2, "y")]
        op = embed(PAULI["x"], [0], 3) @ embed(PAULI["y"], [2], 3)
        for seed in range(6):
            s = StateVector(3, psi)
            bit = s.measure_parity(pairs, rng(seed))
            proj = (np.eye(8) + (-1) ** bit * op) / 2
            expected = proj @ psi
            expected /= np.linalg.norm(expected)
            np.testing.assert_allclose(s.amplitudes, expected, atol=1e-12)


class TestMeasureAll:
    def test_basis_state(self):
        s = StateVector.from_basis(2, 0b10)
        assert s.measure_all(rng()) == [0, 1]
        np.testing.assert_array_equal(s.amplitudes, [0, 0, 1, 0])

    def test_bell_correlations(self):
        r = rng(8)
        seen = [tuple(StateVector(2, [S2, 0, 0, S2]).measure_all(r)) for _ in range(2000)]
        assert set(seen) <= {(0, 0), (1, 1)}
        assert abs(seen.count((0, 0)) / 2000 - 0.5) < 0.035

    def test_single_plus(self):
        r = rng(1)
        seen = [StateVector(1, PLUS).measure_all(r)[0] for _ in range(2000)]
        assert abs(np.mean(seen) - 0.5) < 0.035


def test_determinism():
    def trial():
        r = np.random.default_rng(1234)
        s = StateVector(3)
        out = []
        for q in range(3):
            s.apply_gate(GateKind.RY, [q], angle=0.3 + q)
        s.apply_gate(GateKind.CNOT, [0, 2])
        out.append(s.measure(1, "x", r))
        out.append(s.measure_parity([(0, "y"), (2, "z")], r))
        out += s.measure_all(r)
        return out, s.amplitudes.copy()

    (a, amp_a), (b, amp_b) = trial(), trial()
    assert a == b
    assert amp_a.tobytes() == amp_b.tobytes()
