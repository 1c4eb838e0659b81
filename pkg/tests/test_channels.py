import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from qcnoise import channels as chn
from qcnoise import numerics as nx
from qcnoise.errors import (
    BadParameter,
    DimensionMismatch,
    EmptyKrausList,
    IndexOutOfRange,
    NotTracePreserving,
)

seeds = st.integers(0, 2**31 - 1)
probs = st.floats(0, 1)
PLUS = np.array([1, 1]) / np.sqrt(2)
P_PLUS = np.outer(PLUS, PLUS)


class TestValidation:
    def test_measure_prepare_kraus_pair(self):
        plus = PLUS
        ch = chn.validate_channel([np.diag([1, 0]), np.outer(plus, [0, 1])])
        assert len(ch) == 2 and ch.dim == 2

    def test_not_trace_preserving(self):
        with pytest.raises(NotTracePreserving) as err:
            chn.validate_channel([np.eye(2), np.eye(2)])
        assert err.value.defect == pytest.approx(1.0)

    def test_single_unitary(self):
        chn.validate_channel([nx.haar_unitary(3, 0)])

    def test_empty_and_shapes(self):
        with pytest.raises(EmptyKrausList):
            chn.validate_channel([])
        with pytest.raises(DimensionMismatch):
            chn.validate_channel([np.eye(2), np.eye(3)])
        with pytest.raises(DimensionMismatch):
            chn.validate_channel([np.ones((2, 3))])

    @given(seeds, st.integers(1, 4), st.sampled_from([2, 3]))
    def test_choi_is_psd_and_tp(self, seed, n, d):
        ch = chn.random_channel(d, n, seed)
        c = chn.choi(ch)
        assert np.linalg.eigvalsh(c)[0] > -1e-12
        assert chn.tp_defect(ch.kraus) < 1e-12
        # tracing out the output leg gives the identity for a TP map
        assert np.allclose(np.einsum("aibi->ab", c.reshape(d, d, d, d)), np.eye(d), atol=1e-12)

    def test_bad_probabilities(self):
        for call in (lambda: chn.phase_damping(2, 1.5), lambda: chn.amplitude_damping(-0.1),
                     lambda: chn.depolarizing(2, 2.0), lambda: chn.unitary(np.ones((2, 2))),
                     lambda: chn.standard("nope")):
            with pytest.raises(BadParameter):
                call()


class TestStandardChannels:
    def test_phase_damping_scales_coherences(self):
        psi = nx.random_pure_state(3, 1)
        rho = np.outer(psi, psi.conj())
        out = chn.phase_damping(3, 0.5)(rho)
        assert out[0, 1] == pytest.approx(0.5 * rho[0, 1])
        assert np.allclose(np.diag(out), np.diag(rho))

    def test_full_amplitude_decay(self):
        assert np.allclose(chn.amplitude_damping(1)(np.diag([0, 1])), np.diag([1, 0]))

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_phase_damping_zero_is_identity(self, d):
        assert chn.same_action(chn.phase_damping(d, 0), chn.identity(d))

    def test_measure_prepare_on_mixed(self):
        out = chn.measure_prepare_example()(np.eye(2) / 2)
        assert np.allclose(out, (np.diag([1, 0]) + P_PLUS) / 2)

    def test_complete_dephasing_of_plus(self):
        assert np.allclose(chn.phase_damping(2, 1)(P_PLUS), np.eye(2) / 2)

    @given(seeds)
    def test_unitary_channel(self, seed):
        rng = np.random.default_rng(seed)
        u, rho = nx.haar_unitary(3, rng), nx.random_density(3, seed=rng)
        out = chn.apply(chn.unitary(u), rho)
        assert np.allclose(out.matrix, u @ rho.matrix @ u.conj().T)

    @given(seeds, probs)
    def test_depolarizing_action(self, seed, q):
        rho = nx.random_density(3, seed=seed).matrix
        out = chn.depolarizing(3, q)(rho)
        assert np.allclose(out, (1 - q) * rho + q * np.eye(3) / 3, atol=1e-12)

    def test_dephasing_basis(self):
        u = nx.haar_unitary(2, 4)
        out = chn.dephasing(u)(P_PLUS)
        assert nx.offdiag_norm(u.conj().T @ out @ u) < 1e-12
        assert chn.same_action(chn.dephasing(2), chn.phase_damping(2, 1))

    def test_compose(self):
        c = chn.compose(chn.amplitude_damping(0.3), chn.phase_damping(2, 0.4))
        rho = nx.random_density(2, seed=2).matrix
        expected = chn.amplitude_damping(0.3)(chn.phase_damping(2, 0.4)(rho))
        assert np.allclose(c(rho), expected)


class TestLocalApplication:
    def test_intro_example(self):
        intro_in = nx.DensityMatrix(0.5 * np.diag([1, 0, 0, 1]), (2, 2))
        out = chn.apply_local(chn.measure_prepare_example(), intro_in, 0)
        intro_out = 0.5 * np.kron(np.diag([1, 0]), np.diag([1, 0])) + 0.5 * np.kron(P_PLUS, np.diag([0, 1]))
        assert np.max(np.abs(out.matrix - intro_out)) <= 1e-12

    @given(seeds, st.sampled_from([0, 1]))
    def test_identity_leaves_state(self, seed, target):
        rho = nx.random_density(6, seed=seed, dims=(2, 3))
        out = chn.apply_local(chn.identity(rho.dims[target]), rho, target)
        assert np.allclose(out.matrix, rho.matrix)

    @given(seeds, st.sampled_from([((2, 3), 0), ((2, 3), 1), ((3, 2), 0), ((2, 2), 1)]))
    def test_matches_kron_oracle(self, seed, case):
        dims, target = case
        rng = np.random.default_rng(seed)
        rho = nx.random_density(dims[0] * dims[1], seed=rng, dims=dims)
        ch = chn.random_channel(dims[target], 3, rng)
        expected = oracles.kraus_apply_local(ch.kraus, rho.matrix, dims, target)
        assert np.allclose(chn.apply_local(ch, rho, target).matrix, expected, atol=1e-12)
        assert np.allclose(chn.lift(ch, dims, target)(rho.matrix), expected, atol=1e-12)

    def test_errors(self):
        rho = nx.random_density(6, seed=0, dims=(2, 3))
        with pytest.raises(DimensionMismatch):
            chn.apply_local(chn.identity(3), rho, 0)
        with pytest.raises(IndexOutOfRange):
            chn.apply_local(chn.identity(2), rho, 2)
        with pytest.raises(DimensionMismatch):
            chn.apply(chn.identity(2), rho)


class TestClassification:
    def test_unital_examples(self):
        assert chn.is_unital(chn.phase_damping(2, 0.7))[0]
        ok, s = chn.is_unital(chn.amplitude_damping(0.5))
        assert not ok and np.allclose(s, [0, 0, 0.5], atol=1e-12)
        assert chn.is_unital(chn.unitary(nx.haar_unitary(2, 1)))[0]

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_full_phase_damping_is_semi_classical(self, d):
        basis = chn.semi_classical_basis(chn.phase_damping(d, 1))
        assert basis is not None
        assert np.allclose(np.abs(basis), np.eye(d))

    def test_not_semi_classical(self):
        assert chn.semi_classical_basis(chn.measure_prepare_example()) is None
        assert chn.semi_classical_basis(chn.phase_damping(2, 0.5)) is None

    def test_classify_examples(self):
        c = chn.classify(chn.measure_prepare_example())
        assert (c.unital, c.semi_classical, c.can_create_qc) == (False, False, True)
        c = chn.classify(chn.phase_damping(2, 0.5))
        assert c.unital and not c.can_create_qc
        c = chn.classify(chn.dephasing(2))
        assert c.unital and c.semi_classical and not c.can_create_qc
        assert c.to_dict()["can_create_qc"] is False

    def test_qudit_flag_is_advisory(self):
        c = chn.classify(chn.random_channel(3, 2, 0))
        assert c.advisory and c.s is None
        assert not chn.classify(chn.amplitude_damping(0.2)).advisory

    @given(seeds, st.integers(1, 5))
    def test_random_unital(self, seed, n):
        ch = chn.random_unital_qubit(seed, n)
        assert chn.unital_defect(ch) <= 1e-10
        assert chn.tp_defect(ch.kraus) <= 1e-10

    def test_single_unitary_mixture(self):
        ch = chn.random_unital_qubit(3, 1)
        assert len(ch) == 1
        u = ch.kraus[0]
        assert np.allclose(u.conj().T @ u, np.eye(2))

    def test_random_channels_deterministic(self):
        assert np.array_equal(chn.random_unital_qubit(7).kraus, chn.random_unital_qubit(7).kraus)
        assert np.array_equal(chn.random_channel(3, 2, 7).kraus, chn.random_channel(3, 2, 7).kraus)

    @given(seeds, st.sampled_from([2, 3]))
    def test_random_semi_classical(self, seed, d):
        ch = chn.random_semi_classical(d, seed)
        basis = chn.semi_classical_basis(ch)
        assert basis is not None
        rho = nx.random_density(d, seed=seed + 1).matrix
        assert nx.offdiag_norm(basis.conj().T @ ch(rho) @ basis) < 1e-8

    @given(seeds)
    def test_random_isometries_are_generic(self, seed):
        c = chn.classify(chn.random_channel(2, 2, seed))
        assert not c.unital and not c.semi_classical
