import json

import numpy as np
import pytest

from qcnoise import channels as chn
from qcnoise import numerics as nx
from qcnoise import repro
from qcnoise.classicality import is_classically_correlated
from qcnoise.errors import BadParameter, ChannelCannotCreate
from qcnoise.serialize import dumps


class TestIntroExample:
    def test_golden(self):
        rep = repro.repro_intro_example()
        assert rep.passed, rep.failures
        q = rep.quantities
        assert q["max_deviation_from_expected"] <= 1e-12
        assert q["input_residual"] <= 1e-9
        assert q["commutator_frobenius"] == pytest.approx(np.sqrt(2) / 2, abs=1e-12)
        assert q["commutator_operator_norm"] == pytest.approx(0.5, abs=1e-12)
        assert not q["output_is_cc"]

    @pytest.mark.parametrize("ch", [chn.identity(2), chn.phase_damping(2, 1.0), chn.phase_damping(2, 0.3)])
    def test_protected_channels_keep_cc(self, ch):
        rep = repro.repro_intro_example(ch)
        assert rep.passed and rep.quantities["output_is_cc"]
        assert "max_deviation_from_expected" not in rep.quantities


class TestConstructQCInput:
    @pytest.mark.parametrize("gamma", [0.1, 0.5, 0.9])
    def test_amplitude_damping(self, gamma):
        witness, rep = repro.construct_qc_input(chn.amplitude_damping(gamma))
        assert rep.passed, rep.failures
        assert rep.quantities["output_commutator"] > 1e-3
        out = chn.apply_local(chn.amplitude_damping(gamma), witness.render(), 0)
        assert not is_classically_correlated(out, repro._backstop()).is_cc

    def test_measure_prepare(self):
        _, rep = repro.construct_qc_input(chn.measure_prepare_example())
        assert rep.passed

    # full decay resets to |0>, a semi-classical channel
    @pytest.mark.parametrize("ch", [chn.phase_damping(2, 0.5), chn.dephasing(2), chn.identity(2),
                                    chn.amplitude_damping(1.0)])
    def test_protected_channels_raise(self, ch):
        with pytest.raises(ChannelCannotCreate):
            repro.construct_qc_input(ch)

    def test_qudit_rejected(self):
        with pytest.raises(BadParameter):
            repro.construct_qc_input(chn.phase_damping(3, 0.5))

    def test_bloch_identity(self):
        _, rep = repro.construct_qc_input(chn.random_channel(2, 3, 4))
        q = rep.quantities
        assert np.allclose(q["r"], q["s"] + q["w"])


class TestQutrit:
    def test_golden(self):
        rep = repro.repro_qutrit_phase_damping()
        assert rep.passed, rep.failures
        assert np.allclose(rep.quantities["eigenvalues"], [2 / 3, 1 / 6, 1 / 6], atol=1e-10)
        assert rep.quantities["eigenvalue_line"] == "2/3, 1/6, 1/6"
        assert rep.quantities["top_overlap"] >= 1 - 1e-10
        assert not rep.quantities["output_is_cc"]

    def test_no_damping_stays_cc(self):
        rep = repro.repro_qutrit_phase_damping(p=0.0)
        assert rep.passed and rep.quantities["output_is_cc"]

    def test_alternative_phi_stays_cc(self):
        # orthogonal to psi with a flat diagonal: damping leaves the blocks commuting
        phi = np.array([1, np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 3)]) / np.sqrt(3)
        assert abs(np.vdot(repro.QUTRIT_PSI, phi)) < 1e-12
        rep = repro.repro_qutrit_phase_damping(phi=phi)
        assert rep.passed and rep.quantities["output_is_cc"]


class TestQubitPhaseDamping:
    def test_never_creates(self):
        rep = repro.repro_qubit_phase_damping(trials=50)
        assert rep.passed and rep.quantities["max_commutator"] <= 1e-7


class TestSuites:
    def test_t1_small(self):
        rep = repro.theorem_suite("t1_qubit_exhaustive", trials=4, inputs_per_channel=5)
        assert rep.passed, rep.failures

    @pytest.mark.parametrize("which", ["t2_unital", "t2_semiclassical"])
    def test_t2_small(self, which):
        rep = repro.theorem_suite(which, trials=3, opt=repro._backstop())
        assert rep.passed, rep.failures

    def test_t3_small(self):
        rep = repro.theorem_suite("t3_pure", trials=3, opt=repro._backstop())
        assert rep.passed, rep.failures

    def test_bad_arguments(self):
        with pytest.raises(BadParameter):
            repro.theorem_suite("t4", trials=1)
        with pytest.raises(BadParameter):
            repro.theorem_suite("t1_qubit_exhaustive", trials=0)
        with pytest.raises(BadParameter):
            repro.run_case("nope")


class TestReports:
    @pytest.mark.parametrize("case", repro.CASES)
    def test_cases_run_and_serialize(self, case):
        kw = {"trials": 10} if case == "qubit-phase-damping" else {}
        rep = repro.run_case(case, **kw)
        assert rep.passed
        doc = json.loads(dumps(rep.to_dict()))
        assert doc["case"] == case and doc["pass"] is True
        assert "seconds" not in doc
        assert case in rep.table()

    def test_deterministic(self):
        a = dumps(repro.run_case("construct-qc-input").to_dict())
        b = dumps(repro.run_case("construct-qc-input").to_dict())
        assert a == b

    def test_fraction_formatting(self):
        assert repro.as_fraction(2 / 3) == "2/3"
        assert repro.as_fraction(np.pi) == repr(np.pi)

    def test_cq_state(self):
        rho = repro.cq_state([0.25, 0.75], [nx.ket(0, 2), nx.ket(1, 2)])
        assert np.allclose(rho.matrix, np.diag([0.25, 0, 0, 0.75]))
