import json
import subprocess
import sys

import numpy as np
import pytest

from qcnoise import channels as chn
from qcnoise import cli
from qcnoise import numerics as nx
from qcnoise.measures import MeasureResult, distance
from qcnoise.repro import intro_state
from qcnoise.serialize import channel_to_dict, dumps, encode_matrix, state_to_dict


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return {
        "mp": write("mp.json", channel_to_dict(chn.measure_prepare_example())),
        "amp": write("amp.json", channel_to_dict(chn.amplitude_damping(0.5))),
        "pd": write("pd.json", channel_to_dict(chn.phase_damping(2, 0.5))),
        "intro_in": write("intro_in.json", state_to_dict(intro_state())),
        "bell": write("bell.json", state_to_dict(nx.pure_density(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2)))),
        "bad": write("bad.json", {"dims": [2, 2], "matrix": encode_matrix(np.triu(np.ones((4, 4))) / 4)}),
        "garbage": str(tmp_path / "garbage.json"),
        "tmp": tmp_path,
    }


def run(argv, capsys):
    code = cli.run(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestCommands:
    def test_classify_measure_prepare(self, files, capsys):
        code, out, _ = run(["classify-channel", files["mp"]], capsys)
        doc = json.loads(out)
        assert code == 0
        assert (doc["unital"], doc["semi_classical"], doc["can_create_qc"]) == (False, False, True)
        assert doc["metadata"]["seed"] == 0 and doc["metadata"]["command"] == "classify-channel"

    def test_classify_phase_damping(self, files, capsys):
        doc = json.loads(run(["classify-channel", files["pd"]], capsys)[1])
        assert doc["unital"] and not doc["can_create_qc"]

    def test_apply_then_check(self, files, capsys):
        out_path = str(files["tmp"] / "intro_out.json")
        code, _, _ = run(["apply", "--channel", files["mp"], "--state", files["intro_in"], "--target", "0",
                          "--out", out_path], capsys)
        assert code == 0
        state, meta = cli.parse_output(open(out_path).read())
        assert meta["command"] == "apply"
        plus = np.array([1, 1]) / np.sqrt(2)
        intro_out = 0.5 * np.kron(np.diag([1, 0]), np.diag([1, 0])) + 0.5 * np.kron(np.outer(plus, plus), np.diag([0, 1]))
        assert np.max(np.abs(state.matrix - intro_out)) <= 1e-12
        # the apply output is itself a valid state file
        doc = json.loads(run(["check-cc", out_path, "--restarts", "4"], capsys)[1])
        assert doc["is_cc"] is False
        doc = json.loads(run(["check-cc", files["intro_in"]], capsys)[1])
        assert doc["is_cc"] is True

    def test_measure_round_trip(self, files, capsys):
        code, out, _ = run(["measure", "--kind", "geometric", files["bell"], "--restarts", "4"], capsys)
        assert code == 0
        res, meta = cli.parse_output(out)
        assert isinstance(res, MeasureResult)
        assert res.value == pytest.approx(0.5, abs=1e-6)
        rho = nx.pure_density(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))
        assert distance("geometric", rho, res.witness.render()) == pytest.approx(res.value, abs=1e-9)
        assert meta["restarts"] == 4
        doc = json.loads(run(["measure", "--kind", "relent", files["bell"], "--restarts", "4"], capsys)[1])
        assert doc["value"] == pytest.approx(1.0, abs=1e-5)

    def test_repro_qutrit(self, capsys):
        code, out, _ = run(["repro", "qutrit-phase-damping"], capsys)
        assert code == 0
        assert json.loads(out)["quantities"]["eigenvalue_line"] == "2/3, 1/6, 1/6"

    def test_repro_construct_with_channel(self, files, capsys):
        code, out, _ = run(["repro", "construct-qc-input", "--channel", files["mp"]], capsys)
        assert code == 0 and json.loads(out)["pass"] is True
        code, _, err = run(["repro", "construct-qc-input", "--channel", files["pd"]], capsys)
        assert code == 2 and "ChannelCannotCreate" in err

    def test_suite(self, capsys):
        code, out, _ = run(["suite", "t1_qubit_exhaustive", "--trials", "2", "--seed", "3"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["inputs"]["trials"] == 2 and doc["metadata"]["seed"] == 3

    def test_failed_assertion_exits_1(self, capsys, monkeypatch):
        from qcnoise.repro import ReproReport

        def failing(case, **kw):
            rep = ReproReport(case)
            rep.check("always fails", False)
            return rep

        monkeypatch.setattr(cli, "run_case", failing)
        assert run(["repro", "intro-example"], capsys)[0] == 1


class TestErrors:
    def test_not_hermitian(self, files, capsys):
        code, out, err = run(["check-cc", files["bad"]], capsys)
        assert code == 2 and out == ""
        assert "NotHermitian" in err

    def test_malformed_json(self, files, capsys):
        open(files["garbage"], "w").write("{not json")
        code, _, err = run(["check-cc", files["garbage"]], capsys)
        assert code == 2 and "MalformedInput" in err

    def test_missing_file(self, files, capsys):
        code, _, err = run(["classify-channel", str(files["tmp"] / "nope.json")], capsys)
        assert code == 2 and "BadParameter" in err

    def test_not_trace_preserving(self, files, capsys):
        path = files["tmp"] / "ntp.json"
        path.write_text(dumps({"dim": 2, "kraus": [encode_matrix(np.eye(2)), encode_matrix(np.eye(2))]}))
        code, _, err = run(["classify-channel", str(path)], capsys)
        assert code == 2 and "NotTracePreserving" in err

    def test_dimension_mismatch(self, files, capsys):
        path = files["tmp"] / "q3.json"
        path.write_text(dumps(channel_to_dict(chn.phase_damping(3, 0.5))))
        code, _, err = run(["apply", "--channel", str(path), "--state", files["intro_in"], "--target", "0"], capsys)
        assert code == 2 and "DimensionMismatch" in err

    @pytest.mark.parametrize("argv", [
        ["check-cc", "x.json", "--bogus"],
        ["measure", "--kind", "trace", "x.json"],
        ["frobnicate"],
        ["check-cc", "x.json", "--restarts", "0"],
    ])
    def test_unknown_flags_rejected(self, argv, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.run(argv)
        assert exc.value.code == 2


class TestOutput:
    def test_byte_identical(self, files, capsys):
        argv = ["measure", "--kind", "geometric", files["bell"], "--restarts", "3", "--seed", "5"]
        assert run(argv, capsys)[1] == run(argv, capsys)[1]

    def test_twelve_significant_digits(self, files, capsys):
        doc = json.loads(run(["classify-channel", files["mp"]], capsys)[1])
        assert doc["metadata"]["significant_digits"] == 12
        for x in doc["s"]:
            assert len(repr(abs(x)).replace(".", "").lstrip("0")) <= 12

    def test_table_format(self, files, capsys):
        code, out, _ = run(["repro", "intro-example", "--format", "table"], capsys)
        assert code == 0
        assert out.startswith("case: intro-example  ->  PASS")
        assert "[ok  ]" in out
        out = run(["apply", "--channel", files["mp"], "--state", files["intro_in"], "--target", "0",
                   "--format", "table"], capsys)[1]
        assert "matrix:" in out

    def test_module_entry_point(self, files):
        proc = subprocess.run([sys.executable, "-m", "qcnoise", "classify-channel", files["amp"]],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["s"] == [0.0, 0.0, 0.5]
