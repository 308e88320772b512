import io
import json

import numpy as np
import pytest

from core.bogoliubov import BogoliubovMap
from core.command_runner import (
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_USAGE,
    CommandRunner,
    RunConfig,
    rows_to_csv,
)
from core.errors import BadParameter
from core.matrix_codec import MatrixCodec
from core.settings_manager import SettingsManager
from main import main


@pytest.fixture
def stream():
    return io.StringIO()


@pytest.fixture
def runner(settings, stream):
    return CommandRunner(settings, stream=stream)


def _write(tmp_path, name, document):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


def _matrix(values):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    return {"rows": values.shape[0], "cols": values.shape[1], "re": values.ravel().tolist()}


def _run(runner, stream, command, **kwargs):
    code = runner.run(RunConfig(command, **kwargs))
    return code, stream.getvalue()


def test_validate_good_map(runner, stream, tmp_path):
    path = _write(tmp_path, "map.json", MatrixCodec().build_map(BogoliubovMap.squeeze([0.5])))
    code, output = _run(runner, stream, "validate", inputs=[path])
    assert code == EXIT_OK
    assert json.loads(output)["passed"] is True


def test_validate_bad_map(runner, stream, tmp_path):
    path = _write(tmp_path, "map.json", {"statistics": "bosonic", "u": _matrix([[1]]), "v": _matrix([[1]])})
    code, output = _run(runner, stream, "validate", inputs=[path])
    assert code == EXIT_DOMAIN
    assert json.loads(output)["passed"] is False


def test_malformed_json(runner, stream, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"statistics": ')
    code, output = _run(runner, stream, "validate", inputs=[str(path)])
    assert code == EXIT_USAGE
    assert json.loads(output)["error"] == "ParseError"


def test_diagonalize_pairing_at_threshold(runner, stream, tmp_path):
    path = _write(tmp_path, "wick.json", {"statistics": "bosonic", "h": _matrix([[1]]), "k": _matrix([[1]])})
    code, output = _run(runner, stream, "diagonalize", inputs=[path])
    assert code == EXIT_DOMAIN
    assert json.loads(output)["error"] == "GramTooLarge"


def test_diagonalize_bcs(runner, stream, tmp_path):
    path = _write(tmp_path, "bcs.json", {"statistics": "fermionic", "h": _matrix(np.eye(2) * 3),
                                        "k": _matrix([[0, 4], [-4, 0]])})
    code, output = _run(runner, stream, "diagonalize", inputs=[path])
    payload = json.loads(output)
    assert code == EXIT_OK
    assert payload["E"] == pytest.approx([5.0, 5.0])
    assert payload["normal_ordering"]["value"] == pytest.approx(2.0)
    assert payload["normal_ordering"]["classification"]["class"] == "summable"


def test_decompose(runner, stream, tmp_path):
    path = _write(tmp_path, "map.json", MatrixCodec().build_map(BogoliubovMap.squeeze([0.2, 0.9])))
    code, output = _run(runner, stream, "decompose", inputs=[path])
    modes = json.loads(output)["modes"]
    assert code == EXIT_OK
    assert modes[0]["nu"] == pytest.approx(np.sinh(0.9))


def test_single_input_required(runner, stream):
    code, _ = _run(runner, stream, "validate", inputs=[])
    assert code == EXIT_USAGE


def test_classify_models(runner, stream):
    code, output = _run(runner, stream, "classify", model="wick",
                        params={"m": "1", "kappa": "1"}, family_horizon=2000)
    payload = json.loads(output)
    assert code == EXIT_OK
    assert payload["verdict"]["fock"] == "no"
    assert payload["verdict"]["itp"] == "yes"

    stream.seek(0)
    stream.truncate()
    code, output = _run(runner, stream, "classify", model="bcs",
                        params={"m": "1", "mu": "1"}, family_horizon=2000)
    assert json.loads(output)["verdict"]["fock"] == "yes"


def test_classify_errors(runner, stream):
    code, _ = _run(runner, stream, "classify", model="ising")
    assert code == EXIT_USAGE
    code, output = _run(runner, stream, "classify", model="wick", params={"m": "1"})
    assert code == EXIT_DOMAIN


def test_simulate_squeeze(runner, stream):
    code, output = _run(runner, stream, "simulate", xi=0.5, cutoff=60, sectors=10)
    payload = json.loads(output)
    assert code == EXIT_OK
    assert payload["max_residual"] <= 1e-6
    entry = payload["modes"][0]
    assert abs(entry["vacuum_overlap"] - (1 - np.tanh(0.5) ** 2) ** 0.25) <= 1e-8


def test_sweep_csv_and_cache(runner, stream, settings):
    config = dict(model="wick-probe", params={"m": "1", "kappa": "1"}, radii=[2, 4],
                  output_format="csv")
    code, output = _run(runner, stream, "sweep", **config)
    lines = output.strip().splitlines()
    assert code == EXIT_OK
    assert lines[0] == "R,partial_sum"
    assert len(lines) == 3

    stream.seek(0)
    stream.truncate()
    _run(runner, stream, "sweep", **config)
    assert stream.getvalue() == output


def test_wick_sweep_rows(runner, stream):
    code, output = _run(runner, stream, "sweep", model="wick", params={"m": "1", "kappa": "3"},
                        radius=1, output_format="csv", use_cache=False)
    lines = output.strip().splitlines()
    assert lines[0] == "px,py,pz,h,k,u,v,E"
    assert len(lines) == 8
    assert lines[1].startswith("0,0,0,4,3,")


def test_qed_sweep(runner, stream):
    code, output = _run(runner, stream, "sweep", model="qed",
                        params={"eps_plus": "0", "eps_minus": "0", "f": "1"},
                        times=[np.pi / 2], steps=64, use_cache=False)
    rows = json.loads(output)
    assert code == EXIT_OK
    assert rows[0]["abs_v1_sq"] == pytest.approx(1.0)


def test_qed_sweep_with_time_rule(runner, stream):
    code, output = _run(runner, stream, "sweep", model="qed",
                        params={"eps_plus": "1 + t", "eps_minus": "0.5", "f": "cos(t)"},
                        momenta=[0.0, 1.0], times=[1.0], steps=32, use_cache=False)
    rows = json.loads(output)
    assert code == EXIT_OK
    assert len(rows) == 2
    assert all(abs(row["unitarity"] - 1) < 1e-12 for row in rows)


def test_qed_sweep_rejects_foreign_expressions(runner, stream, tmp_path):
    target = tmp_path / "leak.npy"
    code, output = _run(runner, stream, "sweep", model="qed",
                        params={"eps_plus": "0", "eps_minus": "0", "f": f"np.save('{target}', t) or 1"},
                        times=[1.0], steps=8, use_cache=False)
    assert code == EXIT_USAGE
    assert json.loads(output)["error"] == "ParseError"
    assert not target.exists()


def test_unknown_sweep_model(runner, stream):
    code, _ = _run(runner, stream, "sweep", model="ising")
    assert code == EXIT_USAGE


@pytest.mark.parametrize("mode, invocation, key, expected", [
    ("ren1", ["pseries", "2"], "class", "summable"),
    ("family", ["inverse_square"], "is_C0", "yes"),
    ("family", ["shrinking"], "is_C0", "no"),
    ("form-factor", ["pseries", "1"], "class", "l2_only"),
])
def test_itp_modes(runner, stream, mode, invocation, key, expected):
    code, output = _run(runner, stream, "itp", mode=mode, inputs=invocation, horizon=100000)
    assert code == EXIT_OK
    assert json.loads(output)["result"][key] == expected


def test_itp_phase_family(runner, stream):
    code, output = _run(runner, stream, "itp", mode="equivalence", inputs=["phase"], horizon=100000)
    assert json.loads(output)["result"]["equivalence"] == "weakly_equivalent"


def test_unknown_command(runner, stream):
    code, _ = _run(runner, stream, "transmogrify")
    assert code == EXIT_USAGE


def test_output_file(runner, stream, tmp_path):
    target = tmp_path / "out.json"
    path = _write(tmp_path, "map.json", MatrixCodec().build_map(BogoliubovMap.identity(2, "fermionic")))
    code, output = _run(runner, stream, "validate", inputs=[path], out=str(target))
    assert code == EXIT_OK
    assert output == ""
    assert json.loads(target.read_text())["passed"] is True


def test_run_config_rejects_bad_tolerance():
    with pytest.raises(BadParameter):
        RunConfig("validate", tol=0.0)


def test_run_config_from_settings(settings):
    settings.set_setting('cutoff', 55)
    config = RunConfig.from_settings(settings, "simulate", cutoff=None, sectors=4)
    assert config.cutoff == 55
    assert config.sectors == 4


def test_csv_keeps_full_precision():
    assert rows_to_csv([{"a": 0.1, "b": 2}]) == "a,b\n0.10000000000000001,2\n"
    assert rows_to_csv([]) == ""


def test_main_end_to_end(tmp_path, capsys):
    path = _write(tmp_path, "map.json", MatrixCodec().build_map(BogoliubovMap.squeeze([0.3])))
    argv = ["--db", str(tmp_path / "toolkit.db"), "--log-dir", str(tmp_path / "logs"),
            "validate", path]
    assert main(argv) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_main_usage_errors(tmp_path):
    assert main(["transmogrify"]) == EXIT_USAGE
    missing = ["--db", str(tmp_path / "toolkit.db"), "--log-dir", str(tmp_path / "logs"),
               "--config", str(tmp_path / "absent.conf"), "validate", "map.json"]
    assert main(missing) == EXIT_USAGE


def test_main_closes_settings_on_unexpected_error(tmp_path, monkeypatch):
    closed = []
    original_close = SettingsManager.close

    def close(self):
        closed.append(True)
        original_close(self)

    def explode(self, config):
        raise RuntimeError("handler crashed")

    monkeypatch.setattr(SettingsManager, "close", close)
    monkeypatch.setattr(CommandRunner, "run", explode)
    argv = ["--db", str(tmp_path / "toolkit.db"), "--log-dir", str(tmp_path / "logs"),
            "validate", "map.json"]
    with pytest.raises(RuntimeError):
        main(argv)
    assert closed == [True]
