import json

import pytest

from ssc_gamma.characters import MultChar
from ssc_gamma.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, RunConfig, dump, main
from ssc_gamma.qsymb import RatFunc
from ssc_gamma.rs_integral import gamma_closed
from ssc_gamma.whittaker import SSCDatum


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


def test_gamma_trivial_flags_pole(capsys):
    code, doc = run_json(capsys, "gamma", "--p", "3", "--l", "2", "--eps", "+1", "--tau", "trivial")
    assert code == EXIT_OK and doc["schema"] == "v1"
    (e,) = doc["entries"]
    assert e["pole_at_1"] and e["order_at_1"] == -1
    assert RatFunc.from_json(e["gamma"]) == gamma_closed(SSCDatum(2, 3), MultChar(3))


def test_gamma_p2_unramified(capsys):
    code, doc = run_json(capsys, "gamma", "--p", "2", "--l", "2", "--tau", "unramified")
    assert code == EXIT_OK
    (e,) = doc["entries"]
    assert e["tau"]["label"] == "unram(-1)" and not e["pole_at_1"]


def test_gamma_all_has_four_entries(capsys):
    code, doc = run_json(capsys, "gamma", "--p", "3", "--l", "2", "--tau", "all")
    assert code == EXIT_OK and len(doc["entries"]) == 4


def test_gamma_values_at_s_points(capsys):
    code, doc = run_json(capsys, "gamma", "--p", "3", "--tau", "trivial", "--s", "1", "--s", "2+1j")
    vals = doc["entries"][0]["values"]
    assert vals[0]["value"] is None and vals[0]["pole"]
    assert isinstance(vals[1]["value"]["re"], float)


def test_poles_counts(capsys):
    _, doc = run_json(capsys, "poles", "--p", "3", "--l", "2")
    assert doc["poles"] == 2 and len(doc["rows"]) == 4
    assert all((r["order_at_1"] == -1) == r["criterion"] for r in doc["rows"])
    _, doc = run_json(capsys, "poles", "--p", "2", "--l", "2")
    assert doc["poles"] == 1 and len(doc["rows"]) == 2


def test_eps_flip_swaps_unramified_pole(capsys):
    def unram_pole(eps):
        _, doc = run_json(capsys, "poles", "--p", "3", "--eps", eps)
        return {r["tau"] for r in doc["rows"] if r["order_at_1"] < 0 and "legendre" not in r["tau"]}
    assert unram_pole("+1") == {"trivial"}
    assert unram_pole("-1") == {"unram(-1)"}


def test_parameter_examples(capsys):
    _, doc = run_json(capsys, "parameter", "--p", "2", "--l", "2", "--eps", "+1")
    assert doc["delta"]["exact"] == "1" and doc["complete"] and "Q_2" in doc["annotation"]
    _, doc = run_json(capsys, "parameter", "--p", "3", "--eps", "-1")
    assert doc["summands"][0] == {"unram_value": -1, "tame": "trivial"}
    assert not doc["complete"]
    _, a = run_json(capsys, "parameter", "--p", "5", "--omega", "+1")
    _, b = run_json(capsys, "parameter", "--p", "5", "--omega", "-1")
    assert a["delta"]["value"]["re"] == -b["delta"]["value"]["re"]
    assert a["delta"]["value"]["im"] == -b["delta"]["value"]["im"]


@pytest.mark.parametrize("argv", [
    ["poles", "--p", "4"],
    ["poles", "--p", "2", "--omega", "-1"],
    ["poles", "--p", "2", "--alpha-class", "nonsquare"],
    ["gamma", "--p", "2", "--tau", "tame"],
    ["gamma", "--p", "3", "--l", "1"],
    ["gamma", "--p", "3", "--eps", "2"],
    ["poles"],
    ["verify", "--check", "nonsense"],
    ["verify", "--check", "tate", "--break-measure", "0"],
])
def test_invalid_configuration_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_CONFIG and err


def test_verify_tate_only(capsys):
    code, doc = run_json(capsys, "verify", "--check", "tate")
    assert code == EXIT_OK and doc["passed"]
    assert list(doc["summary"]) == ["tate"] and doc["summary"]["tate"]["criterion"] == 6
    r = doc["results"]["tate"][0]
    assert {"measured", "expected", "tail_bound", "passed"} <= set(r)


def test_verify_break_measure_fails(capsys):
    code, doc = run_json(capsys, "verify", "--check", "psi", "--primes", "3", "--ranks", "3",
                         "--break-measure", "2", "--summary")
    assert code == EXIT_FAIL and not doc["passed"]
    assert doc["summary"]["psi"]["failures"] == 4 and "results" not in doc
    code, doc = run_json(capsys, "verify", "--check", "psi", "--primes", "3", "--ranks", "3")
    assert code == EXIT_OK


def test_verify_threads_deterministic(capsys):
    docs = []
    for w in ("1", "3"):
        _, doc = run_json(capsys, "verify", "--check", "delta", "--check", "tate", "--check", "poles",
                          "--primes", "3", "--workers", w)
        for s in doc["summary"].values():
            s.pop("seconds")
        doc["config"].pop("seed")
        docs.append(doc)
    assert sorted(docs[0]["summary"]) == ["delta", "poles", "tate"]
    assert docs[0] == docs[1]


def test_json_is_canonical(capsys):
    for argv in (["gamma", "--p", "5", "--l", "3"], ["parameter", "--p", "3"],
                 ["verify", "--check", "delta", "--primes", "3"]):
        _, out, _ = run(capsys, *argv)
        assert dump(json.loads(out)) + "\n" == out


def test_text_format(capsys):
    code, out, _ = run(capsys, "poles", "--p", "3", "--format", "text")
    assert code == EXIT_OK and "2 of 4 characters give a pole" in out
    code, out, _ = run(capsys, "verify", "--check", "tate", "--format", "text")
    assert "[PASS] criterion 6 tate" in out


def test_truncation_env(capsys, monkeypatch):
    monkeypatch.setenv("GAMMA_TRUNC_DEFAULT", "9,3")
    _, doc = run_json(capsys, "poles", "--p", "3")
    assert doc["config"]["truncation"] == {"N_v": 9, "N_u": 3, "tail": "close"}
    _, doc = run_json(capsys, "poles", "--p", "3", "--trunc", "14,2")
    assert doc["config"]["truncation"]["N_v"] == 14


def test_output_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert main(["parameter", "--p", "3", "-o", str(path)]) == EXIT_OK
    assert json.loads(path.read_text())["schema"] == "v1"


def test_run_config_alpha_class():
    assert RunConfig(p=5, alpha_class="nonsquare").validate().alpha == 2
    assert RunConfig(p=7).alpha == 1
