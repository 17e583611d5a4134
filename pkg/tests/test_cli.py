import json

import jsonschema
import pytest

from conftest import MODELS
from polyctmc.cli import EXIT_ASSUMPTION, EXIT_OK, EXIT_PARSE, default_bound, main
from polyctmc.report import load_schema, validate


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    doc = json.loads(out)
    validate(doc)
    return code, doc, err


def write(tmp_path, text, name="m.crn"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_params_line_srn2(capsys):
    code, out, _ = run(capsys, "params", MODELS / "srn2_m1.crn")
    assert code == EXIT_OK
    assert out.strip() == "R=2 alpha=0 beta=-3 gamma=0"


def test_classify_pair_explosive(capsys):
    code, doc, _ = run_json(capsys, "classify", MODELS / "pair_explosive.crn")
    assert code == EXIT_OK
    ex = doc["classification"]["explosive"]
    assert ex["value"] == "holds"
    assert ex["theorem"] == "Thm th-7"
    assert "C2" in ex["conditions"]
    assert doc["parameters"]["R"] == 4
    assert doc["parameters"]["alpha"] == "0/1"


def test_classify_verhulst(capsys):
    code, doc, _ = run_json(capsys, "classify", MODELS / "verhulst.crn")
    assert code == EXIT_OK
    q = doc["classification"]["qsd"]
    assert q["value"] == "holds"
    assert q["theorem"] == "Thm th-9(ii)/cor-infinite-ergodicity"
    assert doc["classification"]["certain_absorption"]["value"] == "holds"


def test_text_and_json_share_report(capsys):
    code, text, _ = run(capsys, "classify", MODELS / "pair_implosive.crn")
    _, doc, _ = run_json(capsys, "classify", MODELS / "pair_implosive.crn")
    assert code == EXIT_OK
    assert "R=3 alpha=0 beta=0" in text
    for k, v in doc["classification"].items():
        if isinstance(v, dict) and "value" in v:
            assert f"{k.replace('_', ' ')}: {v['value']}  [{v['theorem']}" in text


def test_malformed_arrow_exit_1(capsys, tmp_path):
    p = write(tmp_path, "# comment\nS -> 2S @ 1\nS => 0 @ 1\n")
    code, out, err = run(capsys, "classify", p)
    assert code == EXIT_PARSE
    assert out == ""
    assert "line 3: expected '->' or '<->'" in err


def test_missing_file_exit_1(capsys, tmp_path):
    code, _, err = run(capsys, "params", tmp_path / "nope.crn")
    assert code == EXIT_PARSE
    assert "error:" in err


def test_assumption_violation_exit_2(capsys, tmp_path):
    # no way back down from 1 and 1 is not absorbing: irreducibility fails
    p = write(tmp_path, "S -> 2S @ 1\nabsorbing = {0}\n")
    code, doc, err = run_json(capsys, "classify", p)
    assert code == EXIT_ASSUMPTION
    assert doc["classification"] is None
    assert doc["errors"] and "violated" in err
    code, _, _ = run(capsys, "check", p)
    assert code == EXIT_ASSUMPTION


def test_builder_hypothesis_exit_2(capsys, tmp_path):
    p = write(tmp_path, "model = runaway\nc = 1\nK = 0\nmu = dirac(2)\n")
    code, _, err = run(capsys, "classify", p)
    assert code == EXIT_ASSUMPTION
    assert err.startswith("error:")


def test_check_reports_assumptions(capsys):
    code, doc, _ = run_json(capsys, "check", MODELS / "c12.crn", "--bound", "40")
    assert code == EXIT_OK
    assert doc["assumptions"]["positivity_bound"] == 40
    assert doc["parameters"] is None


def test_default_bound():
    from conftest import load_model

    spec = load_model("pair_explosive.crn")
    assert default_bound(spec) == spec.tail_threshold + 10


@pytest.mark.parametrize("path", sorted(MODELS.glob("*.crn")), ids=lambda p: p.stem)
def test_every_fixture_validates(capsys, path):
    code, doc, _ = run_json(capsys, "classify", path)
    assert code == EXIT_OK
    assert doc["schema_version"] == "1.0"
    for v in doc["classification"].values():
        if isinstance(v, dict) and "value" in v:
            assert v["theorem"].startswith("Thm ")


def test_schema_rejects_float_rational(capsys):
    _, doc, _ = run_json(capsys, "params", MODELS / "c3.crn")
    doc["parameters"]["alpha"] = 0.5
    with pytest.raises(jsonschema.ValidationError):
        validate(doc)


def test_shipped_schema_matches_docs():
    docs = MODELS.parent / "docs" / "report.schema.json"
    assert json.loads(docs.read_text()) == load_schema()


def test_simulate_seed_repeatable(capsys):
    args = ("simulate", MODELS / "runaway.crn", "--x0", "10", "--state-cap", "10000", "--trials", "300", "--seed", "7")
    _, a, _ = run_json(capsys, *args)
    _, b, _ = run_json(capsys, *args, "--workers", "2")
    assert a["simulation"] == b["simulation"]
    assert a["seed"] == 7
    assert a["simulation"]["trials"] == 300


def test_simulate_target_and_csv(capsys, tmp_path):
    csv_path = tmp_path / "trials.csv"
    code, doc, _ = run_json(
        capsys, "simulate", MODELS / "c12.crn", "--x0", "20", "--target", "0-5",
        "--t-max", "50", "--trials", "50", "--csv", csv_path,
    )
    assert code == EXIT_OK
    assert doc["simulation"]["config"]["target_set"] == [0, 1, 2, 3, 4, 5]
    assert len(csv_path.read_text().splitlines()) == 51


def test_simulate_bad_option(capsys):
    code, _, err = run(capsys, "simulate", MODELS / "c3.crn", "--x0", "5", "--state-cap", "3")
    assert code == EXIT_PARSE
    assert "state_cap" in err


def test_qfcheck_pow_errors_decrease(capsys):
    code, doc, _ = run_json(
        capsys, "qfcheck", MODELS / "bdp_j2.crn", "--family", "pow", "--delta", "0.5", "--grid", "100,1000,10000"
    )
    assert code == EXIT_OK
    errs = [r["rel_error"] for r in doc["expansion"]["rows"]]
    assert errs == sorted(errs, reverse=True)
    code, text, _ = run(capsys, "qfcheck", MODELS / "bdp_j2.crn", "--delta", "0.5")
    assert "rel. error" in text


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "polyctmc" in capsys.readouterr().out
