import json

import pytest

from src.cli import run
from src.services.errors import VerificationError
from src.services.verify import CheckResult, SuiteReport


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_twopoint_json(capsys):
    code, out, _ = invoke(capsys, "twopoint", "--family", "general", "--i", "1", "--order", "3")

    assert code == 0
    data = json.loads(out)
    assert data["family"] == "GeneralMap"
    assert data["series"]["R_1"]["terms"][:2] == [["0", "1", "1", "1"], ["1", "1", "1", "1"]]


def test_identical_invocations_give_identical_output(capsys):
    argv = ("twopoint", "--family", "3-hypermap", "--i", "2", "--order", "2")
    _, first, _ = invoke(capsys, *argv)
    _, second, _ = invoke(capsys, *argv)

    assert first == second
    assert list(json.loads(first)) == sorted(json.loads(first))


def test_twopoint_csv(capsys):
    code, out, _ = invoke(
        capsys, "twopoint", "--i", "1", "--order", "2", "--provenance", "recurrence",
        "--format", "csv", "--series", "T_1",
    )

    assert code == 0
    assert out.splitlines() == ["exponent,coefficient", "0,1", "1,2", "2,9"]


def test_twopoint_missing_series(capsys):
    code, _, err = invoke(capsys, "twopoint", "--order", "2", "--format", "csv", "--series", "W_1")

    assert code == 2
    assert "W_1" in err


def test_twopoint_rational_weight(capsys):
    code, out, _ = invoke(capsys, "twopoint", "--family", "general-2par", "--order", "2", "--z", "2/3")

    assert code == 0
    assert json.loads(out)["z"] == "2/3"


def test_exact_asymptotics(capsys):
    code, out, _ = invoke(capsys, "asymptotics", "--family", "general", "--i", "1", "--exact")

    assert code == 0
    assert json.loads(out)["constants"]["e_up"] == "28/9"


def test_float_needs_estimator(capsys):
    code, _, err = invoke(capsys, "asymptotics", "--family", "general", "--float")

    assert code == 2
    assert "--float" in err


def test_estimator_as_float(capsys):
    code, out, _ = invoke(capsys, "asymptotics", "--i", "1", "--order", "50", "--float")

    assert code == 0
    estimate = json.loads(out)["estimate"]
    assert isinstance(estimate["estimate"], float)
    assert "constants" not in json.loads(out)


def test_verify_roundtrip(capsys):
    code, out, _ = invoke(capsys, "verify", "--suite", "roundtrip", "--max-edges", "3")

    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True
    assert all(check["cases"] > 0 for check in data["checks"])


def test_verify_failure_prints_witness(capsys, monkeypatch):
    failing = SuiteReport("oracle", [CheckResult("profile:GeneralMap:1", 1, [{"i": 1}])])
    monkeypatch.setattr("src.cli.run_suite", lambda *args: failing)

    code, out, _ = invoke(capsys, "verify", "--suite", "oracle")

    assert code == 1
    assert json.loads(out)["checks"][0]["failures"] == [{"i": 1}]


def test_verification_error_exit_code(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise VerificationError("sampler-class", {"mobile": "1[2]"})

    monkeypatch.setattr("src.cli.sampler_check", broken)
    monkeypatch.setattr("src.cli.cached_counts", lambda *args: None)

    code, out, _ = invoke(capsys, "sample", "--n", "1", "--trials", "5")

    assert code == 1
    assert json.loads(out) == {"check": "sampler-class", "witness": {"mobile": "1[2]"}}


def test_enumerate(capsys):
    code, out, _ = invoke(capsys, "enumerate", "--n", "2", "--family", "general")

    assert code == 0
    assert json.loads(out)["total"] == 9


def test_enumerate_profile(capsys):
    code, out, _ = invoke(capsys, "enumerate", "--n", "1", "--profile", "root")

    assert code == 0
    assert json.loads(out)["pointed_total"] == 3


def test_sample_is_seed_deterministic(capsys, cache_dir):
    _, first, _ = invoke(capsys, "sample", "--n", "2", "--seed", "11")
    _, second, _ = invoke(capsys, "sample", "--n", "2", "--seed", "11")

    assert first == second
    assert json.loads(first)["hypermap"]["pointed"] is not None
    assert (cache_dir / "carto.db").exists()


def test_sample_chi_square(capsys, cache_dir):
    code, out, _ = invoke(capsys, "sample", "--n", "2", "--seed", "3", "--trials", "400")

    assert code == 0
    assert json.loads(out)["classes"] == 18


def test_export_json(capsys, tmp_path):
    target = tmp_path / "out" / "table.json"

    code, out, _ = invoke(capsys, "export", "--family", "bipartite", "--order", "3", "--out", str(target))

    assert code == 0
    assert json.loads(target.read_text())["family"] == "BipartiteMap"
    assert json.loads(out)["written"] == [str(target)]


def test_export_csv(capsys, tmp_path):
    code, _, _ = invoke(
        capsys, "export", "--family", "general", "--i", "2", "--order", "3", "--format", "csv", "--out", str(tmp_path)
    )

    assert code == 0
    assert (tmp_path / "T.csv").read_text().splitlines()[:3] == ["exponent,coefficient", "0,1", "1,3"]
    assert (tmp_path / "R_2.csv").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ("frobnicate",),
        ("enumerate",),
        ("verify", "--suite", "everything"),
        ("twopoint", "--z", "half"),
        ("twopoint", "--family", "Triangulation"),
        ("twopoint", "--order", "601"),
        ("sample", "--n", "9"),
        ("export", "--order", "2"),
    ],
)
def test_usage_errors(capsys, argv):
    code, out, _ = invoke(capsys, *argv)

    assert code == 2
    assert out == ""


@pytest.mark.parametrize(
    "argv",
    [
        ("twopoint", "--i", "0", "--order", "2"),
        ("enumerate", "--n", "6"),
        ("verify", "--suite", "roundtrip", "--max-edges", "9"),
    ],
)
def test_capacity_errors(capsys, argv):
    code, _, err = invoke(capsys, *argv)

    assert code == 2
    assert "error" in err
