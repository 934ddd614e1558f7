# tests/test_cli.py

import json

import pytest

from main import main
from rscavity.api.experiments import parse_literals
from rscavity.core.cnf import Literal
from rscavity.utils.errors import InputError
from rscavity.utils.run_logger import RunLogger

pytestmark = pytest.mark.usefixtures("isolated_settings")


@pytest.fixture
def cnf_file(tmp_path):
    path = tmp_path / "single.cnf"
    path.write_text("c one clause\np cnf 3 1\n1 2 3 0\n", encoding="utf-8")
    return path


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_parse_literals():
    assert parse_literals("1,-3") == [Literal(1, 1), Literal(3, -1)]
    assert parse_literals(None) == []
    with pytest.raises(InputError):
        parse_literals("1,zero")


def test_table1_csv(tmp_path):
    out = tmp_path / "t1.csv"
    assert main(["table1", "--quiet", "--output", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "k,d_giant,d_ms,d_con,d_pure,d_sat_ref"
    assert lines[1].startswith("2,1.0000,")
    assert lines[1].endswith(",2.0000,2.0000,2.0000")
    assert lines[2] == "3,0.5000,0.8792,1.3431,4.9108,12.8010"
    assert "# manifest:" in lines


def test_table1_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["table1", "--quiet", "--output", str(a)])
    main(["table1", "--quiet", "--output", str(b), "--threads", "3"])
    assert a.read_bytes() == b.read_bytes()


def test_thresholds_json(capsys):
    assert main(["thresholds", "--k", "3", "--d", "1.0", "--quiet"]) == 0
    data = _json_out(capsys)["data"]
    assert data["d_giant"] == 0.5
    assert data["moment_bounds"]["first_moment"] == pytest.approx(0.648637, abs=1e-6)


def test_count(cnf_file, capsys):
    assert main(["count", str(cnf_file), "--marginals", "--quiet"]) == 0
    out = _json_out(capsys)
    assert out["data"]["count"] == "7"
    assert out["data"]["marginals"][0] == "4/7"
    assert out["manifest"]["command"] == "count"


def test_count_conditioned(cnf_file, capsys):
    assert main(["count", str(cnf_file), "--literals", "1", "--quiet"]) == 0
    assert _json_out(capsys)["data"]["count"] == "4"


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 3 1\n1 1 2 0\n", encoding="utf-8")
    assert main(["count", str(bad)]) == 2
    assert "repeated variable" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert main(["count", str(tmp_path / "nope.cnf"), "--quiet"]) == 2


def test_cap_exit_code(tmp_path):
    path = tmp_path / "chain.cnf"
    path.write_text("p cnf 5 2\n1 2 3 0\n3 4 5 0\n", encoding="utf-8")
    assert main(["count", str(path), "--cap", "3", "--quiet"]) == 3


def test_pulp_run(cnf_file, capsys):
    assert main(["pulp", "run", str(cnf_file), "--literals=-1", "--quiet"]) == 0
    data = _json_out(capsys)["data"]
    assert data["outcome"] == "closure"
    assert data["closure"] == [-1, 2]
    assert data["valid"] is True


def test_pulp_heights_csv(tmp_path, capsys):
    path = tmp_path / "four.cnf"
    path.write_text("p cnf 6 4\n1 2 3 0\n-1 4 5 0\n-2 5 6 0\n-3 6 4 0\n", encoding="utf-8")
    assert main(["pulp", "heights", str(path), "--quiet"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "var,height_pos,height_neg"
    assert lines[1] == "1,1,2"


def test_tree_marginal(capsys):
    assert main(["tree", "marginal", "--d", "1.0", "--depth", "2", "--seed", "3", "--quiet"]) == 0
    data = _json_out(capsys)["data"]
    num, den = (int(x) for x in data["exact"].split("/"))
    assert data["recursion"] == pytest.approx(num / den, abs=1e-10)
    assert data["conditioned"] >= data["recursion"] - 1e-12


def test_popdyn_saves_population(tmp_path, capsys):
    target = tmp_path / "pop.f64"
    argv = ["popdyn", "--d", "1.0", "--pop", "2000", "--iters", "3", "--save", str(target), "--quiet"]
    assert main(argv) == 0
    assert target.exists()
    assert (tmp_path / "pop.f64.json").exists()
    assert len(_json_out(capsys)["data"]["w1_trace"]) == 3

    assert main(["bethe", "--d", "1.0", "--population", str(target), "--mc", "2000", "--quiet"]) == 0
    assert _json_out(capsys)["data"]["population_size"] == 2000


def test_runs_are_logged(cnf_file, tmp_path):
    main(["count", str(cnf_file), "--quiet"])
    main(["count", str(tmp_path / "missing.cnf"), "--quiet"])
    stats = RunLogger().recent_stats()
    assert stats["total_runs"] == 2
    assert stats["failure_rate"] == 0.5


def test_manifest_parameters_exclude_runtime_flags(cnf_file, capsys):
    main(["count", str(cnf_file), "--quiet", "--threads", "2"])
    params = _json_out(capsys)["manifest"]["parameters"]
    assert "threads" not in params
    assert "quiet" not in params
    assert params["path"] == str(cnf_file)



def _csv_rows(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


SMALL_POP = ["--pop", "1000", "--iters", "2", "--mc", "1000"]


def test_figure1_csv_is_thread_independent(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["figure1", "--d-min", "0", "--d-max", "0.4", "--step", "0.2", *SMALL_POP, "--quiet"]
    assert main(argv + ["--output", str(a), "--threads", "1"]) == 0
    assert main(argv + ["--output", str(b), "--threads", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _csv_rows(a.read_text(encoding="utf-8"))
    assert rows[0] == "d,bethe,bethe_se,first_moment,second_moment"
    assert len(rows) == 4


def test_verify_json(capsys):
    argv = ["verify", "--n", "8", "--samples", "6", "--trend", "6", "8", *SMALL_POP, "--quiet"]
    assert main(argv) == 0
    data = _json_out(capsys)["data"]
    assert [row["n"] for row in data["trend"]] == [6, 8]
    assert isinstance(data["gap_shrinking"], bool)


def test_increment_json(capsys):
    assert main(["increment", "--n", "6", "--samples", "4", *SMALL_POP, "--quiet"]) == 0
    data = _json_out(capsys)["data"]
    assert data["increment"]["samples"] == 4
    assert "z_score" in data


def test_pulp_tail_csv(capsys):
    assert main(["pulp", "tail", "--h-max", "3", "--depth", "4", "--trials", "200", "--quiet"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert rows[0] == "h,empirical_pos,empirical_neg,analytic,sigma"
    assert [row.split(",")[0] for row in rows[1:]] == ["1", "2", "3"]


def test_pulp_sizes_json(capsys):
    assert main(["pulp", "sizes", "--n", "10", "--trials", "10", "--check-bound", "--quiet"]) == 0
    data = _json_out(capsys)["data"]
    assert data["trials"] == 10
    assert data["bound_violations"] == 0
    assert data["closure_violations"] == 0


def test_tree_boundary_gap_csv(capsys):
    assert main(["tree", "boundary-gap", "--depth", "2", "--trials", "40", "--quiet"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert rows[0] == "depth,mean_gap,std_error,q50,q95,min_gap"
    assert [row.split(",")[0] for row in rows[1:]] == ["1", "2"]


def test_uniq_contraction_json(capsys):
    assert main(["uniq", "contraction", "--pop", "500", "--trials", "2", "--quiet"]) == 0
    data = _json_out(capsys)["data"]
    assert data["constant"] == pytest.approx(0.696735, abs=1e-6)
    assert len(data["ratios"]) + data["skipped"] == 2
    assert data["within_constant"] in (True, False)


def test_selftest_rejects_unreadable_reference(tmp_path):
    bad = tmp_path / "ref.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["selftest", "--reference", str(bad), "--quiet"]) == 2


@pytest.mark.slow
def test_selftest_wrong_reference_exits_with_invariant_code(tmp_path, capsys):
    ref = tmp_path / "ref.json"
    ref.write_text(json.dumps({"3": [0.5, 0.8792, 1.3431, 5.0]}), encoding="utf-8")
    assert main(["selftest", "--reference", str(ref), "--quiet"]) == 4
    captured = capsys.readouterr()
    assert "table1_constants" in captured.err
    assert json.loads(captured.out)["data"]["failed"] == ["table1_constants"]


@pytest.mark.slow
def test_selftest_passes(capsys):
    assert main(["selftest", "--quiet"]) == 0
    report = _json_out(capsys)["data"]
    assert report["passed"]
    assert report["failed"] == []
