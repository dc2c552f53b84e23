import csv
import io
import json
import math

import pytest

import cli
from config import Config
from tree_core import canonical_form, parse_edge_list, path_tree


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_grow_tgraph_dot(capsys):
    code, out, _ = _run(capsys, "grow", "--family", "tgraph", "-t", "2", "--format", "dot")
    assert code == cli.EXIT_OK
    assert out.startswith("// family=tgraph t=2 predicted |V|=10 |E|=9")
    assert sum(1 for line in out.splitlines() if "[gen=" in line) == 10
    assert sum(1 for line in out.splitlines() if " -- " in line) == 9


def test_grow_cayley_edge_list_header(capsys):
    code, out, _ = _run(capsys, "grow", "--family", "cayley", "-n", "4", "-t", "3", "--format", "edges")
    assert code == cli.EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith("# family=cayley n=4 seed=star t=3")
    assert lines[1] == "53 52"
    assert parse_edge_list(out).n == 53


def test_grow_subdivided_edge_is_path(capsys):
    code, out, _ = _run(capsys, "grow", "--family", "subdivision", "-m", "2", "-t", "1")
    assert code == cli.EXIT_OK
    assert canonical_form(parse_edge_list(out)) == canonical_form(path_tree(4))


def test_grow_exponential_json_report(capsys):
    code, out, _ = _run(capsys, "grow", "--family", "exponential", "-m", "1", "-t", "4", "--format", "json")
    assert code == cli.EXIT_OK
    report = json.loads(out)
    assert report["vertices"] == 32
    assert report["edges"] == 31
    assert set(report["predicted"]) == {"as_printed", "corrected"}
    assert len(report["degree_tail"]) == 2
    assert report["average_degree"] == "31/16"


def test_grow_csv_edges(capsys):
    _, out, _ = _run(capsys, "grow", "--family", "tgraph", "-t", "1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["u", "v"]
    assert len(rows) == 4


def test_wiener_tgraph_json(capsys):
    code, out, _ = _run(capsys, "wiener", "--family", "tgraph", "-t", "2", "--format", "json")
    assert code == cli.EXIT_OK
    report = json.loads(out)
    assert report["canonical"] == "117"
    assert report["oracle"] == "117"
    assert [f["verdict"] for f in report["formulas"]] == ["match"]


def test_wiener_reports_printed_theorem2_mismatch(capsys):
    _, out, _ = _run(capsys, "wiener", "--family", "star_fractal", "-w", "1", "-m", "1", "-t", "1", "--format", "json")
    report = json.loads(out)
    assert report["oracle"] == "9"
    by_name = {f["formula"]["name"]: f for f in report["formulas"]}
    assert by_name["Thm2_Eq22"]["formula_value"] == "23/3"
    assert by_name["Thm2_Eq22"]["verdict"] == "mismatch"
    assert by_name["Cor5_StarWm_t"]["verdict"] == "undefined"


def test_wiener_text_lists_canonical_value(capsys):
    _, out, _ = _run(capsys, "wiener", "--family", "cayley", "-n", "3", "-t", "3")
    assert "canonical  909" in out
    assert "Eq45_Cayley/as_printed" in out


def test_wiener_reads_config_file(capsys, tmp_path):
    path = tmp_path / "model.cfg"
    path.write_text("# exponential tree\nfamily=exponential\nm=2\n", encoding="utf-8")
    _, out, _ = _run(capsys, "wiener", "--config", str(path), "-t", "1", "--format", "json")
    assert json.loads(out)["canonical"] == "29"


def test_mfpt_exact_and_factor(capsys):
    code, out, _ = _run(capsys, "mfpt", "--family", "tgraph", "-t", "2", "--format", "json")
    assert code == cli.EXIT_OK
    report = json.loads(out)
    assert report["exact"] == "117/5"
    assert report["from_wiener_2S_over_V"] == "117/5"
    assert report["lemma_factor"] == "2"


def test_mfpt_text_with_monte_carlo(capsys):
    code, out, _ = _run(capsys, "mfpt", "--family", "tgraph", "-t", "1", "--mc-trials", "500", "--rng-seed", "5")
    assert code == cli.EXIT_OK
    assert "monte carlo" in out
    assert "exact            9/2" in out


def test_scale_tgraph_json(capsys):
    code, out, _ = _run(capsys, "scale", "--family", "tgraph", "--t-min", "4", "--t-max", "10", "--format", "json")
    assert code == cli.EXIT_OK
    report = json.loads(out)
    assert report["fit"]["analytic_exponent"] == pytest.approx(math.log(6) / math.log(3))
    assert report["dimensions"]["kind"] == "fractal"
    assert report["persistence"] == "persistent"
    assert report["delta_v"]["limit"] == "2"


def test_scale_plot_data(capsys):
    _, out, _ = _run(capsys, "scale", "--family", "exponential", "-m", "1", "--t-min", "1", "--t-max", "5", "--plot-data")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "y"]
    assert len(rows) == 6


def test_solve_dim_csv(capsys):
    code, out, _ = _run(capsys, "solve-dim", "--max", "10", "--format", "csv")
    assert code == cli.EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert ["3", "4", "2", "2.000000", "m+2=2^k,w+1=2^j"] in rows


def test_solve_dim_text_counts_solutions(capsys):
    _, out, _ = _run(capsys, "solve-dim", "--max", "5")
    assert out.rstrip().endswith("solutions")


@pytest.mark.parametrize("argv", [
    ["grow", "-t", "2"],
    ["grow", "--family", "subdivision", "-m", "0"],
    ["grow", "--family", "tgraph", "-w", "2"],
    ["wiener", "--family", "tgraph", "--format", "dot"],
    ["scale", "--family", "tgraph", "--t-min", "5", "--t-max", "2"],
    ["scale", "--family", "tgraph", "--t-min", "1", "--t-max", "2"],
    ["grow", "--family", "cayley", "--seed", "0-1,1-2", "-t", "1"],
    ["frobnicate"],
])
def test_usage_errors_exit_one(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == cli.EXIT_USAGE
    assert out == ""
    assert err.startswith("error:")


def test_resource_cap_exits_three(capsys, monkeypatch):
    monkeypatch.setattr(Config, "MAX_VERTICES", 20)
    code, _, err = _run(capsys, "grow", "--family", "tgraph", "-t", "3")
    assert code == cli.EXIT_RESOURCE_CAP
    assert "cap 20" in err


def test_output_goes_to_output_dir(capsys, monkeypatch, tmp_path):
    monkeypatch.setattr(Config, "OUTPUT_DIR", str(tmp_path))
    code, out, _ = _run(capsys, "grow", "--family", "tgraph", "-t", "1", "--output", "t1.txt")
    assert code == cli.EXIT_OK
    assert out == ""
    assert (tmp_path / "t1.txt").read_text(encoding="utf-8").splitlines()[1] == "4 3"


def test_verify_quick_writes_ledger(capsys, tmp_path):
    code, out, _ = _run(capsys, "verify", "--quick", "--ledger-dir", str(tmp_path))
    assert code == cli.EXIT_OK
    assert out.rstrip().endswith("canonical: all pass")
    assert (tmp_path / "audit_ledger.txt").read_text(encoding="utf-8") == out
    assert (tmp_path / "audit_records.jsonl").stat().st_size > 0
