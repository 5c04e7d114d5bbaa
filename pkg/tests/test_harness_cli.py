import json

import numpy as np
import pytest

from plurirank.cli import main
from plurirank.currents import (
    generate_plane_current,
    generate_rank_violation,
    generate_union_current,
    save_current,
)
from plurirank.errors import DomainError
from plurirank.harness import rank_bounds, singularity_experiment, verify_theorem
from plurirank.projective import haar_points


@pytest.mark.parametrize("value, expected", [(2.0, (1, 2)), (1.8, (1, 2)), (1.74, (0, 1)), (3.9, (2, 3)), (4.3, (2, 3))])
def test_rank_bounds(value, expected):
    assert rank_bounds(value) == expected


@pytest.fixture(scope="module")
def line_report():
    return verify_theorem(generate_plane_current(3, 1, 1500, seed=4), seed=2)


def test_verify_plane_current(line_report):
    rep = line_report
    assert rep.eq1_satisfied and not rep.violations()
    assert rep.ell == 2 and rep.rank_upper_bound == 1
    assert rep.per_atom_ranks == {"1": 1500}
    assert rep.ac_checks == (True, True)
    assert rep.degenerate_clusters == 0
    assert rep.contradiction is None


def test_verify_report_is_self_consistent(line_report):
    d = line_report.as_dict()
    bound = int(np.floor((d["dim_estimate"]["value"] + d["dim_tolerance"]) / 2))
    assert d["rank_upper_bound"] == bound and d["ell"] == bound + 1
    ranks = [int(r) for r, c in d["per_atom_ranks"].items() for _ in range(c)]
    assert d["eq1_satisfied"] == all(d["p"] <= r <= bound for r in ranks)
    json.dumps(d, allow_nan=False)


def test_verify_flags_rank_violation():
    rep = verify_theorem(generate_rank_violation(4, 1, 1500, 4, seed=1), seed=3)
    assert not rep.eq1_satisfied
    assert rep.violations()
    c = rep.contradiction
    assert c["atoms_rank_at_least_ell"] == 1
    assert c["domination_step"] == "assumed"
    assert c["generic_pushed_rank_at_least_ell_fraction"] == 1.0


def test_verify_needs_enough_atoms():
    with pytest.raises(DomainError):
        verify_theorem(generate_plane_current(2, 1, 50, 0), seed=0)


def test_singularity_experiment():
    T = generate_plane_current(3, 1, 800, seed=1)
    out = singularity_experiment(T.points, T.weights, 2, 4, seed=0)
    assert out["singular_fraction"] == 1.0
    assert all(abs(v - 2.0) < 0.3 for v in out["projected_dims"])
    full = singularity_experiment(haar_points(2, 800, np.random.default_rng(0)), None, 2, 2, seed=0)
    assert full["singular_fraction"] == 0.0
    assert singularity_experiment(T.points, T.weights, 2, 0, seed=0)["singular_fraction"] is None


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_gen_verify_rank(tmp_path, capsys):
    data = tmp_path / "line.json"
    code, out, _ = _run(capsys, "gen", "plane", "--k", 2, "--p", 1, "--n", 300, "--seed", 1, "-o", data)
    assert code == 0 and json.loads(out)["metrics"]["atoms"] == 300
    code, out, _ = _run(capsys, "verify", "--in", data, "--seed", 2, "-o", tmp_path / "v.json")
    rep = json.loads(out)
    assert code == 0 and rep["metrics"]["eq1_satisfied"] and rep["violations"] == []
    assert json.loads((tmp_path / "v.json").read_text()) == rep
    code, out, _ = _run(capsys, "rank", "--in", data)
    assert code == 0 and json.loads(out)["metrics"]["rank_histogram"] == {"1": 300}


def test_cli_verify_violation_exits_3(tmp_path, capsys):
    data = tmp_path / "bad.json"
    save_current(generate_rank_violation(4, 1, 400, 4, seed=2), data)
    code, out, _ = _run(capsys, "verify", "--in", data, "--seed", 1)
    assert code == 3 and json.loads(out)["violations"]


def test_cli_validation_and_usage_errors(tmp_path, capsys):
    data = tmp_path / "x.json"
    save_current(generate_plane_current(2, 1, 5, seed=0), data)
    d = json.loads(data.read_text())
    d["atoms"][3]["weight"] = 0
    data.write_text(json.dumps(d))
    code, _, err = _run(capsys, "rank", "--in", data)
    assert code == 2 and "atom 3" in err
    assert _run(capsys, "rank", "--in", tmp_path / "missing.json")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["rank", "--in", str(data), "--bogus"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["verify", "--in", str(data)])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["genericity", "--shape", "4,1,2", "--seed", "0"])
    assert info.value.code == 1


def test_cli_project_dim_singularity(tmp_path, capsys):
    data = tmp_path / "u.json"
    save_current(generate_union_current(3, 1, 2, 300, seed=5), data)
    code, out, _ = _run(
        capsys, "project", "--in", data, "--ell", 2, "--seed", 1, "-o", tmp_path / "p.json", "--report", tmp_path / "r.json"
    )
    m = json.loads(out)["metrics"]
    assert code == 0 and m["output_atoms"] == 300 and m["degenerate_clusters"] == []
    assert json.loads((tmp_path / "p.json").read_text())["k"] == 2
    code, out, _ = _run(capsys, "dim", "--in", data, "--seed", 0, "--csv", tmp_path / "c.csv")
    assert code == 0 and (tmp_path / "c.csv").exists()
    code, out, _ = _run(capsys, "singularity", "--in", data, "--ell", 2, "--trials", 2, "--seed", 0)
    assert code == 0 and len(json.loads(out)["metrics"]["projected_dims"]) == 2


def test_cli_genericity(capsys):
    code, out, _ = _run(capsys, "genericity", "--shape", "5,2,3,4", "--trials", 100, "--adversarial", 10, "--seed", 4)
    m = json.loads(out)["metrics"]
    assert code == 0
    assert m["lemma_ii"]["failures"] == 0 and m["injectivity"]["failures"] == 0
    assert m["adversarial"]["certified_by"]["none"] == 0
