import csv
import json

import pytest

from sigmaglue.cli import ConfigError, main, resolve_config


def _run(tmp_path, sub, cfg=None, *extra):
    args = [sub, "--out", str(tmp_path), "--quiet", *extra]
    if cfg is not None:
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        args.insert(1, str(path))
    return main(args)


def _report(tmp_path, sub):
    return json.loads((tmp_path / f"{sub}.report.json").read_text())


@pytest.mark.parametrize("cfg, field", [
    ({"dims": {"n": 6, "k": 3}}, "dims.k"),
    ({"eps": 2.0}, "eps"),
    ({"grid": {"nt": 2000}}, "grid.nt"),
    ({"grid": {"order": 3}}, "grid.order"),
    ({"solver": {"scheme": "picard"}}, "solver.scheme"),
    ({"solver": {"tol": -1}}, "solver.tol"),
    ({"delta": 0.5}, "delta"),
    ({"modes": {"limit_modes": [-1]}}, "modes.limit_modes"),
    ({"colour": 1}, "colour"),
])
def test_config_errors_name_the_field(tmp_path, capsys, cfg, field):
    with pytest.raises(ConfigError) as info:
        resolve_config(cfg)
    assert info.value.field == field
    assert _run(tmp_path, "sigma-table", cfg) == 2
    assert field in capsys.readouterr().err


def test_unreadable_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["sigma-table", str(bad), "--out", str(tmp_path)]) == 2
    assert main(["sigma-table", "--out", str(tmp_path), "--seed", "-1"]) == 2


def test_sigma_table_csv(tmp_path):
    assert _run(tmp_path, "sigma-table") == 0
    with open(tmp_path / "sigma-table.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["j", "sigma_j", "closed_form"]
    assert ["3", "1.75", "1.75"] in rows[1:]


def test_report_echoes_resolved_config(tmp_path):
    assert _run(tmp_path, "sigma-table", {"dims": {"n": 6, "k": 2}}, "--seed", "7") == 0
    rep = _report(tmp_path, "sigma-table")
    assert rep["config"]["dims"] == {"n": 6, "k": 2}
    assert rep["config"]["grid"]["nt"] == 2001
    assert rep["seed"] == 7 and rep["exit_code"] == 0


def test_same_seed_is_bit_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    for d in (a, b):
        assert _run(d, "match-demo", None, "--seed", "11") == 0
    assert (a / "match-demo.csv").read_bytes() == (b / "match-demo.csv").read_bytes()


def test_numerical_failure_exit_code(tmp_path):
    cfg = {"eps": 10 ** -1.5, "solver": {"scheme": "paper-frozen", "max_iter": 3}}
    assert _run(tmp_path, "solve", cfg) == 3
    err = _report(tmp_path, "solve")["error"]
    assert err["type"] == "MaxIterError" and err["diagnostics"]["residuals"]


def test_dtn_converge_j1(tmp_path):
    cfg = {"modes": {"jmax": 2, "limit_modes": [1]}}
    assert _run(tmp_path, "dtn-converge", cfg) == 0
    rep = _report(tmp_path, "dtn-converge")
    assert rep["config"]["eps_sweep"] == [1e-1, 1e-2, 1e-3, 1e-4]


def test_solve_default(tmp_path):
    assert _run(tmp_path, "solve", {"eps": 10 ** -1.5}) == 0
    assert _report(tmp_path, "solve")["passed"]
