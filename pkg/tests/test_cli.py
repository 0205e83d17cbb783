import numpy as np

from batchbo.cli import main
from batchbo.lattice import generate


CONFIG = """
objective.name = ackley
objective.dimension = 2
run.rounds = 2
init.lattice = 4
init.primes = 3
inner.budget = 200
inner.restarts = 2
run.seeds = 1, 2
"""


def test_lattice_search_alg6(capsys):
    rc = main(["lattice", "search", "--method", "alg6", "--dim", "3",
               "--points", "32", "--primes", "3"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "base" in out and "2rho" in out


def test_lattice_search_korobov(capsys):
    rc = main(["lattice", "search", "--method", "korobov", "--dim", "2", "--points", "16"])
    assert rc == 0
    assert "rho" in capsys.readouterr().out


def test_lattice_search_scs(capsys):
    rc = main(["lattice", "search", "--method", "scs", "--dim", "2",
               "--points", "16", "--scs-iters", "2"])
    assert rc == 0


def test_lattice_gen_writes_points(tmp_path, capsys):
    out = tmp_path / "pts.txt"
    rc = main(["lattice", "gen", "--base", "1,2", "--points", "5", "--out", str(out)])
    assert rc == 0
    pts = np.loadtxt(out)
    np.testing.assert_array_equal(pts, generate(np.array([1, 2]), 5).points)
    # 17 significant digits survive a round trip bitwise
    text = out.read_text()
    for v in pts.ravel():
        assert float(("%.17g" % v)) == v
    assert "%.17g" % (2.0 / 5.0) in text


def test_lattice_gen_invalid_points(capsys):
    rc = main(["lattice", "gen", "--base", "1,2", "--points", "1", "--out", "/tmp/x.txt"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_run_command(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CONFIG)
    rc = main(["run", "--config", str(cfg), "--seeds", "3", "--out", str(tmp_path / "res")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "seed 3" in out
    assert (tmp_path / "res" / "trace_seed3.tsv").exists()


def test_run_all_config_seeds(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CONFIG)
    rc = main(["run", "--config", str(cfg)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "seed 1" in out and "seed 2" in out


def test_suite_command(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CONFIG)
    rc = main(["suite", "--config", str(cfg), "--reps", "2", "--out", str(tmp_path / "res")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "final simple regret" in out
    assert (tmp_path / "res" / "suite.tsv").exists()


def test_missing_config_errors(capsys):
    rc = main(["run", "--config", "/nonexistent/run.cfg"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_bad_config_key_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("objective.name = ackley\nobjective.shape = round\n")
    rc = main(["run", "--config", str(cfg)])
    assert rc == 1
    assert "unknown key" in capsys.readouterr().err


def test_perturbation_run(tmp_path, capsys):
    cfg = tmp_path / "p.cfg"
    cfg.write_text(
        CONFIG
        + "acquisition.mode = perturbation\nacquisition.regularizer = 0.01\n"
        + "objective.noise_scale = 0.1\n"
    )
    rc = main(["run", "--config", str(cfg), "--seeds", "1"])
    assert rc == 0
