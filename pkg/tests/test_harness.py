import csv
import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rwsum.dist_core import ParetoWeight, TwoSidedPareto
from rwsum.errors import ConfigError
from rwsum.harness import ExperimentConfig, parse, render, run_experiment
from rwsum.harness import report
from rwsum.harness.cli import main
from rwsum.harness.zoo import parse_dependence, parse_model, parse_stopping, parse_weights
from rwsum.montecarlo import RatioTable

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"

MINI = """[experiment]
pipeline = verify
samples = 20000
seed = 5

[model]
increments = two_sided_pareto(alpha=1,beta=2)

[grid]
x = 1000, 100
n = 1, 2, 3
"""


# --- zoo strings -------------------------------------------------------------

@pytest.mark.parametrize("text", [
    "two_sided_pareto(alpha=1.0,beta=2.0)",
    "pareto(theta=2.0,c=0.2)",
    "log_perturbed_pareto(alpha=0.5,kappa=1.0)",
    "two_piece(lower=inverse_power_log(rho=12.0),upper=pareto(theta=5.0))",
])
def test_model_roundtrip(text):
    m = parse_model(text)
    assert parse_model(m.spec()) == m


def test_model_case_insensitive_keys():
    assert parse_model("two_sided_pareto(ALPHA=1, Beta=2)") == TwoSidedPareto(1.0, 2.0)
    assert parse_model("pareto(2)") == ParetoWeight(2.0)


def test_dependence_and_weights():
    F = TwoSidedPareto(1.0, 2.0)
    assert parse_dependence("independent", F).marginal() == F
    d = parse_dependence("nuod_pairwise(h=pareto(theta=1),g=symmetric_pareto(beta=3))")
    assert parse_dependence(d.spec()) == d
    w = parse_weights("fixed(w=(2,1))")
    assert w.w == (2.0, 1.0)
    assert parse_stopping("geometric(q=0.5,n_max=60)").n_max == 60


@pytest.mark.parametrize("text", ["nope(1)", "pareto(theta=2", "pareto(zeta=2)", "pareto(theta=-1)"])
def test_model_errors(text):
    with pytest.raises(ConfigError):
        parse_model(text)


# --- config ------------------------------------------------------------------

def test_parse_mini():
    cfg = parse(MINI)
    assert cfg.x_grid == (1000.0, 100.0) and cfg.n_list == (1, 2, 3)
    assert cfg.N == 20000


def test_samples_exponent_notation():
    cfg = parse(MINI.replace("samples = 20000", "samples = 1e7"))
    assert cfg.N == 10_000_000


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 31), N=st.integers(1000, 10 ** 8),
       xs=st.lists(st.floats(1.0, 1e12, allow_nan=False), min_size=1, max_size=6),
       ns=st.lists(st.integers(1, 9), min_size=1, max_size=4),
       tol=st.floats(1e-4, 0.5), est=st.sampled_from(["auto", "crude", "conditional", "ak"]))
def test_config_roundtrip(seed, N, xs, ns, tol, est):
    cfg = ExperimentConfig(increments="two_sided_pareto(alpha=1,beta=2)", x_grid=tuple(xs),
                           n_list=tuple(ns), seed=seed, N=N, tolerance=tol, estimator=est)
    again = parse(render(cfg))
    assert again == cfg
    assert again.digest() == cfg.digest()


@pytest.mark.parametrize("bad,line", [
    (MINI.replace("seed = 5", "seed = five"), 4),
    (MINI.replace("seed = 5", "seed = 5\ncolour = red"), 5),
    (MINI.replace("pipeline = verify", "pipeline = dance"), 2),
    (MINI.replace("two_sided_pareto(alpha=1,beta=2)", "two_sided_pareto(alpha=3,beta=2)"), 7),
])
def test_config_error_positions(bad, line):
    with pytest.raises(ConfigError) as ei:
        parse(bad)
    assert ei.value.position == line


def test_missing_grid():
    with pytest.raises(ConfigError):
        parse("[model]\nincrements = pareto(theta=2)\n")


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.ini")), ids=lambda p: p.name)
def test_shipped_configs_parse(path):
    cfg = parse(path.read_text())
    assert parse(render(cfg)) == cfg


# --- reports -----------------------------------------------------------------

def test_atomic_write_replaces(tmp_path):
    p = tmp_path / "a.csv"
    report.atomic_write(p, "one\n")
    report.atomic_write(p, "two\n")
    assert p.read_text() == "two\n"
    assert [f.name for f in tmp_path.iterdir()] == ["a.csv"]


def test_atomic_write_failure_leaves_no_temp(tmp_path):
    p = tmp_path / "b.csv"
    with pytest.raises(TypeError):
        report.atomic_write(p, None)
    assert list(tmp_path.iterdir()) == []


def test_empty_table_refused(tmp_path):
    from rwsum.errors import InvalidParameter
    with pytest.raises(InvalidParameter):
        report.emit_report(RatioTable([]), tmp_path / "x.csv")


def test_run_experiment_outputs(tmp_path):
    cfg = parse(MINI)
    man = run_experiment(cfg, out_dir=tmp_path)
    with open(tmp_path / "verify.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == report.HEADER
    keys = [(float(r[0]), int(r[1])) for r in rows[1:]]
    assert keys == sorted(keys)
    assert all(float(r[7]) == 1.0 for r in rows[1:] if r[1] == "1")
    data = json.loads((tmp_path / "manifest.json").read_text())
    assert data["seed"] == 5 and data["config_digest"] == cfg.digest()
    for a in data["artifacts"]:
        assert report.sha256_file(tmp_path / a["path"]) == a["sha256"]
    assert man.errors == []


def test_byte_identical_rerun(tmp_path):
    cfg = parse(MINI.replace("x = 1000, 100", "x = 100, 1000, 100000").replace("n = 1, 2, 3", "n = 3, 4"))
    run_experiment(cfg, out_dir=tmp_path / "a")
    run_experiment(cfg, out_dir=tmp_path / "b")
    for name in ("verify.csv", "verify.dat", "config.ini"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_rare_flag_in_csv(tmp_path):
    cfg = parse(MINI.replace("[experiment]", "[experiment]\nestimator = crude")
                .replace("x = 1000, 100", "x = 1e9").replace("n = 1, 2, 3", "n = 2"))
    run_experiment(cfg, out_dir=tmp_path)
    rows = report.read_table(tmp_path / "verify.csv")
    assert rows[0]["flag"] == "rare"


# --- CLI ---------------------------------------------------------------------

def test_cli_tail_eval_stdout(capsys):
    code = main(["tail-eval", "--model", "two_sided_pareto(alpha=1,beta=2)", "--x", "2,0,-2"])
    assert code == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "x,tail,cdf"
    assert out[1].startswith("2,0.25,")
    assert out[2].startswith("0,0.5,")
    assert out[3].startswith("-2,0.875,")


def test_cli_config_error(tmp_path, capsys):
    p = tmp_path / "bad.ini"
    p.write_text(MINI.replace("seed = 5", "seed = five"))
    assert main(["verify", "--config", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_missing_args():
    assert main(["verify"]) == 2


def test_cli_numeric_error(tmp_path):
    # infinite-horizon ruin with E Y^alpha >= 1 has no finite approximation
    p = tmp_path / "inf.ini"
    p.write_text("[experiment]\npipeline = ruin\nsamples = 2000\n\n[model]\n"
                 "increments = two_sided_pareto(alpha=1,beta=2)\ndiscount = pareto(theta=2)\n"
                 "stopping = infinite(n_max=5)\n\n[grid]\nx = 100\n")
    assert main(["ruin", "--config", str(p), "--out", str(tmp_path / "o")]) == 3
    rows = report.read_table(tmp_path / "o" / "ruin.csv")
    assert rows[0]["flag"] == "error:PreconditionError"


def test_cli_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code = main(["verify", "--model", "two_sided_pareto(alpha=1,beta=2)", "--x", "100",
                 "--n", "1", "--out", str(blocker / "sub")])
    assert code == 4


def test_cli_verify_and_report(tmp_path, capsys):
    out = tmp_path / "r"
    assert main(["verify", "--model", "two_sided_pareto(alpha=1,beta=2)", "--x", "100,1000",
                 "--n", "1,2", "--samples", "5000", "--seed", "3", "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["report", str(out / "verify.csv")]) == 0
    text = capsys.readouterr().out
    assert "4 rows" in text


def test_cli_seed_override(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["verify", "--model", "two_sided_pareto(alpha=1,beta=2)", "--x", "100",
            "--n", "3", "--samples", "5000", "--estimator", "crude"]
    assert main(args + ["--seed", "1", "--out", str(a)]) == 0
    assert main(args + ["--seed", "2", "--out", str(b)]) == 0
    assert (a / "verify.csv").read_bytes() != (b / "verify.csv").read_bytes()


def test_cli_checks(tmp_path):
    assert main(["checks", "--config", str(CONFIGS / "checks_oscillating.ini"),
                 "--out", str(tmp_path)]) == 0
    rows = report.read_table(tmp_path / "checks.csv")
    assert {r["verdict"] for r in rows if r["check_id"] == "i_step_ratio"} == {"not_in_L0"}
