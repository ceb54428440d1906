import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from gdslab.cli import main
from gdslab.config import ConfigError, ExperimentConfig, format_value, loads, parse_value

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

scalars = st.one_of(st.integers(-10**6, 10**6), st.floats(allow_nan=False, allow_infinity=False),
                    st.booleans(), st.sampled_from(["linear", "bohr", "exact-sinc"]))
values = st.one_of(scalars, st.lists(st.one_of(st.integers(-999, 999), st.floats(-1e6, 1e6)), min_size=1, max_size=5))


@given(values)
def test_value_round_trip(v):
    assert parse_value(format_value(v)) == v


@given(st.dictionaries(st.sampled_from(["sigma", "T", "tol", "seed", "T_list"]), values, max_size=4))
def test_config_round_trip(params):
    cfg = ExperimentConfig({"kind": "integers", "jmax": 1000}, "moment", params, "out.csv", "json")
    again = loads(cfg.to_ini())
    assert again == cfg


def test_config_errors():
    with pytest.raises(ConfigError, match="unknown task"):
        loads("[model]\nkind = integers\n[task]\nname = nope\n")
    with pytest.raises(ConfigError, match="kind"):
        loads("[task]\nname = eval\n")
    with pytest.raises(ConfigError, match="unknown section"):
        loads("[model]\nkind = integers\n[extra]\nx = 1\n")


def test_csv_header_and_rerun_identical(tmp_path, capsys):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    cfg = str(CONFIGS / "eval_zeta.ini")
    assert main(["eval", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["eval", "--config", cfg, "--out", str(out2), "--threads", "4"]) == 0
    text = out1.read_text()
    assert text.splitlines()[0] == "# gds-lab schema v1 task=eval"
    assert text.splitlines()[1].startswith("sigma,t,re,im,abs,err_bound")
    assert out1.read_bytes() == out2.read_bytes()


def test_json_output_and_threads(capsys):
    assert main(["mv-check", "--config", str(CONFIGS / "mv_random.ini"), "--threads", "3"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 20 and all(r["holds"] for r in rows)
    assert [r["instance"] for r in rows] == list(range(20))


def test_seed_override_changes_output(capsys):
    cfg = str(CONFIGS / "random_bohr.ini")
    main(["eval", "--config", cfg])
    a = capsys.readouterr().out
    main(["eval", "--config", cfg, "--seed", "4"])
    b = capsys.readouterr().out
    main(["eval", "--config", cfg])
    c = capsys.readouterr().out
    assert a == c and a != b


def test_out_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("GDSLAB_OUT_DIR", str(tmp_path / "runs"))
    ini = tmp_path / "z.ini"
    ini.write_text("[model]\nkind = integers\n[task]\nname = eval\nsigma = 2.0\n[output]\npath = z.csv\n")
    assert main(["eval", "--config", str(ini)]) == 0
    assert (tmp_path / "runs" / "z.csv").exists()


def test_error_exit_codes(tmp_path, capsys):
    assert main(["eval", "--config", str(tmp_path / "missing.ini")]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[model]\nkind = unicorn\n[task]\nname = eval\n")
    assert main(["eval", "--config", str(bad)]) == 2
    assert "unknown model kind" in capsys.readouterr().err
    pole = tmp_path / "pole.ini"
    pole.write_text("[model]\nkind = integers\n[task]\nname = eval\nsigma = 1.0\nt = 0.0\n")
    assert main(["eval", "--config", str(pole)]) == 2


def test_zeros_and_bohr_probe(capsys):
    assert main(["zeros", "--config", str(CONFIGS / "zeros_alternating.ini")]) == 0
    lines = capsys.readouterr().out.splitlines()
    counts = [int(l.split(",")[3]) for l in lines[2:]]
    assert counts == sorted(counts)
    assert main(["bohr-probe", "--config", str(CONFIGS / "bohr_probe.ini"), "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 4 and all(r["closing_err"] < 1e-9 for r in rows)
