import csv
import io
import json
import shutil
import subprocess
from pathlib import Path

import jsonschema
import pytest
import yaml

from bifree_lab.cli import fmt, main
from bifree_lab.config import ConfigError, ExperimentConfig, load_schema, parse_config_text

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def body(text):
    """CSV body without the optional timestamp line."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("# generated"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(body(text))))


# -- config parsing ----------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.yaml")))
def test_shipped_configs_round_trip(name):
    cfg = parse_config_text((CONFIGS / name).read_text())
    again = parse_config_text(cfg.dump())
    assert again == cfg
    jsonschema.validate(cfg.to_dict(), load_schema())


def test_mode_override():
    text = (CONFIGS / "pair_lrlr.yaml").read_text()
    assert parse_config_text(text, "simulate").mode == "simulate"


@pytest.mark.parametrize(
    "patch,where",
    [
        ({"families": {"s": {"left_indices": ["i"], "right_indices": ["j"], "cov": [1, 0.4, 0.5, 1]}}}, "families.s.cov"),
        ({"entry_law": "cauchy"}, "entry_law"),
        ({"word": [{"kind": "var", "side": "left", "family": "nope", "index": "i"}]}, "word[0]"),
        ({"word": [{"kind": "var", "side": "right", "family": "s", "index": "i"}]}, "word[0]"),
        ({"word": [{"kind": "diag", "side": "left", "symbol": "d"}]}, "word[0]"),
        ({"Ns": [64, 32]}, "Ns"),
        ({"n_samples": 1}, "n_samples"),
        ({"bogus": 1}, "<root>"),
    ],
)
def test_validation_names_field(patch, where):
    data = yaml.safe_load((CONFIGS / "pair_lrlr.yaml").read_text())
    data.update(patch)
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_dict(data, "sweep")
    assert exc.value.where == where


def test_parse_error_has_location():
    with pytest.raises(ConfigError) as exc:
        parse_config_text("mode: exact\nfamilies: [1,\n", source="bad.yaml")
    assert exc.value.where.startswith("bad.yaml:")


def test_cumulant_table_needs_declared_symbols():
    text = "mode: cumulants\ncumulants:\n  order: 2\n  symbols: {a: left}\n  moments:\n    - {word: [a, b], value: 1}\n"
    with pytest.raises(ConfigError, match="undeclared"):
        parse_config_text(text)


# -- formatting ----------------------------------------------------------------------


def test_seventeen_digits():
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3
    assert fmt(7) == "7"


# -- CLI -----------------------------------------------------------------------------


def test_exact_reports_value(capsys):
    code, out, _ = run(capsys, "exact", "--config", str(CONFIGS / "pair_lrlr.yaml"), "--no-timestamp")
    assert code == 0
    assert out.splitlines()[0] == "variant,value"
    (row,) = rows(out)
    assert float(row["value"]) == 1.25 and row["variant"] == "clt_moment"


def test_sweep_header_and_exact_column(capsys, tmp_path):
    cfg = yaml.safe_load((CONFIGS / "semicircle_m4.yaml").read_text())
    cfg.update(Ns=[8, 16], n_samples=200)
    path = tmp_path / "m4.yaml"
    path.write_text(yaml.safe_dump(cfg))
    code, out, _ = run(capsys, "sweep", "--config", str(path), "--no-timestamp")
    assert code == 0
    assert body(out).splitlines()[0] == "N,mean,stderr,exact,abs_err"
    assert [float(r["exact"]) for r in rows(out)] == [2.0, 2.0]


def test_malformed_covariance_exits_nonzero(capsys, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text((CONFIGS / "pair_lrlr.yaml").read_text().replace("cov: [1.0, 0.5,", "cov: [1.0, 0.4,"))
    code, _, err = run(capsys, "exact", "--config", str(path))
    assert code == 2
    assert "(i, j)" in err and "families.s.cov" in err


def test_missing_config_file(capsys, tmp_path):
    code, _, err = run(capsys, "exact", "--config", str(tmp_path / "none.yaml"))
    assert code == 2 and err


def test_timestamp_line(capsys):
    _, out, _ = run(capsys, "exact", "--config", str(CONFIGS / "pair_lrlr.yaml"))
    assert out.startswith("# generated ")
    _, out, _ = run(capsys, "exact", "--config", str(CONFIGS / "pair_lrlr.yaml"), "--no-timestamp")
    assert not out.startswith("#")


def test_output_file_and_json(capsys, tmp_path):
    cfg = yaml.safe_load((CONFIGS / "pair_lrlr.yaml").read_text())
    cfg["output"] = {"format": "json"}
    src = tmp_path / "c.yaml"
    src.write_text(yaml.safe_dump(cfg))
    dest = tmp_path / "out.json"
    code, out, _ = run(capsys, "exact", "--config", str(src), "--output", str(dest))
    assert code == 0 and "1.25" in out
    doc = json.loads(dest.read_text())
    assert doc["rows"] == [{"variant": "clt_moment", "value": 1.25}]
    assert doc["config"]["families"]["s"]["cov"] == [1, 0.5, 0.5, 1]
    assert "generated" in doc


def test_seed_override_changes_simulation(capsys, tmp_path):
    cfg = yaml.safe_load((CONFIGS / "pair_lrlr.yaml").read_text())
    cfg.update(Ns=[8], n_samples=50)
    src = tmp_path / "c.yaml"
    src.write_text(yaml.safe_dump(cfg))
    a = run(capsys, "simulate", "--config", str(src), "--no-timestamp")[1]
    b = run(capsys, "simulate", "--config", str(src), "--no-timestamp", "--seed-override", "99")[1]
    c = run(capsys, "simulate", "--config", str(src), "--no-timestamp", "--seed-override", str(cfg["base_seed"]))[1]
    assert a != b and a == c
    code, _, _ = run(capsys, "simulate", "--config", str(src), "--seed-override", str(2**64))
    assert code == 2


def test_cumulants_from_table(capsys):
    code, out, _ = run(capsys, "cumulants", "--config", str(CONFIGS / "cumulants_table.yaml"), "--no-timestamp")
    assert code == 0
    got = {(r["chi"], r["word"]): float(r["cumulant"]) for r in rows(out)}
    assert got[("lr", "a b")] == 0.5
    assert got[("rr", "b b")] == 2.0
    assert got[("lrl", "a b a")] == 0.0


def test_cumulants_from_families_vanish_when_mixed(capsys):
    code, out, _ = run(capsys, "cumulants", "--config", str(CONFIGS / "two_families.yaml"), "--no-timestamp")
    assert code == 0
    for r in rows(out):
        fams = {tok.split(".")[0] for tok in r["word"].split()}
        if len(fams) > 1 or r["order"] != "2":
            assert abs(float(r["cumulant"])) <= 1e-9, r


def test_selftest_mode(capsys):
    code, out, _ = run(capsys, "selftest", "--no-timestamp")
    assert code == 0
    assert all(r["status"] == "pass" for r in rows(out))


@pytest.mark.skipif(shutil.which("bifree-lab") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(
        ["bifree-lab", "exact", "--config", str(CONFIGS / "pair_lrlr.yaml"), "--no-timestamp"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert "clt_moment,1.25" in res.stdout
