from __future__ import annotations

import csv
import io
import json
from importlib import resources

import jsonschema
import pytest

from dpplln.cli import dispatch, main, parse_config
from dpplln.errors import ConfigError

LLN_YAML = """\
model: schur
theta: 1.0
alpha: 10
pattern: [0]
f:
  kind: bump
  params: {center: 0.0, width: 1.5}
replicas: 6
seed: 3
"""


def _schema():
    text = resources.files("dpplln").joinpath("schema/output.schema.json").read_text()
    return json.loads(text)


def _rows(text: str) -> list[dict]:
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def test_minimal_kernel_config_fills_defaults():
    cfg = parse_config("model: schur\ntheta: 1.0\nsites: [0, 1]\n", "kernel")
    assert cfg.subcommand == "kernel"
    assert cfg.params["alpha"] == 1.0 and cfg.params["tol"] == 1e-10


@pytest.mark.parametrize(
    "text,sub,key",
    [
        ("model: pp\nq: 1.5\nsites: [[0, -0.5]]\n", "kernel", "q"),
        ("model: schur\ntheta: 1\nsites: [0]\nbogus: 1\n", "kernel", "bogus"),
        ("model: pp\nq: 0.2\nsites: [[0, 0.25]]\n", "kernel", "sites"),
        ("model: schur\nalpha: 5\npattern: [0, 0]\nf: {kind: bump, params: {center: 0, width: 1}}\nreplicas: 4\nseed: 1\n", "lln", "pattern"),
        ("model: schur\nalpha: 5\nf: {kind: bump, params: {center: 0, width: 1}}\nreplicas: 1\nseed: 1\n", "lln", "replicas"),
        ("model: schur\npattern: [0]\nposition: 0\nscales: [50, 25]\n", "converge", "scales"),
        ("model: schur\nalpha: 5\nf: {kind: bump, params: {center: 0, width: 1}}\nreplicas: 4\n", "lln", "seed"),
    ],
)
def test_validation_errors_name_the_key(text, sub, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(text, sub)
    assert exc.value.key == key
    assert key in str(exc.value)


def test_parse_error_has_line_number():
    with pytest.raises(ConfigError) as exc:
        parse_config("model: schur\ntheta: 1\nsites: [0\n", "kernel")
    assert exc.value.line is not None


def test_dotted_keys_flat_or_nested():
    flat = parse_config(LLN_YAML.replace("f:\n  kind: bump\n  params: {center: 0.0, width: 1.5}\n", "f.kind: bump\nf.params: {center: 0.0, width: 1.5}\n"), "lln")
    nested = parse_config(LLN_YAML, "lln")
    assert flat.params == nested.params


def test_oracle_check_exit_zero_and_small_diffs(capsys):
    assert main(["oracle-check", "--model", "schur", "--theta", "0.3"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 7 + 21
    assert max(float(r["abs_diff"]) for r in rows) < 1e-6


def test_lln_json_validates_and_is_deterministic(tmp_path):
    cfg_path = tmp_path / "c.yaml"
    cfg_path.write_text(LLN_YAML)
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["lln", "--config", str(cfg_path), "-o", str(out1), "--workers", "1"]) == 0
    assert main(["lln", "--config", str(cfg_path), "-o", str(out2), "--workers", "3"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    doc = json.loads(out1.read_text())
    jsonschema.validate(doc, _schema())
    assert doc["version"] and doc["config"]["seed"] == 3
    reps = (tmp_path / "a.replicas.csv").read_text()
    assert reps.startswith("# dpplln")
    assert len(_rows(reps)) == 6


def test_usage_errors_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(LLN_YAML.replace("replicas: 6", "replicas: 1"))
    assert main(["lln", "--config", str(bad)]) == 2
    assert main(["lln"]) == 2
    assert main(["nonsense"]) == 2
    assert "replicas" in capsys.readouterr().err


def test_converge_csv_has_header(tmp_path):
    cfg = parse_config("model: schur\npattern: [0]\nposition: 0.0\nscales: [10, 20]\noutput: %s\n" % (tmp_path / "c.csv"), "converge")
    assert dispatch(cfg) == 0
    rows = _rows((tmp_path / "c.csv").read_text())
    assert list(rows[0]) == ["scale", "error", "ratio_to_previous"]


def test_sample_and_kernel_outputs(capsys):
    assert main(["sample", "--model", "schur", "--theta", "1", "--alpha", "2", "--window=-2,1", "--seed", "4"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 1 and len(rows[0]["bits"]) == 4
    assert main(["sample", "--model", "schur", "--theta", "1", "--window=-2,1"]) == 2
    capsys.readouterr()
    assert main(["kernel", "--model", "extended_sine", "--sites", "[0,-0.5],[0,0.5]", "--config", "/dev/null"]) == 2
    capsys.readouterr()
    assert main(["kernel", "--model", "sine", "--theta", "1", "--sites", "0,1"]) == 2


def test_decorrelate_rejects_overlap(capsys):
    cfg = parse_config("model: schur\npattern: [0]\nscale: 50\npairs: [[0.3, 0.3]]\n", "decorrelate")
    assert dispatch(cfg) == 2
