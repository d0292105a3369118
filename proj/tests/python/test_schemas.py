"""Every JSON document the CLI writes validates against the shipped schemas."""

import json
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

BIN = os.environ.get("NETINFER_BIN", "netinfer")
SCHEMAS = Path(os.environ.get("NETINFER_SCHEMAS", Path(__file__).resolve().parents[2] / "schemas"))
CONFIG = Path(__file__).resolve().parents[1] / "data" / "chain.json"


def schema(name):
    doc = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(doc)
    return jsonschema.Draft202012Validator(doc)


def run(*args):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


@pytest.fixture(scope="module")
def outputs(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    run("simulate", CONFIG, "-o", d / "sim")
    run("score", d / "sim.csv", d / "sim.truth.dot", "--score", "tee", "--surrogates", "19", "-o", d / "sc")
    run("score", d / "sim.csv", d / "sim.truth.dot", "--estimator", "linear-gaussian", "--score", "te", "-o", d / "lg")
    run("infer", d / "sim.csv", "--score", "bic", "-o", d / "inf")
    run("infer", d / "sim.csv", "--score", "tea", "--search", "greedy", "-o", d / "gr")
    stdout = run("eval", d / "inf.dot", d / "sim.truth.dot", "-o", d / "ev")
    return d, stdout


def test_config_schema(outputs):
    d, _ = outputs
    validator = schema("config")
    validator.validate(json.loads(CONFIG.read_text()))
    validator.validate(json.loads((d / "sim.config.json").read_text()))


def test_report_schema(outputs):
    d, _ = outputs
    validator = schema("report")
    for name in ("sc", "lg", "inf", "gr"):
        validator.validate(json.loads((d / f"{name}.report.json").read_text()))


def test_metrics_schema(outputs):
    d, stdout = outputs
    validator = schema("metrics")
    validator.validate(json.loads(stdout))
    validator.validate(json.loads((d / "ev.metrics.json").read_text()))


def test_manifest_schema(outputs):
    d, _ = outputs
    validator = schema("manifest")
    manifests = sorted(d.glob("*.manifest.json"))
    assert len(manifests) == 6
    for m in manifests:
        validator.validate(json.loads(m.read_text()))


def test_schema_rejects_unknown_keys():
    with pytest.raises(jsonschema.ValidationError):
        schema("metrics").validate({"precision": 1, "recall": 1, "f1": 1, "shd": 0, "extra": 1})
