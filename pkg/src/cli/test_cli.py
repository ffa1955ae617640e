import io
import json

import numpy as np
import pytest
import yaml
from omegaconf import OmegaConf
from rich.console import Console

from cosea import main, parse_tolerances, validate_seed
from src.effects import errors
from src.effects.axioms import CheckResult
from src.cli import AuditDocument, dump_algebra_document, emit_report, parse_algebra_text, run_command
from src.cli.report import dumps, plain, residual_check

CLASSICAL = """\
backend: classical
n: 2
seed: 7
effects:
  a: [0.5, 1.0]
  b: [1.0, 0.5]
states:
  left: [1.0, 0.0]
  right: [0.0, 1.0]
"""

HILBERTIAN = """\
backend: hilbertian
d: 2
tolerance: {eq: 1e-10}
effects:
  b: [[[0.5, 0], [0.25, 0]], [[0.25, 0], [0.5, 0]]]
  p: [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]
states:
  mixed: [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]
contexts:
  rotated: {unitary: [[[0.7071067811865476, 0], [0.7071067811865476, 0]], [[0.7071067811865476, 0], [-0.7071067811865476, 0]]]}
"""

DIRECT_SUM = """\
backend: direct_sum
parts:
  - {backend: hilbertian, d: 2}
  - {backend: classical, n: 1}
effects:
  x: [[[[0.5, 0], [0, 0]], [[0, 0], [1, 0]]], [0.2]]
states:
  w: {weights: [0.25, 0.75], parts: [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], [1.0]]}
"""


def flags(**overrides):
    base = dict(
        seed=0, args=[], anchor=None, suites=[dict(_name_="axioms", samples=None, checks=None)],
        audit=dict(samples=5, panel=3, progress=False, workers=1, generic_retries=5),
        represent=dict(contexts=3, panel=4, threshold=1e-8),
    )
    return OmegaConf.create({**base, **overrides})


@pytest.fixture
def classical_file(tmp_path):
    path = tmp_path / "classical.yaml"
    path.write_text(CLASSICAL)
    return path


@pytest.fixture
def hilbertian_file(tmp_path):
    path = tmp_path / "hilbertian.yaml"
    path.write_text(HILBERTIAN)
    return path


def test_parse_classical():
    doc = parse_algebra_text(CLASSICAL)
    assert doc.algebra.signature == ("classical", 2)
    assert doc.seed == 7
    assert np.allclose(doc.effect("a").payload, [0.5, 1.0])
    assert np.allclose(doc.state("right").payload, [0.0, 1.0])
    with pytest.raises(errors.UnknownName):
        doc.effect("c")


def test_parse_hilbertian():
    doc = parse_algebra_text(HILBERTIAN)
    assert doc.algebra.tol.eq == 1e-10
    assert np.allclose(doc.effect("b").payload, [[0.5, 0.25], [0.25, 0.5]])
    assert np.allclose(np.abs(doc.context("rotated").vectors), np.full((2, 2), np.sqrt(0.5)))


def test_parse_direct_sum():
    doc = parse_algebra_text(DIRECT_SUM)
    E = doc.algebra
    assert E.dim == 3
    x = doc.effect("x")
    assert np.allclose(x.parts[1].payload, [0.2])
    assert np.allclose(doc.state("w").weights, [0.25, 0.75])


def test_effect_outside_unit_interval():
    text = CLASSICAL.replace("a: [0.5, 1.0]", "a: [0.5, 1.2]")
    with pytest.raises(errors.ValidationError) as info:
        parse_algebra_text(text)
    assert info.value.name == "a"
    assert str(info.value).startswith("a")


def test_hilbertian_eigenvalue_outside_unit_interval():
    text = HILBERTIAN.replace("p: [[[1, 0]", "p: [[[1.2, 0]")
    with pytest.raises(errors.ValidationError) as info:
        parse_algebra_text(text)
    assert info.value.name == "p"


def test_parse_error_position():
    with pytest.raises(errors.ParseError) as info:
        parse_algebra_text("backend: classical\nn: 2\n\tseed: 1\n")
    assert (info.value.line, info.value.column) == (3, 1)


@pytest.mark.parametrize("text", [
    "backend: classical\nn: 2\ncolour: blue\n",
    "backend: classical\nn: 0\n",
    "backend: quaternionic\nd: 2\n",
    "backend: classical\nn: 2\nseed: -3\n",
    "backend: hilbertian\nd: 2\neffects:\n  b: [[0.5, 0], [0, 0.5]]\n",
])
def test_invalid_documents(text):
    with pytest.raises((errors.ValidationError, errors.UnknownName)):
        parse_algebra_text(text)


def test_tolerance_precedence():
    assert parse_algebra_text(HILBERTIAN, defaults=dict(eq=1e-8)).algebra.tol.eq == 1e-10
    assert parse_algebra_text(HILBERTIAN, overrides=dict(eq=1e-11)).algebra.tol.eq == 1e-11
    assert parse_algebra_text(CLASSICAL, defaults=dict(eq=1e-8)).algebra.tol.eq == 1e-8
    with pytest.raises(errors.ValidationError):
        parse_algebra_text(CLASSICAL, overrides=dict(cluster=1e-12))


def test_parse_tolerance_flags():
    assert parse_tolerances(["eq=1e-8", "rank=1e-12"]) == dict(eq=1e-8, rank=1e-12)
    with pytest.raises(errors.UnknownName):
        parse_tolerances(["gap=1"])
    with pytest.raises(errors.ValidationError):
        parse_tolerances(["eq"])


@pytest.mark.parametrize("text", [CLASSICAL, HILBERTIAN, DIRECT_SUM])
def test_dump_roundtrip(text):
    doc = parse_algebra_text(text)
    again = parse_algebra_text(dump_algebra_document(doc))
    assert again.spec == doc.spec and again.seed == doc.seed
    E = doc.algebra
    for name, a in doc.effects.items():
        assert E.distance(a, again.effect(name)) < 1e-12
    for name, ctx in doc.contexts.items():
        assert np.allclose(ctx.vectors, again.context(name).vectors)


def test_run_check():
    report = run_command("check", parse_algebra_text(CLASSICAL), flags())
    assert report.ok and len(report.checks) == 14
    assert report.data["suites"] == ["axioms"]


def test_run_spectrum():
    report = run_command("spectrum", parse_algebra_text(HILBERTIAN), flags(args=["b"]))
    assert report.ok
    assert np.allclose(report.data["eigenvalues"], [0.75, 0.25])
    assert report.data["norm"] == pytest.approx(0.75)


def test_run_spectrum_usage():
    with pytest.raises(errors.ValidationError):
        run_command("spectrum", parse_algebra_text(HILBERTIAN), flags(args=[]))


def test_run_condition_zero_probability():
    report = run_command("condition", parse_algebra_text(CLASSICAL), flags(args=["right", "a"]))
    assert report.ok and report.data["probability"] == pytest.approx(1.0)
    text = CLASSICAL.replace("b: [1.0, 0.5]", "b: [1.0, 0.0]")
    report = run_command("condition", parse_algebra_text(text), flags(args=["right", "b"]))
    assert not report.ok
    assert report.errors[0]["type"] == "ZeroProbability" and report.errors[0]["name"] == "right"


def test_run_audit_inverse_pair():
    report = run_command("audit-inverse", parse_algebra_text(CLASSICAL), flags(args=["a", "b"]))
    assert not report.checks["pair_exact"].ok
    assert report.checks["pair_proportional"].ok
    assert report.data["pair"]["scalar"] == pytest.approx(0.5)
    assert report.checks["proportional"].ok and report.checks["lambda_bound"].ok


def test_run_decompose():
    report = run_command("decompose", parse_algebra_text(DIRECT_SUM), flags())
    assert report.ok
    assert report.data["dims"] == [2, 1] and report.data["center_dimension"] == 2


def test_run_represent():
    report = run_command("represent", parse_algebra_text(HILBERTIAN), flags(anchor="rotated"))
    assert report.ok, report.failed
    assert report.data["contexts"] == ["rotated", "haar_1", "haar_2"]
    with pytest.raises(errors.UnknownName):
        run_command("represent", parse_algebra_text(HILBERTIAN), flags(anchor="nowhere"))


def test_module_errors_are_reported():
    report = run_command("represent", parse_algebra_text(CLASSICAL), flags())
    assert not report.ok
    assert report.errors[0]["type"] == "InvalidContext"


def test_plain_values():
    assert plain(np.array([1 + 2j])) == [[1.0, 2.0]]
    assert plain(float("inf")) == "inf"
    assert plain(dict(x=np.float64(0.5), y=(np.int64(2), True))) == dict(x=0.5, y=[2, True])


def test_report_formats():
    doc = AuditDocument("check", "abc", 3, dict(eq=1e-9))
    doc.add(residual_check("r", 0.5, 1e-9, group="g"))
    doc.wall_time = 1.5
    body = json.loads(dumps(doc, "json"))
    assert body["status"] == "fail" and body["checks"]["r"]["witnesses"][0]["residual"] == 0.5
    assert "wall_time" not in body
    assert yaml.safe_load(dumps(doc, "yaml", timing=True))["wall_time"] == 1.5
    with pytest.raises(errors.UnknownName):
        dumps(doc, "xml")


def test_empty_report_passes():
    doc = AuditDocument("check", "abc", 0, dict(eq=1e-9))
    assert emit_report(doc, console=Console(file=io.StringIO())) == 0
    doc.add(CheckResult("vacuous", "g", 3, 1e-9, vacuous=3))
    assert doc.ok


def test_main_is_byte_identical(classical_file, tmp_path):
    outputs = []
    for i in range(2):
        out = tmp_path / f"report{i}.yaml"
        assert main(["check", str(classical_file), "--suite", "axioms", "--samples", "5", "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    report = yaml.safe_load(outputs[0])
    assert report["seed"] == 7 and report["status"] == "pass"


def test_main_seed_precedence(classical_file, tmp_path, monkeypatch):
    monkeypatch.setenv("COSEA_SEED", "11")
    out = tmp_path / "report.json"
    main(["check", str(classical_file), "--suite", "axioms", "--samples", "2", "--seed", "5", "--out", str(out),
          "--format", "json"])
    assert json.loads(out.read_text())["seed"] == 5
    hilbertian = tmp_path / "h.yaml"
    hilbertian.write_text(HILBERTIAN)
    main(["spectrum", str(hilbertian), "b", "--out", str(out), "--format", "json"])
    assert json.loads(out.read_text())["seed"] == 11


def test_main_exit_codes(classical_file, hilbertian_file, tmp_path):
    assert main(["audit-inverse", str(classical_file), "a", "b", "--samples", "3"]) == 1
    assert main(["spectrum", str(hilbertian_file), "b"]) == 0
    assert main(["spectrum", str(hilbertian_file), "missing"]) == 2
    assert main(["check", str(tmp_path / "absent.yaml")]) == 2
    assert main(["check", str(classical_file), "--tol", "eq=abc"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate", str(classical_file)])
    assert info.value.code == 2


def test_main_several_suites(classical_file, tmp_path):
    out = tmp_path / "report.yaml"
    code = main(["check", str(classical_file), "--suite", "axioms", "--suite", "spectral", "--samples", "3",
                 "--out", str(out)])
    report = yaml.safe_load(out.read_text())
    assert code == 0
    assert report["data"]["suites"] == ["axioms", "spectral"]
    assert {c["group"] for c in report["checks"].values()} == {"axioms", "spectral"}


@pytest.mark.parametrize("value", ["abc", "-4", "1.5", "true"])
def test_main_rejects_bad_env_seed(hilbertian_file, monkeypatch, value):
    monkeypatch.setenv("COSEA_SEED", value)
    assert main(["spectrum", str(hilbertian_file), "b"]) == 2


def test_main_rejects_negative_seed_flag(hilbertian_file):
    assert main(["spectrum", str(hilbertian_file), "b", "--seed", "-1"]) == 2


def test_validate_seed():
    assert validate_seed(7, "--seed") == 7
    with pytest.raises(errors.ValidationError) as e:
        validate_seed("abc", "COSEA_SEED")
    assert e.value.name == "seed"
    with pytest.raises(errors.ValidationError):
        validate_seed(True, "COSEA_SEED")
