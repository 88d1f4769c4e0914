import json
import subprocess
import sys

import numpy as np
import pytest

from geocurve import cli
from geocurve import io as gio
from geocurve.dataset import LabeledFeatureSet
from geocurve.errors import InputError
from geocurve.fitting import FitConfig, fit_all_classes
from geocurve.synth import geodesic_classes


def run(argv, capsys=None):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr() if capsys else None
    return code, out


def usage_code(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main([str(a) for a in argv])
    return exc.value.code


@pytest.fixture
def train_csv(tmp_path):
    path = tmp_path / "train.csv"
    assert run(["synth", "--classes", 3, "--per-class", 4, "--dim", 8, "--out", path]) == (0, None)
    return path


def test_feature_csv_round_trip(rng):
    data = LabeledFeatureSet(rng.normal(size=(6, 5)) * 1e3, np.array(["a", "b", "a", "c", "b", "a"], dtype=object))
    back = gio.read_features(gio.format_features(data), text=True)
    np.testing.assert_array_equal(back.vectors, data.vectors)
    assert back.labels.tolist() == data.labels.tolist()
    assert "\r" not in gio.format_features(data)


def test_curves_json_round_trip():
    data = geodesic_classes(2, 4, 6, 0.05, seed=1)
    curves = fit_all_classes(data, FitConfig(epochs=20))
    text = gio.curves_to_json(curves, {"epochs": 20}, counts=data.counts())
    back, counts = gio.curves_from_json(text)
    assert counts == {"0": 4, "1": 4}
    for lab, fc in curves.items():
        b = back[str(lab)]
        np.testing.assert_array_equal(b.curve.tau_start, fc.curve.tau_start)
        np.testing.assert_array_equal(b.curve.tau_end, fc.curve.tau_end)
        assert b.final_loss.total == fc.final_loss.total
        assert b.loss_trace == fc.loss_trace
    assert json.loads(text)["schema"] == "geocurve.curves/1"


@pytest.mark.parametrize("text, line", [
    ("label,f0,f1\na,1,2\nb,1\n", 3),
    ("label,f0,f1\na,1,2\nb,1,x\n", 3),
    ("label,f0,f1\na,1,nan\n", 2),
    ("name,f0,f1\na,1,2\n", 1),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(InputError) as exc:
        gio.read_features(text, text=True)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_bad_curves_json():
    with pytest.raises(InputError):
        gio.curves_from_json('{"schema": "other"}')
    with pytest.raises(InputError):
        gio.curves_from_json("{not json")


def test_cli_input_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("label,f0,f1\na,1,2\nb,oops,3\n")
    code, out = run(["fit", bad], capsys)
    assert code == 2
    assert "line 3" in out.err
    code, _ = run(["fit", tmp_path / "missing.csv"], capsys)
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["fit", "x.csv", "--epochs", "0"],
    ["fit", "x.csv", "--epochs", "-3"],
    ["eval", "--train", "a.csv"],
    ["nosuchcommand"],
    ["augment", "c.json", "--n", "-1"],
])
def test_usage_errors_exit_64(argv):
    assert usage_code(argv) == 64


def test_synth_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert cli.main(["synth", "--seed", "4", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert len(lines) == 1 + 10 * 5
    assert lines[0] == "label," + ",".join(f"f{i}" for i in range(32))


def test_fit_augment_check_pipeline(tmp_path, train_csv, capsys):
    curves = tmp_path / "curves.json"
    aug = tmp_path / "aug.csv"
    assert run(["fit", train_csv, "--epochs", 50, "--out", curves]) == (0, None)
    doc = json.loads(curves.read_text())
    assert [c["label"] for c in doc["classes"]] == ["0", "1", "2"]
    assert all(c["m"] == 4 and c["epochs"] == 50 for c in doc["classes"])

    assert run(["augment", curves, "--out", aug]) == (0, None)
    assert len(aug.read_text().splitlines()) == 1 + 12
    assert run(["augment", curves, "--n", 7, "--out", aug]) == (0, None)
    rows = aug.read_text().splitlines()
    assert len(rows) == 1 + 21 and rows[0].endswith(",augmented")
    assert all(r.endswith(",1") for r in rows[1:])

    code, out = run(["check", "--curves", curves, "--augmented", aug], capsys)
    assert code == 0, out.out
    assert "augmented-rows" in out.out and "overall: PASS" in out.out


def test_augment_zero_is_header_only(tmp_path, train_csv):
    curves = tmp_path / "curves.json"
    aug = tmp_path / "aug.csv"
    assert cli.main(["fit", str(train_csv), "--epochs", "5", "--out", str(curves)]) == 0
    assert cli.main(["augment", str(curves), "--n", "0", "--out", str(aug)]) == 0
    lines = aug.read_text().splitlines()
    assert len(lines) == 1
    assert lines[0] == "label," + ",".join(f"p{i}" for i in range(16)) + ",augmented"


def test_eval_writes_json_and_csv(tmp_path, train_csv):
    out = tmp_path / "report.json"
    assert cli.main(["eval", "--train", str(train_csv), "--test", str(train_csv), "--seeds", "1",
                     "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == "geocurve.eval/1"
    assert doc["std"] == 0.0 and len(doc["accuracies"]) == 1
    csv_lines = (tmp_path / "report.csv").read_text().splitlines()
    assert csv_lines[0] == "seed,method,classifier,accuracy"
    assert csv_lines[1:] == [f"0,none,knn,{doc['accuracies'][0]!r}", f"0,none-raw,knn,{doc['raw_knn']['accuracies'][0]!r}"]


def test_eval_faagc_linear(tmp_path, train_csv):
    out = tmp_path / "r.json"
    assert cli.main(["eval", "--train", str(train_csv), "--test", str(train_csv), "--method", "faagc",
                     "--classifier", "linear", "--epochs", "20", "--seeds", "2", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["method"] == "faagc" and doc["seeds"] == [0, 1]


def test_bench_schema(capsys):
    code, out = run(["bench", "--m", 3, "--d", 8, "--epochs", 5, "--repeats", 2], capsys)
    assert code == 0
    doc = json.loads(out.out)
    assert set(doc) == {"m", "d", "epochs", "repeats", "seconds", "mean", "std", "hardware", "python", "numpy"}
    assert len(doc["seconds"]) == 2


def test_threads_env(monkeypatch):
    monkeypatch.setenv("GEOCURVE_THREADS", "3")
    assert cli.build_parser().parse_args(["check"]).threads == 3
    monkeypatch.setenv("GEOCURVE_THREADS", "junk")
    assert cli.build_parser().parse_args(["check"]).threads == 1


def test_threads_do_not_change_output(tmp_path, train_csv):
    outs = []
    for threads in ("1", "3"):
        p = tmp_path / f"c{threads}.json"
        assert cli.main(["fit", str(train_csv), "--epochs", "30", "--threads", threads, "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("command, needle", [
    ("fit", "geocurve.curves/1"), ("eval", "geocurve.eval/1"), ("synth", "label,f0"),
])
def test_help_documents_formats(command, needle, capsys):
    assert usage_code([command, "--help"]) == 0
    assert needle in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "geocurve", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout
