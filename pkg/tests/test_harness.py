import json

import numpy as np
import pytest

from modspace.gabor import GaborCoefficients, analyze
from modspace.grid import GridSpec, relative_error, sample
from modspace.harness import ConfigError, build, list_experiments, load, run
from modspace.harness import io
from modspace.harness.cli import main
from modspace.harness.config import DEFAULTS
from modspace.harness.experiments import Report


@pytest.fixture
def signal(grid16):
    return sample({"name": "noise", "seed": 1}, grid16)


# serialization


@pytest.mark.parametrize("suffix", [".msk", ".json"])
def test_signal_round_trip(tmp_path, signal, suffix):
    path = tmp_path / f"f{suffix}"
    io.save(signal, path)
    back = io.load(path)
    assert back.spec == signal.spec and np.array_equal(back.data, signal.data)


def test_frequency_domain_record(tmp_path, signal):
    from modspace.grid import fourier

    hat = fourier(signal)
    back = io.decode(io.encode_signal(hat))
    assert back.domain == "freq" and np.array_equal(back.data, hat.data)


def test_coefficient_round_trip(tmp_path, signal, pair16):
    c = analyze(signal, pair16.phi, warn_tail=False)
    blob = io.encode_coefficients(c)
    assert blob[:4] == b"MSK1" and len(blob) == io.HEADER.size + 16 + c.values.size * 16
    back = io.decode(blob)
    assert isinstance(back, GaborCoefficients) and np.array_equal(back.values, c.values)
    io.save(c, tmp_path / "c.json")
    assert np.array_equal(io.load(tmp_path / "c.json").values, c.values)


def test_corrupt_records(signal):
    blob = io.encode_signal(signal)
    with pytest.raises(io.FormatError):
        io.decode(b"XXXX" + blob[4:])
    with pytest.raises(io.FormatError):
        io.decode(blob[:10])
    with pytest.raises(io.FormatError):
        io.decode(blob[:-16])
    with pytest.raises(io.FormatError):
        io.from_json({"format": "other"})


def test_coefficient_csv(pair16, signal):
    c = analyze(signal, pair16.phi, warn_tail=False)
    rows = list(io.coefficient_rows(c))
    assert len(rows) == c.values.size
    assert rows[0]["j"] == "-8" and rows[0]["k"] == "-32"
    text = io.csv_text(rows[:2], ["j", "k", "re", "im"])
    assert text.splitlines()[0] == "j,k,re,im"
    assert float(text.splitlines()[1].split(",")[2]) == c.values[0, 0].real


def test_value_formatting():
    assert io.format_value(True) == "true"
    assert io.format_value(None) == ""
    assert io.format_value(0.1) == "0.1"


# configuration


def test_config_defaults_and_overrides():
    cfg = build({"experiment": "young-fuzz", "trials": 5, "seed": 3})
    assert cfg["trials"] == 5 and cfg["factors"] == [2, 3] and cfg.seed == 3
    assert build({"experiment": "young-fuzz"}, seed=9).seed == 9


@pytest.mark.parametrize(
    "obj",
    [
        {"experiment": "nope"},
        {"experiment": "young-fuzz", "trails": 5},
        {"experiment": "young-fuzz", "trials": "5"},
        {"experiment": "young-fuzz", "seed": -1},
        {"experiment": "young-fuzz", "seed": True},
        [],
    ],
)
def test_config_errors(obj):
    with pytest.raises(ConfigError):
        build(obj)


def test_config_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"experiment": "holder-fuzz", "trials": 3}')
    assert load(path)["trials"] == 3
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load(path)


def test_catalog():
    cat = list_experiments()
    assert set(cat) == set(DEFAULTS) and all(cat.values())
    assert "multiplier-bound" in cat and "matrix-decay" in cat


# experiments


def test_young_fuzz_thousand_trials():
    rep = run(build({"experiment": "young-fuzz", "trials": 1000, "seed": 1}))
    assert len(rep.rows) == 1000 and all(r["holds"] is True for r in rep.rows)
    assert rep.worst_ratio <= 1 + 1e-12


def test_gabor_roundtrip_default():
    rep = run(build({"experiment": "gabor-roundtrip"}))
    assert rep.passed and max(r["error"] for r in rep.rows) <= 1e-9


def test_report_pass_logic():
    rep = Report("x", ["holds"], [{"holds": True}, {"holds": "report"}])
    assert rep.passed
    rep.rows.append({"holds": False})
    assert not rep.passed and len(rep.failures) == 1


def test_weight_class_row():
    cfg = build(
        {
            "experiment": "multiplier-bound",
            "ns": [16, 32],
            "signals": 2,
            "weight": {"kind": "subexp", "r": 0.5, "s": 2},
            "s": 3.0,
        }
    )
    rep = run(cfg)
    assert rep.rows[0]["symbol"] == "weight" and rep.rows[0]["holds"] is False
    assert not rep.passed


# command line


def _csv_and_summary(out, name):
    summary = json.loads((out / f"{name}.json").read_text())
    summary.pop("runtime_ms")
    return (out / f"{name}.csv").read_bytes(), summary


def test_run_is_deterministic(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "young-fuzz", "trials": 200, "seed": 4}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    assert _csv_and_summary(tmp_path / "a", "young-fuzz") == _csv_and_summary(tmp_path / "b", "young-fuzz")


def test_exit_code_reflects_failures(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "gabor-roundtrip", "signals": 2, "tol": 1e-30}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    cfg.write_text(json.dumps({"experiment": "gabor-roundtrip", "signals": 2, "extra": 1}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_list_verb(capsys):
    assert main(["list"]) == 0
    assert "gabor-roundtrip" in capsys.readouterr().out


def test_sample_norm_and_apply(tmp_path, capsys):
    sig = tmp_path / "g.msk"
    assert main(["sample", "--descriptor", '{"name": "gaussian", "width": 0.5}', "--grid", "8,16", "--out", str(sig)]) == 0
    capsys.readouterr()
    assert main(["norm", "--signal", str(sig), "--p", "1/2", "--q", "2"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["norm"] > 0
    sym = tmp_path / "s.json"
    sym.write_text('{"kind": "hilbert"}')
    out = tmp_path / "h.msk"
    assert main(["apply", "--kind", "fourier-step", "--symbol", str(sym), "--signal", str(sig), "--out", str(out)]) == 0
    f, g = io.load(sig), io.load(out)
    assert g.norm() == pytest.approx(f.norm(), rel=1e-12)
    sym.write_text('{"kind": "random", "seed": 3}')
    mat = tmp_path / "m.csv"
    assert main(["apply", "--kind", "step", "--symbol", str(sym), "--signal", str(sig), "--matrix", str(mat)]) == 0
    assert mat.read_text().startswith("row,col,re,im")


def test_product_and_window_verbs(tmp_path, capsys):
    a, b = tmp_path / "a.msk", tmp_path / "b.msk"
    main(["sample", "--descriptor", '{"name": "gaussian", "width": 1.0}', "--out", str(a)])
    main(["sample", "--descriptor", '{"name": "gaussian", "width": 0.5, "center": 1.0}', "--out", str(b)])
    out, rep = tmp_path / "p.msk", tmp_path / "p.csv"
    assert main(["product", "--kind", "multiply", "--factors", str(a), str(b), "--out", str(out), "--report", str(rep)]) == 0
    fa, fb = io.load(a), io.load(b)
    assert relative_error(io.load(out), fa * fb) <= 1e-4
    assert rep.read_text().startswith("j,k,re,im")
    capsys.readouterr()
    assert main(["window-make", "--grid", "8,16", "--out", str(tmp_path / "w")]) == 0
    cert = json.loads(capsys.readouterr().out)
    assert max(cert.values()) <= 1e-12
    assert (tmp_path / "w_phi.msk").exists() and (tmp_path / "w_psi.msk").exists()


def test_bad_input_file(tmp_path):
    bad = tmp_path / "bad.msk"
    bad.write_bytes(b"garbage" * 10)
    assert main(["norm", "--signal", str(bad)]) == 2


def test_cli_usage_errors_exit_2(tmp_path, capsys):
    out = str(tmp_path / "g.msk")
    assert main(["sample", "--descriptor", '{"name": "gaussian", "width": 0.5}', "--grid", "16", "--out", out]) == 2
    assert main(["norm", "--signal", str(tmp_path / "missing.msk")]) == 2
    assert "error" in capsys.readouterr().err
