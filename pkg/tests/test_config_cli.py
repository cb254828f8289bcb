"""Config parsing, presets, manifests, and the CLI contract."""

import json
import subprocess
import sys

import numpy as np
import pytest

from diskwave import cli, config as cfg, manifest as man
from diskwave.errors import ConfigError, ResonanceError


# --------------------------------------------------------------------------
# key=value parsing


def test_parse_kv_basics():
    raw = cfg.parse_kv_text("""
# comment
a = 1
b = two words   # trailing comment
c=3
""")
    assert raw == {"a": "1", "b": "two words", "c": "3"}


def test_parse_kv_rejects_duplicates_and_garbage():
    with pytest.raises(ConfigError, match="duplicate"):
        cfg.parse_kv_text("a = 1\na = 2\n")
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        cfg.parse_kv_text("just some text\n")
    with pytest.raises(ConfigError, match="empty key"):
        cfg.parse_kv_text("= 3\n")


def test_coerce_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="preiod"):
        cfg.coerce(cfg.ClassifyConfig, {"preiod": "3"})


def test_coerce_types():
    out = cfg.coerce(cfg.SimulateConfig,
                     {"n_r": "8", "dt": "0.05", "initial": "steady",
                      "tau": "2.0", "t_end": "10"})
    assert out.n_r == 8 and out.dt == 0.05 and out.initial == "steady"
    with pytest.raises(ConfigError, match="chi"):
        cfg.coerce(cfg.SimulateConfig, {"chi": "strong"})
    assert cfg.coerce(cfg.ClassifyConfig, {"trim": "false"}).trim is False
    with pytest.raises(ConfigError, match="boolean"):
        cfg.coerce(cfg.ClassifyConfig, {"trim": "maybe"})


def test_load_raw_config_accepts_manifest(tmp_path):
    doc = {"command": "simulate", "config": {"n_r": "8", "t_end": "20"}}
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(doc))
    assert cfg.load_raw_config(path) == {"n_r": "8", "t_end": "20"}
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    with pytest.raises(ConfigError, match="config"):
        cfg.load_raw_config(bad)


# --------------------------------------------------------------------------
# cases and presets


def test_case_parameters():
    p1 = cfg.case_params("case1")
    assert (p1.chi, p1.tau, p1.d) == (0.38, 9.88, 0.8)
    assert cfg.case_params("case1-consistent") == p1
    assert cfg.case_params("case1-literal").d == 0.1
    p2 = cfg.case_params("case2")
    assert (p2.chi, p2.tau) == (0.46, 9.6)
    with pytest.raises(ConfigError):
        cfg.case_params("case3")


def test_preset_files_cover_the_showcases():
    f1 = cfg.preset_files("case1")
    assert "standing-n1" in f1["standing-wave.txt"]
    assert "rotating-ccw" in f1["rotating-wave.txt"]
    assert "random-start.txt" not in f1
    f2 = cfg.preset_files("case2")
    assert "standing-n2" in f2["standing-wave.txt"]
    assert "rotating-cw" in f2["rotating-wave.txt"]
    assert "rng_seed" in f2["random-start.txt"]
    # every emitted document must round-trip through the parser
    for name, text in {**f1, **f2}.items():
        raw = cfg.parse_kv_text(text)
        assert raw, name


def test_preset_configs_parse_into_schemas():
    f2 = cfg.preset_files("case2-literal")
    sim = cfg.coerce(cfg.SimulateConfig,
                     cfg.parse_kv_text(f2["rotating-wave.txt"]))
    assert sim.chi == 0.46 and sim.tau == 9.6 and sim.d == 0.1
    hc = cfg.coerce(cfg.HopfCurvesConfig,
                    cfg.parse_kv_text(f2["hopf-curves.txt"]))
    assert hc.chi_count >= 2
    nf = cfg.coerce(cfg.NormalFormConfig,
                    cfg.parse_kv_text(f2["normal-form.txt"]))
    assert nf.branches == ("rotating-ccw", "standing")


# --------------------------------------------------------------------------
# tables and manifests


def test_format_table_17_digits():
    text = man.format_table(["x", "flag"], [(0.1, True), (2.0, False)])
    lines = text.splitlines()
    assert lines[0] == "x\tflag"
    assert lines[1] == "0.10000000000000001\ttrue"
    assert lines[2] == "2\tfalse"


def test_manifest_checksum_verification(tmp_path):
    data = tmp_path / "blob.bin"
    data.write_bytes(b"\x00" * 64)
    doc = man.write_manifest(tmp_path / "manifest.json", command="x",
                             config={}, outputs=[data])
    man.verify_outputs(doc, tmp_path)
    data.write_bytes(b"\x01" * 64)
    with pytest.raises(ConfigError, match="checksum"):
        man.verify_outputs(doc, tmp_path)
    data.unlink()
    with pytest.raises(ConfigError, match="missing"):
        man.verify_outputs(doc, tmp_path)


# --------------------------------------------------------------------------
# CLI dispatch and exit codes


def test_empty_argv_prints_usage_exit_2(capsys):
    assert cli.main([]) == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_unknown_subcommand_exit_2():
    assert cli.main(["no-such-stage", "--out", "/tmp/x"]) == 2


def test_unknown_config_key_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("n_max = 3\nmisspelled = 1\n")
    code = cli.main(["spectrum", str(bad), "--out", str(tmp_path / "out")])
    assert code == 2
    assert "misspelled" in capsys.readouterr().err


def test_numerical_failure_exit_3(tmp_path, capsys):
    # amplitude 5 makes the initial prey density negative; with no step
    # halving allowed the run must fail numerically, not clamp
    bad = tmp_path / "sim.txt"
    bad.write_text("n_r = 8\nn_theta = 16\ndt = 0.04\nt_end = 20\n"
                   "initial = standing-n1\namplitude = 5.0\n"
                   "max_halvings = 0\n")
    code = cli.main(["simulate", str(bad), "--out", str(tmp_path / "out")])
    assert code == 3
    assert "error" in capsys.readouterr().err


def test_resonance_exit_4(tmp_path, monkeypatch):
    def boom(args):
        raise ResonanceError("synthetic resonant point")
    monkeypatch.setattr(cli, "_cmd_normal_form", boom)
    code = cli.main(["normal-form", "--out", str(tmp_path / "out")])
    assert code == 4


def test_random_start_needs_seed(tmp_path):
    conf = tmp_path / "sim.txt"
    conf.write_text("n_r = 8\nn_theta = 16\nt_end = 20\ninitial = random\n")
    assert cli.main(["simulate", str(conf), "--out",
                     str(tmp_path / "out")]) == 2


def test_module_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "diskwave.cli"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "usage" in proc.stderr.lower()


# --------------------------------------------------------------------------
# stage outputs


def test_spectrum_stage(tmp_path):
    conf = tmp_path / "spec.txt"
    conf.write_text("R = 10.0\nn_max = 2\nm_max = 2\n")
    out = tmp_path / "out"
    assert cli.main(["spectrum", str(conf), "--out", str(out)]) == 0
    lines = (out / "modes.tsv").read_text().splitlines()
    assert lines[0].split("\t") == ["n", "m", "beta", "lambda"]
    assert len(lines) == 1 + 1 + 2 * 3        # header + constant + table
    doc = man.read_manifest(out / "manifest.json")
    man.verify_outputs(doc, out)
    assert doc["code_version"]


def test_hopf_curves_stage(tmp_path):
    conf = tmp_path / "hc.txt"
    conf.write_text("chi_min = 0.3\nchi_max = 0.5\nchi_count = 3\n"
                    "k_max = 0\n")
    out = tmp_path / "out"
    assert cli.main(["hopf-curves", str(conf), "--out", str(out)]) == 0
    lines = (out / "curves.tsv").read_text().splitlines()
    assert lines[0].split("\t")[:4] == ["chi", "n", "m", "k"]
    assert len(lines) > 3 * 10                # many crossing modes per chi
    doc = man.read_manifest(out / "manifest.json")
    assert doc["truncation"]["modes_scanned"] > 100
    assert doc["tolerances"]["worst_char_residual"] < 1e-10


def test_normal_form_stage(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["normal-form", "--out", str(out)]) == 0
    lines = (out / "normal-form.tsv").read_text().splitlines()
    assert len(lines) == 3                    # header + two branches
    doc = man.read_manifest(out / "manifest.json")
    assert set(doc["diagnostics"]) == {"rotating-ccw", "standing"}


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    """A short coarse trajectory shared by the round-trip tests."""
    base = tmp_path_factory.mktemp("smallrun")
    conf = base / "sim.txt"
    conf.write_text("n_r = 8\nn_theta = 16\ndt = 0.04\nt_end = 180\n"
                    "store_every = 25\ninitial = standing-n1\n"
                    "amplitude = 0.1\n")
    out = base / "out"
    assert cli.main(["simulate", str(conf), "--out", str(out)]) == 0
    return base, conf, out


def test_simulate_outputs_and_layout(small_run):
    _, _, out = small_run
    doc = man.read_manifest(out / "manifest.json")
    assert doc["kind"] == "trajectory"
    man.verify_outputs(doc, out)
    times, fu, fv, grid, _ = man.load_trajectory(out / "manifest.json")
    assert fu.shape == (len(times), 8, 16) and fv.shape == fu.shape
    # the raw layout interleaves u before v per stored time
    raw = np.fromfile(out / "frames.bin", dtype="<f8")
    first_u = raw[: 8 * 16].reshape(8, 16)
    assert np.array_equal(first_u, fu[0])


def test_simulate_determinism(small_run, tmp_path):
    base, conf, out = small_run
    out2 = tmp_path / "again"
    assert cli.main(["simulate", str(conf), "--out", str(out2)]) == 0
    assert (out / "frames.bin").read_bytes() \
        == (out2 / "frames.bin").read_bytes()


def test_simulate_rerun_from_manifest(small_run, tmp_path):
    _, _, out = small_run
    out3 = tmp_path / "rerun"
    assert cli.main(["simulate", str(out / "manifest.json"),
                     "--out", str(out3)]) == 0
    assert (out / "frames.bin").read_bytes() \
        == (out3 / "frames.bin").read_bytes()


def test_corrupt_frames_rejected(small_run, tmp_path):
    _, _, out = small_run
    clone = tmp_path / "clone"
    clone.mkdir()
    (clone / "manifest.json").write_bytes(
        (out / "manifest.json").read_bytes())
    data = bytearray((out / "frames.bin").read_bytes())
    data[100] ^= 0xFF
    (clone / "frames.bin").write_bytes(bytes(data))
    with pytest.raises(ConfigError, match="checksum"):
        man.load_trajectory(clone / "manifest.json")


def test_classify_stage_on_small_run(small_run, tmp_path):
    _, _, out = small_run
    conf = tmp_path / "cls.txt"
    conf.write_text("trim = false\n")
    cls_out = tmp_path / "cls"
    assert cli.main(["classify", str(out / "manifest.json"),
                     "--config", str(conf), "--out", str(cls_out)]) == 0
    report = json.loads((cls_out / "report.json").read_text())
    assert report["classification"] in ("standing", "rotating-cw",
                                        "rotating-ccw", "other",
                                        "inconclusive")
    lines = (cls_out / "residuals.tsv").read_text().splitlines()
    assert lines[0].split("\t")[0] == "relation"
    assert lines[1].startswith("identity")
    doc = man.read_manifest(cls_out / "manifest.json")
    man.verify_outputs(doc, cls_out)


def test_case_preset_stage(tmp_path, capsys):
    out = tmp_path / "preset"
    assert cli.main(["case-preset", "case1-literal", "--out",
                     str(out)]) == 0
    listed = capsys.readouterr().out.splitlines()
    assert str(out / "standing-wave.txt") in listed
    raw = cfg.parse_kv_text((out / "standing-wave.txt").read_text())
    assert raw["d"] == "0.1" and raw["chi"] == "0.38"
    assert cli.main(["case-preset", "caseX", "--out", str(out)]) == 2
