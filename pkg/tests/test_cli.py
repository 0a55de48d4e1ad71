import json
import math

import pytest

from bmolab.cli import main, parse_cube, parse_number, parse_number_list


def read_json(path):
    return json.loads(path.read_text())


def test_parse_number_symbols():
    assert parse_number("2pi") == pytest.approx(2 * math.pi)
    assert parse_number("-pi/2") == pytest.approx(-math.pi / 2)
    assert parse_number("e") == pytest.approx(math.e)
    assert parse_number("1e-3") == 1e-3
    assert parse_number("1.5e2") == 150.0
    assert parse_number_list("2pi,4pi,6pi") == pytest.approx(
        [2 * math.pi, 4 * math.pi, 6 * math.pi]
    )


def test_parse_cube_literals():
    q = parse_cube("[-pi/2,pi/2]")
    assert q.dim == 1 and q.half_side == pytest.approx(math.pi / 2)
    q2 = parse_cube("[-1,1]^2")
    assert q2.dim == 2
    from bmolab.errors import PreconditionError

    with pytest.raises(PreconditionError):
        parse_cube("[1,0]")


def test_unknown_command_exit_1(capsys):
    assert main(["frobnicate"]) == 1
    assert "unknown command" in capsys.readouterr().err


def test_sine_translation_profile_csv(tmp_path):
    out = tmp_path / "run"
    rc = main(["oscillation", "--f", "sin(x1)", "--mode", "translation",
               "--cube", "[-pi/2,pi/2]", "--radii", "2pi,4pi,6pi",
               "--out", str(out)])
    assert rc == 0
    lines = (out / "translation.csv").read_text().splitlines()
    assert lines[0] == "parameter,value,argmax_center,argmax_side,cube_count"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert len(values) == 3
    for v in values:
        assert v == pytest.approx(2 / math.pi, abs=1e-3)
    report = read_json(out / "report.json")
    assert report["version"] == "0.1.0"


def test_classify_subcommand(tmp_path):
    out = tmp_path / "cls"
    rc = main(["oscillation", "--f", "smoothed_log", "--mode", "classify",
               "--out", str(out)])
    assert rc == 0
    rep = read_json(out / "report.json")["classify"]
    assert rep["vmo_smallscale_ok"] and rep["xmo_translation_ok"]
    assert not rep["cmo_largescale_ok"]


def test_weights_trivial(tmp_path):
    out = tmp_path / "w"
    rc = main(["weights", "--w1", "1", "--w2", "1", "--p1", "2", "--p2", "2",
               "--out", str(out)])
    assert rc == 0
    rep = read_json(out / "report.json")
    assert rep["constant"] == pytest.approx(1.0, abs=1e-12)
    assert rep["p"] == pytest.approx(1.0)


def test_approx_pipeline_report(tmp_path):
    out = tmp_path / "ap"
    rc = main(["approx", "--f", "smoothed_log", "--eps", "0.5", "--kmax", "4",
               "--out", str(out)])
    assert rc == 0
    rep = read_json(out / "report.json")
    assert rep["approximation_error"] <= 10 * 0.5
    assert rep["g_minus_h_sup"] <= rep["adjacency_jump"] * (1 + 1e-6)
    fam = read_json(out / "family.json")
    assert fam["schedule"]["j0"] <= -1


def test_commutator_csv_and_sidecar(tmp_path):
    out = tmp_path / "com"
    rc = main(["commutator", "--b", "smoothed_log", "--f", "bump", "--g", "bump",
               "--eta", "0.5", "--xs=-3:3:13", "--out", str(out)])
    assert rc == 0
    lines = (out / "values.csv").read_text().splitlines()
    assert lines[0] == "x,value"
    assert len(lines) == 14
    side = read_json(out / "report.json")["sidecar"]
    assert side["consistency_gap"] is not None


def test_kernel_verify_report(tmp_path):
    out = tmp_path / "kv"
    rc = main(["kernel-verify", "--kernel", "reference", "--samples", "500",
               "--out", str(out)])
    assert rc == 0
    rep = read_json(out / "report.json")
    assert rep["bounds"]["size_ok"] and rep["bounds"]["decay_ok"]
    assert rep["seed"] == 20200705
    assert len(rep["split_constants"]) == 3


def test_compactness_zero_experiment(tmp_path):
    out = tmp_path / "fk"
    rc = main(["compactness", "--experiment", "zero", "--out", str(out)])
    assert rc == 0
    rep = read_json(out / "report.json")["fk"]
    assert rep["bounded_ok"] and rep["tail_ok"] and rep["modulus_ok"]
    assert (out / "tail.csv").exists() and (out / "modulus.csv").exists()


def test_reports_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["oscillation", "--f", "sin(x1)", "--mode", "translation",
                     "--radii", "2pi,4pi", "--out", str(out)]) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "translation.csv").read_bytes() == (b / "translation.csv").read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("radii = 2pi,4pi\nmode = translation\n# comment\n")
    out = tmp_path / "cfgout"
    rc = main(["oscillation", "--f", "sin(x1)", "--config", str(cfg),
               "--radii", "2pi,4pi,6pi", "--out", str(out)])
    assert rc == 0
    lines = (out / "translation.csv").read_text().splitlines()
    assert len(lines) == 4  # command line overrode the config's two radii

    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense_field = 3\n")
    assert main(["oscillation", "--f", "sin(x1)", "--config", str(bad),
                 "--out", str(tmp_path / "x")]) == 2


def test_schema_violation_exit_2(tmp_path, capsys):
    rc = main(["oscillation", "--f", "sin(x1", "--out", str(tmp_path / "e")])
    assert rc == 2
    assert "position" in capsys.readouterr().err


def test_domain_error_exit_3(tmp_path):
    rc = main(["oscillation", "--f", "log(x1)", "--mode", "translation",
               "--cube", "[-1,1]", "--radii", "1,2", "--out", str(tmp_path / "d")])
    assert rc == 3


def test_threads_flag_reproduces(tmp_path):
    a, b = tmp_path / "t1", tmp_path / "t4"
    for out, threads in ((a, "1"), (b, "4")):
        assert main(["commutator", "--b", "smoothed_log", "--f", "bump",
                     "--g", "bump", "--eta", "0.5", "--xs=-2:2:9",
                     "--threads", threads, "--out", str(out)]) == 0
    assert (a / "values.csv").read_bytes() == (b / "values.csv").read_bytes()
