import json
import math

import numpy as np
import pytest

from varcap.cli import main, parse_config
from varcap.errors import ConfigError
from varcap.mms import build_planar_sheet
from varcap.profiles import euclidean_profile, schwarzschild_profile
from varcap.sequences import experiment_csv_from_payload


def radial_input(tmp_path, s0=1.0):
    doc = {"profile": euclidean_profile(3).to_doc(), "s0": s0}
    path = tmp_path / "radial.json"
    path.write_text(json.dumps(doc))
    return path


# -- config validation ----------------------------------------------------------


def test_minimal_radial_config_applies_defaults(tmp_path):
    out = tmp_path / "report.csv"
    code = main(["capacity-radial", "--input", str(radial_input(tmp_path)), "--out", str(out)])
    assert code == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "L,h,cap,energy"
    L_values = sorted({float(l.split(",")[0]) for l in lines[1:]})
    assert L_values == [100.0, 1000.0, 10000.0]  # default ladder {1e2,1e3,1e4} * s0


def test_unknown_key_names_nearest_valid():
    with pytest.raises(ConfigError) as err:
        parse_config({"command": "capacity-radial", "capcity": 1})
    message = str(err.value)
    assert "capcity" in message
    assert "closest valid key" in message


def test_unknown_command_suggests():
    with pytest.raises(ConfigError) as err:
        parse_config({"command": "capacity-radail"})
    assert "capacity-radial" in str(err.value)


def test_experiment_keys_validated_per_family():
    with pytest.raises(ConfigError, match="unknown key 'h'"):
        parse_config({"command": "experiment", "input_doc": {"example": "ex1", "h": 0.1}})
    # the same key is legal for the planar families
    cfg = parse_config({"command": "experiment", "input_doc": {"example": "ex3", "h": 0.1}})
    assert cfg.input_doc["h"] == 0.1


def test_all_problems_reported_together():
    with pytest.raises(ConfigError) as err:
        parse_config(
            {
                "command": "mass",
                "typo_one": 1,
                "format": "xml",
                "tolerances": {"quadrature": -1.0, "bogus": 2.0},
                "seed": "zero",
            }
        )
    problems = err.value.problems
    assert len(problems) >= 4


def test_malformed_number_rejected():
    with pytest.raises(ConfigError, match="must be a number"):
        parse_config(
            {"command": "experiment", "input_doc": {"example": "ex1", "r": "one"}}
        )


def test_nonexistent_input_path_is_config_error(tmp_path):
    code = main(["capacity-radial", "--input", str(tmp_path / "missing.json")])
    assert code == 2


def test_nonexistent_config_path_is_config_error(tmp_path):
    code = main(["capacity-radial", "--config", str(tmp_path / "missing.json")])
    assert code == 2


# -- reports -----------------------------------------------------------------------


def test_euclidean_radial_report_value(tmp_path):
    out = tmp_path / "r.csv"
    code = main(["capacity-radial", "--input", str(radial_input(tmp_path)), "--out", str(out)])
    assert code == 0
    text = out.read_text()
    cap_line = [l for l in text.splitlines() if l.startswith("# cap=")][0]
    cap = float(cap_line.split("=")[1])
    assert cap == pytest.approx(1.0, abs=1e-3)
    assert "# tool=varcap" in text
    assert "# config_sha256=" in text
    assert "# provenance=fem" in text


def test_experiment_ex4_verdict_violated(tmp_path):
    out = tmp_path / "ex4.csv"
    code = main(
        ["experiment", "ex4", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[-1].endswith("violated")


def test_json_format(tmp_path):
    out = tmp_path / "ex2.json"
    code = main(["experiment", "ex2", "--format", "json", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["experiment"] == "ex2"
    assert payload["verdict"] == "consistent-strict-jump"
    assert payload["limit_capacity"] == pytest.approx(4 / math.pi, abs=1e-3)
    assert "config_sha256" in payload


def test_json_report_regenerates_identical_csv(tmp_path):
    csv_out = tmp_path / "ex2.csv"
    json_out = tmp_path / "ex2.json"
    assert main(["experiment", "ex2", "--out", str(csv_out)]) == 0
    assert main(["experiment", "ex2", "--format", "json", "--out", str(json_out)]) == 0
    payload = json.loads(json_out.read_text())
    meta = {"tool": payload["tool"], "config_sha256": payload["config_sha256"]}
    regenerated = experiment_csv_from_payload(payload, meta)
    assert regenerated == csv_out.read_text()


def test_round_trip_for_every_command(tmp_path):
    from varcap.cli import csv_from_payload

    sheet = build_planar_sheet((-2, 2, -2, 2), 0.5, label_prefix="p")
    r = np.sqrt(sheet.coords[:, 0] ** 2 + sheet.coords[:, 1] ** 2)
    graph_doc = {
        "space": sheet.to_doc(),
        "inner": [lab for lab, ri in zip(sheet.labels, r) if ri <= 0.5 + 1e-9],
        "outer": [lab for lab, ri in zip(sheet.labels, r) if ri >= 2.0 - 1e-9],
        "m": 2,
        "rim_radius": 2.0,
    }
    mass_doc = {
        "profile": schwarzschild_profile(1.0).to_doc(),
        "radii": list(np.geomspace(10.0, 200.0, 6)),
    }
    radial_doc = json.loads(radial_input(tmp_path).read_text())
    cases = [
        ("capacity-radial", radial_doc),
        ("capacity-graph", graph_doc),
        ("experiment", {"example": "ex1"}),
        ("mass", mass_doc),
    ]
    for k, (command, doc) in enumerate(cases):
        inp = tmp_path / f"in{k}.json"
        inp.write_text(json.dumps(doc))
        csv_out = tmp_path / f"{k}.csv"
        json_out = tmp_path / f"{k}.json"
        argv = [command, "--input", str(inp)]
        assert main(argv + ["--out", str(csv_out)]) == 0
        assert main(argv + ["--format", "json", "--out", str(json_out)]) == 0
        payload = json.loads(json_out.read_text())
        assert csv_from_payload(payload) == csv_out.read_text(), command


def test_capacity_graph_command(tmp_path):
    sheet = build_planar_sheet((-2, 2, -2, 2), 0.25, label_prefix="p")
    r = np.sqrt(sheet.coords[:, 0] ** 2 + sheet.coords[:, 1] ** 2)
    inner = [lab for lab, ri in zip(sheet.labels, r) if ri <= 0.5 + 1e-9]
    outer = [lab for lab, ri in zip(sheet.labels, r) if ri >= 2.0 - 1e-9]
    doc = {"space": sheet.to_doc(), "inner": inner, "outer": outer, "m": 2, "rim_radius": 2.0}
    path = tmp_path / "graph.json"
    path.write_text(json.dumps(doc))
    out = tmp_path / "graph.csv"
    assert main(["capacity-graph", "--input", str(path), "--out", str(out)]) == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "label,raw_energy,capacity,rim_radius"
    cap = float(lines[1].split(",")[2])
    assert 0.2 < cap < 2.0


def test_mass_command(tmp_path):
    doc = {
        "profile": schwarzschild_profile(2.0).to_doc(),
        "radii": list(np.geomspace(20.0, 1000.0, 10)),
    }
    path = tmp_path / "mass.json"
    path.write_text(json.dumps(doc))
    out = tmp_path / "mass.csv"
    assert main(["mass", "--input", str(path), "--out", str(out)]) == 0
    text = out.read_text()
    header = [l for l in text.splitlines() if not l.startswith("#")][0]
    assert header == "R,A,V,cap,m_iso,m_cv,m_cv_alt"
    m_line = [l for l in text.splitlines() if l.startswith("# m_iso=")][0]
    assert float(m_line.split("=")[1]) == pytest.approx(2.0, rel=0.02)


def test_tol_flag_reaches_verdict_tolerance(tmp_path):
    cfg = parse_config(
        {"command": "experiment", "input_doc": {"example": "ex1"}, "tolerances": {"verdict": 0.5}}
    )
    assert cfg.tolerances["verdict"] == 0.5


def test_deterministic_reports(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["experiment", "ex2", "--out", str(a)]) == 0
    assert main(["experiment", "ex2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_console_entry_point(tmp_path):
    import shutil
    import subprocess

    exe = shutil.which("varcap")
    if exe is None:
        pytest.skip("console script not installed")
    proc = subprocess.run([exe, "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "varcap" in proc.stdout
