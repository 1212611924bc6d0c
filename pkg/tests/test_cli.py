"""Batch front door: descriptor parsing, reports, exit codes, determinism."""

import json

import pytest

from gecc_kit.cli import EXIT_DIAGNOSTIC, EXIT_OK, descriptor_from_json, main

RUNNING_TXY = {
    "ambient": {"n": 2, "coords": ["t", "x", "y"]},
    "strata": [
        {"name": "S1", "ideal": ["y"], "dim": 2, "morse": {"0": {"rank": 1, "torsion": []}}},
        {"name": "S2", "ideal": ["y^2-x^3-t^2*x^2"], "dim": 2,
         "morse": {"0": {"rank": 1, "torsion": []}}},
        {"name": "S3", "ideal": ["x", "y"], "dim": 1, "morse": {"0": {"rank": 2, "torsion": []}}},
        {"name": "S4", "ideal": ["x+t^2", "y"], "dim": 1,
         "morse": {"0": {"rank": 1, "torsion": []}}},
        {"name": "S0", "ideal": ["t", "x", "y"], "dim": 0,
         "morse": {"0": {"rank": 2, "torsion": []}}},
    ],
    "f": "x",
    "L": "t",
    "seed": 12345,
}

RUNNING_XYT = dict(RUNNING_TXY, ambient={"n": 2, "coords": ["x", "y", "t"]})


def write_descriptor(tmp_path, data, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, out


def test_gecc_command_transcript(tmp_path, capsys):
    path = write_descriptor(tmp_path, RUNNING_TXY)
    code, out = run_cli(capsys, "gecc", path)
    assert code == EXIT_OK
    assert "gecc(F):" in out
    assert "deg 0" in out


def test_vanishing_command_reproduces_paper(tmp_path, capsys):
    path = write_descriptor(tmp_path, RUNNING_TXY)
    code, out = run_cli(capsys, "vanishing", path, "--degree", "0")
    assert code == EXIT_OK
    assert "isolating coordinates: {0: True}" in out
    assert "CC = 4[V(y, x, t)] + 2[V(w0, y, x)]" in out


def test_vanishing_bad_coordinates_exit_2(tmp_path, capsys):
    path = write_descriptor(tmp_path, RUNNING_XYT)
    code, out = run_cli(capsys, "vanishing", path)
    assert code == EXIT_DIAGNOSTIC


def test_vanishing_experimental_onthefly(tmp_path, capsys):
    # bad ordering: the uncertified mode still trips per-step properness
    path = write_descriptor(tmp_path, RUNNING_XYT)
    code = main(["vanishing", path, "--experimental-onthefly"])
    captured = capsys.readouterr()
    assert code == EXIT_DIAGNOSTIC
    assert "step" in captured.err
    # good ordering: the flag changes nothing
    path2 = write_descriptor(tmp_path, RUNNING_TXY, "good.json")
    code2, out2 = run_cli(capsys, "vanishing", path2, "--experimental-onthefly")
    assert code2 == EXIT_OK


def test_check_command_passes(tmp_path, capsys):
    path = write_descriptor(tmp_path, RUNNING_TXY)
    code, out = run_cli(capsys, "check", path, "--L", "t")
    assert code == EXIT_OK
    assert "componentwise" in out


def test_polar_and_conormal_and_shriek_commands(tmp_path, capsys):
    path = write_descriptor(tmp_path, RUNNING_XYT)
    code, out = run_cli(capsys, "polar", path)
    assert code == EXIT_OK and "polar curve" in out
    code, out = run_cli(capsys, "conormal", path)
    assert code == EXIT_OK and "relative conormal" in out
    code, out = run_cli(capsys, "shriek", path)
    assert code == EXIT_OK and "[pass]" in out


def test_installed_script_end_to_end(tmp_path):
    import subprocess
    import sys

    path = write_descriptor(tmp_path, RUNNING_TXY)
    proc = subprocess.run(
        ["gecc-kit", "vanishing", path, "--degree", "0", "--json"],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert proc.returncode == EXIT_OK, proc.stderr
    report = json.loads(proc.stdout)
    assert report["isolating"]["pass"] is True
    assert {"ideal": ["t", "x", "y"], "multiplicity": 4} in report["cc_phi"]


def test_json_determinism(tmp_path, capsys):
    path = write_descriptor(tmp_path, RUNNING_TXY)
    code1, out1 = run_cli(capsys, "nearby", path, "--json")
    code2, out2 = run_cli(capsys, "nearby", path, "--json")
    assert code1 == code2 == EXIT_OK
    assert out1 == out2
    report = json.loads(out1)
    assert report["seed"] == 12345


def test_report_round_trip(tmp_path, capsys):
    path = write_descriptor(tmp_path, RUNNING_TXY)
    _, out = run_cli(capsys, "gecc", path, "--json")
    report = json.loads(out)
    desc = descriptor_from_json(RUNNING_TXY)
    from gecc_kit.conormal import gecc_assemble
    from gecc_kit.cycles import EnrichedCycle, GradedEnrichedCycle, component_from_prime
    from gecc_kit.ideal import Ideal
    from gecc_kit.modclass import ModClass
    from gecc_kit.polyring import parse_polynomial

    amb_t = desc.complex.tstar_ambient()
    ctx = amb_t.context()
    degrees = {}
    for row in report["gecc"]:
        comp = component_from_prime(
            Ideal(ctx, [parse_polynomial(s, ctx) for s in row["ideal"]]), amb_t
        )
        cyc = degrees.setdefault(row["degree"], EnrichedCycle(amb_t))
        degrees[row["degree"]] = cyc.add_term(comp, ModClass.from_json(row["coefficient"]))
    rebuilt = GradedEnrichedCycle(amb_t, degrees)
    assert rebuilt == gecc_assemble(desc.complex)


def test_empty_descriptor_zero_cycle(tmp_path, capsys):
    data = {"ambient": {"n": 1, "coords": ["x", "y"]}, "strata": [], "seed": 1}
    path = write_descriptor(tmp_path, data)
    code, out = run_cli(capsys, "gecc", path, "--json")
    assert code == EXIT_OK
    assert json.loads(out)["gecc"] == []


def test_parse_error_exit_code(tmp_path, capsys):
    bad = dict(RUNNING_TXY)
    bad = json.loads(json.dumps(bad))
    bad["strata"][0]["ideal"] = ["y +"]
    path = write_descriptor(tmp_path, bad)
    code = main(["gecc", path])
    assert code == EXIT_DIAGNOSTIC


def test_malformed_json_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"ambient": {')
    code = main(["gecc", str(path)])
    err = capsys.readouterr().err
    assert code == EXIT_DIAGNOSTIC
    assert "line" in err


def test_oracle_curve_command(tmp_path, capsys):
    data = {
        "branches": [
            {"name": "cusp", "mult": 2, "in_vf": False, "eta": 3},
            {"name": "line", "mult": 1, "in_vf": True},
        ]
    }
    path = write_descriptor(tmp_path, data, "curve.json")
    code, out = run_cli(capsys, "oracle-curve", path, "--json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["point"]["A"] == {"rank": 2, "torsion": []}
    assert report["point"]["Q"] == {"rank": 3, "torsion": []}


def test_cc_command_curve_triangle(tmp_path, capsys):
    # CC-level checks with externally supplied tables (three complexes on
    # V(z) union V(x,y), plus the skyscraper restrictions)
    data = {
        "ambient": {"n": 2, "coords": ["x", "y", "z"]},
        "strata": [
            {"name": "S2", "ideal": ["z"], "dim": 2, "morse": {"0": {"rank": 1, "torsion": []}}},
            {"name": "S1", "ideal": ["x", "y"], "dim": 1, "morse": {"0": {"rank": 1, "torsion": []}}},
            {"name": "S0", "ideal": ["x", "y", "z"], "dim": 0, "morse": {"0": {"rank": 1, "torsion": []}}},
        ],
        "seed": 7,
        "complexes": {
            "A": {"S2": {"0": {"rank": 1, "torsion": []}},
                  "S1": {"-1": {"rank": 1, "torsion": []}},
                  "S0": {"-1": {"rank": 1, "torsion": []}}},
            "B": {"S2": {"0": {"rank": 1, "torsion": []}},
                  "S1": {"-1": {"rank": 1, "torsion": []}},
                  "S0": {"-1": {"rank": 2, "torsion": []}}},
            "C": {"S2": {"0": {"rank": 1, "torsion": []}},
                  "S1": {"-1": {"rank": 1, "torsion": []}},
                  "S0": {"-1": {"rank": 1, "torsion": []}, "1": {"rank": 1, "torsion": []}}},
            "JSTAR": {"S0": {"-2": {"rank": 1, "torsion": []}}},
        },
        "checks": [
            {"type": "triangle", "name": "B->A->jstar", "terms": ["B", "A", "JSTAR"]},
            {"type": "complement-restriction", "terms": ["A", "B", "JSTAR"]},
            {"type": "equal", "name": "CC(B)=CC(C)", "terms": ["B", "C"]},
        ],
    }
    path = write_descriptor(tmp_path, data, "cc.json")
    code, out = run_cli(capsys, "cc", path)
    assert code == EXIT_OK
    assert out.count("[pass]") == 3
