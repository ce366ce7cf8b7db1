import json
import math

import pytest

from spheredubins.cli import main
from spheredubins.spherical import SphericalConfig
from spheredubins.verify import build_extremal_chart_start


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


IDENTITY = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]


def test_version_reports_backend(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "spheredubins" in out
    assert ("cython" in out) or ("python" in out)


def test_plan_rotation_to_stdout(tmp_path, capsys):
    spec = write_json(tmp_path / "p.json",
                      {"radius": 0.45, "rotation": IDENTITY})
    code, out, _ = run(capsys, "plan", "--input", spec)
    assert code == 0
    report = json.loads(out)
    assert report["best"]["total_length"] == pytest.approx(0.0, abs=1e-9)
    assert report["best"]["residual"] < 1e-9
    assert report["radius"] == 0.45
    assert len(report["candidates"]) >= 1


def test_plan_start_goal_with_traces(tmp_path, capsys):
    spec = write_json(tmp_path / "p.json", {
        "radius": 0.5,
        "start": {"lat_deg": 10.0, "lon_deg": -20.0, "heading_deg": 45.0},
        "goal": {"lat_deg": -5.0, "lon_deg": 30.0, "heading_deg": -90.0},
    })
    out_dir = tmp_path / "out"
    code, _, _ = run(capsys, "plan", "--input", spec,
                     "--out", str(out_dir), "--trace", "--step", "0.01")
    assert code == 0
    report = json.loads((out_dir / "plan.json").read_text())
    assert report["best"]["residual"] < 1e-9
    frame = (out_dir / "plan_trace_frame.csv").read_text().splitlines()
    assert frame[0] == "s,X1,X2,X3,T1,T2,T3,N1,N2,N3,u"
    assert len(frame) > 10
    chart = (out_dir / "plan_trace_chart.csv").read_text().splitlines()
    assert chart[0] == "s,lat_deg,lon_deg,heading_deg,u"
    first = chart[1].split(",")
    assert float(first[1]) == pytest.approx(10.0, abs=1e-9)


def test_plan_output_is_byte_deterministic(tmp_path, capsys):
    spec = write_json(tmp_path / "p.json", {
        "radius": 0.5,
        "start": {"lat_deg": 10.0, "lon_deg": -20.0, "heading_deg": 45.0},
        "goal": {"lat_deg": -5.0, "lon_deg": 30.0, "heading_deg": -90.0},
    })
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        code, _, _ = run(capsys, "plan", "--input", spec,
                         "--out", str(d), "--trace", "--step", "0.05")
        assert code == 0
    for name in ("plan.json", "plan_trace_frame.csv",
                 "plan_trace_chart.csv"):
        assert ((dirs[0] / name).read_bytes()
                == (dirs[1] / name).read_bytes()), name


def test_plan_schema_errors(tmp_path, capsys):
    bad = [
        {"rotation": IDENTITY},                        # missing radius
        {"radius": 0.45},                              # no target at all
        {"radius": 0.45, "rotation": [1.0] * 8},       # wrong length
        {"radius": 0.45, "rotation": [0.5] * 9},       # not a rotation
        {"radius": 0.45, "start": {"lat_deg": 0.0, "lon_deg": 0.0,
                                   "heading_deg": 0.0}},  # goal missing
        {"radius": 0.45,
         "start": {"lat_deg": 90.0, "lon_deg": 0.0, "heading_deg": 0.0},
         "goal": {"lat_deg": 0.0, "lon_deg": 0.0,
                  "heading_deg": 0.0}},                # start at the pole
    ]
    for i, spec in enumerate(bad):
        path = write_json(tmp_path / f"bad{i}.json", spec)
        code, _, err = run(capsys, "plan", "--input", path)
        assert code == 2, (i, err)
        assert err.startswith("error:")
    code, _, _ = run(capsys, "plan", "--input", str(tmp_path / "nope.json"))
    assert code == 2
    path = write_json(tmp_path / "trace.json",
                      {"radius": 0.45, "rotation": IDENTITY})
    code, _, _ = run(capsys, "plan", "--input", path, "--trace")
    assert code == 2


def test_plan_domain_exit_code(tmp_path, capsys):
    spec = write_json(tmp_path / "p.json",
                      {"radius": 0.65, "rotation": IDENTITY})
    code, _, err = run(capsys, "plan", "--input", spec)
    assert code == 4
    assert "allow_out_of_domain" in err
    code, _, _ = run(capsys, "plan", "--input", spec,
                     "--allow-out-of-domain")
    assert code == 0


def test_integrate_controls(tmp_path, capsys):
    spec = write_json(tmp_path / "i.json", {
        "eta": 1.0,
        "start": {"lat_deg": 0.0, "lon_deg": 0.0, "heading_deg": 90.0},
        "controls": [{"steering": 0.5, "length": 1.0},
                     {"steering": -0.5, "length": 0.5}],
    })
    out_dir = tmp_path / "out"
    code, _, _ = run(capsys, "integrate", "--input", spec,
                     "--out", str(out_dir), "--trace")
    assert code == 0
    report = json.loads((out_dir / "integrate.json").read_text())
    assert report["arc_length"] == pytest.approx(1.5, abs=1e-12)
    assert report["eta"] == 1.0
    assert len(report["end_rotation"]) == 9
    trace = (out_dir / "integrate_trace.csv").read_text().splitlines()
    assert trace[0] == "s,lat_deg,lon_deg,heading_deg,u"
    assert not (out_dir / "integrate_switches.csv").exists()


def test_integrate_radius_instead_of_eta(tmp_path, capsys):
    spec = write_json(tmp_path / "i.json", {
        "radius": 0.45,
        "start": {"lat_deg": 0.0, "lon_deg": 0.0, "heading_deg": 90.0},
        "controls": [{"steering": 0.0, "length": 0.4}],
    })
    code, out, _ = run(capsys, "integrate", "--input", spec)
    assert code == 0
    report = json.loads(out)
    assert report["turn_radius"] == pytest.approx(0.45, abs=1e-12)


def test_integrate_pole_breach_exit_code(tmp_path, capsys):
    spec = write_json(tmp_path / "i.json", {
        "eta": 1.0,
        "start": {"lat_deg": 83.0, "lon_deg": 0.0, "heading_deg": 0.0},
        "controls": [{"steering": 0.0, "length": 1.0}],
    })
    code, _, err = run(capsys, "integrate", "--input", spec)
    assert code == 3
    assert "pole" in err


def test_integrate_costate_extremal(tmp_path, capsys):
    c0 = SphericalConfig(0.1, 0.3, 0.4)
    a0 = build_extremal_chart_start(c0, -0.3, 0.25, eta=1.0)
    spec = write_json(tmp_path / "i.json", {
        "eta": 1.0,
        "start": {"lat_deg": math.degrees(c0.lat),
                  "lon_deg": math.degrees(c0.lon),
                  "heading_deg": math.degrees(c0.heading)},
        "costate": {"lam_lat": a0.lam_lat, "lam_lon": a0.lam_lon,
                    "lam_hdg": a0.lam_hdg},
        "s_max": 2.0 * math.pi,
    })
    out_dir = tmp_path / "out"
    code, _, _ = run(capsys, "integrate", "--input", spec,
                     "--out", str(out_dir), "--trace")
    assert code == 0
    report = json.loads((out_dir / "integrate.json").read_text())
    assert report["word"] == "RL"
    assert report["switch_count"] == 1
    assert report["max_abs_hamiltonian"] < 1e-10
    assert sum(report["segment_lengths"]) == pytest.approx(
        2.0 * math.pi, abs=1e-9)
    switches = (out_dir / "integrate_switches.csv").read_text().splitlines()
    assert switches[0] == "s_switch,H12,dH12,kappa_before,kappa_after"
    assert len(switches) == 1 + report["switch_count"]
    assert abs(float(switches[1].split(",")[1])) < 1e-9


def test_integrate_schema_errors(tmp_path, capsys):
    start = {"lat_deg": 0.0, "lon_deg": 0.0, "heading_deg": 0.0}
    controls = [{"steering": 0.0, "length": 1.0}]
    bad = [
        {"start": start, "controls": controls},           # no eta/radius
        {"eta": 1.0, "radius": 0.4, "start": start,
         "controls": controls},                           # both given
        {"eta": -1.0, "start": start, "controls": controls},
        {"eta": 1.0, "controls": controls},               # no start
        {"eta": 1.0, "start": start},                     # no controls/costate
        {"eta": 1.0, "start": start, "controls": controls,
         "costate": {"lam_lat": 0.0, "lam_lon": 0.0, "lam_hdg": 1.0},
         "s_max": 1.0},                                   # both given
        {"eta": 1.0, "start": start,
         "controls": [{"steering": 1.5, "length": 1.0}]},
        {"eta": 1.0, "start": start,
         "controls": [{"steering": 0.5, "length": -1.0}]},
        {"eta": 1.0, "start": start, "controls": []},
        {"eta": 1.0, "start": start,
         "costate": {"lam_lat": 0.0, "lam_lon": 0.0, "lam_hdg": 1.0,
                     "cost_mult": 0.5}, "s_max": 1.0},
        {"eta": 1.0, "start": start,
         "costate": {"lam_lat": 0.0, "lam_lon": 0.0, "lam_hdg": 1.0},
         "s_max": -2.0},
    ]
    for i, spec in enumerate(bad):
        path = write_json(tmp_path / f"bad{i}.json", spec)
        code, _, err = run(capsys, "integrate", "--input", path)
        assert code == 2, (i, err)


def test_verify_quick_suite(tmp_path, capsys):
    out_dir = tmp_path / "out"
    code, out, _ = run(capsys, "verify", "--suite", "geometry", "--quick",
                       "--out", str(out_dir))
    assert code == 0
    assert "[PASS]" in out
    assert "suite geometry: ok" in out
    report = json.loads((out_dir / "verify.json").read_text())
    assert report["passed"] is True
    assert report["suites"][0]["suite"] == "geometry"


def test_verify_rejects_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "bogus"])
    assert exc.value.code == 2
