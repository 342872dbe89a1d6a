import io
import json
import subprocess
import sys

import pytest

from anyonsim import __version__
from anyonsim.cli import COMMANDS, emit_plot_data, run, to_jsonable


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def results(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    return json.loads(out)


def test_ising_fuse_example():
    env = results("ising-fuse", "--word", "2", "--pairing", "(1,3)(2,4)", "--shots", "10000", "--seed", "7")
    assert set(env) == {"tool_version", "subcommand", "parameters", "seed", "results", "wall_time_ms"}
    assert env["tool_version"] == __version__ and env["seed"] == 7
    probs = env["results"]["probabilities"]
    assert probs["00"] == pytest.approx(0.5, abs=1e-12) and probs["11"] == pytest.approx(0.5, abs=1e-12)
    counts = env["results"]["counts"]
    assert sum(counts.values()) == 10000 and counts["01"] == counts["10"] == 0


def test_fib_basis_example():
    env = results("fib-basis", "--anyons", "3", "--charge", "tau")
    assert env["results"]["n_paths"] == 2


def test_relations_example():
    assert results("relations", "--rep", "fibonacci", "--anyons", "6")["results"]["pass"] is True
    assert results("relations", "--rep", "ising", "--anyons", "8")["results"]["pass"] is True
    assert results("relations", "--rep", "abelian", "--anyons", "5")["results"]["pass"] is True


def test_complex_serialised_as_pairs():
    env = results("ising-braid", "--word", "2")
    assert env["results"]["state"][3] == pytest.approx([0.0, -2**-0.5])
    assert to_jsonable(1 + 2j) == [1.0, 2.0]


def test_fib_braid_three_anyons():
    r = results("fib-braid", "--anyons", "3", "--word", "2 1 1 2")["results"]
    assert r["u_axis_angle"]["angle_deg"] == pytest.approx(252.0)
    assert r["composite_loop"]["01"] == pytest.approx([1.0, 0.0], abs=1e-12)


def test_compile_weave(tmp_path):
    cache = tmp_path / "cache.json"
    r = results("compile-weave", "--target-distance", "0.02", "--cache", str(cache))["results"]
    assert r["distance"] < 0.02
    assert r["control_tau_block_distance_to_u4"] <= r["distance"] + 1e-12
    assert cache.exists()
    again = results("compile-weave", "--target-distance", "0.02", "--cache", str(cache))["results"]
    assert again["moves"] == r["moves"]


def test_berry_exchange():
    r = results("berry-exchange", "--steps", "200")["results"]
    assert r["ground_block_distance"] < 1e-3
    assert results("berry-exchange", "--steps", "200", "--mirror")["results"]["ground_block_distance"] < 1e-3


def test_berry_custom_path(tmp_path):
    spec = {"legs": [{"k": 1, "from": 0.0, "to": 1.0}, {"k": 3, "from": 1.0, "to": 0.0}], "steps_per_leg": 50}
    path = tmp_path / "path.json"
    path.write_text(json.dumps(spec))
    r = results("berry-exchange", "--path", str(path))["results"]
    assert r["steps_per_leg"] == 50 and r["closed"] is False
    spec["legs"][0]["extra"] = 1
    path.write_text(json.dumps(spec))
    assert call("berry-exchange", "--path", str(path))[0] == 2


def test_bdg_spectrum():
    r = results("bdg-spectrum", "--sites", "60", "--mu", "1.0")["results"]
    assert len(r["eigenvalues"]) == 120 and len(r["near_zero"]) == 2
    assert r["ph_defect"] < 1e-10


def test_splitting_csv(tmp_path):
    out = tmp_path / "scan.csv"
    code, stdout, _ = call("bdg-splitting", "--mu-bar", "0.1", "--lengths", "10:81:10", "--format", "csv", "--output", str(out))
    assert code == 0 and stdout == ""
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == "d,epsilon,ln_epsilon_envelope"
    assert len(lines) == 9


def test_empty_scan_is_header_only():
    code, out, _ = call("bdg-splitting", "--lengths", "", "--format", "csv")
    assert code == 0 and out == "d,epsilon,ln_epsilon_envelope\n"


def test_zero_mode_csv():
    code, out, _ = call("jr-zero-mode", "--spacing", "0.05", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "x,density" and len(lines) == 802


def test_emit_plot_data(tmp_path):
    p = tmp_path / "e.csv"
    assert emit_plot_data(["x", "density"], [], str(p)) == "x,density\n"
    assert p.read_text(encoding="utf-8") == "x,density\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["fib-basis"],
        ["fib-basis", "--anyons", "three"],
        ["fib-basis", "--anyons", "3", "--colour", "red"],
        ["fib-basis", "--anyons", "30"],
        ["fib-basis", "--anyons", "3", "--charge", "sigma"],
        ["ising-fuse", "--word", "4", "--pairing", "(1,3)(2,4)"],
        ["ising-fuse", "--word", "1", "--pairing", "(1,3)"],
        ["ising-braid", "--word", "1 x"],
        ["relations", "--rep", "ising", "--anyons", "5"],
        ["compile-weave", "--max-moves", "0"],
        ["berry-exchange", "--steps", "1"],
        ["ising-braid", "--word", "1", "--format", "csv"],
    ],
)
def test_usage_errors_exit_2_without_json(argv):
    code, out, err = call(*argv)
    assert code == 2
    assert out == ""
    assert err.strip()


def test_numerical_failure_exits_1():
    code, out, err = call("bdg-splitting", "--lengths", "20,40")
    assert code == 1 and out == "" and "numerical" in err


def _strip_time(text):
    env = json.loads(text)
    env.pop("wall_time_ms")
    return env


@pytest.mark.parametrize(
    "argv",
    [
        ["ising-fuse", "--word", "2", "--pairing", "(1,3)(2,4)", "--shots", "1000", "--seed", "11"],
        ["compile-weave", "--max-moves", "6", "--workers", "3"],
        ["bdg-splitting", "--mu-bar", "0.1", "--lengths", "10:61:10", "--workers", "4"],
    ],
)
def test_deterministic_output(argv):
    a, b = call(*argv), call(*argv)
    assert _strip_time(a[1]) == _strip_time(b[1])


def test_every_subcommand_has_help(capsys):
    for name, (_, text) in COMMANDS.items():
        assert run([name, "--help"]) == 0
        assert text in " ".join(capsys.readouterr().out.split())


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "anyonsim", "fib-basis", "--anyons", "4"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["n_paths"] == 5
    proc = subprocess.run([sys.executable, "-m", "anyonsim", "nope"], capture_output=True, text=True, timeout=60)
    assert proc.returncode == 2 and proc.stdout == ""
