import json
import subprocess
import sys

import pytest

from smoothzeros.cli import main, parse_orders
from smoothzeros.errors import InputError


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return {
        "recip": write("recip.json", {"kind": "reciprocal"}),
        "lattice": write("lattice.json", {"kind": "lattice", "step": "1"}),
        "finite": write("finite.json", {"kind": "finite", "points": ["0", "1", "2"]}),
        "interval": write("interval.json", {"kind": "intervals", "intervals": [["0", "1"]]}),
        "empty": write("empty.json", {"kind": "empty"}),
        "tmp": tmp_path,
    }


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_orders():
    assert parse_orders("3..5") == [3, 4, 5]
    assert parse_orders("1,4") == [1, 4]
    with pytest.raises(InputError):
        parse_orders("x")


def test_classify(files, capsys):
    code, out, _ = run(["classify", files["recip"]], capsys)
    assert code == 0 and "smooth" in out


def test_build_and_eval_round_trip(files, capsys):
    target = str(files["tmp"] / "p.json")
    code, _, _ = run(["build", "entire", files["finite"], "--out", target], capsys)
    assert code == 0
    code, out, _ = run(["eval", target, "--x", "3", "--precision", "64"], capsys)
    assert code == 0 and "6" in out


def test_eval_csv_and_json(capsys):
    code, out, _ = run(["eval", "lerch", "--x", "0,1/2", "--precision", "64", "--format", "csv"], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 3
    code, out, _ = run(["jet", "g", "--x", "0", "--order", "2", "--precision", "64", "--format", "json"], capsys)
    assert code == 0
    json.loads(out)


def test_exit_code_precondition(files, capsys):
    code, _, err = run(["build", "singular", files["interval"]], capsys)
    assert code == 3 and err.startswith("precondition violated")
    code, _, _ = run(["build", "entire", files["recip"]], capsys)
    assert code == 3


def test_exit_code_input_errors(files, capsys):
    code, _, _ = run(["eval", str(files["tmp"] / "missing.json"), "--x", "0"], capsys)
    assert code == 2
    code, _, _ = run(["build", "lineable", files["empty"], "--phi", "0"], capsys)
    assert code == 2


def test_exit_code_cost_model(capsys):
    code, _, err = run(["jet", "lerch", "--x", "0", "--order", "9", "--precision", "64"], capsys)
    assert code == 4 and err


def test_exit_code_failed_check(files, capsys):
    target = str(files["tmp"] / "wrong.json")
    run(["build", "smooth", files["finite"], "--out", target], capsys)
    code, out, _ = run(["verify", target, files["lattice"], "--precision", "64", "--window=-3:3",
                        "--in-samples", "10", "--out-samples", "10"], capsys)
    assert code == 1 and "FAIL" in out


def test_verify_output_is_deterministic(files, capsys):
    target = str(files["tmp"] / "r.json")
    run(["build", "smooth", files["recip"], "--out", target], capsys)
    argv = ["verify", target, files["recip"], "--precision", "64", "--seed", "4",
            "--in-samples", "20", "--out-samples", "50", "--format", "csv"]
    first = run(argv, capsys)
    second = run(argv, capsys)
    assert first[0] == 0 and first == second


def test_radius_and_bn(capsys):
    code, out, _ = run(["radius", "g", "--orders", "3..5", "--precision", "512"], capsys)
    assert code == 0 and "r_n" in out
    code, out, _ = run(["bn", "2"], capsys)
    assert code == 0 and out.strip() == "1144"
    code, out, _ = run(["bn", "2", "--c"], capsys)
    assert out.strip() == "162"


def test_expand_and_freeness(capsys):
    code, out, _ = run(["expand", "--primes", "2", "--poly", '[["1", [2]]]'], capsys)
    assert code == 0 and "(2)" in out
    code, out, _ = run(["freeness", "--trials", "20", "--seed", "1"], capsys)
    assert code == 0 and "passes: 20" in out


def test_flatness_cli(files, capsys):
    target = str(files["tmp"] / "r.json")
    run(["build", "smooth", files["recip"], "--out", target], capsys)
    code, out, _ = run(["flatness", target, "--orders", "1..2", "--deltas", "1/10,1/100",
                        "--samples", "10", "--precision", "64"], capsys)
    assert code == 0 and "PASS" in out
    code, _, _ = run(["flatness", target, "--c", "2/5", "--precision", "64"], capsys)
    assert code == 3


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "smoothzeros.cli", "bn", "1"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "20"
