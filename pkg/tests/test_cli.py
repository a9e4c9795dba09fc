from __future__ import annotations

import json
import subprocess
import sys

import pytest

from virwitt import __version__
from virwitt.cli import main
from virwitt.localfn import parse_local_function

CHI = '{"tag":"W","points":[{"x":"1","coeffs":["1","0"]}]}'
HARMONIC = ",".join(f"1/{k}" for k in range(1, 23))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err.strip()


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["bracket", "t", "t^2", "--algebra", "W"], "t^2"),
        (["bracket", "t^3", "t^-1", "--algebra", "Vir"], "-4*t + 12*z"),
        (["orbit-dim", CHI], "2"),
        (["locality", "--dmax", "10", HARMONIC], "none"),
        (["locality", "--dmax", "4", ",".join(str(2 ** k + 3 ** k) for k in range(10))], "t^2 - 5*t + 6"),
        (["poisson", "e_1", "e_2"], "e_3"),
        (["poisson", "e_2", "e_-2", "--central"], "12*z - 4*e_0"),
        (["pgamma", "e_1", "--gamma", "2"], "t^2*y + 4*t"),
        (["eval", '{"tag":"W","points":[{"x":"1","coeffs":["1","0","2"]}]}', "t^3"], "13"),
        (["rank", CHI], "2"),
        (["orbit-eq", CHI, '{"tag":"W","points":[{"x":"5","coeffs":["7","0"]}]}'], "true"),
        (["classify-subalg", '{"f0":{"roots":[["1",3]]},"generators":["t - 2*t^2 + t^3"],"tag":"W"}'], "W(f)[f=(t - 1)^2]"),
        (["weyl", "mul", "d", "t"], "t*d + 1"),
        (["weyl", "pi", "t", "--gamma", "3"], "t*d + 3"),
        (["weyl", "act", "t", '{"x":"1","coeffs":["1"]}'], '{"x": "1", "coeffs": ["1"]}'),
        (["weyl", "span", '{"x":"1","coeffs":["0","1"]}', "--gamma", "1"], None),
    ],
)
def test_examples(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    if expected is not None:
        assert out == expected


def test_span_reports_delta_flag(capsys):
    _, out, _ = run(capsys, "weyl", "span", '{"x":"1","coeffs":["0","1"]}', "--gamma", "1")
    assert out.endswith("delta not reached")
    _, out, _ = run(capsys, "weyl", "span", '{"x":"1","coeffs":["0","1"]}', "--gamma", "0")
    assert out.endswith("delta reached")


def test_json_output_carries_version(capsys):
    for argv in (["bracket", "t", "t^2"], ["orbit-dim", CHI], ["express-z", "1"], ["orbit-invariant", CHI]):
        code, out, _ = run(capsys, *argv, "--format", "json")
        assert code == 0
        assert json.loads(out)["version"] == __version__


def test_canonical_form_json_reparses(capsys):
    chi = '{"tag":"Wgeq-1","points":[{"x":"2","coeffs":["1","2","3","4"]}]}'
    _, out, _ = run(capsys, "canonicalize", chi, "--format", "json")
    data = json.loads(out)
    form = parse_local_function(json.dumps(data["form"]))
    assert form.points[0].x == 2
    _, again, _ = run(capsys, "canonicalize", json.dumps(data["form"]), "--format", "json")
    assert json.loads(again)["form"] == data["form"]


def test_express_z_with_lifts(capsys):
    code, out, _ = run(capsys, "express-z", "t", "--lifts", json.dumps({str(p): "1/2" for p in range(-8, 9)}))
    assert code == 0 and out.startswith("z = ")
    code, _, err = run(capsys, "express-z", "t", "--lifts", '{"0": "0"}')
    assert code == 2 and "need lifts" in err
    code, _, _ = run(capsys, "express-z", "t", "--lifts", '{"a": "0"}')
    assert code == 1


def test_parse_errors_exit_one_with_position(capsys):
    code, _, err = run(capsys, "bracket", "t + * 2", "t")
    assert code == 1 and "position 4" in err
    code, _, err = run(capsys, "orbit-dim", '{"tag":"W",')
    assert code == 1 and "position" in err
    code, _, _ = run(capsys, "locality", "1,2,x", "--dmax", "1")
    assert code == 1


def test_domain_errors_exit_two(capsys):
    code, _, _ = run(capsys, "bracket", "t^-1", "t", "--algebra", "Wgeq-1")
    assert code == 2
    code, _, _ = run(capsys, "classify-subalg", '{"f0":{"roots":[["1",4]]},"generators":[]}')
    assert code == 2
    code, _, _ = run(capsys, "locality", "1,2", "--dmax", "3")
    assert code == 2


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bracket", "t"])
    assert exc.value.code == 1


def test_file_payload(tmp_path, capsys):
    path = tmp_path / "chi.json"
    path.write_text(CHI)
    assert run(capsys, "orbit-dim", f"@{path}")[1] == "2"
    assert run(capsys, "orbit-dim", f"@{tmp_path / 'missing.json'}")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "virwitt", "bracket", "t", "t^2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "t^2"
