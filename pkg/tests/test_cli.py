import json
from fractions import Fraction

import pytest

from hilbzeta import cli, verify
from hilbzeta.qzeta import QMExpression, QZetaCombination, Z, okounkov_z, qzeta_eval
from hilbzeta.series import PowerSeries
from hilbzeta.hilbert import theta2

K3 = '{"chi": 24, "K2": 0, "KL": 0, "L2": 4}'
P2_RING = '{"r": 1, "intersection": [[1]], "K": [-3], "L": [1]}'


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table_rows(out):
    rows = {}
    for line in out.splitlines():
        if line.startswith("#") or line.startswith("k\t") or "\t" not in line:
            continue
        k, v = line.split("\t")
        rows[int(k)] = Fraction(v)
    return rows


# -- expand --------------------------------------------------------------------

def test_expand_theta2_table(capsys):
    code, out, _ = run(capsys, "expand", "theta2", "-N", "5")
    assert code == 0
    assert table_rows(out) == {2: Fraction(1, 4), 3: Fraction(5, 3), 4: Fraction(19, 4), 5: Fraction(11)}


def test_expand_small_examples(capsys):
    assert table_rows(run(capsys, "expand", "Z:2", "--order", "1")[1]) == {1: 1}
    code, out, _ = run(capsys, "expand", "bracket:1", "-N", "4", "--format", "json")
    assert code == 0
    assert PowerSeries.from_json(out) == PowerSeries.from_ints([0, 1, 2, 2, 3])


def test_expand_formats_round_trip(capsys):
    expected = okounkov_z((2, 2), 12)
    out = run(capsys, "expand", "Z:2,2", "-N", "12", "--format", "json")[1]
    assert PowerSeries.from_json(out) == expected
    out = run(capsys, "expand", "Z:2,2", "-N", "12", "--format", "csv")[1]
    assert PowerSeries.from_csv(out) == expected


def test_expand_surface_series(capsys):
    code, out, _ = run(capsys, "expand", "ch1", "--surface", '{"chi": 24, "K2": 0, "KL": 0, "L2": 2}')
    assert code == 0 and table_rows(out) == {}


@pytest.mark.parametrize("argv", [
    ["expand", "nonsense"],
    ["expand", "Z:1"],
    ["expand", "G:3"],
    ["expand", "ch2"],
    ["expand", "theta2", "-N", "0"],
    ["verify", "--suite", "bogus"],
    ["chseries", "ch2"],
    ["chseries", "ch2", "--surface", K3, "--depth", "7"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == cli.EXIT_USAGE


def test_unknown_identifier_lists_valid_ones(capsys):
    err = run(capsys, "expand", "nonsense")[2]
    assert "theta2" in err and "bracket:" in err


def test_help_exits_zero(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0 and "recognize" in out


# -- verify --------------------------------------------------------------------

def test_verify_all_passes(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert lines and all(l.startswith("PASS") for l in lines)
    names = [l.split("] ", 1)[1] for l in lines]
    assert names == sorted(names)


def test_verify_reports_injected_fault(capsys, monkeypatch):
    monkeypatch.setattr(verify, "THETA2_FORM", Fraction(1, 3) * Z(2) ** 2 - Fraction(1, 10) * Z(4))
    code, out, _ = run(capsys, "verify", "--suite", "qzeta", "--format", "json")
    assert code == cli.EXIT_FAILED
    failed = [r for r in json.loads(out) if not r["passed"]]
    assert [r["name"] for r in failed] == ["quadruple.theta2_quasimodular"]
    assert failed[0]["index"] == 2


# -- recognize -----------------------------------------------------------------

def test_recognize_theta2(capsys, tmp_path):
    path = tmp_path / "theta.txt"
    path.write_text("\n".join(f"{k} {c}" for k, c in enumerate(theta2(30))))
    code, out, _ = run(capsys, "recognize", str(path), "-N", "30")
    assert code == 0
    expr = QMExpression.from_json(out.splitlines()[-1])
    assert expr.to_qzeta() == Fraction(1, 3) * Z(2) ** 2 - Fraction(1, 12) * Z(4)


def test_recognize_all_zero(capsys, tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(json.dumps(["0"] * 40))
    code, out, _ = run(capsys, "recognize", str(path), "--format", "json")
    assert code == 0
    assert QMExpression.from_json(out).to_qzeta() == QZetaCombination()


def test_recognize_rejects_z3(capsys, tmp_path):
    path = tmp_path / "z3.json"
    path.write_text(okounkov_z((3,), 40).to_json())
    code, out, _ = run(capsys, "recognize", str(path), "--format", "json")
    assert code == cli.EXIT_FAILED
    report = json.loads(out)
    assert report["recognized"] is False and isinstance(report["index"], int)


@pytest.mark.parametrize("text", ["", "0 1\n0 2\n", "0 1\n2 3\n", "0 x\n", "[1, 2", "0 1 2\n"])
def test_recognize_parse_errors(capsys, tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    assert run(capsys, "recognize", str(path))[0] == cli.EXIT_PARSE


def test_recognize_insufficient_data(capsys):
    assert run(capsys, "recognize", "[0, 1, 3]", "--weight", "8")[0] == cli.EXIT_PARSE


def test_recognize_missing_file(capsys):
    assert run(capsys, "recognize", "/nonexistent/coeffs.txt")[0] == cli.EXIT_PARSE


# -- chseries ------------------------------------------------------------------

def test_chseries_k3(capsys):
    code, out, _ = run(capsys, "chseries", "ch2", "--surface", K3, "-N", "10", "--format", "json")
    assert code == 0
    data = json.loads(out)
    combo = QZetaCombination.from_dict(data["symbolic"])
    expected = 24 * (-Fraction(5, 12) * Z(4) - Fraction(5, 6) * Z(2) ** 2) + 2 * Z(2)
    assert combo == expected
    assert PowerSeries.from_json(json.dumps(data["expansion"])) == qzeta_eval(expected, 10)


def test_chseries_ch1_k_trivial_is_zero(capsys):
    code, out, _ = run(capsys, "chseries", "ch1", "--surface", K3, "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert QZetaCombination.from_dict(data["symbolic"]) == QZetaCombination()
    assert all(Fraction(c) == 0 for c in data["expansion"])


def test_chseries_p2_oracle(capsys, tmp_path):
    path = tmp_path / "p2.json"
    path.write_text(P2_RING)
    code, out, err = run(capsys, "chseries", "ch2", "--surface", str(path), "--oracle", "--depth", "5")
    assert code == 0
    assert "oracle: PASS" in err


def test_chseries_oracle_needs_ring(capsys):
    assert run(capsys, "chseries", "ch2", "--surface", K3, "--oracle")[0] == cli.EXIT_USAGE


@pytest.mark.parametrize("surface", ['{"K2": 0}', "[1, 2]", "{not json", '{"chi": 3, "K2": "x"}',
                                     '{"r": 1, "intersection": [[1]], "K": [-3], "chi": 7}'])
def test_chseries_invalid_surface(capsys, surface):
    assert run(capsys, "chseries", "ch2", "--surface", surface)[0] == cli.EXIT_PARSE
