import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from rootclusters.cli import RunReport, dyadic_to_decimal, emit_plot, maxprec, parse_eps, run
from rootclusters.counting import count_with_confirmation
from rootclusters.geometry import Box, Disc, discs_intersect
from rootclusters.polynomial import format_polynomial, read_polynomial_file

from test_counting import from_roots


def cli(*args):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(args), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def z2p1(tmp_path):
    f = tmp_path / "z2p1.txt"
    f.write_text("degree 2\n1 0\n0 0\n1 0\n")
    return f


def clusters_of(text):
    doc = json.loads(text)
    return doc, [(Fraction(c["center"][0]), Fraction(c["center"][1]), Fraction(c["radius"]),
                  c["multiplicity"]) for c in doc["clusters"]]


def test_json_for_z2_plus_1(z2p1):
    code, out, _ = cli("--poly", str(z2p1), "--roi", "-2,2,-2,2", "--output", "json")
    assert code == 0
    doc, cl = clusters_of(out)
    assert doc["degree"] == 2 and len(cl) == 2
    assert sorted(round(float(im)) for _, im, _, _ in cl) == [-1, 1]
    assert all(r <= Fraction(1, 2**53) and m == 1 for _, _, r, m in cl)
    assert set(doc["stats"]) >= {"depth", "size", "maxprec", "timings"}
    assert set(doc["stats"]["timings"]) == {"total", "oracle_for_q", "refine", "power_sums_to_coeffs"}
    assert isinstance(doc["clusters"][0]["center"][0], str)


def test_json_round_trip_reverifies(tmp_path):
    P = from_roots([(Fraction(1, 3), Fraction(1, 5)), (Fraction(1, 3), Fraction(1, 5)),
                    (Fraction(-1, 2), Fraction(-3, 7)), (Fraction(5, 4), Fraction(0))])
    f = tmp_path / "p.txt"
    f.write_text(format_polynomial(P.coefficients))
    code, out, _ = cli("--poly", str(f), "--roi", "-2,2,-2,2", "--eps", "2^-40")
    assert code == 0
    _, cl = clusters_of(out)
    assert sorted(m for *_, m in cl) == [1, 1, 2]
    Q = read_polynomial_file(f)
    for re, im, r, m in cl:
        B = Box((re, im), r * Fraction(4, 3))
        assert count_with_confirmation(Q, B) == m


def test_csv_output(z2p1):
    code, out, _ = cli("--poly", str(z2p1), "--roi", "-2,2,-2,2", "--output", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "re,im,radius,multiplicity" and len(lines) == 3


def test_stats_table(z2p1):
    code, _, err = cli("--poly", str(z2p1), "--roi", "-2,2,-2,2", "--stats")
    assert code == 0 and "maxprec" in err and "size" in err


def test_bernoulli_deflate_example():
    code, out, _ = cli("--poly", "builtin:bernoulli:64", "--roi", "-150,150,-150,150",
                       "--eps", "2^-53", "--mode", "deflate", "--n", "auto")
    doc, cl = clusters_of(out)
    assert code == 0 and len(cl) == 64 and all(m == 1 for *_, m in cl)
    assert doc["parameters"]["n"] == 8


def test_mignotte_plain_example():
    code, out, _ = cli("--poly", "builtin:mignotte:64:8", "--roi", "-150,150,-150,150",
                       "--eps", "2^-53", "--mode", "plain")
    _, cl = clusters_of(out)
    assert code == 0 and len(cl) == 63 and sum(m for *_, m in cl) == 64


@pytest.mark.parametrize("spec,roi", [("builtin:bernoulli:16", "-8,8,-8,8"),
                                      ("builtin:mandelbrot:15", "-4,4,-4,4"),
                                      ("builtin:spiral:12", "-2,2,-2,2"),
                                      ("builtin:mignotte:12:4", "-4,4,-4,4")])
def test_plain_and_deflate_agree(spec, roi):
    _, a, _ = cli("--poly", spec, "--roi", roi, "--mode", "plain")
    _, b, _ = cli("--poly", spec, "--roi", roi, "--mode", "deflate", "--n", "2")
    _, ca = clusters_of(a)
    _, cb = clusters_of(b)
    assert sum(m for *_, m in ca) == sum(m for *_, m in cb)
    discs_b = [(Disc((re, im), r), m) for re, im, r, m in cb]
    for re, im, r, m in ca:
        assert any(discs_intersect(Disc((re, im), r), D) and m == mb for D, mb in discs_b)


def test_usage_errors(tmp_path, z2p1):
    bad = tmp_path / "bad.txt"
    bad.write_text("degree 2\n1 0\nx 0\n1 0\n")
    code, _, err = cli("--poly", str(bad), "--roi", "-2,2,-2,2")
    assert code == 1 and "line 3" in err
    assert cli("--poly", str(tmp_path / "missing.txt"), "--roi", "-2,2,-2,2")[0] == 1
    assert cli("--poly", str(z2p1), "--roi", "-2,2,-2,3")[0] == 1
    assert cli("--poly", str(z2p1), "--roi", "-0.1,0.1,-0.1,0.1")[0] == 1
    assert cli("--poly", str(z2p1), "--roi", "-2,2,-2")[0] == 1
    assert cli("--poly", str(z2p1), "--roi", "-2,2,-2,2", "--eps", "-1")[0] == 1
    assert cli("--poly", str(z2p1), "--roi", "-2,2,-2,2", "--n", "0")[0] == 1
    assert cli("--poly", "builtin:nope:3", "--roi", "-2,2,-2,2")[0] == 1
    assert cli("--poly", str(z2p1), "--roi", "-2,2,-2,2", "--plot", str(tmp_path / "no" / "x.svg"))[0] == 1
    with pytest.raises(SystemExit) as info:
        cli("--roi", "-2,2,-2,2")
    assert info.value.code == 1


def test_unresolvable_exit_code(tmp_path):
    gap = Fraction(1, 2**200)
    P = from_roots([(Fraction(1, 3), Fraction(0)), (Fraction(1, 3) + gap, Fraction(0))])
    f = tmp_path / "close.txt"
    f.write_text(format_polynomial(P.coefficients))
    code, _, err = cli("--poly", str(f), "--roi", "-1,1,-1,1", "--eps", "2^-250", "--lmax", "106")
    assert code == 2 and "unresolvable" in err


def test_plot(tmp_path, z2p1):
    a, b, c = tmp_path / "a.svg", tmp_path / "b.svg", tmp_path / "c.svg"
    cli("--poly", str(z2p1), "--roi", "-2,2,-2,2", "--plot", str(a))
    cli("--poly", str(z2p1), "--roi", "-2,2,-2,2", "--plot", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().count("<circle") == 2
    cli("--poly", str(z2p1), "--roi", "-2,2,-2,2", "--plot", str(c), "--plot-boxes")
    assert c.read_text().count("<rect") > a.read_text().count("<rect")


def test_plot_empty_and_labels(tmp_path):
    roi = Box((0, 0), 4)
    empty = RunReport(3, [], {}, {})
    emit_plot(empty, roi, tmp_path / "e.svg")
    text = (tmp_path / "e.svg").read_text()
    assert "<circle" not in text and 'class="roi"' in text
    two = RunReport(3, [(Fraction(0), Fraction(0), Fraction(1, 8), 2),
                        (Fraction(1), Fraction(1), Fraction(1, 2**60), 1)], {}, {})
    emit_plot(two, roi, tmp_path / "t.svg")
    text = (tmp_path / "t.svg").read_text()
    assert text.count("<circle") == 2 and text.count("<text") == 1


def test_helpers():
    assert dyadic_to_decimal(Fraction(-3, 8)) == "-0.375"
    assert dyadic_to_decimal(Fraction(5)) == "5"
    assert Fraction(dyadic_to_decimal(Fraction(1, 2**60))) == Fraction(1, 2**60)
    with pytest.raises(ValueError):
        dyadic_to_decimal(Fraction(1, 3))
    assert maxprec([Fraction(1, 2**53), Fraction(1, 4)]) == 53
    assert maxprec([Fraction(3, 2**55)]) == 53
    assert maxprec([]) is None
    assert parse_eps("2^-53") == Fraction(1, 2**53)
    assert parse_eps("0.001") == Fraction(1, 1000)


def test_module_entry_point(z2p1):
    proc = subprocess.run([sys.executable, "-m", "rootclusters", "--poly", str(z2p1),
                           "--roi", "-2,2,-2,2", "--output", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("re,im")
