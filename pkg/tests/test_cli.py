import io
import json

import pytest

from stringy_orbifold.cli import main


@pytest.fixture
def run(capsys, fixture_path):
    def _run(*argv):
        args = [fixture_path(a) if a.endswith(".json") else a for a in argv]
        code = main(args)
        out, err = capsys.readouterr()
        return code, out, err

    return _run


def test_epoly_eq_true(run):
    assert run("epoly", "eq", "(L^2-1)/(L-1)", "L+1") == (0, "true\n", "")


def test_epoly_eq_false(run):
    code, out, _ = run("epoly", "eq", "L", "L+1")
    assert code == 1 and out == "false\n"


def test_epoly_specialize(run):
    assert run("epoly", "specialize", "1+L+L^2", "--u", "1", "--v", "1")[:2] == (0, "3\n")
    assert run("epoly", "specialize", "(L-1)/(L^2-1)", "--u", "2", "--v", "2")[:2] == (0, "1/5\n")


def test_epoly_specialize_pole(run):
    code, _, err = run("epoly", "specialize", "1/(L-1)", "--u", "1", "--v", "1")
    assert code == 2 and "pole" in err.lower()


def test_epoly_truncate(run):
    assert run("epoly", "truncate", "1/(L-1)", "--level", "3")[:2] == (0, "L^-1 + L^-2 + L^-3\n")


def test_epoly_eval_canonical(run):
    assert run("epoly", "eval", "-L + 3 - 2*L^2")[:2] == (0, "-2*L^2 - L + 3\n")


def test_epoly_parse_error_has_position(run):
    code, out, err = run("epoly", "eval", "L^+")
    assert code == 2 and out == "" and "position 2" in err


def test_orbifold_sectors(run):
    code, out, _ = run("orbifold", "sectors", "z2_11.json", "--json")
    assert code == 0
    rows = json.loads(out)["sectors"]
    assert [r["shift"] for r in rows] == [0, 1]
    code, out, _ = run("orbifold", "sectors", "z2_11.json")
    assert code == 0 and len(out.strip().splitlines()) == 3


def test_orbifold_e(run):
    assert run("orbifold", "e", "z3_111.json")[:2] == (0, "L^3 + L^2 + L\n")


def test_orbifold_check(run):
    code, out, _ = run("orbifold", "check", "z2_10.json", "--json")
    assert code == 1
    assert json.loads(out) == {"gorenstein": False, "reflections": True, "trivially_acting": [], "ok": False}
    assert run("orbifold", "check", "z3_111.json")[0] == 0


def test_orbifold_hodge(run):
    code, out, _ = run("--json", "orbifold", "hodge", "p2_sectors.json")
    assert code == 0
    data = json.loads(out)
    assert data["betti"] == [[0, 1], [2, 2], [4, 2]]
    assert data["consistent"] is True


def test_stringy_gorenstein_and_integral(run):
    assert run("stringy", "gorenstein", "a1_resolution.json")[:2] == (0, "L^2 + L\n")
    assert run("stringy", "integral", "a1_resolution.json")[:2] == (0, "L^2 + L\n")
    code, out, _ = run("stringy", "integral", "point_mult1.json")
    assert (code, out) == (0, "(L^3 - L^2)/(L^2 - 1)\n")


def test_stringy_levels(run):
    code, out, _ = run("stringy", "levels", "point_mult1.json", "--max", "3", "--json")
    assert code == 0
    levels = json.loads(out)["levels"]
    assert [row["n"] for row in levels] == [0, 1, 2, 3]
    assert levels[0]["volume"] == "L - 1"


def test_stringy_validate(run):
    assert run("stringy", "validate", "a1_resolution.json")[0] == 0
    code, out, _ = run("stringy", "validate", "bad_cover.json")
    assert code == 1 and "cover identity" in out


def test_stringy_invalid_model_exit_1(run):
    code, _, err = run("stringy", "gorenstein", "bad_cover.json")
    assert code == 1 and "cover identity" in err


def test_stringy_kequiv(run):
    assert run("stringy", "kequiv", "a1_resolution.json", "a1_resolution_alt.json")[0] == 0
    code, out, _ = run("stringy", "kequiv", "a1_resolution.json", "a2_resolution.json")
    assert code == 1 and "L^2 + 2*L" in out


def test_verify_catalogue(run):
    code, out, _ = run("verify", "--catalogue", "--json")
    assert code == 0
    entries = json.loads(out)["entries"]
    assert [e["name"] for e in entries] == ["A1", "A2", "A3", "A4", "A5", "C3/Z3"]
    assert all(e["passed"] for e in entries)


def test_verify_mismatch(run):
    code, out, _ = run("verify", "--action", "z2_11.json", "--resolution", "a2_resolution.json", "--json")
    assert code == 1
    data = json.loads(out)
    assert (data["stringy"], data["orbifold"], data["equal"]) == ("L^2 + 2*L", "L^2 + L", False)


def test_verify_precondition(run):
    code, _, err = run("verify", "--action", "z2_10.json", "--resolution", "a1_resolution.json")
    assert code == 2 and "Gorenstein" in err and "reflections" in err


def test_jets_count(run):
    assert run("jets", "count", "affine2.json", "--level", "2", "--q", "3")[:2] == (0, "729\n")
    assert run("jets", "count", "cone.json", "--level", "0", "--q", "3")[:2] == (0, "9\n")


def test_jets_equations(run):
    code, out, _ = run("jets", "equations", "cone.json", "--level", "1", "--json")
    assert code == 0
    assert json.loads(out)["equations"][0] == "x_0*y_0 - z_0^2"


def test_jets_bundle_check(run):
    code, out, _ = run("jets", "bundle-check", "cone.json", "--dim", "2", "--max-level", "1", "--q", "2", "--json")
    assert code == 1
    data = json.loads(out)
    assert data["counts"] == [4, 20] and data["first_failure"] == 0
    assert run("jets", "bundle-check", "surface.json", "--dim", "2", "--max-level", "2", "--q", "3")[0] == 0


def test_jets_twisted_count(run):
    argv = ["jets", "twisted-count", "--dim", "2", "--order", "2", "--weights", "1,1", "--level", "1", "--q", "3"]
    assert run(*argv)[:2] == (0, "81\n")


def test_jets_cap_exit_3(run):
    code, _, err = run("jets", "count", "cone.json", "--level", "9", "--q", "2")
    assert code == 3 and "cap" in err
    code, _, _ = run("jets", "--max-points", "100", "count", "cone.json", "--level", "1", "--q", "3")
    assert code == 3


def test_jets_non_prime_exit_2(run):
    assert run("jets", "count", "cone.json", "--level", "0", "--q", "4")[0] == 2


def test_missing_file_exit_2(run, tmp_path):
    code, _, err = run("orbifold", "e", str(tmp_path / "nope.json"))
    assert code == 2 and err


def test_malformed_json_exit_2(run, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("stringy", "integral", str(bad))[0] == 2


def test_stdin(run, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO('{"dim":2,"generators":[{"order":2,"weights":[1,1]}]}'))
    assert run("orbifold", "e", "-")[:2] == (0, "L^2 + L\n")


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--catalogue", "--json"),
        ("orbifold", "sectors", "z3_111.json", "--json"),
        ("stringy", "levels", "axes_12.json", "--max", "4", "--json"),
        ("jets", "bundle-check", "affine2.json", "--dim", "2", "--max-level", "2", "--q", "2", "--json"),
    ],
)
def test_json_output_is_deterministic(run, argv):
    first = run(*argv)
    second = run(*argv)
    assert first == second
    assert json.dumps(json.loads(first[1]), sort_keys=True, indent=2) + "\n" == first[1]


def test_format_flag_positions(run):
    a = run("--format", "json", "orbifold", "e", "z2_11.json")
    b = run("orbifold", "e", "z2_11.json", "--format", "json")
    assert a == b and json.loads(a[1])


def test_help_exit_0(run):
    code, out, _ = run("--help")
    assert code == 0 and "verify" in out


def test_usage_error_exit_2(run):
    assert run("orbifold")[0] == 2
    assert run("nonsense")[0] == 2
