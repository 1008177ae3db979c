import json

import pytest

from cli import main
from pointspectra.algebra.relideal import MonomialSpec, parse_polynomial, relation_minor
from pointspectra.errors import HypothesisUnmet
from pointspectra.geometry.configuration import Spectrum
from pointspectra.geometry.scalar import QuadScalar
from pointspectra.services import storage


def _save(tmp_path, name, P):
    path = tmp_path / f"{name}.json"
    storage.save_configuration(P, path, name=name)
    return str(path)


def test_spectrum_csv(tmp_path, capsys, rhombus):
    path = _save(tmp_path, "rhombus", rhombus)
    assert main(["spectrum", path]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "value,approx"
    assert [line.split(",")[0] for line in lines[1:]] == ["4", "5", "5", "5", "5", "16"]


def test_spectrum_json_both_kinds(tmp_path, capsys, rhombus):
    path = _save(tmp_path, "rhombus", rhombus)
    assert main(["--format", "json", "spectrum", path, "--kind", "both"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["distance"] == ["4", "5", "5", "5", "5", "16"]
    assert len(payload["volume"]) == 4


def test_spectrum_compare(tmp_path, distance_pair, rhombus, square):
    P, Q = distance_pair
    first, second = _save(tmp_path, "p", P), _save(tmp_path, "q", Q)
    assert main(["spectrum", first, "--compare", second]) == 0
    assert main(["--tol", "1e-9", "spectrum", first, "--compare", second]) == 0
    assert main(["spectrum", _save(tmp_path, "r", rhombus), "--compare", _save(tmp_path, "s", square)]) == 1


def test_equiv(tmp_path, capsys, distance_pair, combined_pair):
    assert main(["equiv", _save(tmp_path, "p", distance_pair[0]), _save(tmp_path, "q", distance_pair[1])]) == 1
    capsys.readouterr()

    P, Q = combined_pair
    args = ["equiv", _save(tmp_path, "a", P), _save(tmp_path, "b", Q), "--group", "affine"]
    assert main(args) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["equivalent"] is True
    assert report["group"] == "affine"
    assert sorted(report["permutation"]) == [1, 2, 3, 4]


def test_certify(tmp_path, capsys, rhombus, distance_pair):
    assert main(["certify", _save(tmp_path, "rhombus", rhombus)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "certified"
    assert report["cosets"] == 2

    assert main(["certify", _save(tmp_path, "p", distance_pair[0])]) == 2


def test_reconstruct(tmp_path, capsys, distance_pair, rhombus):
    collision = tmp_path / "collision.csv"
    storage.write_spectrum_csv(distance_pair[0].distance_spectrum(), collision)
    assert main(["reconstruct", str(collision), "--n", "4", "--m", "2"]) == 1
    assert json.loads(capsys.readouterr().out)["count"] >= 2

    single = tmp_path / "rhombus.csv"
    storage.write_spectrum_csv(rhombus.distance_spectrum(), single)
    assert main(["reconstruct", str(single), "--n", "4", "--m", "2"]) == 0



def test_reconstruct_volumes_without_rational_roots(tmp_path, capsys):
    path = tmp_path / "volumes.csv"
    storage.write_spectrum_csv(Spectrum.of([QuadScalar(v) for v in (2, 1, 1, 1)], "volume"), path)
    assert main(["reconstruct", str(path), "--kind", "volume", "--n", "4", "--m", "2"]) == 1
    assert json.loads(capsys.readouterr().out)["count"] == 0

def test_check_relations(tmp_path, capsys, area_pair_5):
    assert main(["check-relations", _save(tmp_path, "p", area_pair_5[0])]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["checked"] == 5
    assert report["violated"] == []


def test_hist(tmp_path, capsys, distance_pair):
    assert main(["hist", _save(tmp_path, "p", distance_pair[0]), "--bin", "0.5", "--sqrt"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "bin_lower,count"
    assert len(lines) == 5


def test_probe_outside_hypotheses(tmp_path, rhombus):
    path = _save(tmp_path, "rhombus", rhombus)
    with pytest.warns(HypothesisUnmet):
        assert main(["probe", path, "--samples", "5", "--levels", "1"]) == 2


def test_fixtures(capsys, rhombus):
    assert main(["fixtures", "list"]) == 0
    names = [line.split("\t")[0] for line in capsys.readouterr().out.splitlines()]
    assert "rhombus" in names and "combined-pair-4" in names

    assert main(["fixtures", "show", "rhombus"]) == 0
    assert storage.parse_configuration(capsys.readouterr().out) == rhombus

    assert main(["fixtures", "show", "distance-pair-4", "--index", "1"]) == 0
    assert storage.parse_configuration(capsys.readouterr().out).n == 4


def test_mine(capsys):
    assert main(["mine", "--grid", "2x2", "--n", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["enumerated"] == 4
    assert report["distinct"] == 1
    assert report["pairs"] == []


def test_mine_budget_is_indeterminate(capsys):
    assert main(["mine", "--grid", "4x2", "--n", "6", "--kind", "volume", "--budget", "10"]) == 2
    assert json.loads(capsys.readouterr().out)["partial"] is True


def test_errors_exit_with_three(tmp_path):
    assert main(["spectrum", str(tmp_path / "missing.json")]) == 3

    broken = tmp_path / "broken.json"
    broken.write_text('{"dim": 2, "points": [[0, "x"]]}')
    assert main(["spectrum", str(broken)]) == 3

    assert main(["fixtures", "show", "heptagon"]) == 3
    assert main(["fixtures", "show"]) == 3
    assert main(["mine", "--grid", "tall", "--n", "3"]) == 3

    with pytest.raises(SystemExit) as excinfo:
        main(["spectrum"])
    assert excinfo.value.code == 3


def test_relideal_minor(capsys):
    assert main(["relideal", "minor", "--n", "4", "--rows", "1,2,3", "--cols", "1,2,3"]) == 0
    F = parse_polynomial(capsys.readouterr().out.strip(), 4)
    assert F == relation_minor(4, (1, 2, 3), (1, 2, 3))
    assert F.coefficient(MonomialSpec.of([(1, 2), (2, 3), (3, 4)])) == -2

    assert main(["--format", "json", "relideal", "minor", "--n", "4", "--rows", "1,2,3", "--cols", "1,2,3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["degree"] == 3
    assert payload["rows"] == [1, 2, 3]
    assert payload["terms"] == len(F.terms)


def test_relideal_minor_errors():
    assert main(["relideal", "minor", "--n", "4", "--rows", "1,2", "--cols", "1,2,3"]) == 3
    assert main(["relideal", "minor", "--n", "4", "--rows", "1,2,4", "--cols", "1,2,3"]) == 3
    with pytest.raises(SystemExit) as excinfo:
        main(["relideal", "minor", "--n", "4", "--rows", "a,b", "--cols", "1,2"])
    assert excinfo.value.code == 3
