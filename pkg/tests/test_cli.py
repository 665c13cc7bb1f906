import csv
import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from harminterp.cli import main, load_sequence, sequence_to_json
from harminterp.gallery import radial_geometric

_NS = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    assert code == 0, err
    return json.loads(out)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@pytest.fixture()
def radial6(tmp_path, capsys):
    code, _, err = run(capsys, "gallery", "radial", "--depth", 6, "--out", tmp_path)
    assert code == 0, err
    return tmp_path / "radial_6.json"


class TestSequenceFiles:
    def test_round_trip(self, tmp_path):
        seq = radial_geometric(5)
        path = tmp_path / "seq.json"
        path.write_text(sequence_to_json(seq))
        loaded = load_sequence(path)
        assert loaded.label == seq.label
        assert len(loaded) == 5
        for a, b in zip(loaded.points, seq.points):
            assert float(a.depth) == pytest.approx(float(b.depth), rel=1e-12)

    def test_cartesian_variant(self, tmp_path):
        path = tmp_path / "xy.json"
        path.write_text('{"label": "xy", "points": [[0.5, 0.0], [0.0, -0.25]]}')
        seq = load_sequence(path)
        assert float(seq.points[1].depth) == pytest.approx(0.75)

    def test_point_outside_disc_line_numbered(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"points": [[0.1, 0.0],\n [2.0, 0.0]]}')
        code, _, err = run(capsys, "classify", path)
        assert code == 2
        assert "point 1" in err and "line 2" in err

    def test_duplicate_point_line_numbered(self, tmp_path, capsys):
        path = tmp_path / "dup.json"
        path.write_text('{"polar": [[0.5, 1.0],\n [0.5, 1.0]]}')
        code, _, err = run(capsys, "classify", path)
        assert code == 2
        assert "duplicates" in err and "line 2" in err

    def test_malformed_json_reports_line(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{\n  oops\n}")
        code, _, err = run(capsys, "solve", path, "--epsilon", 0.1)
        assert code == 2 and "line 2" in err

    def test_must_pick_one_format(self, tmp_path, capsys):
        path = tmp_path / "both.json"
        path.write_text('{"points": [[0.1, 0.0]], "polar": [[0.1, 0.0]]}')
        code, _, err = run(capsys, "classify", path)
        assert code == 2 and "exactly one" in err


class TestClassify:
    def test_radial_ten_passes_everything_at_default_constants(
        self, tmp_path, capsys
    ):
        run(capsys, "gallery", "radial", "--depth", 10, "--out", tmp_path)
        report = run_json(
            capsys,
            "classify", tmp_path / "radial_10.json",
            "--alpha", 0.5, "--m", 8, "--out", tmp_path,
        )
        verdicts = {r["condition"]: r["passed"] for r in report["results"]}
        assert all(verdicts.values())
        assert set(verdicts) == {"a", "b", "c", "d", "separation", "carleson"}
        header, rows = read_csv(tmp_path / "radial_10_classify.csv")
        assert header == ["condition", "passed", "fitted", "witness"]
        assert len(rows) == 6

    def test_fit_mode_tabulates_minimal_m(self, tmp_path, capsys):
        run(capsys, "gallery", "radial", "--depth", 10, "--out", tmp_path)
        report = run_json(
            capsys, "classify", tmp_path / "radial_10.json", "--fit", "--out", tmp_path
        )
        table = {row["alpha"]: row["minimal_m"] for row in report["results"]}
        assert len(table) == 9
        assert table[0.5] <= 8.0
        header, rows = read_csv(tmp_path / "radial_10_fit.csv")
        assert header == ["alpha", "minimal_m"]

    def test_union_classify_mechanics(self, tmp_path, capsys):
        # at exportable levels the union still satisfies the counting bound
        # at alpha = 0.9 (the adversarial growth is asymptotic), so the
        # command reports a pass with the witness row intact
        run(capsys, "gallery", "counterexample", "--levels", 2, "--out", tmp_path)
        report = run_json(
            capsys,
            "classify", tmp_path / "counterexample2_union.json",
            "--alpha", 0.9, "--m", 8, "--out", tmp_path,
        )
        row = next(r for r in report["results"] if r["condition"] == "a")
        assert row["passed"] is True
        assert row["fitted"] == pytest.approx(1.4358729437462938, rel=1e-9)
        assert "count" in row["witness"]


class TestSolve:
    def test_single_node_exact(self, tmp_path, capsys):
        (tmp_path / "one.json").write_text('{"label": "one", "polar": [[0.5, 0.0]]}')
        (tmp_path / "v.json").write_text("[5.0]")
        report = run_json(
            capsys,
            "solve", tmp_path / "one.json",
            "--values", tmp_path / "v.json", "--out", tmp_path,
        )
        assert report["results"][0]["status"] == "feasible"
        assert abs(report["results"][1]["rel_error"]) < 1e-12

    def test_seeded_radial_eight_feasible(self, tmp_path, capsys):
        run(capsys, "gallery", "radial", "--depth", 8, "--out", tmp_path)
        report = run_json(
            capsys,
            "solve", tmp_path / "radial_8.json",
            "--epsilon", 0.05, "--seed", 7, "--out", tmp_path,
        )
        assert report["results"][0]["status"] == "feasible"
        header, rows = read_csv(tmp_path / "radial_8_atoms.csv")
        assert header == ["angle", "mass"]
        masses = [float(r[1]) for r in rows]
        assert all(m > 0 for m in masses)

    def test_harnack_violating_pair_writes_certificate(self, tmp_path, capsys):
        (tmp_path / "pair.json").write_text(
            '{"label": "pair", "polar": [[0.5, 0.0], [0.7142857142857143, 0.0]]}'
        )
        (tmp_path / "v.json").write_text("[1.0, 3.0]")
        report = run_json(
            capsys,
            "solve", tmp_path / "pair.json",
            "--values", tmp_path / "v.json", "--out", tmp_path,
        )
        assert report["results"][0]["status"] == "infeasible"
        header, rows = read_csv(tmp_path / "pair_certificate.csv")
        assert header == ["node", "x", "side"]
        assert [r[2] for r in rows] == ["S", "T"]

    def test_value_count_mismatch(self, radial6, tmp_path, capsys):
        (tmp_path / "v.json").write_text("[1.0, 2.0]")
        code, _, err = run(
            capsys, "solve", radial6, "--values", tmp_path / "v.json"
        )
        assert code == 2 and "6 nodes" in err

    def test_needs_values_or_epsilon(self, radial6, capsys):
        code, _, err = run(capsys, "solve", radial6)
        assert code == 2 and "--values" in err


class TestConstruct:
    def test_radial_six_pipeline(self, radial6, tmp_path, capsys):
        report = run_json(capsys, "construct", radial6, "--out", tmp_path)
        summary = report["results"][0]
        assert summary["separation_level"] > 0
        assert summary["min_cover_margin"] >= 0
        assert summary["max_tail_sum"] < 0.2
        assert report["results"][1]["all_inequalities_ok"] is True
        svg = tmp_path / "radial_6_construction.svg"
        root = ET.fromstring(svg.read_text())
        assert root.find(f".//{_NS}circle[@id='unit-circle']") is not None
        header, arcs = read_csv(tmp_path / "radial_6_gn_arcs.csv")
        assert header == ["node", "arc_start", "arc_length"]
        bands = root.findall(f".//{_NS}path[@class='band']")
        assert len(bands) == len({int(r[0]) for r in arcs})

    def test_single_node_gets_the_whole_circle(self, tmp_path, capsys):
        (tmp_path / "one.json").write_text('{"label": "one", "polar": [[0.5, 0.0]]}')
        report = run_json(
            capsys, "construct", tmp_path / "one.json", "--out", tmp_path
        )
        header, arcs = read_csv(tmp_path / "one_gn_arcs.csv")
        assert len(arcs) == 1
        assert float(arcs[0][2]) == pytest.approx(2 * math.pi)
        assert report["results"][1]["all_inequalities_ok"] is True

    def test_failing_precondition_exits_three(self, radial6, capsys):
        code, _, err = run(
            capsys, "construct", radial6, "--m", 1, "--alpha", 0.3
        )
        assert code == 3 and "witness" in err


class TestProbe:
    def test_uniform_density_projects_to_zero(self, tmp_path, capsys):
        report = run_json(
            capsys,
            "probe", "--measure", "uniform",
            "--lambdas", "2,64", "--rays", 512, "--radial", 32, "--out", tmp_path,
        )
        header, rows = read_csv(tmp_path / "uniform_projection.csv")
        assert header == ["lambda", "projection_measure", "scaled"]
        assert all(float(r[1]) == 0.0 for r in rows)
        assert report["outputs"]

    def test_single_atom_scaled_projection(self, tmp_path, capsys):
        run_json(
            capsys,
            "probe", "--measure", "atom",
            "--lambdas", "2,8,32", "--rays", 2048, "--radial", 128,
            "--out", tmp_path,
        )
        _, rows = read_csv(tmp_path / "atom_projection.csv")
        for row in rows:
            assert 1.8 < float(row[2]) < 2.2

    def test_sequence_replay_report(self, radial6, tmp_path, capsys):
        report = run_json(
            capsys,
            "probe", radial6, "--epsilon", 0.05,
            "--lambdas", "2,4", "--rays", 1024, "--radial", 64, "--out", tmp_path,
        )
        replay = report["results"][0]
        assert replay["feasible"] is True
        assert replay["shell_counts"] == [1] * 6
        assert replay["growth_ceiling"] == pytest.approx(1.0)
        assert (tmp_path / "radial_6_projection.csv").exists()

    def test_random_mode_reports_fitted_constant(self, tmp_path, capsys):
        report = run_json(
            capsys,
            "probe", "--random", 3, "--seed", 20260825,
            "--lambdas", "2,8", "--rays", 1024, "--radial", 64, "--out", tmp_path,
        )
        fitted = report["results"][0]["fitted_c"]
        assert 0 < fitted <= 16
        _, rows = read_csv(tmp_path / "random3_projection.csv")
        assert len(rows) == 2

    def test_lambda_at_most_one_rejected(self, capsys):
        code, _, err = run(capsys, "probe", "--measure", "atom", "--lambdas", "1.0")
        assert code == 2 and "> 1" in err

    def test_measure_csv_round_trip(self, tmp_path, capsys):
        (tmp_path / "one.json").write_text('{"label": "one", "polar": [[0.5, 0.0]]}')
        (tmp_path / "v.json").write_text("[5.0]")
        run_json(
            capsys,
            "solve", tmp_path / "one.json",
            "--values", tmp_path / "v.json", "--out", tmp_path,
        )
        report = run_json(
            capsys,
            "probe", "--measure", tmp_path / "one_atoms.csv",
            "--lambdas", "4", "--rays", 512, "--radial", 32, "--out", tmp_path,
        )
        assert report["outputs"]


class TestGallery:
    def test_radial_depth_three(self, tmp_path, capsys):
        run_json(capsys, "gallery", "radial", "--depth", 3, "--out", tmp_path)
        seq = load_sequence(tmp_path / "radial_3.json")
        assert [1.0 - float(p.depth) for p in seq.points] == [0.5, 0.75, 0.875]

    def test_counterexample_level_one_ring(self, tmp_path, capsys):
        run_json(capsys, "gallery", "counterexample", "--levels", 1, "--out", tmp_path)
        z2 = load_sequence(tmp_path / "counterexample1_z2.json")
        assert len(z2) == 4
        for p in z2.points:
            assert 1.0 - float(p.depth) == pytest.approx(0.6, abs=1e-12)

    def test_regeneration_is_byte_identical(self, tmp_path, capsys):
        run(capsys, "gallery", "lattice", "--depth", 3, "--spread", 2, "--out", tmp_path / "a")
        run(capsys, "gallery", "lattice", "--depth", 3, "--spread", 2, "--out", tmp_path / "b")
        name = "lattice_3_2.json"
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_unknown_generator_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["gallery", "bogus"])
        assert exc.value.code == 2


class TestExitCodes:
    def test_internal_errors_exit_four(self, monkeypatch, capsys):
        def boom(path):
            raise RuntimeError("wired for the test")

        monkeypatch.setattr("harminterp.cli.load_sequence", boom)
        code, _, err = run(capsys, "classify", "whatever.json")
        assert code == 4 and "internal error" in err

    def test_report_field_order_is_stable(self, radial6, tmp_path, capsys):
        report = run_json(capsys, "classify", radial6, "--out", tmp_path)
        assert list(report) == [
            "command", "parameters", "results", "timings", "outputs",
        ]
