import json
import xml.etree.ElementTree as ET

from tropasym.cli import main

FIG2 = '[["0","-2.5","-0.5"],["-1","0","-1.5"],["-1","-1","0"]]'
FIG7 = '[["0","1","3"],["-5","0","1"],["-6","-1","0"]]'
CEX = '[["0","-3","-4"],["-1","0","-2"],["-1","-1","0"]]'


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSpectrum:
    def test_figure7(self, capsys):
        code, out, _ = run(["spectrum", "--matrix", FIG7], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["lambda"] == "0"
        assert obj["classes"] == [[0], [1, 2]]
        assert obj["generators"] == [["0", "-5", "-6"], ["0", "-2", "-3"]]

    def test_scalar_matrix(self, capsys):
        code, out, _ = run(
            ["spectrum", "--matrix", '{"n": 1, "entries": [["0.75"]], "semiring": "max-plus"}'],
            capsys,
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["lambda"] == "3/4"
        assert obj["generators"] == [["0"]]

    def test_malformed_json(self, capsys):
        code, _, err = run(["spectrum", "--matrix", '[["0",]'], capsys)
        assert code == 1
        assert "line" in err and "column" in err

    def test_non_square(self, capsys):
        code, _, err = run(["spectrum", "--matrix", '[["0","1"]]'], capsys)
        assert code == 1

    def test_file_input(self, tmp_path, capsys):
        p = tmp_path / "m.json"
        p.write_text(FIG7)
        code, out, _ = run(["spectrum", "--input", str(p)], capsys)
        assert code == 0

    def test_missing_matrix(self, capsys):
        code, _, err = run(["spectrum"], capsys)
        assert code == 1


class TestPerron:
    def test_figure2(self, tmp_path, capsys):
        csv_path = tmp_path / "traj.csv"
        code, out, _ = run(
            ["perron", "--matrix", FIG2, "--out", str(csv_path)], capsys
        )
        assert code == 0
        est = json.loads(out)
        assert max(
            abs(a - b) for a, b in zip(est["point"], [0.0, -0.25, -0.25])
        ) < 1e-2
        lines = csv_path.read_text().splitlines()
        header = lines[0].split(",")
        assert header == [
            "k", "lambda_k", "coord_1", "coord_2", "coord_3",
            "residual", "iterations", "span_distance",
        ]
        assert len(lines) == 1 + 13
        # membership distance column converges toward zero
        last = lines[-1].split(",")
        assert float(last[-1]) < 1e-2

    def test_symmetric_rows_zero(self, tmp_path, capsys):
        csv_path = tmp_path / "sym.csv"
        code, out, _ = run(
            ["perron", "--matrix", '[["0","-1"],["-1","0"]]', "--out", str(csv_path),
             "--doublings", "6"],
            capsys,
        )
        assert code == 0
        for line in csv_path.read_text().splitlines()[1:]:
            cells = line.split(",")
            assert abs(float(cells[2])) == 0.0 and abs(float(cells[3])) < 1e-12


class TestFigures:
    def test_flags(self, capsys):
        code, out, _ = run(["figures"], capsys)
        assert code == 0
        rows = json.loads(out)
        flags = {r["name"]: r["flag"] for r in rows}
        assert flags == {
            "figure-2": "CONSISTENT",
            "figure-3": "CONSISTENT",
            "figure-4": "CONSISTENT",
            "figure-6": "DISCREPANT",
            "figure-7": "CONSISTENT",
            "figure-8": "DISCREPANT",
            "figure-9": "DISCREPANT",
            "counterexample": "DISCREPANT",
        }
        cex = next(r for r in rows if r["name"] == "counterexample")
        assert cex["candidate_in_eigenspace"] is True
        assert cex["candidate_distance_to_pinf"] > 0.1

    def test_csv_format(self, capsys):
        code, out, _ = run(["figures", "--format", "csv", "--doublings", "8"], capsys)
        assert code == 0
        assert out.splitlines()[0].startswith("name,lambda,flag")


class TestPlot:
    def test_figure7_svg(self, tmp_path, capsys):
        out_path = tmp_path / "fig.svg"
        code, _, _ = run(
            ["plot", "--matrix", FIG7, "--out", str(out_path), "--grid", "80",
             "--doublings", "8"],
            capsys,
        )
        assert code == 0
        root = ET.fromstring(out_path.read_text())
        assert root.tag.endswith("svg")
        ns = {"s": "http://www.w3.org/2000/svg"}
        rects = root.findall(".//s:rect", ns)
        assert len(rects) > 1  # shaded region cells present
        circles = root.findall(".//s:circle", ns)
        assert len(circles) >= 2  # generators plus trajectory points

    def test_svg_version_and_single_root(self, tmp_path, capsys):
        out_path = tmp_path / "v.svg"
        code, _, _ = run(
            ["plot", "--matrix", FIG7, "--out", str(out_path), "--grid", "40",
             "--doublings", "6"],
            capsys,
        )
        assert code == 0
        root = ET.fromstring(out_path.read_text())
        assert root.attrib.get("version") == "1.1"

    def test_single_generator_region_degenerates(self, tmp_path, capsys):
        # single critical class: the whole eigenspace is one projective point
        fig6 = '[["0","-3","-2"],["1","0","-1"],["2","1","0"]]'
        out_path = tmp_path / "single.svg"
        code, _, _ = run(
            ["plot", "--matrix", fig6, "--out", str(out_path), "--grid", "100",
             "--doublings", "8"],
            capsys,
        )
        assert code == 0
        root = ET.fromstring(out_path.read_text())
        ns = {"s": "http://www.w3.org/2000/svg"}
        region = [r for r in root.findall(".//s:g", ns) if r.get("fill") == "#9db8d9"]
        cells = region[0].findall("s:rect", ns)
        assert 1 <= len(cells) <= 4  # a single small cluster of cells

    def test_dimension_restriction(self, capsys):
        code, _, err = run(
            ["plot", "--matrix", '[["0","-1"],["-1","0"]]'], capsys
        )
        assert code == 1
        assert "TP^2" in err


class TestConjecturesCommand:
    ARGS = [
        "conjectures", "--chains", "2", "--families", "1", "--perturbations", "2",
        "--doublings", "10", "--max-attempts", "3000",
    ]

    def test_requires_seed(self, capsys):
        code, _, err = run(self.ARGS, capsys)
        assert code == 1
        assert "--seed" in err

    def test_deterministic_and_holds(self, tmp_path, capsys):
        ds = tmp_path / "g.jsonl"
        args = self.ARGS + ["--seed", "42", "--dataset", str(ds)]
        code1, out1, _ = run(args, capsys)
        data1 = ds.read_text()
        code2, out2, _ = run(args, capsys)
        assert code1 == code2 == 0
        assert out1 == out2
        assert ds.read_text() == data1
        report = json.loads(out1)
        assert report["conjecture1"]["count"] == 2
        assert report["conjecture1"]["all_hold"] is True
        assert report["conjecture2"]["all_hold"] is True
        assert report["dataset"]["rows"] >= 3

    def test_zero_counts(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)  # default dataset file lands here
        code, out, _ = run(
            ["conjectures", "--chains", "0", "--families", "0", "--seed", "1"],
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        assert report["conjecture1"]["count"] == 0
        assert report["conjecture2"]["count"] == 0
        assert (tmp_path / "g_samples.jsonl").exists()


class TestSchurCommand:
    def test_counterexample_report(self, capsys):
        code, out, _ = run(["schur", "--matrix", CEX, "--doublings", "10"], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["levels"][0]["eigenvalue"] == "0"
        assert len(obj["candidates"]) == 3
        for cand in obj["candidates"]:
            assert cand["in_eigenspace"] is True
            assert cand["matches_pinf"] is False
