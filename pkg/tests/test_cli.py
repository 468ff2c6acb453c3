import csv
import re
from pathlib import Path

import numpy as np
import pytest

from carpet_percolation import reference_data
from carpet_percolation.cli import main
from carpet_percolation.lattice import read_mask, read_pgm
from carpet_percolation.reports import CsvFormatError, read_points

DATA = Path(__file__).parent / "data"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestGen:
    def test_verify_pass(self, tmp_path, capsys):
        code, out, _ = run(["gen", "--b", 7, "--l", 3, "--family", "central", "--stages", 1, "--verify", "--out", tmp_path], capsys)
        assert code == 0
        assert "PASS" in out

    def test_bad_parity(self, tmp_path, capsys):
        code, _, err = run(["gen", "--b", 7, "--l", 4, "--family", "central", "--stages", 1, "--out", tmp_path], capsys)
        assert code == 1
        assert "b - l even" in err

    def test_scattered_126(self, tmp_path, capsys):
        code, _, _ = run(["gen", "--b", 5, "--l", 2, "--family", "scattered", "--stages", 3, "--out", tmp_path], capsys)
        assert code == 0
        spec, mask = read_mask(tmp_path / "carpet_b5_l2_scattered_N3.txt")
        assert mask.shape == (126, 126)
        assert np.array_equal(read_pgm(tmp_path / "carpet_b5_l2_scattered_N3.pgm"), mask)

    def test_snapshot(self, tmp_path, capsys):
        code, out, _ = run(["gen", "--b", 7, "--l", 3, "--stages", 2, "--snapshot", 0.55, "--seed", 3, "--out", tmp_path], capsys)
        assert code == 0
        _, occ = read_mask(tmp_path / "config_b7_l3_central_N2_p0.55_s3.txt")
        _, present = read_mask(tmp_path / "carpet_b7_l3_central_N2.txt")
        assert not (occ & ~present).any()
        assert (tmp_path / "config_b7_l3_central_N2_p0.55_s3.ppm").read_bytes().startswith(b"P6\n50 50\n")


SWEEP_73 = ["sweep", "--b", 7, "--l", 3, "--family", "central", "--stages", 2, "--seed", 1]


class TestSweep:
    def test_default_nnn8(self, tmp_path, capsys):
        code, _, _ = run(SWEEP_73 + ["--out", tmp_path], capsys)
        assert code == 0
        est = read_csv(tmp_path / "estimate_b7_l3_central_N2_nnn8.csv")
        assert list(est[0]) == ["b", "l", "family", "N", "conn", "D", "Q", "pc_mean", "pc_stderr", "runs", "dp"]
        assert float(est[0]["pc_mean"]) == pytest.approx(0.508, abs=0.03)
        sweep = read_csv(tmp_path / "sweep_b7_l3_central_N2_nnn8.csv")
        assert list(sweep[0]) == ["b", "l", "family", "N", "conn", "p", "run", "m"]
        assert len(sweep) == 10 * 66

    def test_nn4_above_nnn8(self, tmp_path, capsys):
        run(SWEEP_73 + ["--out", tmp_path], capsys)
        run(SWEEP_73 + ["--conn", "nn4", "--out", tmp_path], capsys)
        nnn8 = float(read_csv(tmp_path / "estimate_b7_l3_central_N2_nnn8.csv")[0]["pc_mean"])
        nn4 = float(read_csv(tmp_path / "estimate_b7_l3_central_N2_nn4.csv")[0]["pc_mean"])
        assert nn4 > nnn8

    def test_byte_identical(self, tmp_path, capsys):
        outs = []
        for k, workers in enumerate([1, 1, 4]):
            d = tmp_path / str(k)
            run(SWEEP_73 + ["--runs", 1, "--workers", workers, "--out", d], capsys)
            outs.append([(d / n).read_bytes() for n in ("sweep_b7_l3_central_N2_nnn8.csv", "estimate_b7_l3_central_N2_nnn8.csv")])
        assert outs[0] == outs[1] == outs[2]

    def test_six_significant_digits(self, tmp_path, capsys):
        run(SWEEP_73 + ["--runs", 2, "--out", tmp_path], capsys)
        for row in read_csv(tmp_path / "sweep_b7_l3_central_N2_nnn8.csv"):
            digits = re.sub(r"[^0-9]", "", row["m"].split("e")[0]).lstrip("0")
            assert len(digits) <= 6

    def test_env_workers(self, tmp_path, capsys, monkeypatch):
        from carpet_percolation import cli

        monkeypatch.setenv("CARPET_PERC_WORKERS", "3")
        assert cli.default_workers() == 3
        monkeypatch.setenv("CARPET_PERC_WORKERS", "bogus")
        assert cli.default_workers() == 1


class TestTable:
    def test_reference_data_central(self, tmp_path, capsys):
        code, out, _ = run(["table", "--family", "central", "--reference-data", "--out", tmp_path], capsys)
        assert code == 0
        exponent = float(re.search(r"\(D - 1\)\^([0-9.]+)\s+\[log", out).group(1))
        e_r = float(re.search(r"e_r = ([0-9.]+)", out).group(1))
        assert exponent == pytest.approx(1.60, abs=0.05)
        assert e_r == pytest.approx(0.008, abs=0.004)
        rows = read_csv(tmp_path / "table_central_reference.csv")
        assert len(rows) == 22
        flagged = [r for r in rows if r["ref_D"]]
        assert [(r["b"], r["l"], r["ref_D"]) for r in flagged] == [("11", "9", "1.588")]

    def test_single_row(self, tmp_path, capsys):
        code, _, _ = run(["table", "--family", "central", "--rows", "b=13,l=1", "--out", tmp_path], capsys)
        assert code == 0
        rows = read_csv(tmp_path / "table_central.csv")
        assert len(rows) == 1
        assert rows[0]["N"] == "2"
        assert float(rows[0]["pc_mean"]) == pytest.approx(0.415, abs=0.03)

    def test_unknown_row(self, tmp_path, capsys):
        code, _, err = run(["table", "--family", "central", "--rows", "b=13,l=2", "--out", tmp_path], capsys)
        assert code == 1

    def test_scattered_full(self, tmp_path, capsys):
        code, _, _ = run(["table", "--family", "scattered", "--workers", 2, "--out", tmp_path], capsys)
        assert code == 0
        rows = read_csv(tmp_path / "table_scattered.csv")
        assert len(rows) == 7
        assert [int(r["N"]) for r in rows] == [r.N for r in reference_data.SCATTERED]
        text = (tmp_path / "table_scattered.txt").read_text()
        a, b, c = (float(x) for x in re.search(r"P_c = (\S+) Q\^2 (\S+) Q (\S+)", text).groups())
        # refit of the simulated rows against the published scattered-family quadratic
        assert (a, b, c) == pytest.approx(reference_data.QUADRATIC_SCATTERED, abs=0.05)

    def test_order_and_parallel_independent(self, tmp_path, capsys):
        run(["table", "--family", "central", "--rows", "b=7,l=3;b=9,l=1", "--runs", 3, "--workers", 1, "--out", tmp_path / "a"], capsys)
        run(["table", "--family", "central", "--rows", "b=9,l=1", "--rows", "b=7,l=3", "--runs", 3, "--workers", 4, "--out", tmp_path / "b"], capsys)
        assert (tmp_path / "a/table_central.csv").read_bytes() == (tmp_path / "b/table_central.csv").read_bytes()

    def test_per_row_failure_continues(self, tmp_path, capsys):
        # 7**9 cells per side exceeds the size limit, so the row fails but the run completes
        code, _, err = run(["table", "--family", "central", "--rows", "b=7,l=3", "--stages", 9, "--out", tmp_path], capsys)
        assert code == 1
        assert "failed" in err


class TestFit:
    def test_table1_fixture(self, capsys):
        code, out, _ = run(["fit", DATA / "table1_central.csv"], capsys)
        assert code == 0
        exponent = float(re.search(r"\(D - 1\)\^([0-9.]+)\s+\[log", out).group(1))
        assert exponent == pytest.approx(1.60, abs=0.05)

    def test_synthetic_exact(self, capsys):
        code, out, _ = run(["fit", DATA / "synthetic_power.csv", "--kind", "exponent"], capsys)
        assert code == 0
        assert "(D - 1)^2.0000  [log" in out
        assert "(D - 1)^2.0000  [pc" in out

    def test_two_rows_quadratic(self, tmp_path, capsys):
        f = tmp_path / "two.csv"
        f.write_text("Q,pc\n0.5,0.6\n0.7,0.5\n")
        code, _, err = run(["fit", f, "--kind", "quadratic"], capsys)
        assert code == 1
        assert "three distinct" in err

    def test_malformed_names_line(self, tmp_path, capsys):
        f = tmp_path / "bad.csv"
        f.write_text("b,l,pc\n7,3,0.5\n9,1,oops\n")
        code, _, err = run(["fit", f], capsys)
        assert code == 1
        assert "line 3" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = run(["fit", tmp_path / "nope.csv"], capsys)
        assert code == 2

    def test_out_file(self, tmp_path, capsys):
        run(["fit", DATA / "table2_scattered.csv", "--kind", "quadratic", "--out", tmp_path / "r.txt"], capsys)
        assert "quadratic" in (tmp_path / "r.txt").read_text()


class TestRoundTrip:
    def test_estimate_and_sweep_csv(self, tmp_path, capsys):
        run(SWEEP_73 + ["--runs", 4, "--out", tmp_path], capsys)
        est = read_points(tmp_path / "estimate_b7_l3_central_N2_nnn8.csv")
        from_sweep = read_points(tmp_path / "sweep_b7_l3_central_N2_nnn8.csv")
        assert est[0]["pc"] == pytest.approx(from_sweep[0]["pc"], abs=1e-6)
        assert est[0]["D"] == pytest.approx(from_sweep[0]["D"], abs=1e-5)
        assert est[0]["family"] == "central"

    def test_table_csv(self, tmp_path, capsys):
        run(["table", "--family", "scattered", "--reference-data", "--out", tmp_path], capsys)
        pts = read_points(tmp_path / "table_scattered_reference.csv")
        assert [p["pc"] for p in pts] == [r.pc for r in reference_data.SCATTERED]
        code, _, _ = run(["fit", tmp_path / "table_scattered_reference.csv", "--kind", "quadratic"], capsys)
        assert code == 0

    def test_missing_pc_column(self, tmp_path):
        f = tmp_path / "x.csv"
        f.write_text("b,l\n7,3\n")
        with pytest.raises(CsvFormatError, match="line 1"):
            read_points(f)


class TestRender:
    def test_two_families(self, tmp_path, capsys):
        run(["table", "--family", "central", "--reference-data", "--out", tmp_path], capsys)
        run(["table", "--family", "scattered", "--reference-data", "--out", tmp_path], capsys)
        code, _, _ = run(
            ["render", tmp_path / "table_central_reference.csv", tmp_path / "table_scattered_reference.csv", "--out", tmp_path / "fig"],
            capsys,
        )
        assert code == 0
        svg = (tmp_path / "fig/pc_vs_Q.svg").read_text()
        assert "central" in svg and "scattered" in svg
        assert (tmp_path / "fig/pc_vs_D.svg").exists()

    def test_single_family_png(self, tmp_path, capsys):
        code, _, _ = run(["render", DATA / "table1_central.csv", "--format", "png", "--out", tmp_path], capsys)
        assert code == 0
        assert (tmp_path / "pc_vs_Q.png").read_bytes()[:4] == b"\x89PNG"

    def test_empty_csv(self, tmp_path, capsys):
        f = tmp_path / "empty.csv"
        f.write_text("b,l,family,N,conn,D,Q,pc_mean,pc_stderr,runs,dp\n")
        code, _, _ = run(["render", f, "--out", tmp_path], capsys)
        assert code == 1

    def test_missing_input(self, tmp_path, capsys):
        code, _, _ = run(["render", tmp_path / "missing.csv", "--out", tmp_path], capsys)
        assert code == 2
