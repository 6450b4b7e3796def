"""Command surface: exit codes, artifact formats, determinism."""

from __future__ import annotations

import random

import pytest

from cantorcode.bits import BitString
from cantorcode.cli import main
from cantorcode.clopen import ClopenClass, save_class
from cantorcode.fixtures import fixture_trees
from cantorcode.labeltree import save_tree

B = BitString


def run(*argv) -> int:
    return main(list(argv))


@pytest.fixture()
def workdir(tmp_path):
    return tmp_path


class TestEncodeDecode:
    def test_roundtrip_64_bits(self, workdir):
        rng = random.Random(2024)
        source = "".join(rng.choice("01") for _ in range(64))
        src = workdir / "source.txt"
        src.write_text(source + "\n")
        code = workdir / "code.txt"
        out = workdir / "recovered.txt"
        assert run("encode", "--class", "seeded:128:9", "--schedule", "gacs",
                   "--source", str(src), "--out", str(code)) == 0
        text = code.read_text()
        assert text.startswith("bits=64\n")
        assert "levels=11\n" in text  # gacs M(11) = 66 covers 64 bits
        profile = (workdir / "code.txt.use.csv").read_text().splitlines()
        assert profile[0] == "bit,use"
        assert len(profile) == 67  # 66 padded source bits
        assert run("decode", "--class", "seeded:128:9", "--schedule", "gacs",
                   "--code", str(code), "--out", str(out)) == 0
        assert out.read_text().strip() == source

    def test_hex_source(self, workdir):
        src = workdir / "source.txt"
        src.write_text("hex 2b 6\n")  # 101011
        code = workdir / "code.txt"
        out = workdir / "recovered.txt"
        assert run("encode", "--class", "full:16", "--schedule", "gacs",
                   "--source", str(src), "--out", str(code)) == 0
        assert run("decode", "--class", "full:16", "--schedule", "gacs",
                   "--code", str(code), "--out", str(out)) == 0
        assert out.read_text().strip() == "101011"

    def test_malformed_class_file_exit_2(self, workdir, capsys):
        bad = workdir / "bad.txt"
        bad.write_text("depth 3\n000\n0011\n")
        src = workdir / "source.txt"
        src.write_text("0")
        assert run("encode", "--class", str(bad), "--schedule", "kucera",
                   "--source", str(src)) == 2
        assert "wrong-length member at line 3" in capsys.readouterr().err

    def test_budget_violation_exit_3(self, workdir, capsys):
        src = workdir / "source.txt"
        src.write_text("11")
        assert run("encode", "--class", "full:8",
                   "--schedule", "custom:m=1,1;l=1,2", "--source", str(src)) == 3
        assert "measure budget exhausted" in capsys.readouterr().err

    def test_missing_file_exit_2(self, workdir):
        assert run("encode", "--class", "full:8", "--schedule", "kucera",
                   "--source", str(workdir / "nope.txt")) == 2


class TestPruneVerify:
    def test_prune_then_verify_passes(self, workdir):
        pstar = workdir / "pstar.txt"
        assert run("prune", "--class", "seeded:13:4", "--schedule", "kucera",
                   "--levels", "3", "--out", str(pstar)) == 0
        assert run("verify", "--class", str(pstar), "--schedule", "kucera",
                   "--levels", "3") == 0

    def test_verify_full_class_passes(self):
        assert run("verify", "--class", "full:13", "--schedule", "kucera",
                   "--levels", "3") == 0

    def test_verify_failing_density_prints_counterexample(self, workdir, capsys):
        p = ClopenClass.full(4).minus_cylinder(B("10")).union(
            ClopenClass.from_members(4, [B("1000")])
        )
        path = workdir / "thin.txt"
        save_class(p, path)
        code = run("verify", "--class", str(path), "--schedule", "custom:m=1,1;l=2,2",
                   "--levels", "2", "--check", "density")
        assert code == 1
        out = capsys.readouterr().out
        assert "FAIL" in out and "10" in out

    def test_verify_tree_measure_condition(self, workdir):
        tree = fixture_trees()["labelable_full_binary"]
        path = workdir / "t.txt"
        save_tree(tree, path)
        assert run("verify", "--tree", str(path)) == 1  # series 3/2 vs measure 8/128


class TestTreeCommands:
    @pytest.mark.parametrize("name,expected", [
        ("labelable_full_binary", 0),
        ("labelable_eight_chains", 0),
        ("nonlabelable_narrow_one", 1),
    ])
    def test_label_and_splice_check_agree(self, workdir, name, expected):
        path = workdir / "t.txt"
        save_tree(fixture_trees()[name], path)
        assert run("label", "--tree", str(path),
                   "--out", str(workdir / "lab.txt")) == expected
        assert run("splice-check", "--tree", str(path),
                   "--out", str(workdir / "steps.csv")) == expected

    def test_sweep_exit_zero_and_header(self, workdir):
        out = workdir / "sweep.csv"
        assert run("sweep", "--count", "200", "--seed", "5", "--max-height", "2",
                   "--out", str(out)) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "index,hash,labelable,reducible,condition_satisfied"
        assert len(lines) == 201

    def test_empty_sweep(self, workdir):
        out = workdir / "empty.csv"
        assert run("sweep", "--count", "0", "--out", str(out)) == 0
        assert out.read_text().splitlines() == ["index,hash,labelable,reducible,condition_satisfied"]


class TestReportAndVt:
    def test_report_csv(self, workdir):
        out = workdir / "report.csv"
        assert run("report", "--schedule", "kucera", "--n-max", "32",
                   "--out", str(out)) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n,use,redundancy,bound_nlogn,bound_sqrtnlogn"
        assert len(lines) == 33

    def test_vt_chain(self, workdir, capsys):
        out = workdir / "vt.csv"
        assert run("vt-run", "--seed", "3", "--out", str(out)) == 0
        assert out.read_text().splitlines()[0] == "t,length,count,measure,decay_bound"
        assert "witness at t=" in capsys.readouterr().out

    def test_vt_density_mode(self, workdir):
        out = workdir / "density.csv"
        assert run("vt-run", "--mode", "density", "--class", "full:13",
                   "--schedule", "kucera", "--levels", "3", "--out", str(out)) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "level,min_density,threshold,result"
        assert all(line.endswith("pass") for line in lines[1:])


class TestEntryPoint:
    def test_module_invocation(self, workdir):
        import subprocess
        import sys

        out = workdir / "report.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "cantorcode.cli", "report", "--schedule", "kucera",
             "--n-max", "8", "--out", str(out)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.read_text().startswith("n,use,redundancy")

    def test_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for sub in ("encode", "decode", "prune", "verify", "label",
                    "splice-check", "sweep", "report", "vt-run"):
            assert sub in text


class TestDeterminism:
    def test_identical_flags_identical_artifacts(self, workdir):
        pairs = []
        for tag in ("a", "b"):
            sweep = workdir / f"sweep_{tag}.csv"
            report = workdir / f"report_{tag}.csv"
            vt = workdir / f"vt_{tag}.csv"
            assert run("sweep", "--count", "150", "--seed", "17", "--out", str(sweep)) == 0
            assert run("report", "--schedule", "gacs", "--n-max", "64",
                       "--out", str(report)) == 0
            assert run("vt-run", "--seed", "21", "--out", str(vt)) == 0
            pairs.append((sweep.read_bytes(), report.read_bytes(), vt.read_bytes()))
        assert pairs[0] == pairs[1]

    def test_seeded_class_is_stable(self, workdir):
        src = workdir / "source.txt"
        src.write_text("1011\n")
        outs = []
        for tag in ("a", "b"):
            code = workdir / f"code_{tag}.txt"
            assert run("encode", "--class", "seeded:24:33", "--schedule", "kucera",
                       "--source", str(src), "--out", str(code)) == 0
            outs.append(code.read_bytes())
        assert outs[0] == outs[1]
