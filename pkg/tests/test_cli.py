import json
import subprocess
import sys

import pytest

from lexiphylo.cli import main
from util import balanced_newick

TREE = balanced_newick(4, prefix="L")  # 16 tips: L000..L015


def write_inputs(tmp_path, tree_text=TREE, rows=None):
    if rows is None:
        rows = ["language,concept,cognate_id,loan"]
        import numpy as np

        rng = np.random.default_rng(1)
        for ci, concept in enumerate(("eye", "hand", "water", "dog")):
            for i in range(16):
                lang = f"L{i:03d}"
                if rng.random() < 0.1:
                    continue
                rows.append(f"{lang},{concept},K{(i // 4 + ci) % 3},{int(rng.random() < 0.04)}")
    tree_path = tmp_path / "tree.nwk"
    cognates_path = tmp_path / "cognates.csv"
    tree_path.write_text(tree_text + "\n", "utf-8")
    cognates_path.write_text("\n".join(rows) + "\n", "utf-8")
    return tree_path, cognates_path


class TestValidate:
    def test_clean_inputs_exit_zero(self, tmp_path, capsys):
        tree_path, cognates_path = write_inputs(tmp_path)
        code = main(["validate", "--tree", str(tree_path), "--cognates", str(cognates_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "0 errors" in out

    def test_language_missing_from_tree_warns(self, tmp_path, capsys):
        rows = [
            "language,concept,cognate_id,loan",
            "L000,eye,K1,0",
            "L001,eye,K1,0",
            "Martian,eye,K2,0",
        ]
        tree_path, cognates_path = write_inputs(tmp_path, rows=rows)
        code = main(["validate", "--tree", str(tree_path), "--cognates", str(cognates_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "'Martian' in cognates but not in tree" in out

    def test_tree_tip_without_rows_warns(self, tmp_path, capsys):
        rows = [
            "language,concept,cognate_id,loan",
            "L000,eye,K1,0",
            "L001,eye,K1,0",
        ]
        tree_path, cognates_path = write_inputs(tmp_path, rows=rows)
        code = main(["validate", "--tree", str(tree_path), "--cognates", str(cognates_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "tree tip 'L002' has no cognate rows" in out

    def test_malformed_newick_exit_one_with_offset(self, tmp_path, capsys):
        tree_path, cognates_path = write_inputs(tmp_path, tree_text="(A:1,B:2")
        code = main(["validate", "--tree", str(tree_path), "--cognates", str(cognates_path)])
        err = capsys.readouterr().err
        assert code == 1
        assert "unbalanced parentheses at offset" in err

    def test_unreadable_file_exit_two(self, tmp_path, capsys):
        code = main(
            ["validate", "--tree", str(tmp_path / "missing.nwk"), "--cognates", "x"]
        )
        assert code == 2


class TestDstat:
    def test_prints_result_fields(self, tmp_path, capsys):
        tree_path, cognates_path = write_inputs(tmp_path)
        code = main(
            [
                "dstat",
                "--tree", str(tree_path),
                "--cognates", str(cognates_path),
                "--concept", "eye",
                "--cognate-class", "K1",
                "--reps", "100",
                "--seed", "5",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        for field in ("d_obs=", "mean_d_random=", "mean_d_bm=", "D=", "p_random=", "p_bm="):
            assert field in out

    def test_unknown_concept(self, tmp_path, capsys):
        tree_path, cognates_path = write_inputs(tmp_path)
        code = main(
            ["dstat", "--tree", str(tree_path), "--cognates", str(cognates_path),
             "--concept", "nope", "--cognate-class", "K1", "--seed", "5"]
        )
        assert code == 1
        assert "unknown concept" in capsys.readouterr().err

    def test_singleton_class_too_few_tips(self, tmp_path, capsys):
        rows = [
            "language,concept,cognate_id,loan",
            "L000,eye,K1,0",
            "L001,eye,K1,0",
            "L002,eye,KSolo,0",
        ]
        tree_path, cognates_path = write_inputs(tmp_path, rows=rows)
        code = main(
            ["dstat", "--tree", str(tree_path), "--cognates", str(cognates_path),
             "--concept", "eye", "--cognate-class", "KSolo", "--seed", "5"]
        )
        assert code == 1
        assert "fewer than 4 usable tips" in capsys.readouterr().err

    def test_seed_required(self, tmp_path, capsys):
        tree_path, cognates_path = write_inputs(tmp_path)
        code = main(
            ["dstat", "--tree", str(tree_path), "--cognates", str(cognates_path),
             "--concept", "eye", "--cognate-class", "K1"]
        )
        assert code == 1
        assert "--seed is required" in capsys.readouterr().err


class TestSimulate:
    def test_deterministic_file_output(self, tmp_path):
        tree_path, _ = write_inputs(tmp_path)
        out_a, out_b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        for out in (out_a, out_b):
            assert main(
                ["simulate", "--tree", str(tree_path), "--sigma2", "1.5",
                 "--seed", "3", "--out", str(out)]
            ) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        lines = out_a.read_text().strip().splitlines()
        assert lines[0] == "tip\tvalue"
        assert len(lines) == 17

    def test_zero_height_tree_constant(self, tmp_path, capsys):
        tree_path = tmp_path / "flat.nwk"
        tree_path.write_text("(A:0,B:0,C:0):0;\n", "utf-8")
        code = main(["simulate", "--tree", str(tree_path), "--sigma2", "2.0",
                     "--root", "7.5", "--seed", "1"])
        out = capsys.readouterr().out
        assert code == 0
        values = {line.split("\t")[1] for line in out.strip().splitlines()[1:]}
        assert values == {"7.5"}

    def test_nonpositive_sigma2_exit_one(self, tmp_path, capsys):
        tree_path, _ = write_inputs(tmp_path)
        code = main(["simulate", "--tree", str(tree_path), "--sigma2", "0",
                     "--seed", "1"])
        assert code == 1
        assert "sigma2" in capsys.readouterr().err


@pytest.fixture(scope="module")
def ranked(tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp("rank")
    tree_path, cognates_path = write_inputs(tmp_path)
    out = tmp_path / "out"
    code = main(
        ["rank", "--tree", str(tree_path), "--cognates", str(cognates_path),
         "--seed", "7", "--reps", "100", "--k", "3", "--out", str(out)]
    )
    assert code == 0
    return tmp_path, tree_path, cognates_path, out


class TestRankPipeline:
    def test_writes_all_artifacts(self, ranked):
        _, _, _, out = ranked
        for name in (
            "features.csv", "metrics.json", "pca.json", "clusters.json",
            "report.json", "ranking.csv", "scatter.svg",
        ):
            assert (out / name).exists(), name

    def test_report_is_schema_valid(self, ranked):
        import jsonschema
        from lexiphylo.report import report_schema

        _, _, _, out = ranked
        jsonschema.validate(json.loads((out / "report.json").read_text()), report_schema())

    def test_rerun_is_byte_identical(self, ranked, tmp_path):
        base, tree_path, cognates_path, out = ranked
        out2 = tmp_path / "out2"
        code = main(
            ["rank", "--tree", str(tree_path), "--cognates", str(cognates_path),
             "--seed", "7", "--reps", "100", "--k", "3", "--out", str(out2)]
        )
        assert code == 0
        for name in ("report.json", "ranking.csv", "scatter.svg"):
            assert (out / name).read_bytes() == (out2 / name).read_bytes()

    def test_different_seed_same_d_obs(self, ranked, tmp_path):
        _, tree_path, cognates_path, out = ranked
        out2 = tmp_path / "seed8"
        code = main(
            ["rank", "--tree", str(tree_path), "--cognates", str(cognates_path),
             "--seed", "8", "--reps", "100", "--k", "3", "--out", str(out2)]
        )
        assert code == 0
        first = json.loads((out / "metrics.json").read_text())
        second = json.loads((out2 / "metrics.json").read_text())
        for c1, c2 in zip(first["concepts"], second["concepts"]):
            for cls, res in c1["class_results"].items():
                assert res["d_obs"] == c2["class_results"][cls]["d_obs"]

    def test_stage_subcommands_reuse_cache(self, ranked, capsys):
        _, _, _, out = ranked
        before = (out / "report.json").read_bytes()
        assert main(["pca", "--out", str(out)]) == 0
        assert main(["cluster", "--out", str(out), "--seed", "7"]) == 0
        assert main(["report", "--out", str(out), "--k", "3"]) == 0
        assert (out / "report.json").read_bytes() == before

    def test_k_out_of_range(self, ranked, tmp_path, capsys):
        _, tree_path, cognates_path, _ = ranked
        code = main(
            ["rank", "--tree", str(tree_path), "--cognates", str(cognates_path),
             "--seed", "7", "--reps", "100", "--k", "99", "--out", str(tmp_path / "x")]
        )
        assert code == 1
        assert "k out of range" in capsys.readouterr().err


class TestConfigFile:
    def test_config_supplies_defaults_flags_override(self, tmp_path, capsys):
        tree_path, cognates_path = write_inputs(tmp_path)
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps({"seed": 5, "reps": 100, "concept": "eye"}), "utf-8"
        )
        code = main(
            ["dstat", "--tree", str(tree_path), "--cognates", str(cognates_path),
             "--cognate-class", "K1", "--concept", "eye", "--config", str(config)]
        )
        assert code == 0
        assert "n_reps=100" in capsys.readouterr().out


def test_module_entrypoint_smoke(tmp_path):
    tree_path, cognates_path = write_inputs(tmp_path)
    proc = subprocess.run(
        [sys.executable, "-m", "lexiphylo", "validate",
         "--tree", str(tree_path), "--cognates", str(cognates_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "0 errors" in proc.stdout
