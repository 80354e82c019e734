"""Command-line surface: parsing, overrides, exit codes."""

import json
import os

import pytest

from polarbf import cli


def run(argv):
    return cli.main(argv)


def test_parser_has_all_subcommands():
    parser = cli.build_parser()
    sub = next(
        a for a in parser._actions if a.__class__.__name__ == "_SubParsersAction"
    )
    assert set(sub.choices) == {
        "gen-dataset", "train", "eval-accuracy", "eval-bler", "eval-attempts",
        "coverage", "selftest",
    }


def test_flag_overrides(tmp_path):
    manifest_file = tmp_path / "m.json"
    manifest_file.write_text(json.dumps({"seed": 5, "decoder": {"iterations": 7}}))
    parser = cli.build_parser()
    args = parser.parse_args(
        [
            "gen-dataset", "--manifest", str(manifest_file), "--seed", "9",
            "--snr-list", "0.5,1.5", "--frames-per-snr", "12", "--tmax", "3,5",
            "--out", str(tmp_path / "results"), "--workers", "2",
        ]
    )
    manifest = cli.manifest_from_args(args)
    assert manifest["seed"] == 9  # flag beats file
    assert manifest["decoder"]["iterations"] == 7  # file beats default
    assert manifest["channel"]["snr_db"] == [0.5, 1.5]
    assert manifest["dataset"]["train_failed_per_snr"] == 12
    assert manifest["dataset"]["test_failed_per_snr"] == 12
    assert manifest["coverage"]["failed_per_snr"] == 12
    assert manifest["eval"]["t_max"] == [3, 5]
    assert manifest["paths"]["out_dir"] == str(tmp_path / "results")
    assert manifest["workers"] == 2


def test_selftest_exits_zero(capsys):
    assert run(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_gen_dataset_end_to_end(tmp_path, capsys):
    rc = run(
        [
            "gen-dataset", "--split", "train", "--snr-list", "2.0",
            "--frames-per-snr", "30", "--seed", "3", "--out", str(tmp_path),
        ]
    )
    assert rc == 0
    assert os.path.exists(tmp_path / "train.pbfd")
    assert os.path.exists(tmp_path / "train.pbfd.report.json")
    out = capsys.readouterr().out
    assert "wrote" in out and "2 dB" in out


def test_missing_dataset_is_a_clean_error(tmp_path, capsys):
    rc = run(["train", "--out", str(tmp_path / "nowhere")])
    assert rc == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")


def test_bad_manifest_json_is_a_clean_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc = run(["selftest", "--manifest", str(bad)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_unknown_subcommand_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code != 0
