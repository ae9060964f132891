import json
import shutil

import pytest

from blocaudit.cli import main
from conftest import EAST_AYRSHIRE, NORTH_AYRSHIRE


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------- tabulate


def test_tabulate_text(capsys):
    code, out, _ = run(capsys, "tabulate", str(EAST_AYRSHIRE))
    assert code == 0
    assert "quota 833.00000" in out
    assert "winners: Knapp, Ross, Todd" in out


def test_tabulate_json_roundtrip(capsys):
    code, out, _ = run(capsys, "tabulate", str(EAST_AYRSHIRE), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["winners"] == [1, 2, 4]
    assert doc["method"] == "scottish"
    assert doc["seats"] == 3
    assert len(doc["rounds"]) == 4


def test_tabulate_method_choice(capsys):
    code, out, _ = run(capsys, "tabulate", str(NORTH_AYRSHIRE), "-m", "meek")
    assert code == 0
    assert "winners:" in out


def test_tabulate_positional_with_vector(capsys):
    code, out, _ = run(
        capsys, "tabulate", str(EAST_AYRSHIRE), "-m", "positional",
        "--sv", "4,3,2,1,0",
    )
    assert code == 0
    assert "winners:" in out


def test_tabulate_missing_file(capsys):
    code, _, err = run(capsys, "tabulate", "/no/such/file.blt")
    assert code == 2
    assert "error:" in err


def test_tabulate_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.blt"
    bad.write_text("definitely not a ballot file\n")
    code, _, err = run(capsys, "tabulate", str(bad))
    assert code == 2
    assert "error:" in err


# ------------------------------------------------------------------- audit


def test_audit_stdout_jsonl(capsys):
    code, out, err = run(
        capsys, "audit", str(EAST_AYRSHIRE), "-m", "scottish",
        "--criteria", "ilvb",
    )
    assert code == 0
    lines = [json.loads(line) for line in out.splitlines() if line]
    assert len(lines) == 7
    assert all(doc["criterion"] == "ILVB" for doc in lines)
    assert "total records: 7" in err


def test_audit_out_file(tmp_path, capsys):
    out_file = tmp_path / "records.jsonl"
    code, out, _ = run(
        capsys, "audit", str(NORTH_AYRSHIRE), "-m", "scottish",
        "--criteria", "iwvb,iwvb-star", "--out", str(out_file),
    )
    assert code == 0
    assert out == ""
    docs = [json.loads(line) for line in out_file.read_text().splitlines()]
    assert {doc["criterion"] for doc in docs} == {"IWVB", "IWVB_STAR"}
    assert any(doc["removed"] == [{"ranking": [5], "count": 206}] for doc in docs)


def test_audit_party_swaps_flag(capsys):
    code, out, _ = run(
        capsys, "audit", str(EAST_AYRSHIRE), "-m", "scottish",
        "--criteria", "ilvb", "--party-swaps",
    )
    assert code == 0
    docs = [json.loads(line) for line in out.splitlines() if line]
    assert any(doc["party_swap"] for doc in docs)
    assert any(not doc["party_swap"] for doc in docs)


def test_audit_rejects_unknown_criterion(capsys):
    code, _, err = run(
        capsys, "audit", str(EAST_AYRSHIRE), "--criteria", "bogus"
    )
    assert code == 2
    assert "unknown criterion" in err


def test_audit_sigma_controls_grading(capsys):
    code, coarse, _ = run(
        capsys, "audit", str(EAST_AYRSHIRE), "-m", "scottish",
        "--criteria", "ilvb", "--sigma-l", "1",
    )
    assert code == 0
    code, fine, _ = run(
        capsys, "audit", str(EAST_AYRSHIRE), "-m", "scottish",
        "--criteria", "ilvb", "--sigma-l", "10",
    )
    assert code == 0
    assert len(coarse.splitlines()) < len(fine.splitlines())


# --------------------------------------------------------------------- gen


def test_gen_writes_blt_and_manifest(tmp_path, capsys):
    out = tmp_path / "case.blt"
    code, _, _ = run(capsys, "gen", "stv-ilvb", "--k", "2", "--out", str(out))
    assert code == 0
    manifest = json.loads((tmp_path / "case.manifest.json").read_text())
    assert manifest["family"] == "STV_ILVB"
    assert manifest["winners_before"] != manifest["winners_after"]
    # the BLT and the manifest together reproduce the flip
    code, tab_out, _ = run(capsys, "tabulate", str(out), "--json")
    doc = json.loads(tab_out)
    assert doc["winners"] == manifest["winners_before"]


def test_gen_rejects_unknown_family(capsys):
    code, _, err = run(capsys, "gen", "no-such-family")
    assert code == 2
    assert "unknown family" in err


def test_gen_rejects_bad_parameters(capsys):
    code, _, err = run(
        capsys, "gen", "stv-iwvb-star", "--k", "3",
        "--a", "1000", "--b", "20", "--c", "16",
    )
    assert code == 2
    assert "error:" in err


# --------------------------------------------------------------------- psc


def test_psc_report(tmp_path, capsys):
    code, _, _ = run(capsys, "gen", "qpsc-left", "--k", "2",
                     "--out", str(tmp_path / "q.blt"))
    assert code == 0
    code, out, _ = run(capsys, "psc", str(tmp_path / "q.blt"), "--sv", "1,1/100")
    assert code == 0
    assert "solid coalitions: 5" in out
    assert "compatible committees: 5" in out
    assert "scoring winner: C, D" in out


def test_psc_hare_audit_line(capsys):
    code, out, _ = run(
        capsys, "psc", str(EAST_AYRSHIRE), "--audit", "scottish"
    )
    assert code == 0
    assert "0 violated constraints" in out


# -------------------------------------------------------------------- batch


@pytest.fixture
def corpus(tmp_path, capsys):
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir()
    shutil.copy(EAST_AYRSHIRE, corpus_dir / "ea.blt")
    shutil.copy(NORTH_AYRSHIRE, corpus_dir / "na.blt")
    main(["gen", "stv-ilvb", "--k", "1",
          "--out", str(corpus_dir / "gen1.blt")])
    (corpus_dir / "gen1.manifest.json").unlink()
    (corpus_dir / "broken.blt").write_text("nope\n")
    capsys.readouterr()
    return corpus_dir


CFG = "methods=scottish\ncriteria=ilvb,iwvb\nsigma_l=10\nsigma_w=3\n"


def test_batch_outputs(tmp_path, corpus, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text(CFG)
    out_dir = tmp_path / "out"
    code, _, err = run(
        capsys, "batch", str(corpus), "--config", str(cfg),
        "--out", str(out_dir),
    )
    assert code == 0
    assert "spot-checked" in err
    report = (out_dir / "report.csv").read_text().splitlines()
    assert report[0] == "criterion,scottish,meek,ear,cc_om,cc_pm"
    assert len(report) == 4  # header + three criteria rows
    ilvb_row = report[1].split(",")
    assert ilvb_row[0] == "ILVB"
    assert int(ilvb_row[1]) >= 2  # both real wards... ea and gen1 flip
    errors = (out_dir / "errors.txt").read_text()
    assert "broken" in errors
    rows = (out_dir / "rows.csv").read_text()
    assert "ea,scottish,ILVB" in rows


def test_batch_deterministic_across_worker_counts(tmp_path, corpus, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text(CFG)
    outputs = []
    for n, workers in enumerate(("1", "2")):
        out_dir = tmp_path / f"out{n}"
        code, _, _ = run(
            capsys, "batch", str(corpus), "--config", str(cfg),
            "--out", str(out_dir), "--workers", workers,
        )
        assert code == 0
        outputs.append(
            tuple(
                (out_dir / name).read_text()
                for name in ("records.jsonl", "rows.csv", "report.csv")
            )
        )
    assert outputs[0] == outputs[1]


def test_batch_resume_skips_done(tmp_path, corpus, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text(CFG)
    out_dir = tmp_path / "out"
    code, _, _ = run(
        capsys, "batch", str(corpus), "--config", str(cfg), "--out", str(out_dir)
    )
    assert code == 0
    first = (out_dir / "records.jsonl").read_text()
    code, _, err = run(
        capsys, "batch", str(corpus), "--config", str(cfg),
        "--out", str(out_dir), "--resume",
    )
    assert code == 0
    assert "(4 skipped as done)" in err
    assert (out_dir / "records.jsonl").read_text() == first


def test_batch_rejects_bad_config(tmp_path, corpus, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("sigma_l=ten\n")
    code, _, err = run(capsys, "batch", str(corpus), "--config", str(cfg))
    assert code == 2
    assert "sigma_l" in err
    cfg.write_text("unknown_key=1\n")
    code, _, err = run(capsys, "batch", str(corpus), "--config", str(cfg))
    assert code == 2
    assert "unknown key" in err


# --------------------------------------------------------------- exit codes


def test_computation_refusal_exits_three(tmp_path, capsys):
    names = [f"c{i}" for i in range(21)]
    lines = ["21 2"]
    lines += [f"1 {i} 0" for i in range(1, 22)]
    lines.append("0")
    lines += [f'"{name}","IND"' for name in names]
    lines.append('"wide"')
    wide = tmp_path / "wide.blt"
    wide.write_text("\n".join(lines) + "\n")
    code, _, err = run(capsys, "tabulate", str(wide), "-m", "cc-om")
    assert code == 3
    assert "error:" in err
