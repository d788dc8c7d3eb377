import json

import pytest

from rdfcsa import cli, fileformat
from rdfcsa.psi import PsiSegment

from conftest import DESK_TRIPLES


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def fields(out):
    return dict(line.split("\t", 1) for line in out.splitlines() if line.count("\t") == 1)


@pytest.fixture
def desk_tsv(tmp_path):
    path = tmp_path / "desk.tsv"
    path.write_text("".join(f"s{s}\tp{p}\to{o}\n" for s, p, o in DESK_TRIPLES), encoding="utf-8")
    return path


@pytest.fixture
def gen_index(tmp_path, capsys):
    tsv = tmp_path / "g.tsv"
    assert run(capsys, "gen", "--n", 800, "--seed", 3, "-o", tsv)[0] == 0
    idx = tmp_path / "g.idx"
    assert run(capsys, "build", tsv, idx, "--tpsi", 16)[0] == 0
    return tsv, idx


def test_build_desk_prints_sizes(desk_tsv, tmp_path, capsys):
    code, out, _ = run(capsys, "build", desk_tsv, tmp_path / "d.idx")
    f = fields(out)
    assert code == 0 and (f["n"], f["n_s"], f["n_p"], f["n_o"]) == ("10", "5", "6", "5")
    assert float(f["ratio"]) == pytest.approx(int(f["total_bytes"]) / 120, abs=1e-4)


def test_build_is_byte_identical(desk_tsv, tmp_path, capsys):
    run(capsys, "build", desk_tsv, tmp_path / "a.idx")
    run(capsys, "build", desk_tsv, tmp_path / "b.idx")
    assert (tmp_path / "a.idx").read_bytes() == (tmp_path / "b.idx").read_bytes()


def test_build_errors(tmp_path, capsys):
    empty = tmp_path / "e.tsv"
    empty.write_text("")
    code, _, err = run(capsys, "build", empty, tmp_path / "e.idx")
    assert code == 2 and "no triples" in err and not (tmp_path / "e.idx").exists()
    bad = tmp_path / "b.tsv"
    bad.write_text("a\tb\tc\nd\te\n")
    code, _, err = run(capsys, "build", bad, tmp_path / "b.idx")
    assert code == 2 and "line 2" in err
    assert run(capsys, "build", tmp_path / "missing.tsv", tmp_path / "x.idx")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["build"])
    assert exc.value.code == 1


def test_unusual_tpsi_warns(desk_tsv, tmp_path, capsys):
    code, _, err = run(capsys, "build", desk_tsv, tmp_path / "d.idx", "--tpsi", 7)
    assert code == 0 and "warning" in err
    assert run(capsys, "build", desk_tsv, tmp_path / "d.idx", "--tpsi", 0)[0] == 1


def test_query_strategies_agree(gen_index, capsys):
    tsv, idx = gen_index
    s, p, o = tsv.read_text().splitlines()[0].split("\t")
    outs = {run(capsys, "query", idx, f"? {p} {o}", "--strategy", st)[1]
            for st in ("auto", "base", "forward", "backward")}
    assert len(outs) == 1
    out = outs.pop()
    assert f"{s}\t{p}\t{o}" in out and out.splitlines()[-1].startswith("count\t")


def test_query_all_limit_ids_and_unknown(gen_index, capsys):
    _, idx = gen_index
    code, out, _ = run(capsys, "query", idx, "? ? ?", "--limit", 3, "--ids-only")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 4 and lines[-1] == "count\t800"
    assert all(x.isdigit() for x in lines[0].split("\t"))
    code, out, _ = run(capsys, "query", idx, "<nope> ? ?")
    assert code == 0 and out == "count\t0\n"
    assert run(capsys, "query", idx, "? ? ?", "--strategy", "base")[0] == 1
    assert run(capsys, "query", idx, "? ?")[0] == 1


def test_join_strategies_agree(gen_index, capsys):
    tsv, idx = gen_index
    s, p, o = tsv.read_text().splitlines()[0].split("\t")
    outs = []
    for st in ("merge", "left", "right"):
        code, out, _ = run(capsys, "join", idx, f"?s {p} ?x", f"?x {p} ?o", "--strategy", st)
        assert code == 0
        body = [ln for ln in out.splitlines() if not ln.startswith("strategy\t")]
        outs.append(body)
    assert outs[0] == outs[1] == outs[2]
    assert "class\tC" in outs[0]


def test_join_errors(gen_index, capsys):
    tsv, idx = gen_index
    p = tsv.read_text().splitlines()[0].split("\t")[1]
    code, _, err = run(capsys, "join", idx, "?x ? ?", f"?x {p} ?o", "--strategy", "merge")
    assert code == 1 and "(?s,?p,?o)" in err
    assert run(capsys, "join", idx, f"?x {p} ?o", "? ? ?x")[0] == 1
    code, out, _ = run(capsys, "join", idx, "?s <nope> ?x", f"?x {p} ?o")
    assert code == 0 and out.splitlines()[-1] == "count\t0"


def test_verify_fresh_and_json(gen_index, capsys):
    _, idx = gen_index
    code, out, _ = run(capsys, "verify", idx)
    assert code == 0 and [ln.split("\t")[0] for ln in out.splitlines()] == [
        "checksum", "cyclic", "monotone", "count"]
    code, out, _ = run(capsys, "verify", idx, "--json")
    assert code == 0 and json.loads(out)["ok"] is True


def test_verify_detects_bit_flip_in_psi_p(gen_index, capsys):
    _, idx = gen_index
    buf = bytearray(idx.read_bytes())
    _, sections = fileformat.unpack_sections(bytes(buf))
    start = bytes(buf).index(sections["psi_p"])
    buf[start + len(sections["psi_p"]) // 2] ^= 0x10
    idx.write_bytes(bytes(buf))
    code, out, _ = run(capsys, "verify", idx)
    assert code == 3 and "checksum\tFAIL" in out


def test_verify_detects_repacked_psi_corruption(desk_tsv, tmp_path, capsys):
    path = tmp_path / "d.idx"
    run(capsys, "build", desk_tsv, path, "--mode", "hybrid", "--tpsi", 4)
    meta, sections = fileformat.unpack_sections(path.read_bytes())
    seg = PsiSegment.from_bytes(sections["psi_o"])
    vals = seg.to_list()
    vals[3] = vals[4]
    sections = dict(sections, psi_o=PsiSegment.build(vals, "plain").to_bytes())
    path.write_bytes(fileformat.pack_sections(meta, sections))
    code, out, _ = run(capsys, "verify", path)
    assert code == 3
    assert "checksum\tok" in out and "cyclic\tFAIL" in out


def test_stats_accounting(gen_index, tmp_path, capsys):
    _, idx = gen_index
    code, out, _ = run(capsys, "stats", idx, "--json", "--figure", tmp_path / "s.png")
    st = json.loads(out)
    assert code == 0 and (tmp_path / "s.png").stat().st_size > 0
    assert sum(st["sections"].values()) == st["total_bytes"] == idx.stat().st_size
    assert st["raw_bytes"] == 12 * st["n"]


def test_stats_hybrid_plain_segments(gen_index, tmp_path, capsys):
    tsv, _ = gen_index
    hyb = tmp_path / "h.idx"
    run(capsys, "build", tsv, hyb, "--mode", "hybrid")
    st = json.loads(run(capsys, "stats", hyb, "--json")[1])
    n = st["n"]
    width = (n - 1).bit_length()
    for name in ("psi_s", "psi_o"):
        seg = st["segments"][name]
        assert seg["mode"] == "plain" and seg["payload_bits"] == n * width
        assert seg["bytes"] == 14 + -(-n * width // 8)


def test_stats_text_ratio_decreases_with_tpsi(gen_index, tmp_path, capsys):
    tsv, _ = gen_index
    totals = []
    for t in (4, 8, 16, 32, 64, 512):
        path = tmp_path / f"t{t}.idx"
        run(capsys, "build", tsv, path, "--tpsi", t)
        totals.append(int(fields(run(capsys, "stats", path)[1])["total_bytes"]))
    assert all(a > b for a, b in zip(totals, totals[1:]))


def test_gen_is_seeded(capsys):
    a = run(capsys, "gen", "--n", 50, "--seed", 1)[1]
    b = run(capsys, "gen", "--n", 50, "--seed", 1)[1]
    assert a == b and len(a.splitlines()) == 50
    assert run(capsys, "gen", "--n", 10 ** 9)[0] == 1


def test_report_writes_table_and_figures(gen_index, tmp_path, capsys):
    tsv, _ = gen_index
    out_dir = tmp_path / "rep"
    code, out, _ = run(capsys, "report", tsv, "--outdir", out_dir, "--tpsi", "8,64",
                       "--queries", 5)
    assert code == 0
    rows = (out_dir / "report.tsv").read_text().splitlines()
    assert rows[0].startswith("mode\tt_psi") and len(rows) == 5
    assert (out_dir / "space.png").stat().st_size > 0
    assert (out_dir / "query_time.png").stat().st_size > 0
