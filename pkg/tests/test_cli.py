"""CLI subcommands: exit codes, outputs, determinism."""

from pathlib import Path

import pytest

from forestef.cli import main

FIX = Path(__file__).resolve().parent.parent / "fixtures"


def run(args):
    return main([str(a) for a in args])


class TestBuild:
    def test_grid_within_bound(self, tmp_path):
        out = tmp_path / "g"
        rc = run(["build", FIX / "grid4.graph", "--c", "4", "--beta", "1/2",
                  "--d", "2", "--out", out])
        assert rc == 0
        assert (tmp_path / "g.ef").exists()
        assert (tmp_path / "g.ledger").exists()
        assert "within-bound yes" in (tmp_path / "g.ledger").read_text()

    def test_single_vertex(self, tmp_path):
        graph = tmp_path / "k1.graph"
        graph.write_text("1 0\n")
        rc = run(["build", graph, "--out", tmp_path / "k1"])
        assert rc == 0
        ef = (tmp_path / "k1.ef").read_text()
        assert "vars 0 orig 0" in ef

    def test_bad_beta_is_input_error(self, tmp_path):
        rc = run(["build", FIX / "k3.graph", "--beta", "1", "--out", tmp_path / "x"])
        assert rc == 2

    def test_missing_graph_is_input_error(self, tmp_path):
        rc = run(["build", tmp_path / "nope.graph", "--out", tmp_path / "x"])
        assert rc == 2

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run(["build", FIX / "grid3.graph", "--sep-mode", "exact",
                        "--seed", "7", "--out", out]) == 0
        for ext in (".ef", ".ledger", ".tree"):
            assert (tmp_path / f"a{ext}").read_bytes() == \
                (tmp_path / f"b{ext}").read_bytes()

    def test_tree_file_mode(self, tmp_path):
        out = tmp_path / "t"
        assert run(["build", FIX / "path8.graph", "--c", "2", "--sep-mode",
                    "exact", "--out", out]) == 0
        rc = run(["build", FIX / "path8.graph", "--c", "2", "--sep-mode", "file",
                  "--tree", tmp_path / "t.tree", "--out", tmp_path / "t2"])
        assert rc == 0
        assert (tmp_path / "t.ef").read_bytes() == (tmp_path / "t2.ef").read_bytes()


class TestVerify:
    def test_built_ef_passes(self, tmp_path):
        out = tmp_path / "k3"
        assert run(["build", FIX / "k3.graph", "--c", "2", "--sep-mode", "exact",
                    "--out", out]) == 0
        rc = run(["verify", FIX / "k3.graph", "--system", tmp_path / "k3.ef",
                  "--trials", "25", "--seed", "4", "--out", tmp_path / "v"])
        assert rc == 0
        report = (tmp_path / "v.report").read_text()
        assert "FAIL" not in report

    def test_tampered_ef_fails_with_witness(self, tmp_path):
        from forestef.fixtures import complete_graph
        from forestef.formulations import edmonds_system
        lines = edmonds_system(complete_graph(3)).to_text().splitlines()
        # drop the last rank row (the U = V(G) row)
        drop = max(i for i, l in enumerate(lines) if l.startswith("INEQ"))
        (tmp_path / "bad.ef").write_text("\n".join(lines[:drop] + lines[drop + 1:]) + "\n")
        rc = run(["verify", FIX / "k3.graph", "--system", tmp_path / "bad.ef",
                  "--trials", "25", "--seed", "4", "--out", tmp_path / "v"])
        assert rc == 1
        report = (tmp_path / "v.report").read_text()
        assert "FAIL" in report and "lp=3 greedy=2" in report

    def test_vacuous_single_vertex(self, tmp_path):
        graph = tmp_path / "k1.graph"
        graph.write_text("1 0\n")
        rc = run(["verify", graph, "--trials", "1", "--out", tmp_path / "v"])
        assert rc == 0


class TestProtocol:
    def test_classical_k3(self, tmp_path):
        rc = run(["protocol", FIX / "k3.graph", "--out", tmp_path / "p"])
        assert rc == 0

    def test_separator_path6(self, tmp_path):
        rc = run(["protocol", FIX / "path6.graph", "--protocol", "separator",
                  "--c", "3", "--sep-mode", "exact", "--out", tmp_path / "p"])
        assert rc == 0

    def test_williams_grid3_bridgeless_scope(self, tmp_path):
        rc = run(["protocol", FIX / "grid3.graph", "--protocol", "williams",
                  "--rotation", FIX / "grid3.rot", "--scope", "bridgeless",
                  "--out", tmp_path / "p"])
        assert rc == 0

    def test_williams_full_scope_reports_known_pair_defect(self, tmp_path):
        # single-edge subsets pass the facet predicate but break the dual
        # identity, so the spec-literal scope exits nonzero
        rc = run(["protocol", FIX / "cycle4.graph", "--protocol", "williams",
                  "--rotation", FIX / "cycle4.rot", "--out", tmp_path / "p"])
        assert rc == 1
        report = (tmp_path / "p.report").read_text()
        assert "FAIL williams 3 " in report

    def test_williams_requires_rotation(self, tmp_path):
        rc = run(["protocol", FIX / "k3.graph", "--protocol", "williams",
                  "--out", tmp_path / "p"])
        assert rc == 2


class TestScale:
    def test_three_rows(self, tmp_path):
        rc = run(["scale", "--sizes", "2,3,4", "--out", tmp_path / "s"])
        assert rc == 0
        lines = (tmp_path / "s.table").read_text().splitlines()
        assert len(lines) == 5  # seed comment, header, three rows
        assert lines[2].split()[0] == "4"

    def test_single_vertex_grid(self, tmp_path):
        rc = run(["scale", "--sizes", "1", "--out", tmp_path / "s"])
        assert rc == 0
        assert (tmp_path / "s.table").read_text().splitlines()[-1].startswith("1 0")
