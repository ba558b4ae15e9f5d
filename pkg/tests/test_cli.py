"""End-to-end CLI behaviour through main(argv): outputs and exit codes."""

import io
import json

import pytest

from scopekit.cli import main
from scopekit.turtle import parse_turtle

from conftest import FIXTURE_DIR


@pytest.fixture()
def case_file(tmp_path):
    """scenario1 written out via the init subcommand."""
    path = tmp_path / "case.ttl"
    assert main(["init", "--scenario", "1", "-o", str(path)]) == 0
    return path


@pytest.fixture()
def broken_file(tmp_path, case_file):
    text = case_file.read_text(encoding="utf-8")
    bad = text.replace("00c4c3946ec03c915cfe4cbddffe93da", "not-a-digest")
    path = tmp_path / "broken.ttl"
    path.write_text(bad, encoding="utf-8")
    return path


class TestValidate:
    def test_clean_case(self, capsys, case_file):
        assert main(["validate", str(case_file)]) == 0
        out = capsys.readouterr()
        assert out.out == ""
        assert out.err == ""

    def test_broken_case_exits_one(self, capsys, broken_file):
        assert main(["validate", str(broken_file)]) == 1
        lines = capsys.readouterr().out.splitlines()
        assert lines
        code, severity, subject, message = lines[0].split("\t")
        assert code == "R08"
        assert severity == "Error"

    def test_json_format(self, capsys, broken_file):
        assert main(["validate", str(broken_file), "--format", "json"]) == 1
        d = json.loads(capsys.readouterr().out)
        assert d["error_count"] >= 1
        assert d["findings"][0]["code"].startswith("R")

    def test_missing_file_exits_two(self, capsys, tmp_path):
        assert main(["validate", str(tmp_path / "absent.ttl")]) == 2
        assert "scopekit:" in capsys.readouterr().err

    def test_malformed_turtle_exits_two(self, capsys, tmp_path):
        bad = tmp_path / "bad.ttl"
        bad.write_text("this is not turtle", encoding="utf-8")
        assert main(["validate", str(bad)]) == 2
        assert "scopekit:" in capsys.readouterr().err

    def test_output_flag_writes_file(self, capsys, tmp_path, broken_file):
        out = tmp_path / "report.txt"
        assert main(["validate", str(broken_file), "-o", str(out)]) == 1
        assert capsys.readouterr().out == ""
        assert "R08\tError\t" in out.read_text(encoding="utf-8")


class TestConvert:
    def test_round_trip_is_byte_stable(self, capsys, tmp_path, case_file):
        nt = tmp_path / "case.nt"
        ttl_a = tmp_path / "a.ttl"
        ttl_b = tmp_path / "b.ttl"
        assert main(["convert", str(case_file), "--to", "ttl", "-o", str(ttl_a)]) == 0
        assert main(["convert", str(case_file), "--to", "nt", "-o", str(nt)]) == 0
        assert main(["convert", str(nt), "--to", "ttl", "-o", str(ttl_b)]) == 0
        assert ttl_a.read_bytes() == ttl_b.read_bytes()

    def test_convert_is_idempotent(self, capsys, tmp_path, case_file):
        once = tmp_path / "once.ttl"
        twice = tmp_path / "twice.ttl"
        assert main(["convert", str(case_file), "--to", "ttl", "-o", str(once)]) == 0
        assert main(["convert", str(once), "--to", "ttl", "-o", str(twice)]) == 0
        assert once.read_bytes() == twice.read_bytes()

    def test_nt_output_sorted(self, capsys, case_file):
        assert main(["convert", str(case_file), "--to", "nt"]) == 0
        lines = [l for l in capsys.readouterr().out.splitlines() if l]
        assert lines == sorted(lines)


class TestQuery:
    QUERY = "?c a case-investigation:Incident"

    def test_inline_query(self, capsys, case_file):
        assert main(["query", str(case_file), "-q", self.QUERY]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "?c"
        assert len(lines) == 2

    def test_count_flag(self, capsys, case_file):
        assert main(["query", str(case_file), "-q", self.QUERY, "--count"]) == 0
        assert capsys.readouterr().out == "1\n"

    def test_query_from_file(self, capsys, tmp_path, case_file):
        qf = tmp_path / "q.txt"
        qf.write_text(self.QUERY + "\n", encoding="utf-8")
        assert main(["query", str(case_file), "-f", str(qf), "--count"]) == 0
        assert capsys.readouterr().out == "1\n"

    def test_query_from_stdin(self, capsys, monkeypatch, case_file):
        monkeypatch.setattr("sys.stdin", io.StringIO(self.QUERY))
        assert main(["query", str(case_file), "--count"]) == 0
        assert capsys.readouterr().out == "1\n"

    def test_bad_query_exits_two(self, capsys, case_file):
        assert main(["query", str(case_file), "-q", "?s ?p"]) == 2
        assert "scopekit:" in capsys.readouterr().err

    def test_bad_filter_regex_exits_two(self, capsys, case_file):
        assert main(["query", str(case_file),
                     "-q", "?s ?p ?o\nFILTER ?o /a{2}/"]) == 2
        assert "scopekit:" in capsys.readouterr().err


class TestDiff:
    def test_identical_files_exit_zero(self, capsys, case_file):
        assert main(["diff", str(case_file), str(case_file)]) == 0
        assert capsys.readouterr().out == "# added\n# removed\n"

    def test_different_files_exit_one(self, capsys, tmp_path, case_file):
        other = tmp_path / "other.ttl"
        assert main(["init", "--scenario", "2", "-o", str(other)]) == 0
        capsys.readouterr()
        assert main(["diff", str(case_file), str(other)]) == 1
        out = capsys.readouterr().out
        added = out.index("# added")
        removed = out.index("# removed")
        assert added < removed
        assert out.count(" .\n") > 0


class TestMerge:
    def test_self_merge_exits_zero(self, capsys, case_file):
        assert main(["merge", str(case_file), str(case_file)]) == 0
        out = capsys.readouterr()
        assert out.err == ""
        parse_turtle(out.out)  # merged graph on stdout is valid turtle

    def test_conflicts_exit_one(self, capsys, tmp_path, case_file, broken_file):
        # broken_file swaps one md5 value, so the functional property conflicts
        assert main(["merge", str(case_file), str(broken_file)]) == 1
        out = capsys.readouterr()
        assert "M01\tError\t" in out.err
        assert "md5Hash" in out.err

    def test_output_flag_moves_conflicts_to_stdout(self, capsys, tmp_path,
                                                   case_file, broken_file):
        merged = tmp_path / "merged.ttl"
        assert main(["merge", str(case_file), str(broken_file),
                     "-o", str(merged)]) == 1
        out = capsys.readouterr()
        assert "M01\tError\t" in out.out
        assert merged.exists()
        # first file's digest survives in the merged graph
        assert "00c4c3946ec03c915cfe4cbddffe93da" in merged.read_text(encoding="utf-8")
        assert "not-a-digest" not in merged.read_text(encoding="utf-8")

    def test_mismatched_cases_exit_two(self, capsys, tmp_path, case_file):
        other = tmp_path / "other.ttl"
        main(["init", "--scenario", "2", "-o", str(other)])
        capsys.readouterr()
        assert main(["merge", str(case_file), str(other)]) == 2
        assert "scopekit:" in capsys.readouterr().err

    def test_allow_mismatch(self, capsys, tmp_path, case_file):
        other = tmp_path / "other.ttl"
        main(["init", "--scenario", "2", "-o", str(other)])
        capsys.readouterr()
        assert main(["merge", str(case_file), str(other), "--allow-mismatch"]) == 0


class TestReport:
    def test_markdown_report(self, capsys, case_file):
        assert main(["report", str(case_file)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("# Case report: punggol-ransomware-triage")
        for section in ("## Overview", "## Threats", "## TTPs", "## IoCs",
                        "## Custody", "## Actions"):
            assert section in out

    def test_json_report(self, capsys, case_file):
        assert main(["report", str(case_file), "--format", "json"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["case"]["name"] == "punggol-ransomware-triage"

    def test_invalid_case_exits_one_with_findings(self, capsys, broken_file):
        assert main(["report", str(broken_file)]) == 1
        err = capsys.readouterr().err
        assert "does not validate" in err
        assert "R08\tError\t" in err


class TestInit:
    @pytest.mark.parametrize("scenario", [1, 2, 3])
    def test_fixtures_ship_clean(self, capsys, tmp_path, scenario):
        path = tmp_path / f"s{scenario}.ttl"
        assert main(["init", "--scenario", str(scenario), "-o", str(path)]) == 0
        assert main(["validate", str(path)]) == 0

    def test_init_matches_packaged_fixture(self, capsys):
        assert main(["init", "--scenario", "3"]) == 0
        out = capsys.readouterr().out
        packaged = (FIXTURE_DIR / "scenario3.ttl").read_text(encoding="utf-8")
        assert out == packaged


class TestIocs:
    def test_export(self, capsys, tmp_path):
        path = tmp_path / "s3.ttl"
        main(["init", "--scenario", "3", "-o", str(path)])
        capsys.readouterr()
        assert main(["iocs", "export", str(path)]) == 0
        out = capsys.readouterr().out
        lines = out.splitlines()
        assert lines[0] == "kind,value,source"
        assert len(lines) == 10  # header + 3 hashes + 6 domains
        assert "agegamepay[.]com" in out

    def test_import_round_trip(self, capsys, tmp_path, case_file):
        csv_path = tmp_path / "iocs.csv"
        csv_path.write_text(
            "kind,value,source\n"
            "Domain,example[.]test,unit\n"
            "Md5Hash," + "9" * 32 + ",unit\n",
            encoding="utf-8")
        merged = tmp_path / "with-iocs.ttl"
        assert main(["iocs", "import", str(case_file), str(csv_path),
                     "-o", str(merged)]) == 0
        err = capsys.readouterr().err
        assert "imported 2 IoC rows" in err

        assert main(["iocs", "export", str(merged)]) == 0
        out = capsys.readouterr().out
        assert "example[.]test" in out
        assert "9" * 32 in out

    def test_import_reports_bad_rows(self, capsys, tmp_path, case_file):
        csv_path = tmp_path / "iocs.csv"
        csv_path.write_text("kind,value,source\nBeacon,10.0.0.1,unit\n",
                            encoding="utf-8")
        assert main(["iocs", "import", str(case_file), str(csv_path),
                     "-o", str(tmp_path / "out.ttl")]) == 0
        err = capsys.readouterr().err
        assert "unknown IoC kind" in err
        assert "imported 0 IoC rows" in err


class TestSchemaSelection:
    def test_env_var_respected(self, capsys, monkeypatch, case_file):
        packaged = str((FIXTURE_DIR / ".." / "schemas").resolve())
        monkeypatch.setenv("SCOPE_SCHEMA_DIR", packaged)
        assert main(["validate", str(case_file)]) == 0

    def test_bogus_env_dir_exits_two(self, capsys, monkeypatch, tmp_path, case_file):
        monkeypatch.setenv("SCOPE_SCHEMA_DIR", str(tmp_path / "nowhere"))
        assert main(["validate", str(case_file)]) == 2

    def test_flag_overrides_env(self, capsys, monkeypatch, tmp_path, case_file):
        monkeypatch.setenv("SCOPE_SCHEMA_DIR", str(tmp_path / "nowhere"))
        packaged = str((FIXTURE_DIR / ".." / "schemas").resolve())
        assert main(["validate", str(case_file), "--schema", packaged]) == 0


class TestUsage:
    def test_no_arguments_exits_two(self, capsys):
        assert main([]) == 2

    def test_unknown_subcommand_exits_two(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_entrypoint_raises_system_exit(self, capsys, case_file):
        import sys
        from scopekit.cli import entrypoint
        old = sys.argv
        sys.argv = ["scopekit", "validate", str(case_file)]
        try:
            with pytest.raises(SystemExit) as exc:
                entrypoint()
            assert exc.value.code == 0
        finally:
            sys.argv = old
