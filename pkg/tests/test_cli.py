import json
import subprocess
import sys

import pytest

from pubmeta.cli import main

from conftest import EMIT_FIXTURES, FIXTURES, GOLDEN, fixture_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


CFG = str(FIXTURES / "journal.cfg")


class TestValidate:
    def test_emojex_clean(self, capsys):
        code, out, err = run(capsys, "validate", str(fixture_path("emojex")))
        assert code == 0
        assert err == ""

    @pytest.mark.parametrize("name", EMIT_FIXTURES)
    def test_corpus_exit_codes(self, capsys, name):
        code, _, err = run(capsys, "validate", str(fixture_path(name)))
        assert code == 0, err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "validate", "no/such/file.meta")
        assert code == 2
        assert "E-IO" in err

    def test_mutated_orcid_check_digit(self, tmp_path, capsys):
        text = fixture_path("emojex").read_text("utf-8")
        bad = text.replace("0000-0002-0599-0192", "0000-0002-0599-0193")
        target = tmp_path / "bad.meta"
        target.write_text(bad, encoding="utf-8")
        code, _, err = run(capsys, "validate", str(target))
        assert code == 1
        assert "E-BADORCID" in err

    def test_grammar_error_exits_2(self, tmp_path, capsys):
        target = tmp_path / "bad.meta"
        target.write_text("author:\n  name: A\n", encoding="utf-8")
        code, _, err = run(capsys, "validate", str(target))
        assert code == 2
        assert "E-NOHEADER" in err

    def test_strict_promotes_warnings(self, tmp_path, capsys):
        target = tmp_path / "warn.meta"
        target.write_text("meta:\n  title: T\n  zebra: x\nauthor:\n  name: A\n",
                          encoding="utf-8")
        code, _, err = run(capsys, "validate", str(target))
        assert code == 0
        assert "W-UNKNOWNKEY" in err
        code, _, _ = run(capsys, "validate", str(target), "--strict")
        assert code == 1

    def test_diagnostic_line_format(self, tmp_path, capsys):
        target = tmp_path / "warn.meta"
        target.write_text("meta:\n  title: T\n  zebra: x\n", encoding="utf-8")
        _, _, err = run(capsys, "validate", str(target))
        line = [l for l in err.splitlines() if "W-UNKNOWNKEY" in l][0]
        severity, code, lineno, message = line.split(":", 3)
        assert severity == "warning" and code == "W-UNKNOWNKEY" and lineno == "3"

    def test_diag_json_reserved(self, capsys):
        code, _, err = run(capsys, "validate", str(fixture_path("emojex")), "--diag-json")
        assert code == 2
        assert "reserved" in err


class TestEmit:
    def test_golden_json_byte_equal(self, capsys):
        code, out, _ = run(capsys, "emit", str(fixture_path("emojex")), "--format", "json")
        assert code == 0
        assert out.encode("utf-8") == (GOLDEN / "emojex.json").read_bytes()

    def test_crossref_without_doi(self, capsys):
        code, _, err = run(capsys, "emit", str(fixture_path("emojex")),
                           "--format", "crossref", "--config", CFG)
        assert code == 1
        assert "E-NODOI" in err

    def test_doi_from_derivation(self, tmp_path, capsys):
        text = fixture_path("emojex").read_text("utf-8").replace(
            "meta:\n", "meta:\n  published: 2024-02-03\n", 1)
        target = tmp_path / "nodoi.meta"
        target.write_text(text, encoding="utf-8")
        code, out, err = run(capsys, "emit", str(target), "--format", "crossref",
                             "--config", CFG, "--doi-from", "10.62056:a1b2c3")
        assert code == 0, err
        assert "10.62056/a1b2c3" in out

    def test_doi_from_bad_paperid(self, capsys):
        code, _, err = run(capsys, "emit", str(fixture_path("emojex")),
                           "--format", "crossref", "--config", CFG,
                           "--doi-from", "10.62056:A!")
        assert code == 1
        assert "E-BADPAPERID" in err

    def test_out_file(self, tmp_path, capsys):
        out_path = tmp_path / "x.json"
        code, out, _ = run(capsys, "emit", str(fixture_path("emojex_pub")),
                           "--format", "json", "--out", str(out_path))
        assert code == 0
        assert out == ""
        json.loads(out_path.read_text("utf-8"))

    def test_all_writes_four_siblings(self, tmp_path, capsys):
        meta = tmp_path / "art.meta"
        meta.write_text(fixture_path("emojex_pub").read_text("utf-8"), encoding="utf-8")
        code, _, err = run(capsys, "emit", str(meta), "--all", "--config", CFG)
        assert code == 0, err
        for suffix in (".json", ".xml", ".jats.xml", ".xmp"):
            assert (tmp_path / f"art{suffix}").exists(), suffix

    def test_no_file_written_on_failure(self, tmp_path, capsys):
        meta = tmp_path / "art.meta"
        meta.write_text(fixture_path("emojex").read_text("utf-8"), encoding="utf-8")
        # the emojex fixture has no DOI: --all includes crossref, so nothing may be written
        code, _, _ = run(capsys, "emit", str(meta), "--all", "--config", CFG)
        assert code == 1
        leftovers = [p.name for p in tmp_path.iterdir() if p.name != "art.meta"]
        assert leftovers == []

    def test_all_reruns_byte_identical(self, tmp_path, capsys):
        meta = tmp_path / "art.meta"
        meta.write_text(fixture_path("emojex_pub").read_text("utf-8"), encoding="utf-8")
        outputs = {}
        for round_no in range(2):
            code, _, err = run(capsys, "emit", str(meta), "--all", "--config", CFG)
            assert code == 0, err
            snapshot = {}
            for suffix in (".json", ".xml", ".jats.xml", ".xmp"):
                snapshot[suffix] = (tmp_path / f"art{suffix}").read_bytes()
            outputs[round_no] = snapshot
        assert outputs[0] == outputs[1]

    def test_timestampless_config_still_deterministic(self, tmp_path, capsys):
        cfg = tmp_path / "j.cfg"
        cfg.write_text("\n".join(
            l for l in (FIXTURES / "journal.cfg").read_text("utf-8").splitlines()
            if not l.startswith("timestamp")) + "\n", encoding="utf-8")
        runs = []
        for _ in range(2):
            code, out, err = run(capsys, "emit", str(fixture_path("emojex_pub")),
                                 "--format", "crossref", "--config", str(cfg))
            assert code == 0, err
            runs.append(out)
        assert runs[0] == runs[1]
        assert "<timestamp>202306300000</timestamp>" in runs[0]

    def test_emit_requires_format_or_all(self, capsys):
        code, _, err = run(capsys, "emit", str(fixture_path("emojex")))
        assert code == 2
        assert "--format" in err


class TestOnline:
    def _cfg(self, tmp_path):
        cfg = tmp_path / "online.cfg"
        cfg.write_text(
            "ror_endpoint: http://127.0.0.1:9/{value}\n"
            "funder_endpoint: http://127.0.0.1:9/{value}\n"
            f"cache_path: {tmp_path / 'cache.jsonl'}\n",
            encoding="utf-8")
        return str(cfg)

    def test_unreachable_registry_downgraded_to_warning(self, tmp_path, capsys):
        code, _, err = run(capsys, "validate", str(fixture_path("emojex")),
                           "--online", "--config", self._cfg(tmp_path))
        assert code == 0
        assert "W-NETWORK" in err

    def test_strict_promotes_network_warning(self, tmp_path, capsys):
        code, _, _ = run(capsys, "validate", str(fixture_path("emojex")),
                         "--online", "--strict", "--config", self._cfg(tmp_path))
        assert code == 1

    def test_offline_default_makes_no_lookup(self, capsys):
        # no --online: never touches the network, no registry warnings
        code, _, err = run(capsys, "validate", str(fixture_path("emojex")))
        assert code == 0
        assert "W-NETWORK" not in err


class TestEmitConfigGuards:
    def test_bad_doi_prefix_rejected(self):
        from pubmeta.diagnostics import CodedError
        from pubmeta.emitters import EmitConfig
        import pytest as _pytest
        with _pytest.raises(CodedError) as err:
            EmitConfig(doi_prefix="9.1/x")
        assert err.value.code == "E-BADPREFIX"

    def test_single_out_not_written_on_validation_failure(self, tmp_path, capsys):
        meta = tmp_path / "bad.meta"
        text = fixture_path("emojex").read_text("utf-8").replace(
            "0000-0002-0599-0192", "0000-0002-0599-0193")
        meta.write_text(text, encoding="utf-8")
        out = tmp_path / "out.json"
        code, _, _ = run(capsys, "emit", str(meta), "--format", "json",
                         "--out", str(out))
        assert code == 1
        assert not out.exists()


class TestInspect:
    def test_summary(self, capsys):
        code, out, _ = run(capsys, "inspect", str(fixture_path("emojex")))
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "title: Emojex: use of emojis in LaTeX"
        assert "authors: 2" in lines
        assert "affiliations: 2" in lines
        assert "funders: 1" in lines
        assert "citations: 0" in lines
        assert "  1. Fester Bestertester (affiliations: 1, 2) orcid:0000-0002-0599-0192" in lines
        assert "  2. Kevin S. McCurley (affiliations: 2) orcid:0000-0001-7890-5430" in lines

    def test_stable_across_runs(self, capsys):
        _, first, _ = run(capsys, "inspect", str(fixture_path("emojex_pub")))
        _, second, _ = run(capsys, "inspect", str(fixture_path("emojex_pub")))
        assert first == second

    def test_parse_failure(self, tmp_path, capsys):
        target = tmp_path / "bad.meta"
        target.write_bytes(b"\xff\xfe")
        code, _, _ = run(capsys, "inspect", str(target))
        assert code == 2


class TestConsoleEntrypoint:
    def test_subprocess_validate(self):
        proc = subprocess.run(
            [sys.executable, "-m", "pubmeta.cli", "validate", str(fixture_path("emojex"))],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr

    def test_subprocess_emit_matches_inprocess(self):
        proc = subprocess.run(
            [sys.executable, "-m", "pubmeta.cli", "emit", str(fixture_path("emojex")),
             "--format", "json"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.encode("utf-8") == (GOLDEN / "emojex.json").read_bytes()
