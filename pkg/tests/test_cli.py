"""Command-line surface: subcommands, output formats, and exit codes."""

import pytest
from click.testing import CliRunner

from ordrecon.canonical import canonical_cert
from ordrecon.cli import main
from ordrecon.core import format_poset_text
from ordrecon.deck import deck

from conftest import chain, star, v_poset


@pytest.fixture
def runner():
    return CliRunner()


def write_poset(tmp_path, p):
    path = tmp_path / "poset.txt"
    path.write_text(format_poset_text(p))
    return str(path)


def write_deck(tmp_path, p):
    path = tmp_path / "deck.txt"
    path.write_text(deck(p).to_text())
    return str(path)


class TestEnumerate:
    def test_counts_and_output(self, runner, cache_dir):
        res = runner.invoke(main, ["enumerate", "-n", "4", "--cache", cache_dir])
        assert res.exit_code == 0
        lines = [ln for ln in res.output.splitlines()
                 if ln and not ln.startswith("count=")]
        assert len(lines) == 16
        assert "count=16" in res.output

    def test_filter(self, runner, cache_dir):
        res = runner.invoke(main, ["enumerate", "-n", "4", "--filter",
                                   "connected", "--cache", cache_dir])
        assert res.exit_code == 0
        assert "count=10" in res.output

    def test_cap_is_a_usage_error(self, runner):
        res = runner.invoke(main, ["enumerate", "-n", "4", "--cap", "3"])
        assert res.exit_code == 2

    def test_missing_n(self, runner):
        assert runner.invoke(main, ["enumerate"]).exit_code == 2


class TestCheck:
    def test_list_registry(self, runner):
        res = runner.invoke(main, ["check", "--list"])
        assert res.exit_code == 0
        assert "thm-1.2" in res.output and "lem-6.4" in res.output

    def test_pass_line(self, runner, cache_dir):
        res = runner.invoke(main, ["check", "--property", "kelly",
                                   "--max-n", "5", "--cache", cache_dir])
        assert res.exit_code == 0
        assert res.output.strip() == "PASS kelly"

    def test_findings_write_replay_and_exit_1(self, runner, cache_dir,
                                              tmp_path):
        replay = tmp_path / "out.replay"
        res = runner.invoke(main, ["check", "--property", "recon-conjecture",
                                   "--max-n", "3", "--cache", cache_dir,
                                   "--replay", str(replay)])
        assert res.exit_code == 1
        assert res.output.startswith("FAIL recon-conjecture witnesses=")
        assert replay.exists()
        assert replay.read_text().startswith("property: recon-conjecture")

    def test_unknown_property(self, runner):
        res = runner.invoke(main, ["check", "--property", "lem-9.9"])
        assert res.exit_code == 2

    def test_property_or_list_required(self, runner):
        assert runner.invoke(main, ["check"]).exit_code == 2


class TestDeckCommands:
    def test_deck_round_trip(self, runner, tmp_path):
        poset_path = write_poset(tmp_path, chain(4))
        res = runner.invoke(main, ["deck", "--poset", poset_path])
        assert res.exit_code == 0
        assert res.output == deck(chain(4)).to_text()

    def test_deck_bad_file(self, runner, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a poset\n")
        res = runner.invoke(main, ["deck", "--poset", str(bad)])
        assert res.exit_code == 2

    def test_invert_unique(self, runner, tmp_path):
        deck_path = write_deck(tmp_path, chain(4))
        res = runner.invoke(main, ["invert", "--deck", deck_path])
        assert res.exit_code == 0
        assert res.output.strip() == canonical_cert(chain(4)).text()

    def test_invert_two_witnesses(self, runner, tmp_path):
        deck_path = write_deck(tmp_path, v_poset())
        res = runner.invoke(main, ["invert", "--deck", deck_path])
        assert res.exit_code == 0
        assert len(res.output.split()) == 2

    def test_invert_missing_file(self, runner, tmp_path):
        res = runner.invoke(main, ["invert", "--deck",
                                   str(tmp_path / "nope.txt")])
        assert res.exit_code == 2


class TestFindPseudosimilar:
    def test_small_range(self, runner, cache_dir):
        res = runner.invoke(main, ["find-pseudosimilar", "--max-n", "4",
                                   "--cache", cache_dir])
        assert res.exit_code == 0
        lines = res.output.strip().splitlines()
        assert "4:1c l=1 h=3" in lines
        assert all(" l=" in ln and " h=" in ln for ln in lines)


class TestReconstructAndClassify:
    def test_reconstruct_report(self, runner, tmp_path):
        deck_path = write_deck(tmp_path, chain(4))
        res = runner.invoke(main, ["reconstruct", "--deck", deck_path])
        assert res.exit_code == 0
        assert res.output.startswith("deck n=4\n")
        assert f"reconstructed {canonical_cert(chain(4)).text()}" in res.output

    def test_reconstruct_failure_exit_1(self, runner, tmp_path):
        deck_path = write_deck(tmp_path, chain(3))
        res = runner.invoke(main, ["reconstruct", "--deck", deck_path])
        assert res.exit_code == 1
        assert "FAIL" in res.output

    def test_classify_star(self, runner, tmp_path):
        deck_path = write_deck(tmp_path, star(3))
        res = runner.invoke(main, ["classify", "--deck", deck_path])
        assert res.exit_code == 0
        assert "definitely-maximal via filter-deck shift test" in res.output
        assert "tag=" in res.output and "via" in res.output
