"""Command-line surface: enumeration, property suites, and deck utilities.

Exit codes: 0 = success / no findings, 1 = findings (or a procedure-level
failure on the given input), 2 = usage or I/O error.  The cache directory is
taken from --cache or the ORDRECON_CACHE environment variable.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .canonical import canonical_cert, cert_to_poset
from .core import parse_poset_text
from .deck import Deck, deck as make_deck, invert_deck_cached
from .errors import OrderError, UnknownPropertyError
from .properties import PROPERTIES, ps_universe, report_lines, run_property
from .pseudo import find_minmax_ps_pairs
from .recon import classify_by_filter_shift, nonextremal_rank_assignment, \
    reconstruct_report
from .universe import DEFAULT_CAP, FILTERS, enumerate_universe


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise click.UsageError(str(exc)) from exc


def _load_deck(path: str) -> Deck:
    try:
        return Deck.from_text(_read_text(path))
    except ValueError as exc:
        raise click.UsageError(f"{path}: {exc}") from exc


@click.group()
def main() -> None:
    """Poset deck reconstruction workbench."""


@main.command("enumerate")
@click.option("-n", "n", type=int, required=True, help="Number of elements.")
@click.option("--filter", "filt", type=click.Choice(FILTERS), default="all",
              show_default=True)
@click.option("--cache", "cache_dir", type=click.Path(), default=None,
              help="Cache directory (or set ORDRECON_CACHE).")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--cap", type=int, default=DEFAULT_CAP, show_default=True,
              help="Largest allowed n.")
def enumerate_cmd(n: int, filt: str, cache_dir, jobs: int, cap: int) -> None:
    """Print the certs of all posets on n elements, one per line."""
    try:
        certs = enumerate_universe(n, filt, jobs=jobs, cache_dir=cache_dir, cap=cap)
    except OrderError as exc:
        raise click.UsageError(str(exc)) from exc
    for cert in certs:
        click.echo(cert.text())
    click.echo(f"count={len(certs)}", err=True)


@main.command("check")
@click.option("--property", "pid", default=None,
              help="Registered property id (see --list).")
@click.option("--max-n", type=int, default=None,
              help="Largest n to cover (default: the property's own cap).")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--cache", "cache_dir", type=click.Path(), default=None)
@click.option("--replay", "replay_path", type=click.Path(), default=None,
              help="Replay file for findings (default: <property>.replay).")
@click.option("--list", "list_registry", is_flag=True,
              help="List the property registry and exit.")
def check_cmd(pid, max_n, jobs, cache_dir, replay_path, list_registry) -> None:
    """Run one property suite; exit 1 when it produces findings."""
    if list_registry:
        for spec in PROPERTIES.values():
            click.echo(f"{spec.id:24s} [{spec.filter}, n<={spec.default_max_n}] "
                       f"{spec.description}")
        return
    if pid is None:
        raise click.UsageError("either --property or --list is required")
    spec = PROPERTIES.get(pid)
    if spec is None:
        raise click.UsageError(f"unknown property {pid!r}; try --list")
    try:
        findings = run_property(pid, max_n if max_n is not None
                                else spec.default_max_n,
                                jobs=jobs, cache_dir=cache_dir)
    except UnknownPropertyError as exc:
        raise click.UsageError(str(exc)) from exc
    if not findings:
        click.echo(f"PASS {pid}")
        return
    for line in report_lines(findings):
        click.echo(line)
    path = Path(replay_path) if replay_path else Path(f"{pid}.replay")
    path.write_text("\n".join(f.to_replay() for f in sorted(findings)))
    click.echo(f"replay written to {path}", err=True)
    sys.exit(1)


@main.command("deck")
@click.option("--poset", "poset_path", type=click.Path(), required=True,
              help="Poset file: first line n, then one a<b cover per line.")
def deck_cmd(poset_path: str) -> None:
    """Print the deck of the given poset."""
    try:
        p = parse_poset_text(_read_text(poset_path))
    except (ValueError, OrderError) as exc:
        raise click.UsageError(f"{poset_path}: {exc}") from exc
    click.echo(make_deck(p).to_text(), nl=False)


@main.command("invert")
@click.option("--deck", "deck_path", type=click.Path(), required=True)
def invert_cmd(deck_path: str) -> None:
    """Print every poset cert with the given deck, one per line."""
    d = _load_deck(deck_path)
    try:
        witnesses = invert_deck_cached(d)
    except OrderError as exc:
        raise click.UsageError(str(exc)) from exc
    for cert in witnesses:
        click.echo(cert.text())


@main.command("find-pseudosimilar")
@click.option("--max-n", type=int, default=9, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--cache", "cache_dir", type=click.Path(), default=None)
def find_ps_cmd(max_n: int, jobs: int, cache_dir) -> None:
    """Print certs of connected posets with a minmax pseudo-similar pair."""
    try:
        for n in range(2, max_n + 1):
            for cert in ps_universe(n, jobs=jobs, cache_dir=cache_dir):
                p = cert_to_poset(cert)
                l, h, _ = find_minmax_ps_pairs(p)[0]
                click.echo(f"{cert.text()} l={l} h={h}")
    except OrderError as exc:
        raise click.UsageError(str(exc)) from exc


@main.command("reconstruct")
@click.option("--deck", "deck_path", type=click.Path(), required=True)
def reconstruct_cmd(deck_path: str) -> None:
    """Print the reconstruction report for the given deck."""
    d = _load_deck(deck_path)
    try:
        report = reconstruct_report(d)
    except OrderError as exc:
        click.echo(f"FAIL {exc}", err=True)
        sys.exit(1)
    click.echo(report.to_text(), nl=False)


@main.command("classify")
@click.option("--deck", "deck_path", type=click.Path(), required=True)
def classify_cmd(deck_path: str) -> None:
    """Print per-card tags with the rule that justified each decision."""
    d = _load_deck(deck_path)
    try:
        tags = nonextremal_rank_assignment(d)
        flags = {cert: flagged for cert, _, flagged in classify_by_filter_shift(d)}
    except OrderError as exc:
        click.echo(f"FAIL {exc}", err=True)
        sys.exit(1)
    for t in tags:
        rank = "-" if t.rank is None else str(t.rank)
        click.echo(f"{t.cert.text()} x{t.mult} tag={t.tag} rank={rank} via {t.method}")
    for cert, flagged in sorted(flags.items()):
        if flagged:
            click.echo(f"{cert.text()} definitely-maximal via filter-deck shift test")


if __name__ == "__main__":
    main()
