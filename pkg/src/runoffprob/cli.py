"""Command-line surface: chain updates, election reports, oracle checks.

Subcommands
    update   fold a poll file into a posterior store, chain by chain
    report   per-date probability tables (and optional SVG charts)
    elect    print the latest per-candidate election probabilities
    top2     print the latest per-pair top-two probabilities
    oracle   compare every reported kernel against Monte Carlo

Exit codes: 0 success, 1 input or parse error, 2 numerical convergence
failure, 3 oracle disagreement (some |z| > 4).
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .election import ElectionReport, ScenarioTable, full_report, pair_key
from .model import Round, noninformative_prior, scale_forward, update
from .numerics import QuadratureError, QuadratureSpec
from .oracle import mc_beats, mc_majority, mc_pair_top2, zscore
from .polls import (
    PollFileError,
    StoreEntry,
    layout_from_record,
    load_poll_file,
    load_store,
    save_store,
    to_observation,
)
from .rank import prob_beats, prob_majority, prob_pair_top2

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_ORACLE = 3

MIN_ORACLE_DRAWS = 10_000

_DEFAULTS = {
    "prior": "uniform",
    "scale": 0.1,
    "abs_tol": 1e-10,
    "rel_tol": 1e-8,
    "fallback": "half",
    "seed": 20181007,
    "draws": 100_000,
}


@dataclass
class RunConfig:
    command: str
    polls: Optional[Path] = None
    store: Optional[Path] = None
    pollster: Optional[str] = None
    prior: str = "uniform"
    scale: float = 0.1
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    fallback: str = "half"
    out: Optional[Path] = None
    seed: int = 20181007
    draws: int = 100_000
    date: Optional[dt.date] = None
    charts: bool = False

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(abs_tol=self.abs_tol, rel_tol=self.rel_tol)


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not quadrature failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="runoffprob", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *, polls=False, store=True, out=False, oracle=False,
            chain=False, kernels=False, date=False, charts=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None,
                       help="optional key=value file; flags take precedence")
        if polls:
            p.add_argument("--polls", type=Path, default=None, help="poll input file")
        if store:
            p.add_argument("--store", type=Path, default=None, help="posterior store file")
        p.add_argument("--pollster", default=None, help="restrict to one pollster")
        if chain:
            p.add_argument("--prior", choices=("uniform", "jeffreys"), default=None,
                           help="non-informative prior for the first poll of a chain")
            p.add_argument("--scale", type=float, default=None,
                           help="concentration scale factor between polls, in (0,1]")
        if kernels:
            p.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)
            p.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
            p.add_argument("--fallback", choices=("half", "skip"), default=None,
                           help="runoff probability for pairs without a polled scenario")
        if out:
            p.add_argument("--out", type=Path, default=None, help="output directory")
        if oracle:
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--draws", type=int, default=None)
        if date:
            p.add_argument("--date", type=dt.date.fromisoformat, default=None,
                           help="poll date to show (default: latest)")
        if charts:
            p.add_argument("--charts", action="store_true", default=False,
                           help="also render SVG line charts")
        return p

    add("update", "fold a poll file into the posterior store", polls=True, chain=True)
    add("report", "write per-date probability tables", out=True, kernels=True, charts=True)
    add("elect", "print election probabilities for one date", kernels=True, date=True)
    add("top2", "print top-two pair probabilities for one date", kernels=True, date=True)
    add("oracle", "Monte Carlo cross-check of the latest report", out=True,
        kernels=True, oracle=True)
    return parser


def _read_config_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise PollFileError(path, lineno, "expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONFIG_CASTS = {
    "polls": Path, "store": Path, "out": Path, "pollster": str, "prior": str,
    "fallback": str, "scale": float, "abs_tol": float, "rel_tol": float,
    "seed": int, "draws": int, "date": dt.date.fromisoformat,
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge precedence: explicit flag > config file entry > built-in default."""
    file_values: dict[str, str] = {}
    if getattr(args, "config", None) is not None:
        file_values = _read_config_file(args.config)
    cfg = RunConfig(command=args.command)
    for name in vars(cfg):
        if name == "command":
            continue
        flag = getattr(args, name, None)
        if flag is not None and flag is not False:
            setattr(cfg, name, flag)
        elif name in file_values:
            cast = _CONFIG_CASTS.get(name, str)
            try:
                setattr(cfg, name, cast(file_values[name]))
            except ValueError:
                raise ValueError(f"bad config value for {name}: {file_values[name]!r}") from None
        elif name in _DEFAULTS:
            setattr(cfg, name, _DEFAULTS[name])
    if not (0.0 < cfg.scale <= 1.0):
        raise ValueError(f"--scale must lie in (0, 1], got {cfg.scale!r}")
    cfg.quadrature()  # validates the tolerances
    return cfg


def _require(cfg: RunConfig, *names: str) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            raise ValueError(f"--{name} is required for '{cfg.command}'")


# -- update ------------------------------------------------------------------


def cmd_update(cfg: RunConfig) -> int:
    _require(cfg, "polls", "store")
    records = load_poll_file(cfg.polls)
    if cfg.pollster is not None:
        records = [r for r in records if r.pollster == cfg.pollster]
    if not records:
        raise ValueError("no matching poll records")
    chains: dict[tuple, list] = {}
    for rec in records:
        chains.setdefault((rec.pollster, rec.round, rec.scenario_key), []).append(rec)
    entries: list[StoreEntry] = []
    for (pollster, rnd, scenario), recs in chains.items():
        recs = sorted(recs, key=lambda r: r.date)
        layout = layout_from_record(recs[0])
        post = noninformative_prior(layout, cfg.prior, pollster=pollster)
        for k, rec in enumerate(recs):
            if k > 0:
                post = scale_forward(post, cfg.scale)
            post = update(post, to_observation(rec, layout))
            entries.append(StoreEntry(
                pollster=pollster,
                date=rec.date,
                round=rnd,
                scenario=scenario,
                w=cfg.scale,
                posterior=post,
            ))
    entries.sort(key=lambda e: (e.pollster, e.round.value, e.scenario or (), e.date))
    save_store(cfg.store, entries)
    print(f"wrote {len(entries)} snapshots across {len(chains)} chains to {cfg.store}")
    return EXIT_OK


# -- report machinery ---------------------------------------------------------


def _grouped(entries: Sequence[StoreEntry], pollster: Optional[str]):
    if pollster is not None:
        entries = [e for e in entries if e.pollster == pollster]
    groups: dict[str, list[StoreEntry]] = {}
    for e in entries:
        groups.setdefault(e.pollster, []).append(e)
    if not groups:
        raise ValueError("store holds no matching entries")
    return dict(sorted(groups.items()))


def _reports_for(
    entries: Sequence[StoreEntry],
    spec: QuadratureSpec,
    fallback: str,
) -> list[ElectionReport]:
    firsts = sorted((e for e in entries if e.round is Round.FIRST), key=lambda e: e.date)
    if not firsts:
        raise ValueError("store holds no first-round chain for this pollster")
    seconds: dict[tuple[str, str], list[StoreEntry]] = {}
    for e in entries:
        if e.round is Round.SECOND:
            seconds.setdefault(pair_key(*e.scenario), []).append(e)
    for snaps in seconds.values():
        snaps.sort(key=lambda e: e.date)
    reports = []
    for e in firsts:
        table = {}
        for key, snaps in seconds.items():
            usable = [s for s in snaps if s.date <= e.date]
            if usable:
                table[key] = usable[-1].posterior
        reports.append(
            full_report(e.posterior, ScenarioTable(table), spec, fallback, date=e.date)
        )
    return reports


def _fmt(value: float) -> str:
    return format(value, ".10g")


def _top2_rows(reports: Sequence[ElectionReport]) -> list[str]:
    rows = ["date,pair,p_top2"]
    for rep in reports:
        for pair in sorted(rep.p_top2):
            rows.append(f"{rep.date.isoformat()},{pair[0]}|{pair[1]},{_fmt(rep.p_top2[pair])}")
    return rows


def _elected_rows(reports: Sequence[ElectionReport]) -> list[str]:
    rows = ["date,candidate,p_elected"]
    for rep in reports:
        for label in sorted(rep.p_elected):
            rows.append(f"{rep.date.isoformat()},{label},{_fmt(rep.p_elected[label])}")
    return rows


def _warn_report(rep: ElectionReport) -> None:
    for failure in rep.failures:
        print(f"warning: {rep.pollster} {rep.date}: {failure}", file=sys.stderr)
    if rep.missing_scenarios:
        pairs = ", ".join("|".join(p) for p in rep.missing_scenarios)
        print(
            f"note: {rep.pollster} {rep.date}: no polled scenario for {pairs}; "
            f"fallback={rep.fallback}",
            file=sys.stderr,
        )


def cmd_report(cfg: RunConfig) -> int:
    _require(cfg, "store", "out")
    groups = _grouped(load_store(cfg.store), cfg.pollster)
    spec = cfg.quadrature()
    any_failure = False
    cfg.out.mkdir(parents=True, exist_ok=True)
    for pollster, entries in groups.items():
        reports = _reports_for(entries, spec, cfg.fallback)
        for rep in reports:
            _warn_report(rep)
            any_failure = any_failure or bool(rep.failures)
        (cfg.out / f"{pollster}_top2.csv").write_text(
            "\n".join(_top2_rows(reports)) + "\n", encoding="utf-8"
        )
        (cfg.out / f"{pollster}_elected.csv").write_text(
            "\n".join(_elected_rows(reports)) + "\n", encoding="utf-8"
        )
        if cfg.charts:
            from .charts import write_series_chart

            top2_series = {}
            elected_series = {}
            for rep in reports:
                for pair, v in rep.p_top2.items():
                    top2_series.setdefault("|".join(pair), []).append((rep.date, v))
                for label, v in rep.p_elected.items():
                    elected_series.setdefault(label, []).append((rep.date, v))
            write_series_chart(
                cfg.out / f"{pollster}_top2.svg", top2_series,
                f"{pollster}: pair in the runoff", "probability",
            )
            write_series_chart(
                cfg.out / f"{pollster}_elected.svg", elected_series,
                f"{pollster}: elected", "probability",
            )
    return EXIT_NUMERIC if any_failure else EXIT_OK


def _single_report(cfg: RunConfig) -> ElectionReport:
    groups = _grouped(load_store(cfg.store), cfg.pollster)
    if len(groups) != 1:
        raise ValueError(
            f"store holds {len(groups)} pollsters ({', '.join(groups)}); pick one with --pollster"
        )
    (entries,) = groups.values()
    reports = _reports_for(entries, cfg.quadrature(), cfg.fallback)
    if cfg.date is None:
        return reports[-1]
    for rep in reports:
        if rep.date == cfg.date:
            return rep
    raise ValueError(f"no first-round poll on {cfg.date.isoformat()}")


def cmd_elect(cfg: RunConfig) -> int:
    _require(cfg, "store")
    rep = _single_report(cfg)
    _warn_report(rep)
    print("\n".join(_elected_rows([rep])))
    return EXIT_NUMERIC if rep.failures else EXIT_OK


def cmd_top2(cfg: RunConfig) -> int:
    _require(cfg, "store")
    rep = _single_report(cfg)
    _warn_report(rep)
    print("\n".join(_top2_rows([rep])))
    return EXIT_NUMERIC if rep.failures else EXIT_OK


# -- oracle -------------------------------------------------------------------


def _row_seed(base: int, kernel: str, args: str) -> int:
    digest = hashlib.blake2b(f"{base}:{kernel}:{args}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def cmd_oracle(cfg: RunConfig) -> int:
    _require(cfg, "store", "out")
    if cfg.draws < MIN_ORACLE_DRAWS:
        raise ValueError(f"--draws must be at least {MIN_ORACLE_DRAWS}")
    groups = _grouped(load_store(cfg.store), cfg.pollster)
    if len(groups) != 1:
        raise ValueError(
            f"store holds {len(groups)} pollsters ({', '.join(groups)}); pick one with --pollster"
        )
    ((pollster, entries),) = groups.items()
    spec = cfg.quadrature()
    firsts = sorted((e for e in entries if e.round is Round.FIRST), key=lambda e: e.date)
    if not firsts:
        raise ValueError("store holds no first-round chain for this pollster")
    latest = firsts[-1]
    post1 = latest.posterior
    layout = post1.layout
    rows = ["kernel,args,quadrature,oracle,std_error,z"]
    worst = 0.0

    def emit(kernel: str, args: str, quad: float, est) -> None:
        nonlocal worst
        z = zscore(quad, est)
        worst = max(worst, abs(z))
        rows.append(
            f"{kernel},{args},{_fmt(quad)},{_fmt(est.estimate)},{_fmt(est.std_error)},"
            f"{format(z, '.6g')}"
        )

    for i in layout.candidate_indices:
        args_s = layout.labels[i]
        emit("majority", args_s,
             prob_majority(post1, i, spec),
             mc_majority(post1, i, cfg.draws, _row_seed(cfg.seed, "majority", args_s)))
    cands = layout.candidate_indices
    for a_pos, i in enumerate(cands):
        for j in cands[a_pos + 1 :]:
            args_s = f"{layout.labels[i]}|{layout.labels[j]}"
            emit("pair_top2", args_s,
                 prob_pair_top2(post1, i, j, spec),
                 mc_pair_top2(post1, i, j, cfg.draws,
                              _row_seed(cfg.seed, "pair_top2", args_s)))
    seconds: dict[tuple[str, str], StoreEntry] = {}
    for e in sorted((e for e in entries if e.round is Round.SECOND), key=lambda e: e.date):
        if e.date <= latest.date:
            seconds[pair_key(*e.scenario)] = e
    for key, e in sorted(seconds.items()):
        post2 = e.posterior
        i = post2.layout.index_of(key[0])
        j = post2.layout.index_of(key[1])
        args_s = f"{key[0]}|{key[1]}"
        emit("beats", args_s,
             prob_beats(post2, i, j, spec),
             mc_beats(post2, i, j, cfg.draws, _row_seed(cfg.seed, "beats", args_s)))

    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / f"{pollster}_oracle.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"max |z| = {format(worst, '.6g')} over {len(rows) - 1} kernels")
    return EXIT_ORACLE if worst > 4.0 else EXIT_OK


_HANDLERS = {
    "update": cmd_update,
    "report": cmd_report,
    "elect": cmd_elect,
    "top2": cmd_top2,
    "oracle": cmd_oracle,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        return _HANDLERS[cfg.command](cfg)
    except PollFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FileNotFoundError, NotADirectoryError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
