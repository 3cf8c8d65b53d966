"""Poll-file parsing, count conversion, and the posterior store format.

One line grammar serves the three file kinds (UTF-8; full-line comments
start with '#'; blank lines are skipped)::

    pollster  date  round  scenario  N  label=value [label=value ...]

    pollster   token without whitespace
    date       ISO YYYY-MM-DD
    round      'first' | 'second'
    scenario   '-' for first round, 'labelA,labelB' for second round
    N          poll/observation lines: the reported sample size (integer);
               store lines: the scale factor w applied between polls
    label=value  one pair per category, in layout order

The value column distinguishes the kinds:

* poll files carry published percentages (0-100); the category 'blank'
  must be present and 'undecided' may be, the latter being dropped when
  converting to counts;
* observation lines carry integer counts (used to round-trip converted
  observations exactly);
* store lines carry Dirichlet alphas at full float precision plus one
  reserved trailing pair ``provenance=id;id;...`` naming the polls folded
  into the chain.

'blank' is a reserved label naming the blank-vote category in every file;
'undecided' and 'provenance' are reserved keys and never name categories.
"""

from __future__ import annotations

import datetime as dt
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .model import (
    CategoryLayout,
    DirichletPosterior,
    PollObservation,
    Round,
    scenario_layout,
)

BLANK = "blank"
UNDECIDED = "undecided"
PROVENANCE = "provenance"
PERCENT_SUM_TOL = 1.5


class PollFileError(ValueError):
    """Parse or consistency failure, located by file and line."""

    def __init__(self, path, lineno: Optional[int], message: str):
        where = f"{path}:{lineno}" if lineno is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class RawPollRecord:
    """A published poll: percentages per category plus the sample size."""

    pollster: str
    date: dt.date
    round: Round
    scenario: Optional[tuple[str, str]]
    sample_size: int
    percentages: Mapping[str, float]

    def __post_init__(self) -> None:
        if self.sample_size <= 0:
            raise ValueError("sample size must be positive")
        if (self.round is Round.SECOND) != (self.scenario is not None):
            raise ValueError("scenario required iff round is 'second'")
        if not self.percentages:
            raise ValueError("a record needs at least one category")
        for label, pct in self.percentages.items():
            if label == PROVENANCE:
                raise ValueError(f"{PROVENANCE!r} is reserved and cannot name a category")
            if not (math.isfinite(pct) and 0.0 <= pct <= 100.0):
                raise ValueError(f"percentage for {label!r} outside [0, 100]: {pct!r}")
        total = sum(self.percentages.values())
        if abs(total - 100.0) > PERCENT_SUM_TOL:
            raise ValueError(
                f"percentages sum to {total:g}, outside 100 +/- {PERCENT_SUM_TOL}"
            )
        if self.scenario is not None:
            a, b = self.scenario
            if a == b:
                raise ValueError("scenario candidates must differ")
            for label in (a, b):
                if label in (BLANK, UNDECIDED):
                    raise ValueError(f"{label!r} cannot be a scenario candidate")
                if label not in self.percentages:
                    raise ValueError(f"scenario candidate {label!r} has no percentage")

    @property
    def scenario_key(self) -> Optional[tuple[str, str]]:
        if self.scenario is None:
            return None
        a, b = self.scenario
        return (a, b) if a < b else (b, a)


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5))


def layout_from_record(raw: RawPollRecord) -> CategoryLayout:
    """Layout implied by a record: its categories minus 'undecided'."""
    if raw.round is Round.SECOND:
        return scenario_layout(*raw.scenario)
    labels = tuple(label for label in raw.percentages if label != UNDECIDED)
    if BLANK not in labels:
        raise ValueError(f"record has no {BLANK!r} category")
    return CategoryLayout.from_labels(labels, BLANK)


def to_observation(raw: RawPollRecord, layout: CategoryLayout) -> PollObservation:
    """Convert published percentages into a count vector over the layout.

    Each category count is sample_size * pct / 100 rounded half away from
    zero, independently per category and never reconciled afterwards;
    'undecided' contributes no count at all.
    """
    if layout.blank_label not in raw.percentages:
        raise ValueError(f"record is missing the {layout.blank_label!r} category")
    for label in raw.percentages:
        if label == UNDECIDED:
            continue
        if label not in layout.labels:
            raise ValueError(f"unknown category label {label!r} for this layout")
    if raw.round is Round.SECOND and set(layout.candidate_labels) != set(raw.scenario):
        raise ValueError("layout candidates do not match the record's scenario")
    counts = tuple(
        _round_half_away(raw.percentages.get(label, 0.0) / 100.0 * raw.sample_size)
        for label in layout.labels
    )
    return PollObservation(
        pollster=raw.pollster,
        date=raw.date,
        round=raw.round,
        scenario=raw.scenario,
        counts=counts,
        sample_size_reported=raw.sample_size,
        layout=layout,
    )


def _split_pairs(tokens: Sequence[str]) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or not key:
            raise ValueError(f"expected label=value, got {tok!r}")
        if key in pairs:
            raise ValueError(f"duplicate label {key!r}")
        pairs[key] = value
    return pairs


def _parse_head(parts: Sequence[str]):
    if len(parts) < 6:
        raise ValueError("expected: pollster date round scenario N label=value ...")
    pollster, date_s, round_s, scen_s = parts[:4]
    try:
        date = dt.date.fromisoformat(date_s)
    except ValueError:
        raise ValueError(f"bad date {date_s!r}, expected YYYY-MM-DD") from None
    try:
        rnd = Round(round_s)
    except ValueError:
        raise ValueError(f"bad round {round_s!r}, expected 'first' or 'second'") from None
    if scen_s == "-":
        scenario = None
    else:
        pieces = scen_s.split(",")
        if len(pieces) != 2 or not all(pieces):
            raise ValueError(f"bad scenario {scen_s!r}, expected 'labelA,labelB' or '-'")
        scenario = (pieces[0], pieces[1])
    return pollster, date, rnd, scenario


def parse_poll_line(line: str) -> RawPollRecord:
    parts = line.split()
    pollster, date, rnd, scenario = _parse_head(parts)
    try:
        sample_size = int(parts[4])
    except ValueError:
        raise ValueError(f"bad sample size {parts[4]!r}") from None
    pairs = _split_pairs(parts[5:])
    percentages = {}
    for label, value in pairs.items():
        try:
            percentages[label] = float(value)
        except ValueError:
            raise ValueError(f"bad percentage for {label!r}: {value!r}") from None
    return RawPollRecord(
        pollster=pollster,
        date=date,
        round=rnd,
        scenario=scenario,
        sample_size=sample_size,
        percentages=percentages,
    )


def _content_lines(path):
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def load_poll_file(path) -> list[RawPollRecord]:
    """All records of a poll file, in file order; duplicates rejected."""
    records: list[RawPollRecord] = []
    seen: set = set()
    for lineno, line in _content_lines(path):
        try:
            rec = parse_poll_line(line)
        except ValueError as exc:
            raise PollFileError(path, lineno, str(exc)) from None
        key = (rec.pollster, rec.date, rec.round, rec.scenario_key)
        if key in seen:
            raise PollFileError(path, lineno, f"duplicate record for {key!r}")
        seen.add(key)
        records.append(rec)
    return records


# -- exact observation round-trips -----------------------------------------


def observation_to_line(obs: PollObservation) -> str:
    """Serialize counts in the shared grammar (values are integers)."""
    if obs.layout.blank_label != BLANK:
        raise ValueError(f"the file formats reserve the label {BLANK!r} for the blank category")
    scen = "-" if obs.scenario is None else ",".join(obs.scenario)
    kvs = (f"{label}={c}" for label, c in zip(obs.layout.labels, obs.counts))
    return " ".join(
        [obs.pollster, obs.date.isoformat(), obs.round.value, scen,
         str(obs.sample_size_reported), *kvs]
    )


def observation_from_line(line: str) -> PollObservation:
    parts = line.split()
    pollster, date, rnd, scenario = _parse_head(parts)
    sample_size = int(parts[4])
    pairs = _split_pairs(parts[5:])
    labels = tuple(pairs)
    counts = tuple(int(v) for v in pairs.values())
    layout = CategoryLayout.from_labels(labels, BLANK)
    return PollObservation(
        pollster=pollster,
        date=date,
        round=rnd,
        scenario=scenario,
        counts=counts,
        sample_size_reported=sample_size,
        layout=layout,
    )


# -- posterior store --------------------------------------------------------

STORE_HEADER = (
    "# posterior store\n"
    "# pollster date round scenario w label=alpha ... provenance=id;id;...\n"
)


@dataclass(frozen=True)
class StoreEntry:
    """One chain snapshot: the posterior right after folding a poll."""

    pollster: str
    date: dt.date
    round: Round
    scenario: Optional[tuple[str, str]]
    w: float
    posterior: DirichletPosterior

    def key(self):
        return (self.pollster, self.round.value, self.scenario or ())


def store_entry_to_line(entry: StoreEntry) -> str:
    layout = entry.posterior.layout
    if layout.blank_label != BLANK:
        raise ValueError(f"the store format reserves the label {BLANK!r} for the blank category")
    scen = "-" if entry.scenario is None else ",".join(entry.scenario)
    kvs = [f"{label}={a!r}" for label, a in zip(layout.labels, entry.posterior.alpha)]
    kvs.append(f"{PROVENANCE}={';'.join(entry.posterior.provenance)}")
    return " ".join(
        [entry.pollster, entry.date.isoformat(), entry.round.value, scen, repr(entry.w), *kvs]
    )


def store_entry_from_line(line: str) -> StoreEntry:
    parts = line.split()
    pollster, date, rnd, scenario = _parse_head(parts)
    try:
        w = float(parts[4])
    except ValueError:
        raise ValueError(f"bad scale factor {parts[4]!r}") from None
    pairs = _split_pairs(parts[5:])
    provenance = tuple(p for p in pairs.pop(PROVENANCE, "").split(";") if p)
    labels = tuple(pairs)
    alpha = tuple(float(v) for v in pairs.values())
    layout = CategoryLayout.from_labels(labels, BLANK)
    posterior = DirichletPosterior(
        layout=layout, alpha=alpha, provenance=provenance, pollster=pollster
    )
    return StoreEntry(
        pollster=pollster, date=date, round=rnd, scenario=scenario, w=w, posterior=posterior
    )


def save_store(path, entries: Sequence[StoreEntry]) -> None:
    """Write the store atomically (write-then-rename); no timestamps."""
    path = Path(path)
    payload = STORE_HEADER + "".join(store_entry_to_line(e) + "\n" for e in entries)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_store(path) -> list[StoreEntry]:
    entries: list[StoreEntry] = []
    for lineno, line in _content_lines(path):
        try:
            entries.append(store_entry_from_line(line))
        except ValueError as exc:
            raise PollFileError(path, lineno, str(exc)) from None
    return entries
