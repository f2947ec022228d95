"""Communication patterns of interest (CPIs).

Every email is reduced to a vector of five tag IDs, one per attribute, by
equal-width binning of the size fields and a time-of-day slice table for the
timestamp. A user's influential CPI is the per-attribute mode over the CPIs
of the emails they take part in.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, time
from pathlib import Path
from typing import Mapping, NamedTuple, Sequence
from zoneinfo import ZoneInfo

from .errors import ConfigError, EmptyCpiList, MissingCpiForVertex, UnknownUser
from .graph import PiNet, with_cpis
from .ingest import EmailRecord

ATTRIBUTES = ("SubLen", "TxtSize", "EmailSize", "AttachSize", "Time")
NUMERIC_FIELDS = {
    "SubLen": "subject_len",
    "TxtSize": "text_size",
    "EmailSize": "email_size",
    "AttachSize": "attach_size",
}
DEFAULT_BINS = 5

# (label, start, end); end may wrap past midnight
DEFAULT_CTS = (
    ("morning", "05:00", "12:00"),
    ("afternoon", "12:00", "17:00"),
    ("evening", "17:00", "21:00"),
    ("night", "21:00", "05:00"),
)

_FIVE_LABELS = ("very-low", "low", "medium", "high", "very-high")


class Cpi(NamedTuple):
    sublen: int
    txtsize: int
    emailsize: int
    attachsize: int
    time: int


@dataclass(frozen=True)
class InfluentialCpi:
    values: Cpi
    support: tuple[int, ...]


def _minutes(hhmm: str) -> int:
    t = time.fromisoformat(hhmm)
    return t.hour * 60 + t.minute


@dataclass(frozen=True)
class CtsTable:
    slots: tuple[tuple[str, int, int], ...]  # label, start minute, end minute

    @classmethod
    def from_spec(cls, table: Sequence[Sequence[str]] = DEFAULT_CTS) -> "CtsTable":
        slots = []
        try:
            for label, start, end in table:
                slots.append((str(label), _minutes(start), _minutes(end)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad cts_table entry: {exc}") from None
        cts = cls(tuple(slots))
        cts._validate()
        return cts

    def _validate(self) -> None:
        cover = [0] * 1440
        for _, start, end in self.slots:
            m = start
            while True:
                cover[m] += 1
                m = (m + 1) % 1440
                if m == end:
                    break
        if any(c != 1 for c in cover):
            raise ConfigError("cts_table slots must cover the day exactly once")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s[0] for s in self.slots)

    def slot_of(self, minute_of_day: int) -> int:
        """1-based slot ID for a minute in [0, 1440)."""
        for i, (_, start, end) in enumerate(self.slots, start=1):
            if start < end:
                if start <= minute_of_day < end:
                    return i
            elif minute_of_day >= start or minute_of_day < end:
                return i
        raise AssertionError("validated table covers every minute")


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    bin_count: int
    bounds: tuple[float, float] = (0, 0)
    labels: tuple[str, ...] = ()
    cts: CtsTable | None = None
    timezone: str | None = None

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(range(1, self.bin_count + 1))

    @property
    def is_time(self) -> bool:
        return self.cts is not None

    @property
    def width(self) -> float:
        lo, hi = self.bounds
        return (hi - lo) / self.bin_count

    @property
    def boundaries(self) -> list[float]:
        lo, hi = self.bounds
        if self.bin_count == 1:
            return [lo, hi]
        return [lo + i * (hi - lo) / self.bin_count for i in range(self.bin_count)] + [hi]

    def interval(self, tag_id: int) -> tuple[float, float]:
        """Real-space range of a numeric bin (reverse of the mapping)."""
        b = self.boundaries
        return b[tag_id - 1], b[tag_id]

    def label(self, tag_id: int) -> str:
        return self.labels[tag_id - 1]


def _numeric_labels(n: int) -> tuple[str, ...]:
    if n == len(_FIVE_LABELS):
        return _FIVE_LABELS
    return tuple(f"bin-{i}" for i in range(1, n + 1))


def time_spec(cts: CtsTable | None = None, timezone: str | None = None) -> AttributeSpec:
    cts = cts or CtsTable.from_spec()
    if timezone:
        ZoneInfo(timezone)  # fail early on unknown zones
    return AttributeSpec("Time", len(cts.slots), labels=cts.labels, cts=cts, timezone=timezone)


def numeric_spec(name: str, values: Sequence[float], bin_count: int) -> AttributeSpec:
    if bin_count < 2:
        raise ValueError("bin_count must be at least 2")
    lo, hi = min(values), max(values)
    if lo == hi:
        return AttributeSpec(name, 1, (lo, hi), ("constant",))
    return AttributeSpec(name, bin_count, (lo, hi), _numeric_labels(bin_count))


def fit_attribute_specs(
    records: Sequence[EmailRecord],
    bin_count: int | Mapping[str, int] = DEFAULT_BINS,
    cts: CtsTable | None = None,
    timezone: str | None = None,
) -> list[AttributeSpec]:
    """Equal-width bins over the observed range of each size attribute, plus the Time spec."""
    if not records:
        raise ValueError("cannot fit attribute specs on an empty record list")
    specs = []
    for name, fld in NUMERIC_FIELDS.items():
        n = bin_count if isinstance(bin_count, int) else bin_count.get(name, DEFAULT_BINS)
        specs.append(numeric_spec(name, [getattr(r, fld) for r in records], n))
    specs.append(time_spec(cts, timezone))
    return specs


def discretize(value, spec: AttributeSpec) -> int:
    if spec.is_time:
        ts: datetime = value
        if spec.timezone:
            ts = ts.astimezone(ZoneInfo(spec.timezone))
        return spec.cts.slot_of(ts.hour * 60 + ts.minute)
    if spec.bin_count == 1:
        return 1
    lo, hi = spec.bounds
    # integer arithmetic keeps bin edges exact for integer sizes
    idx = (value - lo) * spec.bin_count // (hi - lo)
    return int(min(max(idx + 1, 1), spec.bin_count))


def email_cpi(rec: EmailRecord, specs: Sequence[AttributeSpec]) -> Cpi:
    values = []
    for spec in specs:
        raw = rec.timestamp if spec.is_time else getattr(rec, NUMERIC_FIELDS[spec.name])
        values.append(discretize(raw, spec))
    return Cpi(*values)


def extract_cpis(
    net: PiNet,
    records: Sequence[EmailRecord],
    user: int,
    specs: Sequence[AttributeSpec],
    outgoing_only: bool = False,
) -> list[Cpi]:
    """One CPI per email in which ``user`` (any of its member addresses) takes part."""
    if not 0 <= user < net.n:
        raise UnknownUser(f"vertex {user} not in graph")
    members = net.members(user)
    out = []
    for rec in records:
        if rec.sender in members or (
            not outgoing_only and any(r in members for r in rec.recipients)
        ):
            out.append(email_cpi(rec, specs))
    return out


def influential_cpi(cpis: Sequence[Sequence[int]]) -> InfluentialCpi:
    """Per-attribute modal tag.

    A tie between tags is settled by how often the most common complete CPI
    carrying each tied tag occurs; remaining ties go to the lowest tag ID.
    """
    if not cpis:
        raise EmptyCpiList("no CPIs to reduce")
    cpis = [tuple(c) for c in cpis]
    full = Counter(cpis)
    values, support = [], []
    for i in range(len(cpis[0])):
        counts = Counter(c[i] for c in cpis)
        top = max(counts.values())
        tied = [t for t, c in counts.items() if c == top]
        if len(tied) > 1:
            def backing(tag, i=i):
                return max(n for vec, n in full.items() if vec[i] == tag)

            tied.sort(key=lambda t: (-backing(t), t))
        values.append(tied[0])
        support.append(top)
    return InfluentialCpi(Cpi(*values), tuple(support))


def annotate_graph(net: PiNet, per_user: Mapping[int, InfluentialCpi | Sequence[int]]) -> PiNet:
    missing = [v for v in net.vertices() if v not in per_user]
    if missing:
        raise MissingCpiForVertex(f"no influential CPI for vertices {missing[:10]}")
    vecs = {}
    for v in net.vertices():
        item = per_user[v]
        vecs[v] = tuple(item.values if isinstance(item, InfluentialCpi) else item)
    return with_cpis(net, vecs)


def annotate(
    net: PiNet,
    records: Sequence[EmailRecord],
    specs: Sequence[AttributeSpec],
    outgoing_only: bool = False,
) -> tuple[PiNet, dict[int, InfluentialCpi]]:
    """Extract and reduce CPIs for every vertex and attach them to the graph.

    Under ``outgoing_only`` a vertex that never sent an email falls back to all
    the emails it appears in, since it would otherwise have no CPI at all.
    """
    per_user = {}
    for v in net.vertices():
        cpis = extract_cpis(net, records, v, specs, outgoing_only)
        if not cpis and outgoing_only:
            cpis = extract_cpis(net, records, v, specs)
        if not cpis:
            raise MissingCpiForVertex(f"vertex {v} ({net.address(v)}) appears in no record")
        per_user[v] = influential_cpi(cpis)
    return annotate_graph(net, per_user), per_user


def write_cpis(net: PiNet, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user", "sublen_id", "txtsize_id", "emailsize_id", "attachsize_id", "time_id"])
        for v in net.vertices():
            w.writerow([net.address(v), *net.cpi(v)])
