"""Email metadata ingestion.

Reads the metadata CSV layout::

    msg_id,from,to,cc,bcc,timestamp,subject_len,text_size,attach_size[,email_size]

Multi-address fields are ``;``-separated, timestamps are RFC-3339.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import (
    BadTimestamp, IngestError, IoFailure, MalformedRow, NegativeSize, OverlappingGroups,
)

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = (
    "msg_id", "from", "to", "cc", "bcc", "timestamp",
    "subject_len", "text_size", "attach_size",
)
OPTIONAL_COLUMNS = ("email_size",)
SIZE_FIELDS = ("subject_len", "text_size", "attach_size", "email_size")


def normalize_address(addr: str) -> str:
    return addr.strip().lower()


def split_addresses(field_value: str) -> list[str]:
    out = []
    for part in field_value.split(";"):
        part = normalize_address(part)
        if part:
            out.append(part)
    return out


@dataclass(frozen=True)
class EmailRecord:
    msg_id: str
    sender: str
    recipients: tuple[str, ...]
    timestamp: datetime
    subject_len: int
    text_size: int
    attach_size: int
    email_size: int

    @property
    def participants(self) -> tuple[str, ...]:
        seen = dict.fromkeys((self.sender, *self.recipients))
        return tuple(seen)


@dataclass(frozen=True)
class HostSet:
    accounts: frozenset[str]
    owner_label: str | None = None

    def __post_init__(self):
        accounts = frozenset(normalize_address(a) for a in self.accounts if a.strip())
        if not accounts:
            raise ValueError("host set must contain at least one account")
        object.__setattr__(self, "accounts", accounts)

    @classmethod
    def of(cls, *accounts: str, label: str | None = None) -> "HostSet":
        return cls(frozenset(accounts), label)

    @property
    def label(self) -> str:
        return self.owner_label or ";".join(sorted(self.accounts))

    def __contains__(self, addr: str) -> bool:
        return addr in self.accounts


@dataclass
class Corpus:
    records: list[EmailRecord]
    address_index: dict[str, int] = field(default_factory=dict)
    provenance: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.records)


def build_address_index(records: Iterable[EmailRecord]) -> dict[str, int]:
    """Dense IDs in sorted-address order, so the index is independent of file order."""
    addrs = set()
    for rec in records:
        addrs.update(rec.participants)
    return {a: i for i, a in enumerate(sorted(addrs))}


def parse_timestamp(text: str) -> datetime:
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        raise ValueError("timestamp has no UTC offset")
    return ts.replace(microsecond=0)


def parse_record(
    row: Sequence[str] | str,
    schema: Sequence[str],
    row_number: int = 0,
    include_bcc: bool = True,
) -> EmailRecord:
    """Parse one CSV row (already split, or a raw line) laid out per ``schema``."""
    if isinstance(row, str):
        row = next(csv.reader([row]))
    if len(row) != len(schema):
        raise MalformedRow(
            row_number, "*", f"expected {len(schema)} columns, got {len(row)}"
        )
    values = dict(zip(schema, row))

    sender = normalize_address(values["from"])
    if not sender:
        raise MalformedRow(row_number, "from", "empty sender")

    recip_fields = ["to", "cc"] + (["bcc"] if include_bcc else [])
    recipients: dict[str, None] = {}
    for name in recip_fields:
        for addr in split_addresses(values.get(name, "")):
            recipients.setdefault(addr)
    if not recipients:
        raise MalformedRow(row_number, "to", "no recipients")

    try:
        ts = parse_timestamp(values["timestamp"])
    except ValueError as exc:
        raise BadTimestamp(row_number, "timestamp", str(exc)) from None

    sizes = {}
    for name in SIZE_FIELDS:
        raw = (values.get(name) or "").strip()
        if name == "email_size" and raw == "":
            continue
        try:
            n = int(raw)
        except ValueError:
            raise MalformedRow(row_number, name, f"not an integer: {raw!r}") from None
        if n < 0:
            raise NegativeSize(row_number, name, f"negative size {n}")
        sizes[name] = n
    if "email_size" not in sizes:
        sizes["email_size"] = sizes["subject_len"] + sizes["text_size"] + sizes["attach_size"]
    if sizes["email_size"] < sizes["attach_size"]:
        raise MalformedRow(row_number, "email_size", "email_size smaller than attach_size")

    msg_id = values["msg_id"].strip()
    if not msg_id:
        raise MalformedRow(row_number, "msg_id", "empty msg_id")

    return EmailRecord(
        msg_id=msg_id,
        sender=sender,
        recipients=tuple(recipients),
        timestamp=ts,
        **sizes,
    )


def read_records(path: str | Path, include_bcc: bool = True) -> list[EmailRecord]:
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(str(path), str(exc)) from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        schema = [h.strip().lower() for h in header]
        missing = [c for c in REQUIRED_COLUMNS if c not in schema]
        if missing:
            raise MalformedRow(1, ",".join(missing), "missing header columns")
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                records.append(parse_record(row, schema, lineno, include_bcc))
            except IngestError as exc:
                exc.source = str(path)
                raise
    return records


def load_corpus(paths: Sequence[str | Path], include_bcc: bool = True) -> Corpus:
    """Concatenate CSV files; duplicate msg_ids keep the first occurrence."""
    records: list[EmailRecord] = []
    seen: set[str] = set()
    for path in paths:
        for rec in read_records(path, include_bcc):
            if rec.msg_id in seen:
                logger.warning("duplicate msg_id %s in %s ignored", rec.msg_id, path)
                continue
            seen.add(rec.msg_id)
            records.append(rec)
    return Corpus(records, build_address_index(records), [str(p) for p in paths])


def write_records(records: Iterable[EmailRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REQUIRED_COLUMNS + OPTIONAL_COLUMNS)
        for r in records:
            writer.writerow([
                r.msg_id, r.sender, ";".join(r.recipients), "", "",
                r.timestamp.isoformat(), r.subject_len, r.text_size,
                r.attach_size, r.email_size,
            ])


def _domain(addr: str) -> str:
    return addr.rpartition("@")[2]


def filter_personalized(
    corpus: Corpus | Sequence[EmailRecord],
    host: HostSet,
    allow_domains: Iterable[str] | None = None,
) -> list[EmailRecord]:
    """Keep the records whose header mentions a host account.

    With ``allow_domains``, non-host participants outside those domains are
    stripped from each kept record; a record whose sender is stripped, or
    that is left without recipients, is dropped.
    """
    records = corpus.records if isinstance(corpus, Corpus) else corpus
    out = []
    for rec in records:
        if rec.sender not in host and not any(r in host for r in rec.recipients):
            continue
        if allow_domains is not None:
            rec = _restrict_domains(rec, host, set(allow_domains))
            if rec is None:
                continue
        out.append(rec)
    return out


def _restrict_domains(rec: EmailRecord, host: HostSet, domains: set[str]) -> EmailRecord | None:
    def keep(a: str) -> bool:
        return a in host or _domain(a) in domains

    if not keep(rec.sender):
        return None
    recipients = tuple(a for a in rec.recipients if keep(a))
    if not recipients:
        return None
    if recipients == rec.recipients:
        return rec
    return EmailRecord(
        rec.msg_id, rec.sender, recipients, rec.timestamp, rec.subject_len,
        rec.text_size, rec.attach_size, rec.email_size,
    )


def merge_personalized(record_lists: Iterable[Sequence[EmailRecord]]) -> list[EmailRecord]:
    """Union of per-host personalized sets, one copy per msg_id, order preserved."""
    seen = set()
    out = []
    for records in record_lists:
        for rec in records:
            if rec.msg_id not in seen:
                seen.add(rec.msg_id)
                out.append(rec)
    return out


def load_aliases(path: str | Path) -> dict[str, list[str]]:
    """Read ``label = addr1;addr2`` lines. Blank lines and ``#`` comments are skipped."""
    aliases: dict[str, list[str]] = {}
    owner: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(str(path), str(exc)) from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        label, sep, addrs = line.partition("=")
        label = label.strip()
        if not sep or not label:
            raise MalformedRow(lineno, "alias", f"expected 'label = addr;addr', got {line!r}")
        members = split_addresses(addrs)
        if not members:
            raise MalformedRow(lineno, "alias", f"no addresses for {label!r}")
        for a in members:
            if a in owner and owner[a] != label:
                raise OverlappingGroups(f"{a} listed under both {owner[a]!r} and {label!r}")
            owner[a] = label
        aliases.setdefault(label, [])
        aliases[label].extend(a for a in members if a not in aliases[label])
    return aliases


def resolve_hosts(specs: Sequence[str], aliases: Mapping[str, Sequence[str]] | None = None) -> list[HostSet]:
    """Turn host tokens (alias labels or raw addresses) into HostSets."""
    aliases = aliases or {}
    hosts = []
    for token in specs:
        token = token.strip()
        if not token:
            continue
        if token in aliases:
            hosts.append(HostSet(frozenset(aliases[token]), token))
        else:
            accounts = split_addresses(token)
            hosts.append(HostSet(frozenset(accounts), token if len(accounts) > 1 else None))
    return hosts
