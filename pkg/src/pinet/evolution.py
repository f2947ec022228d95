"""How coverage and communities shift as more accounts are added."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .errors import DisjointVertexSets, UniverseTooSmall
from .graph import PiNet
from .quality import NetworkStats


@dataclass(frozen=True)
class AccountCoverage:
    account: str
    distinct_contacts: int
    local_pct: float
    global_pct: float
    incremental_gain: int


@dataclass
class CoverageReport:
    per_account: list[AccountCoverage]
    union_size: int
    universe_size: int
    overlap_size: int

    @property
    def union_pct(self) -> float:
        return 100.0 * self.union_size / self.universe_size if self.universe_size else 0.0

    def as_dict(self) -> dict:
        return {
            "per_account": [asdict(a) for a in self.per_account],
            "union_size": self.union_size,
            "universe_size": self.universe_size,
            "overlap_size": self.overlap_size,
            "union_pct": self.union_pct,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def table(self) -> str:
        """Plain-text table with the Account Owner / Network Coverage layout."""
        rows = [("Account Owner", "Contacts", "New", "Network Coverage")]
        for a in self.per_account:
            rows.append((
                a.account,
                str(a.distinct_contacts),
                str(a.incremental_gain),
                f"Local({a.distinct_contacts}/{self.union_size}, {a.local_pct:.0f}%), "
                f"Global({a.distinct_contacts}/{self.universe_size}, {a.global_pct:.0f}%)",
            ))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.append(
            f"union {self.union_size}/{self.universe_size} ({self.union_pct:.1f}%), "
            f"overlap {self.overlap_size}"
        )
        return "\n".join(lines) + "\n"


def _account_label(net: PiNet) -> str:
    return ";".join(sorted(net.address(v) for v in net.hosts)) or "?"


def contacts(net: PiNet) -> set[str]:
    """Addresses of the non-host vertices."""
    hosts = net.hosts
    return {net.address(v) for v in net.vertices() if v not in hosts}


def coverage(
    nets: Sequence[PiNet],
    universe_size: int,
    labels: Sequence[str] | None = None,
) -> CoverageReport:
    """Contact counts per account, in the given order, against the running union and the universe."""
    sets = [contacts(n) for n in nets]
    union: set[str] = set().union(*sets) if sets else set()
    if universe_size < len(union):
        raise UniverseTooSmall(f"universe of {universe_size} is smaller than the {len(union)} contacts seen")
    labels = list(labels) if labels else [_account_label(n) for n in nets]
    seen: set[str] = set()
    rows = []
    for label, s in zip(labels, sets):
        gain = len(s - seen)
        seen |= s
        rows.append(AccountCoverage(
            account=label,
            distinct_contacts=len(s),
            local_pct=100.0 * len(s) / len(union) if union else 0.0,
            global_pct=100.0 * len(s) / universe_size if universe_size else 0.0,
            incremental_gain=gain,
        ))
    overlap = sum(len(s) for s in sets) - len(union)
    return CoverageReport(rows, len(union), universe_size, overlap)


@dataclass
class DynamicsReport:
    jaccard: list[list[float]]
    key_members_old: list[list[str]]
    key_members_new: list[list[str]]
    retained_key_members: dict[str, bool]
    migrated: list[str]
    stable: list[str]
    best_match: list[int] = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"


def _communities(clustering, net: PiNet) -> list[set[str]]:
    return [{net.address(v) for v in g} for g in clustering.groups()]


def key_members(net: PiNet, members: Sequence[int], top: int = 1) -> list[str]:
    """Highest intra-community degree first; ties by intra weight, then address."""
    inside = set(members)

    def rank(v):
        nbrs = [u for u in net.neighbors(v) if u in inside]
        return (-len(nbrs), -sum(net.weight(v, u) for u in nbrs), net.address(v))

    return [net.address(v) for v in sorted(members, key=rank)[:top]]


def compare_communities(old, new, old_net: PiNet, new_net: PiNet, top: int = 1) -> DynamicsReport:
    """Match old and new communities by address and report drift.

    A vertex migrates when its new community is not the best Jaccard match of
    its old one. Jaccard is computed over the addresses both runs share.
    """
    old_c = _communities(old, old_net)
    new_c = _communities(new, new_net)
    shared = set().union(*old_c) & set().union(*new_c)
    if not shared:
        raise DisjointVertexSets("the two clusterings share no vertices")
    old_s = [c & shared for c in old_c]
    new_s = [c & shared for c in new_c]

    jac = []
    for a in old_s:
        row = []
        for b in new_s:
            u = len(a | b)
            row.append(len(a & b) / u if u else 0.0)
        jac.append(row)

    best = []
    for row in jac:
        top_val = max(row)
        best.append(row.index(top_val))

    new_of = {addr: j for j, c in enumerate(new_s) for addr in c}
    migrated, stable = [], []
    for i, c in enumerate(old_s):
        for addr in sorted(c):
            (stable if new_of[addr] == best[i] else migrated).append(addr)

    old_keys = [key_members(old_net, g, top) for g in old.groups()]
    new_keys = [key_members(new_net, g, top) for g in new.groups()]
    retained = {}
    for i, keys in enumerate(old_keys):
        for addr in keys:
            retained[addr] = addr in new_keys[best[i]]
    return DynamicsReport(jac, old_keys, new_keys, retained, sorted(migrated), sorted(stable), best)


def stats_delta(a: NetworkStats, b: NetworkStats) -> dict[str, float | str]:
    """Relative change (b - a) / a per field; "undefined" where a is zero."""
    out: dict[str, float | str] = {}
    for name, va in asdict(a).items():
        vb = getattr(b, name)
        if va == 0:
            out[name] = 0.0 if vb == 0 else "undefined"
        else:
            out[name] = (vb - va) / va
    return out


def mean_stats(stats: Sequence[NetworkStats]) -> NetworkStats:
    """Field-wise mean over communities."""
    if not stats:
        return NetworkStats(0, 0, 0.0, 0.0, 0.0, 0.0)
    n = len(stats)
    d = {k: math.fsum(getattr(s, k) for s in stats) / n for k in asdict(stats[0])}
    return NetworkStats(**d)
