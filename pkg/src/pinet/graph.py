"""Personalized interaction networks (pi-Nets).

A :class:`PiNet` wraps an undirected ``networkx.Graph`` whose nodes are dense
integer IDs assigned in sorted-address order.  Node attributes:

``address``      canonical address (or alias label after fusion)
``members``      original addresses folded into the vertex
``designation``  optional job title, ``None`` when unknown
``host``         True for account owners
``active`` / ``passive``   emails sent / received
``cpi``          influential CPI tuple once annotated, else ``None``

Edges carry an integer ``weight``: the number of emails exchanged.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import networkx as nx

from .errors import InvariantViolation, OverlappingGroups
from .ingest import EmailRecord, HostSet, normalize_address

SENDER_TO_EACH_RECIPIENT = "sender-to-each-recipient"
OUTGOING_ONLY = "outgoing-only"
EDGE_POLICIES = (SENDER_TO_EACH_RECIPIENT, OUTGOING_ONLY)


@dataclass
class PiNet:
    graph: nx.Graph

    @classmethod
    def empty(cls) -> "PiNet":
        return cls(nx.Graph())

    def __len__(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def n(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def edge_count(self) -> int:
        return self.graph.number_of_edges()

    def vertices(self) -> range:
        return range(self.n)

    def address(self, v: int) -> str:
        return self.graph.nodes[v]["address"]

    @property
    def addresses(self) -> list[str]:
        return [self.graph.nodes[v]["address"] for v in self.vertices()]

    @property
    def index(self) -> dict[str, int]:
        return {a: v for v, a in enumerate(self.addresses)}

    @property
    def hosts(self) -> set[int]:
        return {v for v, d in self.graph.nodes(data=True) if d["host"]}

    def members(self, v: int) -> frozenset[str]:
        return self.graph.nodes[v]["members"]

    def designation(self, v: int) -> str | None:
        return self.graph.nodes[v].get("designation")

    def role(self, v: int) -> tuple[int, int]:
        d = self.graph.nodes[v]
        return d["active"], d["passive"]

    def cpi(self, v: int) -> tuple[int, ...] | None:
        return self.graph.nodes[v].get("cpi")

    @property
    def annotated(self) -> bool:
        return self.n > 0 and all(d.get("cpi") is not None for _, d in self.graph.nodes(data=True))

    def weight(self, a: int, b: int) -> int:
        data = self.graph.get_edge_data(a, b)
        return 0 if data is None else data["weight"]

    def has_edge(self, a: int, b: int) -> bool:
        return self.graph.has_edge(a, b)

    def neighbors(self, v: int) -> Iterator[int]:
        return iter(self.graph.adj[v])

    def degree(self, v: int) -> int:
        return len(self.graph.adj[v])

    def strength(self, v: int) -> int:
        """Total incident edge weight."""
        return sum(d["weight"] for d in self.graph.adj[v].values())

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for a, b, w in self.graph.edges(data="weight"):
            yield (a, b, w) if a < b else (b, a, w)

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges())

    def by_address(self) -> dict[frozenset[str], int]:
        """Edge weights keyed by unordered address pair; handy for comparisons."""
        addr = self.addresses
        return {frozenset((addr[a], addr[b])): w for a, b, w in self.edges()}

    def check(self) -> None:
        """Raise InvariantViolation if the structural invariants do not hold."""
        g = self.graph
        if sorted(g.nodes) != list(range(g.number_of_nodes())):
            raise InvariantViolation("vertex IDs are not dense from 0")
        for a, b, w in g.edges(data="weight"):
            if a == b:
                raise InvariantViolation(f"self-loop on vertex {a}")
            if not isinstance(w, int) or w < 1:
                raise InvariantViolation(f"edge ({a},{b}) has weight {w!r}")


def _assemble(
    vertices: Iterable[str],
    weights: Mapping[tuple[str, str], int],
    hosts: Iterable[str],
    active: Mapping[str, int],
    passive: Mapping[str, int],
    members: Mapping[str, Iterable[str]] | None = None,
    designations: Mapping[str, str] | None = None,
    cpis: Mapping[str, tuple[int, ...]] | None = None,
) -> PiNet:
    members = members or {}
    designations = designations or {}
    cpis = cpis or {}
    host_set = set(hosts)
    g = nx.Graph()
    ordered = sorted(set(vertices))
    ids = {a: i for i, a in enumerate(ordered)}
    for a in ordered:
        g.add_node(
            ids[a],
            address=a,
            members=frozenset(members.get(a, (a,))),
            designation=designations.get(a),
            host=a in host_set,
            active=active.get(a, 0),
            passive=passive.get(a, 0),
            cpi=cpis.get(a),
        )
    for (a, b), w in sorted(weights.items()):
        g.add_edge(ids[a], ids[b], weight=w)
    return PiNet(g)


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def build_pinet(
    records: Sequence[EmailRecord],
    host: HostSet,
    edge_policy: str = SENDER_TO_EACH_RECIPIENT,
    strict: bool = False,
    designations: Mapping[str, str] | None = None,
) -> PiNet:
    """Turn personalized records into a weighted undirected user graph.

    Each email adds 1 to the edge between its sender and every recipient.
    ``outgoing-only`` keeps only emails sent by a host account; ``strict``
    keeps only sender-recipient pairs that touch a host.
    """
    if edge_policy not in EDGE_POLICIES:
        raise ValueError(f"unknown edge policy {edge_policy!r}")
    weights: dict[tuple[str, str], int] = defaultdict(int)
    vertices: set[str] = set()
    contributing = []
    for rec in records:
        s = rec.sender
        if edge_policy == OUTGOING_ONLY and s not in host:
            continue
        contributing.append(rec)
        for r in rec.recipients:
            if r == s:
                continue
            if strict and s not in host and r not in host:
                continue
            weights[_pair(s, r)] += 1
            vertices.add(s)
            vertices.add(r)
        vertices.update(a for a in rec.participants if a in host)

    active: dict[str, int] = defaultdict(int)
    passive: dict[str, int] = defaultdict(int)
    for rec in contributing:
        if rec.sender in vertices:
            active[rec.sender] += 1
        for r in rec.recipients:
            if r in vertices:
                passive[r] += 1

    hosts = [a for a in vertices if a in host]
    return _assemble(vertices, weights, hosts, active, passive, designations=designations)


def _node_tables(net: PiNet):
    g = net.graph
    for v, d in g.nodes(data=True):
        yield d["address"], d


def merge_pinets(nets: Sequence[PiNet]) -> PiNet:
    """Union of vertices; weights of the same address pair add up; hosts are unioned.

    CPI annotations are discarded: they have to be recomputed over the merged records.
    """
    weights: dict[tuple[str, str], int] = defaultdict(int)
    vertices: set[str] = set()
    hosts: set[str] = set()
    active: dict[str, int] = defaultdict(int)
    passive: dict[str, int] = defaultdict(int)
    members: dict[str, set[str]] = defaultdict(set)
    designations: dict[str, str] = {}
    for net in nets:
        addr = net.addresses
        for a, d in _node_tables(net):
            vertices.add(a)
            if d["host"]:
                hosts.add(a)
            active[a] += d["active"]
            passive[a] += d["passive"]
            members[a].update(d["members"])
            if d.get("designation") and a not in designations:
                designations[a] = d["designation"]
        for x, y, w in net.edges():
            weights[_pair(addr[x], addr[y])] += w
    return _assemble(vertices, weights, hosts, active, passive, members, designations)


def alias_owner(aliases: Mapping[str, Iterable[str]]) -> dict[str, str]:
    """address -> identity label; rejects an address claimed by two identities."""
    owner: dict[str, str] = {}
    for label, addrs in aliases.items():
        for a in addrs:
            a = normalize_address(a)
            if a in owner and owner[a] != label:
                raise OverlappingGroups(f"{a} listed under both {owner[a]!r} and {label!r}")
            owner[a] = label
    return owner


def fuse_accounts(net: PiNet, aliases: Mapping[str, Iterable[str]]) -> PiNet:
    """Collapse the vertices of each alias group into one vertex named by the label."""
    owner = alias_owner(aliases)

    def canon(a: str) -> str:
        return owner.get(a, a)

    weights: dict[tuple[str, str], int] = defaultdict(int)
    vertices: set[str] = set()
    hosts: set[str] = set()
    active: dict[str, int] = defaultdict(int)
    passive: dict[str, int] = defaultdict(int)
    members: dict[str, set[str]] = defaultdict(set)
    designations: dict[str, str] = {}
    addr = net.addresses
    for a, d in _node_tables(net):
        c = canon(a)
        vertices.add(c)
        if d["host"]:
            hosts.add(c)
        active[c] += d["active"]
        passive[c] += d["passive"]
        members[c].update(d["members"])
        if d.get("designation") and c not in designations:
            designations[c] = d["designation"]
    for x, y, w in net.edges():
        a, b = canon(addr[x]), canon(addr[y])
        if a != b:
            weights[_pair(a, b)] += w
    return _assemble(vertices, weights, hosts, active, passive, members, designations)


def load_designations(path: str | Path) -> dict[str, str]:
    """Read an ``address,designation`` CSV (header optional)."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if len(row) < 2 or row[0].strip().lower() == "address":
                continue
            out[normalize_address(row[0])] = row[1].strip()
    return out


def from_edges(
    edges: Iterable[tuple[str, str, int]],
    hosts: Iterable[str] = (),
    cpis: Mapping[str, tuple[int, ...]] | None = None,
) -> PiNet:
    """Build a PiNet directly from address-keyed weighted edges.

    Used for edge-list re-import and hand-built fixtures. Duplicate pairs add up.
    """
    weights: dict[tuple[str, str], int] = defaultdict(int)
    vertices: set[str] = set()
    for a, b, w in edges:
        a, b = normalize_address(a), normalize_address(b)
        if a == b:
            raise ValueError(f"self-loop on {a}")
        if int(w) < 1:
            raise ValueError(f"edge ({a},{b}) needs a positive weight, got {w}")
        weights[_pair(a, b)] += int(w)
        vertices.update((a, b))
    host_list = [normalize_address(h) for h in hosts]
    vertices.update(h for h in host_list)
    if cpis:
        vertices.update(cpis)
    return _assemble(vertices, weights, host_list, {}, {}, cpis=cpis)


def with_cpis(net: PiNet, cpis: Mapping[int, tuple[int, ...]]) -> PiNet:
    """Copy of ``net`` with the given per-vertex CPI vectors."""
    g = net.graph.copy()
    for v, vec in cpis.items():
        g.nodes[v]["cpi"] = tuple(vec)
    return PiNet(g)
