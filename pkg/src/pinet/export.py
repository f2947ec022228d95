"""File exports: DOT, GraphML, edge-list CSV, clustering CSV and iteration traces."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import networkx as nx

from .errors import UnsupportedFormat
from .graph import PiNet, from_edges

FORMATS = ("dot", "graphml", "csv")
CPI_COLUMNS = ("sublen_id", "txtsize_id", "emailsize_id", "attachsize_id", "time_id")

# Color hints for external renderers; cycles past the end.
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _vertex_attrs(net: PiNet, v: int, clustering=None) -> dict:
    attrs = {
        "address": net.address(v),
        "designation": net.designation(v) or "n/a",
        "host": bool(net.graph.nodes[v]["host"]),
    }
    cpi = net.cpi(v)
    if cpi is not None:
        attrs.update(zip(CPI_COLUMNS, (int(x) for x in cpi)))
    if clustering is not None:
        q = clustering.assignment[v]
        attrs["cluster"] = int(q)
        attrs["is_medoid"] = v in clustering.medoids
        attrs["color"] = PALETTE[q % len(PALETTE)]
    return attrs


def to_networkx(net: PiNet, clustering=None) -> nx.Graph:
    g = nx.Graph()
    for v in net.vertices():
        g.add_node(v, **_vertex_attrs(net, v, clustering))
    for a, b, w in net.edges():
        g.add_edge(a, b, weight=int(w))
    return g


def write_graphml(net: PiNet, path: str | Path, clustering=None) -> None:
    nx.write_graphml(to_networkx(net, clustering), str(path))


def _dot_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    text = str(value).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{text}"'


def dot_source(net: PiNet, clustering=None, name: str = "pinet") -> str:
    lines = [f"graph {name} {{"]
    for v in net.vertices():
        attrs = _vertex_attrs(net, v, clustering)
        attrs["label"] = attrs["address"]
        if clustering is not None:
            attrs["style"] = "filled"
            attrs["fillcolor"] = attrs.pop("color")
        body = ", ".join(f"{k}={_dot_value(val)}" for k, val in attrs.items())
        lines.append(f"  v{v} [{body}];")
    for a, b, w in net.edges():
        lines.append(f"  v{a} -- v{b} [weight={w}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(net: PiNet, path: str | Path, clustering=None) -> None:
    Path(path).write_text(dot_source(net, clustering), encoding="utf-8")


def write_edge_csv(net: PiNet, path: str | Path) -> None:
    addr = net.addresses
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src", "dst", "weight"])
        for a, b, wt in net.edges():
            w.writerow([addr[a], addr[b], wt])


def read_edge_csv(path: str | Path) -> PiNet:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        return from_edges((src, dst, int(wt)) for src, dst, wt in reader)


def export_graph(net: PiNet, path: str | Path, fmt: str, clustering=None) -> None:
    if fmt == "dot":
        write_dot(net, path, clustering)
    elif fmt == "graphml":
        write_graphml(net, path, clustering)
    elif fmt == "csv":
        write_edge_csv(net, path)
    else:
        raise UnsupportedFormat(f"unsupported export format {fmt!r}; choose from {', '.join(FORMATS)}")


def write_clustering_csv(net: PiNet, clustering, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["vertex", "address", "cluster", "is_medoid"])
        for v in net.vertices():
            w.writerow([v, net.address(v), clustering.assignment[v], int(v in clustering.medoids)])


def write_trace(clustering, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in clustering.history:
            fh.write(json.dumps(rec.as_dict(), sort_keys=True) + "\n")


def write_rows(path: str | Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
