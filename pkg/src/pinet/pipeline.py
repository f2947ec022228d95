"""End-to-end orchestration: ingest -> build -> annotate -> distances -> cluster -> evaluate."""

from __future__ import annotations

import csv
import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from . import export
from .clustering import Clustering, cluster
from .config import PipelineConfig
from .cpi import AttributeSpec, CtsTable, annotate, fit_attribute_specs, write_cpis
from .errors import ConfigError, InvariantViolation, PinetError
from .evolution import compare_communities, coverage, mean_stats, stats_delta
from .graph import PiNet, build_pinet, fuse_accounts, load_designations
from .ingest import (
    Corpus, EmailRecord, HostSet, filter_personalized, load_aliases, load_corpus,
    merge_personalized, resolve_hosts, write_records,
)
from .quality import CSV_HEADER, QualityReport, evaluate, network_stats
from .similarity import DistanceMatrix, SimilarityParams, build_distance_matrix

logger = logging.getLogger(__name__)


class StageError(PinetError):
    """A module error annotated with the pipeline stage that raised it."""

    def __init__(self, module: str, operation: str, cause: Exception):
        self.module = module
        self.operation = operation
        self.cause = cause
        super().__init__(f"[{module}/{operation}] {cause}")


@contextmanager
def stage(module: str, operation: str):
    try:
        yield
    except (StageError, InvariantViolation):
        raise
    except (PinetError, ValueError, KeyError, OSError) as exc:
        raise StageError(getattr(exc, "module", module), operation, exc) from exc


@dataclass
class Run:
    """Artifacts of one pipeline pass, kept so later stages can reuse earlier ones."""

    cfg: PipelineConfig
    corpus: Corpus
    hosts: list[HostSet]
    records: list[EmailRecord]
    net: PiNet
    specs: list[AttributeSpec] | None = None
    annotated: PiNet | None = None


def similarity_params(cfg: PipelineConfig, alpha: float | None = None) -> SimilarityParams:
    return SimilarityParams(
        alpha=cfg.alpha if alpha is None else alpha,
        attribute_weights=tuple(cfg.attribute_weights),
        path_cost=cfg.path_cost,
        direct_branch=cfg.direct_branch,
        eq8_literal=cfg.eq8_literal,
    )


def _aliases(cfg: PipelineConfig) -> dict[str, list[str]]:
    return load_aliases(cfg.aliases) if cfg.aliases else {}


def ingest(cfg: PipelineConfig) -> Corpus:
    if not cfg.inputs:
        raise StageError("corpus-ingest", "load_corpus", ConfigError("no input files given"))
    with stage("corpus-ingest", "load_corpus"):
        return load_corpus(cfg.inputs, include_bcc=cfg.include_bcc)


def host_sets(cfg: PipelineConfig, tokens: list[str] | None = None) -> list[HostSet]:
    tokens = cfg.hosts if tokens is None else tokens
    if not tokens:
        raise StageError("corpus-ingest", "filter_personalized", ConfigError("no host accounts given"))
    with stage("corpus-ingest", "resolve_hosts"):
        return resolve_hosts(tokens, _aliases(cfg))


def personalized(cfg: PipelineConfig, corpus: Corpus, hosts: list[HostSet]) -> list[EmailRecord]:
    with stage("corpus-ingest", "filter_personalized"):
        per_host = [filter_personalized(corpus, h, cfg.allow_domains) for h in hosts]
    return merge_personalized(per_host)


def build(cfg: PipelineConfig, records: list[EmailRecord], hosts: list[HostSet]) -> PiNet:
    combined = HostSet(frozenset().union(*(h.accounts for h in hosts)), "+".join(h.label for h in hosts))
    with stage("pinet-builder", "build_pinet"):
        designations = load_designations(cfg.designations) if cfg.designations else None
        net = build_pinet(records, combined, cfg.edge_policy, cfg.strict_edges, designations)
    if cfg.fuse_aliases and cfg.aliases:
        with stage("pinet-builder", "fuse_accounts"):
            net = fuse_accounts(net, _aliases(cfg))
    return net


def prepare(cfg: PipelineConfig, host_tokens: list[str] | None = None, corpus: Corpus | None = None) -> Run:
    corpus = corpus if corpus is not None else ingest(cfg)
    hosts = host_sets(cfg, host_tokens)
    records = personalized(cfg, corpus, hosts)
    net = build(cfg, records, hosts)
    return Run(cfg, corpus, hosts, records, net)


def annotate_run(run: Run) -> PiNet:
    if run.annotated is None:
        cfg = run.cfg
        if not run.records:
            raise StageError("cpi-extractor", "fit_attribute_specs",
                             ConfigError("no personalized records for the given hosts"))
        with stage("cpi-extractor", "fit_attribute_specs"):
            run.specs = fit_attribute_specs(
                run.records, cfg.bins, CtsTable.from_spec(cfg.cts_table), cfg.timezone
            )
        with stage("cpi-extractor", "annotate_graph"):
            run.annotated, _ = annotate(run.net, run.records, run.specs, cfg.cpi_outgoing_only)
    return run.annotated


def distances(run: Run, alpha: float | None = None) -> DistanceMatrix:
    net = annotate_run(run)
    with stage("similarity-engine", "build_distance_matrix"):
        return build_distance_matrix(net, similarity_params(run.cfg, alpha), workers=run.cfg.threads)


def cluster_run(run: Run, matrix: DistanceMatrix, k: int, alpha: float) -> tuple[Clustering, QualityReport]:
    cfg = run.cfg
    net = annotate_run(run)
    with stage("community-clusterer", "cluster"):
        result = cluster(net, matrix, k, cfg.max_iterations, cfg.trace_quality, cfg.attribute_weights)
    with stage("quality-metrics", "evaluate"):
        report = evaluate(result, net, cfg.attribute_weights, alpha)
    return result, report


def _out(cfg: PipelineConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _quality_doc(net: PiNet, result: Clustering, report: QualityReport) -> dict:
    doc = report.as_dict()
    doc["medoids"] = [net.address(m) for m in result.medoids]
    doc["iterations"] = result.iterations_run
    doc["objective"] = result.objective
    doc["unreachable_vertices"] = [net.address(v) for v in result.overflow]
    return doc


# subcommands ---------------------------------------------------------------

def cmd_ingest(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    corpus = ingest(cfg)
    write_records(corpus.records, out / "corpus.csv")
    summary = {"records": len(corpus), "addresses": len(corpus.address_index)}
    if cfg.hosts:
        hosts = host_sets(cfg)
        records = personalized(cfg, corpus, hosts)
        write_records(records, out / "personalized.csv")
        summary["personalized_records"] = len(records)
    _write_json(out / "ingest.json", summary)
    return summary


def cmd_build(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    run = prepare(cfg)
    with stage("cli", "export"):
        for fmt in cfg.formats:
            export.export_graph(run.net, out / f"pinet.{_ext(fmt)}", fmt)
    return {"vertices": run.net.n, "edges": run.net.edge_count, "hosts": len(run.net.hosts)}


def _ext(fmt: str) -> str:
    return {"csv": "edges.csv"}.get(fmt, fmt)


def cmd_annotate(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    run = prepare(cfg)
    net = annotate_run(run)
    write_cpis(net, out / "cpi.csv")
    specs = [
        {"name": s.name, "bins": s.bin_count, "labels": list(s.labels),
         "boundaries": None if s.is_time else s.boundaries}
        for s in run.specs
    ]
    _write_json(out / "attribute_specs.json", specs)
    return {"vertices": net.n}


def cmd_distances(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    run = prepare(cfg)
    matrix = distances(run)
    matrix.to_csv(out / "distances.csv")
    return {"vertices": matrix.n}


def cmd_cluster(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    run = prepare(cfg)
    matrix = distances(run)
    result, report = cluster_run(run, matrix, cfg.k, cfg.alpha)
    net = run.annotated
    export.write_clustering_csv(net, result, out / "clustering.csv")
    _write_json(out / "quality.json", _quality_doc(net, result, report))
    export.write_trace(result, out / "trace.jsonl")
    return {"k": cfg.k, "alpha": cfg.alpha, "density": report.density,
            "entropy": report.entropy, "f_measure": report.f_measure}


def _read_assignment(path: str, net: PiNet) -> Clustering:
    index = net.index
    labels = [None] * net.n
    medoids = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            v = index[row["address"]]
            labels[v] = int(row["cluster"])
            if row.get("is_medoid") == "1":
                medoids.append(v)
    if any(q is None for q in labels):
        raise ConfigError(f"{path} does not cover every vertex")
    k = len(medoids) or len(set(labels))
    return Clustering(k, labels, medoids)


def cmd_evaluate(cfg: PipelineConfig, clustering_csv: str | None = None) -> dict:
    out = _out(cfg)
    run = prepare(cfg)
    net = annotate_run(run)
    if clustering_csv:
        with stage("quality-metrics", "evaluate"):
            result = _read_assignment(clustering_csv, net)
            report = evaluate(result, net, cfg.attribute_weights, cfg.alpha)
    else:
        result, report = cluster_run(run, distances(run), cfg.k, cfg.alpha)
    _write_json(out / "quality.json", report.as_dict())
    export.write_rows(
        out / "community_stats.csv",
        ["community", *report.per_community[0].as_dict()] if report.per_community else ["community"],
        [[i, *s.as_dict().values()] for i, s in enumerate(report.per_community)],
    )
    return {"density": report.density, "entropy": report.entropy, "f_measure": report.f_measure}


def cmd_coverage(cfg: PipelineConfig) -> str:
    out = _out(cfg)
    corpus = ingest(cfg)
    hosts = host_sets(cfg)
    nets = []
    for h in hosts:
        records = personalized(cfg, corpus, [h])
        nets.append(build(cfg, records, [h]))
    universe = cfg.universe_size or len(corpus.address_index)
    with stage("evolution-analyzer", "coverage"):
        report = coverage(nets, universe, [h.label for h in hosts])
    (out / "coverage.json").write_text(report.to_json(), encoding="utf-8")
    table = report.table()
    (out / "coverage.txt").write_text(table, encoding="utf-8")
    return table


def cmd_compare(cfg: PipelineConfig, old_hosts: list[str] | None, new_hosts: list[str] | None) -> dict:
    out = _out(cfg)
    corpus = ingest(cfg)
    old_tokens = old_hosts or cfg.hosts[:1]
    new_tokens = new_hosts or cfg.hosts
    runs = []
    for tokens in (old_tokens, new_tokens):
        run = prepare(cfg, tokens, corpus)
        result, report = cluster_run(run, distances(run), cfg.k, cfg.alpha)
        runs.append((run.annotated, result, report))
    (old_net, old_c, old_r), (new_net, new_c, new_r) = runs
    with stage("evolution-analyzer", "compare_communities"):
        dyn = compare_communities(old_c, new_c, old_net, new_net, cfg.top_members)
    doc = dyn.as_dict()
    doc["old_hosts"] = old_tokens
    doc["new_hosts"] = new_tokens
    old_mean, new_mean = mean_stats(old_r.per_community), mean_stats(new_r.per_community)
    doc["community_stats_old"] = old_mean.as_dict()
    doc["community_stats_new"] = new_mean.as_dict()
    doc["community_stats_delta"] = stats_delta(old_mean, new_mean)
    doc["network_stats_delta"] = stats_delta(network_stats(old_net), network_stats(new_net))
    _write_json(out / "dynamics.json", doc)
    return {"migrated": len(dyn.migrated), "stable": len(dyn.stable)}


def cmd_export(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    run = prepare(cfg)
    result, _ = cluster_run(run, distances(run), cfg.k, cfg.alpha)
    with stage("cli", "export"):
        for fmt in cfg.formats:
            export.export_graph(run.annotated, out / f"communities.{_ext(fmt)}", fmt, result)
        export.write_clustering_csv(run.annotated, result, out / "clustering.csv")
    return {"formats": cfg.formats}


def sweep_rows(run: Run, ks: list[int], alphas: list[float]) -> list[list]:
    """One quality row per (k, alpha); the distance matrix is built once per alpha."""
    rows = []
    for alpha in alphas:
        matrix = distances(run, alpha)
        for k in ks:
            _, report = cluster_run(run, matrix, k, alpha)
            rows.append(report.csv_row())
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


def cmd_sweep(cfg: PipelineConfig) -> list[list]:
    out = _out(cfg)
    run = prepare(cfg)
    rows = sweep_rows(run, cfg.sweep_ks, cfg.sweep_alphas)
    export.write_rows(out / "sweep.csv", CSV_HEADER, rows)
    return rows
