"""Community detection over multi-user personalized email networks."""

from .clustering import Clustering, assign, cluster, initial_medoids, update_medoids
from .cpi import (
    AttributeSpec, Cpi, InfluentialCpi, annotate, annotate_graph, discretize,
    extract_cpis, fit_attribute_specs, influential_cpi,
)
from .evolution import compare_communities, coverage, stats_delta
from .graph import PiNet, build_pinet, fuse_accounts, merge_pinets
from .ingest import Corpus, EmailRecord, HostSet, filter_personalized, load_corpus, parse_record
from .quality import QualityReport, density, entropy, evaluate, f_measure, network_stats
from .similarity import (
    DistanceMatrix, SimilarityParams, build_distance_matrix, collaborative_similarity,
    contextual_similarity, pairwise_distance, structural_similarity,
)

__version__ = "0.1.0"
