"""Elastic-net hypergraphs: construction, spectral clustering and label propagation."""

__version__ = "0.1.0"

from .datio import (
    LabelVector,
    corrupt,
    load_idx,
    load_matrix_csv,
    normalize_columns,
    synth_blobs,
    synth_subspaces,
)
from .elasticnet import (
    ElasticNetPath,
    elastic_net_solve,
    kkt_residual,
    lars_en_path,
    robust_matrix_elastic_net,
)
from .hypergraph import (
    Hypergraph,
    affinity,
    build_enhg,
    degrees,
    hyperedge_weights,
    incidence_from_coefficients,
    laplacian,
    theta_matrix,
)
from .learn import (
    kmeans,
    predict_labels,
    propagate_labels,
    propagate_labels_iterative,
    spectral_clustering,
    spectral_embedding,
)
from .metrics import classification_accuracy, clustering_accuracy, nmi
from .baselines import gaussian_graph, knn_hypergraph
