"""License compliance for the dataset -> model -> application supply chain.

Typical use::

    from licenserec import default_matrix, recommend

    m = default_matrix()
    m.verdict("CC-BY-NC-4.0", "MIT").kind        # VerdictKind.INCOMPATIBLE
    recommend(["CC-BY-NC-4.0", "MIT"], m).licenses
"""

from licenserec.catalog import Catalog, Category, default_catalog, load_catalog
from licenserec.engine import check_edge, check_licenses, detect_conflicts, fixability, recommend
from licenserec.lineage import LineageGraph, Stage, close_dataset_to_repo, ingest_records, load_graph, save_graph
from licenserec.matrix import CompatibilityMatrix, EdgeContext, Verdict, VerdictKind, default_matrix, load_matrix
from licenserec.spdx_expr import normalize_expression, parse_expression, render

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "Category",
    "CompatibilityMatrix",
    "EdgeContext",
    "LineageGraph",
    "Stage",
    "Verdict",
    "VerdictKind",
    "__version__",
    "check_edge",
    "check_licenses",
    "close_dataset_to_repo",
    "default_catalog",
    "default_matrix",
    "detect_conflicts",
    "fixability",
    "ingest_records",
    "load_catalog",
    "load_graph",
    "load_matrix",
    "normalize_expression",
    "parse_expression",
    "recommend",
    "render",
    "save_graph",
]
