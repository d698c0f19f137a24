"""Simulate tabular datasets from DAG models written in YAML."""

from ._core import (
    CoercionError,
    CycleError,
    DagforgeError,
    Dataset,
    DomainError,
    EvalError,
    IoError,
    LexError,
    Model,
    ParseError,
    RandomStream,
    Registry,
    RegistryError,
    SelectionStarvation,
    SpecError,
    StratumNameError,
    ValidationError,
    YamlSyntaxError,
    __version__,
    csv_cell,
    detect_cycle,
    eval_expr,
    free_refs,
    parse_cell,
    pretty,
    tokenize,
    topo_sort,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
