"""Persistent activity snippet mining over edge streams."""

from ._core import (
    ConfigError,
    EdgeUpdate,
    ExhaustionError,
    IntervalError,
    OrderingError,
    PersistMinerError,
    StreamError,
    StreamingMiner,
    ViewError,
    __version__,
    detect,
    ds_baseline,
    f1_at_k,
    format_update,
    gap_entropy,
    generate_synthetic,
    generate_trip_stream,
    inject,
    mine,
    parse_update,
    persistence,
    persistence_components,
    read_stream,
    roc_auc,
    write_stream,
)

__all__ = [
    "ConfigError",
    "EdgeUpdate",
    "ExhaustionError",
    "IntervalError",
    "OrderingError",
    "PersistMinerError",
    "StreamError",
    "StreamingMiner",
    "ViewError",
    "__version__",
    "detect",
    "ds_baseline",
    "f1_at_k",
    "format_update",
    "gap_entropy",
    "generate_synthetic",
    "generate_trip_stream",
    "inject",
    "mine",
    "parse_update",
    "persistence",
    "persistence_components",
    "read_stream",
    "roc_auc",
    "write_stream",
]
