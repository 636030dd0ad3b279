"""Python access to the gridscope simulator core."""

import json

from ._gridscope import (
    ConflictError,
    Error,
    InfoStore,
    NotFoundError,
    ParseError,
    Simulation,
    StateError,
    ValidationError,
    alt_az,
    subsolar_point,
)
from . import _gridscope as _core


def parse_request(document):
    return json.loads(_core.parse_request(document))


def build_schedule(registry, request, step_s=60):
    if not isinstance(registry, str):
        registry = json.dumps(registry)
    return json.loads(_core.build_schedule(registry, request, step_s))


def query(store, patterns):
    return json.loads(store.query(patterns))


def sync_gridmap(vo, policy):
    gridmap, state = _core.sync_gridmap(json.dumps(vo), json.dumps(policy))
    return gridmap, json.loads(state)


def run_scenario(path):
    return dict(_core.run_scenario(str(path)))


__all__ = [
    "ConflictError",
    "Error",
    "InfoStore",
    "NotFoundError",
    "ParseError",
    "Simulation",
    "StateError",
    "ValidationError",
    "alt_az",
    "build_schedule",
    "parse_request",
    "query",
    "run_scenario",
    "subsolar_point",
    "sync_gridmap",
]
