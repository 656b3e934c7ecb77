"""Shared fixtures and independent oracles used across the test suite."""

from __future__ import annotations

import collections
from pathlib import Path

import pytest

from spinhex.arch import ArchitectureParams, CodeVariant, MemoryBasis
from spinhex.builder import build_memory_experiment
from spinhex.dem import build_dem
from spinhex.decoder import MatchingGraph, build_matching_graph
from spinhex.noise import NoiseParams

REPO_ROOT = Path(__file__).resolve().parent.parent
RESULTS = REPO_ROOT / "results"

_VARIANT_BASIS = {
    CodeVariant.XZZX: MemoryBasis.H,
    CodeVariant.CSS: MemoryBasis.Z,
}


def make_arch(
    d: int,
    variant: CodeVariant = CodeVariant.XZZX,
    basis: MemoryBasis | None = None,
    nx: int = 2,
    ny: int = 3,
) -> ArchitectureParams:
    return ArchitectureParams(
        n_x=nx,
        n_y=ny,
        distance=d,
        variant=variant,
        basis=basis if basis is not None else _VARIANT_BASIS[variant],
    )


_graph_cache: dict[tuple, MatchingGraph] = {}


def make_graph(
    d: int,
    variant: CodeVariant = CodeVariant.XZZX,
    p: float = 0.002,
    rounds: int | None = None,
) -> MatchingGraph:
    """Matching graph of a standard memory circuit, cached per parameters."""
    key = (d, variant, p, rounds)
    if key not in _graph_cache:
        circuit = build_memory_experiment(
            make_arch(d, variant), NoiseParams(p=p, eta=100.0), rounds
        )
        _graph_cache[key] = build_matching_graph(build_dem(circuit))
    return _graph_cache[key]


def fault_distance(graph: MatchingGraph) -> int:
    """Fewest edges forming an undetectable observable flip.

    Independent oracle: breadth-first search over (node, mask parity)
    states with unit edge costs.  An undetectable logical is a walk that
    starts and ends at the boundary (closed loops never flip the parity of
    any minimal solution) with odd accumulated observable mask, so the
    answer is the shortest boundary-to-boundary path with odd parity.
    """
    b = graph.num_detectors
    adj: dict[int, list[tuple[int, int]]] = collections.defaultdict(list)
    for u, v, m in zip(graph.edge_u, graph.edge_v, graph.edge_mask):
        adj[int(u)].append((int(v), int(m) & 1))
        adj[int(v)].append((int(u), int(m) & 1))
    dist = {(b, 0): 0}
    queue = collections.deque([(b, 0)])
    while queue:
        node, par = queue.popleft()
        if node == b and par == 1:
            return dist[(node, par)]
        for nxt, flip in adj[node]:
            state = (nxt, par ^ flip)
            if state not in dist:
                dist[state] = dist[(node, par)] + 1
                queue.append(state)
    raise AssertionError("no undetectable logical operator found")


def require_results(*names: str) -> list[Path]:
    paths = [RESULTS / name for name in names]
    missing = [p.name for p in paths if not p.exists()]
    if missing:
        pytest.fail(
            f"missing results file(s) {missing}; generate them with "
            "scripts/run_all_acceptance.sh (several CPU-hours)"
        )
    return paths
