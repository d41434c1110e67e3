"""Deterministic force-directed 2-D layout for map graphs.

Force model: degree-weighted repulsion k_r*(deg_u+1)*(deg_v+1)/d between all
pairs, linear attraction of magnitude d along each edge, and constant-magnitude
gravity g*(deg+1) toward the origin. Each node moves along its net force,
capped at a step length that decays geometrically with the iteration index.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .graph import MapGraph

MIN_DIST = 0.01
_BASE_STEP = 100.0
_CHUNK = 1024

Positions = dict[int, tuple[float, float]]


class LayoutError(RuntimeError):
    """A layout step produced a non-finite force."""


@dataclass(frozen=True)
class LayoutParams:
    repulsion_k: float = 100.0
    gravity_k: float = 1.0
    iterations: int = 500
    step_decay: float = 0.99
    seed: int = 42

    def __post_init__(self) -> None:
        if self.repulsion_k <= 0:
            raise ValueError("repulsion_k must be positive")
        if self.gravity_k < 0:
            raise ValueError("gravity_k must be non-negative")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if not 0 < self.step_decay <= 1:
            raise ValueError("step_decay must be in (0, 1]")


@dataclass
class LayoutResult:
    positions: Positions
    displacement_history: list[float] = field(default_factory=list)


def init_positions(graph: MapGraph, seed: int) -> Positions:
    """Seeded circle placement: pure function of the node id set and seed."""
    ids = sorted(graph.nodes)
    n = len(ids)
    if n == 0:
        return {}
    radius = 100.0 * math.sqrt(n)
    rng = random.Random(seed)
    positions: Positions = {}
    for k, node_id in enumerate(ids):
        angle = 2.0 * math.pi * k / n
        jitter_mag = rng.random()
        jitter_ang = rng.random() * 2.0 * math.pi
        positions[node_id] = (
            radius * math.cos(angle) + jitter_mag * math.cos(jitter_ang),
            radius * math.sin(angle) + jitter_mag * math.sin(jitter_ang),
        )
    return positions


def _masses(graph: MapGraph, ids: list[int]) -> np.ndarray:
    deg = {node_id: 0 for node_id in ids}
    for a, b in graph.edges:
        deg[a] += 1
        deg[b] += 1
    return np.array([deg[i] + 1 for i in ids], dtype=np.float64)


def _edge_index(graph: MapGraph, ids: list[int]) -> np.ndarray:
    index = {node_id: i for i, node_id in enumerate(ids)}
    pairs = sorted(graph.edges)
    if not pairs:
        return np.zeros((0, 2), dtype=np.intp)
    return np.array([(index[a], index[b]) for a, b in pairs], dtype=np.intp)


def _forces(X: np.ndarray, mass: np.ndarray, edges: np.ndarray, params: LayoutParams) -> np.ndarray:
    n = X.shape[0]
    F = np.zeros_like(X)
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        diff = X[start:stop, None, :] - X[None, :, :]
        d = np.sqrt((diff**2).sum(axis=2))
        np.maximum(d, MIN_DIST, out=d)
        # unit vectors are 0 for self pairs (zero diff over clamped distance)
        mag = params.repulsion_k * (mass[start:stop, None] * mass[None, :]) / d
        F[start:stop] += (diff / d[:, :, None] * mag[:, :, None]).sum(axis=1)
    if len(edges):
        delta = X[edges[:, 1]] - X[edges[:, 0]]  # attraction magnitude d along unit = delta
        np.add.at(F, edges[:, 0], delta)
        np.add.at(F, edges[:, 1], -delta)
    if params.gravity_k > 0:
        r = np.sqrt((X**2).sum(axis=1))
        unit = np.zeros_like(X)
        pull = r > 1e-12
        unit[pull] = X[pull] / r[pull, None]
        F -= unit * (params.gravity_k * mass)[:, None]
    return F


@np.errstate(over="ignore", invalid="ignore")
def _diagnose_nonfinite(X: np.ndarray, mass: np.ndarray, edges: np.ndarray,
                        params: LayoutParams, ids: list[int]) -> str:
    for u, v in edges:
        if not np.isfinite(X[v] - X[u]).all():
            return f"nodes {ids[u]} and {ids[v]}"
    n = X.shape[0]
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            diff = X[u] - X[v]
            d = max(float(np.sqrt((diff**2).sum())), MIN_DIST)
            if not np.isfinite(diff / d * params.repulsion_k * mass[u] * mass[v] / d).all():
                return f"nodes {ids[u]} and {ids[v]}"
    return "unknown node pair"


def _step_arrays(X: np.ndarray, mass: np.ndarray, edges: np.ndarray,
                 params: LayoutParams, iter_index: int, ids: list[int]) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):  # overflow handled below
        F = _forces(X, mass, edges, params)
    if not np.isfinite(F).all():
        raise LayoutError(f"non-finite force between {_diagnose_nonfinite(X, mass, edges, params, ids)}")
    max_step = _BASE_STEP * params.step_decay**iter_index
    fmag = np.sqrt((F**2).sum(axis=1))
    scale = np.where(fmag > max_step, max_step / np.maximum(fmag, 1e-300), 1.0)
    return X + F * scale[:, None]


def layout_step(graph: MapGraph, positions: Positions, params: LayoutParams,
                iter_index: int) -> Positions:
    """One force iteration over the given positions; returns new positions."""
    ids = sorted(graph.nodes)
    X = np.array([positions[i] for i in ids], dtype=np.float64).reshape(len(ids), 2)
    if not np.isfinite(X).all():
        raise ValueError("positions must be finite")
    X_new = _step_arrays(X, _masses(graph, ids), _edge_index(graph, ids), params, iter_index, ids)
    return {node_id: (float(X_new[i, 0]), float(X_new[i, 1])) for i, node_id in enumerate(ids)}


def run_layout(graph: MapGraph, params: LayoutParams) -> LayoutResult:
    """Initialize and iterate the layout, writing final positions into the graph.

    Stops early once the total per-iteration displacement falls below
    1e-3 * node count. Deterministic for a given (graph, params).
    """
    ids = sorted(graph.nodes)
    n = len(ids)
    graph.layout_seed = params.seed
    if n == 0:
        return LayoutResult(positions={})
    start = init_positions(graph, params.seed)
    X = np.array([start[i] for i in ids], dtype=np.float64)
    mass = _masses(graph, ids)
    edges = _edge_index(graph, ids)
    history: list[float] = []
    for it in range(params.iterations):
        X_new = _step_arrays(X, mass, edges, params, it, ids)
        total = float(np.sqrt(((X_new - X) ** 2).sum(axis=1)).sum())
        history.append(total)
        X = X_new
        if total < 1e-3 * n:
            break
    positions: Positions = {}
    for i, node_id in enumerate(ids):
        pos = (float(X[i, 0]), float(X[i, 1]))
        positions[node_id] = pos
        graph.nodes[node_id].position = pos
    return LayoutResult(positions=positions, displacement_history=history)
