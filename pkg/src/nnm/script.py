"""Scripted-dialogue evaluation over a map.

Loads timed role-tagged order texts, places one agent per role on the node
whose topic text matches best, and records per-step trajectory metrics:
match similarity, inter-agent node distance, and inter-agent text similarity.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import MapGraph
from .similarity import Embedder, similarity

COMMANDER = "COMMANDER"
SUBORDINATE = "SUBORDINATE"

ROLE_COLORS = {COMMANDER: "#d62728", SUBORDINATE: "#1f77b4"}
_EXTRA_COLORS = ("#2ca02c", "#9467bd", "#8c564b", "#e377c2")

DEFAULT_AGENT_SPEED = 100.0  # layout units per second
HEADLESS_FRAME_DT = 1.0 / 60.0


@dataclass(frozen=True)
class ScriptStep:
    step_id: int
    role: str
    time: str
    text: str
    node_hint: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.step_id,
            "role": self.role,
            "time": self.time,
            "node_hint": self.node_hint,
            "text": self.text,
        }


def load_script(doc: str | dict) -> list[ScriptStep]:
    """Parse and validate a script document (JSON text or parsed dict)."""
    data = json.loads(doc) if isinstance(doc, str) else doc
    raw_steps = data.get("steps")
    if not isinstance(raw_steps, list):
        raise ValueError('script document needs a "steps" list')
    steps: list[ScriptStep] = []
    last_id = 0
    for i, entry in enumerate(raw_steps):
        try:
            step = ScriptStep(
                step_id=int(entry["id"]),
                role=str(entry["role"]),
                time=str(entry.get("time", "")),
                text=str(entry["text"]),
                node_hint=entry.get("node_hint"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"script step {i}: {exc}") from exc
        if step.step_id <= last_id:
            raise ValueError(f"script step ids must be strictly increasing (step {step.step_id})")
        if not step.text:
            raise ValueError(f"script step {step.step_id} has empty text")
        if not step.role:
            raise ValueError(f"script step {step.step_id} has empty role")
        last_id = step.step_id
        steps.append(step)
    return steps


def dump_script(steps: list[ScriptStep]) -> dict:
    return {"steps": [s.to_dict() for s in steps]}


@dataclass
class Agent:
    role: str
    position: tuple[float, float]
    speed: float = DEFAULT_AGENT_SPEED
    target_node: int | None = None
    color: str = "#2ca02c"

    def __post_init__(self) -> None:
        if self.speed <= 0:
            raise ValueError("agent speed must be positive")
        if not all(math.isfinite(c) for c in self.position):
            raise ValueError("agent position must be finite")

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "position": list(self.position),
            "speed": self.speed,
            "target_node": self.target_node,
            "color": self.color,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Agent:
        return cls(
            role=d["role"],
            position=(float(d["position"][0]), float(d["position"][1])),
            speed=float(d.get("speed", DEFAULT_AGENT_SPEED)),
            target_node=d.get("target_node"),
            color=d.get("color", "#2ca02c"),
        )


def animate(agent: Agent, target: tuple[float, float], dt: float) -> tuple[float, float]:
    """New position after moving toward the target at the agent's speed.

    Moves along the unit vector by speed*dt, snapping to the target instead of
    overshooting; an agent already at the target stays exactly there.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    px, py = agent.position
    tx, ty = target
    dx, dy = tx - px, ty - py
    remaining = math.hypot(dx, dy)
    step = agent.speed * dt
    if remaining == 0.0 or step >= remaining:
        return (tx, ty)
    return (px + dx / remaining * step, py + dy / remaining * step)


@dataclass
class TrajectoryRecord:
    """One Table-style row: where a step landed and how far the agents sit apart."""

    step_id: int
    role: str
    match_similarity: float
    node: str
    node_dist: float
    text_similarity: float | None

    def to_dict(self) -> dict:
        return {
            "step_id": self.step_id,
            "role": self.role,
            "match_similarity": self.match_similarity,
            "node": self.node,
            "node_dist": self.node_dist,
            "text_similarity": self.text_similarity,
        }

    @classmethod
    def from_dict(cls, d: dict) -> TrajectoryRecord:
        return cls(
            step_id=int(d["step_id"]),
            role=d["role"],
            match_similarity=float(d["match_similarity"]),
            node=d["node"],
            node_dist=float(d["node_dist"]),
            text_similarity=None if d.get("text_similarity") is None else float(d["text_similarity"]),
        )


class EvaluationSession:
    """Single-writer playback state for one script over one map."""

    def __init__(
        self,
        graph: MapGraph,
        steps: list[ScriptStep],
        embedder: Embedder,
        agent_speed: float = DEFAULT_AGENT_SPEED,
    ):
        roles: list[str] = []
        for step in steps:
            if step.role not in roles:
                roles.append(step.role)
        if len(roles) > 2:
            raise ValueError(f"scripts drive at most two agents, got roles {roles}")
        self.graph = graph
        self.steps = steps
        self.embedder = embedder
        self.agent_speed = agent_speed
        self.roles = roles
        self.reference_role = COMMANDER if COMMANDER in roles else (roles[0] if roles else None)
        self.cursor = 0
        self.agents: dict[str, Agent] = {}
        self.records: list[TrajectoryRecord] = []
        self._history: list[tuple[dict[str, Agent], int]] = []
        self._match_cache: dict[int, tuple[int, float]] = {}

    # -- placement ------------------------------------------------------------

    def _match(self, step: ScriptStep) -> tuple[int, float]:
        """Best (node, similarity) over every topic text; ties go to the lowest id."""
        cached = self._match_cache.get(step.step_id)
        if cached is not None:
            return cached
        best: tuple[int, float] | None = None
        for node_id in sorted(self.graph.nodes):
            for topic in self.graph.nodes[node_id].topics:
                score = similarity(step.text, topic.text, self.embedder)
                if best is None or score > best[1]:
                    best = (node_id, score)
        if best is None:
            raise ValueError("map has no topic texts to match against")
        self._match_cache[step.step_id] = best
        return best

    def _color_for(self, role: str) -> str:
        if role in ROLE_COLORS:
            return ROLE_COLORS[role]
        return _EXTRA_COLORS[self.roles.index(role) % len(_EXTRA_COLORS)]

    def place_agent(self, step: ScriptStep) -> tuple[int, float]:
        """Match the step text and point the role's agent at the chosen node."""
        node_id, score = self._match(step)
        agent = self.agents.get(step.role)
        if agent is None:
            pos = self.graph.nodes[node_id].position or (0.0, 0.0)
            self.agents[step.role] = Agent(
                role=step.role,
                position=pos,
                speed=self.agent_speed,
                target_node=node_id,
                color=self._color_for(step.role),
            )
        else:
            agent.target_node = node_id
        return node_id, score

    # -- distances --------------------------------------------------------------

    def _node_position(self, node_id: int) -> tuple[float, float]:
        pos = self.graph.nodes[node_id].position
        if pos is None:
            raise ValueError(f"node {node_id} has no position; run the layout first")
        return pos

    def _other_role(self, role: str) -> str | None:
        for r in self.roles:
            if r != role:
                return r
        return None

    def _node_dist(self, role: str) -> float:
        """Distance between the two agents' target nodes at the current step.

        If the counterpart has not been placed yet, its next scripted step's
        node stands in, so the first row already carries a distance.
        """
        other = self._other_role(role)
        if other is None:
            return 0.0
        own_node = self.agents[role].target_node
        counterpart = self.agents.get(other)
        if counterpart is not None and counterpart.target_node is not None:
            other_node = counterpart.target_node
        else:
            upcoming = next((s for s in self.steps[self.cursor + 1:] if s.role == other), None)
            if upcoming is None:
                return 0.0
            other_node, _ = self._match(upcoming)
        if other_node == own_node:
            return 0.0
        ax, ay = self._node_position(own_node)
        bx, by = self._node_position(other_node)
        return math.hypot(ax - bx, ay - by)

    def _latest_reference_text(self, index: int) -> str | None:
        for step in reversed(self.steps[:index]):
            if step.role == self.reference_role:
                return step.text
        return None

    # -- stepping -----------------------------------------------------------------

    def advance(self) -> TrajectoryRecord | None:
        """Consume the next step and append its record; None when past the end."""
        if self.cursor >= len(self.steps):
            return None
        step = self.steps[self.cursor]
        self._history.append((copy.deepcopy(self.agents), len(self.records)))
        node_id, score = self.place_agent(step)
        node_dist = self._node_dist(step.role)
        text_sim: float | None = None
        if step.role != self.reference_role:
            ref_text = self._latest_reference_text(self.cursor)
            if ref_text is not None:
                text_sim = similarity(ref_text, step.text, self.embedder)
        record = TrajectoryRecord(
            step_id=step.step_id,
            role=step.role,
            match_similarity=score,
            node=self.graph.nodes[node_id].name,
            node_dist=node_dist,
            text_similarity=text_sim,
        )
        self.records.append(record)
        self.cursor += 1
        return record

    def reverse(self) -> bool:
        """Undo the last advance exactly; False when already at the start."""
        if self.cursor == 0 or not self._history:
            return False
        agents, n_records = self._history.pop()
        self.agents = agents
        del self.records[n_records:]
        self.cursor -= 1
        return True

    def reset(self) -> None:
        self.cursor = 0
        self.agents = {}
        self.records = []
        self._history = []

    def tick(self, dt: float) -> None:
        """Advance the presentation-only animation of every placed agent."""
        for agent in self.agents.values():
            if agent.target_node is not None:
                target = self.graph.nodes[agent.target_node].position
                if target is not None:
                    agent.position = animate(agent, target, dt)

    @classmethod
    def restore(
        cls,
        graph: MapGraph,
        steps: list[ScriptStep],
        embedder: Embedder,
        cursor: int,
        agent_speed: float = DEFAULT_AGENT_SPEED,
    ) -> EvaluationSession:
        """Rebuild a session at the given cursor by replaying (placement is deterministic)."""
        session = cls(graph, steps, embedder, agent_speed=agent_speed)
        for _ in range(cursor):
            session.advance()
        return session


# -- statistics --------------------------------------------------------------------


def pearson(xs, ys) -> float | None:
    """Pearson's r, or None when a series is constant (undefined)."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two equal-length 1-D series")
    if x.size < 2:
        raise ValueError("pearson needs at least two pairs")
    xm = x - x.mean()
    ym = y - y.mean()
    sx = float(np.linalg.norm(xm))
    sy = float(np.linalg.norm(ym))
    if sx == 0.0 or sy == 0.0:
        return None
    return float(np.dot(xm, ym) / (sx * sy))


@dataclass
class TrajectoryStats:
    pearson: float | None
    pearson_filled: float | None
    table: list[TrajectoryRecord]


def trajectory_stats(records: list[TrajectoryRecord]) -> TrajectoryStats:
    """Correlation between the node-distance and text-similarity series.

    `pearson` uses the rows that carry both values. `pearson_filled` holds the
    last text similarity across the gaps (the chart-series reading, which
    weighs distances at reference-role steps too).
    """
    pairs = [(r.node_dist, r.text_similarity) for r in records if r.text_similarity is not None]
    if len(pairs) < 2:
        raise ValueError("need at least two records with both node_dist and text_similarity")
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    fx: list[float] = []
    fy: list[float] = []
    last: float | None = None
    for rec in records:
        if rec.text_similarity is not None:
            last = rec.text_similarity
        if last is not None:
            fx.append(rec.node_dist)
            fy.append(last)
    filled = pearson(fx, fy) if len(fx) >= 2 else None
    return TrajectoryStats(pearson=pearson(xs, ys), pearson_filled=filled, table=list(records))


def export_trajectory_csv(records: list[TrajectoryRecord]) -> str:
    """Table-shaped CSV: similarities to 4 decimals, distances to 2, gaps as NA."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["script_id", "role", "similarity", "node", "node_dist", "text_similarity"])
    for r in records:
        writer.writerow([
            r.step_id,
            r.role,
            f"{r.match_similarity:.4f}",
            r.node,
            f"{r.node_dist:.2f}",
            "NA" if r.text_similarity is None else f"{r.text_similarity:.4f}",
        ])
    return buf.getvalue()
