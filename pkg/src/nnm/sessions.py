"""Session state behind the HTTP service: one curated map per session, plus
pending generation fragments, an optional script, and its evaluation state.

Every service endpoint is a thin delegation to a method here, so behavior can
be checked against direct core calls without going through HTTP.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from .backends import GenerationBackend
from .builder import PromptTemplate, parse_fragments
from .graph import GENERATED, MapGraph, TopicText, utc_now
from .layout import LayoutParams, LayoutResult, run_layout
from .script import (
    DEFAULT_AGENT_SPEED,
    EvaluationSession,
    ScriptStep,
    TrajectoryRecord,
    dump_script,
    load_script,
)
from .similarity import Embedder, find_closest

MAX_FRAME_DT = 0.1  # seconds of animation consumed per frame poll, at most


@dataclass
class PendingFragment:
    """A parsed generation line awaiting assignment to a topic node."""

    fragment_id: int
    text: str
    prompt: str
    seed_node: int

    def to_dict(self) -> dict:
        return {
            "id": self.fragment_id,
            "text": self.text,
            "prompt": self.prompt,
            "seed_node": self.seed_node,
        }

    @classmethod
    def from_dict(cls, d: dict) -> PendingFragment:
        return cls(
            fragment_id=int(d["id"]),
            text=d["text"],
            prompt=d.get("prompt", ""),
            seed_node=int(d["seed_node"]),
        )


class SessionState:
    """One builder/viewer session; callers serialize mutations per session."""

    def __init__(
        self,
        session_id: str,
        *,
        backend: GenerationBackend | None = None,
        embedder: Embedder | None = None,
        clock: Callable[[], str] = utc_now,
        frame_clock: Callable[[], float] = time.monotonic,
        agent_speed: float = DEFAULT_AGENT_SPEED,
    ):
        self.session_id = session_id
        self.backend = backend
        self.embedder = embedder
        self.graph = MapGraph()
        self.pending: list[PendingFragment] = []
        self.steps: list[ScriptStep] | None = None
        self.evaluation: EvaluationSession | None = None
        self._next_fragment_id = 1
        self._clock = clock
        self._frame_clock = frame_clock
        self._last_frame: float | None = None
        self.agent_speed = agent_speed
        self.updated_at = clock()

    def _touch(self) -> None:
        self.updated_at = self._clock()

    # -- builder ------------------------------------------------------------

    def submit_prompt(
        self, template: str, seed: str, seed_group: str | None = None
    ) -> list[PendingFragment]:
        """Render and run one prompt; parsed lines join the pending list.

        The prompt is anchored at its seed node (named by the seed group when
        one is set, otherwise by the seed itself), created if absent.
        """
        if self.backend is None:
            raise ValueError("session has no generation backend configured")
        tpl = PromptTemplate(template)
        anchor_name = seed_group if seed_group else seed
        anchor = self.graph.add_node(anchor_name, group=seed_group)
        self.graph.nodes[anchor].query_count += 1
        prompt = tpl.render(seed)
        raw = self.backend.generate(prompt)
        known = {f.text for f in self.pending}
        for text in parse_fragments(raw):
            if text in known:
                continue
            known.add(text)
            self.pending.append(
                PendingFragment(self._next_fragment_id, text, prompt, anchor)
            )
            self._next_fragment_id += 1
        self._touch()
        return list(self.pending)

    def assign_fragment(self, fragment_id: int, node_name: str) -> int:
        """Turn a pending fragment into a topic text on the named node.

        The topic node is created if absent and connected back to the
        fragment's seed node. Returns the topic node's id.
        """
        fragment = next((f for f in self.pending if f.fragment_id == fragment_id), None)
        if fragment is None:
            raise KeyError(f"no pending fragment with id {fragment_id}")
        node_id = self.graph.add_node(node_name)
        self.graph.nodes[node_id].topics.append(
            TopicText(fragment.text, source=GENERATED, prompt=fragment.prompt,
                      created_at=self._clock())
        )
        if fragment.seed_node in self.graph.nodes and fragment.seed_node != node_id:
            self.graph.connect(fragment.seed_node, node_id)
        self.pending.remove(fragment)
        self._rebuild_evaluation()
        self._touch()
        return node_id

    def run_layout(self, params: LayoutParams) -> LayoutResult:
        result = run_layout(self.graph, params)
        self._rebuild_evaluation()
        self._touch()
        return result

    def similar(self, text: str, k: int) -> list[dict]:
        """Topic texts ranked by similarity to the query, as find_closest ranks them."""
        if self.embedder is None:
            raise ValueError("session has no embedder configured")
        candidates = [
            (node_id, topic.text)
            for node_id in sorted(self.graph.nodes)
            for topic in self.graph.nodes[node_id].topics
        ]
        if not candidates:
            raise ValueError("map has no topic texts")
        indexed = [(i, text_) for i, (_, text_) in enumerate(candidates)]
        ranked = find_closest(text, indexed, self.embedder, k)
        return [
            {
                "node_id": candidates[i][0],
                "node": self.graph.nodes[candidates[i][0]].name,
                "text": candidates[i][1],
                "score": score,
            }
            for i, score in ranked
        ]

    # -- viewer ---------------------------------------------------------------

    def load_script(self, doc: str | dict) -> int:
        if self.embedder is None:
            raise ValueError("session has no embedder configured")
        steps = load_script(doc)
        self.steps = steps
        self.evaluation = EvaluationSession(
            self.graph, steps, self.embedder, agent_speed=self.agent_speed
        )
        self._last_frame = None
        self._touch()
        return len(steps)

    def step_script(self, direction: str) -> dict:
        if self.evaluation is None:
            raise ValueError("no script loaded")
        if direction == "advance":
            record = self.evaluation.advance()
            moved = record is not None
            payload: dict = {"record": record.to_dict() if record else None}
        elif direction == "reverse":
            moved = self.evaluation.reverse()
            payload = {}
        elif direction == "reset":
            self.evaluation.reset()
            moved = True
            payload = {}
        else:
            raise ValueError(f"unknown step direction {direction!r}")
        self._touch()
        return {"cursor": self.evaluation.cursor, "moved": moved, **payload}

    def frame(self) -> dict:
        """Current animation frame; wall-clock dt capped at MAX_FRAME_DT."""
        agents: dict[str, dict] = {}
        records: list[dict] = []
        cursor = 0
        if self.evaluation is not None:
            now = self._frame_clock()
            dt = 0.0 if self._last_frame is None else min(now - self._last_frame, MAX_FRAME_DT)
            self._last_frame = now
            if dt > 0:
                self.evaluation.tick(dt)
            agents = {
                role: self.evaluation.agents[role].to_dict()
                for role in sorted(self.evaluation.agents)
            }
            records = [r.to_dict() for r in self.evaluation.records]
            cursor = self.evaluation.cursor
        return {"cursor": cursor, "agents": agents, "records": records}

    def records(self) -> list[TrajectoryRecord]:
        return list(self.evaluation.records) if self.evaluation else []

    def _rebuild_evaluation(self) -> None:
        """Graph changed: replay the loaded script against the new state."""
        if self.evaluation is None:
            return
        cursor = self.evaluation.cursor
        self.evaluation = EvaluationSession.restore(
            self.graph, self.steps or [], self.embedder, cursor,
            agent_speed=self.agent_speed,
        )

    # -- document -----------------------------------------------------------------

    def to_document(self) -> dict:
        evaluation = None
        if self.evaluation is not None:
            evaluation = {
                "cursor": self.evaluation.cursor,
                "agents": {
                    role: self.evaluation.agents[role].to_dict()
                    for role in sorted(self.evaluation.agents)
                },
                "records": [r.to_dict() for r in self.evaluation.records],
            }
        return {
            "schema_version": self.graph.schema_version,
            "session_id": self.session_id,
            "graph": self.graph.to_dict(),
            "pending": [f.to_dict() for f in self.pending],
            "next_fragment_id": self._next_fragment_id,
            "script": dump_script(self.steps) if self.steps is not None else None,
            "evaluation": evaluation,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_document(
        cls,
        doc: dict,
        *,
        backend: GenerationBackend | None = None,
        embedder: Embedder | None = None,
        clock: Callable[[], str] = utc_now,
        frame_clock: Callable[[], float] = time.monotonic,
        agent_speed: float = DEFAULT_AGENT_SPEED,
    ) -> SessionState:
        """Rebuild a session from its document, replaying the script cursor."""
        state = cls(
            doc["session_id"],
            backend=backend,
            embedder=embedder,
            clock=clock,
            frame_clock=frame_clock,
            agent_speed=agent_speed,
        )
        state.graph = MapGraph.from_dict(doc["graph"])
        state.pending = [PendingFragment.from_dict(f) for f in doc.get("pending", [])]
        state._next_fragment_id = int(doc.get("next_fragment_id", 1))
        script = doc.get("script")
        if script is not None:
            state.steps = load_script(script)
        evaluation = doc.get("evaluation")
        if evaluation is not None and state.steps is not None and embedder is not None:
            state.evaluation = EvaluationSession.restore(
                state.graph, state.steps, embedder, int(evaluation.get("cursor", 0)),
                agent_speed=agent_speed,
            )
            for role, agent_doc in evaluation.get("agents", {}).items():
                agent = state.evaluation.agents.get(role)
                if agent is not None:
                    pos = agent_doc.get("position")
                    if pos is not None:
                        agent.position = (float(pos[0]), float(pos[1]))
        state.updated_at = doc.get("updated_at", state.updated_at)
        return state
