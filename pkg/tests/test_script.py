import copy
import json
import math
import random
from pathlib import Path

import pytest

from nnm.fixtures import load_roe_map, load_roe_script
from nnm.graph import MapGraph, TopicText
from nnm.script import (
    Agent,
    EvaluationSession,
    TrajectoryRecord,
    animate,
    dump_script,
    export_trajectory_csv,
    load_script,
    pearson,
    trajectory_stats,
)

DATA = Path(__file__).parent / "data"


# -- script loading -----------------------------------------------------------


def test_load_script_roundtrip():
    doc = {"steps": [
        {"id": 1, "role": "COMMANDER", "time": "0500", "node_hint": "careful", "text": "hold"},
        {"id": 2, "role": "SUBORDINATE", "time": "0510", "node_hint": None, "text": "fire"},
    ]}
    steps = load_script(json.dumps(doc))
    assert [s.step_id for s in steps] == [1, 2]
    assert steps[0].node_hint == "careful"
    assert dump_script(steps) == doc


def test_load_script_requires_increasing_ids():
    doc = {"steps": [
        {"id": 2, "role": "A", "time": "1", "text": "x"},
        {"id": 2, "role": "A", "time": "2", "text": "y"},
    ]}
    with pytest.raises(ValueError, match="strictly increasing"):
        load_script(doc)


def test_load_script_rejects_empty_text_and_bad_shape():
    with pytest.raises(ValueError):
        load_script({"steps": [{"id": 1, "role": "A", "time": "1", "text": ""}]})
    with pytest.raises(ValueError):
        load_script({"not_steps": []})
    with pytest.raises(ValueError):
        load_script({"steps": [{"role": "A", "text": "x"}]})


# -- animation -----------------------------------------------------------------


def _agent(pos, speed=1.0):
    return Agent(role="A", position=pos, speed=speed)


def test_animate_unit_vector_arithmetic():
    assert animate(_agent((0.0, 0.0)), (3.0, 4.0), 1.0) == (0.6, 0.8)


def test_animate_fixed_point_at_target():
    for dt in (0.0, 0.5, 100.0):
        assert animate(_agent((2.0, -1.0)), (2.0, -1.0), dt) == (2.0, -1.0)


def test_animate_snaps_without_overshoot():
    assert animate(_agent((0.0, 0.0), speed=10.0), (1.0, 0.0), 1.0) == (1.0, 0.0)


def test_animate_rejects_negative_dt():
    with pytest.raises(ValueError):
        animate(_agent((0.0, 0.0)), (1.0, 0.0), -0.1)


def test_animate_kinematics_property():
    rng = random.Random(8)
    for _ in range(200):
        p = (rng.uniform(-50, 50), rng.uniform(-50, 50))
        target = (rng.uniform(-50, 50), rng.uniform(-50, 50))
        speed = rng.uniform(0.1, 20.0)
        dt = rng.uniform(0.0, 5.0)
        new = animate(_agent(p, speed), target, dt)
        moved = math.hypot(new[0] - p[0], new[1] - p[1])
        remaining = math.hypot(target[0] - p[0], target[1] - p[1])
        assert abs(moved - min(speed * dt, remaining)) < 1e-9


# -- placement ---------------------------------------------------------------------


def _mini_map() -> MapGraph:
    g = MapGraph()
    a = g.add_node("alpha")
    g.nodes[a].topics.append(TopicText("alpha beta gamma"))
    g.nodes[a].position = (0.0, 0.0)
    b = g.add_node("bravo")
    g.nodes[b].topics.append(TopicText("delta epsilon zeta"))
    g.nodes[b].position = (30.0, 40.0)
    c = g.add_node("charlie")
    g.nodes[c].topics.append(TopicText("eta theta iota"))
    g.nodes[c].position = (-10.0, 0.0)
    g.connect(a, b)
    return g


def _steps(*entries):
    return load_script({"steps": [
        {"id": i + 1, "role": role, "time": str(i), "text": text}
        for i, (role, text) in enumerate(entries)
    ]})


def test_place_agent_exact_topic_match(embedder):
    steps = _steps(("COMMANDER", "delta epsilon zeta"))
    session = EvaluationSession(_mini_map(), steps, embedder)
    node_id, score = session.place_agent(steps[0])
    assert node_id == 1
    assert score >= 1 - 1e-9
    assert session.agents["COMMANDER"].target_node == 1


def test_place_agent_disjoint_vocabulary(embedder):
    steps = _steps(("SUBORDINATE", "report eta sightings"))
    session = EvaluationSession(_mini_map(), steps, embedder)
    node_id, _ = session.place_agent(steps[0])
    assert node_id == 2


def test_place_agent_tie_breaks_by_lowest_node_id(embedder):
    g = MapGraph()
    for name in ("first", "second"):
        nid = g.add_node(name)
        g.nodes[nid].topics.append(TopicText("same topic text"))
        g.nodes[nid].position = (float(nid), 0.0)
    steps = _steps(("COMMANDER", "same topic text"))
    session = EvaluationSession(g, steps, embedder)
    assert session.place_agent(steps[0])[0] == 0


def test_place_agent_requires_topics(embedder):
    g = MapGraph()
    g.add_node("bare")
    steps = _steps(("COMMANDER", "anything"))
    session = EvaluationSession(g, steps, embedder)
    with pytest.raises(ValueError, match="no topic texts"):
        session.place_agent(steps[0])


def test_session_rejects_more_than_two_roles(embedder):
    steps = _steps(("A", "x"), ("B", "y"), ("C", "z"))
    with pytest.raises(ValueError, match="two agents"):
        EvaluationSession(_mini_map(), steps, embedder)


# -- advance/reverse/reset -----------------------------------------------------------


def test_advance_reverse_is_identity(embedder):
    graph = load_roe_map()
    steps = load_roe_script()
    session = EvaluationSession(graph, steps, embedder)
    for n_advances in range(1, 4):
        session.reset()
        for _ in range(n_advances):
            session.advance()
        snapshot = (session.cursor, copy.deepcopy(session.agents), list(session.records))
        assert session.advance() is not None
        assert session.reverse()
        assert session.cursor == snapshot[0]
        assert session.agents == snapshot[1]
        assert session.records == snapshot[2]


def test_reverse_at_start_is_noop_signal(embedder):
    session = EvaluationSession(_mini_map(), _steps(("A", "alpha")), embedder)
    assert session.reverse() is False


def test_advance_past_end_is_noop_signal(embedder):
    session = EvaluationSession(_mini_map(), _steps(("A", "alpha")), embedder)
    assert session.advance() is not None
    assert session.advance() is None
    assert session.cursor == 1


def test_reset_unplaces_agents(embedder):
    session = EvaluationSession(_mini_map(), _steps(("A", "alpha"), ("B", "delta")), embedder)
    session.advance()
    session.advance()
    session.reset()
    assert session.cursor == 0
    assert session.agents == {}
    assert session.records == []


def test_same_node_distance_is_exactly_zero(embedder):
    steps = _steps(("COMMANDER", "alpha beta gamma"), ("SUBORDINATE", "alpha beta"))
    session = EvaluationSession(_mini_map(), steps, embedder)
    session.advance()
    rec = session.advance()
    assert rec.node_dist == 0.0


def test_first_row_uses_counterpart_lookahead(embedder):
    # commander places first; distance uses the subordinate's upcoming node
    steps = _steps(("COMMANDER", "alpha beta gamma"), ("SUBORDINATE", "delta epsilon"))
    session = EvaluationSession(_mini_map(), steps, embedder)
    first = session.advance()
    assert first.node_dist == pytest.approx(50.0)  # (0,0) to (30,40)
    second = session.advance()
    assert second.node_dist == pytest.approx(50.0)


def test_single_role_script_distance_zero(embedder):
    steps = _steps(("COMMANDER", "alpha"), ("COMMANDER", "delta"))
    session = EvaluationSession(_mini_map(), steps, embedder)
    assert session.advance().node_dist == 0.0


def test_text_similarity_absent_exactly_for_commander(embedder):
    graph = load_roe_map()
    session = EvaluationSession(graph, load_roe_script(), embedder)
    while session.advance() is not None:
        pass
    for rec in session.records:
        if rec.role == "COMMANDER":
            assert rec.text_similarity is None
        else:
            assert rec.text_similarity is not None


def test_placement_is_deterministic(embedder):
    graph = load_roe_map()
    steps = load_roe_script()
    runs = []
    for _ in range(2):
        session = EvaluationSession(graph, steps, embedder)
        while session.advance() is not None:
            pass
        runs.append(session.records)
    assert runs[0] == runs[1]


def test_restore_replays_to_cursor(embedder):
    graph = load_roe_map()
    steps = load_roe_script()
    session = EvaluationSession(graph, steps, embedder)
    for _ in range(5):
        session.advance()
    restored = EvaluationSession.restore(graph, steps, embedder, 5)
    assert restored.cursor == 5
    assert restored.records == session.records
    assert restored.agents == session.agents


def test_tick_moves_agents_toward_targets(embedder):
    graph = load_roe_map()
    steps = load_roe_script()
    session = EvaluationSession(graph, steps, embedder)
    session.advance()
    session.advance()  # subordinate placed at "duty"
    agent = session.agents["SUBORDINATE"]
    agent.position = (agent.position[0] + 30.0, agent.position[1])
    before = agent.position
    session.tick(1 / 60)
    target = graph.nodes[agent.target_node].position
    d_before = math.hypot(before[0] - target[0], before[1] - target[1])
    d_after = math.hypot(agent.position[0] - target[0], agent.position[1] - target[1])
    assert d_after < d_before


# -- statistics ----------------------------------------------------------------------


def test_pearson_perfect_linear():
    assert abs(pearson([1, 2, 3], [2, 4, 6]) - 1.0) < 1e-12
    assert abs(pearson([1, 2, 3], [3, 2, 1]) + 1.0) < 1e-12


def test_pearson_constant_series_is_undefined():
    assert pearson([1, 1, 1], [1, 2, 3]) is None


def test_pearson_requires_two_pairs():
    with pytest.raises(ValueError):
        pearson([1.0], [2.0])


def two_pass_pearson(xs, ys):
    """Definitional oracle: two-pass mean/covariance in plain Python."""
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sx = math.sqrt(sum((x - mx) ** 2 for x in xs))
    sy = math.sqrt(sum((y - my) ** 2 for y in ys))
    return cov / (sx * sy)


def test_pearson_matches_definitional_oracle():
    rng = random.Random(50)
    for _ in range(50):
        n = rng.randint(2, 60)
        xs = [rng.uniform(0, 150) for _ in range(n)]
        ys = [rng.uniform(0, 1) for _ in range(n)]
        if len(set(xs)) < 2 or len(set(ys)) < 2:
            continue
        assert abs(pearson(xs, ys) - two_pass_pearson(xs, ys)) < 1e-12


def _table_records():
    rows = [
        (1, "COMMANDER", 0.621, "careful", 88.63, None),
        (2, "SUBORDINATE", 0.758, "duty", 88.63, 0.5856),
        (3, "SUBORDINATE", 0.711, "careful", 0.00, 0.7165),
        (4, "COMMANDER", 0.758, "careful", 0.00, None),
        (5, "SUBORDINATE", 0.822, "kill the enemy", 134.05, 0.7365),
        (6, "SUBORDINATE", 0.636, "self-protect", 63.78, 0.4733),
        (7, "SUBORDINATE", 0.722, "the enemy", 142.33, 0.4173),
        (8, "SUBORDINATE", 0.741, "kill the enemy", 134.05, 0.5952),
    ]
    return [TrajectoryRecord(*row) for row in rows]


def test_trajectory_stats_exposes_both_computations():
    stats = trajectory_stats(_table_records())
    assert stats.pearson is not None
    assert stats.pearson_filled is not None
    assert -1.0 <= stats.pearson <= 1.0
    assert len(stats.table) == 8


def test_trajectory_stats_requires_two_complete_pairs():
    records = _table_records()[:1]
    with pytest.raises(ValueError):
        trajectory_stats(records)


# -- CSV ----------------------------------------------------------------------------------


def test_csv_golden_bytes():
    golden = (DATA / "table1_golden.csv").read_text(encoding="utf-8")
    assert export_trajectory_csv(_table_records()) == golden
    assert "2,SUBORDINATE,0.7580,duty,88.63,0.5856" in golden.splitlines()[2]


def test_csv_empty_records_header_only():
    assert export_trajectory_csv([]) == (
        "script_id,role,similarity,node,node_dist,text_similarity\n"
    )


def test_csv_missing_text_similarity_is_na():
    rec = TrajectoryRecord(1, "COMMANDER", 0.5, "x", 1.0, None)
    assert export_trajectory_csv([rec]).splitlines()[1].endswith(",NA")
