// Wire types for the map-service JSON API.

export interface TopicTextDoc {
  text: string;
  source: string;
  prompt: string | null;
  created_at: string;
}

export interface NodeDoc {
  id: number;
  name: string;
  group: string | null;
  query_count: number;
  position: [number, number] | null;
  topics: TopicTextDoc[];
}

export interface GraphDoc {
  schema_version: number;
  layout_seed: number | null;
  nodes: NodeDoc[];
  edges: [number, number][];
}

export interface FragmentDoc {
  id: number;
  text: string;
  prompt: string;
  seed_node: number;
}

export interface ScriptStepDoc {
  id: number;
  role: string;
  time: string;
  node_hint: string | null;
  text: string;
}

export interface ScriptDoc {
  steps: ScriptStepDoc[];
}

export interface AgentDoc {
  role: string;
  position: [number, number];
  speed: number;
  target_node: number | null;
  color: string;
}

export interface RecordDoc {
  step_id: number;
  role: string;
  match_similarity: number;
  node: string;
  node_dist: number;
  text_similarity: number | null;
}

export interface EvaluationDoc {
  cursor: number;
  agents: Record<string, AgentDoc>;
  records: RecordDoc[];
}

export interface SessionDocument {
  schema_version: number;
  session_id: string;
  graph: GraphDoc;
  pending: FragmentDoc[];
  next_fragment_id: number;
  script: ScriptDoc | null;
  evaluation: EvaluationDoc | null;
  updated_at: string;
}

export interface FrameResponse {
  cursor: number;
  agents: Record<string, AgentDoc>;
  records: RecordDoc[];
}

export interface SimilarResult {
  node_id: number;
  node: string;
  text: string;
  score: number;
}

export interface StepOutcome {
  cursor: number;
  moved: boolean;
  record?: RecordDoc | null;
}

export interface LayoutRequest {
  repulsion_k?: number;
  gravity_k?: number;
  iterations?: number;
  step_decay?: number;
  seed?: number;
}
