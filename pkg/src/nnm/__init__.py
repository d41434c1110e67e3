"""Neural narrative maps: build concept graphs by iteratively prompting a
text-generation model, spatialize them with a force-directed layout, and
evaluate scripted dialogues as trajectories over the map."""

from .backends import BackendError, FixtureBackend, OpenAICompletionBackend, RecordingBackend
from .builder import (
    BuildError,
    BuildReport,
    MapperState,
    PromptTemplate,
    build_map,
    parse_fragments,
    parse_response,
)
from .gml import GmlError, export_gml, import_gml
from .graph import MapGraph, MapNode, TopicText, normalize_name
from .layout import LayoutParams, LayoutResult, init_positions, layout_step, run_layout
from .script import (
    Agent,
    EvaluationSession,
    ScriptStep,
    TrajectoryRecord,
    animate,
    export_trajectory_csv,
    load_script,
    pearson,
    trajectory_stats,
)
from .similarity import Embedder, HashedBagEmbedder, RemoteEmbedder, find_closest, similarity
from .validators import (
    AcceptAllValidator,
    AllowlistValidator,
    PageExistenceValidator,
    ValidatorError,
)

__version__ = "0.1.0"
