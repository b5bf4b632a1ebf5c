"""feedlab: classroom-scale social media mechanism simulator.

Makes tracking, profiling, engagement scoring and recommendation observable
in real time across paired devices, and ships the statistics toolkit used
to evaluate pre/post survey data from the classroom intervention.
"""

from .engagement import WeightTable, apply_event, engagement_table, initial_state
from .errors import FeedlabError, ValidationError
from .gamekit import GameScript, GameState, ProfileDraft
from .model import (
    AffinityProfile,
    EngagementCell,
    EventRecord,
    GivenData,
    ImageItem,
    Manifest,
    RecommendationSlot,
)
from .profiling import compute_profile, cosine_similarity, word_cloud
from .recsys import RecConfig, RoomSnapshot, collab_score, content_score, next_queue
from .service import Connection, Hub, RoomConfig, SessionInfo, replay
from .socialgraph import Graph, clusters, co_engagement, similarity_graph

__version__ = "0.1.0"

__all__ = [
    "AffinityProfile",
    "Connection",
    "EngagementCell",
    "EventRecord",
    "FeedlabError",
    "GameScript",
    "GameState",
    "GivenData",
    "Graph",
    "Hub",
    "ImageItem",
    "Manifest",
    "ProfileDraft",
    "RecConfig",
    "RecommendationSlot",
    "RoomConfig",
    "RoomSnapshot",
    "SessionInfo",
    "ValidationError",
    "WeightTable",
    "apply_event",
    "clusters",
    "co_engagement",
    "collab_score",
    "compute_profile",
    "content_score",
    "cosine_similarity",
    "engagement_table",
    "initial_state",
    "next_queue",
    "replay",
    "similarity_graph",
    "word_cloud",
]
