"""Structured story frames.

Build frames from entities, events, relationships, and an outline; parse
stories into frames and generate stories from them through a chat model;
score stories on a seven-dimension rubric; measure text and structure
similarity; and assemble preference-pair datasets. A CLI and an HTTP service
wrap the same machinery.
"""

from .builder import FrameBuilder, ValidationReport
from .canonical import (
    document_to_frame,
    frame_to_document,
    from_canonical_json,
    strip_unit,
    strip_unit_document,
    to_canonical_json,
)
from .dataset import (
    PreferencePair,
    ablate_dataset,
    build_dataset,
    build_pair,
    dataset_stats,
    ingest_corpus,
    split_dataset,
)
from .diagram import build_diagram
from .judge import DIMENSIONS, EvaluationReport, judge_story
from .llm import ChatMessage, ChatRequest, ChatResponse, ClientConfig, HttpChatClient, MockChatClient
from .model import Entity, Event, Outline, Relationship, StoryFrame
from .pipeline import ChainState, GenerationResult, Strategy, generate_story, regenerate_story, run_parse_chain

__version__ = "0.1.0"

__all__ = [
    "DIMENSIONS",
    "ChainState",
    "ChatMessage",
    "ChatRequest",
    "ChatResponse",
    "ClientConfig",
    "Entity",
    "EvaluationReport",
    "Event",
    "FrameBuilder",
    "GenerationResult",
    "HttpChatClient",
    "MockChatClient",
    "Outline",
    "PreferencePair",
    "Relationship",
    "StoryFrame",
    "Strategy",
    "ValidationReport",
    "ablate_dataset",
    "build_dataset",
    "build_diagram",
    "build_pair",
    "dataset_stats",
    "document_to_frame",
    "frame_to_document",
    "from_canonical_json",
    "generate_story",
    "ingest_corpus",
    "judge_story",
    "regenerate_story",
    "run_parse_chain",
    "split_dataset",
    "strip_unit",
    "strip_unit_document",
    "to_canonical_json",
]
