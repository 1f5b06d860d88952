"""Inference sidecar: greedy seq2seq generation with per-step token
probabilities and unit-norm text embeddings, served over HTTP."""

from .backend import Seq2SeqBackend, SidecarConfig
from .server import create_app

__all__ = ["Seq2SeqBackend", "SidecarConfig", "create_app"]
