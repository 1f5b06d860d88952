"""Model backend: greedy seq2seq decoding with per-step emitted-token
probabilities, and mean-pooled unit-norm encoder embeddings.

token_probs[i] is the softmax probability, over the decoding distribution at
step i, of the token actually emitted there. Special tokens (pad/unk) are
suppressed during decoding so every reported step corresponds to a token of
the answer text; eos terminates generation and is not reported.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import torch
from transformers import AutoModel, AutoModelForSeq2SeqLM, AutoTokenizer


@dataclass
class SidecarConfig:
    generator_model_name: str
    embedder_model_name: str | None = None  # None: reuse the generator's encoder
    port: int = 8500
    max_tokens_cap: int = 256
    max_batch_cap: int = 256
    max_input_tokens: int = 512

    def __post_init__(self):
        if self.max_tokens_cap < 1:
            raise ValueError(f"max_tokens_cap must be >= 1, got {self.max_tokens_cap}")
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port must be in [1, 65535], got {self.port}")


class Seq2SeqBackend:
    """Wraps a generator checkpoint (and optionally a separate embedder).

    All model calls are serialized behind a lock; responses depend only on
    the request payload, never on arrival order.
    """

    def __init__(self, config: SidecarConfig):
        self.config = config
        self._lock = threading.Lock()
        self.tokenizer = AutoTokenizer.from_pretrained(config.generator_model_name)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(config.generator_model_name).eval()
        if config.embedder_model_name and config.embedder_model_name != config.generator_model_name:
            self.embed_tokenizer = AutoTokenizer.from_pretrained(config.embedder_model_name)
            self.embed_model = AutoModel.from_pretrained(config.embedder_model_name).eval()
        else:
            self.embed_tokenizer = self.tokenizer
            self.embed_model = self.model.get_encoder()
        self._suppress = sorted(
            {
                tid
                for tid in (self.tokenizer.pad_token_id, self.tokenizer.unk_token_id)
                if tid is not None
            }
        )

    def generate_greedy(self, prompt: str, max_tokens: int) -> tuple[str, list[float]]:
        """Greedy decode; returns the answer text and one probability per
        emitted answer token."""
        encoded = self.tokenizer(
            prompt,
            return_tensors="pt",
            truncation=True,
            max_length=self.config.max_input_tokens,
        )
        with self._lock, torch.no_grad():
            out = self.model.generate(
                **encoded,
                max_new_tokens=max_tokens,
                min_new_tokens=1,
                do_sample=False,
                num_beams=1,
                suppress_tokens=self._suppress or None,
                output_scores=True,
                return_dict_in_generate=True,
            )
            transition = self.model.compute_transition_scores(
                out.sequences, out.scores, normalize_logits=True
            )
        generated = out.sequences[0][1:]  # drop the decoder start token
        probs = transition[0].exp()
        special = set(self.tokenizer.all_special_ids)
        kept_ids: list[int] = []
        kept_probs: list[float] = []
        for token_id, prob in zip(generated.tolist(), probs.tolist()):
            if token_id in special:
                continue
            kept_ids.append(token_id)
            # clamp away float drift; the softmax value is in (0, 1] by construction
            kept_probs.append(min(1.0, max(prob, 1e-12)))
        text = self.tokenizer.decode(kept_ids, skip_special_tokens=True).strip()
        return text, kept_probs

    def embed(self, texts: list[str]) -> tuple[list[list[float]], int]:
        """Mean-pooled encoder states, L2-normalized; returns (vectors, dim)."""
        encoded = self.embed_tokenizer(
            texts,
            return_tensors="pt",
            padding=True,
            truncation=True,
            max_length=self.config.max_input_tokens,
        )
        with self._lock, torch.no_grad():
            hidden = self.embed_model(
                input_ids=encoded["input_ids"], attention_mask=encoded["attention_mask"]
            ).last_hidden_state
        mask = encoded["attention_mask"].unsqueeze(-1).to(hidden.dtype)
        pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
        pooled = torch.nn.functional.normalize(pooled, dim=-1)
        return pooled.tolist(), int(pooled.shape[-1])
