"""Materialize a tiny, randomly initialized seq2seq checkpoint on disk.

Useful where no pretrained checkpoint can be downloaded: the resulting model
speaks the full wire protocol deterministically (fixed seed, greedy
decoding), it just answers nonsense. Tests and offline smoke runs use it.
"""

from __future__ import annotations

from pathlib import Path

DEFAULT_WORDS = (
    "question context answer the a an of in on and or was were is are what"
    " who when which color city river game team player score points slime"
    " pink green blue sponsor chevron museum observatory comet dough violin"
    " farmers crops quarterback championship record crowd winter autumn"
).split()


def build_tiny_model(
    out_dir: str | Path,
    seed: int = 0,
    words: list[str] | None = None,
    d_model: int = 64,
    num_layers: int = 2,
) -> Path:
    import torch
    from tokenizers import Tokenizer
    from tokenizers.models import WordLevel
    from tokenizers.pre_tokenizers import Whitespace
    from transformers import PreTrainedTokenizerFast, T5Config, T5ForConditionalGeneration

    out_dir = Path(out_dir)
    vocab = {"<pad>": 0, "</s>": 1, "<unk>": 2}
    for word in words or DEFAULT_WORDS:
        token = word.lower()
        if token not in vocab:
            vocab[token] = len(vocab)

    raw = Tokenizer(WordLevel(vocab, unk_token="<unk>"))
    raw.pre_tokenizer = Whitespace()
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=raw, pad_token="<pad>", eos_token="</s>", unk_token="<unk>"
    )

    config = T5Config(
        vocab_size=len(vocab),
        d_model=d_model,
        d_ff=2 * d_model,
        d_kv=d_model // 4,
        num_heads=4,
        num_layers=num_layers,
        num_decoder_layers=num_layers,
        decoder_start_token_id=0,
        pad_token_id=0,
        eos_token_id=1,
    )
    torch.manual_seed(seed)
    model = T5ForConditionalGeneration(config)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return out_dir
