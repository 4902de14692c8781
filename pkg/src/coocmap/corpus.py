"""Corpus ingestion: byte slicing, tokenization, vocabularies, id encoding."""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ValidationError

UNK_TOKEN = "[UNK]"
UNK_ID = 0
DEFAULT_VOCAB_SIZE = 5000


@dataclass(frozen=True)
class Vocabulary:
    """Frequency-ranked token list; index is the token id, id 0 is [UNK]."""

    tokens: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.tokens) < 1 or self.tokens[0] != UNK_TOKEN:
            raise ValidationError("vocabulary must start with %r at id 0" % UNK_TOKEN)
        index = {tok: i for i, tok in enumerate(self.tokens)}
        if len(index) != len(self.tokens):
            raise ValidationError("vocabulary tokens must be unique")
        object.__setattr__(self, "_index", index)

    @property
    def size(self) -> int:
        return len(self.tokens)

    @property
    def unk_id(self) -> int:
        return UNK_ID

    def id_of(self, token: str) -> int:
        return self._index.get(token, UNK_ID)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.tokens[i] for i in ids]

    @property
    def digest(self) -> str:
        blob = "\n".join(self.tokens).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for tok in self.tokens:
                f.write(tok + "\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as f:
            tokens = [line.rstrip("\n") for line in f]
        if not tokens:
            raise ValidationError(f"empty vocabulary file: {path}")
        return cls(tuple(tokens))


@dataclass(frozen=True)
class EncodedCorpus:
    """Token ids plus the positions where input lines ended."""

    ids: np.ndarray  # int32
    line_breaks: np.ndarray  # cumulative end offsets, strictly increasing
    vocab: Vocabulary


def take_head_bytes(path, n: int) -> str:
    """First n bytes of the file, truncated back to the last complete line."""
    if n < 0:
        raise ValidationError(f"byte budget must be >= 0, got {n}")
    with open(path, "rb") as f:
        head = f.read(n)
    cut = head.rfind(b"\n")
    head = head[: cut + 1] if cut >= 0 else b""
    return head.decode("utf-8")


def tokenize(text: str) -> list[list[str]]:
    """Lowercase and split each line on runs of whitespace.

    A trailing newline terminates the last line rather than opening an
    empty one; interior empty lines are kept as empty token lists.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line.lower().split() for line in lines]


def build_vocab(tokens: Iterable[str], v_max: int = DEFAULT_VOCAB_SIZE) -> Vocabulary:
    """[UNK] plus the v_max - 1 most frequent tokens, ties by first occurrence."""
    if v_max < 1:
        raise ValidationError(f"v_max must be >= 1, got {v_max}")
    counts = Counter(tokens)
    counts.pop(UNK_TOKEN, None)
    # Counter preserves insertion order, and most_common is a stable sort,
    # so equal counts keep first-occurrence order.
    ranked = [tok for tok, _ in counts.most_common(v_max - 1)]
    return Vocabulary((UNK_TOKEN, *ranked))


def encode(lines: list[list[str]], vocab: Vocabulary) -> EncodedCorpus:
    """Map tokens to ids (OOV -> unk) and record line end positions."""
    ids: list[int] = []
    breaks: list[int] = []
    for line in lines:
        ids.extend(vocab.id_of(tok) for tok in line)
        if line:
            breaks.append(len(ids))
    return EncodedCorpus(
        ids=np.asarray(ids, dtype=np.int32),
        line_breaks=np.asarray(breaks, dtype=np.int64),
        vocab=vocab,
    )


def read_corpus(path, n_bytes: int, v_max: int = DEFAULT_VOCAB_SIZE):
    """Slice, tokenize, build the vocabulary, and encode in one pass.

    Returns (EncodedCorpus, token count before truncation to vocab).
    """
    lines = tokenize(take_head_bytes(path, n_bytes))
    flat = (tok for line in lines for tok in line)
    vocab = build_vocab(flat, v_max)
    enc = encode(lines, vocab)
    return enc, int(enc.ids.size)
