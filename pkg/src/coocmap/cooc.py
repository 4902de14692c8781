"""Window co-occurrence counting, permutation, and binary serialization."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, replace

import numpy as np

from .corpus import EncodedCorpus, Vocabulary
from .errors import IntegrityError, ValidationError

MAGIC = b"COOCMAT1"


@dataclass(frozen=True)
class CoocMatrix:
    """Symmetric V x V window co-occurrence counts for one vocabulary."""

    counts: np.ndarray  # float64, V x V
    window: int
    vocab_digest: str
    token_count: int

    @property
    def size(self) -> int:
        return self.counts.shape[0]


def count_cooc(corpus: EncodedCorpus, m: int = 5) -> CoocMatrix:
    """Count pairs within m tokens on either side, never across lines."""
    if m < 1:
        raise ValidationError(f"window size must be >= 1, got {m}")
    V = corpus.vocab.size
    ids = corpus.ids.astype(np.int64, copy=False)
    n = ids.size
    # line index of every position, from the cumulative break offsets
    seg = np.zeros(n, dtype=np.int64)
    if corpus.line_breaks.size:
        seg = np.searchsorted(corpus.line_breaks, np.arange(n), side="right")
    half = np.zeros(V * V, dtype=np.float64)
    for dj in range(1, m + 1):
        if dj >= n:
            break
        same_line = seg[:-dj] == seg[dj:]
        keys = ids[:-dj][same_line] * V + ids[dj:][same_line]
        half += np.bincount(keys, minlength=V * V)
    half = half.reshape(V, V)
    counts = half + half.T  # each ordered pair seen from both endpoints
    return CoocMatrix(
        counts=counts,
        window=m,
        vocab_digest=corpus.vocab.digest,
        token_count=n,
    )


def permute_cooc(C: CoocMatrix, pi: np.ndarray) -> CoocMatrix:
    """Relabel words: result[pi(i), pi(j)] = counts[i, j]."""
    pi = np.asarray(pi)
    V = C.size
    if pi.shape != (V,) or not np.array_equal(np.sort(pi), np.arange(V)):
        raise ValidationError("pi is not a permutation of range(V)")
    out = np.empty_like(C.counts)
    out[np.ix_(pi, pi)] = C.counts
    return replace(C, counts=out)


def save_cooc(C: CoocMatrix, path) -> None:
    header = json.dumps(
        {
            "V": C.size,
            "m": C.window,
            "token_count": C.token_count,
            "vocab_digest": C.vocab_digest,
        }
    ).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        f.write(np.ascontiguousarray(C.counts, dtype="<f8").tobytes())


def load_cooc(path, vocab: Vocabulary | None = None) -> CoocMatrix:
    """Read a counts file; if a vocabulary is given, verify its digest."""
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != MAGIC:
            raise IntegrityError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        (hlen,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(hlen).decode("utf-8"))
        V = header["V"]
        data = np.frombuffer(f.read(V * V * 8), dtype="<f8").reshape(V, V)
    if vocab is not None and vocab.digest != header["vocab_digest"]:
        raise IntegrityError(f"{path}: vocabulary digest mismatch")
    return CoocMatrix(
        counts=data.astype(np.float64),
        window=header["m"],
        vocab_digest=header["vocab_digest"],
        token_count=header["token_count"],
    )
