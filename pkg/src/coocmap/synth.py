"""Deterministic synthetic language for desk-scale benchmarks.

Text is a stream of head/companion token pairs packed into fixed-length
lines: heads follow a Zipf law over the lexicon and each type draws its
companion from a private sparse distribution. Word profiles are therefore
distinctive, estimable at realistic data sizes, and identically distributed
across any split of the stream, which is exactly what the self-translation
benchmarks need.
"""

from __future__ import annotations

import numpy as np

CONSONANTS = "bcdfgklmnprstvz"
VOWELS = "aeiou"


def lexicon(n_types: int, rng: np.random.Generator) -> list[str]:
    """n_types unique pronounceable words of three consonant-vowel syllables."""
    syllables = [c + v for c in CONSONANTS for v in VOWELS]
    n_syl = len(syllables)
    if n_types > n_syl**3:
        raise ValueError(f"at most {n_syl ** 3} types available, asked for {n_types}")
    picks = rng.choice(n_syl**3, size=n_types, replace=False)
    return [
        syllables[i // (n_syl * n_syl)]
        + syllables[(i // n_syl) % n_syl]
        + syllables[i % n_syl]
        for i in picks
    ]


def generate_corpus(
    path,
    n_bytes: int,
    seed: int = 0,
    n_types: int = 2200,
    n_companions: int = 12,
    zipf_s: float = 1.05,
    line_tokens: int = 16,
) -> int:
    """Write at least n_bytes of synthetic text to path; returns bytes written."""
    rng = np.random.default_rng(seed)
    words = np.asarray(lexicon(n_types, rng))

    ranks = np.arange(1, n_types + 1, dtype=np.float64)
    head_p = ranks**-zipf_s
    head_p /= head_p.sum()

    # per-type companion sets with a private weight profile
    comp_idx = np.empty((n_types, n_companions), dtype=np.int64)
    for w in range(n_types):
        comp_idx[w] = rng.choice(n_types, size=n_companions, replace=False)
    comp_w = rng.dirichlet(np.ones(n_companions), size=n_types)
    comp_cum = np.cumsum(comp_w, axis=1)

    written = 0
    events_per_chunk = 200_000
    with open(path, "w", encoding="utf-8") as f:
        while written < n_bytes:
            heads = rng.choice(n_types, size=events_per_chunk, p=head_p)
            u = rng.random(events_per_chunk)
            pick = (comp_cum[heads] < u[:, None]).sum(axis=1)
            pick = np.minimum(pick, n_companions - 1)
            comps = comp_idx[heads, pick]
            tokens = np.empty(2 * events_per_chunk, dtype=np.int64)
            tokens[0::2] = heads
            tokens[1::2] = comps
            usable = (tokens.size // line_tokens) * line_tokens
            grid = words[tokens[:usable]].reshape(-1, line_tokens)
            chunk = "\n".join(" ".join(row) for row in grid) + "\n"
            f.write(chunk)
            written += len(chunk.encode("utf-8"))
    return written
