"""Association matrices: the sqrt-and-normalize default, the classic
alternatives (marginal ratio, weighted PMI, positive PMI, centered log),
vector import/export, and replayable transform chains.

Every matrix records the chain of steps that produced it; replaying the
chain on the same counts reproduces the data bitwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cooc import CoocMatrix
from .corpus import Vocabulary
from .errors import ValidationError


@dataclass(frozen=True)
class AssocMatrix:
    data: np.ndarray  # V x V or V x d
    chain: tuple[str, ...]
    vocab_digest: str


@dataclass(frozen=True)
class WordVectors:
    data: np.ndarray  # V x d
    vocab_digest: str


def _marginals(counts: np.ndarray):
    total = counts.sum()
    P = counts / total if total > 0 else np.zeros_like(counts)
    return P, P.sum(axis=1), P.sum(axis=0)


def _ratio(counts: np.ndarray) -> np.ndarray:
    """p(s,i) / (p(s) p(i)); zero wherever a marginal (or the cell) is zero."""
    P, ps, pi = _marginals(counts)
    denom = np.outer(ps, pi)
    out = np.zeros_like(P)
    np.divide(P, denom, out=out, where=denom > 0)
    return out


def _weighted_pmi(counts: np.ndarray) -> np.ndarray:
    """p(s,i) * log(p(s,i) / (p(s) p(i))), with 0 log 0 := 0."""
    P, ps, pi = _marginals(counts)
    denom = np.outer(ps, pi)
    mask = (P > 0) & (denom > 0)
    out = np.zeros_like(P)
    out[mask] = P[mask] * np.log(P[mask] / denom[mask])
    return out


def _ppmi(counts: np.ndarray, k: float) -> np.ndarray:
    """max(0, log(p(s,i) / (p(s) p(i))) - log k)."""
    if k <= 0:
        raise ValidationError(f"ppmi shift must be > 0, got {k}")
    P, ps, pi = _marginals(counts)
    denom = np.outer(ps, pi)
    mask = (P > 0) & (denom > 0)
    out = np.zeros_like(P)
    out[mask] = np.maximum(0.0, np.log(P[mask] / denom[mask]) - np.log(k))
    return out


def _centered_log(counts: np.ndarray) -> np.ndarray:
    """log(1+C) minus its row means, then minus the column means of that."""
    L = np.log1p(counts)
    G = L - L.mean(axis=1, keepdims=True)
    return G - G.mean(axis=0, keepdims=True)


_STEP_RE = re.compile(r"^([a-z0-9_]+)(?:\(([^)]*)\))?$")

_STEPS = {
    "epow": lambda X, a: kernels.epow(X, a),
    "log1p": lambda X: np.log1p(np.asarray(X, dtype=np.float64)),
    "ratio": lambda X: _ratio(X),
    "wpmi": lambda X: _weighted_pmi(X),
    "ppmi": lambda X, k: _ppmi(X, k),
    "centered_log": lambda X: _centered_log(X),
    "gram_sqrt": lambda X: kernels.psd_sqrt_gram(X),
    "normalize": lambda X: kernels.normalize(X),
    "unit_l1": lambda X: kernels.unitr_l1(X),
    "unit_l2": lambda X: kernels.unitr(X),
    "clip": lambda X, lo, hi: kernels.clip(X, lo, hi),
    "drop": lambda X, r: kernels.drop_head(X, int(r)),
    "trunc": lambda X, r: kernels.trunc(X, int(r)),
}


def parse_step(step: str):
    m = _STEP_RE.match(step.strip())
    if not m or m.group(1) not in _STEPS:
        raise ValidationError(f"unknown pipeline step {step!r}")
    name = m.group(1)
    args = tuple(float(a) for a in m.group(2).split(",")) if m.group(2) else ()
    return name, args


def replay_chain(source: np.ndarray, chain) -> np.ndarray:
    """Run a recorded chain of steps against raw counts (or raw vectors)."""
    data = np.asarray(source, dtype=np.float64)
    for step in chain:
        name, args = parse_step(step)
        data = _STEPS[name](data, *args)
    return data


# canonical constructor chains, keyed by the preset-facing name
CONSTRUCTOR_CHAINS = {
    "coocmap": ("epow(0.5)", "normalize"),
    "log1p": ("log1p", "normalize"),
    "rapp": ("ratio", "unit_l1"),
    "fung": ("wpmi", "unit_l1"),
    "ppmi": ("ppmi(1)", "unit_l2"),
    "glove": ("centered_log", "unit_l2"),
}


def build(name: str, C: CoocMatrix) -> AssocMatrix:
    """Construct the named association matrix from co-occurrence counts."""
    if name not in CONSTRUCTOR_CHAINS:
        raise ValidationError(
            f"unknown association {name!r}, expected one of {sorted(CONSTRUCTOR_CHAINS)}"
        )
    chain = CONSTRUCTOR_CHAINS[name]
    return AssocMatrix(
        data=replay_chain(C.counts, chain), chain=chain, vocab_digest=C.vocab_digest
    )


def coocmap_assoc(C: CoocMatrix) -> AssocMatrix:
    """normalize(sqrt(counts)): the default association matrix."""
    return build("coocmap", C)


def log1p_assoc(C: CoocMatrix) -> AssocMatrix:
    return build("log1p", C)


def rapp_assoc(C: CoocMatrix) -> AssocMatrix:
    return build("rapp", C)


def fung_assoc(C: CoocMatrix) -> AssocMatrix:
    return build("fung", C)


def ppmi_assoc(C: CoocMatrix, k: float = 1.0) -> AssocMatrix:
    chain = (f"ppmi({k:g})", "unit_l2")
    return AssocMatrix(
        data=replay_chain(C.counts, chain), chain=chain, vocab_digest=C.vocab_digest
    )


def glove_assoc(C: CoocMatrix) -> AssocMatrix:
    return build("glove", C)


def assoc_from_vectors(Xv: WordVectors) -> AssocMatrix:
    """normalize((Xv Xv^T)^(1/2)): word vectors lifted to association space."""
    chain = ("gram_sqrt", "normalize")
    return AssocMatrix(
        data=replay_chain(Xv.data, chain), chain=chain, vocab_digest=Xv.vocab_digest
    )


def svd_vectors(C: CoocMatrix, r: int = 300) -> WordVectors:
    """Left singular vectors of sqrt(counts) scaled by the top-r values."""
    if r < 1:
        raise ValidationError(f"vector dimension must be >= 1, got {r}")
    f = kernels.svd(kernels.epow(C.counts, 0.5))
    r = min(r, f.S.size)
    return WordVectors(data=f.U[:, :r] * f.S[:r], vocab_digest=C.vocab_digest)


def apply_pipeline(A: AssocMatrix, steps) -> AssocMatrix:
    """Apply steps left to right, extending the recorded chain."""
    data = A.data
    applied = []
    for step in steps:
        name, args = parse_step(step)
        data = _STEPS[name](data, *args)
        applied.append(step)
    return AssocMatrix(
        data=data, chain=A.chain + tuple(applied), vocab_digest=A.vocab_digest
    )


def save_vectors(Xv: WordVectors, vocab: Vocabulary, path) -> None:
    """Text format: header "V d", then one "token v1 ... vd" line per word."""
    V, d = Xv.data.shape
    if V != vocab.size:
        raise ValidationError(f"vectors have {V} rows but vocabulary has {vocab.size}")
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{V} {d}\n")
        for tok, row in zip(vocab.tokens, Xv.data):
            f.write(tok + " " + " ".join(repr(float(x)) for x in row) + "\n")


def load_vectors(path, vocab: Vocabulary):
    """Read vectors aligned to the given vocabulary.

    File words outside the vocabulary are skipped; vocabulary words missing
    from the file keep zero vectors and are returned for reporting.
    """
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValidationError(f"{path}:1: expected header 'V d'")
        _, d = (int(x) for x in header)
        data = np.zeros((vocab.size, d))
        seen = np.zeros(vocab.size, dtype=bool)
        for lineno, line in enumerate(f, start=2):
            parts = line.rstrip("\n").split(" ")
            if len(parts) != d + 1:
                raise ValidationError(f"{path}:{lineno}: expected 1 token + {d} values")
            wid = vocab.id_of(parts[0])
            if wid == vocab.unk_id and parts[0] != vocab.tokens[vocab.unk_id]:
                continue  # word not in the current vocabulary
            data[wid] = [float(x) for x in parts[1:]]
            seen[wid] = True
    missing = [tok for tok, s in zip(vocab.tokens, seen) if not s]
    return WordVectors(data=data, vocab_digest=vocab.digest), missing
