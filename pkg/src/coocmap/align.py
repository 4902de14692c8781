"""Alignment engine: CSLS, bidirectional matching, the self-learning loops,
and the staged clip/drop pipeline driver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import assoc
from .cooc import CoocMatrix
from .errors import ValidationError
from .kernels import normalize, procrustes, psd_sqrt_gram, sim_matrix

# mean of the k largest entries per row


def _topk_mean(S: np.ndarray, k: int) -> np.ndarray:
    if k == S.shape[1]:
        return S.mean(axis=1)
    return np.partition(S, -k, axis=1)[:, -k:].mean(axis=1)


def csls(S: np.ndarray, k: int) -> np.ndarray:
    """Penalize each similarity by the mean of its row's and column's k best
    values, so matches must stand out from their neighborhoods."""
    S = np.asarray(S, dtype=np.float64)
    if k < 1 or k > min(S.shape):
        raise ValidationError(f"csls k={k} out of range for {S.shape} matrix")
    row_pen = _topk_mean(S, k)
    col_pen = _topk_mean(S.T, k)
    return S - (row_pen[:, None] + col_pen[None, :]) / 2.0


def objective(S: np.ndarray) -> float:
    """Mean over rows of the best similarity in each row."""
    return float(np.mean(np.max(S, axis=1)))


@dataclass
class MatchState:
    """Paired index sequences: s[i] in V1 corresponds to t[i] in V2."""

    s: np.ndarray
    t: np.ndarray
    objective: float = 0.0

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=np.int64)
        self.t = np.asarray(self.t, dtype=np.int64)
        if self.s.shape != self.t.shape or self.s.size < 1:
            raise ValidationError("s and t must be nonempty and the same length")


def match_bidirectional(S: np.ndarray) -> MatchState:
    """Forward argmax per row plus backward argmax per column; always emits
    rows + cols pairs, ties resolved to the lowest index."""
    S = np.asarray(S)
    n, m = S.shape
    fwd = S.argmax(axis=1)
    bwd = S.argmax(axis=0)
    s = np.concatenate([np.arange(n), bwd])
    t = np.concatenate([fwd, np.arange(m)])
    return MatchState(s=s, t=t, objective=objective(S))


@dataclass(frozen=True)
class Stage2Config:
    """Second self-learning stage on a head-dropped, re-clipped matrix."""

    drop_r: int = 20
    clip: tuple[float, float] | None = (1.0, 99.0)


@dataclass(frozen=True)
class AlignConfig:
    csls_k: int = 10
    max_iters: int = 100
    tol: float = 1e-6
    metric: str = "cosine"
    clip: tuple[float, float] | None = None  # stage-1 clip percentiles
    stage2: Stage2Config | None = None
    dim: int | None = None  # optional rank truncation of the association

    def __post_init__(self):
        if self.csls_k < 1 or self.max_iters < 1 or self.tol < 0:
            raise ValidationError("csls_k and max_iters must be >= 1, tol >= 0")


def _matrix_data(X) -> np.ndarray:
    return np.asarray(getattr(X, "data", X), dtype=np.float64)


def unsupervised_init(X, Z, cfg: AlignConfig) -> MatchState:
    """Seed correspondence from per-row sorted association profiles."""
    Xd, Zd = _matrix_data(X), _matrix_data(Z)
    width = min(Xd.shape[1], Zd.shape[1])
    # unequal widths: keep the low/middle quantiles of the sorted rows
    Rx = np.sort(Xd, axis=1)[:, :width]
    Rz = np.sort(Zd, axis=1)[:, :width]
    S = sim_matrix(normalize(Rx), normalize(Rz), cfg.metric)
    state = match_bidirectional(csls(S, cfg.csls_k))
    state.objective = objective(S)
    return state


def _selflearn(measure, init: MatchState, cfg: AlignConfig):
    """Alternate measuring similarities under (s, t) and re-matching until the
    objective stops improving; returns the best state seen and the trace."""
    s, t = init.s, init.t
    best: MatchState | None = None
    prev = None
    trace: list[float] = []
    for _ in range(cfg.max_iters):
        S = measure(s, t)
        obj = objective(S)
        state = match_bidirectional(csls(S, cfg.csls_k))
        state.objective = obj
        s, t = state.s, state.t
        trace.append(obj)
        if best is None or obj > best.objective:
            best = state
        if prev is not None and obj - prev < cfg.tol:
            break
        prev = obj
    assert best is not None
    return best, trace


def coocmap_selflearn(X, Z, init: MatchState, cfg: AlignConfig):
    """Self-learning on association columns: similarity of X[:, s] vs Z[:, t]."""
    Xd, Zd = _matrix_data(X), _matrix_data(Z)
    if init.s.max() >= Xd.shape[1] or init.t.max() >= Zd.shape[1]:
        raise ValidationError("initial match indices out of range")
    if init.s.min() < 0 or init.t.min() < 0:
        raise ValidationError("initial match indices out of range")

    def measure(s, t):
        return sim_matrix(Xd[:, s], Zd[:, t], cfg.metric)

    return _selflearn(measure, init, cfg)


def vecmap_selflearn(Xv, Zv, init: MatchState, cfg: AlignConfig):
    """Self-learning in vector space: solve an orthogonal map on the matched
    pairs, then re-match by cosine similarity of the mapped vectors."""
    Xn = normalize(_matrix_data(Xv))
    Zn = normalize(_matrix_data(Zv))
    if init.s.max() >= Xn.shape[0] or init.t.max() >= Zn.shape[0]:
        raise ValidationError("initial match indices out of range")

    def measure(s, t):
        W = procrustes(Xn[s], Zn[t])
        return sim_matrix(Xn @ W, Zn, "cosine")

    return _selflearn(measure, init, cfg)


def drop_schedule(drop_r: int, dim: int | None) -> int:
    """Drop fewer head directions when the matrix is truncated to low rank."""
    if dim is None:
        return drop_r
    return min(drop_r, math.ceil(drop_r * dim / 400))


@dataclass
class PipelineRun:
    """Final state plus everything needed to extract translations."""

    state: MatchState
    traces: list[list[float]] = field(default_factory=list)
    X: np.ndarray | None = None
    Z: np.ndarray | None = None
    family: str = "cooc"


def stage_steps(cfg: AlignConfig, stage2: bool) -> list[str]:
    """Pipeline steps appended to the association constructor for a stage."""
    steps: list[str] = []
    if cfg.dim is not None:
        steps.append(f"trunc({cfg.dim})")
    if stage2:
        assert cfg.stage2 is not None
        steps.append(f"drop({drop_schedule(cfg.stage2.drop_r, cfg.dim)})")
        if cfg.stage2.clip is not None:
            steps.append("clip(%g,%g)" % cfg.stage2.clip)
    elif cfg.clip is not None:
        steps.append("clip(%g,%g)" % cfg.clip)
    return steps


def run_staged(
    A1: "assoc.AssocMatrix",
    A2: "assoc.AssocMatrix",
    cfg: AlignConfig,
    seed: MatchState | None = None,
) -> PipelineRun:
    """Stage 1: self-learn on the (optionally clipped) association matrices,
    starting from the sorted-row initializer or a supplied seed. Stage 2, if
    configured: rebuild with head-drop plus clip and re-learn from stage 1."""
    X = assoc.apply_pipeline(A1, stage_steps(cfg, stage2=False))
    Z = assoc.apply_pipeline(A2, stage_steps(cfg, stage2=False))
    init = seed if seed is not None else unsupervised_init(X, Z, cfg)
    state, trace1 = coocmap_selflearn(X, Z, init, cfg)
    traces = [trace1]
    if cfg.stage2 is not None:
        X = assoc.apply_pipeline(A1, stage_steps(cfg, stage2=True))
        Z = assoc.apply_pipeline(A2, stage_steps(cfg, stage2=True))
        state, trace2 = coocmap_selflearn(X, Z, state, cfg)
        traces.append(trace2)
    return PipelineRun(state=state, traces=traces, X=X.data, Z=Z.data, family="cooc")


def run_coocmap(
    C1: CoocMatrix,
    C2: CoocMatrix,
    cfg: AlignConfig,
    seed: MatchState | None = None,
    assoc_name: str = "coocmap",
) -> PipelineRun:
    """Full pipeline from raw counts via the named association constructor."""
    return run_staged(assoc.build(assoc_name, C1), assoc.build(assoc_name, C2), cfg, seed)


def run_vecmap(Xv, Zv, cfg: AlignConfig, seed: MatchState | None = None) -> PipelineRun:
    """Vector-space pipeline: gram-sqrt initializer, then Procrustes loop.

    The returned X is already mapped into the target space.
    """
    Xd, Zd = _matrix_data(Xv), _matrix_data(Zv)
    if seed is None:
        seed = unsupervised_init(psd_sqrt_gram(Xd), psd_sqrt_gram(Zd), cfg)
    state, trace = vecmap_selflearn(Xd, Zd, seed, cfg)
    Xn, Zn = normalize(Xd), normalize(Zd)
    W = procrustes(Xn[state.s], Zn[state.t])
    return PipelineRun(state=state, traces=[trace], X=Xn @ W, Z=Zn, family="vec")
