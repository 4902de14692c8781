"""Named pipeline presets: the single source of truth for what each method
runs, overridable flag by flag from the CLI."""

from __future__ import annotations

from dataclasses import dataclass

from .align import (
    AlignConfig,
    MatchState,
    PipelineRun,
    Stage2Config,
    run_coocmap,
    run_staged,
    run_vecmap,
)
from .assoc import WordVectors, assoc_from_vectors, svd_vectors
from .cooc import CoocMatrix
from .errors import ValidationError


@dataclass(frozen=True)
class Preset:
    name: str
    family: str  # "cooc" (match association columns) or "vec" (rotate vectors)
    assoc: str = "coocmap"  # association constructor for the cooc family
    metric: str = "cosine"
    clip: tuple[float, float] | None = None
    stage2: Stage2Config | None = None
    seed_mode: str = "unsupervised"  # or "dictionary"
    vectors: str | None = None  # "svd" | "import" when vectors are the input
    default_dim: int | None = None


PRESETS = {
    p.name: p
    for p in [
        Preset("coocmap", "cooc"),
        Preset("coocmap-clip", "cooc", clip=(1.0, 99.0)),
        Preset("coocmap-clip-1.5", "cooc", clip=(1.5, 98.5)),
        Preset(
            "coocmap-drop",
            "cooc",
            clip=(1.0, 99.0),
            stage2=Stage2Config(drop_r=20, clip=(1.0, 99.0)),
        ),
        Preset(
            "coocmap-drop-1.5",
            "cooc",
            clip=(1.5, 98.5),
            stage2=Stage2Config(drop_r=20, clip=(1.5, 98.5)),
        ),
        Preset("dict-init", "cooc", seed_mode="dictionary"),
        Preset("log1p", "cooc", assoc="log1p"),
        Preset("rapp", "cooc", assoc="rapp", metric="neg_l1"),
        Preset("fung", "cooc", assoc="fung", metric="neg_l1"),
        Preset("ppmi", "cooc", assoc="ppmi"),
        Preset("glove", "cooc", assoc="glove"),
        Preset("coocmap-vectors", "cooc", vectors="import"),
        Preset("coocmap-vectors-clip", "cooc", vectors="import", clip=(1.0, 99.0)),
        Preset("vecmap-raw", "vec", vectors="svd", default_dim=300),
        Preset("vecmap-vectors", "vec", vectors="import"),
    ]
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValidationError(
            f"unknown preset {name!r}, expected one of {sorted(PRESETS)}"
        ) from None


def align_config(
    preset: Preset,
    csls_k: int = 10,
    max_iters: int = 100,
    tol: float = 1e-6,
    dim: int | None = None,
    clip_lo: float | None = None,
    clip_hi: float | None = None,
    drop_r: int | None = None,
) -> AlignConfig:
    """Resolve a preset plus per-flag overrides into an AlignConfig."""
    clip = preset.clip
    if clip_lo is not None or clip_hi is not None:
        base = clip if clip is not None else (1.0, 99.0)
        clip = (clip_lo if clip_lo is not None else base[0],
                clip_hi if clip_hi is not None else base[1])
    stage2 = preset.stage2
    if stage2 is not None and (drop_r is not None or clip != preset.clip):
        stage2 = Stage2Config(
            drop_r=drop_r if drop_r is not None else stage2.drop_r,
            clip=clip if clip is not None else stage2.clip,
        )
    if preset.family == "vec" and dim is None:
        dim = preset.default_dim
    return AlignConfig(
        csls_k=csls_k,
        max_iters=max_iters,
        tol=tol,
        metric=preset.metric,
        clip=clip,
        stage2=stage2,
        dim=dim,
    )


def execute_preset(
    preset: Preset,
    cfg: AlignConfig,
    C1: CoocMatrix | None = None,
    C2: CoocMatrix | None = None,
    vectors1: WordVectors | None = None,
    vectors2: WordVectors | None = None,
    seed: MatchState | None = None,
) -> PipelineRun:
    """Dispatch a preset to its pipeline given counts and/or vectors."""
    if preset.vectors == "import":
        if vectors1 is None or vectors2 is None:
            raise ValidationError(f"preset {preset.name} needs vectors on both sides")
    elif C1 is None or C2 is None:
        raise ValidationError(f"preset {preset.name} needs co-occurrence counts")

    if preset.family == "vec":
        if preset.vectors == "svd":
            r = cfg.dim if cfg.dim is not None else 300
            vectors1 = svd_vectors(C1, r)
            vectors2 = svd_vectors(C2, r)
        return run_vecmap(vectors1, vectors2, cfg, seed)
    if preset.vectors == "import":
        return run_staged(
            assoc_from_vectors(vectors1), assoc_from_vectors(vectors2), cfg, seed
        )
    return run_coocmap(C1, C2, cfg, seed, assoc_name=preset.assoc)
