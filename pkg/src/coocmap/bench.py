"""Desk-scale benchmarks: split-corpus self-translation, substitution-cipher
recovery, cross-lingual runs, and the sweep driver that grids budgets,
presets, and dimensions into CSV tables."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .align import AlignConfig
from .config import parse_kv_file
from .cooc import CoocMatrix, count_cooc, permute_cooc
from .corpus import Vocabulary, build_vocab, encode, take_head_bytes, tokenize
from .errors import ValidationError
from .evaluation import (
    Dictionary,
    load_dictionary,
    precision_at_1,
    seed_from_dictionary,
    translate,
    write_predictions,
)
from .presets import align_config, execute_preset, get_preset

CSV_HEADER = ["budget_bytes", "preset", "dimension", "accuracy", "evaluated", "seconds", "error"]

MODES = ("identity", "cipher", "crosslingual")


@dataclass(frozen=True)
class BenchConfig:
    preset: str = "coocmap"
    vocab_size: int = 5000
    window: int = 5
    dim: int | None = None
    csls_k: int = 10
    max_iters: int = 100
    tol: float = 1e-6
    top_eval: int = 1000
    block_lines: int = 1000


@dataclass
class RunReport:
    """One experiment, serializable; `seconds` is the only volatile field."""

    mode: str
    preset: str
    budget_bytes: int
    dimension: int | None
    accuracy: float
    evaluated: int
    correct: int
    no_overlap: bool
    seconds: float
    vocab_sizes: tuple[int, int]
    token_counts: tuple[int, int]
    data_bytes: int
    traces: list[list[float]]
    config: dict
    seed: int | None = None
    error: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        d = json.loads(text)
        d["vocab_sizes"] = tuple(d["vocab_sizes"])
        d["token_counts"] = tuple(d["token_counts"])
        return cls(**d)


def alternate_blocks(lines: list, block: int) -> tuple[list, list]:
    """Deal consecutive blocks of lines to the two halves alternately."""
    a: list = []
    b: list = []
    for i in range(0, len(lines), block):
        (a if (i // block) % 2 == 0 else b).extend(lines[i : i + block])
    return a, b


def _build_side(lines, cfg: BenchConfig):
    vocab = build_vocab((tok for line in lines for tok in line), cfg.vocab_size)
    enc = encode(lines, vocab)
    return vocab, enc, count_cooc(enc, cfg.window)


def _align_cfg(cfg: BenchConfig) -> AlignConfig:
    return align_config(
        get_preset(cfg.preset),
        csls_k=cfg.csls_k,
        max_iters=cfg.max_iters,
        tol=cfg.tol,
        dim=cfg.dim,
    )


def _shared_top(v1: Vocabulary, v2: Vocabulary, top_eval: int) -> list[str]:
    return [tok for tok in v1.tokens if tok in v2][:top_eval]


def _report(mode, cfg: BenchConfig, budget, run, acc, evaluated, correct,
            no_overlap, t0, vocabs, tokens, data_bytes, seed=None) -> RunReport:
    return RunReport(
        mode=mode,
        preset=cfg.preset,
        budget_bytes=budget,
        dimension=cfg.dim,
        accuracy=acc,
        evaluated=evaluated,
        correct=correct,
        no_overlap=no_overlap,
        seconds=time.perf_counter() - t0,
        vocab_sizes=vocabs,
        token_counts=tokens,
        data_bytes=data_bytes,
        traces=run.traces if run is not None else [],
        config=asdict(cfg),
        seed=seed,
    )


def split_identity_bench(corpus_path, budget: int, cfg: BenchConfig, preds_out=None) -> RunReport:
    """Self-translation: align two disjoint halves of one corpus and score
    how many of the top shared tokens map to themselves."""
    t0 = time.perf_counter()
    text = take_head_bytes(corpus_path, budget)
    half_a, half_b = alternate_blocks(tokenize(text), cfg.block_lines)
    v1, enc1, C1 = _build_side(half_a, cfg)
    v2, enc2, C2 = _build_side(half_b, cfg)
    acfg = _align_cfg(cfg)
    run = execute_preset(get_preset(cfg.preset), acfg, C1, C2)
    preds = translate(run.X, run.Z, run.state, acfg, v1.tokens, v2.tokens, run.family)
    if preds_out is not None:
        identity = Dictionary({tok: frozenset([tok]) for tok in v1.tokens if tok in v2})
        write_predictions(preds, preds_out, identity)
    shared = _shared_top(v1, v2, cfg.top_eval)
    predicted = preds.as_dict()
    correct = sum(predicted[tok] == tok for tok in shared)
    acc = correct / len(shared) if shared else 0.0
    return _report(
        "identity", cfg, budget, run, acc, len(shared), correct, not shared,
        t0, (v1.size, v2.size), (int(enc1.ids.size), int(enc2.ids.size)),
        len(text.encode("utf-8")),
    )


def cipher_labels(V: int) -> tuple[str, ...]:
    return tuple("w%04d" % j for j in range(V))


def cipher_bench(
    corpus_path, budget: int, seed: int, cfg: BenchConfig, preds_out=None, pi=None
) -> RunReport:
    """Identity benchmark with one side's vocabulary scrambled by a seeded
    permutation (or an explicit one); scored against the permutation."""
    t0 = time.perf_counter()
    text = take_head_bytes(corpus_path, budget)
    half_a, half_b = alternate_blocks(tokenize(text), cfg.block_lines)
    v1, enc1, C1 = _build_side(half_a, cfg)
    v2, enc2, C2 = _build_side(half_b, cfg)
    if pi is None:
        pi = np.random.default_rng(seed).permutation(v2.size)
    C2p = permute_cooc(C2, pi)
    labels = cipher_labels(v2.size)
    acfg = _align_cfg(cfg)
    run = execute_preset(get_preset(cfg.preset), acfg, C1, C2p)
    preds = translate(run.X, run.Z, run.state, acfg, v1.tokens, labels, run.family)
    if preds_out is not None:
        truth = Dictionary(
            {tok: frozenset([labels[pi[v2.id_of(tok)]]]) for tok in v1.tokens if tok in v2}
        )
        write_predictions(preds, preds_out, truth)
    shared = _shared_top(v1, v2, cfg.top_eval)
    predicted = preds.as_dict()
    correct = sum(predicted[tok] == labels[pi[v2.id_of(tok)]] for tok in shared)
    acc = correct / len(shared) if shared else 0.0
    return _report(
        "cipher", cfg, budget, run, acc, len(shared), correct, not shared,
        t0, (v1.size, v2.size), (int(enc1.ids.size), int(enc2.ids.size)),
        len(text.encode("utf-8")), seed=seed,
    )


def crosslingual_run(
    source_path,
    target_path,
    budget: int,
    cfg: BenchConfig,
    dictionary: Dictionary | None = None,
    seed_mode: str = "unsupervised",
    preds_out=None,
) -> RunReport:
    """Two-corpus run scored with precision@1 against a reference dictionary."""
    t0 = time.perf_counter()
    text1 = take_head_bytes(source_path, budget)
    text2 = take_head_bytes(target_path, budget)
    lines1, lines2 = tokenize(text1), tokenize(text2)
    v1, enc1, C1 = _build_side(lines1, cfg)
    v2, enc2, C2 = _build_side(lines2, cfg)
    acfg = _align_cfg(cfg)
    seed_state = None
    if seed_mode == "dict-init":
        if dictionary is None:
            raise ValidationError("dict-init seeding needs a dictionary")
        seed_state = seed_from_dictionary(dictionary, v1, v2)
    run = execute_preset(get_preset(cfg.preset), acfg, C1, C2, seed=seed_state)
    preds = translate(run.X, run.Z, run.state, acfg, v1.tokens, v2.tokens, run.family)
    if preds_out is not None:
        write_predictions(preds, preds_out, dictionary)
    if dictionary is not None:
        acc, evaluated, correct, no_overlap = precision_at_1(preds, dictionary, v1, v2)
    else:
        acc, evaluated, correct, no_overlap = 0.0, 0, 0, True
    return _report(
        "crosslingual", cfg, budget, run, acc, evaluated, correct, no_overlap,
        t0, (v1.size, v2.size), (int(enc1.ids.size), int(enc2.ids.size)),
        len(text1.encode("utf-8")) + len(text2.encode("utf-8")),
    )


@dataclass(frozen=True)
class SweepSpec:
    source: str
    target: str | None = None
    mode: str = "identity"
    budgets: tuple[int, ...] = ()
    presets: tuple[str, ...] = ("coocmap",)
    dims: tuple[int, ...] = ()
    seed_mode: str = "unsupervised"
    dict_path: str | None = None
    repetitions: int = 1
    vocab_size: int = 5000
    window: int = 5
    csls_k: int = 10
    max_iters: int = 100
    tol: float = 1e-6
    top_eval: int = 1000
    block_lines: int = 1000
    cipher_seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if not self.budgets or any(b <= 0 for b in self.budgets):
            raise ValidationError("budgets must be a nonempty list of positive bytes")
        if list(self.budgets) != sorted(self.budgets):
            raise ValidationError("budgets must be ascending")
        for name in self.presets:
            get_preset(name)
        if self.mode == "crosslingual" and self.target is None:
            raise ValidationError("crosslingual mode needs a target corpus")
        if self.repetitions < 1:
            raise ValidationError("repetitions must be >= 1")

    @classmethod
    def from_file(cls, path) -> "SweepSpec":
        kv = parse_kv_file(path)
        known = {
            "source": str, "target": str, "mode": str, "seed_mode": str,
            "dict": str, "budgets": "ints", "presets": "strs", "dims": "ints",
            "repetitions": int, "vocab_size": int, "window": int,
            "csls_k": int, "max_iters": int, "tol": float, "top_eval": int,
            "block_lines": int, "cipher_seed": int,
        }
        kwargs = {}
        for key, raw in kv.items():
            if key not in known:
                raise ValidationError(f"{path}: unknown sweep key {key!r}")
            conv = known[key]
            name = "dict_path" if key == "dict" else key
            if conv == "ints":
                kwargs[name] = tuple(int(x) for x in raw.split(",") if x.strip())
            elif conv == "strs":
                kwargs[name] = tuple(x.strip() for x in raw.split(",") if x.strip())
            else:
                kwargs[name] = conv(raw)
        if "source" not in kwargs:
            raise ValidationError(f"{path}: sweep spec needs a source corpus")
        return cls(**kwargs)


def _sweep_point(spec: SweepSpec, budget: int, preset: str, dim: int | None, rep: int) -> RunReport:
    cfg = BenchConfig(
        preset=preset,
        vocab_size=spec.vocab_size,
        window=spec.window,
        dim=dim,
        csls_k=spec.csls_k,
        max_iters=spec.max_iters,
        tol=spec.tol,
        top_eval=spec.top_eval,
        block_lines=spec.block_lines,
    )
    if spec.mode == "identity":
        return split_identity_bench(spec.source, budget, cfg)
    if spec.mode == "cipher":
        return cipher_bench(spec.source, budget, spec.cipher_seed + rep, cfg)
    dictionary = load_dictionary(spec.dict_path) if spec.dict_path else None
    return crosslingual_run(
        spec.source, spec.target, budget, cfg, dictionary, spec.seed_mode
    )


def _safe_point(args) -> RunReport:
    spec, budget, preset, dim, rep = args
    try:
        return _sweep_point(spec, budget, preset, dim, rep)
    except Exception as e:  # keep sweeping; the row records the failure
        cfg = BenchConfig(preset=preset, dim=dim)
        return RunReport(
            mode=spec.mode, preset=preset, budget_bytes=budget, dimension=dim,
            accuracy=0.0, evaluated=0, correct=0, no_overlap=True, seconds=0.0,
            vocab_sizes=(0, 0), token_counts=(0, 0), data_bytes=0, traces=[],
            config=asdict(cfg), seed=None, error=f"{type(e).__name__}: {e}",
        )


def sweep_csv(reports: list[RunReport]) -> str:
    """Fixed-header CSV; `seconds` is volatile, everything else deterministic."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow([
            r.budget_bytes,
            r.preset,
            "" if r.dimension is None else r.dimension,
            "" if r.error is not None else f"{r.accuracy:.6f}",
            r.evaluated,
            f"{r.seconds:.3f}",
            r.error or "",
        ])
    return buf.getvalue()


def sweep_summary(reports: list[RunReport]) -> dict[str, dict]:
    """Per preset (and dimension): the smallest budget that starts to work
    (accuracy >= 5%) and the smallest that works (accuracy >= 50%)."""
    out: dict[str, dict] = {}
    for r in reports:
        if r.error is not None:
            continue
        key = r.preset if r.dimension is None else f"{r.preset}@{r.dimension}"
        entry = out.setdefault(key, {"start": None, "works": None})
        for field_, bar in (("start", 0.05), ("works", 0.50)):
            if r.accuracy >= bar:
                prev = entry[field_]
                if prev is None or r.budget_bytes < prev:
                    entry[field_] = r.budget_bytes
    return out


def run_sweep(spec: SweepSpec, workers: int = 1):
    """Cartesian product of budgets x presets x dims x repetitions, executed
    in spec order; failures become error rows. Returns (reports, csv text)."""
    dims: tuple = spec.dims if spec.dims else (None,)
    points = [
        (spec, budget, preset, dim, rep)
        for budget in spec.budgets
        for preset in spec.presets
        for dim in dims
        for rep in range(spec.repetitions)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_safe_point, points))
    else:
        reports = [_safe_point(p) for p in points]
    return reports, sweep_csv(reports)
