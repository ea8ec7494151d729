"""Optimization loops for the word prediction model.

Two strategies: one model per context type, each trained on its own
dataset, or a single joint model whose batches mix all four types and
whose objective is the sum of the four per-type losses. Model selection
uses completion accuracy on held-out data (own type for separate models,
unweighted mean over the four types for the joint model). The optimizer
is Adam with linear warmup into an inverse-square-root decay.

All randomness (init, batch order, dropout) derives from TrainConfig.seed,
so identical inputs reproduce identical parameters.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .benchmark import _CTYPE_CODE, ContextType, GwlanExample
from .completer import ModelBundle, build_prefix_index
from .corpus import UNK_ID, Vocabulary, encode
from .errors import ConfigError, DivergenceError
from .evaluator import evaluate
from .romanize import Romanizer
from .wpm import Params, WpmConfig, init_params, loss_and_gradients

log = logging.getLogger(__name__)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.98
ADAM_EPS = 1e-9

Split = tuple[list[GwlanExample], list[GwlanExample]]


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    max_steps: int = 2000
    learning_rate: float = 3e-3
    warmup_steps: int = 100
    eval_every: int = 200
    patience: int = 5
    seed: int = 0
    batch_mix: str = "mixed"  # joint only: mixed | round_robin

    def validate(self) -> None:
        if min(self.batch_size, self.warmup_steps, self.eval_every) < 1:
            raise ConfigError("batch_size, warmup_steps, eval_every must be >= 1")
        if self.max_steps < 0 or self.learning_rate <= 0 or self.patience < 1:
            raise ConfigError("bad max_steps, learning_rate, or patience")
        if self.batch_mix not in ("mixed", "round_robin"):
            raise ConfigError(f"unknown batch_mix {self.batch_mix!r}")


@dataclass
class AdamState:
    m: Params = field(default_factory=dict)
    v: Params = field(default_factory=dict)


def learning_rate(step: int, cfg: TrainConfig) -> float:
    """Linear warmup to the peak at step == warmup_steps (1-based), then
    inverse-square-root decay."""
    return cfg.learning_rate * min(
        step / cfg.warmup_steps, (cfg.warmup_steps / step) ** 0.5
    )


def optimizer_step(
    params: Params, grads: Params, step: int, cfg: TrainConfig, state: AdamState
) -> tuple[Params, AdamState]:
    """One Adam update; returns fresh params and moment state (inputs are
    not mutated)."""
    lr = learning_rate(step, cfg)
    new_params: Params = {}
    new_state = AdamState()
    for name, p in params.items():
        g = grads[name]
        if not np.isfinite(g).all():
            raise DivergenceError(f"non-finite gradient for {name} at step {step}")
        m = ADAM_BETA1 * state.m.get(name, 0.0) + (1 - ADAM_BETA1) * g
        v = ADAM_BETA2 * state.v.get(name, 0.0) + (1 - ADAM_BETA2) * g * g
        m_hat = m / (1 - ADAM_BETA1**step)
        v_hat = v / (1 - ADAM_BETA2**step)
        new_params[name] = p - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        new_state.m[name] = m
        new_state.v[name] = v
    return new_params, new_state


@dataclass
class TrainReport:
    steps: int
    losses: list[float]
    best_step: int
    best_accuracy: float
    best_per_type: dict[str, float]
    stopped_early: bool = False


@dataclass
class TrainResult:
    params: Params
    report: TrainReport


EncodedExample = tuple[list[int], list[int], list[int], int]


def encode_examples(
    examples: list[GwlanExample], src_vocab: Vocabulary, tgt_vocab: Vocabulary
) -> list[EncodedExample]:
    """Id-encode examples for the model; examples whose target falls
    outside the vocabulary cannot be learned or scored and are dropped
    (logged)."""
    encoded: list[EncodedExample] = []
    dropped = 0
    for ex in examples:
        t = tgt_vocab.id(ex.target)
        if t == UNK_ID:
            dropped += 1
            continue
        encoded.append(
            (encode(ex.src, src_vocab), encode(ex.cl, tgt_vocab), encode(ex.cr, tgt_vocab), t)
        )
    if dropped:
        log.info("dropped %d examples with out-of-vocabulary targets", dropped)
    return encoded


def filter_oov_targets(
    examples: list[GwlanExample], tgt_vocab: Vocabulary
) -> list[GwlanExample]:
    kept = [ex for ex in examples if tgt_vocab.id(ex.target) != UNK_ID]
    if len(kept) < len(examples):
        log.info("dropped %d validation examples with OOV targets", len(examples) - len(kept))
    return kept


def dataset_loss(examples: list[EncodedExample], params: Params, cfg: WpmConfig) -> float:
    """Mean NLL over a full dataset (no dropout)."""
    return loss_and_gradients(examples, params, cfg)[0]


def joint_objective(
    datasets: dict[ContextType, list[EncodedExample]], params: Params, cfg: WpmConfig
) -> float:
    """Sum of the four per-type mean NLLs."""
    return sum(dataset_loss(examples, params, cfg) for examples in datasets.values())


def _require_nonempty(datasets: dict[ContextType, Split]) -> None:
    for ctype in ContextType:
        if ctype not in datasets:
            raise ConfigError(f"missing dataset for context type {ctype.value}")
        train, valid = datasets[ctype]
        if not train or not valid:
            raise ConfigError(f"empty train or valid split for {ctype.value}")


def _optimize(
    init: Params,
    wpm_cfg: WpmConfig,
    cfg: TrainConfig,
    draw_batch,
    valid_accuracy,
    log_fh,
) -> TrainResult:
    """Shared loop: step through batches, track the best validation
    accuracy, stop early after `patience` non-improving evaluations."""

    def write_log(record: dict) -> None:
        if log_fh is not None:
            log_fh.write(json.dumps(record) + "\n")

    params = init
    state = AdamState()
    losses: list[float] = []
    best_acc, best_avg, best_step = {}, -1.0, 0
    best_params = {k: v.copy() for k, v in params.items()}
    bad_evals = 0
    stopped = False

    per_type, avg = valid_accuracy(params)
    best_acc, best_avg = per_type, avg
    write_log({"step": 0, "valid_acc": per_type, "valid_avg": avg})

    dropout_rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 0xD0)))
    for step in range(1, cfg.max_steps + 1):
        batch = draw_batch(step)
        loss, grads = loss_and_gradients(batch, params, wpm_cfg, train_rng=dropout_rng)
        if not np.isfinite(loss):
            raise DivergenceError(f"non-finite loss at step {step}")
        losses.append(loss)
        params, state = optimizer_step(params, grads, step, cfg, state)
        record = {"step": step, "loss": loss}
        if step % cfg.eval_every == 0 or step == cfg.max_steps:
            per_type, avg = valid_accuracy(params)
            record["valid_acc"] = per_type
            record["valid_avg"] = avg
            if avg > best_avg:
                best_avg, best_acc, best_step = avg, per_type, step
                best_params = {k: v.copy() for k, v in params.items()}
                bad_evals = 0
            else:
                bad_evals += 1
            write_log(record)
            if bad_evals >= cfg.patience:
                stopped = True
                break
        else:
            write_log(record)

    report = TrainReport(
        steps=len(losses),
        losses=losses,
        best_step=best_step,
        best_accuracy=best_avg,
        best_per_type=best_acc,
        stopped_early=stopped,
    )
    return TrainResult(params=best_params, report=report)


def _make_bundle(params, wpm_cfg, src_vocab, tgt_vocab, index, rom) -> ModelBundle:
    return ModelBundle(
        params=params, cfg=wpm_cfg, src_vocab=src_vocab, tgt_vocab=tgt_vocab,
        index=index, rom=rom,
    )


def train_separate(
    datasets: dict[ContextType, Split],
    src_vocab: Vocabulary,
    tgt_vocab: Vocabulary,
    rom: Romanizer,
    wpm_cfg: WpmConfig,
    cfg: TrainConfig,
    log_prefix: str | None = None,
) -> dict[ContextType, TrainResult]:
    """One independent optimization per context type; each model is
    selected by accuracy on its own validation split."""
    cfg.validate()
    _require_nonempty(datasets)
    index = build_prefix_index(tgt_vocab, rom)
    results: dict[ContextType, TrainResult] = {}
    for ctype in ContextType:
        train_raw, valid_raw = datasets[ctype]
        train = encode_examples(train_raw, src_vocab, tgt_vocab)
        valid = filter_oov_targets(valid_raw, tgt_vocab)
        if not train or not valid:
            raise ConfigError(f"no usable examples for {ctype.value}")
        batch_rng = np.random.default_rng(
            np.random.SeedSequence((cfg.seed, 0xB0, _CTYPE_CODE[ctype]))
        )

        def draw_batch(step, train=train, rng=batch_rng):
            idx = rng.integers(0, len(train), cfg.batch_size)
            return [train[i] for i in idx]

        def valid_accuracy(params, valid=valid):
            bundle = _make_bundle(params, wpm_cfg, src_vocab, tgt_vocab, index, rom)
            report = evaluate(bundle, valid)
            per_type = {ct.value: st.accuracy for ct, st in report.per_type.items()}
            return per_type, report.average

        log_fh = None
        if log_prefix is not None:
            log_fh = open(f"{log_prefix}{ctype.value}.jsonl", "w", encoding="utf-8")
        try:
            results[ctype] = _optimize(
                init_params(wpm_cfg, cfg.seed), wpm_cfg, cfg,
                draw_batch, valid_accuracy, log_fh,
            )
        finally:
            if log_fh is not None:
                log_fh.close()
        log.info(
            "separate[%s]: best avg %.4f at step %d",
            ctype.value, results[ctype].report.best_accuracy,
            results[ctype].report.best_step,
        )
    return results


def train_joint(
    datasets: dict[ContextType, Split],
    src_vocab: Vocabulary,
    tgt_vocab: Vocabulary,
    rom: Romanizer,
    wpm_cfg: WpmConfig,
    cfg: TrainConfig,
    log_path: str | None = None,
) -> TrainResult:
    """Single model over all four context types.

    batch_mix "mixed" draws each batch slot's type uniformly; "round_robin"
    rotates whole batches through the types. Selection metric is the
    unweighted mean of the four validation accuracies.
    """
    cfg.validate()
    _require_nonempty(datasets)
    index = build_prefix_index(tgt_vocab, rom)
    order = list(ContextType)
    train = {
        ctype: encode_examples(datasets[ctype][0], src_vocab, tgt_vocab)
        for ctype in order
    }
    valid_all: list[GwlanExample] = []
    for ctype in order:
        valid_all.extend(filter_oov_targets(datasets[ctype][1], tgt_vocab))
    if any(not t for t in train.values()) or not valid_all:
        raise ConfigError("no usable examples after vocabulary filtering")
    batch_rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 0xB0, 7)))

    def draw_batch(step):
        batch = []
        if cfg.batch_mix == "mixed":
            kinds = batch_rng.integers(0, len(order), cfg.batch_size)
        else:
            kinds = [(step - 1) % len(order)] * cfg.batch_size
        for k in kinds:
            pool = train[order[int(k)]]
            batch.append(pool[int(batch_rng.integers(0, len(pool)))])
        return batch

    def valid_accuracy(params):
        bundle = _make_bundle(params, wpm_cfg, src_vocab, tgt_vocab, index, rom)
        report = evaluate(bundle, valid_all)
        per_type = {ct.value: st.accuracy for ct, st in report.per_type.items()}
        return per_type, report.average

    log_fh = open(log_path, "w", encoding="utf-8") if log_path is not None else None
    try:
        result = _optimize(
            init_params(wpm_cfg, cfg.seed), wpm_cfg, cfg,
            draw_batch, valid_accuracy, log_fh,
        )
    finally:
        if log_fh is not None:
            log_fh.close()
    log.info(
        "joint: best avg %.4f at step %d",
        result.report.best_accuracy, result.report.best_step,
    )
    return result
