"""Session fixtures for the synthetic training study used by the acceptance
tests.

Everything heavy is lazy: a run that never requests a trained model never
builds one. The corpus constants below are frozen so results stay
reproducible; changing any of them invalidates the accuracy and variance
expectations in test_acceptance.py.
"""

import time
from types import SimpleNamespace

import numpy as np
import pytest

from gwlan.benchmark import ContextType, SamplerConfig, build_dataset
from gwlan.completer import ModelBundle, build_prefix_index
from gwlan.corpus import build_vocab
from gwlan.romanize import Romanizer
from gwlan.synthdata import homograph_corpus, split_corpus
from gwlan.trainer import TrainConfig, train_joint, train_separate
from gwlan.transtable import build_table, train_alignment
from gwlan.wpm import WpmConfig

# 1400 train / 200 valid / 400 test pairs out of the 2000-pair corpus.
N_TRAIN, N_VALID = 1400, 200
BENCH_SEEDS = {"train": 100, "valid": 101, "test": 102}
TRAIN_CFG = TrainConfig(
    batch_size=32,
    max_steps=2500,
    learning_rate=3e-3,
    warmup_steps=100,
    eval_every=250,
    patience=8,
    seed=0,
)


@pytest.fixture(scope="session")
def identity_rom() -> Romanizer:
    return Romanizer.identity()


@pytest.fixture(scope="session")
def homograph_task(identity_rom):
    """Corpus, splits, vocabularies and benchmarks for the homograph study.

    Vocabularies cover the full corpus (min_count=1) so the prefix index
    also knows word variants that happen to appear only in held-out pairs.
    """
    corpus = homograph_corpus()
    train_c, valid_c, test_c = split_corpus(corpus, N_TRAIN, N_VALID)
    src_vocab = build_vocab(corpus.sources, min_count=1)
    tgt_vocab = build_vocab(corpus.targets, min_count=1)
    datasets, test_sets = {}, {}
    for ctype in ContextType:
        datasets[ctype] = (
            build_dataset(train_c, ctype, SamplerConfig(seed=BENCH_SEEDS["train"]), identity_rom),
            build_dataset(valid_c, ctype, SamplerConfig(seed=BENCH_SEEDS["valid"]), identity_rom),
        )
        test_sets[ctype] = build_dataset(
            test_c, ctype, SamplerConfig(seed=BENCH_SEEDS["test"]), identity_rom
        )
    return SimpleNamespace(
        corpus=corpus,
        train_corpus=train_c,
        valid_corpus=valid_c,
        test_corpus=test_c,
        src_vocab=src_vocab,
        tgt_vocab=tgt_vocab,
        datasets=datasets,
        test_sets=test_sets,
        wpm_cfg=WpmConfig(src_vocab_size=len(src_vocab), tgt_vocab_size=len(tgt_vocab)),
        index=build_prefix_index(tgt_vocab, identity_rom),
    )


@pytest.fixture(scope="session")
def joint_run(homograph_task, identity_rom):
    """(TrainResult, wall seconds) for the single multi-context model."""
    t0 = time.perf_counter()
    result = train_joint(
        homograph_task.datasets,
        homograph_task.src_vocab,
        homograph_task.tgt_vocab,
        identity_rom,
        homograph_task.wpm_cfg,
        TRAIN_CFG,
    )
    return result, time.perf_counter() - t0


@pytest.fixture(scope="session")
def sep_run(homograph_task, identity_rom):
    """(dict of per-type TrainResult, wall seconds) for the four models."""
    t0 = time.perf_counter()
    results = train_separate(
        homograph_task.datasets,
        homograph_task.src_vocab,
        homograph_task.tgt_vocab,
        identity_rom,
        homograph_task.wpm_cfg,
        TRAIN_CFG,
    )
    return results, time.perf_counter() - t0


@pytest.fixture(scope="session")
def joint_bundle(homograph_task, joint_run, identity_rom) -> ModelBundle:
    result, _ = joint_run
    return ModelBundle(
        params=result.params,
        cfg=homograph_task.wpm_cfg,
        src_vocab=homograph_task.src_vocab,
        tgt_vocab=homograph_task.tgt_vocab,
        index=homograph_task.index,
        rom=identity_rom,
    )


@pytest.fixture(scope="session")
def noise_table(homograph_task):
    """Translation table over the training split, used as the noise source
    when corrupting contexts."""
    return build_table(homograph_task.train_corpus, train_alignment(homograph_task.train_corpus, em_iters=5))


def per_type_accuracy(bundle, test_sets) -> dict[str, float]:
    """Accuracy of one predictor on each held-out per-type benchmark."""
    from gwlan.evaluator import evaluate

    out = {}
    for ctype, dataset in test_sets.items():
        report = evaluate(bundle, dataset)
        out[ctype.value] = report.per_type[ctype].accuracy
    return out


def accuracy_variance(accs: dict[str, float]) -> float:
    return float(np.var(list(accs.values())))


# --- acceptance verdict lines -------------------------------------------
# test_acceptance.py records one line per criterion; they are echoed in a
# terminal section at the end of the run so the pass/fail verdicts survive
# pytest's output capture.

_VERDICTS: list[str] = []


def record_verdict(name: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {name}"
    if detail:
        line += f"  [{detail}]"
    _VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
