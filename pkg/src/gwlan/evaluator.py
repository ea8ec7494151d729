"""Exact-match accuracy reporting and the noisy-context robustness probe.

Accuracy is N_match / N_all under exact surface equality of the top
suggestion. Reports break the figure down per context type and carry a
macro average. Robustness re-scores a fixed model while context tokens
are replaced, with per-token probability `ratio`, by words sharing a
source word with the original (uniform vocabulary noise when the table
offers no alternative).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .benchmark import ContextType, GwlanExample
from .corpus import Vocabulary
from .errors import EvalError
from .transtable import TranslationTable, noise_alternatives

Predictor = Callable[[GwlanExample], "str | None"]


def accuracy(predictions: Sequence[str | None], golds: Sequence[str]) -> float:
    """Fraction of exact surface matches."""
    if len(predictions) != len(golds):
        raise EvalError(f"{len(predictions)} predictions vs {len(golds)} golds")
    if not golds:
        raise EvalError("nothing to score")
    return sum(p == g for p, g in zip(predictions, golds)) / len(golds)


@dataclass(frozen=True)
class TypeStats:
    n_all: int
    n_match: int

    @property
    def accuracy(self) -> float:
        return self.n_match / self.n_all


@dataclass(frozen=True)
class EvalReport:
    per_type: dict[ContextType, TypeStats]
    average: float

    def to_dict(self) -> dict:
        out: dict = {}
        for ctype, stats in self.per_type.items():
            out[ctype.value] = {
                "n_all": stats.n_all,
                "n_match": stats.n_match,
                "accuracy": stats.accuracy,
            }
        out["average"] = self.average
        return out

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _as_predictor(predictor) -> Predictor:
    return predictor.predict if hasattr(predictor, "predict") else predictor


def evaluate(predictor, dataset: Iterable[GwlanExample]) -> EvalReport:
    """Score top-1 predictions grouped by context type.

    `predictor` is a callable example -> surface (or None, counted wrong),
    or any object with such a .predict method. The macro average runs over
    the context types present in the dataset.
    """
    predict = _as_predictor(predictor)
    n_all: dict[ContextType, int] = {}
    n_match: dict[ContextType, int] = {}
    for example in dataset:
        n_all[example.ctype] = n_all.get(example.ctype, 0) + 1
        if predict(example) == example.target:
            n_match[example.ctype] = n_match.get(example.ctype, 0) + 1
    if not n_all:
        raise EvalError("empty dataset")
    per_type = {
        ctype: TypeStats(n_all[ctype], n_match.get(ctype, 0))
        for ctype in ContextType
        if ctype in n_all
    }
    average = sum(s.accuracy for s in per_type.values()) / len(per_type)
    return EvalReport(per_type=per_type, average=average)


def corrupt_context(
    example: GwlanExample,
    noise_ratio: float,
    table: TranslationTable,
    rng: np.random.Generator,
    vocab: Vocabulary,
) -> GwlanExample:
    """Independently replace each context token with probability
    noise_ratio by a uniform draw from its same-source alternatives.

    Tokens without alternatives draw uniformly from the non-special
    vocabulary excluding the original, so a replaced token always differs.
    x, typed, target, and ctype are untouched.
    """

    def corrupt(tokens: list[str]) -> list[str]:
        out = []
        for token in tokens:
            if rng.random() >= noise_ratio:
                out.append(token)
                continue
            alts = noise_alternatives(token, table)
            if not alts:
                alts = [w for w in vocab.words() if w != token]
            if not alts:
                out.append(token)
                continue
            out.append(alts[int(rng.integers(len(alts)))])
        return out

    return GwlanExample(
        src=example.src,
        cl=corrupt(example.cl),
        cr=corrupt(example.cr),
        typed=example.typed,
        target=example.target,
        ctype=example.ctype,
    )


def robustness_curve(
    predictor,
    dataset: Sequence[GwlanExample],
    ratios: Sequence[float],
    table: TranslationTable,
    seed: int,
    vocab: Vocabulary,
) -> dict[str, EvalReport]:
    """EvalReport per noise ratio, keyed by the ratio formatted "%.2f".

    Each ratio gets its own seeded noise stream derived from (seed, ratio),
    so a ratio's report does not depend on the rest of the list. Ratio 0.0
    leaves every example untouched and reproduces plain evaluate().
    """
    if list(ratios) != sorted(ratios):
        raise ValueError("ratios must be sorted ascending")
    out: dict[str, EvalReport] = {}
    for ratio in ratios:
        if not (0.0 <= ratio <= 1.0):
            raise ValueError(f"noise ratio {ratio} outside [0, 1]")
        rng = np.random.default_rng(np.random.SeedSequence((seed, round(ratio * 100))))
        noisy = [corrupt_context(ex, ratio, table, rng, vocab) for ex in dataset]
        out[f"{ratio:.2f}"] = evaluate(predictor, noisy)
    return out


def save_robustness(curve: dict[str, EvalReport], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({k: r.to_dict() for k, r in curve.items()}, fh, indent=2, sort_keys=True)
        fh.write("\n")
