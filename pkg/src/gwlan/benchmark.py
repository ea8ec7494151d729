"""Benchmark construction by seeded sampling from a parallel corpus.

Each benchmark example asks: given the source sentence, a (possibly empty)
left/right translation context, and the characters typed so far, which
target word was the translator starting to type? Examples are sampled
per sentence pair with an rng derived from (seed, context type, pair
index), so generation is deterministic and shardable by pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .corpus import ParallelCorpus, Sentence
from .errors import ContextInfeasibleError, NoTargetError
from .romanize import Romanizer


class ContextType(str, Enum):
    ZERO = "zero"
    PREFIX = "prefix"
    SUFFIX = "suffix"
    BI = "bi"


# Tag mixed into the per-pair rng seed so each type gets its own stream.
_CTYPE_CODE = {
    ContextType.ZERO: 0,
    ContextType.PREFIX: 1,
    ContextType.SUFFIX: 2,
    ContextType.BI: 3,
}


@dataclass(frozen=True)
class GwlanExample:
    """One autocompletion instance: predict `target` from (src, cl, cr, typed)."""

    src: Sentence
    cl: Sentence
    cr: Sentence
    typed: str
    target: str
    ctype: ContextType

    def __post_init__(self):
        if not self.typed:
            raise ValueError("typed prefix must be nonempty")
        if not self.target:
            raise ValueError("target must be nonempty")
        want_left = self.ctype in (ContextType.PREFIX, ContextType.BI)
        want_right = self.ctype in (ContextType.SUFFIX, ContextType.BI)
        if bool(self.cl) != want_left or bool(self.cr) != want_right:
            raise ValueError(f"context spans inconsistent with type {self.ctype.value}")


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    max_context_len: int = 5
    min_sentence_len: int = 5
    long_word_boost: float = 4.0
    long_word_chars: int = 5
    allow_unit_context: bool = False


def sample_target(
    y: Sentence, cfg: SamplerConfig, rng: np.random.Generator, rom: Romanizer
) -> int:
    """Pick the target word position (0-based index into y).

    Only words whose typing form has at least 2 characters are eligible
    (a single keystroke already finishes the others). Words longer than
    cfg.long_word_chars surface characters get cfg.long_word_boost weight,
    the rest weight 1; the draw is proportional to weight.
    """
    eligible = [k for k, w in enumerate(y) if len(rom.typing_form(w)) >= 2]
    if not eligible:
        raise NoTargetError("no word with typing form of length >= 2")
    weights = np.array(
        [
            cfg.long_word_boost if len(y[k]) > cfg.long_word_chars else 1.0
            for k in eligible
        ]
    )
    cumulative = np.cumsum(weights)
    r = rng.random() * cumulative[-1]
    return eligible[int(np.searchsorted(cumulative, r, side="right"))]


def _unrank_span(r: int, m: int, allow_unit: bool) -> tuple[int, int]:
    """r-th (lexicographic) pair (i, j), 0 <= i < j < m, i == j when allowed."""
    for i in range(m):
        here = (m - 1 - i) + (1 if allow_unit else 0)
        if r < here:
            j = i + r if allow_unit else i + 1 + r
            return i, j
        r -= here
    raise AssertionError("rank out of range")


def _span_count(m: int, allow_unit: bool) -> int:
    strict = m * (m - 1) // 2
    return strict + (m if allow_unit else 0)


def _draw_left(y, k, cfg, rng):
    total = _span_count(k, cfg.allow_unit_context)
    if total == 0:
        raise ContextInfeasibleError(f"no left span before position {k}")
    p1, p2 = _unrank_span(int(rng.integers(total)), k, cfg.allow_unit_context)
    if p2 - p1 + 1 > cfg.max_context_len:
        p1 = p2 - cfg.max_context_len + 1  # clip, keeping the edge next to k
    return list(y[p1 : p2 + 1])


def _draw_right(y, k, cfg, rng):
    m = len(y) - 1 - k
    total = _span_count(m, cfg.allow_unit_context)
    if total == 0:
        raise ContextInfeasibleError(f"no right span after position {k}")
    q1, q2 = _unrank_span(int(rng.integers(total)), m, cfg.allow_unit_context)
    q1, q2 = k + 1 + q1, k + 1 + q2
    if q2 - q1 + 1 > cfg.max_context_len:
        q2 = q1 + cfg.max_context_len - 1
    return list(y[q1 : q2 + 1])


def extract_context(
    y: Sentence,
    k: int,
    ctype: ContextType,
    cfg: SamplerConfig,
    rng: np.random.Generator,
) -> tuple[Sentence, Sentence]:
    """Sample the (cl, cr) spans for target position k (0-based).

    Spans are uniform over the valid (start, end) combinations strictly on
    their side of k, then clipped to cfg.max_context_len by moving the far
    edge. Spans of length 1 require cfg.allow_unit_context. Left is drawn
    before right so the rng stream is well defined for the bi type.
    """
    cl: Sentence = []
    cr: Sentence = []
    if ctype in (ContextType.PREFIX, ContextType.BI):
        cl = _draw_left(y, k, cfg, rng)
    if ctype in (ContextType.SUFFIX, ContextType.BI):
        cr = _draw_right(y, k, cfg, rng)
    return cl, cr


def simulate_typed(w: str, rng: np.random.Generator, rom: Romanizer) -> str:
    """Simulate the human keystrokes: a strict prefix of w's typing form,
    length uniform over [1, len(form))."""
    form = rom.typing_form(w)
    if len(form) < 2:
        raise NoTargetError(f"typing form too short to prefix: {w!r}")
    p = int(rng.integers(1, len(form)))
    return form[:p]


def build_dataset(
    corpus: ParallelCorpus,
    ctype: ContextType,
    cfg: SamplerConfig,
    rom: Romanizer | None = None,
) -> list[GwlanExample]:
    """One attempted example per sentence pair; pairs whose target sentence
    is too short, has no eligible target, or cannot host the requested
    context type are skipped without disturbing other pairs' rng streams."""
    rom = rom or Romanizer.identity()
    code = _CTYPE_CODE[ctype]
    out: list[GwlanExample] = []
    for idx, (x, y) in enumerate(corpus.pairs):
        if len(y) < cfg.min_sentence_len:
            continue
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, code, idx)))
        try:
            k = sample_target(y, cfg, rng, rom)
            cl, cr = extract_context(y, k, ctype, cfg, rng)
            typed = simulate_typed(y[k], rng, rom)
        except (NoTargetError, ContextInfeasibleError):
            continue
        out.append(
            GwlanExample(src=list(x), cl=cl, cr=cr, typed=typed, target=y[k], ctype=ctype)
        )
    return out


def example_to_dict(ex: GwlanExample) -> dict:
    return {
        "src": " ".join(ex.src),
        "cl": " ".join(ex.cl),
        "cr": " ".join(ex.cr),
        "typed": ex.typed,
        "target": ex.target,
        "ctype": ex.ctype.value,
    }


def example_from_dict(d: dict) -> GwlanExample:
    return GwlanExample(
        src=d["src"].split(),
        cl=d["cl"].split(),
        cr=d["cr"].split(),
        typed=d["typed"],
        target=d["target"],
        ctype=ContextType(d["ctype"]),
    )


def write_dataset(examples: list[GwlanExample], path) -> None:
    """JSONL, one example per line, fixed key order for reproducible bytes."""
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(example_to_dict(ex), ensure_ascii=False) + "\n")


def read_dataset(path) -> list[GwlanExample]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(example_from_dict(json.loads(line)))
    return out
