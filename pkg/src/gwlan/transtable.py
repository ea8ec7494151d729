"""Alignment-based completion baseline and noise source.

A lexical translation model t(target | source) is fit with IBM-Model-1
expectation-maximization (no NULL word, uniform alignment prior). Viterbi
links derived from it are counted into a translation table: source surface
-> [(target surface, link count)]. Prediction ranks the table entries of
the sentence's words by count after prefix filtering; the same table also
supplies same-source alternatives used as context noise.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from math import log

from .corpus import ParallelCorpus, Sentence
from .errors import NoCandidateError
from .romanize import Romanizer

EPS = 1e-12


@dataclass
class AlignmentModel:
    """t[source][target] = t(target | source); rows sum to 1."""

    t: dict[str, dict[str, float]]
    log_likelihoods: list[float] = field(default_factory=list)


def train_alignment(corpus: ParallelCorpus, em_iters: int) -> AlignmentModel:
    """Fit t(target | source) by EM, starting uniform over co-occurring
    targets. Deterministic; per-iteration corpus log-likelihood is recorded
    (it never decreases)."""
    if len(corpus) == 0:
        raise ValueError("cannot align an empty corpus")
    if em_iters < 1:
        raise ValueError("em_iters must be >= 1")

    cooc: dict[str, set[str]] = defaultdict(set)
    for src, tgt in corpus:
        for s_tok in src:
            cooc[s_tok].update(tgt)
    t: dict[str, dict[str, float]] = {
        s_tok: {w: 1.0 / len(ws) for w in sorted(ws)} for s_tok, ws in cooc.items()
    }

    likelihoods: list[float] = []
    for _ in range(em_iters):
        counts: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
        totals: dict[str, float] = defaultdict(float)
        ll = 0.0
        for src, tgt in corpus:
            for w in tgt:
                denom = sum(t[s_tok].get(w, 0.0) for s_tok in src)
                ll += log(max(denom / len(src), EPS))
                if denom <= 0.0:
                    continue
                for s_tok in src:
                    p = t[s_tok].get(w, 0.0) / denom
                    counts[s_tok][w] += p
                    totals[s_tok] += p
        likelihoods.append(ll)
        for s_tok, row in counts.items():
            z = totals[s_tok]
            t[s_tok] = {w: c / z for w, c in row.items()}
    return AlignmentModel(t=t, log_likelihoods=likelihoods)


@dataclass
class TranslationTable:
    """entries[source] = [(target, count)] sorted by count desc, then target."""

    entries: dict[str, list[tuple[str, int]]]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for source in sorted(self.entries):
                for target, count in self.entries[source]:
                    fh.write(f"{source}\t{target}\t{count}\n")

    @classmethod
    def load(cls, path) -> "TranslationTable":
        entries: dict[str, list[tuple[str, int]]] = defaultdict(list)
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                source, target, count = line.rstrip("\n").split("\t")
                entries[source].append((target, int(count)))
        table = cls(entries=dict(entries))
        for source, row in table.entries.items():
            table.entries[source] = sorted(row, key=lambda e: (-e[1], e[0]))
        return table


def build_table(
    corpus: ParallelCorpus,
    model: AlignmentModel,
    threshold: float = 0.0,
    freq_mode: str = "links",
) -> TranslationTable:
    """Count Viterbi links into a table.

    Each target word links to its argmax source word (ties go to the lowest
    source position); links whose lexical probability falls below
    `threshold` are dropped. freq_mode "links" counts link occurrences;
    "unigram" replaces the count of every surviving pair with the target's
    corpus unigram frequency.
    """
    if freq_mode not in ("links", "unigram"):
        raise ValueError(f"unknown freq_mode {freq_mode!r}")
    link_counts: Counter[tuple[str, str]] = Counter()
    unigrams: Counter[str] = Counter()
    for src, tgt in corpus:
        unigrams.update(tgt)
        for w in tgt:
            best_src, best_p = None, -1.0
            for s_tok in src:
                p = model.t.get(s_tok, {}).get(w, 0.0)
                if p > best_p:
                    best_src, best_p = s_tok, p
            if best_src is not None and best_p >= threshold and best_p > 0.0:
                link_counts[(best_src, w)] += 1

    entries: dict[str, list[tuple[str, int]]] = defaultdict(list)
    for (source, target), count in link_counts.items():
        if freq_mode == "unigram":
            count = unigrams[target]
        entries[source].append((target, count))
    for source, row in entries.items():
        entries[source] = sorted(row, key=lambda e: (-e[1], e[0]))
    return TranslationTable(entries=dict(entries))


def predict_baseline(
    x: Sentence, s: str, table: TranslationTable, rom: Romanizer
) -> str:
    """Highest-count table candidate over the sentence's source words whose
    typing form starts with s; counts for a target are summed across the
    sentence's distinct source words, ties break lexicographically.

    Context never enters: the baseline sees only (x, s).
    """
    if not s:
        raise ValueError("typed prefix must be nonempty")
    merged: dict[str, int] = defaultdict(int)
    for source in dict.fromkeys(x):
        for target, count in table.entries.get(source, ()):
            if rom.typing_form(target).startswith(s):
                merged[target] += count
    if not merged:
        raise NoCandidateError(f"no table candidate starts with {s!r}")
    return min(merged, key=lambda w: (-merged[w], w))


def noise_alternatives(w: str, table: TranslationTable) -> list[str]:
    """Target surfaces other than w sharing at least one source with w."""
    alts: set[str] = set()
    for row in table.entries.values():
        targets = [target for target, _ in row]
        if w in targets:
            alts.update(targets)
    alts.discard(w)
    return sorted(alts)


def baseline_predictor(table: TranslationTable, rom: Romanizer):
    """Adapter matching the evaluator's predictor protocol: example ->
    predicted surface, None when nothing matches the typed prefix."""

    def predict(example) -> str | None:
        try:
            return predict_baseline(example.src, example.typed, table, rom)
        except NoCandidateError:
            return None

    return predict
