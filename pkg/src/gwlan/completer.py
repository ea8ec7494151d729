"""Hard-constraint completion: keep only words whose typing form starts
with the typed characters, renormalize the model distribution over them,
and rank. Candidate lookup is a character trie over typing forms, so the
filter costs O(|s|) instead of a vocabulary scan.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .benchmark import GwlanExample
from .corpus import Sentence, Vocabulary, encode
from .errors import EmptyCandidateError
from .romanize import Romanizer
from .wpm import Params, WpmConfig, predict_distribution

log = logging.getLogger(__name__)


class _Node:
    __slots__ = ("children", "ids")

    def __init__(self) -> None:
        self.children: dict[str, _Node] = {}
        self.ids: list[int] = []


class PrefixIndex:
    """Trie over typing forms; each node lists the word ids passing through.

    Words are inserted in ascending id order, so every node's id list is
    already sorted and lookups need no extra sort.
    """

    def __init__(self, case_fold: bool = False) -> None:
        self.root = _Node()
        self.case_fold = case_fold

    def _normalize(self, text: str) -> str:
        return text.lower() if self.case_fold else text

    def insert(self, word_id: int, form: str) -> None:
        node = self.root
        node.ids.append(word_id)
        for ch in self._normalize(form):
            node = node.children.setdefault(ch, _Node())
            node.ids.append(word_id)

    def lookup(self, prefix: str) -> list[int]:
        """All word ids whose typing form starts with `prefix`; "" matches
        every indexed word."""
        node = self.root
        for ch in self._normalize(prefix):
            node = node.children.get(ch)
            if node is None:
                return []
        return node.ids


def build_prefix_index(
    vocab: Vocabulary, rom: Romanizer, case_fold: bool = False
) -> PrefixIndex:
    """Index every non-special vocabulary word under its typing form.

    Surfaces the romanizer does not know fall back to the surface itself;
    the count of such fallbacks is logged.
    """
    index = PrefixIndex(case_fold=case_fold)
    fallbacks = 0
    for word_id in range(3, len(vocab)):
        surface = vocab.surface(word_id)
        if not rom.has(surface):
            fallbacks += 1
        index.insert(word_id, rom.typing_form(surface))
    if fallbacks:
        log.info("prefix index: %d surfaces lacked a typing form, used as-is", fallbacks)
    return index


@dataclass(frozen=True)
class Suggestion:
    word: str
    score: float
    word_id: int


def filter_and_renormalize(
    dist: np.ndarray, s: str, index: PrefixIndex, vocab: Vocabulary
) -> list[Suggestion]:
    """P_s[w] = P(w)/Z over words starting with s, Z their total mass.

    Sorted by score descending, ties by ascending word id. No candidate
    for s raises EmptyCandidateError.
    """
    if not s:
        raise ValueError("typed prefix must be nonempty")
    ids = index.lookup(s)
    if not ids:
        raise EmptyCandidateError(f"no vocabulary word starts with {s!r}")
    mass = float(dist[ids].sum())
    if mass > 0.0:
        scores = dist[ids] / mass
    else:
        # Model assigns (numerically) zero everywhere on the candidate set;
        # fall back to uniform so ranking stays total.
        scores = np.full(len(ids), 1.0 / len(ids))
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return [Suggestion(vocab.surface(ids[i]), float(scores[i]), ids[i]) for i in order]


def complete(
    x: Sentence,
    c_l: Sentence,
    c_r: Sentence,
    s: str,
    top_k: int,
    params: Params,
    cfg: WpmConfig,
    src_vocab: Vocabulary,
    tgt_vocab: Vocabulary,
    index: PrefixIndex,
) -> list[Suggestion]:
    """Ranked suggestions for typed prefix s; first entry is the argmax of
    the renormalized distribution."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    dist = predict_distribution(
        encode(x, src_vocab), encode(c_l, tgt_vocab), encode(c_r, tgt_vocab), params, cfg
    )
    return filter_and_renormalize(dist, s, index, tgt_vocab)[:top_k]


@dataclass
class ModelBundle:
    """Everything needed to answer completion queries with one model."""

    params: Params
    cfg: WpmConfig
    src_vocab: Vocabulary
    tgt_vocab: Vocabulary
    index: PrefixIndex = field(repr=False)
    rom: Romanizer = field(repr=False)

    def complete(self, x, c_l, c_r, s, top_k=10) -> list[Suggestion]:
        return complete(
            x, c_l, c_r, s, top_k,
            self.params, self.cfg, self.src_vocab, self.tgt_vocab, self.index,
        )

    def predict(self, example: GwlanExample) -> str | None:
        """Top suggestion surface for one benchmark example, None when the
        typed prefix matches nothing."""
        try:
            best = self.complete(example.src, example.cl, example.cr, example.typed, 1)
        except EmptyCandidateError:
            return None
        return best[0].word
