"""Deterministic synthetic parallel corpora for end-to-end checks.

`homograph_corpus` builds a dictionary-translation language where every
source word has exactly two target spellings and the realized spelling is
selected by the neighboring target word to the left. Sentences alternate
selector slots (single-character spellings, so they are never completion
targets) with content slots (long spellings whose third character carries
the variant). Selector source tokens are sorted into canonical
order on the source side, so the variant of a content word is not
recoverable from the source sentence alone: translation context genuinely
helps, and more context helps more.

Each selector lexeme's two spellings belong to the same label class, so
replacing a context token by its same-source alternative (the noise model
used for robustness probes) never destroys the disambiguating signal.

`bijective_corpus` is a trivial language with a one-to-one dictionary and
globally unique target initials; a frequency baseline with prefix
filtering solves it perfectly.
"""

from __future__ import annotations

import string

import numpy as np

from .corpus import ParallelCorpus, Sentence

_SEL_A = "ABCDEFGHIJKLMNOP"
_SEL_B = "QRSTUVWXYZ012345"
_N_FAMILIES = 26


def selector_form(i: int, variant: str) -> str:
    return _SEL_A[i] if variant == "a" else _SEL_B[i]


def content_base(j: int) -> str:
    return string.ascii_lowercase[j % _N_FAMILIES] + string.ascii_lowercase[j // _N_FAMILIES]


def content_form(j: int, variant: str, form_len: int = 12) -> str:
    base = content_base(j)
    return base + variant + (base * form_len)[: form_len - 4] + "x"


def homograph_corpus(
    n_pairs: int = 2000,
    n_content: int = 320,
    n_selectors: int = 16,
    n_label_a: int = 14,
    label_a_families: int = 21,
    form_len: int = 14,
    seed: int = 13,
) -> ParallelCorpus:
    """Sentences of 8 slots: selector, content, selector, content, ...

    Selector lexeme i carries a fixed label ('a' for i < n_label_a); a
    content word's spelling variant equals the label of the selector to
    its left. Content lexemes carry a family label likewise selecting the
    spelling of the selector to their right (slot 0 defaults to 'a').
    Source order keeps content words in place but sorts the selector
    tokens, hiding which selector sits next to which content word.
    """
    if not (2 <= n_selectors <= len(_SEL_A)):
        raise ValueError(f"n_selectors must be in [2, {len(_SEL_A)}]")
    if not (1 <= n_content <= _N_FAMILIES * _N_FAMILIES):
        raise ValueError("n_content out of range")
    if not (5 <= form_len):
        raise ValueError("form_len must be >= 5")
    if not (0 < n_label_a <= n_selectors and 0 < label_a_families <= _N_FAMILIES):
        raise ValueError("label counts out of range")

    def sel_label(i: int) -> str:
        return "a" if i < n_label_a else "b"

    def con_label(j: int) -> str:
        return "a" if (j % _N_FAMILIES) < label_a_families else "b"

    pairs: list[tuple[Sentence, Sentence]] = []
    for idx in range(n_pairs):
        rng = np.random.default_rng(np.random.SeedSequence((seed, idx)))
        sel = [int(v) for v in rng.integers(0, n_selectors, 4)]
        con = [int(v) for v in rng.integers(0, n_content, 4)]
        target: Sentence = []
        for m in range(8):
            if m % 2 == 0:
                i = sel[m // 2]
                variant = "a" if m == 0 else con_label(con[(m - 2) // 2])
                target.append(selector_form(i, variant))
            else:
                j = con[(m - 1) // 2]
                variant = sel_label(sel[(m - 1) // 2])
                target.append(content_form(j, variant, form_len))
        source: Sentence = []
        sel_sorted = sorted(sel)
        for m in range(8):
            if m % 2 == 0:
                source.append(f"S{sel_sorted[m // 2]}")
            else:
                source.append(f"w{con[(m - 1) // 2]}")
        pairs.append((source, target))
    return ParallelCorpus(pairs=pairs)


def bijective_corpus(
    n_pairs: int = 240, n_words: int = 20, sent_len: int = 6, seed: int = 29
) -> ParallelCorpus:
    """One-to-one dictionary language; target words have globally unique
    first characters, so any typed prefix pins the answer."""
    if not (2 <= n_words <= 26):
        raise ValueError("n_words must be in [2, 26]")
    if not (1 <= sent_len <= n_words):
        raise ValueError("sent_len must be in [1, n_words]")
    sources = [f"q{i}" for i in range(n_words)]
    targets = [f"{string.ascii_lowercase[i]}tail{i}" for i in range(n_words)]
    pairs: list[tuple[Sentence, Sentence]] = []
    for idx in range(n_pairs):
        rng = np.random.default_rng(np.random.SeedSequence((seed, idx)))
        order = rng.permutation(n_words)[:sent_len]
        pairs.append(([sources[i] for i in order], [targets[i] for i in order]))
    return ParallelCorpus(pairs=pairs)


def split_corpus(
    corpus: ParallelCorpus, n_train: int, n_valid: int
) -> tuple[ParallelCorpus, ParallelCorpus, ParallelCorpus]:
    """Contiguous train/valid/test split (pairs are already i.i.d.)."""
    if n_train + n_valid >= len(corpus):
        raise ValueError("split leaves no test pairs")
    return (
        ParallelCorpus(pairs=corpus.pairs[:n_train]),
        ParallelCorpus(pairs=corpus.pairs[n_train : n_train + n_valid]),
        ParallelCorpus(pairs=corpus.pairs[n_train + n_valid :]),
    )
