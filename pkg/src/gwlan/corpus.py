"""Parallel corpus ingestion, vocabularies, and id encoding.

A sentence is a plain list of tokens (no whitespace inside a token, never
empty). Vocabularies reserve three surfaces at fixed ids: <pad>=0, <unk>=1,
<mask>=2; corpus tokens equal to a reserved surface are dropped at counting
time so the reserved ids can never collide with real words.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import EmptySentenceError, PairingError

Sentence = list[str]

PAD, UNK, MASK = "<pad>", "<unk>", "<mask>"
PAD_ID, UNK_ID, MASK_ID = 0, 1, 2
SPECIALS = (PAD, UNK, MASK)


def parse_sentence(line: str, lineno: int = 0) -> Sentence:
    """Whitespace-tokenize one corpus line; reject empty lines."""
    tokens = line.split()
    if not tokens:
        raise EmptySentenceError(f"empty sentence at line {lineno}")
    return tokens


@dataclass(frozen=True)
class ParallelCorpus:
    """Aligned (source sentence, target sentence) pairs."""

    pairs: list[tuple[Sentence, Sentence]]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def sources(self) -> list[Sentence]:
        return [src for src, _ in self.pairs]

    @property
    def targets(self) -> list[Sentence]:
        return [tgt for _, tgt in self.pairs]


def load_parallel(source_path, target_path) -> ParallelCorpus:
    """Read two line-aligned token files into a corpus.

    Raises PairingError on line-count mismatch and EmptySentenceError (with
    the offending line number) on any empty line.
    """
    src_lines = Path(source_path).read_text(encoding="utf-8").splitlines()
    tgt_lines = Path(target_path).read_text(encoding="utf-8").splitlines()
    if len(src_lines) != len(tgt_lines):
        raise PairingError(
            f"{source_path} has {len(src_lines)} lines, "
            f"{target_path} has {len(tgt_lines)}"
        )
    pairs = []
    for i, (src, tgt) in enumerate(zip(src_lines, tgt_lines), start=1):
        pairs.append((parse_sentence(src, i), parse_sentence(tgt, i)))
    return ParallelCorpus(pairs)


class Vocabulary:
    """Dense token<->id map with the reserved surfaces at ids 0..2."""

    def __init__(self, surfaces: Iterable[str]):
        # `surfaces` are the non-special entries in id order (first one gets id 3).
        self._surfaces: list[str] = list(SPECIALS) + list(surfaces)
        self._ids = {s: i for i, s in enumerate(self._surfaces)}
        if len(self._ids) != len(self._surfaces):
            raise ValueError("duplicate surface in vocabulary")

    def __len__(self) -> int:
        return len(self._surfaces)

    def __contains__(self, surface: str) -> bool:
        return surface in self._ids

    def id(self, surface: str) -> int:
        """Id of a surface, UNK_ID when out of vocabulary."""
        return self._ids.get(surface, UNK_ID)

    def surface(self, token_id: int) -> str:
        return self._surfaces[token_id]

    def words(self) -> list[str]:
        """Non-special surfaces in id order."""
        return self._surfaces[len(SPECIALS):]

    def save(self, path) -> None:
        """Write `surface<TAB>id` lines in id order (reserved rows first)."""
        lines = [f"{s}\t{i}" for i, s in enumerate(self._surfaces)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        rows = []
        for lineno, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            surface, _, id_text = line.partition("\t")
            if not id_text:
                raise ValueError(f"{path}:{lineno}: expected surface<TAB>id")
            rows.append((int(id_text), surface))
        rows.sort()
        if [i for i, _ in rows] != list(range(len(rows))):
            raise ValueError(f"{path}: ids are not dense from 0")
        surfaces = [s for _, s in rows]
        if surfaces[: len(SPECIALS)] != list(SPECIALS):
            raise ValueError(f"{path}: reserved rows missing or reordered")
        return cls(surfaces[len(SPECIALS):])


def build_vocab(
    sentences: Iterable[Sentence], min_count: int = 1, max_size: int = 50_000
) -> Vocabulary:
    """Frequency vocabulary: count >= min_count, ranked by (count desc,
    surface asc), truncated to max_size - 3 non-special entries."""
    if max_size <= len(SPECIALS):
        raise ValueError(f"max_size must exceed {len(SPECIALS)}")
    counts = Counter()
    for sentence in sentences:
        counts.update(t for t in sentence if t not in SPECIALS)
    ranked = sorted(
        (item for item in counts.items() if item[1] >= min_count),
        key=lambda item: (-item[1], item[0]),
    )
    kept = [surface for surface, _ in ranked[: max_size - len(SPECIALS)]]
    return Vocabulary(kept)


def encode(sentence: Sentence, vocab: Vocabulary) -> list[int]:
    """Map tokens to ids; unknown tokens become UNK_ID."""
    return [vocab.id(t) for t in sentence]


def decode(ids: Iterable[int], vocab: Vocabulary) -> Sentence:
    return [vocab.surface(i) for i in ids]
