"""Hangul syllable decomposition and grapheme ID sequences.

Each precomposed syllable (U+AC00..U+D7A3) splits arithmetically into an
onset, nucleus and coda index. Symbols are named by their Unicode
conjoining jamo (U+1100 onsets, U+1161 nuclei, U+11A8 codas) so that an
onset and a coda spelled with the same letter stay distinct.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyText, IndexOutOfRange, NotHangulSyllable, UnsupportedCharacter

SYLLABLE_BASE = 0xAC00
SYLLABLE_LAST = 0xD7A3
N_ONSETS, N_NUCLEI, N_CODAS = 19, 21, 28
NUCLEUS_SPAN = N_CODAS  # 28
ONSET_SPAN = N_NUCLEI * N_CODAS  # 588

ONSETS = tuple(chr(0x1100 + i) for i in range(N_ONSETS))
NUCLEI = tuple(chr(0x1161 + i) for i in range(N_NUCLEI))
EMPTY_CODA = "<nocoda>"
CODAS = (EMPTY_CODA,) + tuple(chr(0x11A8 + i) for i in range(N_CODAS - 1))

PAD = "<pad>"
SPACE = " "
DEFAULT_EXTRAS = (SPACE, ".", ",", "?", "!", '"', "'", "“", "”", "‘", "’") + tuple("0123456789")

_WHITESPACE = re.compile(r"\s+")


def decompose_syllable(ch: str) -> tuple:
    """``(onset, nucleus, coda)`` indices of a precomposed Hangul syllable."""
    if len(ch) != 1 or not SYLLABLE_BASE <= ord(ch) <= SYLLABLE_LAST:
        raise NotHangulSyllable(f"{ch!r} is not a precomposed Hangul syllable")
    s = ord(ch) - SYLLABLE_BASE
    return s // ONSET_SPAN, (s % ONSET_SPAN) // NUCLEUS_SPAN, s % NUCLEUS_SPAN


def compose_syllable(onset: int, nucleus: int, coda: int = 0) -> str:
    if not (0 <= onset < N_ONSETS and 0 <= nucleus < N_NUCLEI and 0 <= coda < N_CODAS):
        raise IndexOutOfRange(f"jamo indices out of range: ({onset}, {nucleus}, {coda})")
    return chr(SYLLABLE_BASE + ONSET_SPAN * onset + NUCLEUS_SPAN * nucleus + coda)


@dataclass(frozen=True)
class SymbolTable:
    """Dense symbol inventory; ID 0 is reserved for padding."""

    extras: tuple = DEFAULT_EXTRAS
    symbols: tuple = field(init=False, repr=False)

    def __post_init__(self):
        symbols = (PAD,) + ONSETS + NUCLEI + CODAS + tuple(self.extras)
        if len(set(symbols)) != len(symbols):
            raise ValueError("duplicate symbols in table")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "_ids", {s: i for i, s in enumerate(symbols)})

    def __len__(self):
        return len(self.symbols)

    def onset_id(self, i: int) -> int:
        return 1 + i

    def nucleus_id(self, i: int) -> int:
        return 1 + N_ONSETS + i

    def coda_id(self, i: int) -> int:
        return 1 + N_ONSETS + N_NUCLEI + i

    def id_of(self, symbol: str) -> int:
        return self._ids[symbol]

    def __contains__(self, symbol):
        return symbol in self._ids

    def to_dict(self) -> dict:
        return {s: i for i, s in enumerate(self.symbols)}

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False, indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "SymbolTable":
        mapping = json.loads(Path(path).read_text(encoding="utf-8"))
        ordered = [s for s, _ in sorted(mapping.items(), key=lambda kv: kv[1])]
        if [mapping[s] for s in ordered] != list(range(len(ordered))):
            raise ValueError("symbol ids are not dense")
        n_fixed = 1 + N_ONSETS + N_NUCLEI + N_CODAS
        table = cls(extras=tuple(ordered[n_fixed:]))
        if table.symbols != tuple(ordered):
            raise ValueError("symbol table layout does not match the jamo inventory")
        return table


@dataclass(frozen=True)
class GraphemeSequence:
    ids: tuple
    source_text: str

    def __len__(self):
        return len(self.ids)


def normalize_text(text: str) -> str:
    return _WHITESPACE.sub(SPACE, text).strip()


def text_to_graphemes(text: str, table: SymbolTable | None = None) -> GraphemeSequence:
    """Map a transcript to grapheme IDs.

    Empty codas are not emitted. Characters outside Hangul syllables and the
    table's extras are rejected with their UTF-8 byte offset in ``text``.
    """
    table = table or SymbolTable()
    if not normalize_text(text):
        raise EmptyText("transcript is empty after whitespace normalisation")

    ids = []
    byte_offset = 0
    prev_space = True  # swallows leading whitespace
    for ch in text:
        if ch.isspace():
            if not prev_space:
                ids.append(table.id_of(SPACE))
            prev_space = True
        elif SYLLABLE_BASE <= ord(ch) <= SYLLABLE_LAST:
            onset, nucleus, coda = decompose_syllable(ch)
            ids.append(table.onset_id(onset))
            ids.append(table.nucleus_id(nucleus))
            if coda:
                ids.append(table.coda_id(coda))
            prev_space = False
        elif ch in table.extras:
            ids.append(table.id_of(ch))
            prev_space = False
        else:
            raise UnsupportedCharacter(ch, ord(ch), byte_offset)
        byte_offset += len(ch.encode("utf-8"))
    if ids and ids[-1] == table.id_of(SPACE):
        ids.pop()
    return GraphemeSequence(tuple(ids), text)


def graphemes_to_symbols(seq, table: SymbolTable | None = None) -> list:
    table = table or SymbolTable()
    ids = seq.ids if isinstance(seq, GraphemeSequence) else seq
    return [table.symbols[i] for i in ids]
