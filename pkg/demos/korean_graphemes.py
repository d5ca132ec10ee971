"""Turn Korean text into grapheme ids."""
from emoprep.text_frontend import (
    SymbolTable, decompose_syllable, graphemes_to_symbols, normalize_text, text_to_graphemes,
)

table = SymbolTable()
print("symbol inventory:", len(table))

for ch in "한국어":
    print(ch, "->", decompose_syllable(ch))

raw = "  오늘   날씨가 좋네요!  "
print("normalized:", repr(normalize_text(raw)))
seq = text_to_graphemes(raw, table)
print("ids:", list(seq.ids))
print("symbols:", " ".join(graphemes_to_symbols(seq, table)))

try:
    text_to_graphemes("hello", table)
except Exception as exc:
    print("rejected:", exc)
