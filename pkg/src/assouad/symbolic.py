"""Finite and periodic words over a dense integer alphabet ``0..n-1``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

__all__ = [
    "SymbolWord",
    "PeriodicWord",
    "shift",
    "cylinder_contains",
    "contains_substring",
    "enumerate_periodic",
    "lyndon_representative",
    "is_primitive",
    "covers_all_words",
    "parse_word",
]


@dataclass(frozen=True)
class SymbolWord:
    symbols: tuple
    alphabet_size: int

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise ValueError("alphabet_size must be positive")
        symbols = tuple(int(s) for s in self.symbols)
        for s in symbols:
            if not 0 <= s < self.alphabet_size:
                raise ValueError(f"symbol {s} outside alphabet of size {self.alphabet_size}")
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def of(cls, symbols: Iterable[int], alphabet_size: int) -> "SymbolWord":
        return cls(tuple(symbols), alphabet_size)

    @classmethod
    def empty(cls, alphabet_size: int) -> "SymbolWord":
        return cls((), alphabet_size)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[int]:
        return iter(self.symbols)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return SymbolWord(self.symbols[item], self.alphabet_size)
        return self.symbols[item]

    def __add__(self, other: "SymbolWord") -> "SymbolWord":
        if other.alphabet_size != self.alphabet_size:
            raise ValueError("cannot concatenate words over different alphabets")
        return SymbolWord(self.symbols + other.symbols, self.alphabet_size)

    def prefix(self, n: int) -> "SymbolWord":
        if n > len(self):
            raise ValueError("prefix longer than word")
        return SymbolWord(self.symbols[:n], self.alphabet_size)

    def append(self, letter: int) -> "SymbolWord":
        return SymbolWord(self.symbols + (letter,), self.alphabet_size)

    def __str__(self) -> str:
        return ",".join(str(s) for s in self.symbols)


@dataclass(frozen=True)
class PeriodicWord:
    """The infinite word ``block block block ...``."""

    block: SymbolWord

    def __post_init__(self):
        if len(self.block) == 0:
            raise ValueError("periodic block must be nonempty")

    @classmethod
    def of(cls, symbols: Iterable[int], alphabet_size: int) -> "PeriodicWord":
        return cls(SymbolWord.of(symbols, alphabet_size))

    @property
    def period(self) -> int:
        return len(self.block)

    @property
    def alphabet_size(self) -> int:
        return self.block.alphabet_size

    def prefix(self, m: int) -> SymbolWord:
        n = self.period
        return SymbolWord(tuple(self.block.symbols[i % n] for i in range(m)), self.alphabet_size)

    def rotate(self, k: int) -> "PeriodicWord":
        k %= self.period
        s = self.block.symbols
        return PeriodicWord(SymbolWord(s[k:] + s[:k], self.alphabet_size))

    def power(self, k: int) -> SymbolWord:
        return SymbolWord(self.block.symbols * k, self.alphabet_size)

    def __str__(self) -> str:
        return f"({self.block})^inf"


Word = Union[SymbolWord, PeriodicWord]


def shift(w: Word, k: int) -> Word:
    """Left shift by ``k`` letters; periodic words rotate."""
    if k < 0:
        raise ValueError("shift amount must be nonnegative")
    if isinstance(w, PeriodicWord):
        return w.rotate(k)
    if k > len(w):
        raise ValueError(f"cannot shift a word of length {len(w)} by {k}")
    return SymbolWord(w.symbols[k:], w.alphabet_size)


def cylinder_contains(prefix: SymbolWord, w: Word) -> bool:
    if prefix.alphabet_size != w.alphabet_size:
        raise ValueError("alphabet mismatch")
    n = len(prefix)
    if isinstance(w, PeriodicWord):
        return w.prefix(n).symbols == prefix.symbols
    if len(w) < n:
        raise ValueError("finite word shorter than the cylinder prefix; membership undecidable")
    return w.symbols[:n] == prefix.symbols


def contains_substring(w: SymbolWord, pattern: SymbolWord) -> bool:
    m = len(pattern)
    if m == 0:
        return True
    s, p = w.symbols, pattern.symbols
    return any(s[i:i + m] == p for i in range(len(s) - m + 1))


def is_primitive(block: Sequence[int]) -> bool:
    """True when ``block`` is not a proper power of a shorter word."""
    n = len(block)
    t = tuple(block)
    for d in range(1, n):
        if n % d == 0 and t[:d] * (n // d) == t:
            return False
    return True


def lyndon_representative(block: Sequence[int]) -> tuple:
    """Least rotation of the primitive root of ``block``."""
    t = tuple(block)
    n = len(t)
    root = t
    for d in range(1, n + 1):
        if n % d == 0 and t[:d] * (n // d) == t:
            root = t[:d]
            break
    return min(root[i:] + root[:i] for i in range(len(root)))


def _lyndon_words(k: int, max_len: int) -> Iterator[tuple]:
    # Duval's generation in lexicographic order
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()


def enumerate_periodic(alphabet_size: int, max_period: int) -> list:
    """One Lyndon representative per periodic orbit with minimal period <= max_period.

    Ordered by period, then lexicographically.
    """
    if alphabet_size < 1 or max_period < 1:
        raise ValueError("alphabet_size and max_period must be positive")
    if alphabet_size == 1:
        return [PeriodicWord.of((0,), 1)]
    words = sorted(_lyndon_words(alphabet_size, max_period), key=lambda t: (len(t), t))
    return [PeriodicWord.of(t, alphabet_size) for t in words]


def covers_all_words(w: SymbolWord, length: int) -> bool:
    """Whether ``w`` contains every word of each length ``<= length`` as a substring.

    A finite witness for membership in the set of sequences containing every
    finite word, checked up to a cutoff.
    """
    k = w.alphabet_size
    s = w.symbols
    for m in range(1, length + 1):
        seen = {s[i:i + m] for i in range(len(s) - m + 1)}
        if len(seen) < k ** m:
            return False
    return True


def parse_word(text: str, alphabet_size: int) -> Word:
    """Parse ``0,1,1`` or ``(0,1)^inf``."""
    text = text.strip()
    if text.endswith("^inf"):
        inner = text[:-4].strip()
        if not (inner.startswith("(") and inner.endswith(")")):
            raise ValueError(f"malformed periodic word {text!r}")
        body = inner[1:-1]
        return PeriodicWord.of((int(t) for t in body.split(",") if t.strip()), alphabet_size)
    if not text:
        return SymbolWord.empty(alphabet_size)
    return SymbolWord.of((int(t) for t in text.split(",")), alphabet_size)
