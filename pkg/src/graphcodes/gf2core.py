"""Binary words, GF(2) matrices, parity-check codes and their metrics.

Rows and words are packed into Python ints with bit ``i`` holding position
``i``; the dataclasses below only expose the 0/1 view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from graphcodes import _backend
from graphcodes.errors import DegenerateCodeError, DimensionError, DomainError, ParseError, SizeError

ENUMERATION_CAP = 24


@dataclass(frozen=True)
class BitWord:
    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 1:
            raise DimensionError("a word needs length >= 1")
        if self.value < 0 or self.value >> self.length:
            raise DomainError("word value does not fit its length")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitWord:
        bits = list(bits)
        value = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise DomainError(f"entry {i} is {b!r}, expected 0 or 1")
            value |= b << i
        return cls(len(bits), value)

    @classmethod
    def from_string(cls, text: str) -> BitWord:
        return cls.from_bits(int(ch) for ch in text.strip())

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in range(self.length))

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def __str__(self):
        return "".join(map(str, self.bits))


def hamming_distance(u: BitWord, v: BitWord) -> int:
    if u.length != v.length:
        raise DimensionError(f"length mismatch: {u.length} vs {v.length}")
    return (u.value ^ v.value).bit_count()


@dataclass(frozen=True)
class BitMatrix:
    rows: int
    cols: int
    data: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 1:
            raise DimensionError("need rows >= 0 and cols >= 1")
        if len(self.data) != self.rows:
            raise DimensionError("row count does not match data")
        for r in self.data:
            if r < 0 or r >> self.cols:
                raise DomainError("row value does not fit the column count")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> BitMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise DimensionError("cannot infer column count of an empty matrix")
            cols = len(rows[0])
        data = []
        for j, row in enumerate(rows):
            if len(row) != cols:
                raise DimensionError(f"row {j} has {len(row)} entries, expected {cols}")
            data.append(BitWord.from_bits(row).value)
        return cls(len(rows), cols, tuple(data))

    @classmethod
    def from_array(cls, arr) -> BitMatrix:
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise DimensionError("expected a 2-D array")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise DomainError("entries must be 0 or 1")
        packed = np.packbits(arr.astype(bool), axis=1, bitorder="little")
        data = tuple(int.from_bytes(row.tobytes(), "little") for row in packed)
        return cls(arr.shape[0], arr.shape[1], data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    def entry(self, i: int, j: int) -> int:
        return (self.data[i] >> j) & 1

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, r in enumerate(self.data):
            for j in range(self.cols):
                out[i, j] = (r >> j) & 1
        return out

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.data]

    def column(self, j: int) -> int:
        """Column ``j`` as a bitset over row indices."""
        return sum(((r >> j) & 1) << i for i, r in enumerate(self.data))

    def multiply(self, word: BitWord) -> tuple[int, ...]:
        """Syndrome ``M w`` over GF(2)."""
        if word.length != self.cols:
            raise DimensionError("word length does not match column count")
        return tuple((r & word.value).bit_count() & 1 for r in self.data)

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines.extend(" ".join(map(str, row)) for row in self.to_lists())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> BitMatrix:
        lines = text.splitlines()
        if not lines:
            raise ParseError("empty matrix file", line=1)
        head = lines[0].split()
        try:
            m, n = (int(x) for x in head)
        except ValueError:
            raise ParseError(f"bad header {lines[0]!r}, expected 'm n'", line=1) from None
        body = lines[1:]
        while body and not body[-1].strip():
            body.pop()
        if len(body) != m:
            raise ParseError(f"expected {m} rows, found {len(body)}", line=len(lines))
        rows = []
        for ln, line in enumerate(body, start=2):
            toks = line.split()
            if len(toks) != n or any(t not in ("0", "1") for t in toks):
                raise ParseError(f"expected {n} entries in {{0,1}}", line=ln)
            rows.append([int(t) for t in toks])
        return cls.from_rows(rows, cols=n)


def _echelon(m: BitMatrix) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; returns (pivot rows, pivot columns)."""
    rows = [r for r in m.data if r]
    pivots: list[int] = []
    pcols: list[int] = []
    for col in range(m.cols):
        bit = 1 << col
        hit = next((i for i, r in enumerate(rows) if r & bit), None)
        if hit is None:
            continue
        prow = rows.pop(hit)
        rows = [r ^ prow if r & bit else r for r in rows]
        pivots = [p ^ prow if p & bit else p for p in pivots]
        pivots.append(prow)
        pcols.append(col)
        rows = [r for r in rows if r]
    return pivots, pcols


def rank_gf2(m: BitMatrix) -> int:
    return len(_echelon(m)[1])


def nullspace_basis(m: BitMatrix) -> list[BitWord]:
    """One basis word per free column of the reduced echelon form."""
    pivots, pcols = _echelon(m)
    pset = set(pcols)
    basis = []
    for f in range(m.cols):
        if f in pset:
            continue
        value = 1 << f
        for prow, pc in zip(pivots, pcols):
            if (prow >> f) & 1:
                value |= 1 << pc
        basis.append(BitWord(m.cols, value))
    return basis


def nullspace_enumerate(m: BitMatrix, cap: int = ENUMERATION_CAP) -> list[BitWord]:
    basis = nullspace_basis(m)
    if len(basis) > cap:
        raise SizeError(f"nullspace dimension {len(basis)} exceeds enumeration cap {cap}")
    words = [0]
    for b in basis:
        words += [w ^ b.value for w in words]
    return [BitWord(m.cols, w) for w in sorted(words)]


@dataclass(frozen=True)
class LinearCode:
    parity_check: BitMatrix

    @property
    def n(self) -> int:
        return self.parity_check.cols

    @cached_property
    def rank(self) -> int:
        return rank_gf2(self.parity_check)

    @property
    def dimension(self) -> int:
        return self.n - self.rank

    @property
    def size(self) -> int:
        return 1 << self.dimension

    @cached_property
    def basis(self) -> tuple[BitWord, ...]:
        return tuple(nullspace_basis(self.parity_check))

    def contains(self, word: BitWord) -> bool:
        return not any(self.parity_check.multiply(word))

    def codewords(self, cap: int = ENUMERATION_CAP) -> list[BitWord]:
        return nullspace_enumerate(self.parity_check, cap)


def min_distance(code: LinearCode, cap: int = ENUMERATION_CAP, backend: str | None = None) -> int:
    """Minimum weight of a nonzero codeword, which equals the minimum distance."""
    return min_weight_word(code, cap, backend).weight


def min_weight_word(code: LinearCode, cap: int = ENUMERATION_CAP, backend: str | None = None) -> BitWord:
    k = code.dimension
    if k == 0:
        raise DegenerateCodeError("the code is {0}; minimum distance is undefined")
    if k > cap:
        raise SizeError(f"code dimension {k} exceeds enumeration cap {cap}")
    basis = [b.value for b in code.basis]
    w, mask = _backend.min_weight(basis, code.n, backend)
    value = 0
    for j, b in enumerate(basis):
        if (mask >> j) & 1:
            value ^= b
    word = BitWord(code.n, value)
    assert word.weight == w
    return word


def relative_distance(code: LinearCode, cap: int = ENUMERATION_CAP) -> float:
    return (min_distance(code, cap) - 1) / code.n


def rate_and_redundancy(code: LinearCode) -> tuple[float, float]:
    rate = code.dimension / code.n
    return rate, 1.0 - rate


def entropy(x: float) -> float:
    """Binary entropy in bits; H(0) = H(1) = 0."""
    if not 0.0 <= x <= 1.0 or math.isnan(x):
        raise DomainError(f"entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)
