"""Truth tables, Walsh-Hadamard spectra and S-box component functions.

Bit order is global: for an ``n``-bit word the first coordinate
(``x_1`` on the input side, ``f_1`` on the output side) is the most
significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PARITY8 = np.array([bin(v).count("1") & 1 for v in range(256)], dtype=np.uint8)


def parity(values) -> np.ndarray:
    """Elementwise parity of nonnegative integers (up to 32 bits)."""
    v = np.asarray(values, dtype=np.uint32)
    return _PARITY8[(v ^ (v >> 8) ^ (v >> 16) ^ (v >> 24)) & 0xFF]


def dot_product(x: int, w: int) -> int:
    """``x . w`` over GF(2): parity of the bitwise AND."""
    return (int(x) & int(w)).bit_count() & 1


@dataclass(frozen=True, eq=False)
class TruthTable:
    n: int
    outputs: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= 16:
            raise ValueError(f"arity must be in [1, 16], got {self.n}")
        out = np.asarray(self.outputs, dtype=np.uint8)
        if out.shape != (1 << self.n,):
            raise ValueError(f"truth table of arity {self.n} needs {1 << self.n} entries, got {out.size}")
        if out.size and out.max() > 1:
            raise ValueError("truth table entries must be 0 or 1")
        out = out.copy()
        out.setflags(write=False)
        object.__setattr__(self, "outputs", out)

    @classmethod
    def linear(cls, n: int, w: int) -> "TruthTable":
        return cls(n, parity(np.arange(1 << n) & w))

    def __xor__(self, other: "TruthTable") -> "TruthTable":
        if other.n != self.n:
            raise ValueError("arity mismatch")
        return TruthTable(self.n, self.outputs ^ other.outputs)

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.outputs, other.outputs)

    def __hash__(self):
        return hash((self.n, self.outputs.tobytes()))

    def __len__(self):
        return self.outputs.size

    def polarity(self) -> np.ndarray:
        """(-1)**f(x) as int64."""
        return 1 - 2 * self.outputs.astype(np.int64)


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    n: int
    values: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, WalshSpectrum):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __getitem__(self, w):
        return int(self.values[w])

    @property
    def max_abs(self) -> int:
        return int(np.abs(self.values).max())


def fwht(polar: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard butterfly along the last axis.

    ``polar`` holds +-1 (or any integers); the result is int64 and the input
    is not modified.  Works on stacks of tables, one per leading index.
    """
    a = np.array(polar, dtype=np.int64, copy=True)
    size = a.shape[-1]
    if size & (size - 1):
        raise ValueError("transform length must be a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(*lead, size // (2 * h), 2, h)
        lo = v[..., 0, :].copy()
        hi = v[..., 1, :]
        v[..., 0, :] += hi
        v[..., 1, :] = lo - hi
        h *= 2
    return a


def walsh_transform(f: TruthTable) -> WalshSpectrum:
    """``W(w) = sum_x (-1)**(f(x) ^ x.w)`` for every mask ``w``."""
    return WalshSpectrum(f.n, fwht(f.polarity()))


def hamming_weight(f: TruthTable) -> int:
    return int(f.outputs.sum(dtype=np.int64))


def hamming_distance(f: TruthTable, g: TruthTable) -> int:
    return hamming_weight(f ^ g)


def _table_and_width(sbox) -> tuple[np.ndarray, int]:
    table = np.asarray(getattr(sbox, "table", sbox), dtype=np.int64)
    n = getattr(sbox, "n", None)
    if n is None:
        n = int(table.size).bit_length() - 1
    return table, n


def component_function(sbox, bit_index: int) -> TruthTable:
    """Truth table of output coordinate ``f_bit_index`` (1 = most significant bit)."""
    table, n = _table_and_width(sbox)
    if not 1 <= bit_index <= n:
        raise IndexError(f"bit_index must be in [1, {n}], got {bit_index}")
    return TruthTable(n, (table >> (n - bit_index)) & 1)


def linear_combination(sbox, mask: int) -> TruthTable:
    """``a_1 f_1 ^ ... ^ a_n f_n`` where ``a_1`` is the most significant bit of ``mask``.

    Equivalent to ``mask . S(x)`` evaluated at every input.
    """
    table, n = _table_and_width(sbox)
    if not 0 < mask < (1 << n):
        raise ValueError(f"mask must be in [1, {(1 << n) - 1}], got {mask}")
    return TruthTable(n, parity(table & mask))


def combination_matrix(sbox) -> np.ndarray:
    """Rows ``b = 0 .. 2**n - 1`` holding the truth table of ``b . S(x)``."""
    table, n = _table_and_width(sbox)
    masks = np.arange(1 << n, dtype=np.int64)
    return parity(masks[:, None] & table[None, :])
