"""Substitution boxes built from the chaotic bit stream."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .chaos import BitReader, GeneratorConfig
from .errors import ExhaustionError, FixtureParseError, NotBijectiveError


def check_permutation(table: Sequence[int], n: int) -> None:
    """Raise :class:`NotBijectiveError` naming the first offending entry."""
    size = 1 << n
    if len(table) != size:
        raise NotBijectiveError(f"an {n}-bit S-box needs {size} entries, got {len(table)}")
    first_seen = {}
    for index, value in enumerate(table):
        if not 0 <= value < size:
            raise NotBijectiveError(f"entry {value} at index {index} is outside [0, {size})", value, index)
        if value in first_seen:
            raise NotBijectiveError(
                f"duplicate value {value} at index {index} (first at index {first_seen[value]})", value, index
            )
        first_seen[value] = index


class SBox:
    """An ``n x n`` lookup table.

    Construction checks that the table is a permutation unless
    ``check=False``, which is only meant for analysing defective tables.
    """

    __slots__ = ("n", "table", "bits_consumed")

    def __init__(self, table: Iterable[int], n: int | None = None, *, check: bool = True, bits_consumed: int | None = None):
        values = np.array([int(v) for v in table], dtype=np.int64)
        if n is None:
            n = int(values.size).bit_length() - 1
        if not 2 <= n <= 16 or values.size != 1 << n:
            raise ValueError(f"table of {values.size} entries is not a 2**n table with 2 <= n <= 16")
        if check:
            check_permutation(values.tolist(), n)
        values.setflags(write=False)
        self.n = n
        self.table = values
        self.bits_consumed = bits_consumed

    @classmethod
    def identity(cls, n: int) -> "SBox":
        return cls(range(1 << n), n)

    def __len__(self):
        return self.table.size

    def __getitem__(self, x):
        return int(self.table[x])

    def __iter__(self):
        return iter(self.table.tolist())

    def __eq__(self, other):
        if not isinstance(other, SBox):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def __repr__(self):
        head = ", ".join(str(v) for v in self.table[:6].tolist())
        return f"SBox(n={self.n}, [{head}, ...])"

    @property
    def is_permutation(self) -> bool:
        return np.unique(self.table).size == self.table.size and int(self.table.max()) < self.table.size

    def xor_output(self, constant: int) -> "SBox":
        return SBox(self.table ^ constant, self.n)


def invert(sbox: SBox) -> SBox:
    """Inverse table ``T`` with ``T[S[x]] = x``."""
    check_permutation(sbox.table.tolist(), sbox.n)
    inverse = np.empty_like(sbox.table)
    inverse[sbox.table] = np.arange(sbox.table.size)
    return SBox(inverse, sbox.n, check=False)


def _block_values(bits: np.ndarray, n: int) -> np.ndarray:
    weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    return bits.reshape(-1, n).astype(np.int64) @ weights


def collect(reader: BitReader, n: int, max_bits: int | None = None) -> SBox:
    """Read ``n``-bit blocks from ``reader`` until every word has appeared.

    Blocks are read most significant bit first.  Repeats of an earlier word
    are dropped, so the table lists words in order of first arrival.  The
    reader is left positioned just after the last block used.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    size = 1 << n
    if max_bits is None:
        max_bits = 64 * n * size
    if max_bits < n * size:
        raise ValueError(f"max_bits must be at least n * 2**n = {n * size}")
    start = reader.position
    seen = np.zeros(size, dtype=bool)
    order: list[int] = []
    batch_blocks = max(size, 64)
    budget_blocks = max_bits // n
    used = 0
    while len(order) < size:
        want = min(batch_blocks, budget_blocks - used)
        if want <= 0:
            break
        chunk = reader.peek(want * n)
        whole = chunk.size // n
        if whole == 0:
            break
        values = _block_values(chunk[: whole * n], n).tolist()
        taken = whole
        for j, v in enumerate(values):
            if not seen[v]:
                seen[v] = True
                order.append(v)
                if len(order) == size:
                    taken = j + 1
                    break
        reader.skip(taken * n)
        used += taken
        if whole < want:
            break
    if len(order) < size:
        raise ExhaustionError(
            f"only {len(order)} of {size} distinct {n}-bit words after {reader.position - start} bits"
        )
    return SBox(order, n, check=False, bits_consumed=reader.position - start)


def generate(config: GeneratorConfig, n: int = 8, max_bits: int | None = None) -> SBox:
    """Build an ``n x n`` S-box from a fresh stream of ``config``.

    ``max_bits`` defaults to ``64 * n * 2**n``; running out raises
    :class:`ExhaustionError`.  ``bits_consumed`` on the result records how
    much of the stream was used.
    """
    return collect(BitReader.from_config(config), n, max_bits)


def generate_from_bits(bits: Iterable[int], n: int, max_bits: int | None = None) -> SBox:
    """Same construction over an explicit, finite bit sequence."""
    bits = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
    if max_bits is None:
        max_bits = max(bits.size, n << n)
    return collect(BitReader(bits), n, max_bits)


@dataclass(frozen=True)
class SBoxFamily:
    """S-boxes cut one after another from a single continuous stream."""

    members: tuple[SBox, ...]
    config: GeneratorConfig | None = None
    offsets: tuple[int, ...] = field(default=())

    def __len__(self):
        return len(self.members)

    def __getitem__(self, index) -> SBox:
        return self.members[index]

    def __iter__(self):
        return iter(self.members)

    @classmethod
    def repeat(cls, sbox: SBox, count: int) -> "SBoxFamily":
        return cls(tuple([sbox] * count))

    def inverted(self) -> "SBoxFamily":
        return SBoxFamily(tuple(invert(s) for s in self.members), self.config, self.offsets)


def generate_family(config: GeneratorConfig, n: int = 8, count: int = 1, max_bits: int | None = None) -> SBoxFamily:
    """``count`` consecutive S-boxes from one stream; no reseeding between members."""
    if count < 1:
        raise ValueError("count must be at least 1")
    reader = BitReader.from_config(config)
    members, offsets = [], []
    for _ in range(count):
        offsets.append(reader.position)
        members.append(collect(reader, n, max_bits))
    return SBoxFamily(tuple(members), config, tuple(offsets))


def _grid_shape(n: int) -> tuple[int, int] | None:
    if n % 2:
        return None
    side = 1 << (n // 2)
    return side, side


def format_fixture(sbox: SBox) -> str:
    """Decimal grid text; 8-bit boxes use the bare 16 x 16 layout, other sizes get an ``n=`` header."""
    values = sbox.table.tolist()
    width = len(str((1 << sbox.n) - 1))
    shape = _grid_shape(sbox.n)
    lines = [] if sbox.n == 8 else [f"n={sbox.n}"]
    if shape is None:
        lines.extend(str(v) for v in values)
    else:
        rows, cols = shape
        for r in range(rows):
            lines.append(" ".join(f"{v:>{width}}" for v in values[r * cols:(r + 1) * cols]))
    return "\n".join(lines) + "\n"


def parse_fixture(text: str, *, check: bool = True) -> SBox:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    n = None
    if lines and lines[0].replace(" ", "").startswith("n="):
        try:
            n = int(lines[0].replace(" ", "")[2:])
        except ValueError as exc:
            raise FixtureParseError(f"bad header line {lines[0]!r}") from exc
        lines = lines[1:]
    tokens = " ".join(lines).replace(",", " ").split()
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise FixtureParseError(f"non-integer token in S-box fixture: {exc}") from exc
    if n is None:
        count = len(values)
        if count < 4 or count & (count - 1):
            raise FixtureParseError(f"fixture holds {count} values, not a power of two >= 4")
        n = count.bit_length() - 1
    if len(values) != 1 << n:
        raise FixtureParseError(f"expected {1 << n} values for n={n}, found {len(values)}")
    if not 2 <= n <= 16:
        raise FixtureParseError(f"unsupported word size n={n}")
    return SBox(values, n, check=check)


def load_fixture(path, *, check: bool = True) -> SBox:
    return parse_fixture(Path(path).read_text(), check=check)


def save_fixture(sbox: SBox, path) -> None:
    Path(path).write_text(format_fixture(sbox))


def coupon_collector_blocks(n: int) -> float:
    """Expected number of uniform ``n``-bit blocks needed to see every word: ``2**n * H(2**n)``."""
    size = 1 << n
    return size * math.fsum(1.0 / k for k in range(1, size + 1))


BUNDLED_FIXTURES = ("table2", "aes")


def bundled_fixture(name: str) -> SBox:
    """Reference boxes shipped with the package: ``table2`` (the reference example) and ``aes``."""
    from importlib import resources

    if name not in BUNDLED_FIXTURES:
        raise KeyError(f"no bundled fixture {name!r}; choose from {BUNDLED_FIXTURES}")
    return parse_fixture(resources.files("lagsbox").joinpath("data", f"{name}.txt").read_text())
