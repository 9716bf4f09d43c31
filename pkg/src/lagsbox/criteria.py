"""The six good-S-box criteria.

Conventions:

* input and output coordinates are numbered from the most significant bit;
* SAC matrices are indexed ``[output bit, flipped input bit]``;
* the linear approximation table holds ``#{x : a.x = b.S(x)} - 2**(n-1)``,
  so MELP is the largest squared bias ``(LAT / 2**n)**2`` over nonzero masks.

Every routine materializes ``2**n x 2**n`` integer tables, which is cheap at
``n = 8`` and impractical much beyond ``n = 12``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .boolean import TruthTable, combination_matrix, fwht, walsh_transform


def _as_table(sbox) -> tuple[np.ndarray, int]:
    table = np.asarray(getattr(sbox, "table", sbox), dtype=np.int64)
    n = getattr(sbox, "n", None) or int(table.size).bit_length() - 1
    return table, n


def _components(table: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1)
    return ((table[None, :] >> shifts[:, None]) & 1).astype(np.uint8)


def _input_flips(n: int) -> np.ndarray:
    return 1 << np.arange(n - 1, -1, -1)


@dataclass(frozen=True)
class Bijectivity:
    bijective: bool
    weights: tuple[int, ...]
    permutation: bool


def bijectivity(sbox) -> Bijectivity:
    """Weight test: every nonzero combination ``b . S(x)`` must have weight ``2**(n-1)``.

    ``weights[b - 1]`` is the weight for mask ``b``.  ``permutation`` is the
    direct distinct-values check; the two always agree.
    """
    table, n = _as_table(sbox)
    weights = combination_matrix(table)[1:].sum(axis=1, dtype=np.int64)
    bijective = bool(np.all(weights == 1 << (n - 1)))
    permutation = bool(np.unique(table).size == table.size and table.min() >= 0 and table.max() < table.size)
    return Bijectivity(bijective, tuple(int(w) for w in weights), permutation)


def nonlinearity(f: TruthTable) -> int:
    """Distance to the nearest affine function, ``2**(n-1) - max|W| / 2``."""
    return (1 << (f.n - 1)) - walsh_transform(f).max_abs // 2


def nonlinearities(sbox) -> list[int]:
    table, n = _as_table(sbox)
    spectra = fwht(1 - 2 * _components(table, n).astype(np.int64))
    return [int(v) for v in (1 << (n - 1)) - np.abs(spectra).max(axis=1) // 2]


def avalanche_counts(f: TruthTable) -> np.ndarray:
    """``sum_x f(x) ^ f(x ^ e_i)`` for each single-bit flip ``e_1 .. e_n``."""
    x = np.arange(1 << f.n)
    out = f.outputs
    return np.array([int((out ^ out[x ^ e]).sum()) for e in _input_flips(f.n)], dtype=np.int64)


def _avalanche_stack(funcs: np.ndarray, n: int) -> np.ndarray:
    # funcs: (k, 2**n) -> (k, n) flip counts
    x = np.arange(1 << n)
    flips = _input_flips(n)
    moved = funcs[:, x[None, :] ^ flips[:, None]]  # (k, n, 2**n)
    return (funcs[:, None, :] ^ moved).sum(axis=2, dtype=np.int64)


def sac_matrix(sbox) -> np.ndarray:
    """Flip probabilities; entry ``[j, i]`` is P(f_j changes | input bit i flipped)."""
    table, n = _as_table(sbox)
    return _avalanche_stack(_components(table, n), n) / float(1 << n)


def dynamic_distance(f: TruthTable) -> int:
    """``max_i |2**(n-1) - sum_x f(x) ^ f(x ^ e_i)| / 2`` over single-bit flips."""
    counts = avalanche_counts(f)
    return int(np.abs((1 << (f.n - 1)) - counts).max() // 2)


@dataclass(frozen=True)
class BIC:
    nl: np.ndarray
    sac: np.ndarray
    dd: np.ndarray

    def _off_diagonal(self, m):
        return m[~np.eye(m.shape[0], dtype=bool)]

    @property
    def nl_mean(self) -> float:
        return float(self._off_diagonal(self.nl).mean())

    @property
    def sac_mean(self) -> float:
        return float(self._off_diagonal(self.sac).mean())

    @property
    def dd_max(self) -> int:
        return int(self.dd.max())


def bic(sbox) -> BIC:
    """Nonlinearity, mean SAC and dynamic distance of every ``f_i ^ f_j``, ``i != j``.

    Diagonals are zero; summaries use off-diagonal cells only.
    """
    table, n = _as_table(sbox)
    comps = _components(table, n)
    i, j = np.triu_indices(n, k=1)
    pairs = comps[i] ^ comps[j]
    spectra = fwht(1 - 2 * pairs.astype(np.int64))
    nl_pairs = (1 << (n - 1)) - np.abs(spectra).max(axis=1) // 2
    counts = _avalanche_stack(pairs, n)
    sac_pairs = counts.mean(axis=1) / float(1 << n)
    dd_pairs = np.abs((1 << (n - 1)) - counts).max(axis=1) // 2
    nl = np.zeros((n, n), dtype=np.int64)
    sac = np.zeros((n, n))
    dd = np.zeros((n, n), dtype=np.int64)
    for m, vals in ((nl, nl_pairs), (sac, sac_pairs), (dd, dd_pairs)):
        m[i, j] = vals
        m[j, i] = vals
    return BIC(nl, sac, dd)


@dataclass(frozen=True)
class Differential:
    table: np.ndarray
    max_count: int
    dp: float

    def row_max_half(self) -> np.ndarray:
        """Largest count per nonzero input difference, halved (one entry per pair {x, x ^ dx})."""
        return self.table[1:].max(axis=1) // 2


def ddt(sbox) -> Differential:
    """Difference distribution table ``T[dx][dy] = #{x : S(x) ^ S(x ^ dx) = dy}``.

    ``dp`` is the largest count with ``dx != 0`` divided by ``2**n``.
    """
    table, n = _as_table(sbox)
    size = 1 << n
    x = np.arange(size)
    dx = np.arange(size)[:, None]
    dy = table[None, :] ^ table[x[None, :] ^ dx]
    flat = np.bincount((dx * size + dy).ravel(), minlength=size * size)
    counts = flat.reshape(size, size).astype(np.int64)
    max_count = int(counts[1:].max())
    return Differential(counts, max_count, max_count / size)


@dataclass(frozen=True)
class Linear:
    table: np.ndarray
    melp: float
    mean_sq_bias: float

    @property
    def max_abs(self) -> int:
        return int(np.abs(self.table[1:, 1:]).max())

    @property
    def max_correlation_sq(self) -> float:
        """Largest squared correlation ``(2 * LAT / 2**n)**2``, four times ``melp``."""
        size = self.table.shape[0]
        return (2.0 * self.max_abs / size) ** 2


def lat(sbox) -> Linear:
    """Linear approximation table ``L[a][b] = #{x : a.x = b.S(x)} - 2**(n-1)``.

    Equivalently half the Walsh coefficient of ``b . S`` at ``a``.
    """
    table, n = _as_table(sbox)
    size = 1 << n
    spectra = fwht(1 - 2 * combination_matrix(table).astype(np.int64))  # [b, a]
    counts = spectra.T // 2
    bias_sq = (counts[1:, 1:] / float(size)) ** 2
    return Linear(counts, float(bias_sq.max()), float(bias_sq.mean()))


@dataclass
class CriteriaReport:
    n: int
    bijective: bool
    bijective_weights: list
    nonlinearities: list
    nl_min: int
    nl_max: int
    nl_avg: float
    sac_matrix: list
    sac_min: float
    sac_max: float
    sac_avg: float
    bic_nl_matrix: list
    bic_nl_mean: float
    bic_sac_matrix: list
    bic_sac_mean: float
    bic_dd_matrix: list
    bic_dd_max: int
    ddt: list
    ddt_max: int
    dp: float
    lat_sq_max: float
    lat_sq_mean_nonzero: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "CriteriaReport":
        return cls(**data)


def full_report(sbox) -> CriteriaReport:
    table, n = _as_table(sbox)
    bij = bijectivity(table)
    nls = nonlinearities(table)
    sac = sac_matrix(table)
    b = bic(table)
    diff = ddt(table)
    lin = lat(table)
    return CriteriaReport(
        n=n,
        bijective=bij.bijective,
        bijective_weights=list(bij.weights),
        nonlinearities=nls,
        nl_min=min(nls),
        nl_max=max(nls),
        nl_avg=float(np.mean(nls)),
        sac_matrix=sac.tolist(),
        sac_min=float(sac.min()),
        sac_max=float(sac.max()),
        sac_avg=float(sac.mean()),
        bic_nl_matrix=b.nl.tolist(),
        bic_nl_mean=b.nl_mean,
        bic_sac_matrix=b.sac.tolist(),
        bic_sac_mean=b.sac_mean,
        bic_dd_matrix=b.dd.tolist(),
        bic_dd_max=b.dd_max,
        ddt=diff.table.tolist(),
        ddt_max=diff.max_count,
        dp=diff.dp,
        lat_sq_max=lin.melp,
        lat_sq_mean_nonzero=lin.mean_sq_bias,
    )
