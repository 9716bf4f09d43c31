"""Logistic map, its diagnostics, and the lag-time bit generator.

Two logistic orbits are each folded through a delay line
(``m_i = x_{i-k2} + x_{i-k1} + x_i  mod 1``), the two folded series are
mixed (``z_i = m_i1 + m_i2  mod 1``) and ``z`` is thresholded at 0.5 to
give one bit per iteration.

Arithmetic order is fixed so that streams replay bit-for-bit: the map is
evaluated as ``(alpha * x) * (1 - x)``, lag sums accumulate from the
largest lag down to the current state, and ``mod1`` is applied once to the
complete sum.
"""
from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DomainError, StateNotWarmError

ALPHA_MIN = -2.0
ALPHA_MAX = 4.0

# largest binary64 value strictly below 1
_BELOW_ONE = math.nextafter(1.0, 0.0)


def invariant_interval(alpha: float) -> tuple[float, float]:
    """Interval mapped into itself by the logistic map at ``alpha``."""
    if not ALPHA_MIN <= alpha <= ALPHA_MAX:
        raise DomainError(f"alpha={alpha} outside [{ALPHA_MIN}, {ALPHA_MAX}]")
    if alpha < 0:
        return (-0.5, 1.5)
    return (0.0, 1.0)


@dataclass(frozen=True)
class LogisticParams:
    alpha: float
    x0: float

    def __post_init__(self):
        alpha, x0 = float(self.alpha), float(self.x0)
        if not ALPHA_MIN <= alpha <= ALPHA_MAX:
            raise ConfigError(f"alpha={alpha} outside [{ALPHA_MIN}, {ALPHA_MAX}]")
        lo, hi = invariant_interval(alpha)
        if not lo <= x0 <= hi:
            raise ConfigError(f"x0={x0} outside the invariant interval [{lo}, {hi}] for alpha={alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "x0", x0)

    @property
    def interval(self) -> tuple[float, float]:
        return invariant_interval(self.alpha)


def logistic_step(params: LogisticParams | float, x: float) -> float:
    """One iteration ``(alpha*x)*(1-x)``; rejects ``x`` outside the invariant interval."""
    alpha = params.alpha if isinstance(params, LogisticParams) else float(params)
    lo, hi = invariant_interval(alpha)
    if not lo <= x <= hi:
        raise DomainError(f"x={x} outside [{lo}, {hi}] for alpha={alpha}")
    return (alpha * x) * (1.0 - x)


def _iterate(alpha: float, x: float, count: int) -> list[float]:
    # hot loop, no domain checks
    out = [0.0] * count
    for i in range(count):
        x = (alpha * x) * (1.0 - x)
        out[i] = x
    return out


@dataclass(frozen=True)
class FixedPoint:
    value: float
    derivative: float

    @property
    def stability(self) -> str:
        d = abs(self.derivative)
        if d > 1:
            return "repulsive"
        if d < 1:
            return "attracting"
        return "neutral"

    @property
    def repulsive(self) -> bool:
        return abs(self.derivative) > 1


def fixed_points(alpha: float) -> list[FixedPoint]:
    """Fixed points 0 and (alpha-1)/alpha with their multipliers.

    The derivative of the map is ``alpha*(1-2x)``, which evaluates to
    ``alpha`` at 0 and ``2-alpha`` at the second fixed point.  For
    ``alpha == 0`` only the origin exists.
    """
    alpha = float(alpha)
    points = [FixedPoint(0.0, alpha)]
    if alpha != 0:
        points.append(FixedPoint((alpha - 1.0) / alpha, 2.0 - alpha))
    return points


def lyapunov_exponent(params: LogisticParams, n_iter: int = 1_000_000, burn_in: int = 1000) -> float:
    """Orbit average of ``ln|alpha*(1-2x)|``.

    Returns ``-inf`` if the orbit lands exactly on the critical point 0.5,
    where the derivative vanishes; retry with a perturbed ``x0`` in that case.
    """
    if n_iter < 1000:
        raise ValueError("n_iter must be at least 1000")
    alpha = params.alpha
    x = params.x0
    if burn_in:
        x = _iterate(alpha, x, burn_in)[-1]
    xs = np.empty(n_iter)
    xs[0] = x
    if n_iter > 1:
        xs[1:] = _iterate(alpha, x, n_iter - 1)
    deriv = np.abs(alpha * (1.0 - 2.0 * xs))
    if not deriv.all():
        return -math.inf
    return float(np.log(deriv).mean())


def bifurcation_scan(
    alpha_min: float,
    alpha_max: float,
    alpha_steps: int,
    burn_in: int = 1000,
    keep: int = 100,
    x0: float = 0.3,
) -> list[tuple[float, np.ndarray]]:
    """Attractor samples for ``alpha_steps`` evenly spaced parameter values."""
    if not (ALPHA_MIN <= alpha_min <= alpha_max <= ALPHA_MAX):
        raise DomainError(f"alpha range [{alpha_min}, {alpha_max}] not inside [{ALPHA_MIN}, {ALPHA_MAX}]")
    if alpha_steps < 1:
        raise ValueError("alpha_steps must be positive")
    alphas = np.linspace(alpha_min, alpha_max, alpha_steps) if alpha_steps > 1 else np.array([alpha_min])
    result = []
    for alpha in alphas:
        params = LogisticParams(float(alpha), x0)
        orbit = _iterate(params.alpha, params.x0, burn_in + keep)
        result.append((params.alpha, np.array(orbit[burn_in:])))
    return result


def mod1(v: float) -> float:
    """``v - floor(v)``, kept strictly below 1 even when the subtraction rounds up."""
    r = v - math.floor(v)
    return r if r < 1.0 else _BELOW_ONE


def mod1_array(v: np.ndarray) -> np.ndarray:
    r = v - np.floor(v)
    r[r >= 1.0] = _BELOW_ONE
    return r


def quantize(z: float) -> int:
    """Bit for one delayed-map value: 0 on [0, 0.5], 1 on (0.5, 1)."""
    return 0 if z <= 0.5 else 1


@dataclass(frozen=True)
class LagSpec:
    """Delay offsets of one series, stored in increasing order."""

    lags: tuple[int, ...] = ()

    def __post_init__(self):
        lags = tuple(int(k) for k in self.lags)
        if any(k < 1 for k in lags):
            raise ConfigError(f"lags must be positive integers, got {lags}")
        ordered = tuple(sorted(lags))
        if len(set(ordered)) != len(ordered):
            raise ConfigError(f"duplicate lag in {lags}")
        object.__setattr__(self, "lags", ordered)

    @classmethod
    def coerce(cls, value) -> "LagSpec":
        """Accept a LagSpec, an iterable of ints or a comma-separated string."""
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            try:
                return cls(tuple(int(k) for k in value.replace(" ", "").split(",") if k))
            except ValueError as exc:
                raise ConfigError(f"bad lag list {value!r}") from exc
        return cls(tuple(value))

    @property
    def max(self) -> int:
        return self.lags[-1] if self.lags else 0

    @property
    def summation_order(self) -> tuple[int, ...]:
        return self.lags[::-1]

    @property
    def contiguous(self) -> bool:
        return any(b - a == 1 for a, b in zip(self.lags, self.lags[1:]))

    def __iter__(self):
        return iter(self.lags)

    def __len__(self):
        return len(self.lags)


_CONFIG_KEYS = ("alpha1", "alpha2", "x01", "x02", "lags1", "lags2", "burn_in")


@dataclass(frozen=True)
class GeneratorConfig:
    params1: LogisticParams
    params2: LogisticParams
    lags1: LagSpec = field(default_factory=LagSpec)
    lags2: LagSpec = field(default_factory=LagSpec)
    burn_in: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lags1", LagSpec.coerce(self.lags1))
        object.__setattr__(self, "lags2", LagSpec.coerce(self.lags2))
        if self.params1.x0 == self.params2.x0:
            raise ConfigError("the two initial conditions must differ (x01 == x02)")
        if self.params1.alpha == self.params2.alpha:
            raise ConfigError("the two bifurcation parameters must differ (alpha1 == alpha2)")
        if int(self.burn_in) != self.burn_in or self.burn_in < 0:
            raise ConfigError(f"burn_in must be a nonnegative integer, got {self.burn_in}")
        object.__setattr__(self, "burn_in", int(self.burn_in))

    @classmethod
    def from_values(cls, alpha1, x01, alpha2, x02, lags1=(), lags2=(), burn_in=0) -> "GeneratorConfig":
        return cls(LogisticParams(alpha1, x01), LogisticParams(alpha2, x02), LagSpec.coerce(lags1), LagSpec.coerce(lags2), burn_in)

    @property
    def warmup(self) -> int:
        """Orbit steps needed after the burn-in before both delay lines are full."""
        return max(self.lags1.max, self.lags2.max)

    def as_flat(self) -> dict:
        return {
            "alpha1": self.params1.alpha,
            "alpha2": self.params2.alpha,
            "x01": self.params1.x0,
            "x02": self.params2.x0,
            "lags1": self.lags1.lags,
            "lags2": self.lags2.lags,
            "burn_in": self.burn_in,
        }

    def with_overrides(self, **overrides) -> "GeneratorConfig":
        """Copy with flat keys (``alpha1``, ``x02``, ``lags1``...) replaced; ``None`` values are ignored."""
        flat = self.as_flat()
        for key, value in overrides.items():
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown configuration key {key!r}")
            if value is not None:
                flat[key] = value
        return GeneratorConfig.from_values(
            flat["alpha1"], flat["x01"], flat["alpha2"], flat["x02"], flat["lags1"], flat["lags2"], flat["burn_in"]
        )

    def to_text(self) -> str:
        flat = self.as_flat()
        lines = []
        for key in _CONFIG_KEYS:
            value = flat[key]
            if key.startswith("lags"):
                value = ",".join(str(k) for k in value)
            else:
                value = repr(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, base: "GeneratorConfig | None" = None) -> "GeneratorConfig":
        """Parse ``key = value`` lines; keys missing from ``text`` come from ``base``."""
        base = DEFAULT_CONFIG if base is None else base
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            for sep in ("=", ":"):
                if sep in line:
                    key, value = (s.strip() for s in line.split(sep, 1))
                    break
            else:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            try:
                if key.startswith("lags"):
                    values[key] = tuple(int(k) for k in value.replace(" ", "").split(",") if k)
                elif key == "burn_in":
                    values[key] = int(value)
                else:
                    values[key] = float(value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
        return base.with_overrides(**values)

    @classmethod
    def load(cls, path, base: "GeneratorConfig | None" = None) -> "GeneratorConfig":
        return cls.from_text(Path(path).read_text(), base=base)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())


# alpha1=-2 with the (10, 5) delay line, alpha2=4 with (10, 6)
DEFAULT_CONFIG = GeneratorConfig.from_values(-2.0, 0.8147, 4.0, 0.9058, (5, 10), (6, 10))
# parameters swapped, same seeds and delay lines; this stream yields the
# reference 8x8 example box
TABLE2_CONFIG = GeneratorConfig.from_values(4.0, 0.8147, -2.0, 0.9058, (5, 10), (6, 10))
PRESETS = {"default": DEFAULT_CONFIG, "table2": TABLE2_CONFIG}


class LagSeries:
    """One logistic orbit behind a fixed-size delay line.

    The ring buffer holds the newest ``max(lag) + 1`` orbit values; the last
    entry is the current state ``x_i``.
    """

    def __init__(self, params: LogisticParams, lags: LagSpec | Sequence[int] = ()):
        self.params = params
        self.lags = LagSpec.coerce(lags)
        self.buffer: deque[float] = deque([params.x0], maxlen=self.lags.max + 1)
        self.index = 0

    @classmethod
    def with_history(cls, params: LogisticParams, lags, history: Iterable[float]) -> "LagSeries":
        """Series whose buffer is preloaded with ``history`` (oldest first)."""
        series = cls(params, lags)
        series.buffer.clear()
        series.buffer.extend(float(v) for v in history)
        series.index = len(series.buffer) - 1
        return series

    @property
    def warm(self) -> bool:
        return len(self.buffer) == self.buffer.maxlen

    @property
    def current(self) -> float:
        return self.buffer[-1]

    def advance(self, steps: int = 1) -> None:
        for _ in range(steps):
            self.buffer.append(logistic_step(self.params, self.buffer[-1]))
            self.index += 1

    def value(self) -> float:
        """Folded value for the current state."""
        if not self.warm:
            raise StateNotWarmError(
                f"delay line holds {len(self.buffer)} of {self.buffer.maxlen} values; advance before reading"
            )
        buf = self.buffer
        last = len(buf) - 1
        total = None
        for k in self.lags.summation_order:
            total = buf[last - k] if total is None else total + buf[last - k]
        total = buf[last] if total is None else total + buf[last]
        return mod1(total)

    def step(self) -> float:
        """Folded value of the current state, then advance the orbit one step."""
        value = self.value()
        self.advance()
        return value

    def step_many(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """``count`` calls of :meth:`step` at once; returns the orbit states used and their folded values."""
        if not self.warm:
            raise StateNotWarmError("delay line not filled")
        history = list(self.buffer)
        fresh = _iterate(self.params.alpha, history[-1], count)
        orbit = np.array(history + fresh)
        start = len(history) - 1
        end = start + count
        total = None
        for k in self.lags.summation_order:
            term = orbit[start - k:end - k]
            total = term.copy() if total is None else total + term
        current = orbit[start:end]
        total = current.copy() if total is None else total + current
        self.buffer.extend(fresh[-self.buffer.maxlen:])
        self.index += count
        return current, mod1_array(total)


def lag_series_step(series: LagSeries) -> float:
    """Folded value at the current state; the orbit advances one step."""
    return series.step()


class GeneratorState:
    """Mutable state of the two-orbit generator; single owner, not thread safe.

    After construction both delay lines are full and ``iteration_count`` is
    the orbit index ``i`` of the next value to be emitted, which is
    ``burn_in + max(lag)``: the oldest lag term of the first emission is the
    first retained orbit state.
    """

    def __init__(self, config: GeneratorConfig):
        self.config = config
        self.series1 = LagSeries(config.params1, config.lags1)
        self.series2 = LagSeries(config.params2, config.lags2)
        lead = config.burn_in
        if lead:
            for s in (self.series1, self.series2):
                x = _iterate(s.params.alpha, s.current, lead)[-1]
                s.buffer.clear()
                s.buffer.append(x)
                s.index = lead
        for s in (self.series1, self.series2):
            s.advance(config.warmup)
        self.iteration_count = config.burn_in + config.warmup

    @property
    def buffer1(self) -> deque:
        return self.series1.buffer

    @property
    def buffer2(self) -> deque:
        return self.series2.buffer

    def step(self) -> tuple[float, float, float]:
        m1 = self.series1.step()
        m2 = self.series2.step()
        self.iteration_count += 1
        return m1, m2, mod1(m1 + m2)

    def step_many(self, count: int) -> dict[str, np.ndarray]:
        """Advance ``count`` steps at once; columns ``i, x, m1, m2, z``."""
        x1, m1 = self.series1.step_many(count)
        _, m2 = self.series2.step_many(count)
        z = mod1_array(m1 + m2)
        i = np.arange(self.iteration_count, self.iteration_count + count)
        self.iteration_count += count
        return {"i": i, "x": x1, "m1": m1, "m2": m2, "z": z}

    def z_values(self, count: int) -> np.ndarray:
        return self.step_many(count)["z"]

    def bits(self, count: int) -> np.ndarray:
        return (self.z_values(count) > 0.5).astype(np.uint8)


def delayed_map_step(state: GeneratorState) -> float:
    """``z = m1 + m2 mod 1`` at the current index; both orbits then advance one step."""
    return state.step()[2]


def next_bit(state: GeneratorState) -> int:
    return quantize(delayed_map_step(state))


class BitReader:
    """Buffered cursor over a bit source.

    ``source`` is either a :class:`GeneratorState` (unbounded) or a finite
    sequence of bits.  Reading past the end of a finite source returns a
    short array.
    """

    def __init__(self, source, chunk: int = 1 << 14):
        self._chunk = chunk
        if isinstance(source, GeneratorState):
            self._state = source
            self._pending = np.empty(0, dtype=np.uint8)
        else:
            self._state = None
            self._pending = np.asarray(list(source) if not isinstance(source, np.ndarray) else source, dtype=np.uint8)
            if self._pending.size and self._pending.max() > 1:
                raise ValueError("bit sources may only contain 0 and 1")
        self.position = 0

    @classmethod
    def from_config(cls, config: GeneratorConfig, chunk: int = 1 << 14) -> "BitReader":
        return cls(GeneratorState(config), chunk=chunk)

    def peek(self, count: int) -> np.ndarray:
        if self._state is not None and self._pending.size < count:
            need = max(count - self._pending.size, self._chunk)
            self._pending = np.concatenate([self._pending, self._state.bits(need)])
        return self._pending[:count]

    def skip(self, count: int) -> None:
        count = min(count, self._pending.size)
        self._pending = self._pending[count:]
        self.position += count

    def read(self, count: int) -> np.ndarray:
        out = self.peek(count).copy()
        self.skip(out.size)
        return out


def bit_stream(config: GeneratorConfig, count: int) -> np.ndarray:
    """First ``count`` bits of the generator, as a uint8 array of 0/1."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return np.empty(0, dtype=np.uint8)
    return GeneratorState(config).bits(count)


def trace(config: GeneratorConfig, samples: int) -> dict[str, np.ndarray]:
    """Columns ``i, x, m1, m2, z`` for the first ``samples`` emitted steps.

    ``x`` is the raw orbit of the first series.
    """
    state = GeneratorState(config)
    if samples <= 0:
        empty = np.empty(0)
        return {"i": np.empty(0, dtype=int), "x": empty, "m1": empty, "m2": empty, "z": empty}
    return state.step_many(samples)


TRACE_HEADER = ("i", "x_i", "m_i1", "m_i2", "z_i")


def write_trace_csv(stream, columns: dict[str, np.ndarray]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for row in zip(columns["i"], columns["x"], columns["m1"], columns["m2"], columns["z"]):
        writer.writerow([int(row[0])] + [repr(float(v)) for v in row[1:]])


def read_trace_csv(stream) -> dict[str, np.ndarray]:
    reader = csv.reader(stream)
    header = next(reader)
    if tuple(header) != TRACE_HEADER:
        raise ValueError(f"unexpected trace header {header}")
    rows = list(reader)
    data = np.array(rows, dtype=float).reshape(-1, 5)
    return {"i": data[:, 0].astype(int), "x": data[:, 1], "m1": data[:, 2], "m2": data[:, 3], "z": data[:, 4]}


def pack_bits(bits: np.ndarray) -> bytes:
    """Pack 8 bits per byte, first bit in the most significant position; the tail is zero padded."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def unpack_bits(data: bytes, count: int | None = None) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    return bits if count is None else bits[:count]


def write_bits(path, bits: np.ndarray, fmt: str = "packed") -> None:
    bits = np.asarray(bits, dtype=np.uint8)
    if fmt == "packed":
        Path(path).write_bytes(pack_bits(bits))
    elif fmt == "ascii":
        Path(path).write_text("".join("01"[b] for b in bits.tolist()))
    else:
        raise ValueError(f"unknown bit format {fmt!r}")


def read_bits(path, fmt: str = "packed", count: int | None = None) -> np.ndarray:
    if fmt == "packed":
        return unpack_bits(Path(path).read_bytes(), count)
    if fmt == "ascii":
        text = Path(path).read_text().strip()
        if set(text) - {"0", "1"}:
            raise ValueError("ASCII bit files may only contain '0' and '1'")
        bits = np.frombuffer(text.encode(), dtype=np.uint8) - ord("0")
        return bits if count is None else bits[:count]
    raise ValueError(f"unknown bit format {fmt!r}")
