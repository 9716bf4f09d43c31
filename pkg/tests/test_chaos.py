import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lagsbox.chaos import (
    DEFAULT_CONFIG,
    PRESETS,
    TABLE2_CONFIG,
    BitReader,
    GeneratorConfig,
    GeneratorState,
    LagSeries,
    LagSpec,
    LogisticParams,
    bifurcation_scan,
    bit_stream,
    delayed_map_step,
    fixed_points,
    invariant_interval,
    lag_series_step,
    logistic_step,
    lyapunov_exponent,
    mod1,
    mod1_array,
    next_bit,
    pack_bits,
    quantize,
    read_bits,
    read_trace_csv,
    trace,
    unpack_bits,
    write_bits,
    write_trace_csv,
)
from lagsbox.errors import ConfigError, DomainError, StateNotWarmError


# -- logistic map -----------------------------------------------------------

def test_logistic_step_examples():
    assert logistic_step(4.0, 0.5) == 1.0
    assert logistic_step(4.0, 0.0) == 0.0
    assert logistic_step(LogisticParams(-2.0, 0.1), 1.5) == 1.5


def test_logistic_step_domain():
    with pytest.raises(DomainError):
        logistic_step(4.0, 1.01)
    with pytest.raises(DomainError):
        logistic_step(-2.0, -0.6)
    with pytest.raises(DomainError):
        logistic_step(4.5, 0.2)


def test_params_validation():
    with pytest.raises(ConfigError):
        LogisticParams(4.0, 1.2)
    with pytest.raises(ConfigError):
        LogisticParams(-2.5, 0.3)
    assert LogisticParams(-2.0, 1.2).interval == (-0.5, 1.5)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([4.0, -2.0, 3.7, -1.8, 2.5]), st.floats(0, 1))
def test_orbit_stays_in_interval(alpha, x):
    lo, hi = invariant_interval(alpha)
    for _ in range(200):
        x = logistic_step(alpha, x)
        assert lo <= x <= hi


def test_orbits_stay_in_interval_long():
    # 100 random seeds per parameter, 10**6 steps, vectorised across seeds
    rng = np.random.default_rng(7)
    for alpha in (4.0, -2.0):
        lo, hi = invariant_interval(alpha)
        x = rng.uniform(0, 1, 100)
        xmin, xmax = x.copy(), x.copy()
        for _ in range(10**6 // 1000):
            for _ in range(1000):
                x = (alpha * x) * (1.0 - x)
            np.minimum(xmin, x, out=xmin)
            np.maximum(xmax, x, out=xmax)
        assert xmin.min() >= lo and xmax.max() <= hi


def test_fixed_points_examples():
    fp = fixed_points(4)
    assert [p.value for p in fp] == [0.0, 0.75]
    assert all(p.repulsive for p in fp)
    fp = fixed_points(2)
    assert [(p.value, p.stability) for p in fp] == [(0.0, "repulsive"), (0.5, "attracting")]
    fp = fixed_points(0)
    assert [(p.value, p.stability) for p in fp] == [(0.0, "attracting")]
    assert fixed_points(-2)[1].value == 1.5


@pytest.mark.parametrize(
    "alpha, expected",
    [
        (-1.5, ("repulsive", "repulsive")),
        (0.5, ("attracting", "repulsive")),
        (2.0, ("repulsive", "attracting")),
        (3.5, ("repulsive", "repulsive")),
        (1.0, ("neutral", "neutral")),
    ],
)
def test_fixed_point_regions(alpha, expected):
    assert tuple(p.stability for p in fixed_points(alpha)) == expected


def test_lyapunov_examples():
    assert lyapunov_exponent(LogisticParams(4, 0.8147), 10**6) == pytest.approx(math.log(2), abs=0.01)
    assert lyapunov_exponent(LogisticParams(-2, 0.8147), 10**6) == pytest.approx(math.log(2), abs=0.01)
    assert lyapunov_exponent(LogisticParams(2, 0.3), 10**5) < 0


@pytest.mark.parametrize("alpha", [2.5, 3.2])
def test_lyapunov_negative_in_periodic_region(alpha):
    assert lyapunov_exponent(LogisticParams(alpha, 0.3), 10**4) < 0


def test_lyapunov_critical_point_and_minimum():
    # 0.5 maps to the critical point on the first step for alpha=2
    assert lyapunov_exponent(LogisticParams(2, 0.5), 1000, burn_in=0) == -math.inf
    with pytest.raises(ValueError):
        lyapunov_exponent(LogisticParams(4, 0.3), 999)


def test_bifurcation_slices():
    scan = dict(bifurcation_scan(2.5, 2.5, 1, keep=100))
    assert np.all(np.abs(scan[2.5] - 0.6) < 1e-6)
    (_, pts), = bifurcation_scan(3.2, 3.2, 1, keep=100)
    assert len(np.unique(np.round(pts, 6))) == 2
    (_, pts), = bifurcation_scan(4.0, 4.0, 1, keep=100)
    assert len(np.unique(pts)) >= 50


def test_bifurcation_grid():
    scan = bifurcation_scan(2.4, 2.6, 5, keep=10)
    alphas = [a for a, _ in scan]
    assert alphas == pytest.approx([2.4, 2.45, 2.5, 2.55, 2.6])
    for a, pts in scan:
        assert pts.shape == (10,)
        assert np.allclose(pts, (a - 1) / a, atol=1e-6)


# -- folding and quantizing --------------------------------------------------

def test_mod1_examples():
    assert mod1(1.3) == pytest.approx(0.3)
    assert mod1(-0.1) == pytest.approx(0.9)
    assert mod1(0.0) == 0.0
    assert mod1(-1e-300) < 1.0


@settings(max_examples=500)
@given(st.floats(-3, 6, allow_nan=False))
def test_mod1_total(v):
    r = mod1(v)
    assert 0.0 <= r < 1.0
    # v - floor(v) is itself rounded, so the sum is exact only to one ulp of floor(v)
    assert abs((r + math.floor(v)) - v) <= math.ulp(max(1.0, abs(math.floor(v))))


@settings(max_examples=100)
@given(st.lists(st.floats(-3, 6, allow_nan=False), min_size=1, max_size=50))
def test_mod1_array_matches_scalar(values):
    assert mod1_array(np.array(values)).tolist() == [mod1(v) for v in values]


def test_quantize_boundaries():
    assert quantize(0.25) == 0
    assert quantize(0.75) == 1
    assert quantize(0.5) == 0
    assert quantize(0.0) == 0
    assert quantize(math.nextafter(0.5, 1)) == 1


# -- lag series ----------------------------------------------------------------

def test_lag_series_examples():
    p = LogisticParams(4.0, 0.3)
    assert lag_series_step(LagSeries(p, ())) == pytest.approx(0.3)
    s = LagSeries.with_history(p, (5,), [0.7, 0, 0, 0, 0, 0.6])
    assert lag_series_step(s) == pytest.approx(0.3)
    q = LogisticParams(-2.0, 0.1)
    hist = [-0.4] + [0.0] * 4 + [0.2] + [0.0] * 4 + [0.1]
    assert lag_series_step(LagSeries.with_history(q, (10, 5), hist)) == pytest.approx(0.9)


def test_lag_series_advances_orbit():
    s = LagSeries.with_history(LogisticParams(4.0, 0.3), (2,), [0.1, 0.2, 0.3])
    s.step()
    assert list(s.buffer) == [0.2, 0.3, (4.0 * 0.3) * (1 - 0.3)]
    assert len(s.buffer) == 3


def test_lag_series_not_warm():
    s = LagSeries(LogisticParams(4.0, 0.3), (5, 10))
    with pytest.raises(StateNotWarmError):
        s.step()
    s.advance(9)
    with pytest.raises(StateNotWarmError):
        s.value()
    s.advance()
    assert 0 <= s.value() < 1


def test_lagspec():
    spec = LagSpec((10, 5))
    assert spec.lags == (5, 10) and spec.max == 10 and spec.summation_order == (10, 5)
    assert LagSpec(()).max == 0
    assert LagSpec.coerce("5,10") == spec
    with pytest.raises(ConfigError):
        LagSpec((0,))
    with pytest.raises(ConfigError):
        LagSpec((5, 5))


def test_step_many_matches_step():
    params = LogisticParams(-2.0, 0.8147)
    a = LagSeries(params, (5, 10))
    b = LagSeries(params, (5, 10))
    a.advance(10)
    b.advance(10)
    single = [a.step() for _ in range(500)]
    _, bulk = b.step_many(500)
    assert bulk.tolist() == single
    assert list(a.buffer) == list(b.buffer)


# -- generator -----------------------------------------------------------------

def test_delayed_map_examples():
    assert mod1(0.25 + 0.5) == 0.75
    assert mod1(0.9 + 0.9) == pytest.approx(0.8)


def test_buffers_after_init():
    state = GeneratorState(DEFAULT_CONFIG)
    assert len(state.buffer1) == 11 and len(state.buffer2) == 11
    assert state.iteration_count == 10
    for buf, params in ((state.buffer1, DEFAULT_CONFIG.params1), (state.buffer2, DEFAULT_CONFIG.params2)):
        lo, hi = params.interval
        assert all(lo <= v <= hi for v in buf)


def test_first_emission_uses_seed_as_oldest_lag():
    cfg = TABLE2_CONFIG
    state = GeneratorState(cfg)
    orbit1 = [cfg.params1.x0]
    for _ in range(10):
        orbit1.append((cfg.params1.alpha * orbit1[-1]) * (1 - orbit1[-1]))
    orbit2 = [cfg.params2.x0]
    for _ in range(10):
        orbit2.append((cfg.params2.alpha * orbit2[-1]) * (1 - orbit2[-1]))
    m1 = mod1(orbit1[0] + orbit1[5] + orbit1[10])
    m2 = mod1(orbit2[0] + orbit2[4] + orbit2[10])
    assert state.step() == (m1, m2, mod1(m1 + m2))


def test_stepwise_and_bulk_bits_identical():
    a = GeneratorState(DEFAULT_CONFIG)
    bits = [next_bit(a) for _ in range(2000)]
    assert bit_stream(DEFAULT_CONFIG, 2000).tolist() == bits
    b = GeneratorState(DEFAULT_CONFIG)
    zs = [delayed_map_step(b) for _ in range(100)]
    assert GeneratorState(DEFAULT_CONFIG).z_values(100).tolist() == zs


def test_bit_stream_basics():
    assert bit_stream(DEFAULT_CONFIG, 0).size == 0
    assert np.array_equal(bit_stream(DEFAULT_CONFIG, 5000), bit_stream(DEFAULT_CONFIG, 5000))
    assert not np.array_equal(bit_stream(DEFAULT_CONFIG, 5000), bit_stream(TABLE2_CONFIG, 5000))
    with pytest.raises(ValueError):
        bit_stream(DEFAULT_CONFIG, -1)


def test_burn_in_shifts_stream():
    shifted = DEFAULT_CONFIG.with_overrides(burn_in=7)
    assert np.array_equal(bit_stream(shifted, 300), bit_stream(DEFAULT_CONFIG, 307)[7:])


@pytest.mark.parametrize("config", [DEFAULT_CONFIG, TABLE2_CONFIG], ids=["default", "table2"])
def test_stream_statistics(config):
    cols = trace(config, 10**5)
    z = cols["z"]
    assert np.all((z >= 0) & (z < 1))
    assert np.all((cols["m1"] >= 0) & (cols["m1"] < 1))
    counts, _ = np.histogram(z, bins=16, range=(0, 1))
    chi2 = ((counts - z.size / 16) ** 2 / (z.size / 16)).sum()
    assert chi2 < stats.chi2.ppf(0.95, 15)
    assert abs((z > 0.5).mean() - 0.5) < 0.01
    assert abs(np.corrcoef(z[:-1], z[1:])[0, 1]) < 0.02


def test_raw_orbit_is_parabola():
    x = trace(DEFAULT_CONFIG, 10**4)["x"]
    alpha = DEFAULT_CONFIG.params1.alpha
    assert np.array_equal(x[1:], (alpha * x[:-1]) * (1 - x[:-1]))


def test_config_invariants():
    with pytest.raises(ConfigError):
        GeneratorConfig.from_values(4.0, 0.5, -2.0, 0.5, (5,), (6,))
    with pytest.raises(ConfigError):
        GeneratorConfig.from_values(4.0, 0.5, 4.0, 0.6, (5,), (6,))
    with pytest.raises(ConfigError):
        DEFAULT_CONFIG.with_overrides(burn_in=-1)


def test_config_text_roundtrip(tmp_path):
    for cfg in PRESETS.values():
        assert GeneratorConfig.from_text(cfg.to_text()) == cfg
    path = tmp_path / "c.txt"
    TABLE2_CONFIG.save(path)
    assert GeneratorConfig.load(path) == TABLE2_CONFIG
    partial = GeneratorConfig.from_text("burn_in = 3\n# comment\n", base=TABLE2_CONFIG)
    assert partial == TABLE2_CONFIG.with_overrides(burn_in=3)


def test_config_text_errors():
    with pytest.raises(ConfigError):
        GeneratorConfig.from_text("alpha1 = 4\nbogus = 1\n", base=DEFAULT_CONFIG)
    with pytest.raises(ConfigError):
        GeneratorConfig.from_text("alpha1 4\n", base=DEFAULT_CONFIG)


def test_preset_values():
    assert DEFAULT_CONFIG.as_flat()["alpha1"] == -2.0
    t = TABLE2_CONFIG.as_flat()
    assert (t["alpha1"], t["alpha2"], t["x01"], t["x02"]) == (4.0, -2.0, 0.8147, 0.9058)
    assert TABLE2_CONFIG.lags1.lags == (5, 10) and TABLE2_CONFIG.lags2.lags == (6, 10)


# -- readers and export --------------------------------------------------------

def test_bit_reader_peek_skip():
    r = BitReader.from_config(DEFAULT_CONFIG, chunk=64)
    ref = bit_stream(DEFAULT_CONFIG, 1000)
    assert np.array_equal(r.peek(100), ref[:100])
    r.skip(30)
    assert r.position == 30
    assert np.array_equal(r.read(500), ref[30:530])
    finite = BitReader([1, 0, 1])
    assert finite.read(10).tolist() == [1, 0, 1]


def test_trace_csv_roundtrip():
    cols = trace(DEFAULT_CONFIG, 50)
    buf = io.StringIO()
    write_trace_csv(buf, cols)
    assert buf.getvalue().splitlines()[0] == "i,x_i,m_i1,m_i2,z_i"
    back = read_trace_csv(io.StringIO(buf.getvalue()))
    for key in cols:
        assert np.array_equal(back[key], cols[key])
    assert cols["i"][0] == 10


def test_trace_empty():
    buf = io.StringIO()
    write_trace_csv(buf, trace(DEFAULT_CONFIG, 0))
    assert buf.getvalue() == "i,x_i,m_i1,m_i2,z_i\n"


@settings(max_examples=100)
@given(st.lists(st.integers(0, 1), max_size=100))
def test_pack_unpack(bits):
    bits = np.array(bits, dtype=np.uint8)
    assert np.array_equal(unpack_bits(pack_bits(bits), bits.size), bits)


def test_pack_msb_first():
    assert pack_bits(np.array([1, 0, 0, 0, 0, 0, 0, 1, 1], dtype=np.uint8)) == b"\x81\x80"


@pytest.mark.parametrize("fmt", ["packed", "ascii"])
def test_bits_file_roundtrip(tmp_path, fmt):
    bits = bit_stream(DEFAULT_CONFIG, 77)
    path = tmp_path / "bits"
    write_bits(path, bits, fmt)
    assert np.array_equal(read_bits(path, fmt, 77), bits)
