import io
import math

import numpy as np
import pytest

from gconv import algebras as alg
from gconv.algebras import CapabilityError, h_delta
from gconv.closed_forms import kendall_binomial_cdf
from gconv.measures import (
    GcfTable,
    Measure,
    bernoulli_draws,
    bernoulli_gcf,
    conv_power_draws,
    delta_steps,
    dilate,
    exp_draws,
    exp_gcf,
    gcf,
    gcf_of_draws,
)
from gconv.numerics import Grid, ks_distance, rng_stream


def test_measure_point_and_mass():
    m = Measure.point(2.0)
    m.validate()
    assert m.total_mass() == 1.0
    rng = rng_stream(0)
    assert np.all(m.sample(rng, 100) == 2.0)


def test_measure_mass_invariant_enforced():
    bad = Measure(atoms=((0.0, 0.5), (1.0, 0.4)))
    with pytest.raises(ValueError):
        bad.validate()


def test_measure_density_normalization_checked():
    m = Measure(atoms=((0.0, 0.5),), density=lambda x: 1.0, support=(0.0, 2.0),
                ac_weight=0.5)
    with pytest.raises(ValueError):
        m.validate()  # density integrates to 2 over its support
    ok = Measure(atoms=((0.0, 0.5),), density=lambda x: 0.5, support=(0.0, 2.0),
                 ac_weight=0.5)
    ok.validate()


def test_dilate_atoms_and_zero():
    m = Measure.point(1.0)
    assert dilate(m, 3.0).atoms == ((3.0, 1.0),)
    any_m = Measure(atoms=((0.5, 0.3), (2.0, 0.7)))
    z = dilate(any_m, 0.0)
    assert z.atoms == ((0.0, 1.0),)


def test_dilate_composition_matches_product():
    a = alg.kendall(1.0)
    m = Measure(atoms=((0.5, 0.25), (1.0, 0.5), (2.0, 0.25)))
    grid = Grid(np.linspace(0.0, 2.0, 9))
    t1 = gcf(a, dilate(dilate(m, 0.7), 2.0), grid)
    t2 = gcf(a, dilate(m, 1.4), grid)
    assert t1.values == pytest.approx(t2.values, abs=1e-14)


# ---------------------------------------------------------------------------
# generalized characteristic functions


def test_gcf_point_mass_is_h():
    grid = Grid(np.linspace(0.0, 3.0, 13))
    for a in (alg.kendall(1.0), alg.stable(2.0), alg.symmetric()):
        table = gcf(a, Measure.point(1.0), grid)
        assert table.values == pytest.approx(h_delta(a, grid.points))
        assert np.all(table.stderr == 0.0)
    table = gcf(alg.kendall(1.0), Measure.point(1.0), Grid([0.0, 0.5]))
    assert table.values[1] == pytest.approx(0.5)


def test_gcf_of_point_zero_is_one():
    grid = Grid(np.linspace(0.0, 5.0, 11))
    table = gcf(alg.stable(1.0), Measure.point(0.0), grid)
    assert table.values == pytest.approx(np.ones(11))


def test_gcf_rejects_non_regular():
    with pytest.raises(CapabilityError):
        gcf(alg.max_conv(), Measure.point(1.0), Grid([0.0, 1.0]))


def test_gcf_weibull_under_stable_closed_form():
    # X Weibull(alpha) under the alpha-norm algebra: Phi(t) = 1/(t^alpha + 1)
    a = alg.stable(1.3)
    alpha = 1.3
    rng = rng_stream(21)
    sampler = lambda rng_, size: rng_.random(size) ** 0  # placeholder
    m = Measure(sampler=lambda rng_, size: (-np.log(rng_.random(size))) ** (1 / alpha))
    grid = Grid(np.linspace(0.0, 3.0, 16))
    table = gcf(a, m, grid, budget=400_000, rng=rng)
    target = 1.0 / (grid.points ** alpha + 1.0)
    dev = np.abs(table.values - target) / np.maximum(table.stderr, 1e-12)
    assert dev[1:].max() <= 4.0


def test_gcf_quadrature_matches_mc_for_mixed_measure():
    a = alg.kendall(1.0)
    m = Measure(atoms=((0.0, 0.5),), density=lambda x: 1.0, support=(0.0, 1.0),
                ac_weight=0.5,
                sampler=lambda rng, size: np.where(rng.random(size) < 0.5, 0.0,
                                                   rng.random(size)))
    grid = Grid(np.linspace(0.0, 2.0, 9))
    exact = gcf(a, m, grid)
    rng = rng_stream(3)
    mc = gcf(a, Measure(sampler=m.sampler), grid, budget=300_000, rng=rng)
    dev = np.abs(exact.values - mc.values) / np.maximum(mc.stderr, 1e-12)
    assert dev[1:].max() <= 4.0
    assert np.all(exact.stderr == 0.0)


def test_gcf_table_csv_roundtrip():
    grid = Grid([0.0, 1.0, 2.0])
    table = GcfTable(alg.classical(), grid, np.array([1.0, 0.5, 0.25]),
                     np.zeros(3))
    buf = io.StringIO()
    table.to_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "t,value,stderr"
    assert len(lines) == 4
    table.check()


# ---------------------------------------------------------------------------
# convolution powers


def test_conv_power_zero_is_origin():
    rng = rng_stream(4)
    out = conv_power_draws(alg.kendall(1.0), delta_steps(1.0), 0, rng, 1000)
    assert np.all(out == 0.0)


def test_conv_power_classical_unit_steps():
    rng = rng_stream(5)
    out = conv_power_draws(alg.stable(1.0), delta_steps(1.0), 4, rng, 1000)
    assert np.all(out == 4.0)


def test_conv_power_kendall_two_fold_cdf():
    # the two-fold power of a unit mass under kendall(1) has CDF 1 - 1/t^2
    rng = rng_stream(6)
    draws = np.sort(conv_power_draws(alg.kendall(1.0), delta_steps(1.0), 2,
                                     rng, 100_000))
    d = ks_distance(draws, lambda t: kendall_binomial_cdf(2, 1.0, 1.0, t))
    assert d <= 0.01


# ---------------------------------------------------------------------------
# compound-Poisson sampling


def test_exp_draws_max_two_atoms():
    rng = rng_stream(7)
    out = exp_draws(alg.max_conv(), math.log(2.0), delta_steps(1.0), rng, 100_000)
    assert set(np.unique(out)) <= {0.0, 1.0}
    p0 = (out == 0.0).mean()
    se = math.sqrt(0.25 / out.size)
    assert abs(p0 - 0.5) <= 4 * se


def test_exp_draws_vanishing_intensity():
    rng = rng_stream(8)
    out = exp_draws(alg.stable(1.0), 1e-9, delta_steps(1.0), rng, 1_000_000)
    assert (out != 0.0).mean() <= 1e-8 * 10


def test_exp_draws_stable_atom_lattice():
    # support {0, 1, sqrt(2), sqrt(3), ...} with Poisson(1) masses
    rng = rng_stream(9)
    out = exp_draws(alg.stable(2.0), 1.0, delta_steps(1.0), rng, 100_000)
    ks = np.round(out ** 2).astype(int)
    assert np.abs(out - np.sqrt(ks)).max() < 1e-9
    from gconv.numerics import chi_square_gof

    kmax = 8
    pmf = np.array([math.exp(-1.0) / math.factorial(k) for k in range(kmax)])
    pmf = np.append(pmf, 1.0 - pmf.sum())
    counts = np.bincount(np.minimum(ks, kmax), minlength=kmax + 1)
    assert chi_square_gof(counts, pmf, out.size).p_value > 0.001


def test_exp_gcf_identities():
    grid = Grid([0.0, 1.0, 2.0])
    base = GcfTable(alg.stable(1.0), grid, np.array([1.0, 0.0, 0.5]),
                    np.array([0.0, 0.001, 0.002]))
    out = exp_gcf(1.0, base)
    assert out.values[0] == 1.0
    assert out.values[1] == pytest.approx(math.exp(-1.0))
    assert out.stderr[2] == pytest.approx(1.0 * 0.002 * out.values[2])


def test_exp_gcf_matches_mc_for_stable():
    # exp(-2 (1 - e^-1)) against the MC characteristic value at t = 1
    a = alg.stable(1.0)
    rng = rng_stream(10)
    draws = exp_draws(a, 2.0, delta_steps(1.0), rng, 1_000_000)
    grid = Grid([0.0, 1.0])
    mc = gcf_of_draws(a, draws, grid)
    target = math.exp(-2.0 * (1.0 - math.exp(-1.0)))
    assert abs(mc.values[1] - target) <= 4.0 * mc.stderr[1]


# ---------------------------------------------------------------------------
# generalized Bernoulli


def test_bernoulli_degenerate_cases():
    rng = rng_stream(11)
    assert np.all(bernoulli_draws(alg.kendall(1.0), 5, 0.0, rng, 1000) == 0.0)
    out = bernoulli_draws(alg.stable(0.5), 3, 1.0, rng, 1000)
    assert out == pytest.approx(np.full(1000, 3.0 ** 2))


def test_bernoulli_kendall_closed_form():
    rng = rng_stream(12)
    draws = np.sort(bernoulli_draws(alg.kendall(1.0), 2, 0.5, rng, 100_000))
    d = ks_distance(draws, lambda t: kendall_binomial_cdf(2, 0.5, 1.0, t))
    assert d <= 0.01


def test_bernoulli_gcf_closed_form():
    a = alg.kendall(1.0)
    grid = Grid([0.0, 0.5, 1.0])
    tab = bernoulli_gcf(a, 3, 0.25, grid)
    h = h_delta(a, grid.points)
    assert tab.values == pytest.approx((0.75 + 0.25 * h) ** 3)


# ---------------------------------------------------------------------------
# semigroup / multiplicativity invariants


def test_exp_semigroup_identity():
    # gcf(exp(a)) * gcf(exp(b)) == gcf(exp(a+b)) within 4 sigma
    grid = Grid(np.linspace(0.0, 3.0, 20))
    budget = 400_000
    for a in (alg.stable(1.0), alg.kendall(1.0), alg.symmetric(), alg.kingman3()):
        rng = rng_stream(13)
        ta = gcf_of_draws(a, exp_draws(a, 0.7, delta_steps(1.0), rng, budget), grid)
        tb = gcf_of_draws(a, exp_draws(a, 1.1, delta_steps(1.0), rng, budget), grid)
        tc = gcf_of_draws(a, exp_draws(a, 1.8, delta_steps(1.0), rng, budget), grid)
        prod = ta.values * tb.values
        se = np.sqrt((ta.stderr * tb.values) ** 2 + (tb.stderr * ta.values) ** 2
                     + tc.stderr ** 2)
        dev = np.abs(prod - tc.values) / np.maximum(se, 1e-12)
        assert dev.max() <= 4.0, a.tag


def test_conv_power_gcf_multiplicativity():
    grid = Grid(np.linspace(0.0, 2.5, 20))
    budget = 400_000
    for a in (alg.stable(1.0), alg.kendall(1.0), alg.symmetric()):
        base = gcf(a, Measure.point(1.0), grid)
        for n in (2, 5):
            rng = rng_stream(100 + n)
            emp = gcf_of_draws(a, conv_power_draws(a, delta_steps(1.0), n, rng,
                                                   budget), grid)
            dev = np.abs(emp.values - base.values ** n) / np.maximum(emp.stderr, 1e-12)
            assert dev.max() <= 4.5, (a.tag, n)


def test_bernoulli_converges_to_compound_poisson():
    # sup-grid distance decreasing over n in {10, 100, 1000}, <= 0.02 at 1000
    grid = Grid(np.linspace(0.0, 4.0, 25))
    for a in (alg.stable(1.0), alg.kendall(1.0), alg.symmetric()):
        base = gcf(a, Measure.point(1.0), grid)
        limit = exp_gcf(1.0, base)
        dists = []
        for n in (10, 100, 1000):
            tab = bernoulli_gcf(a, n, 1.0 / n, grid)
            dists.append(np.abs(tab.values - limit.values).max())
        assert dists[0] > dists[1] > dists[2], a.tag
        assert dists[2] <= 0.02, a.tag
