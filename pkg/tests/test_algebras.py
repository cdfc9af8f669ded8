import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from gconv import algebras as alg
from gconv.algebras import (
    CapabilityError,
    KernelLaw,
    canonicalize,
    h_delta,
    kernel_cdf,
    kernel_density,
    kernel_draws,
    kernel_sample,
    parse_algebra,
)
from gconv.numerics import ks_two_sample, rng_stream

SAMPLABLE = [
    alg.classical(),
    alg.symmetric(),
    alg.alpha1(0.7),
    alg.stable(1.0),
    alg.stable(2.0),
    alg.kendall(1.0),
    alg.kendall(0.5),
    alg.kingman3(),
    alg.max_conv(),
    alg.alphabeta(1.0, 3.0),
    alg.alphabeta(0.5, 2.0),
]


# ---------------------------------------------------------------------------
# registry and parsing


def test_capability_flags():
    assert alg.classical().monotonic and alg.stable(2).monotonic
    assert alg.kendall(1).monotonic and alg.max_conv().monotonic
    # the two-atom kernels put mass below max(x, y), so they are not monotonic
    assert not alg.symmetric().monotonic
    assert not alg.alpha1(1.0).monotonic
    assert not alg.kingman3().monotonic
    assert not alg.alphabeta(1, 3).monotonic
    # kucharczak's support starts above x + y
    assert alg.kucharczak(0.5).monotonic

    assert not alg.max_conv().regular
    for a in SAMPLABLE:
        if a.tag != "max":
            assert a.regular
    assert alg.nabla(0.5).regular and alg.volkovich(0.25).regular

    sampling = {a.tag for a in SAMPLABLE if a.can_sample_kernel}
    assert sampling == {"classical", "symmetric", "alpha1", "stable", "kendall",
                        "kingman3", "max", "alphabeta"}
    assert not alg.kucharczak(0.5).can_sample_kernel
    assert not alg.volkovich(0.25).can_sample_kernel
    assert not alg.nabla(0.5).can_sample_kernel

    cdf_tags = {a.tag for a in SAMPLABLE if a.can_eval_kernel_cdf}
    assert cdf_tags == {"classical", "symmetric", "alpha1", "stable", "kendall", "max"}
    assert alg.kucharczak(0.5).can_eval_kernel_density
    assert alg.volkovich(0.25).can_eval_kernel_density


def test_parameter_validation():
    with pytest.raises(ValueError):
        alg.kendall(-1.0)
    with pytest.raises(ValueError):
        alg.kucharczak(1.5)
    with pytest.raises(ValueError):
        alg.volkovich(0.75)
    with pytest.raises(ValueError):
        alg.alphabeta(1.0, 0.5)


def test_parse_algebra_grammar():
    a = parse_algebra("kendall:alpha=0.75")
    assert a.tag == "kendall" and a.alpha == 0.75
    assert parse_algebra("kingman3").tag == "kingman3"
    assert parse_algebra("alphabeta:alpha=1,beta=3").beta == 3.0
    assert parse_algebra("stable:alpha=2").label() == "stable:alpha=2"
    for bad in ("foo", "kendall", "kendall:gamma=1", "stable:alpha=2,beta=1"):
        with pytest.raises(ValueError):
            parse_algebra(bad)


def test_list_algebras():
    rows = alg.list_algebras()
    assert len(rows) == 11
    assert {r["tag"] for r in rows} == set(alg._CONSTRUCTORS)


# ---------------------------------------------------------------------------
# homomorphisms


def test_h_delta_examples():
    assert h_delta(alg.classical(), 1.0) == pytest.approx(math.exp(-1))
    assert h_delta(alg.stable(0.7), 0.0) == 1.0
    assert h_delta(alg.kendall(1.0), 0.5) == pytest.approx(0.5)
    assert h_delta(alg.kingman3(), math.pi) == pytest.approx(0.0, abs=1e-15)
    assert h_delta(alg.max_conv(), 0.5) == 1.0
    assert h_delta(alg.max_conv(), 1.0) == 1.0
    assert h_delta(alg.max_conv(), 1.5) == 0.0


def test_h_delta_is_one_at_zero():
    for a in SAMPLABLE + [alg.kucharczak(0.5), alg.volkovich(0.25), alg.nabla(0.5)]:
        assert h_delta(a, 0.0) == pytest.approx(1.0)


def test_h_delta_nabla_vanishes_above_one():
    a = alg.nabla(0.5)
    assert h_delta(a, 1.0) == pytest.approx(0.0, abs=1e-14)
    assert h_delta(a, 2.0) == 0.0
    # interior values stay in [0, 1]
    ts = np.linspace(1e-4, 1.0, 200)
    vals = h_delta(a, ts)
    assert np.all(vals >= -1e-12) and np.all(vals <= 1.0 + 1e-12)


def test_h_delta_vector_matches_scalar():
    ts = np.array([0.0, 0.3, 1.0, 2.5])
    for a in [alg.alphabeta(1.0, 3.0), alg.kingman3(), alg.kendall(0.5)]:
        vec = h_delta(a, ts)
        assert vec == pytest.approx([h_delta(a, t) for t in ts])


def test_kingman3_matches_alphabeta_beta3():
    # sin(t)/t is the beta=3 specialization of the Bessel form
    ts = np.linspace(0.01, 8.0, 50)
    assert h_delta(alg.kingman3(), ts) == pytest.approx(
        h_delta(alg.alphabeta(1.0, 3.0), ts), abs=1e-10)


# ---------------------------------------------------------------------------
# canonicalize


def test_canonicalize():
    assert canonicalize(2.0, 6.0) == (6.0, pytest.approx(1 / 3))
    assert canonicalize(0.0, 0.0) == (0.0, 0.0)
    assert canonicalize(5.0, 5.0) == (5.0, 1.0)


# ---------------------------------------------------------------------------
# kernel sampling


def test_kernel_sample_deterministic_cases():
    rng = rng_stream(0)
    assert kernel_sample(KernelLaw(alg.stable(1.0), 2.0, 3.0), rng) == 5.0
    assert kernel_sample(KernelLaw(alg.max_conv(), 2.0, 3.0), rng) == 3.0
    draws = kernel_draws(alg.stable(2.0), 3.0, 4.0, rng, size=100)
    assert draws == pytest.approx(np.full(100, 5.0))


def test_kernel_sample_identity_at_zero():
    # axiom (i): d_0 <> lam = lam
    rng = rng_stream(1)
    for a in SAMPLABLE:
        draws = kernel_draws(a, 0.0, 1.7, rng, size=10_000)
        assert np.mean(np.abs(draws - 1.7)) == 0.0


def test_kendall_kernel_cdf_oracle():
    # x = y = 1: all draws >= 1 and the CDF is 1 - 1/t^2 on (1, inf)
    rng = rng_stream(2)
    draws = np.sort(kernel_draws(alg.kendall(1.0), 1.0, 1.0, rng, size=100_000))
    assert draws.min() >= 1.0
    from gconv.numerics import ks_distance

    d = ks_distance(draws, lambda t: np.where(t >= 1.0, 1.0 - 1.0 / np.maximum(t, 1.0) ** 2, 0.0))
    assert d <= 0.01


def test_no_sampler_signal():
    rng = rng_stream(3)
    for a in (alg.kucharczak(0.5), alg.volkovich(0.25), alg.nabla(0.5)):
        with pytest.raises(CapabilityError):
            kernel_draws(a, 1.0, 1.0, rng, size=10)


def test_kernel_commutativity():
    rng = rng_stream(4)
    pairs = [(0.5, 1.0), (0.5, 2.0), (1.0, 2.0)]
    for a in SAMPLABLE:
        if not a.can_sample_kernel:
            continue
        for x, y in pairs:
            d1 = kernel_draws(a, x, y, rng, size=100_000)
            d2 = kernel_draws(a, y, x, rng, size=100_000)
            assert ks_two_sample(d1, d2) <= 0.01, (a.tag, x, y)


def test_kernel_scaling_axiom():
    rng = rng_stream(5)
    for a in SAMPLABLE:
        if not a.can_sample_kernel:
            continue
        for scale in (0.5, 3.0):
            for x, y in [(1.0, 1.0), (0.5, 2.0)]:
                d1 = kernel_draws(a, scale * x, scale * y, rng, size=100_000)
                d2 = scale * kernel_draws(a, x, y, rng, size=100_000)
                assert ks_two_sample(d1, d2) <= 0.01, (a.tag, scale, x, y)


def test_kernel_associativity_fold_order():
    rng = rng_stream(6)
    for a in SAMPLABLE:
        if not a.can_sample_kernel:
            continue
        inner = kernel_draws(a, 1.0, 1.0, rng, size=100_000)
        left = kernel_draws(a, inner, 1.0, rng)
        inner2 = kernel_draws(a, 1.0, 1.0, rng, size=100_000)
        right = kernel_draws(a, 1.0, inner2, rng)
        assert ks_two_sample(left, right) <= 0.01, a.tag


def test_homomorphism_multiplicativity():
    # mean of h(d_{tZ}) over kernel draws Z ~ d_x <> d_y equals
    # h(d_{tx}) h(d_{ty}) within 4 standard errors
    rng = rng_stream(7)
    budget = 1_000_000
    for a in SAMPLABLE:
        if not (a.regular and a.can_sample_kernel):
            continue
        for x, y in [(1.0, 1.0), (0.5, 2.0)]:
            z = kernel_draws(a, x, y, rng, size=budget)
            for t in (0.3, 1.0, 2.0):
                vals = h_delta(a, t * z)
                mean = vals.mean()
                se = vals.std(ddof=1) / math.sqrt(budget)
                target = h_delta(a, t * x) * h_delta(a, t * y)
                assert abs(mean - target) <= 4.0 * max(se, 1e-12), (a.tag, x, y, t)


def test_monotonicity_flags_match_kernels():
    rng = rng_stream(8)
    grid = [(0.5, 0.5), (0.5, 1.0), (1.0, 1.0), (1.0, 2.0), (2.0, 2.0)]
    for a in SAMPLABLE:
        if not a.can_sample_kernel:
            continue
        violation = False
        for x, y in grid:
            draws = kernel_draws(a, x, y, rng, size=10_000)
            if np.any(draws < max(x, y) - 1e-12):
                violation = True
        assert violation == (not a.monotonic), a.tag


def test_kingman3_reaches_below_max():
    rng = rng_stream(9)
    draws = kernel_draws(alg.kingman3(), 1.0, 1.0, rng, size=10_000)
    assert np.any(draws < 1.0)


# ---------------------------------------------------------------------------
# kernel CDF


def test_kernel_cdf_examples():
    assert kernel_cdf(alg.kendall(1.0), 1.0, 1.0, 2.0) == pytest.approx(0.75)
    assert kernel_cdf(alg.stable(2.0), 3.0, 4.0, 5.0) == 0.0
    assert kernel_cdf(alg.stable(2.0), 3.0, 4.0, 5.0 + 1e-9) == 1.0
    assert kernel_cdf(alg.symmetric(), 1.0, 1.0, 1.5) == 0.5
    assert kernel_cdf(alg.max_conv(), 2.0, 3.0, 3.5) == 1.0
    with pytest.raises(CapabilityError):
        kernel_cdf(alg.kingman3(), 1.0, 1.0, 1.0)


def test_kernel_cdf_monotone_0_to_1():
    ts = np.linspace(0.0, 20.0, 400)
    for a in (alg.kendall(0.5), alg.classical(), alg.alpha1(2.0), alg.symmetric()):
        vals = kernel_cdf(a, 0.7, 1.3, ts)
        assert np.all(np.diff(vals) >= -1e-12)
        assert vals[0] == 0.0
        # kendall(0.5) has a heavy Pareto tail, so push far out for the limit
        assert kernel_cdf(a, 0.7, 1.3, 1e12) == pytest.approx(1.0, abs=1e-5)


def test_kendall_kernel_cdf_matches_sampler():
    rng = rng_stream(10)
    a = alg.kendall(0.75)
    x, y = 0.8, 1.6
    draws = np.sort(kernel_draws(a, x, y, rng, size=100_000))
    from gconv.numerics import ks_distance

    # P(Z <= t) = P(Z < t) off the atom; add the atom via the left-limit trick
    def cdf(t):
        t = np.asarray(t, dtype=float)
        return kernel_cdf(a, x, y, np.nextafter(t, np.inf))

    assert ks_distance(draws, cdf) <= 0.01


# ---------------------------------------------------------------------------
# kernel densities


def test_kucharczak_density_support():
    a = alg.kucharczak(0.5)
    lo = (1.0 ** 0.5 + 1.0 ** 0.5) ** 2  # (x^a + y^a)^(1/a) = 4
    assert kernel_density(a, 1.0, 1.0, lo - 1e-6) == 0.0
    assert kernel_density(a, 1.0, 1.0, lo + 1e-6) > 0.0
    assert kernel_density(a, 1.0, 1.0, 10.0) > 0.0


def test_volkovich_density_support_and_normalization():
    a = alg.volkovich(0.25)
    assert kernel_density(a, 1.0, 1.0, 2.5) == 0.0
    assert kernel_density(a, 1.0, 2.0, 0.5) == 0.0
    mass, err = sp_integrate.quad(lambda u: kernel_density(a, 1.0, 1.0, u),
                                  0.0, 2.0, limit=400)
    assert mass == pytest.approx(1.0, abs=1e-6)
    # normalization holds for unequal arguments as well at beta = 1/4
    mass2, _ = sp_integrate.quad(lambda u: kernel_density(a, 1.0, 2.0, u),
                                 1.0, 3.0, limit=400)
    assert mass2 == pytest.approx(1.0, abs=1e-6)


def test_kernel_density_domain_errors():
    with pytest.raises(CapabilityError):
        kernel_density(alg.kendall(1.0), 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        kernel_density(alg.volkovich(0.25), 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        kernel_density(alg.volkovich(0.25), 1.0, 1.0, -1.0)
