"""Closed-form oracle library.

Every explicit distribution, pmf, density, and operator used by the
verification suites is evaluated here exactly, so the Monte Carlo modules
always have an independent target.  Naming convention: `stable_*` refers to
the deterministic alpha-norm algebra, `kendall_*` to the Pareto-or-stick
algebra, `kingman_*` to the radial algebra with uniform mixing.

Kendall count formulas are written in terms of (p, q, r), the values of the
step law's inverse-argument characteristic transform at the three times,
with regime dispatch on whether each time is below or above the breakpoint
at 1.  Negative round-off down to -1e-12 is clamped to zero; anything
below that fails loudly since it signals a transcription error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebras import Algebra
from .measures import Measure
from .numerics import bessel_i, integrate

__all__ = [
    "PiecewiseScalar",
    "KendallParams",
    "compound_poisson_measure",
    "kendall_binomial_measure",
    "kendall_binomial_cdf",
    "kingman_uniform_sum_density",
    "kingman_unit_power_density",
    "kingman_unit_power_cdf",
    "kingman_exp_factorization_check",
    "kendall_transition_cdf",
    "generator_closed_form",
    "stable_walk_density",
    "stable_count_joint_pmf",
    "stable_count_increment_pmf",
    "stable_count_marginal_pmf",
    "stable_count_generator",
    "stable_conditional_rate",
    "kendall_step_cdf",
    "kendall_step_transform",
    "kendall_walk_cdf",
    "kendall_walk_alpha_moment",
    "kendall_count_pmf",
    "kendall_walk_joint_cdf",
    "kendall_count_joint_pmf",
    "kendall_count_increment_pmf",
    "kendall_markov_conditionals",
    "poly_geometric_sum",
    "poly_geometric_weighted_sum",
    "kendall_rate_constant",
    "kendall_generator",
    "kendall_conditional_rate",
    "kendall_rate_one_sided_limits",
]


@dataclass(frozen=True)
class PiecewiseScalar:
    """A scalar function continuous on each piece between breakpoints."""

    evaluator: object
    breakpoints: tuple
    description: str = ""

    def __call__(self, x):
        return self.evaluator(x)


@dataclass(frozen=True)
class KendallParams:
    """The (p, q, r) transform values at times t >= s >= u."""

    alpha: float
    p: float
    q: float
    r: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.r <= self.q <= self.p < 1.0:
            raise ValueError("expected 0 <= r <= q <= p < 1")


def _clamp(v, tol=1e-12):
    if v < -tol:
        raise ValueError(f"negative probability {v}; transcription error")
    return max(v, 0.0)


# ---------------------------------------------------------------------------
# compound-Poisson closed forms


def compound_poisson_measure(algebra: Algebra, a: float) -> Measure:
    """The compound-Poisson measure of intensity a on the unit mass, in
    closed form, for the algebras where it is printed explicitly."""
    if a <= 0:
        raise ValueError("a must be positive")
    tag = algebra.tag
    if tag == "max":
        return Measure(atoms=((0.0, math.exp(-a)), (1.0, 1.0 - math.exp(-a))))
    if tag in ("symmetric", "alpha1"):
        inv_alpha = 1.0 / algebra.alpha if tag == "alpha1" else 1.0
        atoms = [(0.0, math.exp(-a) * bessel_i(0, a))]
        acc = atoms[0][1]
        k = 0
        while 1.0 - acc > 1e-12 and k < 500:
            k += 1
            mass = 2.0 * math.exp(-a) * bessel_i(k, a)
            if mass <= 0.0:
                break
            atoms.append((float(k) ** inv_alpha, mass))
            acc += mass
        return Measure(atoms=tuple(atoms))
    if tag == "stable":
        inv_alpha = 1.0 / algebra.alpha
        atoms = []
        acc = 0.0
        k = 0
        logmass = -a
        while 1.0 - acc > 1e-12 and k < 500:
            mass = math.exp(logmass)
            if mass > 0.0:
                atoms.append((float(k) ** inv_alpha if k else 0.0, mass))
                acc += mass
            k += 1
            logmass += math.log(a) - math.log(k)
        return Measure(atoms=tuple(atoms))
    if tag == "kendall":
        return _kendall_compound_poisson(algebra.alpha, a)
    raise ValueError(f"no closed compound-Poisson form for algebra {tag}")


def _kendall_compound_poisson(alpha: float, a: float) -> Measure:
    atom0 = math.exp(-a)
    atom1 = a * math.exp(-a)
    weight = 1.0 - atom0 - atom1

    def raw_density(u):
        return a * a * alpha * u ** (-2.0 * alpha - 1.0) * math.exp(-a * u ** (-alpha))

    density = lambda u: raw_density(u) / weight

    # CDF of the continuous part in w = u^(-alpha) coordinates:
    # g(w) = (a w + 1) exp(-a w), decreasing from 1 to g(1)
    g1 = (a + 1.0) * math.exp(-a)

    def sampler(rng, size):
        u = rng.random(size)
        out = np.zeros(size)
        out[(u >= atom0) & (u < atom0 + atom1)] = 1.0
        cont = u >= atom0 + atom1
        m = int(cont.sum())
        if m:
            targets = g1 + rng.random(m) * (1.0 - g1)
            lo = np.zeros(m)
            hi = np.ones(m)
            for _ in range(64):
                mid = 0.5 * (lo + hi)
                too_small = (a * mid + 1.0) * np.exp(-a * mid) > targets
                lo = np.where(too_small, mid, lo)
                hi = np.where(too_small, hi, mid)
            w = 0.5 * (lo + hi)
            out[cont] = w ** (-1.0 / alpha)
        return out

    return Measure(atoms=((0.0, atom0), (1.0, atom1)), density=density,
                   support=(1.0, np.inf), ac_weight=weight, sampler=sampler)


def kendall_binomial_measure(n: int, p: float, alpha: float) -> Measure:
    """The n-fold power of (p d_1 + (1-p) d_0) under the Kendall kernel:
    two atoms plus a Pareto-type density above 1."""
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ValueError("need n >= 0, p in [0, 1]")
    if n == 0 or p == 0.0:
        return Measure.point(0.0)
    if n == 1:
        if p == 1.0:
            return Measure.point(1.0)
        return Measure(atoms=((0.0, 1.0 - p), (1.0, p)))
    atoms = []
    if p < 1.0:
        atoms.append((0.0, (1.0 - p) ** n))
        atoms.append((1.0, n * p * (1.0 - p) ** (n - 1)))
    weight = 1.0 - sum(m for _, m in atoms)

    def raw_density(t):
        return (alpha * p * p * n * (n - 1) * t ** (-2.0 * alpha - 1.0)
                * (1.0 - p * t ** (-alpha)) ** (n - 2))

    def cdf(t):
        return kendall_binomial_cdf(n, p, alpha, t)

    def sampler(rng, size):
        u = rng.random(size)
        out = np.zeros(size)
        a0 = atoms[0][1] if atoms else 0.0
        a1 = atoms[1][1] if atoms else 0.0
        out[(u >= a0) & (u < a0 + a1)] = 1.0
        cont = u >= a0 + a1
        m = int(cont.sum())
        if m:
            targets = a0 + a1 + rng.random(m) * weight
            lo = np.ones(m)
            hi = np.full(m, 2.0)
            for _ in range(80):
                grow = np.asarray(cdf(hi)) < targets
                if not grow.any():
                    break
                hi = np.where(grow, hi * 2.0, hi)
            for _ in range(64):
                mid = 0.5 * (lo + hi)
                small = np.asarray(cdf(mid)) < targets
                lo = np.where(small, mid, lo)
                hi = np.where(small, hi, mid)
            out[cont] = 0.5 * (lo + hi)
        return out

    return Measure(atoms=tuple(atoms), density=lambda t: raw_density(t) / weight,
                   support=(1.0, np.inf), ac_weight=weight, sampler=sampler)


def kendall_binomial_cdf(n: int, p: float, alpha: float, t):
    """CDF of the Kendall n-fold power of (p d_1 + (1-p) d_0)."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.where(ts >= 0.0, (1.0 - p) ** n, 0.0)
    above = ts >= 1.0
    ta = np.where(above, ts, 2.0) ** (-alpha)
    vals = (1.0 - p * ta) ** (n - 1) * (1.0 + (n - 1) * p * ta)
    out = np.where(above, vals, out)
    if np.ndim(t) == 0:
        return float(out[0])
    return out.reshape(np.shape(t))


# ---------------------------------------------------------------------------
# radial (Kingman-type) closed forms


def kingman_uniform_sum_density(n: int, x: float) -> float:
    """Density of the classical n-fold sum of uniform [-1, 1] variables."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if x < -n or x >= n:
        return 0.0
    k = int(math.floor((x + n) / 2.0))
    k = min(k, n - 1)
    total = 0.0
    for i in range(k + 1):
        total += (-1.0) ** i * math.comb(n, i) * (x + n - 2 * i) ** (n - 1)
    return total / (math.factorial(n - 1) * 2.0 ** n)


def _kingman_uniform_sum_cdf(n: int, x: float) -> float:
    if x <= -n:
        return 0.0
    if x >= n:
        return 1.0
    k = int(math.floor((x + n) / 2.0))
    k = min(k, n - 1)
    total = 0.0
    for i in range(k + 1):
        total += (-1.0) ** i * math.comb(n, i) * (x + n - 2 * i) ** n
    return total / (math.factorial(n) * 2.0 ** n)


def kingman_unit_power_density(n: int, u: float) -> float:
    """Density of the n-fold radial power of the unit mass: the radial part
    of the classical uniform sum, -2u d/du f_n(u) on (0, n)."""
    if n < 2:
        raise ValueError("the one-fold power is a unit mass; need n >= 2")
    if u <= 0.0 or u >= n:
        return 0.0
    k = int(math.floor((u + n) / 2.0))
    k = min(k, n - 1)
    deriv = 0.0
    for i in range(k + 1):
        deriv += ((-1.0) ** i * math.comb(n, i) * (n - 1)
                  * (u + n - 2 * i) ** (n - 2))
    deriv /= math.factorial(n - 1) * 2.0 ** n
    return _clamp(-2.0 * u * deriv)


def kingman_unit_power_cdf(n: int, u):
    """CDF matching kingman_unit_power_density (vectorized in u)."""

    def one(v):
        if v <= 0.0:
            return 0.0
        if v >= n:
            return 1.0
        f = kingman_uniform_sum_density(n, v)
        return _clamp(-2.0 * v * f + 2.0 * (_kingman_uniform_sum_cdf(n, v) - 0.5))

    if np.ndim(u) == 0:
        return one(float(u))
    return np.array([one(float(v)) for v in np.asarray(u).ravel()]).reshape(np.shape(u))


def kingman_unit_power(n: int) -> PiecewiseScalar:
    """Piecewise form of the n-fold radial power density."""
    return PiecewiseScalar(
        evaluator=lambda u: kingman_unit_power_density(n, u),
        breakpoints=tuple(float(b) for b in range(0, n + 1)),
        description=f"density of the {n}-fold radial power of a unit mass")


def kingman_exp_factorization_check(a: float, xi_grid, draws) -> dict:
    """Compare the classical characteristic function of compound-Poisson
    draws under the radial algebra against the signed-measure
    factorization  exp(a (phi - 1)) (1 - a phi + a e^(i xi)),
    phi(xi) = sin(xi)/xi.  Returns per-point deviations and the max.
    """
    xs = np.asarray(xi_grid, dtype=float)
    draws = np.asarray(draws, dtype=float)
    n = draws.size
    rows = []
    worst = 0.0
    for xi in xs:
        emp = np.exp(1j * xi * draws).mean()
        phi = 1.0 if xi == 0.0 else math.sin(xi) / xi
        target = (np.exp(a * (phi - 1.0))
                  * (1.0 - a * phi + a * np.exp(1j * xi)))
        dev = abs(emp - target)
        worst = max(worst, dev)
        rows.append({"xi": float(xi), "empirical_re": float(emp.real),
                     "empirical_im": float(emp.imag),
                     "target_re": float(target.real),
                     "target_im": float(target.imag),
                     "deviation": float(dev), "n": n})
    return {"max_deviation": worst, "rows": rows}


# ---------------------------------------------------------------------------
# Kendall Markov-process transition law


def kendall_transition_cdf(x: float, z: float, alpha: float, u):
    """CDF of one Kendall Markov-process transition from state x with
    accumulated intensity z (= intensity times elapsed time); two branches
    depending on whether x is above or below 1.  Vectorized in u.
    """
    if z <= 0:
        raise ValueError("z must be positive")
    us = np.asarray(u, dtype=float)
    ua = np.where(us > 0, us, 1.0) ** alpha
    body = (1.0 + z / ua - z * x ** alpha / ua ** 2) * np.exp(-z / ua)
    if x >= 1.0:
        out = np.where(us > x, body, 0.0)
    else:
        out = np.where(us > 1.0, body,
                       np.where(us > x, math.exp(-z), 0.0))
    out = np.maximum(out, 0.0)
    if np.ndim(u) == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Markov-process infinitesimal generators (closed forms)


def generator_closed_form(algebra: Algebra, f, x: float, c: float) -> float:
    """A f(x) = c * int (f(r) - f(x)) d_x <> d_1 (dr) in closed form.

    The two-atom kernels carry their 1/2-1/2 weights here (the kernel's own
    weights), and the Kendall branch below 1 includes the f(1) factor on
    the atom, both coming straight from the kernel mixture.
    """
    if c <= 0:
        raise ValueError("intensity must be positive")
    tag = algebra.tag
    if tag == "classical":
        return c * (f(x + 1.0) - f(x))
    if tag == "symmetric":
        return c * (0.5 * f(1.0 + x) + 0.5 * f(abs(1.0 - x)) - f(x))
    if tag == "alpha1":
        a = algebra.alpha
        xa = x ** a
        return c * (0.5 * f((xa + 1.0) ** (1 / a))
                    + 0.5 * f(abs(xa - 1.0) ** (1 / a)) - f(x))
    if tag == "stable":
        a = algebra.alpha
        return c * (f((x ** a + 1.0) ** (1.0 / a)) - f(x))
    if tag == "max":
        return c * (f(1.0) - f(x)) if x <= 1.0 else 0.0
    if tag == "kendall":
        a = algebra.alpha
        two_a = 2.0 * a
        if x >= 1.0:
            # int_x^inf f(r) r^(-2a-1) dr via w = r^(-2a)
            tail = integrate(lambda w: f(w ** (-1.0 / two_a)) if w > 0 else 0.0,
                             0.0, x ** (-two_a), abs_tol=1e-12, rel_tol=1e-9)
            return -c * x ** (-a) * f(x) + c * x ** a * tail
        tail = integrate(lambda w: f(w ** (-1.0 / two_a)) if w > 0 else 0.0,
                         0.0, 1.0, abs_tol=1e-12, rel_tol=1e-9)
        return c * (x ** a * tail + (1.0 - x ** a) * f(1.0) - f(x))
    raise ValueError(f"no closed generator form for algebra {tag}")


# ---------------------------------------------------------------------------
# stable (alpha-norm) renewal counting process


def stable_walk_density(n: int, alpha: float, s: float) -> float:
    """Density of the n-step walk with memoryless steps under the
    alpha-norm kernel: alpha / Gamma(n) s^(alpha n - 1) exp(-s^alpha)."""
    if n < 1 or alpha <= 0:
        raise ValueError("need n >= 1, alpha > 0")
    if s <= 0:
        return 0.0
    return (alpha / math.gamma(n) * s ** (alpha * n - 1.0)
            * math.exp(-(s ** alpha)))


def stable_count_joint_pmf(n: int, k: int, s: float, t: float,
                           alpha: float) -> float:
    """P(count gains n on (s, t] and equals k at s)."""
    if not 0.0 < s < t:
        raise ValueError("need 0 < s < t")
    if n < 0 or k < 0:
        return 0.0
    sa, ta = s ** alpha, t ** alpha
    return math.exp(n * math.log(ta - sa) - math.lgamma(n + 1)
                    + k * math.log(sa) - math.lgamma(k + 1) - ta)


def stable_count_increment_pmf(n: int, s: float, t: float, alpha: float) -> float:
    lam = t ** alpha - s ** alpha
    return math.exp(n * math.log(lam) - math.lgamma(n + 1) - lam)


def stable_count_marginal_pmf(k: int, s: float, alpha: float) -> float:
    sa = s ** alpha
    return math.exp(k * math.log(sa) - math.lgamma(k + 1) - sa)


def stable_count_generator(w_coeffs, k: int, s: float, alpha: float) -> float:
    """Generating operator on polynomials:
    alpha s^(alpha-1) (W(k+1) - W(k)), W given by ascending coefficients."""
    if s <= 0:
        raise ValueError("s must be positive")
    w = np.asarray(w_coeffs, dtype=float)
    val_up = float(np.polyval(w[::-1], k + 1))
    val_at = float(np.polyval(w[::-1], k))
    return alpha * s ** (alpha - 1.0) * (val_up - val_at)


def stable_conditional_rate(j: int, k: int, s: float, alpha: float) -> float:
    """Limit of (E(count(t)^j | count(s)=k) - k^j)/(t-s) as t -> s."""
    return alpha * s ** (alpha - 1.0) * ((k + 1) ** j - k ** j)


# ---------------------------------------------------------------------------
# Kendall renewal counting process


def kendall_step_cdf(t: float, alpha: float) -> float:
    """CDF of the memoryless (proper) Kendall step law: t^alpha on [0, 1]."""
    if t < 0:
        return 0.0
    return min(t ** alpha, 1.0)


def kendall_step_transform(t: float, alpha: float) -> float:
    """Characteristic transform of the proper step law at argument 1/t:
    t^alpha/2 below the breakpoint, 1 - 1/(2 t^alpha) above."""
    if t <= 0:
        raise ValueError("t must be positive")
    ta = t ** alpha
    if t <= 1.0:
        return 0.5 * ta
    return 1.0 - 0.5 / ta


def kendall_walk_cdf(n: int, t: float, alpha: float, form: str = "lemma") -> float:
    """CDF of the n-step proper Kendall walk at t.

    form='lemma' evaluates G^(n-1) [n (F - G) + G]; form='proper' evaluates
    the substituted piecewise display.  The two agree to 1e-12.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if t <= 0:
        return 0.0
    if n == 0:
        return 1.0
    if form == "proper":
        p = kendall_step_transform(t, alpha)
        if t <= 1.0:
            return (n + 1) * p ** n
        return (1.0 + (n - 1) * (1.0 - p)) * p ** (n - 1)
    F = kendall_step_cdf(t, alpha)
    G = kendall_step_transform(t, alpha)
    return G ** (n - 1) * (n * (F - G) + G)


def kendall_walk_alpha_moment(n: int, t: float, alpha: float,
                              form: str = "lemma") -> float:
    """Truncated moment int_0^t x^alpha dF_n(x) for the proper walk."""
    if n < 1 or t <= 0:
        raise ValueError("need n >= 1, t > 0")
    p = kendall_step_transform(t, alpha)
    if form == "proper":
        if t <= 1.0:
            return 2.0 * n * p ** (n + 1)
        return 0.5 * n * p ** (n - 1)
    F = kendall_step_cdf(t, alpha)
    return n * t ** alpha * p ** (n - 1) * (F - p)


def kendall_count_pmf(n: int, t: float, alpha: float,
                      form: str = "lemma") -> float:
    """P(count at time t equals n) for the proper Kendall renewal count."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if t <= 0:
        return 1.0 if n == 0 else 0.0
    if n == 0:
        return 1.0 - kendall_step_cdf(t, alpha)
    if form == "proper":
        p = kendall_step_transform(t, alpha)
        if t <= 1.0:
            return _clamp((n + 1 - (n + 2) * p) * p ** n)
        return _clamp(n * (1.0 - p) ** 2 * p ** (n - 1))
    F = kendall_step_cdf(t, alpha)
    G = kendall_step_transform(t, alpha)
    return _clamp(G ** (n - 1) * (n * (F - G) * (1.0 - G) + G * (1.0 - F)))


def kendall_walk_joint_cdf(n: int, k: int, s: float, t: float,
                           alpha: float) -> float:
    """P(S_{n+k} < t, S_k < s) for the proper walk, 0 < s < t; n is the
    index gap."""
    if not 0.0 < s < t:
        raise ValueError("need 0 < s < t")
    if n < 0 or k < 0:
        raise ValueError("need n, k >= 0")
    Fn_t = kendall_walk_cdf(n, t, alpha)
    Fk_s = kendall_walk_cdf(k, s, alpha)
    Gt = kendall_step_transform(t, alpha)
    Gs = kendall_step_transform(s, alpha)
    ratio = (s / t) ** alpha
    return (Fn_t * Fk_s
            - ratio * (Fn_t - Gt ** n) * (Fk_s - Gs ** k))


def kendall_count_joint_pmf(n: int, k: int, s: float, t: float, alpha: float,
                            form: str = "printed") -> float:
    """P(count gains n on (s, t] and equals k at s) for the proper count.

    form='printed' evaluates the per-regime displays; form='fourterm'
    combines four joint walk CDFs, which is regime-free and serves as the
    independent cross-check.
    """
    if not 0.0 < s < t:
        raise ValueError("need 0 < s < t")
    if n < 0 or k < 0:
        return 0.0
    if form == "fourterm":
        Fk_s = kendall_walk_cdf(k, s, alpha)
        if n == 0:
            return _clamp(Fk_s - kendall_walk_joint_cdf(1, k, s, t, alpha))
        return _clamp(kendall_walk_joint_cdf(n, k, s, t, alpha)
                      - kendall_walk_joint_cdf(n - 1, k + 1, s, t, alpha)
                      - kendall_walk_joint_cdf(n + 1, k, s, t, alpha)
                      + kendall_walk_joint_cdf(n, k + 1, s, t, alpha))
    p = kendall_step_transform(t, alpha)
    q = kendall_step_transform(s, alpha)
    if t <= 1.0:
        if n >= 1:
            return _clamp(p ** (n - 2) * (p - q)
                          * (n * (p - q) * (1 - p) + p + q - 2 * p * p)
                          * (k + 1) * q ** k)
        return _clamp(q ** k * ((k + 1) * (1 - 2 * p + q) - q))
    if s >= 1.0:
        if k == 0:
            return 0.0
        if n >= 1:
            return _clamp(p ** (n - 2) * (p - q) * (1 - p) ** 2
                          * (n * (p - q) + p + q) * k * q ** (k - 1))
        return _clamp((1 - p) ** 2 * k * q ** (k - 1))
    # s < 1 < t
    if n >= 1:
        bracket = (n * k * (p - q) * (1 - 4 * q * (1 - p))
                   + n * (1 - 2 * q) * (p - 2 * q * (1 - p))
                   + k * q * (1 - 4 * q + 4 * p * p)
                   + 2 * q * (1 - 2 * q))
        return _clamp(p ** (n - 2) * q ** k * (1 - p) ** 2 * bracket)
    return _clamp(4.0 * k * (1 - p) ** 2 * q ** (k + 1))


def kendall_count_increment_pmf(n: int, s: float, t: float,
                                alpha: float) -> float:
    """P(count gains n on (s, t]) for the proper Kendall count."""
    if not 0.0 < s < t:
        raise ValueError("need 0 < s < t")
    if n < 0:
        return 0.0
    p = kendall_step_transform(t, alpha)
    q = kendall_step_transform(s, alpha)
    if t <= 1.0:
        if n >= 1:
            return _clamp(p ** (n - 2) * (p - q) / (1 - q) ** 2
                          * (n * (p - q) * (1 - p) + p + q - 2 * p * p))
        return _clamp(1.0 - 2.0 * (p - q) / (1 - q) ** 2)
    if s >= 1.0:
        if n >= 1:
            return _clamp(p ** (n - 2) * (p - q) * (1 - p) ** 2 / (1 - q) ** 2
                          * (n * (p - q) + p + q))
        return _clamp((1 - p) ** 2 / (1 - q) ** 2)
    if n >= 1:
        bracket = (n * (4 * q * q * (1 - p) ** 2 + (1 - q) ** 2 - (1 - p))
                   + q * (4 * q * p * p + 2 - 5 * q))
        return _clamp(p ** (n - 2) * (1 - p) ** 2 / (1 - q) ** 2 * bracket)
    return _clamp(4.0 * q * q * (1 - p) ** 2 / (1 - q) ** 2)


def kendall_markov_conditionals(u: float, s: float, t: float, k: int,
                                alpha: float):
    """The two conditional probabilities whose inequality witnesses the
    failure of the Markov property: P(count stays at k through t | it was k
    at both u and s) versus the same conditioned at s only.  Valid for
    0 < u < s < t < 1."""
    if not 0.0 < u < s < t < 1.0:
        raise ValueError("need 0 < u < s < t < 1")
    p = kendall_step_transform(t, alpha)
    q = kendall_step_transform(s, alpha)
    r = kendall_step_transform(u, alpha)
    with_history = ((k + 1) * (1 - 2 * p) + k * r) / ((k + 1) * (1 - 2 * q) + k * r)
    at_s_only = ((k + 1) * (1 - 2 * p) + k * q) / ((k + 1) * (1 - 2 * q) + k * q)
    return with_history, at_s_only


# ---------------------------------------------------------------------------
# geometric power sums and the Kendall generating operator


def poly_geometric_sum(j: int, k: int, p: float) -> float:
    """sum_{n>=1} (n+k)^j p^(n+k): closed forms for j <= 2, truncated
    series (tail bound < 1e-14) beyond."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if j < 0 or k < 0:
        raise ValueError("need j, k >= 0")
    if j == 0:
        return p ** (k + 1) / (1.0 - p)
    if j == 1:
        return (k * (1.0 - p) + 1.0) / (1.0 - p) ** 2 * p ** (k + 1)
    if j == 2:
        return ((k * k * (1 - p) ** 2 + 2 * k * (1 - p) + 1 + p)
                / (1.0 - p) ** 3 * p ** (k + 1))
    total = 0.0
    n = 1
    while True:
        term = (n + k) ** j * p ** (n + k)
        total += term
        n += 1
        # once the term ratio is safely below 1, bound the geometric tail
        ratio = ((n + k + 1) / (n + k)) ** j * p
        if ratio < 0.999 and term * ratio / (1.0 - ratio) < 1e-14:
            return total
        if n > 10_000_000:  # pragma: no cover
            raise RuntimeError("series did not converge")


def poly_geometric_weighted_sum(j: int, k: int, p: float) -> float:
    """sum_{n>=1} n (n+k)^j p^(n+k) via the shift identity."""
    return poly_geometric_sum(j + 1, k, p) - k * poly_geometric_sum(j, k, p)


def kendall_rate_constant(k: int, s: float, alpha: float) -> float:
    """The positive constant scaling the Kendall generating operator."""
    if s <= 0 or s == 1.0:
        raise ValueError("defined for positive s != 1 (the one-sided limits "
                         "at 1 differ)")
    if s < 1.0:
        sa = s ** alpha
        return (2.0 * (k + 1) * alpha * s ** (alpha - 1.0)
                / ((k + 1) * (2.0 - sa) - sa))
    return 2.0 * alpha / s


def kendall_generator(f, k: int, s: float, alpha: float,
                      tail_tol: float = 1e-12) -> float:
    """Generating operator of the proper Kendall count at k:
    C(k, s) (E f(G + k) - f(k)) with G geometric of ratio q = transform(s).

    The geometric expectation is summed with a tail bound below tail_tol;
    a divergence signal is raised if the terms fail to decay.
    """
    q = kendall_step_transform(s, alpha)
    c = kendall_rate_constant(k, s, alpha)
    total = 0.0
    n = 1
    prev = math.inf
    growing = 0
    while True:
        term = f(n + k) * (1.0 - q) * q ** (n - 1)
        total += term
        if abs(term) > prev:
            growing += 1
            if growing > 60:
                raise RuntimeError("geometric expectation diverges for this f")
        else:
            growing = 0
        prev = abs(term)
        n += 1
        if n > 25 and abs(term) * q / (1.0 - q) < tail_tol:
            break
        if n > 5_000_000:
            raise RuntimeError("geometric expectation failed tail bound")
    return c * (total - f(k))


def kendall_conditional_rate(j: int, k: int, s: float, alpha: float) -> float:
    """Limit of (E(count(t)^j | count(s)=k) - k^j)/(t-s) as t -> s, from
    the printed case displays (s below or above the breakpoint)."""
    if s <= 0 or s == 1.0:
        raise ValueError("defined for positive s != 1")
    if s < 1.0:
        q = kendall_step_transform(s, alpha)
        pref = ((k + 1) * alpha * s ** (alpha - 1.0) * q ** (-1.0 - k)
                / ((k + 1) * (1.0 - q) - q))
        return pref * ((1.0 - q) * poly_geometric_sum(j, k, q)
                       - k ** j * q ** (k + 1))
    q = kendall_step_transform(s, alpha)
    pref = alpha * s ** (alpha - 1.0) / (s ** (2.0 * alpha) * q ** (k + 1))
    return pref * (poly_geometric_sum(j, k, q)
                   - k ** j * q ** (k + 1) / (1.0 - q))


def kendall_rate_one_sided_limits(j: int, k: int, alpha: float):
    """The two one-sided limits of the conditional rate as s approaches the
    breakpoint: they differ, which the suites report."""
    if k < 1:
        raise ValueError("the left limit form requires k >= 1")
    base = poly_geometric_sum(j, k, 0.5) - k ** j * 2.0 ** (-k)
    left = (k + 1) / k * alpha * 2.0 ** (k + 1) * base
    right = alpha * 2.0 ** (k + 1) * base
    return left, right
