"""Mixed probability measures on the half line and the constructions built
from them: dilation, generalized characteristic functions, fold-based
convolution powers, the compound-Poisson measure, and the generalized
Bernoulli measure.

A measure is a finite atom list plus an optional absolutely continuous
part.  The density handle integrates to one over its support; `ac_weight`
carries the mass of the continuous component.  Samplers follow the library
protocol `sampler(rng, size) -> ndarray`.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .algebras import Algebra, CapabilityError, h_delta, kernel_draws
from .numerics import Grid, binomial_draws, integrate, poisson_draws

__all__ = [
    "Measure",
    "GcfTable",
    "dilate",
    "gcf",
    "exp_gcf",
    "bernoulli_gcf",
    "conv_power_draws",
    "conv_power_sample",
    "exp_draws",
    "exp_sample",
    "bernoulli_draws",
    "bernoulli_sample",
]


@dataclass(frozen=True)
class Measure:
    """Atoms + optional absolutely continuous part + sampling contract.

    atoms: tuple of (location >= 0, mass in (0, 1]) pairs
    density: normalized density over `support`, or None
    support: (lo, hi) interval of the continuous part (hi may be inf)
    ac_weight: mass of the continuous part
    sampler: optional callable(rng, size) -> draws
    """

    atoms: tuple = ()
    density: object = None
    support: tuple | None = None
    ac_weight: float = 0.0
    sampler: object = None

    def __post_init__(self):
        for loc, mass in self.atoms:
            if loc < 0 or not 0.0 < mass <= 1.0 + 1e-12:
                raise ValueError(f"bad atom ({loc}, {mass})")
        if (self.density is None) != (self.ac_weight == 0.0):
            raise ValueError("density and ac_weight must be given together")
        if self.density is not None and self.support is None:
            raise ValueError("a density needs a support interval")

    @classmethod
    def point(cls, x: float) -> "Measure":
        return cls(atoms=((float(x), 1.0),))

    def total_mass(self) -> float:
        return sum(m for _, m in self.atoms) + self.ac_weight

    def validate(self, quadrature: bool = True) -> None:
        """Mass sums to 1 within 1e-9; density integrates to 1 within 1e-6."""
        if abs(self.total_mass() - 1.0) > 1e-9:
            raise ValueError(f"measure mass {self.total_mass()} != 1")
        if quadrature and self.density is not None:
            lo, hi = self.support
            mass = _integrate_maybe_unbounded(self.density, lo, hi)
            if abs(mass - 1.0) > 1e-6:
                raise ValueError(f"density integrates to {mass}, not 1")

    def sample(self, rng, size: int) -> np.ndarray:
        if self.sampler is not None:
            return np.asarray(self.sampler(rng, size), dtype=float)
        if self.ac_weight == 0.0:
            locs = np.array([loc for loc, _ in self.atoms])
            masses = np.array([m for _, m in self.atoms])
            cdf = np.cumsum(masses / masses.sum())
            return locs[np.searchsorted(cdf, rng.random(size), side="left")]
        raise ValueError("measure has a continuous part but no sampler")


def _integrate_maybe_unbounded(density, lo, hi, tol=1e-12):
    if np.isfinite(hi):
        return integrate(density, lo, hi, abs_tol=1e-12, rel_tol=1e-9)
    total = 0.0
    left = lo
    right = max(2.0 * abs(lo), 16.0)
    while True:
        piece = integrate(density, left, right, abs_tol=1e-12, rel_tol=1e-9)
        total += piece
        if abs(piece) < tol and right > 64.0:
            return total
        left, right = right, 2.0 * right
        if right > 1e18:
            return total


def dilate(m: Measure, a: float) -> Measure:
    """Pushforward under multiplication by a; a = 0 collapses to a unit
    mass at the origin."""
    if a < 0:
        raise ValueError("dilation factor must be nonnegative")
    if a == 0.0:
        return Measure.point(0.0)
    atoms = tuple((a * loc, mass) for loc, mass in m.atoms)
    density = None
    support = None
    if m.density is not None:
        base = m.density
        density = lambda x, _a=a, _f=base: _f(x / _a) / _a
        support = (m.support[0] * a, m.support[1] * a)
    sampler = None
    if m.sampler is not None:
        base_sampler = m.sampler
        sampler = lambda rng, size, _a=a, _s=base_sampler: _a * _s(rng, size)
    return Measure(atoms=atoms, density=density, support=support,
                   ac_weight=m.ac_weight, sampler=sampler)


# ---------------------------------------------------------------------------
# generalized characteristic functions


@dataclass(frozen=True)
class GcfTable:
    """Phi_lambda(t) = int h(d_{tx}) lambda(dx) on a grid, with Monte Carlo
    standard errors (zero rows for closed-form entries)."""

    algebra: Algebra
    grid: Grid
    values: np.ndarray
    stderr: np.ndarray

    def to_csv(self, path_or_buf) -> None:
        buf = path_or_buf if hasattr(path_or_buf, "write") else io.StringIO()
        buf.write("t,value,stderr\n")
        for t, v, s in zip(self.grid.points, self.values, self.stderr):
            buf.write(f"{t:.17g},{v:.17g},{s:.17g}\n")
        if buf is not path_or_buf:
            with open(path_or_buf, "w") as fh:
                fh.write(buf.getvalue())

    def check(self) -> None:
        if self.grid.points[0] == 0.0:
            slack = 3.0 * max(self.stderr[0], 1e-12)
            if abs(self.values[0] - 1.0) > slack:
                raise ValueError("Phi(0) deviates from 1 beyond 3 sigma")


def gcf(algebra: Algebra, m: Measure, grid: Grid, budget: int = 1_000_000,
        rng=None) -> GcfTable:
    """Generalized characteristic function of `m` under `algebra`.

    Exact (atom sums + quadrature over the continuous part) whenever the
    measure is fully described; otherwise a Monte Carlo mean of h(d_{tX})
    over `budget` draws with standard errors.
    """
    if not algebra.regular:
        raise CapabilityError(f"algebra {algebra.tag} is not regular")
    ts = grid.points
    analytic = m.ac_weight == 0.0 or m.density is not None
    if analytic:
        values = np.zeros(ts.size)
        for loc, mass in m.atoms:
            values += mass * np.asarray(h_delta(algebra, ts * loc))
        if m.density is not None:
            lo, hi = m.support
            for i, t in enumerate(ts):
                values[i] += m.ac_weight * _integrate_maybe_unbounded(
                    lambda x, _t=t: m.density(x) * h_delta(algebra, _t * x), lo, hi)
        return GcfTable(algebra, grid, values, np.zeros(ts.size))
    if rng is None:
        raise ValueError("Monte Carlo gcf needs an rng")
    draws = m.sample(rng, int(budget))
    values = np.empty(ts.size)
    stderr = np.empty(ts.size)
    for i, t in enumerate(ts):
        vals = np.asarray(h_delta(algebra, t * draws))
        values[i] = vals.mean()
        stderr[i] = vals.std(ddof=1) / math.sqrt(vals.size)
    return GcfTable(algebra, grid, values, stderr)


def gcf_of_draws(algebra: Algebra, draws: np.ndarray, grid: Grid) -> GcfTable:
    """Empirical GCF of an array of draws (mean of h(d_{tX}))."""
    ts = grid.points
    values = np.empty(ts.size)
    stderr = np.empty(ts.size)
    for i, t in enumerate(ts):
        vals = np.asarray(h_delta(algebra, t * draws))
        values[i] = vals.mean()
        stderr[i] = vals.std(ddof=1) / math.sqrt(vals.size)
    return GcfTable(algebra, grid, values, stderr)


def exp_gcf(a: float, phi_nu: GcfTable) -> GcfTable:
    """exp(-a (1 - Phi_nu(t))) pointwise, errors by first-order delta."""
    if a <= 0:
        raise ValueError("a must be positive")
    values = np.exp(-a * (1.0 - phi_nu.values))
    stderr = a * phi_nu.stderr * np.abs(values)
    return GcfTable(phi_nu.algebra, phi_nu.grid, values, stderr)


def bernoulli_gcf(algebra: Algebra, n: int, p: float, grid: Grid) -> GcfTable:
    """Exact GCF of the n-fold power of (p d_1 + (1-p) d_0): by
    multiplicativity it is (1 - p + p h(d_t))^n."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    h = np.asarray(h_delta(algebra, grid.points))
    values = (1.0 - p + p * h) ** n
    return GcfTable(algebra, grid, values, np.zeros(grid.points.size))


# ---------------------------------------------------------------------------
# convolution powers and compound constructions (fold-based samplers)


def conv_power_draws(algebra: Algebra, step_sampler, n: int, rng,
                     size: int) -> np.ndarray:
    """Draws from the n-fold convolution power of the step law by
    sequential kernel folding; n = 0 is the unit mass at 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if not algebra.can_sample_kernel:
        raise CapabilityError(f"algebra {algebra.tag} has no kernel sampler")
    out = np.zeros(size)
    for _ in range(n):
        out = kernel_draws(algebra, out, np.asarray(step_sampler(rng, size), float), rng)
    return out


def conv_power_sample(algebra: Algebra, step_sampler, n: int, rng) -> float:
    return float(conv_power_draws(algebra, step_sampler, n, rng, 1)[0])


def exp_draws(algebra: Algebra, a: float, step_sampler, rng,
              size: int) -> np.ndarray:
    """Draws from the compound-Poisson measure e^-a sum a^k/k! nu^(<>k):
    a Poisson(a) count of kernel folds."""
    if a < 0:
        raise ValueError("a must be nonnegative")
    if not algebra.can_sample_kernel:
        raise CapabilityError(f"algebra {algebra.tag} has no kernel sampler")
    counts = poisson_draws(rng, a, size)
    out = np.zeros(size)
    kmax = int(counts.max()) if size else 0
    for k in range(1, kmax + 1):
        idx = np.nonzero(counts >= k)[0]
        steps = np.asarray(step_sampler(rng, idx.size), float)
        out[idx] = kernel_draws(algebra, out[idx], steps, rng)
    return out


def exp_sample(algebra: Algebra, a: float, step_sampler, rng) -> float:
    return float(exp_draws(algebra, a, step_sampler, rng, 1)[0])


def bernoulli_draws(algebra: Algebra, n: int, p: float, rng,
                    size: int) -> np.ndarray:
    """Draws from (p d_1 + (1-p) d_0)^(<>n): a Binomial(n, p) count of
    unit-step kernel folds (axiom (ii) linearity)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not algebra.can_sample_kernel:
        raise CapabilityError(f"algebra {algebra.tag} has no kernel sampler")
    counts = binomial_draws(rng, n, p, size)
    out = np.zeros(size)
    kmax = int(counts.max()) if size else 0
    for k in range(1, kmax + 1):
        idx = np.nonzero(counts >= k)[0]
        out[idx] = kernel_draws(algebra, out[idx], np.ones(idx.size), rng)
    return out


def bernoulli_sample(algebra: Algebra, n: int, p: float, rng) -> float:
    return float(bernoulli_draws(algebra, n, p, rng, 1)[0])


def delta_steps(x: float):
    """Step sampler for a unit mass at x."""
    def sampler(rng, size):
        return np.full(size, float(x))
    return sampler
