"""Registry of generalized-convolution algebras.

Each algebra is identified by the point-mass kernel rho_{x,y} = d_x <> d_y
(d_t a unit mass at t); the kernel determines the whole binary operation on
measures by bilinearity.  An algebra record carries capability flags:
whether the kernel can be sampled, whether its CDF or density is available
in closed form, whether the algebra has a multiplicative homomorphism
(regularity), and whether the kernel is supported above max(x, y)
(monotonicity, checked against the kernel itself).

Every kernel draw for non-canonical (x, y) routes through `canonicalize`
and a final dilation, exercising the rescaling identity
rho_{x,y} = T_v rho_{z,1} with v = max(x, y), z = min/max.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .numerics import bessel_j, macdonald_k, reg_upper_gamma

__all__ = [
    "Algebra",
    "KernelLaw",
    "CapabilityError",
    "classical",
    "symmetric",
    "alpha1",
    "stable",
    "kendall",
    "kingman3",
    "max_conv",
    "alphabeta",
    "kucharczak",
    "volkovich",
    "nabla",
    "parse_algebra",
    "list_algebras",
    "h_delta",
    "kernel_sample",
    "kernel_draws",
    "kernel_cdf",
    "kernel_density",
    "canonicalize",
]


class CapabilityError(ValueError):
    """The algebra does not support the requested operation."""


@dataclass(frozen=True)
class Algebra:
    tag: str
    alpha: float | None
    beta: float | None
    regular: bool
    monotonic: bool
    can_sample_kernel: bool
    can_eval_kernel_cdf: bool
    can_eval_kernel_density: bool

    def label(self) -> str:
        parts = []
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
        if self.beta is not None:
            parts.append(f"beta={self.beta:g}")
        return self.tag + (":" + ",".join(parts) if parts else "")

    def __str__(self):
        return self.label()


def _alg(tag, alpha=None, beta=None, *, regular, monotonic, sample, cdf=False,
         density=False):
    return Algebra(tag, alpha, beta, regular, monotonic, sample, cdf, density)


def classical() -> Algebra:
    """Point masses add: d_a <> d_b = d_{a+b}."""
    return _alg("classical", regular=True, monotonic=True, sample=True, cdf=True)


def symmetric() -> Algebra:
    """Half mass at |a-b|, half at a+b."""
    return _alg("symmetric", regular=True, monotonic=False, sample=True, cdf=True)


def alpha1(alpha: float) -> Algebra:
    """Two-atom kernel at |a^al - b^al|^(1/al) and (a^al + b^al)^(1/al).

    The low branch sits below max(a, b) whenever both arguments are
    positive, so this algebra is not monotonic.
    """
    _positive(alpha, "alpha")
    return _alg("alpha1", alpha, regular=True, monotonic=False, sample=True,
                cdf=True)


def stable(alpha: float) -> Algebra:
    """Deterministic kernel at the alpha-norm (a^al + b^al)^(1/al)."""
    _positive(alpha, "alpha")
    return _alg("stable", alpha, regular=True, monotonic=True, sample=True,
                cdf=True)


def kendall(alpha: float) -> Algebra:
    """Pareto-or-stick kernel: d_x <> d_1 = x^al Pareto(2 al) + (1-x^al) d_1
    for x in [0, 1]."""
    _positive(alpha, "alpha")
    return _alg("kendall", alpha, regular=True, monotonic=True, sample=True,
                cdf=True)


def kingman3() -> Algebra:
    """Radial kernel sqrt(a^2 + b^2 + 2ab theta), theta uniform on [-1, 1]."""
    return _alg("kingman3", regular=True, monotonic=False, sample=True)


def max_conv() -> Algebra:
    """Point mass at max(a, b).  Not regular; the printed indicator
    homomorphism is still evaluated by h_delta."""
    return _alg("max", regular=False, monotonic=True, sample=True, cdf=True)


def alphabeta(alpha: float, beta: float) -> Algebra:
    """Radial kernel (a^2al + b^2al + 2 (ab)^al theta)^(1/2al) with theta
    drawn as 2B - 1, B ~ Beta((beta-1)/2, (beta-1)/2).  Requires beta > 1
    for the mixing density to be normalizable."""
    _positive(alpha, "alpha")
    if beta <= 1.0:
        raise ValueError("alphabeta requires beta > 1")
    return _alg("alphabeta", alpha, beta, regular=True, monotonic=False,
                sample=True)


def kucharczak(alpha: float) -> Algebra:
    """Absolutely continuous kernel supported on [(a^al+b^al)^(1/al), inf);
    density evaluation only, no sampler."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("kucharczak requires alpha in (0, 1)")
    return _alg("kucharczak", alpha, regular=True, monotonic=True,
                sample=False, density=True)


def volkovich(beta: float) -> Algebra:
    """Absolutely continuous kernel on (|a-b|, a+b); density evaluation
    only, no sampler."""
    if not 0.0 < beta < 0.5:
        raise ValueError("volkovich requires beta in (0, 1/2)")
    return _alg("volkovich", beta=beta, regular=True, monotonic=False,
                sample=False, density=True)


def nabla(alpha: float) -> Algebra:
    """Max-convolution factorization algebra; only the homomorphism is
    evaluated (the kernel is defined implicitly)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("nabla requires alpha in (0, 1)")
    return _alg("nabla", alpha, regular=True, monotonic=False, sample=False)


_CONSTRUCTORS = {
    "classical": (classical, ()),
    "symmetric": (symmetric, ()),
    "alpha1": (alpha1, ("alpha",)),
    "stable": (stable, ("alpha",)),
    "kendall": (kendall, ("alpha",)),
    "kingman3": (kingman3, ()),
    "max": (max_conv, ()),
    "alphabeta": (alphabeta, ("alpha", "beta")),
    "kucharczak": (kucharczak, ("alpha",)),
    "volkovich": (volkovich, ("beta",)),
    "nabla": (nabla, ("alpha",)),
}

_GRAMMAR = ("algebra strings are 'tag' or 'tag:key=value[,key=value]' with tags "
            + ", ".join(sorted(_CONSTRUCTORS)))


def _positive(v, name):
    if not v > 0:
        raise ValueError(f"{name} must be positive")


def parse_algebra(text: str) -> Algebra:
    """Parse an algebra string such as 'kendall:alpha=0.75' or 'kingman3'."""
    m = re.fullmatch(r"\s*([a-z0-9]+)\s*(?::\s*(.*))?", text)
    if not m:
        raise ValueError(f"unparseable algebra {text!r}; {_GRAMMAR}")
    tag, rest = m.group(1), m.group(2)
    if tag not in _CONSTRUCTORS:
        raise ValueError(f"unknown algebra {tag!r}; {_GRAMMAR}")
    ctor, names = _CONSTRUCTORS[tag]
    kwargs = {}
    if rest:
        for piece in rest.split(","):
            if "=" not in piece:
                raise ValueError(f"bad parameter {piece!r}; {_GRAMMAR}")
            key, _, val = piece.partition("=")
            key = key.strip()
            if key not in names:
                raise ValueError(f"algebra {tag!r} takes no parameter {key!r}")
            kwargs[key] = float(val)
    missing = [n for n in names if n not in kwargs]
    if missing:
        raise ValueError(f"algebra {tag!r} needs parameters {missing}")
    return ctor(**kwargs)


def list_algebras() -> list[dict]:
    """One row per registered algebra: tag, parameter names, capabilities."""
    rows = []
    defaults = {"alpha": 0.5, "beta": 0.25}
    for tag, (ctor, names) in sorted(_CONSTRUCTORS.items()):
        kwargs = {n: (2.0 if (tag == "alphabeta" and n == "beta") else defaults[n])
                  for n in names}
        alg = ctor(**kwargs)
        rows.append({
            "tag": tag,
            "parameters": ",".join(names) or "-",
            "regular": alg.regular,
            "monotonic": alg.monotonic,
            "sample": alg.can_sample_kernel,
            "kernel_cdf": alg.can_eval_kernel_cdf,
            "kernel_density": alg.can_eval_kernel_density,
        })
    return rows


# ---------------------------------------------------------------------------
# homomorphisms


def h_delta(algebra: Algebra, t):
    """Evaluate h(d_t), the homomorphism at a point mass.

    Accepts scalars or arrays; h(d_0) = 1 for every registered algebra.
    The symmetric and alpha1 algebras use the cosine presentation, the only
    one that is multiplicative on their two-atom kernels.
    """
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(arr < 0):
        raise ValueError("h_delta requires t >= 0")
    tag = algebra.tag
    if tag == "classical":
        out = np.exp(-arr)
    elif tag == "symmetric":
        out = np.cos(arr)
    elif tag == "alpha1":
        out = np.cos(arr ** algebra.alpha)
    elif tag == "stable":
        out = np.exp(-(arr ** algebra.alpha))
    elif tag == "kendall":
        out = np.maximum(1.0 - arr ** algebra.alpha, 0.0)
    elif tag == "kingman3":
        out = np.ones_like(arr)
        nz = arr > 0
        out[nz] = np.sin(arr[nz]) / arr[nz]
    elif tag == "max":
        out = (arr <= 1.0).astype(float)
    elif tag == "alphabeta":
        nu = algebra.beta / 2.0 - 1.0
        x = arr ** algebra.alpha
        out = np.ones_like(arr)
        nz = x > 0
        out[nz] = (math.gamma(algebra.beta / 2.0) * (2.0 / x[nz]) ** nu
                   * np.asarray(bessel_j(nu, x[nz])))
    elif tag == "kucharczak":
        out = np.array([reg_upper_gamma(algebra.alpha, v) for v in arr.ravel()])
        out = out.reshape(arr.shape)
    elif tag == "volkovich":
        b = algebra.beta
        out = np.ones_like(arr)
        nz = arr > 0
        kv = np.array([macdonald_k(b, v) for v in arr.ravel()[arr.ravel() > 0]])
        out[nz] = 2.0 ** (1.0 - b) * arr[nz] ** b * kv / math.gamma(b)
    elif tag == "nabla":
        a = algebra.alpha
        out = np.zeros_like(arr)
        pos = (arr > 0) & (arr <= 1.0)
        m = np.floor(np.log2(arr[pos]))
        out[pos] = (1.0 - 2.0 ** ((1.0 + a) * m)
                    - (2.0 - 2.0 ** (-a)) * (1.0 - 2.0 ** m) * arr[pos] ** a)
        out[arr == 0.0] = 1.0
    else:  # pragma: no cover
        raise CapabilityError(f"no homomorphism registered for {tag}")
    if scalar:
        return float(out[0])
    return out


# ---------------------------------------------------------------------------
# kernel sampling


@dataclass(frozen=True)
class KernelLaw:
    """The measure d_x <> d_y for a fixed algebra and nonnegative x, y."""

    algebra: Algebra
    x: float
    y: float

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise ValueError("kernel arguments must be nonnegative")

    def canonical(self):
        return canonicalize(self.x, self.y)


def canonicalize(x: float, y: float):
    """Return (v, z) with v = max(x, y) and z = min/max (z = 0 when v = 0)."""
    v = max(x, y)
    if v == 0.0:
        return 0.0, 0.0
    return v, min(x, y) / v


def kernel_draws(algebra: Algebra, x, y, rng, size: int | None = None):
    """Vectorized draws from d_x <> d_y.

    x and y may be scalars or arrays; with scalar arguments `size` sets the
    number of draws.  Scalars in, scalar out when size is None.
    """
    if not algebra.can_sample_kernel:
        raise CapabilityError(f"algebra {algebra.tag} has no kernel sampler")
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0 and size is None
    xs = np.broadcast_to(np.asarray(x, float), np.broadcast_shapes(
        np.shape(x), np.shape(y), (size,) if size else ())).ravel()
    ys = np.broadcast_to(np.asarray(y, float), xs.shape).ravel()
    if np.any(xs < 0) or np.any(ys < 0):
        raise ValueError("kernel arguments must be nonnegative")
    v = np.maximum(xs, ys)
    safe = np.where(v > 0, v, 1.0)
    z = np.where(v > 0, np.minimum(xs, ys) / safe, 0.0)
    out = v * _canonical_draw(algebra, z, rng)
    if scalar:
        return float(out[0])
    if size is not None and np.ndim(x) == 0 and np.ndim(y) == 0:
        return out
    return out.reshape(np.broadcast_shapes(np.shape(x), np.shape(y)))


def kernel_sample(law: KernelLaw, rng, size: int | None = None):
    """One draw (or `size` draws) distributed as d_x <> d_y."""
    return kernel_draws(law.algebra, law.x, law.y, rng, size=size)


def _canonical_draw(algebra: Algebra, z, rng):
    """Draw from rho_{z,1} for canonical z in [0, 1] (arrays)."""
    tag = algebra.tag
    n = z.shape[0]
    if tag == "classical":
        return z + 1.0
    if tag == "max":
        return np.ones_like(z)
    if tag == "stable":
        a = algebra.alpha
        return (z ** a + 1.0) ** (1.0 / a)
    if tag == "symmetric":
        lo = rng.random(n) < 0.5
        return np.where(lo, 1.0 - z, 1.0 + z)
    if tag == "alpha1":
        a = algebra.alpha
        lo = rng.random(n) < 0.5
        za = z ** a
        return np.where(lo, (1.0 - za) ** (1.0 / a), (1.0 + za) ** (1.0 / a))
    if tag == "kendall":
        a = algebra.alpha
        jump = rng.random(n) < z ** a
        pareto = rng.random(n) ** (-1.0 / (2.0 * a))
        return np.where(jump, pareto, 1.0)
    if tag == "kingman3":
        theta = rng.uniform(-1.0, 1.0, n)
        return np.sqrt(z * z + 1.0 + 2.0 * z * theta)
    if tag == "alphabeta":
        a, b = algebra.alpha, algebra.beta
        theta = 2.0 * rng.beta((b - 1.0) / 2.0, (b - 1.0) / 2.0, n) - 1.0
        za = z ** a
        return (z ** (2 * a) + 1.0 + 2.0 * za * theta) ** (1.0 / (2.0 * a))
    raise CapabilityError(f"algebra {tag} has no kernel sampler")  # pragma: no cover


# ---------------------------------------------------------------------------
# kernel CDF / density


def kernel_cdf(algebra: Algebra, x: float, y: float, t):
    """rho_{x,y}([0, t)): mass strictly below t.  Vectorized in t."""
    if not algebra.can_eval_kernel_cdf:
        raise CapabilityError(f"algebra {algebra.tag} has no closed kernel CDF")
    if x < 0 or y < 0:
        raise ValueError("kernel arguments must be nonnegative")
    ts = np.asarray(t, dtype=float)
    tag = algebra.tag
    if tag == "classical":
        out = (x + y < ts).astype(float)
    elif tag == "stable":
        a = algebra.alpha
        out = ((x ** a + y ** a) ** (1.0 / a) < ts).astype(float)
    elif tag == "max":
        out = (max(x, y) < ts).astype(float)
    elif tag == "symmetric":
        out = 0.5 * (abs(x - y) < ts) + 0.5 * (x + y < ts)
    elif tag == "alpha1":
        a = algebra.alpha
        lo = abs(x ** a - y ** a) ** (1.0 / a)
        hi = (x ** a + y ** a) ** (1.0 / a)
        out = 0.5 * (lo < ts) + 0.5 * (hi < ts)
    elif tag == "kendall":
        a = algebra.alpha
        with np.errstate(divide="ignore"):
            body = 1.0 - (x * y) ** a / np.where(ts > 0, ts, 1.0) ** (2 * a)
        out = np.where((x < ts) & (y < ts), body, 0.0)
    else:  # pragma: no cover
        raise CapabilityError(tag)
    if np.ndim(t) == 0:
        return float(out)
    return out


def kernel_density(algebra: Algebra, x: float, y: float, u):
    """Pointwise kernel density of d_x <> d_y at u (zero off-support).

    volkovich: the classical display is read as a density in the squared
    variable, i.e. it carries the 2u Jacobian here; with that reading the
    kernel integrates to one at beta = 1/4 for every (x, y).
    """
    if not algebra.can_eval_kernel_density:
        raise CapabilityError(f"algebra {algebra.tag} has no kernel density")
    if x <= 0 or y <= 0:
        raise ValueError("kernel density requires x, y > 0")
    us = np.asarray(u, dtype=float)
    if np.any(us <= 0):
        raise ValueError("kernel density requires u > 0")
    if algebra.tag == "kucharczak":
        a = algebra.alpha
        lo = (x ** a + y ** a) ** (1.0 / a)
        num = (x * y) ** a * math.sin(math.pi * a) * (2.0 * us - x - y)
        den = (math.pi * np.where(us > lo, (us - x - y) ** a
                                  * (us - x) ** a * (us - y) ** a, 1.0))
        out = np.where(us >= lo, num / den, 0.0)
    else:  # volkovich
        b = algebra.beta
        lo, hi = abs(x - y), x + y
        inside = (us > lo) & (us < hi)
        sup = np.where(inside, (us * us - lo * lo) * (hi * hi - us * us), 1.0)
        coeff = 2.0 * (x * y) ** (2 * b) / _beta_fn(b, 0.5 - b)
        out = np.where(inside, coeff * 2.0 * us * sup ** (-b - 0.5), 0.0)
    if np.ndim(u) == 0:
        return float(out)
    return out


def _beta_fn(a, b):
    return math.gamma(a) * math.gamma(b) / math.gamma(a + b)
