# Which reading of the Vol'kovich kernel density is the actual probability kernel?
#  (A) literally as printed:  C (ab)^{2b} ((x^2-(a-b)^2)_+ ((a+b)^2-x^2)_+)^{-b-1/2}
#  (B) printed expression as a density in x^2 (i.e. extra Jacobian 2x)
# with C = 2 / B(beta, 1/2-beta).  The homomorphism h(t) = 2^{1-b} t^b K_b(t) / Gamma(b)
# must satisfy  int h(t u) f_{a,b}(u) du = h(t a) h(t b).
import numpy as np
from scipy import integrate, special

beta = 0.25


def h(t):
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    m = t > 0
    out[m] = 2 ** (1 - beta) * t[m] ** beta * special.kv(beta, t[m]) / special.gamma(beta)
    return out


def f_printed(x, a, b):
    lo, hi = abs(a - b), a + b
    C = 2 * (a * b) ** (2 * beta) / special.beta(beta, 0.5 - beta)
    sup = (x**2 - lo**2) * (hi**2 - x**2)
    return np.where((x > lo) & (x < hi), C * np.maximum(sup, 1e-300) ** (-beta - 0.5), 0.0)


def f_2x(x, a, b):
    return 2 * x * f_printed(x, a, b)


for name, f in [("printed", f_printed), ("2x-jacobian", f_2x)]:
    for (a, b) in [(1.0, 2.0), (1.0, 1.0), (0.5, 1.5)]:
        lo, hi = abs(a - b), a + b
        mass, err = integrate.quad(lambda x: f(x, a, b), lo, hi, limit=400)
        line = f"{name} (a={a},b={b}): mass={mass:.8f}"
        for t in (0.5, 1.0, 2.0):
            val, _ = integrate.quad(lambda x: f(x, a, b) * h(np.array([t * x]))[0], lo, hi, limit=400)
            target = h(np.array([t * a]))[0] * h(np.array([t * b]))[0]
            line += f"  t={t}: lhs={val:.6f} rhs={target:.6f}"
        print(line)

# also probe beta=0.3 normalization for the 2x reading
beta = 0.3
for (a, b) in [(1.0, 1.0), (1.0, 2.0)]:
    lo, hi = abs(a - b), a + b
    mass, err = integrate.quad(lambda x: f_2x(x, a, b), lo, hi, limit=400)
    print(f"beta=0.3 2x: (a={a},b={b}) mass={mass:.8f}")
