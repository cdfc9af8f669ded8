# MC check of the Kendall type-II conditional rate at j=1, k=2, s=0.5, alpha=1.
# Closed-form candidates: 2.0 (paper C(k,s)/(1-q) and case-1 limit) vs 1.6 (spec example).
import numpy as np

alpha = 1.0
s = 0.5
k_cond = 2

def counts_at(times, n_paths, rng):
    times = np.asarray(times)
    tmax = times[-1]
    # proper Kendall steps: F(t)=t^alpha on [0,1] -> U^(1/alpha); alpha=1 -> uniform
    S = rng.random(n_paths) ** (1.0 / alpha)
    counts = (S[:, None] <= times[None, :]).astype(np.int32)
    active = S <= tmax
    it = 0
    while active.any():
        it += 1
        if it > 10000:
            raise RuntimeError("cap")
        idx = np.nonzero(active)[0]
        T = rng.random(idx.size) ** (1.0 / alpha)
        x, y = S[idx], T
        v = np.maximum(x, y)
        w = np.minimum(x, y)
        z = np.where(v > 0, w / np.where(v > 0, v, 1.0), 0.0)
        u1 = rng.random(idx.size)
        u2 = rng.random(idx.size)
        pareto = u2 ** (-1.0 / (2 * alpha))
        out = v * np.where(u1 < z**alpha, pareto, 1.0)
        S[idx] = out
        counts[idx] += (out[:, None] <= times[None, :])
        active[idx] = out <= tmax
    return counts

rng = np.random.default_rng(12345)
for dt in [0.04, 0.02, 0.01]:
    t = s + dt
    est_num = 0.0
    hits = 0
    for _ in range(8):
        c = counts_at([s, t], 1_000_000, rng)
        sel = c[:, 0] == k_cond
        hits += sel.sum()
        est_num += (c[sel, 1] - k_cond).sum()
    rate = est_num / hits / dt
    print(f"dt={dt}: E(N(t)-k | N(s)=k)/dt = {rate:.4f}   (hits={hits})")

# exact conditional expectation from the case-1 moment display, j=1
q = s**alpha / 2


def phi1(kk, pp):
    return (kk * (1 - pp) + 1) / (1 - pp) ** 2 * pp ** (kk + 1)


def phi2(kk, pp):
    return (kk**2 * (1 - pp) ** 2 + 2 * kk * (1 - pp) + 1 + pp) / (1 - pp) ** 3 * pp ** (kk + 1)


for dt in [0.04, 0.02, 0.01, 0.005, 1e-6]:
    t = s + dt
    p = t**alpha / 2
    k = k_cond
    bracket = (1 - p) * (p - q) * (phi2(k, p) - k * phi1(k, p)) + (p + q - 2 * p**2) * phi1(k, p) - 2 * k * p ** (k + 2)
    val = (k + 1) / (k * (1 - q) + 1 - 2 * q) * (p - q) / p ** (k + 2) * bracket
    print(f"dt={dt}: exact (E(N(t)|N(s)=k)-k)/dt = {val/dt:.6f}")

# limit formulas
lim = (k_cond + 1) * alpha * s ** (alpha - 1) * q ** (-1 - k_cond) / ((k_cond + 1) * (1 - q) - q) * ((1 - q) * phi1(k_cond, q) - k_cond * q ** (k_cond + 1))
print("printed case-1 limit:", lim)
C = 2 * (k_cond + 1) * alpha * s ** (alpha - 1) / ((k_cond + 1) * (2 - s**alpha) - s**alpha)
print("C(k,s) =", C, " -> A_s id =", C / (1 - q))
