# Symbolic verification of the three-regime Kendall joint-pmf displays
# against the four-term joint-CDF combination (Property 3 + Lemma 3).
import sympy as sp

n, k = sp.symbols("n k", positive=True, integer=True)
p, q = sp.symbols("p q", positive=True)

# Regime helpers: F_i(t), F_j(s) and the ratio s^a/t^a expressed in (p, q).
def Fi_t_below1(i):   # t <= 1
    return (i + 1) * p**i
def Fi_t_above1(i):   # t > 1
    return (i * (1 - p) + p) * p**(i - 1)
def Fj_s_below1(j):
    return (j + 1) * q**j
def Fj_s_above1(j):
    return (j * (1 - q) + q) * q**(j - 1)

def joint_cdf(i, j, Fi, Fj, Gt_pow, Gs_pow, ratio):
    # P{S_i < t, S_j < s} per Lemma 3; j = 0 -> F_i(t); i <= j -> F_j(s)
    return Fi(i) * Fj(j) - ratio * (Fi(i) - Gt_pow(i)) * (Fj(j) - Gs_pow(j))

def pmf_fourterm(nn, kk, Fi, Fj, ratio):
    Gt_pow = lambda i: p**i
    Gs_pow = lambda j: q**j
    def J(i, j):
        if j == 0:
            return Fi(i)
        # i >= j assumed by callers for nn >= 1
        return joint_cdf(i, j, Fi, Fj, Gt_pow, Gs_pow, ratio)
    T1 = J(nn + kk, kk)
    T2 = Fj(kk + 1) if nn == 0 else J(nn + kk, kk + 1)
    T3 = J(nn + kk + 1, kk)
    T4 = J(nn + kk + 1, kk + 1)
    return sp.expand(T1 - T2 - T3 + T4)

results = {}

# ---- regime s < t < 1: ratio s^a/t^a = q/p
ratio1 = q / p
printed1_pos = p**(n - 2) * (p - q) * (n*(p - q)*(1 - p) + p + q - 2*p**2) * (k + 1) * q**k
printed1_zero = q**k * ((k + 1)*(1 - 2*p + q) - q)
d = sp.simplify(pmf_fourterm(n, k, Fi_t_below1, Fj_s_below1, ratio1) - printed1_pos)
results["case1 n>=1"] = d
d = sp.simplify(pmf_fourterm(0, k, Fi_t_below1, Fj_s_below1, ratio1) - printed1_zero)
results["case1 n=0"] = d

# ---- regime 1 < s < t: s^a = 1/(2(1-q)), t^a = 1/(2(1-p)) -> ratio = (1-p)/(1-q)
ratio2 = (1 - p) / (1 - q)
printed2_pos = p**(n - 2) * (p - q) * (1 - p)**2 * (n*(p - q) + p + q) * k * q**(k - 1)
printed2_zero = (1 - p)**2 * k * q**(k - 1)
d = sp.simplify(pmf_fourterm(n, k, Fi_t_above1, Fj_s_above1, ratio2) - printed2_pos)
results["case2 n>=1"] = d
d = sp.simplify(pmf_fourterm(0, k, Fi_t_above1, Fj_s_above1, ratio2) - printed2_zero)
results["case2 n=0"] = d

# ---- regime s < 1 < t: s^a = 2q, t^a = 1/(2(1-p)) -> ratio = 4q(1-p)
ratio3 = 4 * q * (1 - p)
printed3_pos = p**(n - 2) * q**k * (1 - p)**2 * (
    n*k*(p - q)*(1 - 4*q*(1 - p)) + n*(1 - 2*q)*(p - 2*q*(1 - p))
    + k*q*(1 - 4*q + 4*p**2) + 2*q*(1 - 2*q))
printed3_zero = 4 * k * (1 - p)**2 * q**(k + 1)
d = sp.simplify(pmf_fourterm(n, k, Fi_t_above1, Fj_s_below1, ratio3) - printed3_pos)
results["case3 n>=1"] = d
d = sp.simplify(pmf_fourterm(0, k, Fi_t_above1, Fj_s_below1, ratio3) - printed3_zero)
results["case3 n=0"] = d

for name, diff in results.items():
    print(f"{name}: {'MATCH' if diff == 0 else 'MISMATCH: ' + str(diff)}")

# ---- increments: sum joint over k (geometric); compare with printed increment displays
K = sp.symbols("K", nonnegative=True, integer=True)
inc1_pos = sp.simplify(sp.summation(printed1_pos.subs(k, K), (K, 0, sp.oo)).rewrite(sp.Piecewise))
printed_inc1 = p**(n-2) * (p - q)/(1 - q)**2 * (n*(p - q)*(1 - p) + p + q - 2*p**2)
print("inc case1 n>=1:", sp.simplify(inc1_pos - printed_inc1))

inc2 = sp.simplify(sp.summation(printed2_pos.subs(k, K), (K, 1, sp.oo)).rewrite(sp.Piecewise))
printed_inc2 = p**(n-2) * (p - q) * (1 - p)**2 / (1 - q)**2 * (n*(p - q) + p + q)
print("inc case2 n>=1:", sp.simplify(inc2 - printed_inc2))

inc3 = sp.simplify(sp.summation(printed3_pos.subs(k, K), (K, 0, sp.oo)).rewrite(sp.Piecewise))
printed_inc3 = p**(n-2) * (1 - p)**2 / (1 - q)**2 * (
    n*(4*q**2*(1-p)**2 + (1-q)**2 - (1-p)) + q*(4*q*p**2 + 2 - 5*q))
print("inc case3 n>=1:", sp.simplify(inc3 - printed_inc3))

inc3_zero = sp.simplify(sp.summation(printed3_zero.subs(k, K), (K, 0, sp.oo)).rewrite(sp.Piecewise))
printed_inc3_zero = 4*p**2*q**2 * (1 - p)**2 / (1 - q)**2 / p**2
print("inc case3 n=0:", sp.simplify(inc3_zero - printed_inc3_zero))

# marginal consistency: sum_n joint(n,k) over n = P{N(s)=k} = (k(1-q)+1-2q) q^k  (s<1)
N2 = sp.symbols("N2", positive=True, integer=True)
tot3 = printed3_zero + sp.summation(printed3_pos.subs(n, N2), (N2, 1, sp.oo)).rewrite(sp.Piecewise)
marg_s_below1 = (k*(1 - q) + 1 - 2*q) * q**k
print("case3 marginal:", sp.simplify(sp.expand(tot3 - marg_s_below1)))
