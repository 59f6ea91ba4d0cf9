#!/usr/bin/env python3
"""Regenerates the frozen reference values used across the Rust test suite.

Everything here is evaluated with 50-digit arithmetic (mpmath) and printed
with enough digits that the f64 constants in the tests are exact roundings.
The running example is the two-action instance used throughout the tests:

    actions      (a, b)
    prior        (0.5, 0.5)
    delta_u      (-2, 5)

Run: python3 scripts/reference_values.py
"""

from mpmath import mp, mpf, exp, log, sqrt

mp.dps = 50

PRIOR = [mpf("0.5"), mpf("0.5")]
DU = [mpf(-2), mpf(5)]


def gibbs(prior, du, beta):
    """Posterior ~ prior * exp(beta*du), plus its normalizer."""
    weights = [p * exp(beta * u) for p, u in zip(prior, du)]
    z = sum(weights)
    return [w / z for w in weights], z


def kl(p, q):
    return sum(pi * log(pi / qi) for pi, qi in zip(p, q) if pi > 0)


def expected(p, v):
    return sum(pi * vi for pi, vi in zip(p, v))


def n_step(prior, du, beta, n):
    """Lagged recursion: returns per-step (net, dissipated, gain) triples."""
    inc = [u / n for u in du]
    policy = list(prior)
    rows = []
    for _ in range(n):
        net = expected(policy, inc)
        nxt, z_step = gibbs(policy, inc, beta)
        gain = log(z_step) / beta if beta != 0 else net
        diss = kl(policy, nxt) / beta if beta != 0 else mpf(0)
        rows.append((net, diss, gain))
        policy = nxt
    return rows, policy


def show(label, value):
    print(f"{label:<44} {mp.nstr(value, 22)}")


print("== one-shot optimum, beta = 1 ==")
posterior, z = gibbs(PRIOR, DU, 1)
dF = log(z)
show("partition_sum", z)
show("free_energy_delta (= ln Z)", dF)
show("posterior[0]", posterior[0])
show("posterior[1]", posterior[1])
show("kl(prior || posterior)", kl(PRIOR, posterior))
show("dissipated = dF - 1.5", dF - mpf("1.5"))

print("\n== kl with the rounded posterior from the docs ==")
q = [mpf("0.000911"), mpf("0.999089")]
show("kl((0.5,0.5) || (0.000911,0.999089))", kl(PRIOR, q))

print("\n== functional at a suboptimal policy, beta = 1 ==")
p = [mpf("0.9"), mpf("0.1")]
show("expected utility", expected(p, DU))
show("kl(p || prior)", kl(p, PRIOR))
show("functional value", expected(p, DU) - kl(p, PRIOR))

print("\n== three-action expected utility ==")
show("(0.2,0.3,0.5) . (1,0,-1)", expected([mpf("0.2"), mpf("0.3"), mpf("0.5")], [mpf(1), mpf(0), mpf(-1)]))

print("\n== lagged recursion, beta = 1 ==")
for n in (1, 2, 4):
    rows, final = n_step(PRIOR, DU, 1, n)
    print(f"-- N = {n}")
    for t, (net, diss, gain) in enumerate(rows, start=1):
        print(f"  t={t}  net={mp.nstr(net, 22)}  diss={mp.nstr(diss, 22)}  gain={mp.nstr(gain, 22)}")
    show("  total net", sum(r[0] for r in rows))
    show("  total dissipated", sum(r[1] for r in rows))
    show("  total gain", sum(r[2] for r in rows))
    show("  final policy[1]", final[1])

rows, _ = n_step(PRIOR, DU, 1, 1000)
show("N=1000 total dissipated", sum(r[1] for r in rows))

print("\n== lagged recursion, beta = 5, N = 4 ==")
rows, _ = n_step(PRIOR, DU, 5, 4)
d1 = rows[0][1]
tail = sum(r[1] for r in rows[1:])
show("step-1 dissipated", d1)
show("steps 2..4 dissipated", tail)
show("tail / step-1 ratio", tail / d1)

print("\n== step-1 dissipation across the default beta grid, N = 4 ==")
for beta in (mpf(0), mpf("0.25"), mpf("0.5"), mpf(1), mpf(2), mpf(5)):
    if beta == 0:
        show(f"beta={beta}", mpf(0))
    else:
        rows, _ = n_step(PRIOR, DU, beta, 4)
        show(f"beta={beta}", rows[0][1])

print("\n== path-measure mean utility, beta = 1, N = 4 ==")
# Exact mean of the sampled path utility: sum_t E_{p_(t-1)}[du/N].
rows, _ = n_step(PRIOR, DU, 1, 4)
mean_w = sum(r[0] for r in rows)
show("exact mean path utility", mean_w)
show("free energy delta (gap reference)", dF)

# Exact second moment of exp(beta*W) for the MC variance sanity check:
# W = sum_t inc(x_t) with x_t independent across steps under p_(t-1).
inc = [u / 4 for u in DU]
policies = [PRIOR]
for _ in range(3):
    nxt, _ = gibbs(policies[-1], inc, 1)
    policies.append(nxt)
m1 = mpf(1)
m2 = mpf(1)
for pol in policies:
    m1 *= sum(pi * exp(ui) for pi, ui in zip(pol, inc))
    m2 *= sum(pi * exp(2 * ui) for pi, ui in zip(pol, inc))
show("E[exp(W)]  (= exp(dF))", m1)
show("Var[exp(W)]", m2 - m1 * m1)
show("SE at 1e5 samples", sqrt((m2 - m1 * m1) / mpf(100000)))

print("\n== beta -> 0 continuity, N = 4 ==")
for beta in (mpf("1e-8"), mpf("-1e-8")):
    rows, _ = n_step(PRIOR, DU, beta, 4)
    show(f"total net at beta={beta}", sum(r[0] for r in rows))
show("total net at beta=0", mpf("1.5"))
