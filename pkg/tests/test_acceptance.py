"""Acceptance criteria.

Each test prints one ``PASS`` or ``FAIL`` line with the measured worst-case
deviation; the lines are repeated in the pytest terminal summary. Run with
``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import time

import numpy as np
from scipy.optimize import minimize_scalar

from nscq import capacities as cap
from nscq import channels as ch
from nscq import divergences as dv
from nscq import exponents as ex
from nscq import herm
from nscq import oneshot as osh

RESULTS = []


def report(num, ok, detail, elapsed):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num:2d}: {detail} ({elapsed:.1f} s)"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _random_channels(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        k, d = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        out.append(ch.random_cq_channel(k, d, rng))
    return out


CHANNELS = _random_channels(50, 20260101)
MS = (2, 3, 4)


def test_01_strong_duality():
    t0 = time.time()
    worst_mc = worst_ns = 0.0
    for w in CHANNELS:
        for m in MS:
            worst_mc = max(worst_mc, abs(osh.eps_mc(m, w) - osh.eps_mc_dual(m, w).value))
            worst_ns = max(worst_ns, abs(osh.eps_ns(m, w)
                                         - osh.eps_ns_dual_hermitian(m, w).value))
    el = time.time() - t0
    report(1, worst_mc <= 1e-5 and worst_ns <= 1e-5 and el < 300,
           f"strong duality, max |mc - dual| = {worst_mc:.2e}, "
           f"max |ns - dual| = {worst_ns:.2e} over {len(CHANNELS)} channels x M in {MS}", el)


def test_02_activation_identity():
    t0 = time.time()
    worst = max(osh.activation_identity_check(m, w)[2] for w in CHANNELS for m in MS)
    report(2, worst <= 1e-5, f"activation identity, max deviation = {worst:.2e}",
           time.time() - t0)


def test_03_classical_collapse():
    t0 = time.time()
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(20):
        k, y = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        w = ch.classical_embed(ch.random_stochastic(y, k, rng))
        m = MS[i % 3]
        worst = max(worst, abs(osh.eps_ns(m, w) - osh.eps_mc(m, w)))
    report(3, worst <= 1e-6, f"classical collapse, max |ns - mc| = {worst:.2e} on 20 channels",
           time.time() - t0)


def test_04_finite_n_sandwich():
    t0 = time.time()
    chans = [ch.bsc(0.2), ch.random_cq_channel(2, 2, np.random.default_rng(4))]
    lower_slack = upper_slack = np.inf
    alphas = np.linspace(0.01, 0.99, 99)
    for w in chans:
        r = 0.5 * cap.holevo_capacity(w).value
        for n in (1, 2, 3):
            val = osh.eps_ns(np.exp(n * r), ch.tensor_with_ideal_bit(ch.tensor_power(w, n)))
            low = ex.spb_finite_n_lower(w, n, r).value
            up = min(ex.achievability_bound(w, n, r, a) for a in alphas)
            lower_slack = min(lower_slack, val - low)
            upper_slack = min(upper_slack, up - val)
    el = time.time() - t0
    report(4, lower_slack >= -1e-7 and upper_slack >= -1e-7 and el < 600,
           f"finite-n sandwich, min slack lower = {lower_slack:.2e}, "
           f"upper = {upper_slack:.2e}", el)


def _bsc_renyi(delta, a):
    inner = (0.5 * (1 - delta) ** a + 0.5 * delta ** a) ** (1 / a)
    return a / (a - 1) * np.log(2 * inner)


def _scalar_exponent(delta, r):
    def f(u):
        a = np.exp(u)
        return -(1 - a) / a * (_bsc_renyi(delta, a) - r)

    us = np.linspace(np.log(1e-4), -1e-9, 4000)
    i = int(np.argmin([f(u) for u in us]))
    res = minimize_scalar(f, bounds=(us[max(i - 1, 0)], us[min(i + 1, len(us) - 1)]),
                          method="bounded", options=dict(xatol=1e-12))
    return max(0.0, -res.fun)


def test_05_sphere_packing_oracle():
    t0 = time.time()
    w = ch.bsc(0.1)
    c = cap.holevo_capacity(w).value
    rates = np.linspace(0.0, c, 12)[1:-1]
    worst = max(abs(ex.eans_exponent(w, r).E - _scalar_exponent(0.1, r)) for r in rates)
    report(5, worst <= 1e-4, f"BSC(0.1) sphere packing vs scalar oracle, max error = "
           f"{worst:.2e} at 10 rates", time.time() - t0)


def test_06_divergence_inequalities():
    t0 = time.time()
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(500):
        d = int(rng.integers(2, 4))
        rho = herm.random_density(d, rng, rank=int(rng.integers(1, d + 1)))
        sig = herm.random_density(d, rng)
        for a in (0.5, 0.6, 0.7, 0.8, 0.9, 0.95):
            top = dv.sandwiched(rho, sig, a) / a
            mid = dv.sandwiched(rho, sig, 1 / (2 - a))
            worst = max(worst, mid - top, dv.petz(rho, sig, a) - mid)
        for a in (1.1, 1.3, 1.5, 1.7, 1.9):
            worst = max(worst, dv.petz(rho, sig, 2 - 1 / a) - dv.sandwiched(rho, sig, a))
        x, y = rho * rng.uniform(0.1, 3), sig * rng.uniform(0.1, 3)
        tmin = herm.trace_ncmin(x, y)
        for a in np.arange(1, 10) / 10:
            worst = max(worst, tmin - np.trace(herm.frac_power(x, a)
                                               @ herm.frac_power(y, 1 - a)).real)
        a2, b2 = herm.random_density(d, rng), herm.random_density(d, rng)
        mid = herm.trace_ncmin((x + a2) / 2, (y + b2) / 2)
        worst = max(worst, 0.5 * tmin + 0.5 * herm.trace_ncmin(a2, b2) - mid)
        for beta in (0.5, 0.6, 0.7, 0.8, 0.9, 0.99):
            kp = herm.frac_power(sig, (1 - beta) / (2 * beta))
            lhs = np.sum(np.clip(np.linalg.eigvalsh(kp @ rho @ kp), 0, None) ** beta)
            rhs = np.trace(herm.frac_power(rho, beta) @ herm.frac_power(sig, 1 - beta)).real
            worst = max(worst, rhs - lhs)
    report(6, worst <= 1e-8, f"divergence inequalities on 500 pairs, worst violation = "
           f"{worst:.2e}", time.time() - t0)


def test_07_nussbaum_szkola():
    t0 = time.time()
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(500):
        d = int(rng.integers(1, 5))
        rho, sig = herm.random_density(d, rng), herm.random_density(d, rng)
        a = rng.uniform(0.01, 0.99)
        pair = ex.nussbaum_szkola(rho, sig)
        lhs = np.sum(pair.p ** a * pair.q ** (1 - a))
        rhs = np.trace(herm.frac_power(rho, a) @ herm.frac_power(sig, 1 - a)).real
        worst = max(worst, abs(lhs - rhs))
    worst_t = 0.0
    for _ in range(100):
        r1, r2, s1, s2 = (herm.random_density(2, rng) for _ in range(4))
        e = [herm.eigh(x) for x in (r1, r2, s1, s2)]
        big = ex.nussbaum_szkola(
            np.kron(r1, r2), np.kron(s1, s2),
            rho_eig=(np.kron(e[0][0], e[1][0]), np.kron(e[0][1], e[1][1])),
            sigma_eig=(np.kron(e[2][0], e[3][0]), np.kron(e[2][1], e[3][1])))
        f1 = ex.nussbaum_szkola(r1, s1, e[0], e[2])
        f2 = ex.nussbaum_szkola(r2, s2, e[1], e[3])
        prod = ex.product_pair([f1, f2])
        # product index (i1 j1 i2 j2) versus (i1 i2 j1 j2) of the joint pair
        perm = np.arange(16).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).ravel()
        worst_t = max(worst_t, np.max(np.abs(big.p[perm] - prod.p)),
                      np.max(np.abs(big.q[perm] - prod.q)))
    ok = worst <= 1e-9 and worst_t <= 1e-12
    report(7, ok, f"Nussbaum-Szkola identity max error = {worst:.2e}, "
           f"tensorization max error = {worst_t:.2e}", time.time() - t0)


def test_08_sibson_identity_and_additivity():
    t0 = time.time()
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(100):
        k, d = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        w = ch.random_cq_channel(k, d, rng)
        p = rng.dirichlet(np.ones(k))
        a = rng.uniform(0.05, 0.95)
        direct = dv.renyi_mutual_info(ch.joint_state(p, w), np.diag(p), (k, d), a)[0]
        worst = max(worst, abs(direct - cap.sibson_objective(p, w, a)))
    worst_add = 0.0
    for _ in range(50):
        rho, tau = herm.random_density(4, rng), herm.random_density(2, rng)
        a = rng.uniform(0.05, 0.95)
        one = dv.renyi_mutual_info(rho, tau, (2, 2), a)[0]
        big = np.kron(rho, rho).reshape([2] * 8).transpose(0, 2, 1, 3, 4, 6, 5, 7)
        two = dv.renyi_mutual_info(big.reshape(16, 16), np.kron(tau, tau), (4, 4), a)[0]
        worst_add = max(worst_add, abs(two - 2 * one))
    report(8, worst <= 1e-5 and worst_add <= 1e-5,
           f"Sibson closed form vs direct max error = {worst:.2e}, "
           f"additivity max error = {worst_add:.2e}", time.time() - t0)


def test_09_pure_output_critical_rate():
    t0 = time.time()
    rng = np.random.default_rng(9)
    worst_gap = -np.inf
    worst_schatten = 0.0
    for _ in range(20):
        k, d = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        rep = ex.pure_state_check(ch.random_cq_channel(k, d, rng, rank=1))
        worst_gap = max(worst_gap, rep.critical_rate_new - rep.c0)
        worst_schatten = max(worst_schatten, rep.schatten_max_error)
    report(9, worst_gap <= 1e-4 and worst_schatten <= 1e-6,
           f"pure outputs, max (r'_c - C0) = {worst_gap:.2e}, "
           f"Schatten identity max error = {worst_schatten:.2e}", time.time() - t0)


def test_10_chebyshev_good_sets():
    t0 = time.time()
    rng = np.random.default_rng(10)
    least = np.inf
    for i in range(50):
        pair = ex.nussbaum_szkola(herm.random_density(2, rng), herm.random_density(2, rng))
        v = ex.tilted(pair, rng.uniform(0.05, 0.95))
        least = min(least, ex.good_set_mass(v, pair.p, 1 + i % 6))
    report(10, least >= 0.75, f"Chebyshev good sets, min mass = {least:.4f} on 50 instances",
           time.time() - t0)


def _young_grid(c, a):
    top = 10 * c ** (1 / a) + 1
    s = np.geomspace(1e-14 * top, top, 20001)
    f = s ** (1 - a) * c - s
    i = int(np.argmax(f))
    res = minimize_scalar(lambda x: -(x ** (1 - a) * c - x),
                          bounds=(s[max(i - 1, 0)], s[min(i + 1, len(s) - 1)]),
                          method="bounded", options=dict(xatol=1e-15 * top))
    return max(f[i], -res.fun)


def test_11_young_identity():
    t0 = time.time()
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        c, a = rng.uniform(0.05, 3.0), rng.uniform(0.05, 0.95)
        closed = ex.young_sup(c, a)[0]
        worst = max(worst, abs(_young_grid(c, a) - closed) / max(1.0, closed))
    report(11, worst <= 1e-6, f"Young identity, max error = {worst:.2e} on 1000 samples",
           time.time() - t0)


def test_12_quantum_cross_representation():
    t0 = time.time()
    worst = 0.0
    for i, w in enumerate(CHANNELS[:10]):
        m = MS[i % 3]
        worst = max(worst, abs(osh.eps_mc_quantum(m, ch.choi_of_cq(w)).value - osh.eps_mc(m, w)))
    worst_ach = 0.0
    for w in [ch.bsc(0.1)] + CHANNELS[:2]:
        r = 0.5 * cap.holevo_capacity(w).value
        for a in (0.3, 0.7):
            val = ex.quantum_achievability(ch.choi_of_cq(w), r, a)[0]
            worst_ach = max(worst_ach, abs(val - (1 - a) / a * (cap.capacity_value(w, a) - r)))
    report(12, worst <= 1e-4 and worst_ach <= 1e-4,
           f"quantum MC vs CQ MC max error = {worst:.2e}, "
           f"quantum achievability vs CQ formula max error = {worst_ach:.2e}", time.time() - t0)


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
