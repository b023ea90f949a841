"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import oracles  # noqa: E402
from divcorr import (  # noqa: E402
    CharacterPool,
    FriableClass,
    TauZ,
    TauZTwisted,
    TwoSquaresIndicator,
    build_factor_table,
    character_group,
    correlation_report,
    delta_h,
    dirichlet_convolve,
    divisor_correlation,
    friable_factorize,
    hb_b_coefficients,
    hb_b_vandermonde,
    hb_verify,
    lambda_h0,
    landau_ramanujan_b0,
    linnik_coefficients,
    linnik_verify,
    sieve_multiplicative,
    sigma_f,
    tilde_tau,
    titchmarsh_constants,
    xi_polynomial,
    z_fold_convolution_prime_power,
)
from divcorr.correlations import correlation_by_omega_all  # noqa: E402
from divcorr.divisor import convolution_power  # noqa: E402

C1_REFERENCE = 1.9435964368207592051
B0_REFERENCE = 0.7642236535


def _criterion_1():
    table = build_factor_table(10**4)
    cases = [(0, 1, 2, 3), (1, 0, 1, 2), (1, 1, 3, 2), (2, 1, 2, 3)]
    details, ok = [], True
    for r, u, v, K in cases:
        for sign in (1, -1):
            if sign < 0 and r == 0:
                continue
            t0 = time.perf_counter()
            rep = hb_verify(r, u, v, K, 10**4, "exact", sign, table)
            dt = time.perf_counter() - t0
            ok &= rep.max_abs_deviation == 0 and isinstance(rep.max_abs_deviation, (int, Fraction)) and dt < 60
            details.append(f"{(r, u, v, K)}{'+' if sign > 0 else '-'}:{rep.max_abs_deviation}/{dt:.1f}s")
    return ok, "; ".join(details)


def _criterion_2():
    table = build_factor_table(10**4)
    bases = {"chi1": character_group(1)[0], "chi3": character_group(3)[1]}
    zs = [Fraction(1, 2), Fraction(-1), complex(0.5, 0.3)]
    t0 = time.perf_counter()
    ok, worst_float = True, 0.0
    for name, chi in bases.items():
        for z in zs:
            for K in (2, 4):
                rep = linnik_verify(TauZTwisted(1, chi), z, K, 10**4, table=table)
                if isinstance(z, complex):
                    ok &= rep.mode == "float" and rep.max_abs_deviation < 1e-9
                    worst_float = max(worst_float, rep.max_abs_deviation)
                else:
                    ok &= rep.mode == "exact" and rep.max_abs_deviation == 0
    dt = time.perf_counter() - t0
    ok &= dt < 120
    return ok, f"exact cases 0, worst float {worst_float:.2e}, {dt:.1f}s total"


def _criterion_3():
    mismatches = 0
    cases = 0
    for K in range(1, 7):
        for v in range(1, 9):
            for u in range(v):
                for N in range(4):
                    cases += 1
                    if hb_b_coefficients(K, N, u, v) != hb_b_vandermonde(K, N, u, v):
                        mismatches += 1
    rng = np.random.default_rng(20240611)
    worst = 0.0
    for _ in range(100):
        radius = 4 * math.sqrt(rng.random())
        z = radius * complex(math.cos(a := 2 * math.pi * rng.random()), math.sin(a))
        K = int(rng.integers(1, 9))
        worst = max(worst, abs(sum(linnik_coefficients(z, K)) - 1))
    ok = mismatches == 0 and worst < 1e-12
    return ok, f"{cases} b-grids, {mismatches} mismatches; max |sum c - 1| = {worst:.1e}"


def _criterion_4():
    pools: dict[int, CharacterPool] = {}
    worst, count = 0.0, 0
    for h in (1, -1, 2, -2, 3):
        for n in range(1, 5001):
            m = n - h
            if m < 1 or math.isqrt(m) ** 2 == m:
                continue
            R = math.isqrt(m) + 2  # ceil(sqrt(m)) + 1 for non-square m
            pool = pools.setdefault(R, CharacterPool(R))
            worst = max(worst, abs(delta_h(n, h, R, pool)))
            count += 1
    a1, a4 = tilde_tau(11, 1, 1), tilde_tau(11, 1, 4)
    ok = worst < 1e-9 and abs(a1 - 5) < 1e-12 and abs(a4 - 4) < 1e-12
    return ok, f"{count} points, max |Delta| = {worst:.1e}; tau~_1(11;1) = {a1:.12g}, tau~_1(11;4) = {a4:.12g}"


def _criterion_5():
    table = build_factor_table(10**5)
    tau2 = sieve_multiplicative(TauZ(2), 10**5, table, "exact")
    ref = oracles.divisor_count_table(10**5)
    ok_tau = list(tau2.values[1:]) == ref[1:]
    half = sieve_multiplicative(TauZ(Fraction(1, 2)), 2000, table, "exact")
    prod = dirichlet_convolve(half, half)
    ok_half = all(v == 1 for v in prod.values[1:])
    f = TauZTwisted(Fraction(1, 3), character_group(5)[2])
    base = sieve_multiplicative(f, 10**4, table, "float")
    worst = 0.0
    checked = 0
    for k in (2, 3):
        power = convolution_power(base, k)
        for p in table.primes.tolist():
            if p > 10**4:
                break
            nu = 1
            while p**nu <= 10**4:
                worst = max(worst, abs(z_fold_convolution_prime_power(f, k, p, nu) - power[p**nu]))
                checked += 1
                nu += 1
    ok = ok_tau and ok_half and worst < 1e-12
    return ok, f"tau_2 {'ok' if ok_tau else 'MISMATCH'}; tau_1/2^2 = 1 {'ok' if ok_half else 'MISMATCH'}; z-fold {checked} prime powers, max dev {worst:.1e}"


def _criterion_6():
    c1 = titchmarsh_constants(1, 10**5)[0].value
    b0 = landau_ramanujan_b0(10**6)
    b0_hi = landau_ramanujan_b0(10**7)
    lam2 = lambda_h0(2, 1, 10**5)
    lam0, lam_m1 = lambda_h0(0).value, lambda_h0(-1).value
    ok = (
        abs(c1 - C1_REFERENCE) < 1e-9
        and abs(b0.value - B0_REFERENCE) <= 1e-6
        and abs(b0_hi.value - b0.value) <= b0.error_bound
        and lam2.contains(6 / math.pi**2)
        and lam0 == 0
        and lam_m1 == 0
    )
    return ok, (
        f"C_1 = {c1:.15g}; B_0(1e6) = {b0.value:.12g} (bound {b0.error_bound:.1e}, gap to 1e7 {abs(b0_hi.value - b0.value):.1e}); "
        f"lambda(2) - 6/pi^2 = {lam2.value - 6 / math.pi**2:.1e} (bound {lam2.error_bound:.1e}); lambda(0) = {lam0}, lambda(-1) = {lam_m1}"
    )


def _criterion_7():
    t0 = time.perf_counter()
    r1 = correlation_report(TauZ(1), 10**6, 1, 1, 1, mode="exact")
    r2 = correlation_report(TwoSquaresIndicator(), 10**6, 1, 1, 4, mode="exact")
    dt = time.perf_counter() - t0
    partials = {k: float(v) for k, v in r2.partials.items()}
    ok = (
        r1.normalized_gap < 0.01
        and r2.normalized_gap < 0.02
        and len(partials) == 2
        and all(v != 0 for v in partials.values())
        and dt < 600
    )
    return ok, (
        f"f=1 gap {r1.normalized_gap:.2e}; two squares gap {r2.normalized_gap:.2e}, "
        f"partials {', '.join(f'{k}: {v:.6g}' for k, v in sorted(partials.items()))}; {dt:.1f}s"
    )


def _criterion_8():
    x = 10**5
    table = build_factor_table(x + 1)
    mu = sieve_multiplicative(TauZ(-1), x, table, "float")
    vals = {R: abs(sigma_f(mu, x // 2, x, 1, 1, R, table)) for R in (2, 4, 8, 16)}
    ok = vals[16] < vals[2] and vals[16] / x < 0.05
    return ok, "|Sigma|: " + ", ".join(f"R={R}: {v:.4g}" for R, v in vals.items()) + f"; |Sigma(16)|/x = {vals[16] / x:.4f}"


def _criterion_9():
    x = 10**4
    table = build_factor_table(x)
    parts = correlation_by_omega_all(x, 1, table)
    total = divisor_correlation(TauZ(1), x, 1, 1, table)
    ok = sum(parts.values()) == total
    xi_ok = True
    for z in (Fraction(-1), Fraction(1, 2), Fraction(2)):
        xi = xi_polynomial(x, 1, z, table)
        xi_ok &= isinstance(xi, (int, Fraction)) and xi == sum(z**k * v for k, v in parts.items())
    return ok and xi_ok, f"sum_k = {sum(parts.values())}, D = {total}; Xi coherence at -1, 1/2, 2: {'exact' if xi_ok else 'MISMATCH'}"


def _criterion_10():
    table = build_factor_table(10**4)
    lpf = table.largest_prime_factor
    bad = 0
    counts = {}
    for y, w in ((10, 50), (31, 100)):
        c = {"I": 0, "triv": 0, "split": 0}
        for n in range(1, 10**4 + 1):
            if lpf[n] > y:
                continue
            cls = friable_factorize(n, y, w, table)
            fac = oracles.naive_factor(n)
            if n <= w:
                bad += cls is not FriableClass.SIGMA_I
                c["I"] += 1
            elif any(p**k > y for p, k in fac):
                bad += cls is not FriableClass.SIGMA_TRIV
                c["triv"] += 1
            else:
                c["split"] += 1
                if isinstance(cls, FriableClass):
                    bad += 1
                    continue
                n1, n2 = cls
                f1 = oracles.naive_factor(n1)
                q_top = f1[-1][0] ** f1[-1][1]
                p_min2 = oracles.naive_factor(n2)[0][0] if n2 > 1 else math.inf
                bad += oracles.friable_split_brute(n, w) != [(n1, n2)]
                bad += not (w < n1 <= w * q_top and f1[-1][0] < p_min2)
        counts[(y, w)] = c
    return bad == 0, f"{bad} violations; class sizes {counts}"


CRITERIA = {
    1: ("Heath-Brown identity exact", _criterion_1),
    2: ("Linnik identity", _criterion_2),
    3: ("coefficient cross-checks", _criterion_3),
    4: ("kernel property", _criterion_4),
    5: ("oracle equivalence", _criterion_5),
    6: ("constants", _criterion_6),
    7: ("main-term agreement", _criterion_7),
    8: ("Sigma_f decay scan", _criterion_8),
    9: ("Titchmarsh partition", _criterion_9),
    10: ("friable factorization", _criterion_10),
}


def _run(number):
    name, fn = CRITERIA[number]
    ok, detail = fn()
    return ok, f"{'PASS' if ok else 'FAIL'} criterion {number} ({name}): {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = _run(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    failures = 0
    for number in sorted(CRITERIA):
        ok, line = _run(number)
        print(line, flush=True)
        failures += not ok
    sys.exit(1 if failures else 0)
