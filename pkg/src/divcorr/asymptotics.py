"""Leading constants of the correlation asymptotics as truncated Euler products.

Every constant is returned as an :class:`EulerValue` that records the prime
cutoff together with bounds on the omitted part and on the resulting error.
Products are accumulated as correctly rounded sums of logarithms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from .arith import primes_up_to, trial_factorize
from .divisor import ZParam, as_zparam, tau_z_prime_power
from .errors import DomainError

# zeta(2) = pi^2/6, zeta(6) = pi^6/945; zeta(3) (Apery) from its rapidly convergent
# series 5/2 sum (-1)^{n+1} / (n^3 binom(2n, n)); gamma from the Euler-Maclaurin
# expansion of H_n - log n.
ZETA2 = 1.6449340668482264365
ZETA3 = 1.2020569031595942854
ZETA6 = 1.0173430619844491397
EULER_GAMMA = 0.57721566490153286061

# theta(x) < 1.01624 x for all x > 0 (Rosser-Schoenfeld)
THETA_RATIO = 1.01624

# relative allowance for floating roundoff in the accumulated products
ROUNDOFF = 1e-13

MIN_CUTOFF = 100


@dataclass(frozen=True)
class EulerValue:
    """A truncated Euler product or prime sum.

    Attributes:
        value: the truncated value (complex or real).
        prime_cutoff: primes ``p <= prime_cutoff`` were included.
        tail_bound: bound on the omitted part (on the logarithm for products,
            on the omitted sum for additive constants).
        error_bound: resulting bound on ``|value - limit|``.
    """

    value: complex | float
    prime_cutoff: int
    tail_bound: float
    error_bound: float

    def contains(self, target: complex | float) -> bool:
        return abs(self.value - target) <= self.error_bound


def _check_cutoff(P: int, h: int) -> None:
    if h == 0:
        raise DomainError("h must be nonzero")
    top = max((p for p, _ in trial_factorize(abs(h))), default=1)
    if P < max(MIN_CUTOFF, top):
        raise DomainError(f"prime cutoff P={P} must be >= max(100, P+(h)={top})")


def _product_error(value: complex, log_tail: float) -> float:
    return abs(value) * (math.expm1(log_tail) + ROUNDOFF)


def _fsum_complex(vals) -> complex:
    vals = np.asarray(vals, dtype=np.complex128)
    return complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))


def _coprime_factor_logs(z: complex, primes: np.ndarray) -> np.ndarray:
    p = primes.astype(np.float64)
    t_pow = np.exp((z - 1) * np.log1p(-1.0 / p))
    return 1 + (t_pow - 1) / p


def lambda_local_factor(z: ZParam, p: int, ell: int) -> complex:
    """Local factor of ``lambda_{h,0}(z)`` at ``p^ell || h``.

    With ``t = 1 - 1/p``, the factor is
    ``(ell+1) t - ell t^{z+1} - t^{z+1} sum_{1 <= j < ell} (ell - j) tau_z(p^j) p^{-j}
    + t^{z-1} tau_z(p^ell) p^{-ell-1}``; for ``ell = 0`` it reduces to the
    coprime factor ``1 + (t^{z-1} - 1)/p``. It is the normalised local density
    of ``tau_z(n) tau(n + h)`` at ``p`` and equals 1 for ``z = 1``.
    """
    zc = complex(as_zparam(z))
    t = 1 - 1 / p
    tz1 = cmath.exp((zc + 1) * math.log(t))
    tzm = cmath.exp((zc - 1) * math.log(t))
    if ell == 0:
        return 1 + (tzm - 1) / p
    s = sum((ell - j) * complex(tau_z_prime_power(as_zparam(z), j)) / p**j for j in range(1, ell))
    return (ell + 1) * t - ell * tz1 - tz1 * s + tzm * complex(tau_z_prime_power(as_zparam(z), ell)) / p ** (ell + 1)


def lambda_h0(z: ZParam, h: int = 1, P: int = 100_000) -> EulerValue:
    """Leading coefficient ``lambda_{h,0}(z)`` of ``sum tau_z(n) tau(n + h)``.

    ``(1/Gamma(z)) prod_{p not| h} (1 + ((1 - 1/p)^{z-1} - 1)/p)`` times the
    local factors of :func:`lambda_local_factor` at ``p | h``. Vanishes exactly
    at non-positive integers ``z``.

    The tail uses ``|(1-1/p)^{z-1} - 1| <= s e^s`` with ``s = |z-1|/(p-1)`` and
    ``sum_{p > P} 1/(p(p-1)) <= 1/P``.
    """
    _check_cutoff(P, h)
    z = as_zparam(z)
    zc = complex(z)
    zr = zc.real
    if zc.imag == 0 and zr <= 0 and zr == int(zr):
        return EulerValue(0.0, P, 0.0, 0.0)
    rg = complex(rgamma(zc))
    hfac = dict(trial_factorize(abs(h))) if abs(h) > 1 else {}
    primes = primes_up_to(P)
    factors = _coprime_factor_logs(zc, primes)
    for i, p in enumerate(primes.tolist()):
        if p in hfac:
            factors[i] = lambda_local_factor(z, p, hfac[p])
    if np.any(factors == 0):
        return EulerValue(0.0, P, 0.0, 0.0)
    log_prod = _fsum_complex(np.log(factors))
    value = rg * cmath.exp(log_prod)
    a = abs(zc - 1)
    u = a * math.exp(a / P) / (P * (P - 1))
    if u >= 1:
        raise DomainError(f"prime cutoff P={P} too small for |z - 1| = {a}")
    tail = a * math.exp(a / P) / P / (1 - u)
    if zc.imag == 0:
        value = value.real
    return EulerValue(value, P, tail, _product_error(value, tail))


def titchmarsh_constants(h: int = 1, P: int = 100_000) -> tuple[EulerValue, EulerValue]:
    """``(C_h, C_h')`` for ``sum_{|h| < p <= x} tau(p - h) = C_h x + C_h' li(x) + ...``.

    ``C_h = zeta(2) zeta(3)/zeta(6) prod_{p | h} (1 - p/(p^2 - p + 1))`` is a
    finite product. ``C_h'`` multiplies ``C_h`` by
    ``gamma - sum_p log p/(p^2 - p + 1) + sum_{p | h} p^2 log p/((p-1)(p^2-p+1))``,
    whose prime sum is truncated at ``P``; its tail is at most
    ``2 * 1.01624 / P * P/(P - 1)`` by partial summation against ``theta``.
    """
    _check_cutoff(P, h)
    hp = [p for p, _ in trial_factorize(abs(h))] if abs(h) > 1 else []
    c1 = ZETA2 * ZETA3 / ZETA6
    ch = c1 * math.prod(1 - p / (p * p - p + 1) for p in hp)
    c_val = EulerValue(ch, max(hp, default=1), 0.0, abs(ch) * ROUNDOFF)
    primes = primes_up_to(P).astype(np.float64)
    psum = math.fsum((np.log(primes) / (primes * primes - primes + 1)).tolist())
    hsum = math.fsum(p * p * math.log(p) / ((p - 1) * (p * p - p + 1)) for p in hp)
    bracket = EULER_GAMMA - psum + hsum
    tail = 2 * THETA_RATIO / P * P / (P - 1)
    cp = bracket * ch
    cp_val = EulerValue(cp, P, tail, abs(ch) * tail + abs(cp) * ROUNDOFF)
    return c_val, cp_val


def omega_leading_coefficient(k: int, h: int = 1, P: int = 100_000) -> EulerValue:
    """Leading coefficient ``C_h/(k-1)!`` of the ``omega(n) = k`` correlation."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    c, _ = titchmarsh_constants(h, P)
    f = math.factorial(k - 1)
    return EulerValue(c.value / f, c.prime_cutoff, c.tail_bound, c.error_bound / f)


def _primes_3mod4(P: int) -> np.ndarray:
    primes = primes_up_to(P)
    return primes[primes % 4 == 3].astype(np.float64)


def landau_ramanujan_b0(P: int = 1_000_000) -> EulerValue:
    """``B_0 = 2^{-1/2} prod_{p = 3 mod 4} (1 - p^{-2})^{-1/2}``.

    Tail on the logarithm: ``(1/2) sum_{n > P} n^{-2} / (1 - P^{-2}) <= 1/(2P (1 - P^{-2}))``.
    """
    if P < MIN_CUTOFF:
        raise DomainError(f"prime cutoff must be >= {MIN_CUTOFF}")
    p = _primes_3mod4(P)
    log_prod = -0.5 * math.fsum(np.log1p(-1.0 / (p * p)).tolist())
    value = math.exp(log_prod) / math.sqrt(2)
    tail = 0.5 / (P * (1 - 1.0 / P**2))
    return EulerValue(value, P, tail, _product_error(value, tail))


def two_squares_b(h: int, P: int = 1_000_000) -> EulerValue:
    """``B(h) = (1 + chi_4(h*)/(4 h°)) prod_{p^l || h, p = 3 (4)} (1 - 1/(p+1) + (-1)^l/(p^l (p+1)))
    prod_{p = 3 (4)} (1 + p^{-2})`` with ``h° = (h, 2^inf)`` and ``h* = h/h°``.

    Tail on the logarithm: ``sum_{n > P} n^{-2} <= 1/P``.
    """
    _check_cutoff(P, h)
    h_circ = 1
    while h % (2 * h_circ) == 0:
        h_circ *= 2
    h_star = h // h_circ
    chi4 = 0 if h_star % 2 == 0 else (1 if h_star % 4 == 1 else -1)
    lead = 1 + chi4 / (4 * h_circ)
    local = 1.0
    for p, ell in trial_factorize(abs(h)) if abs(h) > 1 else []:
        if p % 4 == 3:
            local *= 1 - 1 / (p + 1) + (-1) ** ell / (p**ell * (p + 1))
    p = _primes_3mod4(P)
    log_prod = math.fsum(np.log1p(1.0 / (p * p)).tolist())
    value = lead * local * math.exp(log_prod)
    tail = 1.0 / P
    return EulerValue(value, P, tail, _product_error(value, tail))


def two_squares_coeff(h: int, P: int = 1_000_000) -> EulerValue:
    """``beta_{h,0} = B_0 B(h)``, the leading coefficient for sums of two squares."""
    b0 = landau_ramanujan_b0(P)
    bh = two_squares_b(h, P)
    value = b0.value * bh.value
    tail = b0.tail_bound + bh.tail_bound
    return EulerValue(value, P, tail, _product_error(value, tail))
