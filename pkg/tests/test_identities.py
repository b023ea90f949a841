import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divcorr import (
    DomainError,
    FriableClass,
    Split,
    TauZ,
    TauZTwisted,
    build_factor_table,
    character_group,
    friable_decomposition_report,
    friable_factorize,
    hb_a_coefficients,
    hb_b_coefficients,
    hb_b_vandermonde,
    hb_coefficients,
    hb_verify,
    linnik_coefficients,
    linnik_verify,
    sieve_multiplicative,
)
from divcorr.identities import HBCoefficients, admissible_splits

import oracles


@pytest.fixture(scope="module")
def table():
    return build_factor_table(10**4)


# --------------------------------------------------------------------------
# coefficients


def test_b_examples():
    assert hb_b_coefficients(1, 0, 0, 1) == [-1]
    assert hb_b_coefficients(2, 0, 1, 2) == [Fraction(-3, 2), Fraction(1, 2)]


def test_b_first_row_sums_to_minus_one():
    assert sum(hb_b_coefficients(3, 0, 1, 3)) == -1


def test_a_examples():
    c = hb_coefficients(1, 0, 0, 1)
    assert c.a == {1: -1}
    assert hb_coefficients(2, 1, 1, 2).degree == 5
    assert max(hb_coefficients(2, 1, 1, 2).a) == 5


def test_a_expansion_reconstructs_polynomial():
    c = hb_coefficients(3, 1, 2, 5)
    for X in (Fraction(3, 2), Fraction(-2), Fraction(7, 5)):
        lhs = sum(am * (X - 1) ** m for m, am in c.a.items())
        rhs = 1 + X ** (c.N * c.v) * sum(b * X ** (l * c.v - c.u) for l, b in enumerate(c.b, start=1))
        assert lhs == rhs


def test_a_detects_bad_coefficients():
    bad = HBCoefficients(2, 0, 1, 2, (Fraction(-1), Fraction(0)))
    with pytest.raises(ArithmeticError):
        hb_a_coefficients(bad)


@pytest.mark.parametrize("args", [(2, 0, 2, 2), (1, 0, -1, 2), (0, 0, 0, 1), (2, -1, 0, 1)])
def test_b_rejects_bad_parameters(args):
    with pytest.raises(DomainError):
        hb_b_coefficients(*args)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 3), st.integers(1, 8), st.data())
def test_closed_form_equals_vandermonde(K, N, v, data):
    u = data.draw(st.integers(0, v - 1))
    assert hb_b_coefficients(K, N, u, v) == hb_b_vandermonde(K, N, u, v)
    hb_coefficients(K, N, u, v)


def test_linnik_small_cases():
    assert linnik_coefficients(Fraction(3, 7), 1) == [1]
    z = Fraction(2, 9)
    assert linnik_coefficients(z, 2) == [1 - z, z]


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False), st.integers(1, 8))
def test_linnik_sum_is_one(z, K):
    assert abs(sum(linnik_coefficients(z, K)) - 1) < 1e-12


@pytest.mark.parametrize("K", [2, 4, 6])
def test_linnik_integer_z_vanishing(K):
    for j in range(K):
        c = linnik_coefficients(j, K)
        assert all(cl == 0 for cl in c[j + 1 :])
        assert sum(c) == 1


# --------------------------------------------------------------------------
# identity verification


def test_hb_mobius_decomposition(table):
    rep = hb_verify(1, 0, 1, 2, 1000, "exact", sign=-1, table=table)
    assert rep.max_abs_deviation == 0 and rep.worst_n is None


def test_hb_trivial_collapse(table):
    rep = hb_verify(1, 0, 1, 1, 100, "exact", table=table)
    assert rep.exact_zero


def test_hb_float_mode(table):
    rep = hb_verify(0, 2, 3, 3, 3000, "float", table=table)
    assert rep.max_abs_deviation < 1e-10


@pytest.mark.parametrize("r, u, v, K", [(0, 1, 3, 2), (2, 3, 4, 2), (1, 1, 2, 4)])
@pytest.mark.parametrize("sign", [1, -1])
def test_hb_exact_various(table, r, u, v, K, sign):
    if sign < 0 and r == 0:
        pytest.skip("negative case needs r >= 1")
    assert hb_verify(r, u, v, K, 3000, "exact", sign, table).exact_zero


def test_hb_wrong_sign_detected(table):
    """Flipping the coefficients must break the identity: the check has teeth."""
    from divcorr.divisor import dirichlet_convolve, linear_combination

    x = 500
    y = math.isqrt(x)
    g = sieve_multiplicative(TauZ(Fraction(-1, 2)), x, table, "exact").truncate(y)
    lhs = sieve_multiplicative(TauZ(Fraction(1, 2)), x, table, "exact")
    b = hb_b_coefficients(2, 0, 1, 2)
    terms = []
    gp = g
    for l in range(1, 3):
        t = sieve_multiplicative(TauZ(l), x, table, "exact")
        terms.append(dirichlet_convolve(t, gp))
        gp = dirichlet_convolve(gp, dirichlet_convolve(g, g))
    wrong = linear_combination(terms, list(b))
    assert wrong.max_abs_difference(lhs)[0] != 0


def test_hb_parameter_errors(table):
    with pytest.raises(DomainError):
        hb_verify(0, 1, 2, 2, 100, "exact", sign=-1, table=table)
    with pytest.raises(DomainError):
        hb_verify(0, 2, 2, 2, 100, "exact", table=table)
    with pytest.raises(DomainError):
        hb_verify(0, 1, 2, 2, 1, "exact", table=table)


def test_hb_degenerate_cutoff_warns(table):
    with pytest.warns(UserWarning):
        rep = hb_verify(0, 1, 2, 5, 20, "exact", table=table)
    assert rep.exact_zero


def test_linnik_k1_trivial(table):
    chi1 = character_group(1)[0]
    rep = linnik_verify(TauZTwisted(1, chi1), Fraction(5, 3), 1, 1000, table=table)
    assert rep.exact_zero


def test_linnik_complex_principal(table):
    chi1 = character_group(1)[0]
    rep = linnik_verify(TauZTwisted(1, chi1), complex(0.5, 0.3), 4, 10**4, table=table)
    assert rep.mode == "float" and rep.max_abs_deviation < 1e-9


def test_linnik_exact_chi3(table):
    chi3 = character_group(3)[1]
    rep = linnik_verify(TauZTwisted(1, chi3), Fraction(1, 2), 3, 5000, table=table)
    assert rep.mode == "exact" and rep.exact_zero


def test_linnik_general_base(table):
    rep = linnik_verify(TauZ(Fraction(2, 3)), Fraction(-3, 2), 3, 3000, table=table)
    assert rep.exact_zero


# --------------------------------------------------------------------------
# friable factorization


def test_friable_examples(table):
    assert friable_factorize(6, 7, 10, table) is FriableClass.SIGMA_I
    assert friable_factorize(9, 5, 2, table) is FriableClass.SIGMA_TRIV
    # 12 = 4 * 3 has 2^2 > y = 3, so it is trivial; (4, 3) is its only admissible split
    assert friable_factorize(12, 3, 2, table) is FriableClass.SIGMA_TRIV
    assert admissible_splits(12, 2, table) == [Split(4, 3)]
    assert oracles.friable_split_brute(12, 2) == [(4, 3)]
    assert friable_factorize(12, 4, 2, table) == Split(4, 3)


def test_friable_rejects_rough(table):
    with pytest.raises(DomainError):
        friable_factorize(22, 10, 5, table)
    with pytest.raises(DomainError):
        friable_factorize(6, 1, 5, table)


@pytest.mark.parametrize("y, w", [(10, 50), (31, 100), (7, 7)])
def test_friable_partition_and_uniqueness(table, y, w):
    lpf = table.largest_prime_factor
    for n in range(1, 10**4 + 1):
        if lpf[n] > y:
            continue
        cls = friable_factorize(n, y, w, table)
        fac = oracles.naive_factor(n)
        in_i = n <= w
        in_triv = n > w and any(p**k > y for p, k in fac)
        if in_i:
            assert cls is FriableClass.SIGMA_I
        elif in_triv:
            assert cls is FriableClass.SIGMA_TRIV
        else:
            n1, n2 = cls
            assert oracles.friable_split_brute(n, w) == [(n1, n2)]
            assert w < n1 <= w * oracles.naive_factor(n1)[-1][0] ** oracles.naive_factor(n1)[-1][1]
            assert n1 <= y * w
            assert math.gcd(n1, n2) == 1


def test_friable_report_everything_type_one(table):
    f = sieve_multiplicative(TauZ(2), 500, table, "exact")
    g = np.ones(501, dtype=np.int64)
    rep = friable_decomposition_report(f, g, 500, 500, 500, table)
    assert rep.residual == 0 and rep.sum_I == rep.sum_total and rep.split_count == 0


def test_friable_report_counts(table):
    x, y, w = 10**4, 10, 50
    f = sieve_multiplicative(TauZ(1), x, table, "exact")
    g = np.ones(x + 1, dtype=np.int64)
    rep = friable_decomposition_report(f, g, y, w, x, table)
    count = 0
    for n in range(1, x + 1):
        fac = oracles.naive_factor(n)
        if fac and fac[-1][0] > y:
            continue
        if n > w and all(p**k <= y for p, k in fac):
            count += 1
    assert rep.residual == count == rep.split_count == rep.split_mass


def test_friable_report_multiplicative_weights(table):
    x = 3000
    f = sieve_multiplicative(TauZ(Fraction(-1, 2)), x, table, "exact")
    g = np.arange(x + 1) % 7
    rep = friable_decomposition_report(f, g, 13, 40, x, table)
    assert rep.residual == rep.split_mass
