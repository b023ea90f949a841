"""Generalized divisor functions, their combinatorial identities and shifted convolutions."""

from .arith import (
    FactorTable,
    build_factor_table,
    eval_basic,
    euler_phi,
    iroot,
    mobius,
    primes_up_to,
    ramanujan_sum,
)
from .asymptotics import (
    EulerValue,
    lambda_h0,
    landau_ramanujan_b0,
    omega_leading_coefficient,
    titchmarsh_constants,
    two_squares_b,
    two_squares_coeff,
)
from .characters import (
    CharGroup,
    DirichletCharacter,
    character_group,
    primitive_characters,
    primitive_characters_up_to,
)
from .correlations import (
    CharacterPool,
    CorrelationReport,
    b_chi_parameters,
    correlation_by_omega,
    correlation_report,
    delta_h,
    divisor_correlation,
    main_term,
    main_term_detail,
    main_term_shift1,
    sigma_f,
    tilde_tau,
    tilde_tau_exact,
    xi_polynomial,
)
from .divisor import (
    ClassOmega,
    Convolve,
    FunctionSpec,
    PointwiseCharTwist,
    TauZ,
    TauZTwisted,
    TwoSquaresIndicator,
    ValueTable,
    ZFold,
    ZPowOmega,
    binomial_z,
    dirichlet_convolve,
    parse_z,
    sieve_multiplicative,
    tau_z_prime_power,
    z_fold_convolution_prime_power,
)
from .errors import DomainError, ModeError, ResourceError
from .identities import (
    FriableClass,
    HBCoefficients,
    IdentityReport,
    Split,
    friable_decomposition_report,
    friable_factorize,
    hb_a_coefficients,
    hb_b_coefficients,
    hb_b_vandermonde,
    hb_coefficients,
    hb_verify,
    linnik_coefficients,
    linnik_verify,
)

__version__ = "0.1.0"

__all__ = [
    "b_chi_parameters",
    "binomial_z",
    "build_factor_table",
    "character_group",
    "CharacterPool",
    "CharGroup",
    "ClassOmega",
    "Convolve",
    "correlation_by_omega",
    "correlation_report",
    "CorrelationReport",
    "delta_h",
    "dirichlet_convolve",
    "DirichletCharacter",
    "divisor_correlation",
    "DomainError",
    "euler_phi",
    "EulerValue",
    "eval_basic",
    "FactorTable",
    "friable_decomposition_report",
    "friable_factorize",
    "FriableClass",
    "FunctionSpec",
    "hb_a_coefficients",
    "hb_b_coefficients",
    "hb_b_vandermonde",
    "hb_coefficients",
    "hb_verify",
    "HBCoefficients",
    "IdentityReport",
    "iroot",
    "lambda_h0",
    "landau_ramanujan_b0",
    "linnik_coefficients",
    "linnik_verify",
    "main_term",
    "main_term_detail",
    "main_term_shift1",
    "mobius",
    "ModeError",
    "omega_leading_coefficient",
    "parse_z",
    "PointwiseCharTwist",
    "primes_up_to",
    "primitive_characters",
    "primitive_characters_up_to",
    "ramanujan_sum",
    "ResourceError",
    "sieve_multiplicative",
    "sigma_f",
    "Split",
    "tau_z_prime_power",
    "TauZ",
    "TauZTwisted",
    "tilde_tau",
    "tilde_tau_exact",
    "titchmarsh_constants",
    "two_squares_b",
    "two_squares_coeff",
    "TwoSquaresIndicator",
    "ValueTable",
    "xi_polynomial",
    "z_fold_convolution_prime_power",
    "ZFold",
    "ZPowOmega",
]
