"""Hermite polynomials, chaos coefficients, diagram moments and chaotic components."""
from .coefficients import (
    ALPHA_TABLE, ZETA_TABLE, alpha_coeff, alpha_quadrature, beta_coeff, zeta_coeff,
    zeta_quadrature,
)
from .diagram import diagram_terms, hermite_product_moment
from .functionals import (
    CROSS_TERMS, CROSS_WEIGHTS, LENGTH_TERMS, LENGTH_WEIGHTS, ChaosComponent,
    cell_weights, count_component, count_integrands, count_prefactors, fourth_chaos_count,
    fourth_chaos_length, integrate_integrands, length_component, length_integrands,
    length_prefactor, normalized_gradient, second_chaos_length,
)
from .hermite import gaussian_density, hermite, hermite_table
