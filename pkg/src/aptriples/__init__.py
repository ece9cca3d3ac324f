"""Prime triples with almost-prime shifts for floor-power equations.

Finds and certifies prime solutions of [p1^c] + [p2^c] + [p3^c] = N with each
p_i + 2 an r-almost prime, and implements the finite checkable objects behind
the existence proof: level-D sieve weights, the three-dimensional vector-sieve
lower bound, exponential sums over primes, the archimedean density integral,
and the main-term calculus, each paired with an independent oracle.
"""

from .arith import (
    CertifiedFloor,
    PrimeTable,
    big_omega,
    dist_to_nearest_int,
    floor_power,
    is_almost_prime,
    sieve_primes,
)
from .circle import (
    ExpSumSample,
    GammaReport,
    b1_density,
    b1_oscillatory,
    cm_coeff,
    fourier_expansion_error,
    gamma_exact,
    gamma_segment,
    h_sum,
    i_alpha,
    l_weighted,
    mean_square,
    min_sum,
    predicted_main_term,
    vdc_ratio,
)
from .params import ProblemParams, derive_params, desk_params, r_bound, validate
from .sieve import (
    RosserWeights,
    SieveSums,
    SieveSupport,
    F_of,
    build_weights,
    f_of,
    fundamental_inequality_check,
    make_support,
    sieve_sums,
    vector_sieve_lower,
)
from .solver import SolutionTriple, SolveResult, build_index, scan, solve, verify

__version__ = "0.1.0"
