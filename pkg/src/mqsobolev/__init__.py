"""Maximal mean difference quotients and discrete Sobolev-type inequalities.

Fields (maximal functions, quotient fields), interpolation remainders, and
Whitney jets for functions sampled on uniform grids, with verifiers for the
pointwise inequalities that tie them together, plus the analogous machinery
on finite metric measure spaces.
"""

from .grid import (
    Grid,
    GridFunction,
    TestFunction,
    make_grid,
    sample,
    ball_indices,
    lens_indices,
    gradient,
    polynomial,
    holder_cusp,
    weierstrass,
    sin_composite,
    exponential,
    indicator,
    custom_table,
    standard_corpus,
    smooth_corpus,
)
from .maximal import (
    ScalarField,
    scalarfield_to_csv,
    centered_maximal,
    uncentered_maximal,
    one_sided_maximal,
    sandwich_check,
)
from .meanquotient import (
    MQField,
    InequalityReport,
    PreconditionError,
    lens_constant,
    mean_quotient_at,
    mq_field,
    verify_pointwise,
    lens_chain_check,
    smg_lattice_check,
    verify_minimality,
    verify_grad_domination,
    poincare_pointwise,
    poincare_integral,
    holder_check,
)
from .interpolation import (
    InterpolationScheme,
    DividedDifferenceTable,
    divided_differences,
    newton_eval,
    remainder,
    finite_difference,
    equidistant_identity_check,
    dd_limit_check,
    verify_divided_inequality,
    scheme_witness_experiment,
)
from .jets import (
    Jet,
    jet_from_function,
    taylor_field,
    tw_remainder,
    jet_derivative,
    taylor_algebra_check,
    mq_m_field,
    second_order_check,
)
from .luzin import (
    LevelSet,
    sublevel_set,
    tschebyscheff_check,
    mcshane_extend,
    mcshane_lipschitz_check,
    luzin_pipeline,
)
from .mms import (
    FiniteMetricMeasureSpace,
    build_space,
    mq_field_mms,
    doubling_constant,
    overlap_constant,
    verify_pointwise_mms,
)

__version__ = "0.1.0"
