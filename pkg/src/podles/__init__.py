"""Spectral metric toolkit for the standard Podleś sphere at finite truncation."""

from .core import (
    ConstantsMismatch,
    ModelConstants,
    PodlesElement,
    QState,
    cstar_norm,
    from_qpoly,
    generator,
    matrix_unit,
    psi_infinity,
    state_eval,
    vector_state,
)
from .dirac import DerivativeElement, d1, d1_crosscheck, deriv_norm, seminorm_L
from .metric import (
    MKResult,
    SolverConfig,
    coefficient_decay_audit,
    fiber_ball_extremal,
    interval_metric_table,
    mk_distance,
)
from .parse import ParseError, parse
from .qintegral import (
    column_extract,
    integral_horizontal,
    integral_total,
    integral_vertical,
    tail_column_bound,
)
from .qsymb import (
    NotInSphereError,
    QMonomial,
    QPolynomial,
    adjoint,
    del1_sym,
    del2_sym,
    del_e,
    del_f,
    del_k,
    eval_pi_theta,
    normal_form,
    qmul,
)
from .laurent import LaurentScalar

__version__ = "0.1.0"
