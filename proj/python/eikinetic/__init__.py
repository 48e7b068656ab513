"""Unit-norm gradient fields and their kinetic formulation."""

from ._eikinetic import (
    DirectionScheme,
    DirectionSet,
    Error,
    FieldClass,
    GridSpec,
    ResidualReport,
    ScalarField,
    TestFunction,
    VectorField,
    Verdict,
    averaging_reconstruct,
    build_directions,
    calibrate_residual,
    classify_field,
    curl_residual,
    fast_marching,
    gen_constant,
    gen_reflected_vortex_2d,
    gen_rotational_2d,
    gen_vortex,
    gen_vortex_line,
    gl_energy,
    godunov_residual,
    gradient,
    halton_test_functions,
    jacobian_degree,
    kinetic_residual,
    kinetic_residual_2d,
    read_vfld,
    regularized_vortex_2d,
    weak_kinetic_residual,
    write_vfld,
)

__all__ = [name for name in dir() if not name.startswith("_")]
