from ._core import (
    Mesh,
    MeshStats,
    NumericalError,
    ParseError,
    Space,
    coefficient,
    default_config,
    eoc,
    grade_towards_circle,
    grading_strength,
    holder_quotient,
    interval_mesh,
    mark_cells,
    refine,
    refine_uniform,
    run_experiment,
    solve_disc,
    square_mesh,
)

__all__ = [
    "Mesh",
    "MeshStats",
    "NumericalError",
    "ParseError",
    "Space",
    "coefficient",
    "default_config",
    "eoc",
    "grade_towards_circle",
    "grading_strength",
    "holder_quotient",
    "interval_mesh",
    "mark_cells",
    "refine",
    "refine_uniform",
    "run_experiment",
    "solve_disc",
    "square_mesh",
]
