"""Layer-resolving finite differences for two-parameter problems with a data jump."""

from .analysis import (
    ConvergenceTable,
    MeshComparison,
    compare_meshes,
    comparison_to_csv,
    comparison_to_markdown,
    convergence_table,
    double_mesh_error,
    manufactured_convergence,
    solve_on_mesh,
    table_to_csv,
    table_to_markdown,
)
from .expressions import (
    EvaluationError,
    Expression,
    ExpressionSyntaxError,
    UnknownIdentifierError,
    evaluate,
    evaluate_array,
    parse,
    unparse,
)
from .linalg import PivotError, Solution, solve_dense_oracle, solve_thomas
from .mesh import (
    Mesh,
    MeshFamily,
    TransitionClampWarning,
    build_mesh,
    refine_double,
    shishkin_bakhvalov_mesh,
    shishkin_mesh,
    transition_points,
    uniform_mesh,
)
from .problem import (
    Case,
    ProblemSpec,
    RegimeData,
    builtin_example,
    derive_regime,
    load_problem,
    problem_from_dict,
    validate,
)
from .scheme import MMatrixReport, TridiagonalSystem, apply_operator, assemble, check_m_matrix

__version__ = "0.1.0"

__all__ = [
    "Case",
    "ConvergenceTable",
    "EvaluationError",
    "Expression",
    "ExpressionSyntaxError",
    "Mesh",
    "MeshComparison",
    "MeshFamily",
    "MMatrixReport",
    "PivotError",
    "ProblemSpec",
    "RegimeData",
    "Solution",
    "TransitionClampWarning",
    "TridiagonalSystem",
    "UnknownIdentifierError",
    "apply_operator",
    "assemble",
    "build_mesh",
    "builtin_example",
    "check_m_matrix",
    "compare_meshes",
    "comparison_to_csv",
    "comparison_to_markdown",
    "convergence_table",
    "derive_regime",
    "double_mesh_error",
    "evaluate",
    "evaluate_array",
    "load_problem",
    "manufactured_convergence",
    "parse",
    "problem_from_dict",
    "refine_double",
    "shishkin_bakhvalov_mesh",
    "shishkin_mesh",
    "solve_dense_oracle",
    "solve_on_mesh",
    "solve_thomas",
    "table_to_csv",
    "table_to_markdown",
    "transition_points",
    "uniform_mesh",
    "unparse",
    "validate",
    "__version__",
]
