"""Linear model of joint routing and dimensioning, its file formats and an exhaustive oracle."""

from ncpower.milp.ir import Constraint, ModelIR, Variable
from ncpower.milp.lpfile import (
    Solution,
    check_assignment,
    export_model,
    import_solution,
    model_to_lp,
    parse_solution_text,
    write_solution,
)
from ncpower.milp.model import MODEL_MODES, big_m, build_model, mode_parts, plan_assignment
from ncpower.milp.oracle import OracleResult, brute_force_optimum, simple_paths

__all__ = [
    "Constraint", "ModelIR", "Variable", "Solution", "OracleResult", "MODEL_MODES",
    "build_model", "plan_assignment", "big_m", "mode_parts",
    "export_model", "model_to_lp", "import_solution", "parse_solution_text",
    "write_solution", "check_assignment", "brute_force_optimum", "simple_paths",
]
