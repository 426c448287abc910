"""A tour of the dense two-phase simplex solver the trainers run on.

Problems mix <=, >= and = rows with nonnegative or free variables; the solver
standardizes, finds a feasible basis with artificial variables, then walks
vertices under steepest-edge pricing.  It certifies infeasibility (positive
phase-1 optimum) and unboundedness (an improving ray), and it survives the
classic degenerate instances that make naive pivoting cycle.
"""

from mcm import SolverOptions, solve, standardize
from mcm.lp import make_problem, write_lp_text

# a garden-variety LP: minimize -x - 2y inside the triangle x + y <= 1
problem = make_problem([-1.0, -2.0], [([1.0, 1.0], "<=", 1.0)], ["nonneg"] * 2)
solution = solve(problem)
print(f"triangle: {solution.status.value}, x = {solution.primal_values}, "
      f"objective = {solution.objective_value}")

# infeasible and unbounded cases are certified, not guessed
print("x >= 1 and x <= 0:",
      solve(make_problem([1.0], [([1.0], ">=", 1.0), ([1.0], "<=", 0.0)],
                         ["nonneg"])).status.value)
print("minimize -x, x >= 1:",
      solve(make_problem([-1.0], [([1.0], ">=", 1.0)], ["nonneg"])).status.value)

# free variables are split internally; the answer comes back in original terms
free = make_problem([1.0], [([1.0], ">=", -3.0)], ["free"])
print(f"free variable: x = {solve(free).primal_values[0]:.1f}")
std = standardize(free)
print(f"  standardized to {std.problem.n_vars} nonnegative columns, "
      f"{len(std.problem.constraints)} equality rows")

# Beale's cycling example: degenerate enough to trap greedy pivoting forever
beale = make_problem(
    [-0.75, 150.0, -0.02, 6.0],
    [([0.25, -60.0, -0.04, 9.0], "<=", 0.0),
     ([0.5, -90.0, -0.02, 3.0], "<=", 0.0),
     ([0.0, 0.0, 1.0, 0.0], "<=", 1.0)],
    ["nonneg"] * 4)
solution = solve(beale, SolverOptions())
print(f"\nBeale instance: {solution.status.value} at objective "
      f"{solution.objective_value} after {solution.iterations} pivots")

print("\nthe same LP in CPLEX-LP text (what the CLI's --dump-lp writes):")
print(write_lp_text(problem, names=["x", "y"]))
