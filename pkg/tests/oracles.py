"""Independent brute-force references used by the tests.

Nothing here shares code paths with the solver or the trainers: optima are
recomputed from first principles (vertex enumeration, dense direction search)
so the tests cross-check the production implementations against a second
route to the same answer.
"""

from __future__ import annotations

import itertools

import numpy as np

from mcm import lp


def random_feasible_bounded_lp(rng: np.random.Generator, n_vars: int | None = None,
                               n_ineq: int | None = None,
                               add_equality: bool | None = None):
    """Random LP that is feasible and bounded by construction.

    An interior point x0 >= 0 is drawn first and every row is built to hold at
    x0 with slack; a simplex row sum(x) <= U keeps the region bounded.  Roughly
    a third of the inequality rows are stated as >= (negated), and optionally
    one equality through x0 is appended.  Returns (problem, x0).
    """
    n = int(rng.integers(2, 9)) if n_vars is None else n_vars
    m = int(rng.integers(1, 11)) if n_ineq is None else n_ineq
    x0 = rng.uniform(0.0, 2.0, n)
    A = rng.normal(size=(m, n))
    b = A @ x0 + rng.uniform(0.1, 1.5, m)
    rows = []
    for i in range(m):
        if rng.random() < 0.3:
            rows.append((-A[i], lp.GREATER_EQUAL, -float(b[i])))
        else:
            rows.append((A[i], lp.LESS_EQUAL, float(b[i])))
    rows.append((np.ones(n), lp.LESS_EQUAL, float(x0.sum() + 2.0 * n + 1.0)))
    if add_equality is None:
        add_equality = rng.random() < 0.3
    if add_equality:
        a = rng.normal(size=n)
        rows.append((a, lp.EQUAL, float(a @ x0)))
    c = rng.normal(size=n)
    return lp.make_problem(c, rows, [lp.NONNEGATIVE] * n), x0


def vertex_minimum(problem: lp.LpProblem, feas_tol: float = 1e-7,
                   chunk: int = 20000):
    """Minimum objective over all basic feasible points, by exhaustive enumeration.

    Enumerates every n-subset of {constraint rows} | {x_j >= 0 bound rows},
    solves the active-set system, keeps feasible solutions, and returns
    (best objective, best point) or (None, None) when no feasible vertex exists.
    Only meaningful for pointed feasible regions (all variables bounded below
    or boxed by explicit rows) and bounded objectives.
    """
    n = problem.n_vars
    rows = [np.asarray(con.coeffs, dtype=float) for con in problem.constraints]
    rels = [con.relation for con in problem.constraints]
    rhs = [con.rhs for con in problem.constraints]
    for j, kind in enumerate(problem.variable_bounds):
        if kind == lp.NONNEGATIVE:
            bound = np.zeros(n)
            bound[j] = 1.0
            rows.append(bound)
            rels.append(lp.GREATER_EQUAL)
            rhs.append(0.0)
    G = np.vstack(rows)
    h = np.asarray(rhs)
    le = np.array([r == lp.LESS_EQUAL for r in rels])
    ge = np.array([r == lp.GREATER_EQUAL for r in rels])
    eq = np.array([r == lp.EQUAL for r in rels])
    c = problem.objective

    best_obj = None
    best_x = None
    flat = itertools.chain.from_iterable(itertools.combinations(range(G.shape[0]), n))
    while True:
        arr = np.fromiter(itertools.islice(flat, chunk * n), dtype=np.int64)
        if arr.size == 0:
            break
        batch = arr.reshape(-1, n)
        mats = G[batch]
        dets = np.linalg.det(mats)
        ok = np.abs(dets) > 1e-9
        if not ok.any():
            continue
        X = np.linalg.solve(mats[ok], h[batch[ok]][:, :, None])[:, :, 0]
        vals = X @ G.T
        feasible = (
            np.all(vals[:, le] <= h[le] + feas_tol, axis=1)
            & np.all(vals[:, ge] >= h[ge] - feas_tol, axis=1)
            & np.all(np.abs(vals[:, eq] - h[eq]) <= feas_tol, axis=1)
        )
        if not feasible.any():
            continue
        objs = X[feasible] @ c
        i = int(np.argmin(objs))
        if best_obj is None or objs[i] < best_obj:
            best_obj = float(objs[i])
            best_x = X[feasible][i]
    return best_obj, best_x


def _ratio_over_offsets(S: np.ndarray, y: np.ndarray, iters: int = 100):
    """For each direction (column of S = X @ U.T): minimize the margin ratio over
    the offset by ternary search on the interval where all samples sit on the
    correct side. Returns (ratio, offset), inf where no offset separates."""
    pos = y > 0
    neg = ~pos
    lo = (-S[pos]).max(axis=0)
    hi = (-S[neg]).min(axis=0)
    feasible = lo < hi - 1e-15

    span = np.where(feasible, hi - lo, 1.0)
    a = lo + 1e-12 * span
    b = hi - 1e-12 * span

    def ratio(v):
        margins = y[:, None] * (S + v[None, :])
        mn = margins.min(axis=0)
        mn = np.where(mn <= 0, np.nan, mn)
        return margins.max(axis=0) / mn

    for _ in range(iters):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        f1 = ratio(m1)
        f2 = ratio(m2)
        go_left = f1 <= f2
        b = np.where(go_left, m2, b)
        a = np.where(go_left, a, m1)
    v = 0.5 * (a + b)
    r = ratio(v)
    r = np.where(feasible & np.isfinite(r), r, np.inf)
    return r, v


def min_margin_ratio_2d(X: np.ndarray, y: np.ndarray, n_directions: int = 16384):
    """Brute-force minimum of max-margin/min-margin over separating hyperplanes.

    Scans n_directions unit normals over the full circle, solves the offset
    exactly for each, then polishes the best direction with a golden-section
    pass. Returns the smallest ratio found (np.inf if nothing separates).
    """
    thetas = np.linspace(0.0, 2.0 * np.pi, n_directions, endpoint=False)
    U = np.column_stack([np.cos(thetas), np.sin(thetas)])
    ratios, _ = _ratio_over_offsets(X @ U.T, y)
    k = int(np.argmin(ratios))
    best = float(ratios[k])
    if not np.isfinite(best):
        return np.inf

    def at(theta: float) -> float:
        u = np.array([[np.cos(theta), np.sin(theta)]])
        r, _ = _ratio_over_offsets(X @ u.T, y)
        return float(r[0])

    # golden-section polish around the best grid direction
    step = 2.0 * np.pi / n_directions
    a, b = thetas[k] - 2 * step, thetas[k] + 2 * step
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = at(x1), at(x2)
    for _ in range(120):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = at(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = at(x2)
    return min(best, f1, f2)


def parse_lp_text(text: str) -> lp.LpProblem:
    """Parse the fixed-decimal CPLEX-LP subset emitted by lp.write_lp_text."""
    section = None
    objective_tokens: list[str] = []
    constraint_lines: list[str] = []
    free_names: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        lowered = line.lower()
        if lowered == "minimize":
            section = "obj"
            continue
        if lowered == "subject to":
            section = "cons"
            continue
        if lowered == "bounds":
            section = "bounds"
            continue
        if lowered == "end":
            break
        if section == "obj":
            objective_tokens.extend(line.split(":", 1)[1].split())
        elif section == "cons":
            constraint_lines.append(line.split(":", 1)[1])
        elif section == "bounds":
            name, kind = line.split()
            assert kind == "free"
            free_names.append(name)

    def parse_linear(tokens):
        terms: dict[str, float] = {}
        sign, coef = 1.0, None
        for tok in tokens:
            if tok in ("+", "-"):
                sign = 1.0 if tok == "+" else -1.0
                continue
            try:
                value = float(tok)
            except ValueError:  # variable name closes the pending term
                terms[tok] = terms.get(tok, 0.0) + (coef if coef is not None else sign)
                sign, coef = 1.0, None
            else:
                coef = sign * value
                sign = 1.0
        return terms

    obj_terms = parse_linear(objective_tokens)
    rows = []
    names_seen = dict.fromkeys(obj_terms)
    for line in constraint_lines:
        for rel in (lp.LESS_EQUAL, lp.GREATER_EQUAL, lp.EQUAL):
            if f" {rel} " in line:
                left, right = line.split(f" {rel} ")
                terms = parse_linear(left.split())
                rows.append((terms, rel, float(right)))
                names_seen.update(dict.fromkeys(terms))
                break
        else:
            raise AssertionError(f"no relation in {line!r}")
    order = list(names_seen)
    index = {name: j for j, name in enumerate(order)}
    c = np.zeros(len(order))
    for name, value in obj_terms.items():
        c[index[name]] = value
    constraints = []
    for terms, rel, rhs in rows:
        coeffs = np.zeros(len(order))
        for name, value in terms.items():
            coeffs[index[name]] = value
        constraints.append((coeffs, rel, rhs))
    bounds = [lp.FREE if name in free_names else lp.NONNEGATIVE for name in order]
    return lp.make_problem(c, constraints, bounds)
