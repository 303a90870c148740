"""Exact rational linear programming plus the greedy forest oracle.

simplex_max solves  max c.x  over a LinearSystem (inequalities are <=,
variables are free unless a row pins them nonnegative) in exact rational
arithmetic: equalities are eliminated by Gaussian substitution, remaining
free variables are split into differences of nonnegatives, and a two-phase
tableau simplex with Bland's smallest-index rule runs to termination.

max_weight_forest is the matroid-greedy ground truth: sort the positive
weights, add edges that keep the subset acyclic.  The two routes are kept
fully independent so one can certify the other.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .formulations import LinearSystem
from .graphs import Graph, bits, enumerate_forests

ZERO = Fraction(0)
ONE = Fraction(1)

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass
class LPResult:
    status: str
    value: Optional[Fraction] = None
    point: Optional[dict[int, Fraction]] = None


def _substitute(coeffs: dict[int, Fraction], rhs: Fraction,
                subs: dict[int, tuple[dict[int, Fraction], Fraction]]):
    """Apply var -> (expr, const) substitutions to a row; returns new row."""
    out: dict[int, Fraction] = {}
    for v, c in coeffs.items():
        if v in subs:
            expr, const = subs[v]
            rhs -= c * const
            for w, cw in expr.items():
                nc = out.get(w, ZERO) + c * cw
                if nc:
                    out[w] = nc
                elif w in out:
                    del out[w]
        else:
            nc = out.get(v, ZERO) + c
            if nc:
                out[v] = nc
            elif v in out:
                del out[v]
    return out, rhs


def _eliminate_equalities(sys: LinearSystem):
    """Triangularize the equality rows into fully resolved substitutions.

    Returns (subs, ok); ok=False means an equality reduced to 0 = nonzero.
    Pivots prefer the highest variable index, which favours auxiliary
    variables and keeps original edge variables in the reduced problem.
    """
    subs: dict[int, tuple[dict[int, Fraction], Fraction]] = {}
    for coeffs, rhs in sys.eqs:
        row, r = _substitute(coeffs, rhs, subs)
        if not row:
            if r != 0:
                return subs, False
            continue
        p = max(row)
        cp = row[p]
        expr = {w: -cw / cp for w, cw in row.items() if w != p}
        const = r / cp
        # keep every stored substitution free of p
        for q, (e, c0) in list(subs.items()):
            if p in e:
                f = e.pop(p)
                c0 += f * const
                for w, cw in expr.items():
                    nc = e.get(w, ZERO) + f * cw
                    if nc:
                        e[w] = nc
                    elif w in e:
                        del e[w]
                subs[q] = (e, c0)
        subs[p] = (expr, const)
    return subs, True


def _bland_simplex(rows, rhs, basis, obj):
    """Max-simplex on equality-form tableau rows with Bland's rule.

    rows[i] is a dict col->coeff, rhs[i] >= 0, basis[i] the basic column of
    row i (unit column).  obj is the reduced objective (dict col->coeff);
    entries with positive coefficient improve the maximum.  Mutates the
    tableau in place; returns "optimal" or "unbounded".  Bland's rule
    (smallest entering index, smallest basic index on ratio ties) rules
    out cycling, so termination is unconditional.
    """
    while True:
        enter = None
        for j, c in obj.items():
            if c > 0 and (enter is None or j < enter):
                enter = j
        if enter is None:
            return OPTIMAL
        leave_row = None
        best_ratio = None
        for i, row in enumerate(rows):
            a = row.get(enter, ZERO)
            if a > 0:
                ratio = rhs[i] / a
                if best_ratio is None or ratio < best_ratio or \
                        (ratio == best_ratio and basis[i] < basis[leave_row]):
                    best_ratio = ratio
                    leave_row = i
        if leave_row is None:
            return UNBOUNDED
        _pivot(rows, rhs, basis, obj, leave_row, enter)


def _pivot(rows, rhs, basis, obj, r, c):
    prow = rows[r]
    pval = prow[c]
    if pval != 1:
        inv = ONE / pval
        rows[r] = prow = {j: v * inv for j, v in prow.items()}
        rhs[r] = rhs[r] * inv
    basis[r] = c
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row.get(c)
        if not f:
            continue
        for j, v in prow.items():
            nv = row.get(j, ZERO) - f * v
            if nv:
                row[j] = nv
            elif j in row:
                del row[j]
        rhs[i] = rhs[i] - f * rhs[r]
    f = obj.get(c)
    if f:
        for j, v in prow.items():
            nv = obj.get(j, ZERO) - f * v
            if nv:
                obj[j] = nv
            elif j in obj:
                del obj[j]


def simplex_max(sys: LinearSystem, objective: dict[int, Fraction]) -> LPResult:
    """Exact maximum of an objective over the original variables.

    The objective may only touch original variables.  The returned point
    assigns every variable (including eliminated auxiliaries) and is
    re-checked against every row of the input system before returning.
    """
    for v in objective:
        if not 0 <= v < sys.num_orig:
            raise ValueError(f"objective touches non-original variable {v}")
    objective = {v: Fraction(c) for v, c in objective.items() if c}

    subs, ok = _eliminate_equalities(sys)
    if not ok:
        return LPResult(INFEASIBLE)

    red_ineqs = []
    for coeffs, rhs in sys.ineqs:
        row, r = _substitute(coeffs, rhs, subs)
        if not row:
            if r < 0:
                return LPResult(INFEASIBLE)
            continue
        red_ineqs.append((row, r))
    red_obj, _ = _substitute(objective, ZERO, subs)

    # singleton rows  -a*v <= 0  (a > 0) pin v >= 0; drop them from the tableau
    nonneg = set()
    kept = []
    for row, r in red_ineqs:
        if len(row) == 1 and r == 0:
            v, c = next(iter(row.items()))
            if c < 0:
                nonneg.add(v)
                continue
        kept.append((row, r))

    variables = sorted(set().union(nonneg, red_obj,
                                   *[set(row) for row, _ in kept]))
    col_of_pos = {}
    col_of_neg = {}
    col_meaning = []  # (var, sign)
    for v in variables:
        col_of_pos[v] = len(col_meaning)
        col_meaning.append((v, 1))
        if v not in nonneg:
            col_of_neg[v] = len(col_meaning)
            col_meaning.append((v, -1))
    n_struct = len(col_meaning)

    def to_cols(row: dict[int, Fraction]) -> dict[int, Fraction]:
        out = {}
        for v, c in row.items():
            out[col_of_pos[v]] = c
            if v in col_of_neg:
                out[col_of_neg[v]] = -c
        return out

    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    art_cols: list[int] = []
    next_col = n_struct + len(kept)  # slacks occupy n_struct..n_struct+rows-1
    for i, (row, r) in enumerate(kept):
        cols = to_cols(row)
        slack = n_struct + i
        cols[slack] = ONE
        if r < 0:
            cols = {j: -c for j, c in cols.items()}
            r = -r
            art = next_col
            next_col += 1
            cols[art] = ONE
            art_cols.append(art)
            basis.append(art)
        else:
            basis.append(slack)
        rows.append(cols)
        rhs.append(r)

    if art_cols:
        art_set = set(art_cols)
        phase1 = {}
        for i, b in enumerate(basis):
            if b in art_set:
                for j, v in rows[i].items():
                    if j in art_set:
                        continue
                    nv = phase1.get(j, ZERO) + v
                    if nv:
                        phase1[j] = nv
                    elif j in phase1:
                        del phase1[j]
        # maximize -(sum of artificials): reduced costs are +sum of their rows
        status = _bland_simplex(rows, rhs, basis, phase1)
        infeas = sum((rhs[i] for i, b in enumerate(basis) if b in art_set), ZERO)
        if status != OPTIMAL or infeas != 0:
            return LPResult(INFEASIBLE)
        for i in range(len(rows)):
            if basis[i] in art_set:
                # degenerate row (rhs 0): pivot the artificial out on any
                # real column, or drop the row as redundant
                target = None
                for j in sorted(rows[i]):
                    if j not in art_set and rows[i][j] != 0:
                        target = j
                        break
                if target is not None:
                    _pivot(rows, rhs, basis, {}, i, target)
        keep_idx = [i for i in range(len(rows)) if basis[i] not in art_set]
        rows = [
            {j: v for j, v in rows[i].items() if j not in art_set}
            for i in keep_idx
        ]
        rhs = [rhs[i] for i in keep_idx]
        basis = [basis[i] for i in keep_idx]

    obj_cols = to_cols(red_obj)
    # price out the basic variables
    for i, b in enumerate(basis):
        f = obj_cols.get(b)
        if f:
            for j, v in rows[i].items():
                nv = obj_cols.get(j, ZERO) - f * v
                if nv:
                    obj_cols[j] = nv
                elif j in obj_cols:
                    del obj_cols[j]
    if _bland_simplex(rows, rhs, basis, obj_cols) == UNBOUNDED:
        return LPResult(UNBOUNDED)

    col_vals = {}
    for i, b in enumerate(basis):
        col_vals[b] = rhs[i]
    point: dict[int, Fraction] = {}
    for v in variables:
        val = col_vals.get(col_of_pos[v], ZERO)
        if v in col_of_neg:
            val -= col_vals.get(col_of_neg[v], ZERO)
        point[v] = val
    for v in range(sys.num_vars):
        point.setdefault(v, ZERO)
    # back-substitute the eliminated variables
    for v, (expr, const) in subs.items():
        val = const
        for w, cw in expr.items():
            val += cw * point[w]
        point[v] = val
    bad = sys.point_violation(point)
    if bad is not None:
        raise AssertionError(f"simplex returned an infeasible point: {bad}")
    value = sum((c * point[v] for v, c in objective.items()), ZERO)
    return LPResult(OPTIMAL, value, point)


def max_weight_forest(g: Graph, weights: dict[int, Fraction]) -> Fraction:
    """Greedy maximum-weight forest: positive weights in decreasing order,
    skipping edges that close a cycle.  Matroid optimality makes this the
    exact maximum of the weight over the forest polytope."""
    order = sorted((e for e in range(g.m) if weights.get(e, ZERO) > 0),
                   key=lambda e: (-weights[e], e))
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    total = ZERO
    for e in order:
        u, v = g.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            total += weights[e]
    return total


@dataclass
class Report:
    """Line-oriented verification report: PASS/FAIL plus INFO lines.

    verbose=False suppresses PASS lines (they are still counted); FAIL
    lines are always recorded.  Million-pair sweeps use the quiet mode.
    """
    lines: list[str] = field(default_factory=list)
    failures: int = 0
    checks: int = 0
    verbose: bool = True

    def info(self, text: str) -> None:
        self.lines.append(f"INFO {text}")

    def check(self, ok: bool, check_id: str, details: str = "") -> bool:
        self.checks += 1
        if not ok:
            self.failures += 1
            self.lines.append(f"FAIL {check_id} {details}".rstrip())
        elif self.verbose:
            self.lines.append(f"PASS {check_id} {details}".rstrip())
        return ok

    def check_lazy(self, ok: bool, fmt) -> bool:
        """Like check(), but the line text comes from a zero-argument
        callable evaluated only when a line is actually emitted."""
        self.checks += 1
        if not ok:
            self.failures += 1
            self.lines.append("FAIL " + fmt())
        elif self.verbose:
            self.lines.append("PASS " + fmt())
        return ok

    @property
    def all_pass(self) -> bool:
        return self.failures == 0

    def render(self) -> str:
        return "\n".join(self.lines) + "\n"


def random_objective(rng: random.Random, m: int) -> dict[int, Fraction]:
    """Seeded rational objective: numerators in [-10, 10], denominators 1..3."""
    return {e: Fraction(rng.randint(-10, 10), rng.choice((1, 2, 3)))
            for e in range(m)}


def structured_objectives(m: int) -> list[dict[int, Fraction]]:
    """All-ones and all-zeros always; every {-1,0,1} vector when m <= 4."""
    out = [{e: ONE for e in range(m)}, {}]
    if 0 < m <= 4:
        vals = (Fraction(-1), ZERO, ONE)
        stack: list[dict[int, Fraction]] = [{}]
        for e in range(m):
            stack = [{**s, e: v} for s in stack for v in vals]
        for s in stack:
            cleaned = {e: v for e, v in s.items() if v}
            if cleaned not in out:
                out.append(cleaned)
    return out


def _fmt_obj(obj: dict[int, Fraction], m: int) -> str:
    return "(" + ",".join(str(obj.get(e, ZERO)) for e in range(m)) + ")"


def verify_ef(g: Graph, sys: LinearSystem, trials: int = 200,
              seed: int = 0, verbose: bool = True) -> Report:
    """Two-sided check that a system is an extended formulation of FP(g).

    Feasibility half: every forest's characteristic vector, extended by
    the system's witness functions (or by an exact feasibility LP when the
    system carries none, e.g. after a file round trip), satisfies every
    row.  Optimization half: seeded random rational objectives plus the
    structured battery must give simplex value == greedy forest value.
    """
    rep = Report(verbose=verbose)
    rep.info(f"verify-ef n={g.n} m={g.m} size={sys.size()} "
             f"generator=random.Random seed={seed} trials={trials}")
    int_rows = _compile_int_rows(sys)
    for fmask in enumerate_forests(g):
        if sys.witness_complete:
            point = sys.witness_point(fmask)
            bad = _check_int_rows(int_rows, point) if int_rows is not None \
                else sys.point_violation(point)
        else:
            bad = None if _feasible_with_fixed_originals(sys, fmask) \
                else "no feasible witness"
        rep.check_lazy(bad is None,
                       lambda: f"forest-witness {fmask:x} {bad or ''}".rstrip())
    rng = random.Random(seed)
    objectives = [random_objective(rng, g.m) for _ in range(trials)]
    objectives.extend(structured_objectives(g.m))
    for k, obj in enumerate(objectives):
        lp = simplex_max(sys, obj)
        greedy = max_weight_forest(g, obj)
        ok = lp.status == OPTIMAL and lp.value == greedy
        rep.check_lazy(ok, lambda: (
            f"objective-{k} obj={_fmt_obj(obj, g.m)} "
            f"lp={lp.value if lp.status == OPTIMAL else lp.status} greedy={greedy}"))
    return rep


def _compile_int_rows(sys: LinearSystem):
    """Integer fast path for pointwise feasibility when all data is integral."""
    rows = []
    for kind, rowlist in (("I", sys.ineqs), ("E", sys.eqs)):
        for coeffs, rhs in rowlist:
            if rhs.denominator != 1 or any(c.denominator != 1 for c in coeffs.values()):
                return None
            rows.append((kind, tuple((v, c.numerator) for v, c in coeffs.items()),
                         rhs.numerator))
    return rows


def _check_int_rows(rows, point: dict[int, Fraction]) -> Optional[str]:
    vals = {v: int(x) for v, x in point.items()}
    for kind, terms, rhs in rows:
        s = 0
        for v, c in terms:
            s += c * vals.get(v, 0)
        if kind == "I" and s > rhs:
            return f"INEQ lhs={s} rhs={rhs}"
        if kind == "E" and s != rhs:
            return f"EQ lhs={s} rhs={rhs}"
    return None


def _feasible_with_fixed_originals(sys: LinearSystem, fmask: int) -> bool:
    """Exact feasibility LP: pin the edge variables to a forest vector."""
    pinned = LinearSystem(sys.num_orig, list(sys.orig_tags), list(sys.aux_tags),
                          [(dict(c), r) for c, r in sys.ineqs],
                          [(dict(c), r) for c, r in sys.eqs],
                          witness_complete=False)
    for e in range(sys.num_orig):
        pinned.add_eq({e: ONE}, ONE if (fmask >> e) & 1 else ZERO)
    return simplex_max(pinned, {}).status == OPTIMAL
