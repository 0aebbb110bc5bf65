"""Exact linear feasibility over the rationals, for small systems.

Gaussian elimination removes equalities, then Fourier-Motzkin elimination
decides the remaining inequalities. Doubly exponential in the worst case,
which is fine at the handful-of-variables scale the probe and the test
oracles need; a budget on intermediate constraint counts guards the rest.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Constraint = tuple[Sequence[Fraction], Fraction]


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: Optional[bool]
    witness: Optional[tuple[Fraction, ...]]
    budget_exceeded: bool = False


def check_feasibility(
    n_vars: int,
    equalities: Sequence[Constraint] = (),
    inequalities: Sequence[Constraint] = (),
    budget: int = 20000,
) -> FeasibilityResult:
    """Decide whether {eq: c.v = r} and {ineq: c.v <= r} admit a solution.

    Returns an exact witness when feasible. ``feasible`` is None when the
    budget was exhausted (result unknown).
    """
    # --- stage 1: reduced row echelon form of the equalities
    pivots: dict[int, list[Fraction]] = {}
    for coeffs, rhs in equalities:
        row = [Fraction(c) for c in coeffs] + [Fraction(rhs)]
        for var, prow in pivots.items():
            f = row[var]
            if f:
                row = [a - f * b for a, b in zip(row, prow)]
        pv = next((j for j in range(n_vars) if row[j] != 0), None)
        if pv is None:
            if row[-1] != 0:
                return FeasibilityResult(False, None)
            continue
        inv = Fraction(1) / row[pv]
        row = [a * inv for a in row]
        for var in list(pivots):
            f = pivots[var][pv]
            if f:
                pivots[var] = [a - f * b for a, b in zip(pivots[var], row)]
        pivots[pv] = row

    free_vars = [j for j in range(n_vars) if j not in pivots]
    n_free = len(free_vars)
    free_pos = {j: i for i, j in enumerate(free_vars)}

    def substitute(coeffs: Sequence[Fraction], rhs: Fraction):
        out = [Fraction(0)] * n_free
        r = Fraction(rhs)
        for j, c in enumerate(coeffs):
            if c == 0:
                continue
            c = Fraction(c)
            if j in pivots:
                # v_j = prow[-1] - sum_f prow[f] * v_f
                prow = pivots[j]
                r -= c * prow[-1]
                for f in free_vars:
                    out[free_pos[f]] += -c * prow[f]
            else:
                out[free_pos[j]] += c
        return out, r

    current = [substitute(c, r) for c, r in inequalities]

    # --- stage 2: Fourier-Motzkin on the free variables, last to first
    stages: list[tuple[int, list, list]] = []
    for k in reversed(range(n_free)):
        lowers, uppers, rest = [], [], []
        for coeffs, rhs in current:
            a = coeffs[k]
            if a > 0:
                uppers.append((coeffs, rhs))
            elif a < 0:
                lowers.append((coeffs, rhs))
            else:
                rest.append((coeffs, rhs))
        stages.append((k, lowers, uppers))
        new = rest
        for lc, lr in lowers:
            al = lc[k]
            for uc, ur in uppers:
                au = uc[k]
                coeffs = [
                    (-al) * u + au * l for u, l in zip(uc, lc)
                ]
                new.append((coeffs, (-al) * ur + au * lr))
                if len(new) > budget:
                    return FeasibilityResult(None, None, budget_exceeded=True)
        current = new

    for _, rhs in current:
        if rhs < 0:
            return FeasibilityResult(False, None)

    # --- stage 3: witness by back substitution, first free variable up
    assign = [Fraction(0)] * n_free
    for k, lowers, uppers in reversed(stages):
        lo: Optional[Fraction] = None
        hi: Optional[Fraction] = None
        for coeffs, rhs in lowers:
            s = rhs - sum(
                (coeffs[j] * assign[j] for j in range(k)), Fraction(0)
            )
            bound = s / coeffs[k]
            if lo is None or bound > lo:
                lo = bound
        for coeffs, rhs in uppers:
            s = rhs - sum(
                (coeffs[j] * assign[j] for j in range(k)), Fraction(0)
            )
            bound = s / coeffs[k]
            if hi is None or bound < hi:
                hi = bound
        if lo is None and hi is None:
            assign[k] = Fraction(0)
        elif lo is None:
            assign[k] = hi - 1
        elif hi is None:
            assign[k] = lo + 1
        else:
            assign[k] = (lo + hi) / 2

    witness = [Fraction(0)] * n_vars
    for i, j in enumerate(free_vars):
        witness[j] = assign[i]
    for j, prow in pivots.items():
        witness[j] = prow[-1] - sum(
            (prow[f] * witness[f] for f in free_vars), Fraction(0)
        )
    return FeasibilityResult(True, tuple(witness))
