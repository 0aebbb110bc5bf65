"""Pure-Python sweep backend: exact Fraction arithmetic over precomputed tables."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from ..core import (
    ExtReal,
    NEG_INF,
    ext_add,
    ext_le,
    ext_min,
    ext_scale,
    ext_sub_finite,
    is_neg_inf,
)
from .transforms import UNCONSTRAINED, _Unconstrained

BACKEND_NAME = "pure"


def run_sweeps(
    tables,
    q0: list[ExtReal],
    tol: Fraction,
    max_sweeps: int,
) -> dict:
    """Round-robin improvement sweeps until stable or out of budget.

    Sweeps g over carrier points in index order (rays lexicographic, scales
    ascending); per g the candidates for every target ray are computed with
    q frozen, then merged by pointwise max. Returns per-sweep snapshots,
    finite max increases, bottom-to-finite promotion counts, and update
    counts.
    """
    R = tables.nrays
    S = tables.nscales
    P = tables.npoints
    lams = tables.lams
    rel = tables.rel
    rel0 = tables.rel0
    hsum = tables.hsum
    hpt = tables.hpt
    px = tables.px
    certified = tables.certified
    zero_ok = tables.zero_admissible
    ratio_idx = tables.ratio_idx
    hlists = tables.hlists
    feas, feas0 = tables.feasibility()
    ray_of = [lbl[0] for lbl in tables.labels]
    scale_of = [lbl[1] for lbl in tables.labels]
    scale_idx_of = [p % S for p in range(P)]

    q: list[ExtReal] = list(q0)
    snapshots: list[tuple[ExtReal, ...]] = []
    increases: list[Fraction] = []
    flips: list[int] = []
    updated: list[int] = []
    converged = False

    zero_q = Fraction(0)
    for _ in range(max_sweeps):
        sweep_inc = Fraction(0)
        sweep_flips = 0
        sweep_updates = 0
        for gp in range(P):
            a_val = _a_value(
                gp, q, rel, rel0, hsum, hpt, ray_of, scale_of, P, zero_ok
            )
            unconstrained = isinstance(a_val, _Unconstrained)
            if not unconstrained:
                lam_a = [ext_scale(l, a_val) for l in lams]
                a_descending = not (is_neg_inf(a_val) or a_val < 0)
            cands: list[ExtReal] = [NEG_INF] * R
            for xr in range(R):
                xp = px[xr]
                best: ExtReal = NEG_INF
                if zero_ok and rel0[xp]:
                    iv = feas0[gp][xr]
                    if iv is not None:
                        if unconstrained:
                            if iv[0] == 0:
                                best = zero_q
                        else:
                            cand = _scan(
                                zero_q,
                                iv,
                                lam_a,
                                a_descending,
                                certified,
                                lambda l: rel0[gp],
                            )
                            if cand is not None:
                                best = cand
                for hp in hlists[xr]:
                    qr = q[ray_of[hp]]
                    if qr is NEG_INF:
                        continue
                    iv = feas[gp][xr].get(hp)
                    if iv is None:
                        continue
                    qh = scale_of[hp] * qr
                    if unconstrained:
                        cand = qh if iv[0] == 0 else None
                    else:
                        sidx = scale_idx_of[hp]
                        base = ray_of[hp] * S
                        cand = _scan(
                            qh,
                            iv,
                            lam_a,
                            a_descending,
                            certified,
                            lambda l, base=base, sidx=sidx: (
                                ratio_idx[sidx][l] >= 0
                                and rel[base + ratio_idx[sidx][l]][gp]
                            ),
                        )
                    if cand is not None and not ext_le(cand, best):
                        best = cand
                cands[xr] = best
            for xr in range(R):
                c = cands[xr]
                cur = q[xr]
                if ext_le(c, cur):
                    continue
                if cur is NEG_INF:
                    sweep_flips += 1
                else:
                    inc = c - cur
                    if inc > sweep_inc:
                        sweep_inc = inc
                q[xr] = c
                sweep_updates += 1
        snapshots.append(tuple(q))
        increases.append(sweep_inc)
        flips.append(sweep_flips)
        updated.append(sweep_updates)
        if sweep_flips == 0 and sweep_inc <= tol:
            converged = True
            break
    return {
        "backend": BACKEND_NAME,
        "snapshots": snapshots,
        "increases": increases,
        "flips": flips,
        "updated": updated,
        "converged": converged,
    }


def _a_value(gp, q, rel, rel0, hsum, hpt, ray_of, scale_of, P, zero_ok):
    best = UNCONSTRAINED
    rel_col = rel
    for yp in range(P):
        if not rel_col[yp][gp]:
            continue
        qr = q[ray_of[yp]]
        if qr is NEG_INF:
            continue
        v = ext_sub_finite(hsum[gp][yp], scale_of[yp] * qr)
        best = v if isinstance(best, _Unconstrained) else ext_min(best, v)
    if zero_ok and rel0[gp]:
        v = hpt[gp]
        best = v if isinstance(best, _Unconstrained) else ext_min(best, v)
    return best


def _scan(qh, interval, lam_a, descending, certified, allowed):
    """Best candidate qh + lam*A over the feasible interval, one-pass.

    The candidate is monotone in lam (direction decided by the sign of A),
    so the first admissible grid index from the right end is optimal; index
    0 (lam = 0) is always admissible.
    """
    lo, hi = interval
    rng = range(hi, lo - 1, -1) if descending else range(lo, hi + 1)
    for l in rng:
        if l > 0 and certified and not allowed(l):
            continue
        return ext_add(qh, lam_a[l])
    return None
