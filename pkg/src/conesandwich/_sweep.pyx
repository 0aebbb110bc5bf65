# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep kernel: exact int64 rational arithmetic with overflow checks.

Mirrors engine.sweep_pure.run_sweeps term for term. All intermediates use
128-bit products and every stored value is gcd-reduced and range-checked;
an OverflowError makes the caller fall back to the pure backend, so results
are exact whenever this kernel returns at all.

Value encoding: finite p/q as (num=p, den=q>0); bottom element as den == 0.
"""

from libc.stdlib cimport calloc, free

ctypedef long long i64

cdef extern from *:
    """
    typedef __int128 cs_i128;
    """
    ctypedef long long i128 "cs_i128"

cdef i64 I64_LIMIT = <i64>1 << 62


cdef inline i128 _abs128(i128 a) noexcept:
    return -a if a < 0 else a


cdef inline i128 _gcd128(i128 a, i128 b) noexcept:
    cdef i128 t
    while b != 0:
        t = a % b
        a = b
        b = t
    return a


cdef int _make(i128 num, i128 den, i64* on, i64* od) except -1:
    """Reduce num/den (den > 0) and store as checked int64."""
    cdef i128 g
    if num == 0:
        on[0] = 0
        od[0] = 1
        return 0
    g = _gcd128(_abs128(num), den)
    num = num // g
    den = den // g
    if num >= <i128>I64_LIMIT or num <= -(<i128>I64_LIMIT) or den >= <i128>I64_LIMIT:
        raise OverflowError("kernel rational out of range")
    on[0] = <i64>num
    od[0] = <i64>den
    return 0


cdef int _add(i64 an, i64 ad, i64 bn, i64 bd, i64* on, i64* od) except -1:
    """a + b; bottom absorbs."""
    if ad == 0 or bd == 0:
        on[0] = -1
        od[0] = 0
        return 0
    return _make(<i128>an * bd + <i128>bn * ad, <i128>ad * bd, on, od)


cdef int _sub_finite(i64 an, i64 ad, i64 bn, i64 bd, i64* on, i64* od) except -1:
    """a - b with finite b; bottom a stays bottom."""
    if ad == 0:
        on[0] = -1
        od[0] = 0
        return 0
    return _make(<i128>an * bd - <i128>bn * ad, <i128>ad * bd, on, od)


cdef int _mul_scale(i64 ln, i64 ld, i64 an, i64 ad, i64* on, i64* od) except -1:
    """lam * a for lam >= 0; 0 * bottom = 0, lam > 0 preserves bottom."""
    if ln == 0:
        on[0] = 0
        od[0] = 1
        return 0
    if ad == 0:
        on[0] = -1
        od[0] = 0
        return 0
    return _make(<i128>ln * an, <i128>ld * ad, on, od)


cdef inline int _cmp_fin(i64 an, i64 ad, i64 bn, i64 bd) noexcept:
    """Compare two finite rationals: -1, 0, 1."""
    cdef i128 left = <i128>an * bd
    cdef i128 right = <i128>bn * ad
    if left < right:
        return -1
    if left > right:
        return 1
    return 0


cdef inline int _le(i64 an, i64 ad, i64 bn, i64 bd) noexcept:
    """a <= b with bottom below everything."""
    if ad == 0:
        return 1
    if bd == 0:
        return 0
    return _cmp_fin(an, ad, bn, bd) <= 0


cdef struct Interval:
    signed char lo
    signed char hi   # lo > hi encodes empty


cdef int _interval(
    i64* gx_num, i64* gx_den,    # g coords (n entries)
    i64* x_num, i64* x_den,      # x coords
    i64* h_num, i64* h_den,      # h coords (may be the zero buffer)
    int n,
    i64* lam_num, i64* lam_den, int L,
    Interval* out,
) except -1:
    """Grid-index interval of feasible lambdas for h + lam*g <= x."""
    cdef i64 lo_n = 0, lo_d = 1
    cdef i64 hi_n = 0, hi_d = 1
    cdef bint has_hi = False
    cdef i64 dn, dd, bn, bd
    cdef i128 raw_n, raw_d
    cdef int i, l
    for i in range(n):
        _sub_finite(x_num[i], x_den[i], h_num[i], h_den[i], &dn, &dd)
        if gx_num[i] > 0:
            raw_n = <i128>dn * gx_den[i]
            raw_d = <i128>dd * gx_num[i]
            _make(raw_n, raw_d, &bn, &bd)
            if (not has_hi) or _cmp_fin(bn, bd, hi_n, hi_d) < 0:
                hi_n = bn
                hi_d = bd
                has_hi = True
        elif gx_num[i] < 0:
            raw_n = <i128>dn * gx_den[i]
            raw_d = <i128>dd * gx_num[i]
            if raw_d < 0:
                raw_n = -raw_n
                raw_d = -raw_d
            _make(raw_n, raw_d, &bn, &bd)
            if _cmp_fin(bn, bd, lo_n, lo_d) > 0:
                lo_n = bn
                lo_d = bd
        else:
            if dn < 0:
                out.lo = 1
                out.hi = 0
                return 0
    if has_hi and _cmp_fin(hi_n, hi_d, lo_n, lo_d) < 0:
        out.lo = 1
        out.hi = 0
        return 0
    cdef int lo_i = L
    for l in range(L):
        if _cmp_fin(lam_num[l], lam_den[l], lo_n, lo_d) >= 0:
            lo_i = l
            break
    if lo_i >= L:
        out.lo = 1
        out.hi = 0
        return 0
    cdef int hi_i = L - 1
    if has_hi:
        hi_i = -1
        for l in range(L - 1, -1, -1):
            if _cmp_fin(lam_num[l], lam_den[l], hi_n, hi_d) <= 0:
                hi_i = l
                break
    if hi_i < lo_i:
        out.lo = 1
        out.hi = 0
        return 0
    out.lo = <signed char>lo_i
    out.hi = <signed char>hi_i
    return 0


cdef i64* _alloc_i64(Py_ssize_t count) except NULL:
    cdef i64* buf = <i64*>calloc(count, sizeof(i64))
    if buf == NULL:
        raise MemoryError()
    return buf


cdef void _fill_i64(i64* buf, object values):
    cdef Py_ssize_t i
    for i in range(len(values)):
        buf[i] = <i64>values[i]


cdef signed char* _alloc_i8(Py_ssize_t count) except NULL:
    cdef signed char* buf = <signed char*>calloc(count, sizeof(signed char))
    if buf == NULL:
        raise MemoryError()
    return buf


def run_sweeps(payload, q0_num, q0_den, tol_num_py, tol_den_py, max_sweeps_py):
    """Run improvement sweeps; see engine.sweep_pure.run_sweeps for semantics."""
    cdef int R = payload["nrays"]
    cdef int S = payload["nscales"]
    cdef int L = payload["nlams"]
    cdef int n = payload["dim"]
    cdef int P = R * S
    cdef bint certified = payload["certified"]
    cdef bint zero_ok = payload["zero_admissible"]
    cdef i64 tol_n = tol_num_py
    cdef i64 tol_d = tol_den_py
    cdef int max_sweeps = max_sweeps_py

    if L > 120:
        raise OverflowError("lambda grid too large for the kernel")

    cdef i64* coords_num = NULL
    cdef i64* coords_den = NULL
    cdef i64* scale_num = NULL
    cdef i64* scale_den = NULL
    cdef i64* lam_num = NULL
    cdef i64* lam_den = NULL
    cdef signed char* rel = NULL
    cdef signed char* rel0 = NULL
    cdef signed char* ratio_idx = NULL
    cdef i64* hsum_num = NULL
    cdef i64* hsum_den = NULL
    cdef i64* hpt_num = NULL
    cdef i64* hpt_den = NULL
    cdef i64* zero_coords = NULL
    cdef i64* zero_coords_d = NULL
    cdef int* px = NULL
    cdef Interval* feas = NULL
    cdef Interval* feas0 = NULL
    cdef i64* q_num = NULL
    cdef i64* q_den = NULL
    cdef i64* lamA_num = NULL
    cdef i64* lamA_den = NULL
    cdef i64* cand_num = NULL
    cdef i64* cand_den = NULL

    cdef int sweep, gp, xr, hp, yp, l, i, ray_h, sidx, j
    cdef int lo_i, hi_i, step, first, last
    cdef bint a_unconstrained, a_descending, allowed
    cdef i64 a_n, a_d, v_n, v_d, t_n, t_d, qh_n, qh_d
    cdef i64 best_n, best_d, c_n, c_d, inc_n, inc_d
    cdef int sweep_flips, sweep_updates
    cdef bint converged = False

    snapshots = []
    increases = []
    flips_out = []
    updated_out = []

    try:
        coords_num = _alloc_i64(P * n)
        coords_den = _alloc_i64(P * n)
        _fill_i64(coords_num, payload["coords_num"])
        _fill_i64(coords_den, payload["coords_den"])
        scale_num = _alloc_i64(S)
        scale_den = _alloc_i64(S)
        _fill_i64(scale_num, payload["scale_num"])
        _fill_i64(scale_den, payload["scale_den"])
        lam_num = _alloc_i64(L)
        lam_den = _alloc_i64(L)
        _fill_i64(lam_num, payload["lam_num"])
        _fill_i64(lam_den, payload["lam_den"])
        rel = _alloc_i8(P * P)
        for i in range(P * P):
            rel[i] = <signed char>payload["rel"][i]
        rel0 = _alloc_i8(P)
        for i in range(P):
            rel0[i] = <signed char>payload["rel0"][i]
        ratio_idx = _alloc_i8(S * L)
        for i in range(S * L):
            ratio_idx[i] = <signed char>payload["ratio_idx"][i]
        hsum_num = _alloc_i64(P * P)
        hsum_den = _alloc_i64(P * P)
        _fill_i64(hsum_num, payload["hsum_num"])
        _fill_i64(hsum_den, payload["hsum_den"])
        hpt_num = _alloc_i64(P)
        hpt_den = _alloc_i64(P)
        _fill_i64(hpt_num, payload["hpt_num"])
        _fill_i64(hpt_den, payload["hpt_den"])
        px = <int*>calloc(R, sizeof(int))
        if px == NULL:
            raise MemoryError()
        for i in range(R):
            px[i] = <int>payload["px"][i]
        zero_coords = _alloc_i64(n)
        zero_coords_d = _alloc_i64(n)
        for i in range(n):
            zero_coords_d[i] = 1

        q_num = _alloc_i64(R)
        q_den = _alloc_i64(R)
        _fill_i64(q_num, q0_num)
        _fill_i64(q_den, q0_den)
        lamA_num = _alloc_i64(L)
        lamA_den = _alloc_i64(L)
        cand_num = _alloc_i64(R)
        cand_den = _alloc_i64(R)

        # feasible-lambda interval tables, computed once
        feas = <Interval*>calloc(<Py_ssize_t>P * R * P, sizeof(Interval))
        feas0 = <Interval*>calloc(<Py_ssize_t>P * R, sizeof(Interval))
        if feas == NULL or feas0 == NULL:
            raise MemoryError()
        for gp in range(P):
            for xr in range(R):
                for hp in range(P):
                    _interval(
                        coords_num + gp * n, coords_den + gp * n,
                        coords_num + px[xr] * n, coords_den + px[xr] * n,
                        coords_num + hp * n, coords_den + hp * n,
                        n, lam_num, lam_den, L,
                        feas + (<Py_ssize_t>gp * R + xr) * P + hp,
                    )
                _interval(
                    coords_num + gp * n, coords_den + gp * n,
                    coords_num + px[xr] * n, coords_den + px[xr] * n,
                    zero_coords, zero_coords_d,
                    n, lam_num, lam_den, L,
                    feas0 + <Py_ssize_t>gp * R + xr,
                )

        for sweep in range(max_sweeps):
            inc_n = 0
            inc_d = 1
            sweep_flips = 0
            sweep_updates = 0
            for gp in range(P):
                # A value at g with current q
                a_unconstrained = True
                a_n = 0
                a_d = 1
                for yp in range(P):
                    if not rel[yp * P + gp]:
                        continue
                    if q_den[yp // S] == 0:
                        continue
                    _mul_scale(
                        scale_num[yp % S], scale_den[yp % S],
                        q_num[yp // S], q_den[yp // S], &t_n, &t_d,
                    )
                    _sub_finite(
                        hsum_num[gp * P + yp], hsum_den[gp * P + yp],
                        t_n, t_d, &v_n, &v_d,
                    )
                    if a_unconstrained or _le(v_n, v_d, a_n, a_d):
                        a_n = v_n
                        a_d = v_d
                        a_unconstrained = False
                if zero_ok and rel0[gp]:
                    if a_unconstrained or _le(hpt_num[gp], hpt_den[gp], a_n, a_d):
                        a_n = hpt_num[gp]
                        a_d = hpt_den[gp]
                        a_unconstrained = False
                if not a_unconstrained:
                    for l in range(L):
                        _mul_scale(
                            lam_num[l], lam_den[l], a_n, a_d,
                            lamA_num + l, lamA_den + l,
                        )
                    a_descending = a_d != 0 and a_n >= 0
                # frozen-q candidates per target ray
                for xr in range(R):
                    best_n = -1
                    best_d = 0
                    if zero_ok and rel0[px[xr]]:
                        lo_i = feas0[<Py_ssize_t>gp * R + xr].lo
                        hi_i = feas0[<Py_ssize_t>gp * R + xr].hi
                        if lo_i <= hi_i:
                            if a_unconstrained:
                                if lo_i == 0:
                                    best_n = 0
                                    best_d = 1
                            else:
                                first = hi_i if a_descending else lo_i
                                last = lo_i if a_descending else hi_i
                                step = -1 if a_descending else 1
                                l = first
                                while True:
                                    allowed = (l == 0) or (not certified) or rel0[gp]
                                    if allowed:
                                        _add(0, 1, lamA_num[l], lamA_den[l], &c_n, &c_d)
                                        if not _le(c_n, c_d, best_n, best_d):
                                            best_n = c_n
                                            best_d = c_d
                                        break
                                    if l == last:
                                        break
                                    l += step
                    for hp in range(P):
                        if not rel[hp * P + px[xr]]:
                            continue
                        if q_den[hp // S] == 0:
                            continue
                        lo_i = feas[(<Py_ssize_t>gp * R + xr) * P + hp].lo
                        hi_i = feas[(<Py_ssize_t>gp * R + xr) * P + hp].hi
                        if lo_i > hi_i:
                            continue
                        _mul_scale(
                            scale_num[hp % S], scale_den[hp % S],
                            q_num[hp // S], q_den[hp // S], &qh_n, &qh_d,
                        )
                        if a_unconstrained:
                            if lo_i == 0:
                                if not _le(qh_n, qh_d, best_n, best_d):
                                    best_n = qh_n
                                    best_d = qh_d
                            continue
                        ray_h = hp // S
                        sidx = hp % S
                        first = hi_i if a_descending else lo_i
                        last = lo_i if a_descending else hi_i
                        step = -1 if a_descending else 1
                        l = first
                        while True:
                            if l == 0 or not certified:
                                allowed = True
                            else:
                                j = ratio_idx[sidx * L + l]
                                allowed = j >= 0 and rel[(ray_h * S + j) * P + gp]
                            if allowed:
                                _add(qh_n, qh_d, lamA_num[l], lamA_den[l], &c_n, &c_d)
                                if not _le(c_n, c_d, best_n, best_d):
                                    best_n = c_n
                                    best_d = c_d
                                break
                            if l == last:
                                break
                            l += step
                    cand_num[xr] = best_n
                    cand_den[xr] = best_d
                # merge
                for xr in range(R):
                    if _le(cand_num[xr], cand_den[xr], q_num[xr], q_den[xr]):
                        continue
                    if q_den[xr] == 0:
                        sweep_flips += 1
                    else:
                        _sub_finite(
                            cand_num[xr], cand_den[xr],
                            q_num[xr], q_den[xr], &t_n, &t_d,
                        )
                        if _cmp_fin(t_n, t_d, inc_n, inc_d) > 0:
                            inc_n = t_n
                            inc_d = t_d
                    q_num[xr] = cand_num[xr]
                    q_den[xr] = cand_den[xr]
                    sweep_updates += 1
            snap = []
            for xr in range(R):
                snap.append((q_num[xr], q_den[xr]))
            snapshots.append(snap)
            increases.append((inc_n, inc_d))
            flips_out.append(sweep_flips)
            updated_out.append(sweep_updates)
            if sweep_flips == 0 and _cmp_fin(inc_n, inc_d, tol_n, tol_d) <= 0:
                converged = True
                break
    finally:
        free(coords_num); free(coords_den)
        free(scale_num); free(scale_den)
        free(lam_num); free(lam_den)
        free(rel); free(rel0); free(ratio_idx)
        free(hsum_num); free(hsum_den)
        free(hpt_num); free(hpt_den)
        free(zero_coords); free(zero_coords_d)
        free(px); free(feas); free(feas0)
        free(q_num); free(q_den)
        free(lamA_num); free(lamA_den)
        free(cand_num); free(cand_den)

    return {
        "backend": "kernel",
        "snapshots": snapshots,
        "increases": increases,
        "flips": flips_out,
        "updated": updated_out,
        "converged": converged,
    }
