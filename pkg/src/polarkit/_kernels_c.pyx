"""Compiled decoding kernels (Cython).

Operation-for-operation mirror of ``polarkit._kernels_py``: same LLR
combine formulas, same candidate ordering and tie-breaks, same slot
assignment, so both backends produce identical decisions. See the
pure-Python module for the layout documentation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log1p
from libc.string cimport memcpy, memset

cnp.import_array()

BACKEND = "native"

cdef double LLR_CLAMP = 40.0
cdef double EXP_CUTOFF = 37.0


cdef inline double _f_comb(double a, double b) nogil:
    cdef double sab, sad, aa, ab, r
    if a > LLR_CLAMP:
        a = LLR_CLAMP
    elif a < -LLR_CLAMP:
        a = -LLR_CLAMP
    if b > LLR_CLAMP:
        b = LLR_CLAMP
    elif b < -LLR_CLAMP:
        b = -LLR_CLAMP
    sab = fabs(a + b)
    sad = fabs(a - b)
    aa = fabs(a)
    ab = fabs(b)
    r = aa if aa < ab else ab
    if (a < 0.0) != (b < 0.0):
        r = -r
    if sab < EXP_CUTOFF:
        r += log1p(exp(-sab))
    if sad < EXP_CUTOFF:
        r -= log1p(exp(-sad))
    return r


cdef inline double _softplus_neg(double s) nogil:
    cdef double r = log1p(exp(-fabs(s)))
    if s < 0.0:
        r -= s
    return r


cdef inline int _tz(long i) nogil:
    cdef int k = 0
    while not (i >> k) & 1:
        k += 1
    return k


def polar_encode(u):
    cdef cnp.uint8_t[::1] x = np.array(u, dtype=np.uint8, copy=True)
    cdef long N = x.shape[0], h = N >> 1, s, j
    while h >= 1:
        s = 0
        while s < N:
            for j in range(h):
                x[s + j] ^= x[s + h + j]
            s += 2 * h
        h >>= 1
    return np.asarray(x)


cdef void _msort(double* key, int* idx, int* tmp, int lo, int hi) noexcept nogil:
    # stable sort of idx[lo:hi) by key descending
    cdef int mid, a, b, t
    if hi - lo < 2:
        return
    mid = (lo + hi) // 2
    _msort(key, idx, tmp, lo, mid)
    _msort(key, idx, tmp, mid, hi)
    a = lo
    b = mid
    t = lo
    while a < mid and b < hi:
        if key[idx[b]] > key[idx[a]]:
            tmp[t] = idx[b]
            b += 1
        else:
            tmp[t] = idx[a]
            a += 1
        t += 1
    while a < mid:
        tmp[t] = idx[a]
        a += 1
        t += 1
    while b < hi:
        tmp[t] = idx[b]
        b += 1
        t += 1
    memcpy(idx + lo, tmp + lo, (hi - lo) * sizeof(int))


cdef void _update_llrs_c(double* lv, cnp.uint8_t* ps, const double* chan,
                         long* off, long N, long n, long i,
                         double* theta) noexcept nogil:
    cdef long s_start, s, half, j
    cdef double* src
    cdef double* dst
    cdef cnp.uint8_t* pb
    if n == 0:
        theta[0] = chan[0]
        return
    s_start = 1 if i == 0 else n - _tz(i)
    for s in range(s_start, n + 1):
        half = N >> s
        src = chan if s == 1 else lv + off[s - 1]
        dst = lv + off[s]
        if s == s_start and i > 0:
            pb = ps + off[s]
            for j in range(half):
                dst[j] = (src[j] if pb[j] == 0 else -src[j]) + src[j + half]
        else:
            for j in range(half):
                dst[j] = _f_comb(src[j], src[j + half])
    theta[0] = lv[off[n]]


cdef void _update_psums_c(cnp.uint8_t* ps, long* off, long N, long n,
                          long i, int u, cnp.uint8_t* bufa,
                          cnp.uint8_t* bufb) noexcept nogil:
    cdef long s = n, clen = 1, j
    cdef cnp.uint8_t* carry = bufa
    cdef cnp.uint8_t* nxt = bufb
    cdef cnp.uint8_t* stored
    cdef cnp.uint8_t* swp
    if n == 0:
        return
    carry[0] = <cnp.uint8_t> u
    while s >= 1 and (i >> (n - s)) & 1:
        stored = ps + off[s]
        for j in range(clen):
            nxt[j] = stored[j] ^ carry[j]
            nxt[clen + j] = carry[j]
        swp = carry
        carry = nxt
        nxt = swp
        clen *= 2
        s -= 1
    if s >= 1:
        memcpy(ps + off[s], carry, clen)


def sc_decode(chan_llr, frozen):
    cdef const double[::1] chan = np.ascontiguousarray(chan_llr, dtype=np.float64)
    cdef const cnp.uint8_t[::1] frz = np.ascontiguousarray(frozen, dtype=np.uint8)
    cdef long N = chan.shape[0]
    cdef long n = 0
    while (1 << n) < N:
        n += 1
    out = np.zeros(N, dtype=np.uint8)
    cdef cnp.uint8_t[::1] hist = out
    lv_arr = np.zeros(max(N - 1, 1), dtype=np.float64)
    ps_arr = np.zeros(max(N - 1, 1), dtype=np.uint8)
    buf_arr = np.zeros(2 * N, dtype=np.uint8)
    off_arr = np.zeros(n + 2, dtype=np.int64)
    cdef double[::1] lv = lv_arr
    cdef cnp.uint8_t[::1] ps = ps_arr
    cdef cnp.uint8_t[::1] buf = buf_arr
    cdef long[::1] off = off_arr
    cdef long s, i
    cdef int bit
    cdef double theta
    for s in range(2, n + 2):
        off[s] = off[s - 1] + (N >> (s - 1))
    with nogil:
        for i in range(N):
            _update_llrs_c(&lv[0], &ps[0], &chan[0], &off[0], N, n, i, &theta)
            bit = 0 if frz[i] else (1 if theta < 0.0 else 0)
            hist[i] = <cnp.uint8_t> bit
            _update_psums_c(&ps[0], &off[0], N, n, i, bit, &buf[0], &buf[N])
    return out


def scl_decode(chan_llr, frozen, L, ref_u=None):
    cdef const double[::1] chan = np.ascontiguousarray(chan_llr, dtype=np.float64)
    cdef const cnp.uint8_t[::1] frz = np.ascontiguousarray(frozen, dtype=np.uint8)
    cdef long N = chan.shape[0]
    cdef long n = 0
    cdef long LL = L
    while (1 << n) < N:
        n += 1
    if LL < 1 or (LL & (LL - 1)) != 0:
        raise ValueError(f"list size must be a power of two, got {L}")

    cdef long row = max(N - 1, 1)
    lv_arr = np.zeros((LL, row), dtype=np.float64)
    ps_arr = np.zeros((LL, row), dtype=np.uint8)
    hist_arr = np.zeros((LL, N), dtype=np.uint8)
    met_arr = np.zeros(LL, dtype=np.float64)
    off_arr = np.zeros(n + 2, dtype=np.int64)
    buf_arr = np.zeros(2 * N, dtype=np.uint8)
    cdef double[:, ::1] lv = lv_arr
    cdef cnp.uint8_t[:, ::1] ps = ps_arr
    cdef cnp.uint8_t[:, ::1] hist = hist_arr
    cdef double[::1] met = met_arr
    cdef long[::1] off = off_arr
    cdef cnp.uint8_t[::1] buf = buf_arr

    cdef int track = 0
    cdef const cnp.uint8_t[::1] ref
    ref_member_arr = None
    cdef cnp.uint8_t[::1] refmem
    if ref_u is not None:
        track = 1
        ref = np.ascontiguousarray(ref_u, dtype=np.uint8)
        ref_member_arr = np.zeros(N, dtype=np.uint8)
        refmem = ref_member_arr

    theta_arr = np.zeros(LL, dtype=np.float64)
    cm_arr = np.zeros(2 * LL, dtype=np.float64)
    order_arr = np.zeros(2 * LL, dtype=np.intc)
    tmp_arr = np.zeros(2 * LL, dtype=np.intc)
    cand_slot_arr = np.zeros(2 * LL, dtype=np.intc)
    sel_arr = np.zeros(2 * LL, dtype=np.uint8)
    free_arr = np.zeros(LL, dtype=np.intc)
    cdef double[::1] theta = theta_arr
    cdef double[::1] cm = cm_arr
    cdef int[::1] order = order_arr
    cdef int[::1] tmp = tmp_arr
    cdef int[::1] cand_slot = cand_slot_arr
    cdef cnp.uint8_t[::1] sel = sel_arr
    cdef int[::1] freelist = free_arr

    cdef long s, i, p, q, c, t, keep, active = 1, twoA
    cdef long ref_slot = 0, first_loss = -1
    cdef int nfree, fhead, next_new, in0, in1, b, err = 0
    cdef double th

    for s in range(2, n + 2):
        off[s] = off[s - 1] + (N >> (s - 1))

    with nogil:
        for i in range(N):
            for p in range(active):
                _update_llrs_c(&lv[p, 0], &ps[p, 0], &chan[0], &off[0], N, n, i, &th)
                theta[p] = th
            if frz[i]:
                for p in range(active):
                    met[p] -= _softplus_neg(theta[p])
                    hist[p, i] = 0
                    _update_psums_c(&ps[p, 0], &off[0], N, n, i, 0, &buf[0], &buf[N])
                if track and ref_slot >= 0 and ref[i] != 0:
                    err = 1
                    break
            else:
                twoA = 2 * active
                for p in range(active):
                    cm[2 * p] = met[p] - _softplus_neg(theta[p])
                    cm[2 * p + 1] = met[p] - _softplus_neg(-theta[p])
                keep = LL if LL < twoA else twoA
                for c in range(twoA):
                    order[c] = <int> c
                _msort(&cm[0], &order[0], &tmp[0], 0, <int> twoA)
                memset(&sel[0], 0, twoA)
                for t in range(keep):
                    sel[order[t]] = 1
                for c in range(twoA):
                    cand_slot[c] = -1

                nfree = 0
                for p in range(active):
                    if not sel[2 * p] and not sel[2 * p + 1]:
                        freelist[nfree] = <int> p
                        nfree += 1
                fhead = 0
                next_new = <int> active
                for p in range(active):
                    in0 = sel[2 * p]
                    in1 = sel[2 * p + 1]
                    if in0 and in1:
                        if fhead < nfree:
                            q = freelist[fhead]
                            fhead += 1
                        else:
                            q = next_new
                            next_new += 1
                        memcpy(&lv[q, 0], &lv[p, 0], row * sizeof(double))
                        memcpy(&ps[q, 0], &ps[p, 0], row)
                        memcpy(&hist[q, 0], &hist[p, 0], N)
                        hist[p, i] = 0
                        met[p] = cm[2 * p]
                        hist[q, i] = 1
                        met[q] = cm[2 * p + 1]
                        cand_slot[2 * p] = <int> p
                        cand_slot[2 * p + 1] = <int> q
                    elif in0 or in1:
                        b = 0 if in0 else 1
                        hist[p, i] = <cnp.uint8_t> b
                        met[p] = cm[2 * p + b]
                        cand_slot[2 * p + b] = <int> p
                active = keep
                for p in range(active):
                    _update_psums_c(&ps[p, 0], &off[0], N, n, i, hist[p, i],
                                    &buf[0], &buf[N])
                if track and ref_slot >= 0:
                    ref_slot = cand_slot[2 * ref_slot + ref[i]]
                    if ref_slot < 0:
                        first_loss = i + 1
            if track:
                refmem[i] = 1 if ref_slot >= 0 else 0

    if err:
        raise ValueError("reference path sets a frozen bit to 1")

    metrics = met_arr[:active].copy()
    best = int(np.flatnonzero(metrics == metrics.max())[0])
    paths = hist_arr[:active].copy()
    if track:
        return paths, metrics, best, ref_member_arr, first_loss
    return paths, metrics, best, None, -1


def weight_spectrum(rows):
    cdef const cnp.uint8_t[:, ::1] R = np.ascontiguousarray(rows, dtype=np.uint8)
    cdef long K = R.shape[0], N = R.shape[1]
    counts_arr = np.zeros(N + 1, dtype=np.int64)
    cdef long[::1] counts = counts_arr
    cw_arr = np.zeros(N, dtype=np.uint8)
    cdef cnp.uint8_t[::1] cw = cw_arr

    # flatten row supports
    sup_off_arr = np.zeros(K + 1, dtype=np.int64)
    cdef long[::1] sup_off = sup_off_arr
    cdef long j, t2, total = 0
    for j in range(K):
        for t2 in range(N):
            if R[j, t2]:
                total += 1
        sup_off[j + 1] = total
    sup_arr = np.zeros(max(total, 1), dtype=np.int64)
    cdef long[::1] sup = sup_arr
    total = 0
    for j in range(K):
        for t2 in range(N):
            if R[j, t2]:
                sup[total] = t2
                total += 1

    counts[0] = 1
    cdef long w = 0, t, r, idx
    with nogil:
        for t in range(1, 1 << K):
            j = _tz(t)
            for r in range(sup_off[j], sup_off[j + 1]):
                idx = sup[r]
                if cw[idx]:
                    w -= 1
                    cw[idx] = 0
                else:
                    w += 1
                    cw[idx] = 1
            counts[w] += 1
    return counts_arr
