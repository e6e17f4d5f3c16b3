"""Pure-Python decoding kernels.

Reference implementation of the hot kernels; the compiled module
``polarkit._kernels_c`` mirrors this logic operation-for-operation, and
the scalar math here deliberately goes through ``math.log1p``/``math.exp``
(the same libm calls the C code makes) so both backends produce
bit-identical decisions even on metric ties deep inside the combine
tree. Selected at import by ``polarkit.kernels``.

Internals use 0-based bit indices and the natural ordering of
x = u G (no bit-reversal). Per-path state:

* ``lv``   - LLR work arrays for levels 1..n, level s holds N/2^s values
             at offset ``off[s]``; level 0 is the shared channel LLR vector.
* ``ps``   - partial sums: the re-encoded left-subtree codeword awaiting
             use by the g-update at the same level, same layout as ``lv``.
* ``hist`` - decided bit sequence of the path.

Path metric is ln P(u_1^i | y) up to a common constant: every step adds
-ln(1 + exp(-(1-2u) * llr)), frozen bits included.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

LLR_CLAMP = 40.0
_EXP_CUTOFF = 37.0


def _f_scalar(a, b):
    """Check-node combine 2*atanh(tanh(a/2)*tanh(b/2)), exact log-domain form."""
    c = LLR_CLAMP
    if a > c:
        a = c
    elif a < -c:
        a = -c
    if b > c:
        b = c
    elif b < -c:
        b = -c
    sab = abs(a + b)
    sad = abs(a - b)
    r = min(abs(a), abs(b))
    if (a < 0.0) != (b < 0.0):
        r = -r
    if sab < _EXP_CUTOFF:
        r += math.log1p(math.exp(-sab))
    if sad < _EXP_CUTOFF:
        r -= math.log1p(math.exp(-sad))
    return r


def _softplus_neg(s):
    """ln(1 + exp(-s)), stable for any s."""
    r = math.log1p(math.exp(-abs(s)))
    if s < 0.0:
        r -= s
    return r


def polar_encode(u):
    """x = u G over GF(2) (butterfly, involutive)."""
    x = np.array(u, dtype=np.uint8, copy=True)
    h = x.size >> 1
    while h >= 1:
        blocks = x.reshape(-1, 2 * h)
        blocks[:, :h] ^= blocks[:, h:]
        h >>= 1
    return x


def _level_offsets(N, n):
    off = np.zeros(n + 2, dtype=np.int64)
    for s in range(2, n + 2):
        off[s] = off[s - 1] + (N >> (s - 1))
    return off  # off[s] for s in 1..n, off[n+1] == N-1


def _trailing_zeros(i):
    return (i & -i).bit_length() - 1


class _PathState:
    """Workspace shared by the SC and SCL loops."""

    def __init__(self, chan_llr, slots, N, n):
        self.chan = [float(v) for v in np.asarray(chan_llr, dtype=np.float64)]
        self.N = N
        self.n = n
        self.off = _level_offsets(N, n)
        width = max(N - 1, 1)
        self.lv = [[0.0] * width for _ in range(slots)]
        self.ps = [[0] * width for _ in range(slots)]
        self.hist = np.zeros((slots, N), dtype=np.uint8)
        self.metric = [0.0] * slots

    def update_llrs(self, p, i):
        """Refresh levels s_start..n for path p before deciding bit i; return leaf LLR."""
        N, n, off = self.N, self.n, self.off
        if n == 0:
            return self.chan[0]
        s_start = 1 if i == 0 else n - _trailing_zeros(i)
        lv = self.lv[p]
        ps = self.ps[p]
        for s in range(s_start, n + 1):
            half = N >> s
            src = self.chan if s == 1 else lv
            base = 0 if s == 1 else off[s - 1]
            dst = off[s]
            if s == s_start and i > 0:
                for j in range(half):
                    a = src[base + j]
                    lv[dst + j] = (a if ps[dst + j] == 0 else -a) + src[base + half + j]
            else:
                for j in range(half):
                    lv[dst + j] = _f_scalar(src[base + j], src[base + half + j])
        return lv[off[n]]

    def update_psums(self, p, i, u):
        """Propagate decided bit i of path p into the partial-sum tree."""
        N, n, off = self.N, self.n, self.off
        if n == 0:
            return
        ps = self.ps[p]
        carry = [u]
        s = n
        while s >= 1 and ((i >> (n - s)) & 1):
            base = off[s]
            carry = [ps[base + j] ^ carry[j] for j in range(len(carry))] + carry
            s -= 1
        if s >= 1:
            base = off[s]
            ps[base : base + len(carry)] = carry

    def clone(self, src, dst):
        self.lv[dst] = list(self.lv[src])
        self.ps[dst] = list(self.ps[src])
        self.hist[dst] = self.hist[src]
        self.metric[dst] = self.metric[src]


def sc_decode(chan_llr, frozen):
    """Successive cancellation decode; frozen positions forced to 0, ties to 0."""
    chan_llr = np.asarray(chan_llr, dtype=np.float64)
    N = chan_llr.size
    n = N.bit_length() - 1
    st = _PathState(chan_llr, 1, N, n)
    for i in range(N):
        theta = st.update_llrs(0, i)
        bit = 0 if frozen[i] else int(theta < 0)
        st.hist[0, i] = bit
        st.update_psums(0, i, bit)
    return st.hist[0].copy()


def scl_decode(chan_llr, frozen, L, ref_u=None):
    """Breadth-first SCL decode with exact log-domain path metrics.

    Returns ``(paths, metrics, best, ref_member, first_loss)`` where
    ``paths`` is the final list (uint8[active, N]), ``best`` the index of
    the metric-best path (ties to the lower slot), ``ref_member`` a
    uint8[N] survivor-membership trace of the reference path (all zeros
    past the loss step) or None, and ``first_loss`` the 1-based step at
    which the reference path left the list (-1 if never, or no reference).
    """
    chan_llr = np.asarray(chan_llr, dtype=np.float64)
    N = chan_llr.size
    n = N.bit_length() - 1
    if L < 1 or (L & (L - 1)) != 0:
        raise ValueError(f"list size must be a power of two, got {L}")
    st = _PathState(chan_llr, L, N, n)
    active = 1

    track = ref_u is not None
    if track:
        ref_u = np.asarray(ref_u, dtype=np.uint8)
        ref_member = np.zeros(N, dtype=np.uint8)
    ref_slot, first_loss = 0, -1

    for i in range(N):
        thetas = [st.update_llrs(p, i) for p in range(active)]
        if frozen[i]:
            for p in range(active):
                st.metric[p] -= _softplus_neg(thetas[p])
                st.hist[p, i] = 0
                st.update_psums(p, i, 0)
            if track and ref_slot >= 0 and ref_u[i] != 0:
                raise ValueError("reference path sets a frozen bit to 1")
        else:
            # candidate c = 2p + b, ordered (parent asc, bit asc)
            cm = [0.0] * (2 * active)
            for p in range(active):
                cm[2 * p] = st.metric[p] - _softplus_neg(thetas[p])
                cm[2 * p + 1] = st.metric[p] - _softplus_neg(-thetas[p])
            keep = min(L, 2 * active)
            order = sorted(range(2 * active), key=lambda c: (-cm[c], c))
            selected = set(order[:keep])

            free = [p for p in range(active) if not ({2 * p, 2 * p + 1} & selected)]
            next_new = active
            cand_slot = {}
            for p in range(active):
                c0, c1 = 2 * p, 2 * p + 1
                in0, in1 = c0 in selected, c1 in selected
                if in0 and in1:
                    if free:
                        q = free.pop(0)
                    else:
                        q, next_new = next_new, next_new + 1
                    st.clone(p, q)
                    st.hist[p, i], st.metric[p] = 0, cm[c0]
                    st.hist[q, i], st.metric[q] = 1, cm[c1]
                    cand_slot[c0], cand_slot[c1] = p, q
                elif in0 or in1:
                    b = 0 if in0 else 1
                    st.hist[p, i], st.metric[p] = b, cm[2 * p + b]
                    cand_slot[2 * p + b] = p
            active = keep
            for p in range(active):
                st.update_psums(p, i, int(st.hist[p, i]))

            if track and ref_slot >= 0:
                ref_slot = cand_slot.get(2 * ref_slot + int(ref_u[i]), -1)
                if ref_slot < 0:
                    first_loss = i + 1
        if track:
            ref_member[i] = 1 if ref_slot >= 0 else 0

    metrics = np.asarray(st.metric[:active], dtype=np.float64)
    best = int(np.flatnonzero(metrics == metrics.max())[0])
    paths = st.hist[:active].copy()
    if track:
        return paths, metrics, best, ref_member, first_loss
    return paths, metrics, best, None, -1


def weight_spectrum(rows):
    """Weight spectrum of the span of ``rows`` (uint8[K, N]) by Gray-code walk."""
    rows = np.asarray(rows, dtype=np.uint8)
    K, N = rows.shape
    counts = np.zeros(N + 1, dtype=np.int64)
    counts[0] = 1
    cw = np.zeros(N, dtype=np.uint8)
    w = 0
    supports = [np.flatnonzero(rows[j]) for j in range(K)]
    for t in range(1, 1 << K):
        j = _trailing_zeros(t)
        sup = supports[j]
        flipped = cw[sup]
        w += int(sup.size) - 2 * int(flipped.sum())
        cw[sup] ^= 1
        counts[w] += 1
    return counts
