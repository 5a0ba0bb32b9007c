# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled finite-field kernels.

Bit-for-bit identical to `pyfallback` (same SplitMix64 stream, same draw
order, same elimination algorithm); selected automatically at import when
the extension built.
"""

import numpy as np

IMPLEMENTATION = "compiled"

cdef extern from *:
    """
    #include <stdint.h>
    static const uint64_t IALAB_GOLDEN = 0x9E3779B97F4A7C15ULL;
    static uint64_t ialab_mix64(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    """
    unsigned long long IALAB_GOLDEN
    unsigned long long ialab_mix64(unsigned long long z) nogil


cdef inline unsigned long long _next(unsigned long long *state) noexcept nogil:
    state[0] = state[0] + IALAB_GOLDEN
    return ialab_mix64(state[0])


cdef inline long _draw_nonzero(long q, unsigned long long *state) noexcept nogil:
    return 1 + <long>(_next(state) % <unsigned long long>(q - 1))


cdef inline long _modpow(long base, long expo, long q) noexcept nogil:
    cdef long result = 1
    base %= q
    while expo > 0:
        if expo & 1:
            result = (result * base) % q
        base = (base * base) % q
        expo >>= 1
    return result


def uniform_nonzero_batch(long q, long count, state):
    cdef unsigned long long s = <unsigned long long>(int(state))
    out = np.empty(count, dtype=np.int64)
    cdef long[:] mv = out
    cdef long i
    for i in range(count):
        mv[i] = _draw_nonzero(q, &s)
    return out, int(s)


def sample_matrix(long q, long n, state):
    flat, s = uniform_nonzero_batch(q, n * n, state)
    return flat.reshape(n, n), s


def ngjv_trial(long q, long n, long max_slots, state):
    cdef unsigned long long s = <unsigned long long>(int(state))
    cdef long qm1 = q - 1
    cdef long nn = n * n
    h_arr = np.empty(nn, dtype=np.int64)
    target_arr = np.empty(nn, dtype=np.int64)
    cdef long[:] h = h_arr
    cdef long[:] target = target_arr
    cdef long i, r, c, e, attempt
    cdef bint ok = False, match
    cdef long wait = 0
    for attempt in range(1_000_000):
        ok = True
        i = 0
        for r in range(n):
            for c in range(n):
                e = _draw_nonzero(q, &s)
                h[i] = e
                if r == c and e == 1:
                    ok = False
                i += 1
        if ok:
            break
    if not ok:
        raise RuntimeError("no complementable initial state found")
    for i in range(nn):
        r = i // n
        c = i % n
        target[i] = ((1 if r == c else 0) - h[i]) % q
        if target[i] < 0:
            target[i] += q
    while wait < max_slots:
        wait += 1
        match = True
        for i in range(nn):
            e = _draw_nonzero(q, &s)
            if e != target[i]:
                match = False
        if match:
            return wait, int(s)
    return -1, int(s)


def stage_wait(long q, long n, targets_in, vrows_in, diags_in, long max_slots, state):
    cdef unsigned long long s = <unsigned long long>(int(state))
    targets_a = np.ascontiguousarray(np.asarray(targets_in, dtype=np.int64).reshape(-1))
    cdef long ntarg = targets_a.shape[0]
    cdef long m = n - 1
    cdef long k = 0
    if ntarg > 0:
        diags_a = np.ascontiguousarray(np.asarray(diags_in, dtype=np.int64))
        vrows_a = np.ascontiguousarray(np.asarray(vrows_in, dtype=np.int64))
        k = diags_a.shape[1]
    else:
        diags_a = np.zeros((1, 1), dtype=np.int64)
        vrows_a = np.zeros((1, 1, 1), dtype=np.int64)

    cdef long[:] targets = targets_a
    cdef long[:, :] diags = diags_a
    cdef long[:, :, :] vrows = vrows_a

    # workspace: per-target echelon basis with combination tracking
    cdef long mm = m if m > 0 else 1
    cdef long kk = k if k > 0 else 1
    brow_a = np.zeros((ntarg if ntarg else 1, kk, mm), dtype=np.int64)
    bcoef_a = np.zeros((ntarg if ntarg else 1, kk, kk), dtype=np.int64)
    pivot_a = np.zeros((ntarg if ntarg else 1, kk), dtype=np.int64)
    nbasis_a = np.zeros(ntarg if ntarg else 1, dtype=np.int64)
    dvec_a = np.zeros((ntarg if ntarg else 1, kk), dtype=np.int64)
    auto_a = np.zeros(ntarg if ntarg else 1, dtype=np.int64)
    row_a = np.zeros(mm, dtype=np.int64)
    acc_a = np.zeros(kk, dtype=np.int64)
    mat_a = np.zeros(n * n, dtype=np.int64)

    cdef long[:, :, :] brow = brow_a
    cdef long[:, :, :] bcoef = bcoef_a
    cdef long[:, :] pivots = pivot_a
    cdef long[:] nbasis = nbasis_a
    cdef long[:, :] dvec = dvec_a
    cdef long[:] auto = auto_a
    cdef long[:] row = row_a
    cdef long[:] acc = acc_a
    cdef long[:] mat = mat_a

    cdef long t, sidx, i, b, f, piv, inv, total, j, c, delta, comb
    cdef bint null_good, all_auto, ok

    for t in range(ntarg):
        null_good = False
        for i in range(k):
            dvec[t, i] = diags[t, i] % q
        for sidx in range(k):
            for i in range(m):
                row[i] = vrows[t, sidx, i] % q
            for i in range(k):
                acc[i] = 0
            for b in range(nbasis[t]):
                piv = pivots[t, b]
                f = row[piv]
                if f:
                    for i in range(m):
                        row[i] = (row[i] - f * brow[t, b, i]) % q
                        if row[i] < 0:
                            row[i] += q
                    for i in range(k):
                        acc[i] = (acc[i] + f * bcoef[t, b, i]) % q
            piv = -1
            for i in range(m):
                if row[i]:
                    piv = i
                    break
            if piv < 0:
                # null vector lambda = e_sidx - acc
                total = 0
                for i in range(k):
                    f = (-acc[i]) % q
                    if f < 0:
                        f += q
                    if i == sidx:
                        f = (f + 1) % q
                    total = (total + f * dvec[t, i]) % q
                if total != 0:
                    null_good = True
            else:
                inv = _modpow(row[piv], q - 2, q)
                b = nbasis[t]
                pivots[t, b] = piv
                for i in range(m):
                    brow[t, b, i] = (row[i] * inv) % q
                for i in range(k):
                    f = (-acc[i] * inv) % q
                    if f < 0:
                        f += q
                    if i == sidx:
                        f = (f + inv) % q
                    bcoef[t, b, i] = f
                nbasis[t] = b + 1
        auto[t] = 1 if null_good else 0

    all_auto = True
    for t in range(ntarg):
        if not auto[t]:
            all_auto = False
            break

    cdef long wait = 0
    cdef bint done = False
    while wait < max_slots:
        wait += 1
        for i in range(n * n):
            mat[i] = _draw_nonzero(q, &s)
        if all_auto:
            done = True
            break
        ok = True
        for t in range(ntarg):
            if auto[t]:
                continue
            j = targets[t]
            i = 0
            for c in range(n):
                if c != j:
                    row[i] = mat[j * n + c]
                    i += 1
            delta = mat[j * n + j]
            for i in range(k):
                acc[i] = 0
            for b in range(nbasis[t]):
                piv = pivots[t, b]
                f = row[piv]
                if f:
                    for i in range(m):
                        row[i] = (row[i] - f * brow[t, b, i]) % q
                        if row[i] < 0:
                            row[i] += q
                    for i in range(k):
                        acc[i] = (acc[i] + f * bcoef[t, b, i]) % q
            for i in range(m):
                if row[i]:
                    ok = False
                    break
            if not ok:
                break
            comb = 0
            for i in range(k):
                comb = (comb + acc[i] * dvec[t, i]) % q
            comb = (comb - delta) % q
            if comb < 0:
                comb += q
            if comb == 0:
                ok = False
                break
        if ok:
            done = True
            break
    if not done:
        return -1, mat_a.reshape(n, n).copy(), int(s)
    return wait, mat_a.reshape(n, n).copy(), int(s)
