"""Pure-Python finite-field kernels.

Reference implementation of the hot inner loops (channel-state sampling,
NGJV complement matching, per-stage alignment waits).  The compiled module
`_ffcore` implements the same algorithms over the same SplitMix64 stream;
outputs are required to be identical element for element, so this module
doubles as the correctness oracle for the extension.
"""

import numpy as np

from .rng import GOLDEN, MASK64, mix64

IMPLEMENTATION = "python"


def _next(state: int) -> tuple[int, int]:
    state = (state + GOLDEN) & MASK64
    return mix64(state), state


def uniform_nonzero_batch(q: int, count: int, state: int):
    out = np.empty(count, dtype=np.int64)
    qm1 = q - 1
    for i in range(count):
        v, state = _next(state)
        out[i] = 1 + v % qm1
    return out, state


def sample_matrix(q: int, n: int, state: int):
    """One n x n channel state, entries uniform on {1,...,q-1}, row-major draws."""
    flat, state = uniform_nonzero_batch(q, n * n, state)
    return flat.reshape(n, n), state


def ngjv_trial(q: int, n: int, max_slots: int, state: int) -> tuple[int, int]:
    """One NGJV matching wait: draw an initial state whose complement I - H is
    a valid all-nonzero state, then count slots until exactly I - H appears.

    Returns (wait, state); wait is -1 if max_slots was exceeded.
    """
    qm1 = q - 1
    # resample the initial state until every diagonal entry differs from 1,
    # otherwise the complement has a zero diagonal and can never occur
    for _ in range(1_000_000):
        h = []
        ok = True
        for r in range(n):
            for c in range(n):
                v, state = _next(state)
                e = 1 + v % qm1
                h.append(e)
                if r == c and e == 1:
                    ok = False
        if ok:
            break
    else:
        raise RuntimeError("no complementable initial state found")
    target = [((1 if i // n == i % n else 0) - h[i]) % q for i in range(n * n)]
    wait = 0
    nn = n * n
    while wait < max_slots:
        wait += 1
        match = True
        for i in range(nn):
            v, state = _next(state)
            e = 1 + v % qm1
            if e != target[i]:
                match = False
        if match:
            return wait, state
    return -1, state


def _reduce(row, acc, basis, q):
    """Forward-reduce `row` against the echelon `basis`, in place.

    Maintains row_current = row_original - sum_m acc[m] * V_m, where V_m are
    the original stage vectors.  Basis entries are (pivot, brow, bcoef) with
    brow = sum_m bcoef[m] * V_m and brow[pivot] = 1.
    """
    for pivot, brow, bcoef in basis:
        f = row[pivot]
        if f:
            for idx in range(len(row)):
                row[idx] = (row[idx] - f * brow[idx]) % q
            for idx in range(len(acc)):
                acc[idx] = (acc[idx] + f * bcoef[idx]) % q
    return row, acc


def stage_wait(q, n, targets, vrows, diags, max_slots, state):
    """Wait for the first channel state that completes, simultaneously for
    every target receiver, a linear dependence of the interference vectors
    with a nonzero direct-coefficient combination.

    targets : receiver indices (0-based), length T
    vrows   : (T, k, n-1) interference rows of the k already-selected states
    diags   : (T, k) matching direct coefficients
    Returns (wait, winning_matrix, state); wait is -1 on truncation (the
    returned matrix is then the last one drawn).
    """
    targets = [int(t) for t in targets]
    ntarg = len(targets)
    m = n - 1
    k = 0 if ntarg == 0 else len(diags[0])

    # Per-target echelon basis of the existing interference vectors, with
    # combination tracking.  A vector that reduces to zero yields a null
    # combination lambda; if lambda . d != 0 the receiver can already
    # recover without the new state and always passes.
    bases = []
    dvecs = []
    auto = []
    for t in range(ntarg):
        basis = []
        dvec = [int(x) % q for x in diags[t]]
        null_good = False
        for s in range(k):
            row = [int(x) % q for x in vrows[t][s]]
            acc = [0] * k
            row, acc = _reduce(row, acc, basis, q)
            pivot = next((i for i in range(m) if row[i]), None)
            if pivot is None:
                # null vector: lambda = e_s - acc
                lam = [(-a) % q for a in acc]
                lam[s] = (lam[s] + 1) % q
                if sum(l * d for l, d in zip(lam, dvec)) % q != 0:
                    null_good = True
            else:
                inv = pow(row[pivot], q - 2, q)
                brow = [(x * inv) % q for x in row]
                bcoef = [(-a * inv) % q for a in acc]
                bcoef[s] = (bcoef[s] + inv) % q
                basis.append((pivot, brow, bcoef))
        bases.append(basis)
        dvecs.append(dvec)
        auto.append(null_good)

    all_auto = all(auto) if ntarg else True
    qm1 = q - 1
    wait = 0
    mat = [0] * (n * n)
    while wait < max_slots:
        wait += 1
        for i in range(n * n):
            v, state = _next(state)
            mat[i] = 1 + v % qm1
        if all_auto:
            break
        ok = True
        for t in range(ntarg):
            if auto[t]:
                continue
            j = targets[t]
            w = [mat[j * n + c] for c in range(n) if c != j]
            delta = mat[j * n + j]
            acc = [0] * k
            w, acc = _reduce(w, acc, bases[t], q)
            if any(w):
                ok = False
                break
            # w = sum acc[m] V_m, so lambda = (acc, -1)
            comb = (sum(a * d for a, d in zip(acc, dvecs[t])) - delta) % q
            if comb == 0:
                ok = False
                break
        if ok:
            break
    else:
        return -1, np.array(mat, dtype=np.int64).reshape(n, n), state
    return wait, np.array(mat, dtype=np.int64).reshape(n, n), state
