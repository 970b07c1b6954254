# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled exhaustive-enumeration kernel (int64 weights).

Same contract as the pure backend in ``_enumpy``; the caller guarantees that
denom**n fits in a signed 64-bit integer so no weight or count can overflow.
"""

from libc.stdlib cimport calloc, free
from libc.stdint cimport int64_t


cdef struct EnumCtx:
    int n
    int n_steps
    int lo          # lowest representable altitude
    int width       # altitude slots per time level
    int hwidth      # height slots per time level
    int *jumps
    int64_t *numers
    int64_t reset_numer
    int64_t *alt
    int64_t *hgt


cdef void dfs(EnumCtx *ctx, int t, int alt, int high, int64_t weight) noexcept:
    cdef int i, a
    ctx.alt[t * ctx.width + (alt - ctx.lo)] += weight
    ctx.hgt[t * ctx.hwidth + high] += weight
    if t == ctx.n:
        return
    for i in range(ctx.n_steps):
        a = alt + ctx.jumps[i]
        dfs(ctx, t + 1, a, a if a > high else high, weight * ctx.numers[i])
    dfs(ctx, t + 1, 0, high, weight * ctx.reset_numer)


def joint_counts(jumps, numers, reset_numer, n):
    cdef EnumCtx ctx
    cdef int i, t, k
    cdef int c = min(jumps), d = max(jumps)
    cdef int hi

    ctx.n = n
    ctx.n_steps = len(jumps)
    ctx.lo = c * n if c < 0 else 0
    hi = d * n if d > 0 else 0
    ctx.width = hi - ctx.lo + 1
    ctx.hwidth = (d * n if d > 0 else 0) + 1
    ctx.jumps = <int *> calloc(ctx.n_steps, sizeof(int))
    ctx.numers = <int64_t *> calloc(ctx.n_steps, sizeof(int64_t))
    ctx.alt = <int64_t *> calloc((n + 1) * ctx.width, sizeof(int64_t))
    ctx.hgt = <int64_t *> calloc((n + 1) * ctx.hwidth, sizeof(int64_t))
    if not (ctx.jumps and ctx.numers and ctx.alt and ctx.hgt):
        free(ctx.jumps); free(ctx.numers); free(ctx.alt); free(ctx.hgt)
        raise MemoryError
    for i in range(ctx.n_steps):
        ctx.jumps[i] = jumps[i]
        ctx.numers[i] = numers[i]
    ctx.reset_numer = reset_numer

    try:
        dfs(&ctx, 0, 0, 0, 1)
        alt_counts = []
        h_counts = []
        for t in range(n + 1):
            row = {}
            for k in range(ctx.width):
                if ctx.alt[t * ctx.width + k]:
                    row[ctx.lo + k] = ctx.alt[t * ctx.width + k]
            alt_counts.append(row)
            row = {}
            for k in range(ctx.hwidth):
                if ctx.hgt[t * ctx.hwidth + k]:
                    row[k] = ctx.hgt[t * ctx.hwidth + k]
            h_counts.append(row)
        return alt_counts, h_counts
    finally:
        free(ctx.jumps)
        free(ctx.numers)
        free(ctx.alt)
        free(ctx.hgt)
