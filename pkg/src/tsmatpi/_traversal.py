"""Compiled depth-first traversal of the path quadtree.

One call handles one root pair state of one kernel family.

The partial sums of a node at depth ``k`` are kept as ``S_k[n] = c_k W_k[n]``
with a scalar scale ``c_k`` (the product of step weights along the path).
A child's raw values are

    W_{k+1}[n] = B_k[n] * prod_{l=n+1}^{k-1} F(k+1, l),
    B_k[n]     = sum_{j<n} (F(k,j) - 1) W_k[j] + F(k,n) W_k[n],

and ``B_k`` depends only on the parent, so it is formed once and shared by
all four children.  An internal node at depth ``k`` therefore stores ``k``
values of ``B_k`` plus its scale; leaves store nothing.  Peak storage along
one root-to-leaf line is ``(dk - 1)(dk + 2) / 2`` scalars.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def traverse_root(root, dk, root_tab, a_tab, f0, d0, f, d, out, counters):
    """Accumulate one root's contribution to the kernels of one family.

    Parameters
    ----------
    root : int
        Pair-state index of the first path point.
    root_tab : (4, 4) complex
        Depth-1 node value ``[s1, s0]``.
    a_tab : (4, 4) complex
        Interior step weight ``[s_next, s_prev]``.
    f0, d0 : (dk + 1, 4, 4) complex
        ``F`` and ``F - 1`` for pairs whose earlier point is the root, by lag.
    f, d : (dk + 1, 4, 4) complex
        ``F`` and ``F - 1`` for all other pairs, by lag.
    out : (dk, 4, 4) complex
        ``out[k - 1]`` receives this root's part of the depth-``k`` kernel.
    counters : (2,) int64
        ``[node visits, peak live frame scalars]``; updated in place.
    """
    # B_k for k = 1..dk-1 at offset k(k-1)/2
    base = np.zeros(max(dk * (dk - 1) // 2, 1), dtype=np.complex128)
    scale = np.zeros(dk + 1, dtype=np.complex128)
    w = np.zeros(dk, dtype=np.complex128)
    fk = np.zeros(dk, dtype=np.complex128)
    path = np.zeros(dk + 1, dtype=np.int64)
    ctr = np.zeros(dk + 2, dtype=np.int64)
    path[0] = root
    depth = 1
    nodes = 0
    live = 0
    peak = 0
    while depth > 0:
        if ctr[depth] == 4:
            if depth < dk:
                live -= depth + 1
            depth -= 1
            continue
        if ctr[depth] == 0 and depth < dk:
            live += depth + 1
            if live > peak:
                peak = live
        s = ctr[depth]
        ctr[depth] += 1
        path[depth] = s
        k = depth
        nodes += 1
        if k == 1:
            c = root_tab[s, root]
            out[0, s, root] += c
            if k < dk:
                scale[1] = c
                base[0] = 1.0
                depth += 1
                ctr[depth] = 0
            continue

        p = k - 1
        c = scale[p] * a_tab[s, path[p]]
        off_p = p * (p - 1) // 2
        # backward sweep: W[n] = B_p[n] * prod_{l>n} F(k, l)
        q = 1.0 + 0j
        acc = 0j
        for n in range(p - 1, -1, -1):
            if n == 0:
                fkn = f0[k, s, root]
                dkn = d0[k, s, root]
            else:
                fkn = f[k - n, s, path[n]]
                dkn = d[k - n, s, path[n]]
            wn = base[off_p + n] * q
            acc += dkn * wn
            q *= fkn
            w[n] = wn
            fk[n] = fkn
        out[k - 1, s, root] += c * acc
        if k < dk:
            # forward sweep: B_k[n] = P_n + F(k,n) W[n]; B_k[p] = P_p = acc
            off_k = k * (k - 1) // 2
            prefix = 0j
            for n in range(p):
                if n == 0:
                    dkn = d0[k, s, root]
                else:
                    dkn = d[k - n, s, path[n]]
                base[off_k + n] = prefix + fk[n] * w[n]
                prefix += dkn * w[n]
            base[off_k + p] = acc
            scale[k] = c
            depth += 1
            ctr[depth] = 0
    counters[0] += nodes
    if peak > counters[1]:
        counters[1] = peak
