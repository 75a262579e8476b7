"""Numba kernel backend.

njit versions of the hot kernels. Semantics (including every sampled bit)
must match the pure-numpy backend in `_numpy`; the parity test suite holds
the two to that contract.
"""

import numba as nb
import numpy as np

from ._common import (
    BC_CLOSED,
    BC_OPEN,
    BC_PERIODIC,
    GOLDEN,
    MIX_A,
    MIX_B,
    OBS_CLUSTER_SIZE,
    OBS_CONNECTED,
    OBS_CROSS_STAR_V,
    OBS_CROSS_Z2_H,
    OBS_DETERMINED,
    OBS_FLIP_AFTER,
    OBS_ONE,
    OBS_RING,
    OBS_SITE_OPEN,
    U53_INV,
)

_JIT = {"cache": True, "nogil": True}

_U_GOLDEN = np.uint64(GOLDEN)
_U_MIX_A = np.uint64(MIX_A)
_U_MIX_B = np.uint64(MIX_B)


@nb.njit(**_JIT)
def _mix64(z):
    z = z ^ (z >> np.uint64(30))
    z = z * _U_MIX_A
    z = z ^ (z >> np.uint64(27))
    z = z * _U_MIX_B
    z = z ^ (z >> np.uint64(31))
    return z


def mix64(z):
    return _mix64(np.uint64(z))


def trial_seed(master_seed, index):
    """Seed for trial `index`: the splitmix64 stream of `master_seed`."""
    c = np.uint64(master_seed) + _U_GOLDEN * np.uint64(np.int64(index) + 1)
    return int(_mix64(c))


@nb.njit(**_JIT)
def sample_field(seed, width, height, p, x0=0, y0=0):
    """Bernoulli(p) field; cell (i, j) is lattice site (x0+j, y0+i)."""
    out = np.empty((height, width), np.uint8)
    s = np.uint64(seed)
    for i in range(height):
        cy = np.uint64((y0 + i) & 0xFFFFFFFF) << np.uint64(32)
        for j in range(width):
            c = cy | np.uint64((x0 + j) & 0xFFFFFFFF)
            z = _mix64(s + _U_GOLDEN * c)
            u = np.float64(z >> np.uint64(11)) * U53_INV
            out[i, j] = 1 if u < p else 0
    return out


@nb.njit(inline="always")
def _nbr_open(states, i, j, height, width, bc):
    """Open count among the 4 neighbor positions of (i, j), halo per bc."""
    c = 0
    for d in range(4):
        if d == 0:
            ni, nj = i - 1, j
        elif d == 1:
            ni, nj = i + 1, j
        elif d == 2:
            ni, nj = i, j - 1
        else:
            ni, nj = i, j + 1
        if 0 <= ni < height and 0 <= nj < width:
            c += states[ni, nj]
        elif bc == BC_PERIODIC:
            c += states[ni % height, nj % width]
        elif bc == BC_OPEN:
            c += 1
    return c


@nb.njit(**_JIT)
def open_neighbor_counts(states, bc):
    height, width = states.shape
    out = np.empty((height, width), np.int16)
    for i in range(height):
        for j in range(width):
            out[i, j] = _nbr_open(states, i, j, height, width, bc)
    return out


@nb.njit(**_JIT)
def step_grid(states, bc, threshold=3):
    height, width = states.shape
    new = states.copy()
    flips = 0
    for i in range(height):
        for j in range(width):
            if states[i, j] == 0 and _nbr_open(states, i, j, height, width, bc) >= threshold:
                new[i, j] = 1
                flips += 1
    return new, flips


@nb.njit(**_JIT)
def evolve_grid(states, bc, n, threshold=3):
    cur = states.copy()
    for _ in range(n):
        cur, flipped = step_grid(cur, bc, threshold)
        if flipped == 0:
            break
    return cur


@nb.njit(**_JIT)
def _peel(final, flip, counts, qi, qj, ri, rj, bc, threshold):
    """Level-synchronized peeling on buffers; returns stabilization time.

    `final` is modified to the fixed point, `flip` gets 0 / -1 / round t.
    Equivalent to iterating the synchronous step (each round flips exactly
    the sites the step rule would).
    """
    height, width = final.shape
    for i in range(height):
        for j in range(width):
            flip[i, j] = 0 if final[i, j] == 1 else -1
            counts[i, j] = _nbr_open(final, i, j, height, width, bc)
    ncur = 0
    for i in range(height):
        for j in range(width):
            if final[i, j] == 0 and counts[i, j] >= threshold:
                qi[ncur] = i
                qj[ncur] = j
                ncur += 1
    t = 0
    while ncur > 0:
        t += 1
        for k in range(ncur):
            final[qi[k], qj[k]] = 1
            flip[qi[k], qj[k]] = t
        nnxt = 0
        for k in range(ncur):
            i, j = qi[k], qj[k]
            for d in range(4):
                if d == 0:
                    ni, nj = i - 1, j
                elif d == 1:
                    ni, nj = i + 1, j
                elif d == 2:
                    ni, nj = i, j - 1
                else:
                    ni, nj = i, j + 1
                if not (0 <= ni < height and 0 <= nj < width):
                    if bc != BC_PERIODIC:
                        continue
                    ni, nj = ni % height, nj % width
                counts[ni, nj] += 1
                if final[ni, nj] == 0 and counts[ni, nj] == threshold:
                    ri[nnxt] = ni
                    rj[nnxt] = nj
                    nnxt += 1
        for k in range(nnxt):
            qi[k] = ri[k]
            qj[k] = rj[k]
        ncur = nnxt
    return t


@nb.njit(**_JIT)
def fixed_point_grid(states, bc, threshold=3):
    height, width = states.shape
    final = states.copy()
    flip = np.empty((height, width), np.int32)
    counts = np.empty((height, width), np.int16)
    cap = height * width
    qi = np.empty(cap, np.int32)
    qj = np.empty(cap, np.int32)
    ri = np.empty(cap, np.int32)
    rj = np.empty(cap, np.int32)
    t = _peel(final, flip, counts, qi, qj, ri, rj, bc, threshold)
    return final, flip, t


@nb.njit(inline="always")
def _push_nbrs(si, sj, height, width, star, wrap, stack_i, stack_j, top):
    """Append the 4 or 8 neighbor positions of (si, sj) to the stack."""
    for d in range(8 if star else 4):
        if d == 0:
            ni, nj = si - 1, sj
        elif d == 1:
            ni, nj = si + 1, sj
        elif d == 2:
            ni, nj = si, sj - 1
        elif d == 3:
            ni, nj = si, sj + 1
        elif d == 4:
            ni, nj = si - 1, sj - 1
        elif d == 5:
            ni, nj = si - 1, sj + 1
        elif d == 6:
            ni, nj = si + 1, sj - 1
        else:
            ni, nj = si + 1, sj + 1
        if not (0 <= ni < height and 0 <= nj < width):
            if not wrap:
                continue
            ni, nj = ni % height, nj % width
        stack_i[top] = ni
        stack_j[top] = nj
        top += 1
    return top


@nb.njit(**_JIT)
def component_mask(states, sx, sy, target, star, periodic):
    """Mask and size of the component of (sx, sy) in the target-state subgraph."""
    height, width = states.shape
    mask = np.zeros((height, width), np.uint8)
    if states[sy, sx] != target:
        return mask, 0
    cap = height * width * 8
    stack_i = np.empty(cap, np.int32)
    stack_j = np.empty(cap, np.int32)
    mask[sy, sx] = 1
    size = 1
    top = _push_nbrs(sy, sx, height, width, star, periodic, stack_i, stack_j, 0)
    while top > 0:
        top -= 1
        i, j = stack_i[top], stack_j[top]
        if mask[i, j] == 0 and states[i, j] == target:
            mask[i, j] = 1
            size += 1
            top = _push_nbrs(i, j, height, width, star, periodic, stack_i, stack_j, top)
    return mask, size


@nb.njit(**_JIT)
def label_components(states, target, star, periodic):
    """Raster-order BFS labeling; labels 1..k, 0 elsewhere."""
    height, width = states.shape
    labels = np.zeros((height, width), np.int32)
    sizes = np.zeros(height * width, np.int64)
    cap = height * width * 8
    stack_i = np.empty(cap, np.int32)
    stack_j = np.empty(cap, np.int32)
    count = 0
    for i0 in range(height):
        for j0 in range(width):
            if states[i0, j0] != target or labels[i0, j0] != 0:
                continue
            count += 1
            labels[i0, j0] = count
            sz = 1
            top = _push_nbrs(i0, j0, height, width, star, periodic, stack_i, stack_j, 0)
            while top > 0:
                top -= 1
                i, j = stack_i[top], stack_j[top]
                if labels[i, j] == 0 and states[i, j] == target:
                    labels[i, j] = count
                    sz += 1
                    top = _push_nbrs(i, j, height, width, star, periodic, stack_i, stack_j, top)
            sizes[count - 1] = sz
    return labels, sizes[:count]


@nb.njit(**_JIT)
def has_crossing(states, rx, ry, rw, rh, mode):
    """Crossing inside [rx, rx+rw) x [ry, ry+rh); mode 0 open-*-vertical,
    mode 1 closed-Z2-horizontal."""
    target = 1 if mode == 0 else 0
    star = mode == 0
    visited = np.zeros((rh, rw), np.uint8)
    cap = rh * rw * 8
    stack_i = np.empty(cap, np.int32)
    stack_j = np.empty(cap, np.int32)
    top = 0
    if mode == 0:
        for j in range(rw):
            if states[ry, rx + j] == target:
                visited[0, j] = 1
                stack_i[top] = 0
                stack_j[top] = j
                top += 1
    else:
        for i in range(rh):
            if states[ry + i, rx] == target:
                visited[i, 0] = 1
                stack_i[top] = i
                stack_j[top] = 0
                top += 1
    while top > 0:
        top -= 1
        i, j = stack_i[top], stack_j[top]
        if mode == 0 and i == rh - 1:
            return True
        if mode == 1 and j == rw - 1:
            return True
        for d in range(8 if star else 4):
            if d == 0:
                ni, nj = i - 1, j
            elif d == 1:
                ni, nj = i + 1, j
            elif d == 2:
                ni, nj = i, j - 1
            elif d == 3:
                ni, nj = i, j + 1
            elif d == 4:
                ni, nj = i - 1, j - 1
            elif d == 5:
                ni, nj = i - 1, j + 1
            elif d == 6:
                ni, nj = i + 1, j - 1
            else:
                ni, nj = i + 1, j + 1
            if 0 <= ni < rh and 0 <= nj < rw and visited[ni, nj] == 0 \
                    and states[ry + ni, rx + nj] == target:
                visited[ni, nj] = 1
                stack_i[top] = ni
                stack_j[top] = nj
                top += 1
    return False


# ---------------------------------------------------------------------------
# Exact enumeration
# ---------------------------------------------------------------------------

@nb.njit(inline="always")
def _evolved_state(flip_val, horizon):
    """ω_h from a peeled flip value (0 initially open, -1 never, t round)."""
    if flip_val == 0:
        return 1
    if flip_val < 0:
        return 0
    if horizon < 0 or flip_val <= horizon:
        return 1
    return 0


@nb.njit(**_JIT)
def _spread_scalar(grid, visited, stack_i, stack_j, si, sj, target, star, wrap):
    """Flood the component of (si, sj); returns its size (0 if off-target)."""
    height, width = grid.shape
    if grid[si, sj] != target:
        return 0
    visited[si, sj] = 1
    size = 1
    top = _push_nbrs(si, sj, height, width, star, wrap, stack_i, stack_j, 0)
    while top > 0:
        top -= 1
        i, j = stack_i[top], stack_j[top]
        if visited[i, j] == 0 and grid[i, j] == target:
            visited[i, j] = 1
            size += 1
            top = _push_nbrs(i, j, height, width, star, wrap, stack_i, stack_j, top)
    return size


@nb.njit(**_JIT)
def enumerate_bins(width, height, bc, horizon, obs, p0, p1, p2, p3, threshold=3, reverse=False):
    """Popcount-binned observable sums over all 2^(w*h) configurations.

    Same menu and parameter packing as the numpy backend. Integer bins make
    the result exactly independent of traversal order.
    """
    n = width * height
    total = np.int64(1) << n
    bins = np.zeros(n + 1, np.int64)
    grid = np.empty((height, width), np.uint8)
    evolved = np.empty((height, width), np.uint8)
    flip = np.empty((height, width), np.int32)
    flip2 = np.empty((height, width), np.int32)
    counts = np.empty((height, width), np.int16)
    cap = n
    qi = np.empty(cap, np.int32)
    qj = np.empty(cap, np.int32)
    ri = np.empty(cap, np.int32)
    rj = np.empty(cap, np.int32)
    visited = np.empty((height, width), np.uint8)
    stack_i = np.empty(cap * 8, np.int32)
    stack_j = np.empty(cap * 8, np.int32)
    wrap = bc == BC_PERIODIC
    target = p3 & 1
    star = (p3 >> 1) != 0

    for idx in range(total):
        mask = total - 1 - idx if reverse else idx
        pop = 0
        for k in range(n):
            b = np.uint8((mask >> k) & 1)
            grid[k // width, k % width] = b
            pop += b

        val = np.int64(0)
        if obs == OBS_ONE:
            val = 1
        elif obs == OBS_DETERMINED:
            evolved[:, :] = grid
            _peel(evolved, flip, counts, qi, qj, ri, rj, BC_OPEN, threshold)
            evolved[:, :] = grid
            _peel(evolved, flip2, counts, qi, qj, ri, rj, BC_CLOSED, threshold)
            a = _evolved_state(flip[p1, p0], -1)
            b2 = _evolved_state(flip2[p1, p0], -1)
            val = 1 if a == b2 else 0
        else:
            evolved[:, :] = grid
            _peel(evolved, flip, counts, qi, qj, ri, rj, bc, threshold)
            if obs == OBS_FLIP_AFTER:
                t = flip[p1, p0]
                val = 1 if (t > horizon and t >= 1) else 0
            else:
                for i in range(height):
                    for j in range(width):
                        evolved[i, j] = _evolved_state(flip[i, j], horizon)
                if obs == OBS_SITE_OPEN:
                    val = evolved[p1, p0]
                elif obs == OBS_CONNECTED:
                    visited[:, :] = 0
                    _spread_scalar(evolved, visited, stack_i, stack_j, p1, p0, target, star, wrap)
                    val = visited[p2 >> 16, p2 & 0xFFFF]
                elif obs == OBS_CLUSTER_SIZE:
                    visited[:, :] = 0
                    val = _spread_scalar(evolved, visited, stack_i, stack_j, p1, p0, target, star, wrap)
                elif obs == OBS_RING:
                    visited[:, :] = 0
                    _spread_scalar(evolved, visited, stack_i, stack_j, p1, p0, target, star, wrap)
                    hit = 0
                    for i in range(height):
                        for j in range(width):
                            if visited[i, j] == 1:
                                dx = j - p0 if j >= p0 else p0 - j
                                dy = i - p1 if i >= p1 else p1 - i
                                if max(dx, dy) == p2:
                                    hit = 1
                    val = hit
                elif obs == OBS_CROSS_STAR_V:
                    val = 1 if has_crossing(evolved, 0, 0, width, height, 0) else 0
                elif obs == OBS_CROSS_Z2_H:
                    val = 1 if has_crossing(evolved, 0, 0, width, height, 1) else 0
        bins[pop] += val
    return bins
