"""Pure-numpy kernel backend.

Reference implementations of the hot kernels: Bernoulli field sampling,
the synchronous threshold update, fixed-point evolution with flip times,
component labeling, crossings, and the exact small-window enumerator.
The numba backend must agree bit-for-bit with everything here.
"""

import numpy as np
from scipy import ndimage

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

_U64_GOLDEN = np.uint64(GOLDEN)
_U64_MIX_A = np.uint64(MIX_A)
_U64_MIX_B = np.uint64(MIX_B)

_STRUCT_Z2 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)
_STRUCT_STAR = np.ones((3, 3), dtype=np.uint8)


def mix64(z):
    """splitmix64 finalizer; accepts uint64 scalars or arrays, wraps mod 2^64."""
    z = np.asarray(z, dtype=np.uint64)
    z = z ^ (z >> np.uint64(30))
    z = z * _U64_MIX_A
    z = z ^ (z >> np.uint64(27))
    z = z * _U64_MIX_B
    z = z ^ (z >> np.uint64(31))
    return z


def trial_seed(master_seed, index):
    """Seed for trial `index`: the splitmix64 stream of `master_seed`."""
    c = np.uint64(master_seed) + _U64_GOLDEN * np.uint64(np.int64(index) + 1)
    return int(mix64(c))


def sample_field(seed, width, height, p, x0=0, y0=0):
    """Bernoulli(p) field on a width x height window.

    Cell (row i, col j) holds lattice site (x0+j, y0+i); its state is a pure
    function of (seed, x, y), so overlapping windows sampled with the same
    seed agree on their intersection.
    """
    xs = (np.arange(width, dtype=np.int64) + x0).astype(np.uint64) & np.uint64(0xFFFFFFFF)
    ys = (np.arange(height, dtype=np.int64) + y0).astype(np.uint64) & np.uint64(0xFFFFFFFF)
    counter = (ys[:, None] << np.uint64(32)) | xs[None, :]
    z = mix64(np.uint64(seed) + _U64_GOLDEN * counter)
    u = (z >> np.uint64(11)).astype(np.float64) * U53_INV
    return (u < p).astype(np.uint8)


def _padded(states, bc):
    if bc == BC_OPEN:
        return np.pad(states, 1, mode="constant", constant_values=1)
    if bc == BC_CLOSED:
        return np.pad(states, 1, mode="constant", constant_values=0)
    if bc == BC_PERIODIC:
        return np.pad(states, 1, mode="wrap")
    raise ValueError(f"unknown boundary code {bc}")


def open_neighbor_counts(states, bc):
    """Per-site count of open Z2 neighbors, halo counted per boundary code."""
    pad = _padded(states, bc).astype(np.int16)
    return pad[:-2, 1:-1] + pad[2:, 1:-1] + pad[1:-1, :-2] + pad[1:-1, 2:]


def step_grid(states, bc, threshold=3):
    """One synchronous update; returns (new_states, flipped_count)."""
    counts = open_neighbor_counts(states, bc)
    flips = (states == 0) & (counts >= threshold)
    new = states.copy()
    new[flips] = 1
    return new, int(flips.sum())


def evolve_grid(states, bc, n, threshold=3):
    """n synchronous updates (early exit once stable)."""
    cur = states.copy()
    for _ in range(n):
        cur, flipped = step_grid(cur, bc, threshold)
        if flipped == 0:
            break
    return cur


def fixed_point_grid(states, bc, threshold=3):
    """Iterate to the fixed point.

    Returns (final_states, flip_times, stabilization_time) where flip_times
    holds 0 for initially-open sites, -1 for never, and the flip round t >= 1
    otherwise.
    """
    cur = states.copy()
    flip = np.where(cur == 1, 0, -1).astype(np.int32)
    t = 0
    while True:
        nxt, flipped = step_grid(cur, bc, threshold)
        if flipped == 0:
            return cur, flip, t
        t += 1
        flip[(nxt == 1) & (cur == 0)] = t
        cur = nxt


class _UnionFind:
    """Minimal union-find with path compression, for seam label merging."""

    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def label_components(states, target, star, periodic):
    """Label connected components of the target-state subgraph.

    Returns (labels, sizes): labels is 0 where the site is not in the target
    state and 1..k otherwise; sizes[i] is the size of component i+1.
    """
    mask = states == target
    structure = _STRUCT_STAR if star else _STRUCT_Z2
    labels, count = ndimage.label(mask, structure=structure)
    if periodic and count > 1:
        height, width = states.shape
        uf = _UnionFind(count + 1)
        pairs = []
        if height > 1:
            pairs.append((labels[0, :], labels[-1, :]))
        if width > 1:
            pairs.append((labels[:, 0], labels[:, -1]))
        if star and height > 1 and width > 1:
            top, bot = labels[0, :], labels[-1, :]
            pairs.append((top, np.roll(bot, 1)))
            pairs.append((top, np.roll(bot, -1)))
            lef, rig = labels[:, 0], labels[:, -1]
            pairs.append((lef, np.roll(rig, 1)))
            pairs.append((lef, np.roll(rig, -1)))
        for a, b in pairs:
            both = (a > 0) & (b > 0)
            for la, lb in zip(a[both].tolist(), b[both].tolist()):
                uf.union(la, lb)
        remap = np.zeros(count + 1, dtype=np.int32)
        nxt = 0
        for lab in range(1, count + 1):
            root = uf.find(lab)
            if remap[root] == 0:
                nxt += 1
                remap[root] = nxt
            remap[lab] = remap[root]
        labels = remap[labels]
        count = nxt
    sizes = np.bincount(labels.ravel(), minlength=count + 1)[1:].astype(np.int64)
    return labels.astype(np.int32), sizes


def component_mask(states, sx, sy, target, star, periodic):
    """Mask and size of the component of (sx, sy) in the target-state subgraph."""
    if states[sy, sx] != target:
        return np.zeros_like(states, dtype=np.uint8), 0
    labels, sizes = label_components(states, target, star, periodic)
    lab = labels[sy, sx]
    return (labels == lab).astype(np.uint8), int(sizes[lab - 1])


def has_crossing(states, rx, ry, rw, rh, mode):
    """Crossing event inside the rectangle [rx, rx+rw) x [ry, ry+rh).

    mode 0: open vertical *-crossing (top row to bottom row);
    mode 1: closed horizontal Z2-crossing (left column to right column).
    """
    sub = states[ry:ry + rh, rx:rx + rw]
    if mode == 0:
        mask = sub == 1
        labels, _ = ndimage.label(mask, structure=_STRUCT_STAR)
        top = set(labels[0, :][labels[0, :] > 0].tolist())
        bottom = set(labels[-1, :][labels[-1, :] > 0].tolist())
    else:
        mask = sub == 0
        labels, _ = ndimage.label(mask, structure=_STRUCT_Z2)
        top = set(labels[:, 0][labels[:, 0] > 0].tolist())
        bottom = set(labels[:, -1][labels[:, -1] > 0].tolist())
    return bool(top & bottom)


# ---------------------------------------------------------------------------
# Exact enumeration (batched over configuration masks)
# ---------------------------------------------------------------------------

def _batch_counts(batch, bc):
    if bc == BC_OPEN:
        pad = np.pad(batch, ((0, 0), (1, 1), (1, 1)), constant_values=1)
    elif bc == BC_CLOSED:
        pad = np.pad(batch, ((0, 0), (1, 1), (1, 1)), constant_values=0)
    else:
        pad = np.pad(batch, ((0, 0), (1, 1), (1, 1)), mode="wrap")
    pad = pad.astype(np.int16)
    return pad[:, :-2, 1:-1] + pad[:, 2:, 1:-1] + pad[:, 1:-1, :-2] + pad[:, 1:-1, 2:]


def _batch_step(batch, bc, threshold):
    counts = _batch_counts(batch, bc)
    flips = (batch == 0) & (counts >= threshold)
    if not flips.any():
        return batch, False
    out = batch.copy()
    out[flips] = 1
    return out, True


def _batch_evolve(batch, bc, n, threshold):
    cur = batch
    for _ in range(n):
        cur, changed = _batch_step(cur, bc, threshold)
        if not changed:
            break
    return cur


def _batch_fixed_point(batch, bc, threshold):
    cur = batch
    flip = np.where(cur == 1, 0, -1).astype(np.int32)
    t = 0
    while True:
        nxt, changed = _batch_step(cur, bc, threshold)
        if not changed:
            return cur, flip
        t += 1
        flip[(nxt == 1) & (cur == 0)] = t
        cur = nxt


def _batch_spread(reach, allowed, star, wrap=False):
    """Grow reach within allowed until stable (4- or 8-neighbor growth)."""
    while True:
        grown = reach.copy()
        if wrap:
            for axis in (1, 2):
                grown |= np.roll(reach, 1, axis=axis)
                grown |= np.roll(reach, -1, axis=axis)
            if star:
                for dy in (1, -1):
                    for dx in (1, -1):
                        grown |= np.roll(np.roll(reach, dy, axis=1), dx, axis=2)
        else:
            grown[:, 1:, :] |= reach[:, :-1, :]
            grown[:, :-1, :] |= reach[:, 1:, :]
            grown[:, :, 1:] |= reach[:, :, :-1]
            grown[:, :, :-1] |= reach[:, :, 1:]
            if star:
                grown[:, 1:, 1:] |= reach[:, :-1, :-1]
                grown[:, 1:, :-1] |= reach[:, :-1, 1:]
                grown[:, :-1, 1:] |= reach[:, 1:, :-1]
                grown[:, :-1, :-1] |= reach[:, 1:, 1:]
        grown &= allowed
        if np.array_equal(grown, reach):
            return reach
        reach = grown


def _batch_observable(batch, bc, horizon, obs, p0, p1, p2, p3, threshold):
    """Evaluate the menu observable for every configuration in the batch."""
    if obs == OBS_ONE:
        return np.ones(batch.shape[0], dtype=np.int64)
    if obs == OBS_FLIP_AFTER:
        _, flip = _batch_fixed_point(batch, bc, threshold)
        t = flip[:, p1, p0]
        return ((t > horizon) & (t >= 1)).astype(np.int64)
    if obs == OBS_DETERMINED:
        fo, _ = _batch_fixed_point(batch, BC_OPEN, threshold)
        fc, _ = _batch_fixed_point(batch, BC_CLOSED, threshold)
        return (fo[:, p1, p0] == fc[:, p1, p0]).astype(np.int64)

    if horizon < 0:
        evolved, _ = _batch_fixed_point(batch, bc, threshold)
    else:
        evolved = _batch_evolve(batch, bc, horizon, threshold)

    if obs == OBS_SITE_OPEN:
        return evolved[:, p1, p0].astype(np.int64)
    if obs in (OBS_CONNECTED, OBS_CLUSTER_SIZE, OBS_RING):
        target, star = p3 & 1, bool(p3 >> 1)
        allowed = evolved == target
        reach = np.zeros_like(allowed)
        reach[:, p1, p0] = allowed[:, p1, p0]
        reach = _batch_spread(reach, allowed, star)
        if obs == OBS_CLUSTER_SIZE:
            return reach.sum(axis=(1, 2)).astype(np.int64)
        if obs == OBS_CONNECTED:
            # p2 packs the second site as x + (y << 16)
            return reach[:, p2 >> 16, p2 & 0xFFFF].astype(np.int64)
        height, width = batch.shape[1], batch.shape[2]
        ys, xs = np.mgrid[0:height, 0:width]
        ring = np.maximum(np.abs(xs - p0), np.abs(ys - p1)) == p2
        return (reach & ring).any(axis=(1, 2)).astype(np.int64)
    if obs == OBS_CROSS_STAR_V:
        allowed = evolved == 1
        reach = np.zeros_like(allowed)
        reach[:, 0, :] = allowed[:, 0, :]
        reach = _batch_spread(reach, allowed, True)
        return reach[:, -1, :].any(axis=1).astype(np.int64)
    if obs == OBS_CROSS_Z2_H:
        allowed = evolved == 0
        reach = np.zeros_like(allowed)
        reach[:, :, 0] = allowed[:, :, 0]
        reach = _batch_spread(reach, allowed, False)
        return reach[:, :, -1].any(axis=1).astype(np.int64)
    raise ValueError(f"unknown observable code {obs}")


def enumerate_bins(width, height, bc, horizon, obs, p0, p1, p2, p3, threshold=3, reverse=False, chunk=4096):
    """Sum the observable over all 2^(w*h) configurations, binned by popcount.

    bins[k] = sum of the observable over configurations with exactly k open
    sites. Integral accumulation makes the result independent of traversal
    order; `reverse` flips the order as a self-check.
    """
    n = width * height
    total = 1 << n
    bins = np.zeros(n + 1, dtype=np.int64)
    bit_idx = np.arange(n, dtype=np.uint64)
    starts = range(0, total, chunk)
    if reverse:
        starts = reversed(list(starts))
    for start in starts:
        stop = min(start + chunk, total)
        masks = np.arange(start, stop, dtype=np.uint64)
        bits = ((masks[:, None] >> bit_idx[None, :]) & np.uint64(1)).astype(np.uint8)
        batch = bits.reshape(-1, height, width)
        pop = bits.sum(axis=1).astype(np.int64)
        vals = _batch_observable(batch, bc, horizon, obs, p0, p1, p2, p3, threshold)
        np.add.at(bins, pop, vals)
    return bins
