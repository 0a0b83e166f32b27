"""Compiled inner loop for batched adaptive Euler-Maruyama integration."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

ORDER_LOST = 1


@njit(cache=True, nogil=True)
def _drift_into(out, x, scale, curvature, conf_mult, center):
    k = x.shape[0]
    for i in range(k):
        out[i] = conf_mult * curvature * (x[i] - center)
    for i in range(k):
        for j in range(i + 1, k):
            inv = 2.0 / (x[i] - x[j])
            out[i] -= inv
            out[j] += inv
    for i in range(k):
        out[i] = -scale * out[i]


@njit(cache=True, nogil=True)
def _min_gap(x):
    m, k = x.shape
    best = np.inf
    for c in range(m):
        for i in range(k - 1):
            g = x[c, i] - x[c, i + 1]
            if g < best:
                best = g
    return best


@njit(cache=True, nogil=True)
def advance_path(x, dw, h, sigma, scale, curvature, conf_mult, center, gap_factor, max_depth, gen):
    """Advance one path (copies x of shape (m, k)) over a base step; returns a status code."""
    m, k = x.shape
    stack_dw = np.empty((max_depth + 2, k))
    stack_h = np.empty(max_depth + 2)
    stack_depth = np.zeros(max_depth + 2, dtype=np.int64)
    stack_dw[0, :] = dw
    stack_h[0] = h
    size = 1
    new = np.empty_like(x)
    d = np.empty(k)
    while size > 0:
        top = size - 1
        seg_h = stack_h[top]
        seg_depth = stack_depth[top]
        for c in range(m):
            _drift_into(d, x[c], scale, curvature, conf_mult, center)
            for i in range(k):
                new[c, i] = x[c, i] + seg_h * d[i] + sigma * stack_dw[top, i]
        threshold = gap_factor * math.sqrt(seg_h) * k
        gap_new = _min_gap(new)
        ordered = gap_new > 0.0
        ok = ordered and gap_new >= threshold and _min_gap(x) >= threshold
        if ok or seg_depth >= max_depth:
            if not ordered:
                return ORDER_LOST
            x[:, :] = new
            size -= 1
        else:
            half = seg_h / 2.0
            spread = math.sqrt(half / 2.0)
            for i in range(k):
                first = 0.5 * stack_dw[top, i] + spread * gen.standard_normal()
                stack_dw[top + 1, i] = first
                stack_dw[top, i] = stack_dw[top, i] - first
            stack_h[top] = half
            stack_h[top + 1] = half
            stack_depth[top] = seg_depth + 1
            stack_depth[top + 1] = seg_depth + 1
            size += 1
    return 0


@njit(cache=True, nogil=True)
def integrate_batch(x, n_steps, h, sigma, scale, curvature, conf_mult, center, gap_factor, max_depth, gen, trace):
    """Integrate x (n, m, k) in place; trace (n_steps+1, n) gets copy-0/copy-1 distances if m >= 2."""
    n, m, k = x.shape
    sq = math.sqrt(h)
    dw = np.empty((n, k))
    record = trace.shape[0] > 0 and m >= 2
    if record:
        for p in range(n):
            s = 0.0
            for i in range(k):
                s += (x[p, 0, i] - x[p, 1, i]) ** 2
            trace[0, p] = math.sqrt(s)
    for step in range(n_steps):
        for p in range(n):
            for i in range(k):
                dw[p, i] = sq * gen.standard_normal()
        for p in range(n):
            status = advance_path(x[p], dw[p], h, sigma, scale, curvature, conf_mult, center, gap_factor, max_depth, gen)
            if status != 0:
                return status
        if record:
            for p in range(n):
                s = 0.0
                for i in range(k):
                    s += (x[p, 0, i] - x[p, 1, i]) ** 2
                trace[step + 1, p] = math.sqrt(s)
    return 0
