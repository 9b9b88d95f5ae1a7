"""Numba kernels for the tree learners.

Everything here is single-threaded and iteration-order fixed so results are
bit-identical across runs and machines.
"""

import math

import numpy as np
from numba import njit

from .binning import MAX_BINS


@njit(cache=True)
def fit_boosted_trees(codes, y, n_classes, n_rounds, depth, learning_rate, min_child, l2):
    """Grow the full boosting sequence level-wise on binned features.

    Trees use an implicit-array layout (children of node i at 2i+1, 2i+2).
    Returns per-tree split features (-1 marks a leaf), split bins, and
    vector leaf values. Ties in split gain fall to the lowest feature, then
    the lowest bin.
    """
    n, m = codes.shape
    k = n_classes
    max_nodes = 2 ** (depth + 1) - 1
    n_leaf_slots = 1 << depth
    max_slots = 1 << (depth - 1)

    feat = np.full((n_rounds, max_nodes), -1, dtype=np.int32)
    bins = np.zeros((n_rounds, max_nodes), dtype=np.uint8)
    val = np.zeros((n_rounds, max_nodes, k))

    scores = np.zeros((n, k))
    grad = np.empty((n, k))
    hess = np.empty((n, k))
    node_id = np.empty(n, dtype=np.int64)

    hist_g = np.empty((max_slots, m, MAX_BINS, k))
    hist_h = np.empty((max_slots, m, MAX_BINS, k))
    hist_c = np.empty((max_slots, m, MAX_BINS), dtype=np.int64)
    g_tot = np.empty(k)
    h_tot = np.empty(k)
    g_left = np.empty(k)
    h_left = np.empty(k)
    leaf_g = np.empty((n_leaf_slots, k))
    leaf_h = np.empty((n_leaf_slots, k))
    leaf_c = np.empty(n_leaf_slots, dtype=np.int64)

    for t in range(n_rounds):
        for i in range(n):
            top = scores[i, 0]
            for c in range(1, k):
                if scores[i, c] > top:
                    top = scores[i, c]
            norm = 0.0
            for c in range(k):
                e = math.exp(scores[i, c] - top)
                grad[i, c] = e
                norm += e
            for c in range(k):
                p = grad[i, c] / norm
                grad[i, c] = p - (1.0 if y[i] == c else 0.0)
                hess[i, c] = p * (1.0 - p)

        for i in range(n):
            node_id[i] = 0

        for level in range(depth):
            base = (1 << level) - 1
            n_slots = 1 << level
            for s in range(n_slots):
                for f in range(m):
                    for b in range(MAX_BINS):
                        hist_c[s, f, b] = 0
                        for c in range(k):
                            hist_g[s, f, b, c] = 0.0
                            hist_h[s, f, b, c] = 0.0
            for i in range(n):
                node = node_id[i]
                if node < base:
                    continue
                s = node - base
                for f in range(m):
                    b = codes[i, f]
                    hist_c[s, f, b] += 1
                    for c in range(k):
                        hist_g[s, f, b, c] += grad[i, c]
                        hist_h[s, f, b, c] += hess[i, c]

            for s in range(n_slots):
                node = base + s
                cnt = 0
                for b in range(MAX_BINS):
                    cnt += hist_c[s, 0, b]
                if cnt == 0:
                    continue
                for c in range(k):
                    g_tot[c] = 0.0
                    h_tot[c] = 0.0
                for b in range(MAX_BINS):
                    for c in range(k):
                        g_tot[c] += hist_g[s, 0, b, c]
                        h_tot[c] += hist_h[s, 0, b, c]
                parent = 0.0
                for c in range(k):
                    parent += g_tot[c] * g_tot[c] / (h_tot[c] + l2)

                best_gain = 1e-12
                best_f = -1
                best_b = 0
                for f in range(m):
                    count_left = 0
                    for c in range(k):
                        g_left[c] = 0.0
                        h_left[c] = 0.0
                    for b in range(MAX_BINS - 1):
                        count_left += hist_c[s, f, b]
                        for c in range(k):
                            g_left[c] += hist_g[s, f, b, c]
                            h_left[c] += hist_h[s, f, b, c]
                        if count_left == cnt:
                            break
                        if count_left < min_child or cnt - count_left < min_child:
                            continue
                        score = 0.0
                        for c in range(k):
                            gr = g_tot[c] - g_left[c]
                            hr = h_tot[c] - h_left[c]
                            score += g_left[c] * g_left[c] / (h_left[c] + l2)
                            score += gr * gr / (hr + l2)
                        gain = score - parent
                        if gain > best_gain:
                            best_gain = gain
                            best_f = f
                            best_b = b

                if best_f < 0:
                    for c in range(k):
                        val[t, node, c] = -learning_rate * g_tot[c] / (h_tot[c] + l2)
                else:
                    feat[t, node] = best_f
                    bins[t, node] = best_b

            for i in range(n):
                node = node_id[i]
                if node < base:
                    continue
                f = feat[t, node]
                if f >= 0:
                    if codes[i, f] <= bins[t, node]:
                        node_id[i] = 2 * node + 1
                    else:
                        node_id[i] = 2 * node + 2

        final_base = (1 << depth) - 1
        for s in range(n_leaf_slots):
            leaf_c[s] = 0
            for c in range(k):
                leaf_g[s, c] = 0.0
                leaf_h[s, c] = 0.0
        for i in range(n):
            node = node_id[i]
            if node >= final_base:
                s = node - final_base
                leaf_c[s] += 1
                for c in range(k):
                    leaf_g[s, c] += grad[i, c]
                    leaf_h[s, c] += hess[i, c]
        for s in range(n_leaf_slots):
            if leaf_c[s] > 0:
                node = final_base + s
                for c in range(k):
                    val[t, node, c] = -learning_rate * leaf_g[s, c] / (leaf_h[s, c] + l2)

        for i in range(n):
            node = node_id[i]
            for c in range(k):
                scores[i, c] += val[t, node, c]

    return feat, bins, val


@njit(cache=True)
def boosted_scores(x, feat, thr, val, t_stop):
    """Sum vector leaf values over the first t_stop trees for raw inputs."""
    n = x.shape[0]
    k = val.shape[2]
    out = np.zeros((n, k))
    for t in range(t_stop):
        for i in range(n):
            node = 0
            while feat[t, node] >= 0:
                if x[i, feat[t, node]] < thr[t, node]:
                    node = 2 * node + 1
                else:
                    node = 2 * node + 2
            for c in range(k):
                out[i, c] += val[t, node, c]
    return out


@njit(cache=True)
def _splitmix64(state):
    state = (state + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = state
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    return state, z ^ (z >> np.uint64(31))


@njit(cache=True)
def _rand_below(state, bound):
    state, z = _splitmix64(state)
    return state, z % np.uint64(bound)


@njit(cache=True)
def grow_forest(codes, y, n_classes, n_trees, max_features, min_leaf, max_depth, seed):
    """Fit a random forest on binned features.

    Returns flat per-tree node arrays: feature (-1 marks a leaf), split bin,
    left/right child ids, and per-node class counts. Bootstrap draws, the
    feature order inspected at each node, and tie-breaking are all fixed by
    the seed, so the forest is reproducible bit for bit.
    """
    n, m = codes.shape
    max_nodes = 2 * n + 1
    feat = np.full((n_trees, max_nodes), -1, dtype=np.int32)
    bins = np.zeros((n_trees, max_nodes), dtype=np.uint8)
    left = np.full((n_trees, max_nodes), -1, dtype=np.int32)
    right = np.full((n_trees, max_nodes), -1, dtype=np.int32)
    dist = np.zeros((n_trees, max_nodes, n_classes), dtype=np.float64)
    n_nodes = np.zeros(n_trees, dtype=np.int64)

    idx = np.empty(n, dtype=np.int64)
    tmp = np.empty(n, dtype=np.int64)
    perm = np.empty(m, dtype=np.int64)
    hist = np.empty((MAX_BINS, n_classes), dtype=np.int64)
    node_cls = np.empty(n_classes, dtype=np.int64)
    count_left = np.empty(n_classes, dtype=np.int64)
    # explicit stack: node id, start, end, depth
    stack = np.empty((max_nodes, 4), dtype=np.int64)

    for t in range(n_trees):
        state = np.uint64(seed) ^ (np.uint64(0xA5A5A5A5) + np.uint64(t) * np.uint64(0x9E3779B9))
        state, _ = _splitmix64(state)
        for i in range(n):
            state, z = _rand_below(state, n)
            idx[i] = np.int64(z)

        n_nodes[t] = 1
        stack[0, 0] = 0
        stack[0, 1] = 0
        stack[0, 2] = n
        stack[0, 3] = 0
        top = 1
        while top > 0:
            top -= 1
            node = stack[top, 0]
            start = stack[top, 1]
            end = stack[top, 2]
            depth = stack[top, 3]
            size = end - start

            for c in range(n_classes):
                node_cls[c] = 0
            for p in range(start, end):
                node_cls[y[idx[p]]] += 1
            for c in range(n_classes):
                dist[t, node, c] = node_cls[c]

            n_present = 0
            for c in range(n_classes):
                if node_cls[c] > 0:
                    n_present += 1
            if n_present <= 1 or size < 2 * min_leaf or depth >= max_depth:
                continue

            inv = 1.0 / size
            parent_imp = 1.0
            for c in range(n_classes):
                parent_imp -= (node_cls[c] * inv) * (node_cls[c] * inv)

            for f in range(m):
                perm[f] = f
            for f in range(m - 1):
                state, z = _rand_below(state, m - f)
                j = f + np.int64(z)
                perm[f], perm[j] = perm[j], perm[f]

            best_gain = 1e-12
            best_f = -1
            best_b = 0
            for fi in range(m):
                if fi >= max_features and best_f >= 0:
                    break
                f = perm[fi]
                for b in range(MAX_BINS):
                    for c in range(n_classes):
                        hist[b, c] = 0
                for p in range(start, end):
                    hist[codes[idx[p], f], y[idx[p]]] += 1
                nl = 0
                for c in range(n_classes):
                    count_left[c] = 0
                for b in range(MAX_BINS - 1):
                    for c in range(n_classes):
                        count_left[c] += hist[b, c]
                        nl += hist[b, c]
                    nr = size - nl
                    if nl == size:
                        break
                    if nl < min_leaf:
                        continue
                    if nr < min_leaf:
                        break
                    il = 1.0
                    ir = 1.0
                    for c in range(n_classes):
                        pl = count_left[c] / nl
                        pr = (node_cls[c] - count_left[c]) / nr
                        il -= pl * pl
                        ir -= pr * pr
                    gain = parent_imp - (nl * il + nr * ir) * inv
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_b = b

            if best_f < 0:
                continue

            # stable partition: codes <= best_b go left
            nl = 0
            for p in range(start, end):
                if codes[idx[p], best_f] <= best_b:
                    tmp[nl] = idx[p]
                    nl += 1
            nr = 0
            for p in range(start, end):
                if codes[idx[p], best_f] > best_b:
                    tmp[nl + nr] = idx[p]
                    nr += 1
            for p in range(size):
                idx[start + p] = tmp[p]

            lid = n_nodes[t]
            rid = lid + 1
            n_nodes[t] += 2
            feat[t, node] = best_f
            bins[t, node] = best_b
            left[t, node] = lid
            right[t, node] = rid
            stack[top, 0] = lid
            stack[top, 1] = start
            stack[top, 2] = start + nl
            stack[top, 3] = depth + 1
            top += 1
            stack[top, 0] = rid
            stack[top, 1] = start + nl
            stack[top, 2] = end
            stack[top, 3] = depth + 1
            top += 1

    return feat, bins, left, right, dist, n_nodes


@njit(cache=True)
def forest_proba(codes, feat, bins, left, right, dist):
    """Average per-tree leaf class distributions for binned samples."""
    n = codes.shape[0]
    n_trees = feat.shape[0]
    k = dist.shape[2]
    out = np.zeros((n, k))
    for t in range(n_trees):
        for i in range(n):
            node = 0
            while feat[t, node] >= 0:
                if codes[i, feat[t, node]] <= bins[t, node]:
                    node = left[t, node]
                else:
                    node = right[t, node]
            total = 0.0
            for c in range(k):
                total += dist[t, node, c]
            for c in range(k):
                out[i, c] += dist[t, node, c] / total
    return out / n_trees
