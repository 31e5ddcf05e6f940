"""Array kernels behind the tree model and the strong sampler.

Everything here takes and returns plain numpy arrays so the same source runs
compiled (numba) or interpreted (see ``_accel``).

Strong builder
--------------
The strong sampler replays a sequence of draws ``k_i`` in ``{1..i}``,
``i = 3..n``.  Draw ``k_i < i`` splits the ``k_i``-th leaf (left-to-right
order) into a binary node; ``k_i = i`` appends a leaf to the last created
internal node.  Finding "the k-th leaf" of a growing plane tree is an
order-statistics query, so the builder runs two passes:

1. forward, O(1) per step: the rank at which each new leaf enters the leaf
   sequence (the new leaf always lands right after a known rank);
2. backward over a Fenwick tree of final slots: final slot of every leaf and
   the slot of every split target.

A final forward pass links the nodes and emits preorder ``(label, arity)``.
Leaves are ids ``0..n-1``; internal node with label ``l`` is id ``n+l-1``.
"""

from __future__ import annotations

import numpy as np

from ._accel import kernel


@kernel
def _fenwick_kth(bit, top, k):
    # smallest position p with prefix(p) >= k; ``bit`` is padded to length 2*top
    pos = 0
    step = top
    while step > 0:
        nxt = pos + step
        take = bit[nxt] < k  # branch-free descent
        pos += step * take
        k -= bit[nxt] * take
        step >>= 1
    return pos + 1


@kernel
def _fenwick_len(n):
    top = 1
    while top <= n:
        top *= 2
    return top + 1


@kernel
def _fenwick_add(bit, size, i, delta):
    while i <= size:
        bit[i] += delta
        i += i & (-i)


@kernel
def _split_targets(draws, n, slot_of_leaf, target_slot, q, bit):
    """Fill final leaf slots and split-target slots for one draw sequence."""
    # forward: insertion rank of leaf i-1 (created at step i)
    right = 2
    for i in range(3, n + 1):
        k = draws[i - 3]
        if k == i:
            right += 1
            q[i] = right
        else:
            q[i] = k + 1
            right = k + 1
    top = 1
    while top * 2 <= n:
        top *= 2
    size = bit.shape[0] - 1
    # unit weight on slots 1..n, none on the padding beyond n
    for p in range(1, size + 1):
        bit[p] = max(0, min(n, p) - (p - (p & (-p))))
    for i in range(n, 2, -1):
        s = _fenwick_kth(bit, top, q[i])
        slot_of_leaf[i - 1] = s
        _fenwick_add(bit, size, s, -1)
        k = draws[i - 3]
        if k < i:
            target_slot[i] = _fenwick_kth(bit, top, k)
    slot_of_leaf[1] = _fenwick_kth(bit, top, 2)
    slot_of_leaf[0] = _fenwick_kth(bit, top, 1)


@kernel
def _link(draws, n, slot_of_leaf, target_slot, leaf_at_slot,
          parent, first, last, nxt, prv, label, arity):
    """Link nodes according to the draws; returns the number of labels used."""
    total = 2 * n - 1
    for v in range(total):
        parent[v] = -1
        first[v] = -1
        last[v] = -1
        nxt[v] = -1
        prv[v] = -1
        label[v] = 0
        arity[v] = 0
    for j in range(n):
        leaf_at_slot[slot_of_leaf[j]] = j
    root = n
    label[root] = 1
    arity[root] = 2
    first[root] = 0
    last[root] = 1
    nxt[0] = 1
    prv[1] = 0
    parent[0] = root
    parent[1] = root
    cur = root
    lab = 1
    for i in range(3, n + 1):
        y = i - 1
        k = draws[i - 3]
        if k == i:
            # new rightmost child of the last created node
            t = last[cur]
            nxt[t] = y
            prv[y] = t
            last[cur] = y
            parent[y] = cur
            arity[cur] += 1
        else:
            x = leaf_at_slot[target_slot[i]]
            lab += 1
            w = n + lab - 1
            label[w] = lab
            arity[w] = 2
            p = parent[x]
            parent[w] = p
            a = prv[x]
            b = nxt[x]
            prv[w] = a
            nxt[w] = b
            if a >= 0:
                nxt[a] = w
            else:
                first[p] = w
            if b >= 0:
                prv[b] = w
            else:
                last[p] = w
            parent[x] = w
            parent[y] = w
            first[w] = x
            last[w] = y
            prv[x] = -1
            nxt[x] = y
            prv[y] = x
            nxt[y] = -1
            cur = w
    return lab


@kernel
def _emit_preorder(n, first, nxt, label, arity, out_label, out_arity, stack):
    root = n
    top = 0
    stack[0] = root
    m = 0
    while top >= 0:
        v = stack[top]
        top -= 1
        out_label[m] = label[v]
        out_arity[m] = arity[v]
        m += 1
        # push children right-to-left so the leftmost is visited first
        c = first[v]
        cnt = 0
        while c >= 0:
            cnt += 1
            c = nxt[c]
        c = first[v]
        base = top + cnt
        j = 0
        while c >= 0:
            stack[base - j] = c
            j += 1
            c = nxt[c]
        top = base
    return m


@kernel
def build_strong(draws, n):
    """Preorder ``(labels, arity)`` of the strong tree encoded by ``draws``.

    ``n >= 2``; ``draws`` holds ``k_3..k_n``.
    """
    total = 2 * n - 1
    slot_of_leaf = np.empty(n, np.int64)
    target_slot = np.zeros(n + 1, np.int64)
    q = np.zeros(n + 1, np.int64)
    bit = np.zeros(_fenwick_len(n), np.int64)
    leaf_at_slot = np.empty(n + 1, np.int64)
    parent = np.empty(total, np.int64)
    first = np.empty(total, np.int64)
    last = np.empty(total, np.int64)
    nxt = np.empty(total, np.int64)
    prv = np.empty(total, np.int64)
    label = np.empty(total, np.int64)
    arity = np.empty(total, np.int64)
    _split_targets(draws, n, slot_of_leaf, target_slot, q, bit)
    lab = _link(draws, n, slot_of_leaf, target_slot, leaf_at_slot,
                parent, first, last, nxt, prv, label, arity)
    used = n + lab
    out_label = np.empty(used, np.int64)
    out_arity = np.empty(used, np.int64)
    stack = np.empty(used, np.int64)
    # compact ids: internal ids n..n+lab-1 are contiguous, nothing to remap
    _emit_preorder(n, first, nxt, label, arity, out_label, out_arity, stack)
    return out_label, out_arity


@kernel
def strong_params(draws, n):
    """Per-row ``[internal, root_arity, root_leaves, binary]`` for a draw matrix."""
    rows = draws.shape[0]
    out = np.zeros((rows, 4), np.int64)
    total = 2 * n - 1
    slot_of_leaf = np.empty(n, np.int64)
    target_slot = np.zeros(n + 1, np.int64)
    q = np.zeros(n + 1, np.int64)
    bit = np.zeros(_fenwick_len(n), np.int64)
    leaf_at_slot = np.empty(n + 1, np.int64)
    parent = np.empty(total, np.int64)
    first = np.empty(total, np.int64)
    last = np.empty(total, np.int64)
    nxt = np.empty(total, np.int64)
    prv = np.empty(total, np.int64)
    label = np.empty(total, np.int64)
    arity = np.empty(total, np.int64)
    for r in range(rows):
        d = draws[r]
        _split_targets(d, n, slot_of_leaf, target_slot, q, bit)
        lab = _link(d, n, slot_of_leaf, target_slot, leaf_at_slot,
                    parent, first, last, nxt, prv, label, arity)
        root = n
        leaves_at_root = 0
        c = first[root]
        while c >= 0:
            if arity[c] == 0:
                leaves_at_root += 1
            c = nxt[c]
        binary = 0
        for v in range(n, n + lab):
            if arity[v] == 2:
                binary += 1
        out[r, 0] = lab
        out[r, 1] = arity[root]
        out[r, 2] = leaves_at_root
        out[r, 3] = binary
    return out


@kernel
def strong_params_scan(draws, n):
    """Same output as :func:`strong_params`, read off the draws in one linear scan.

    Each step inserts one leaf at a rank known from the forward pass.  A
    node's arity is 2 plus the appends that directly follow its creation,
    so internal, root-arity and binary counts need no tree.  Root-attached
    leaves are tracked by their current ranks; there are few of them and
    the list only shrinks after the first split.
    """
    rows = draws.shape[0]
    out = np.zeros((rows, 4), np.int64)
    ranks = np.empty(n + 1, np.int64)
    for r in range(rows):
        d = draws[r]
        internal = 1
        root_arity = 2
        binary = 0
        extra = 0  # appends to the last created node
        split = False
        ranks[0] = 1
        ranks[1] = 2
        cnt = 2
        right = 2
        for i in range(3, n + 1):
            k = d[i - 3]
            if k == i:
                right += 1
                qi = right
                extra += 1
                if not split:
                    root_arity += 1
            else:
                qi = k + 1
                right = k + 1
                if extra == 0:
                    binary += 1
                extra = 0
                internal += 1
                split = True
                for j in range(cnt):
                    if ranks[j] == k:
                        cnt -= 1
                        ranks[j] = ranks[cnt]
                        break
            for j in range(cnt):
                if ranks[j] >= qi:
                    ranks[j] += 1
            if not split and k == i:
                ranks[cnt] = qi
                cnt += 1
        if extra == 0:
            binary += 1
        out[r, 0] = internal
        out[r, 1] = root_arity
        out[r, 2] = cnt
        out[r, 3] = binary
    return out


@kernel
def preorder_children(arity, child_ptr):
    """Flattened child lists for nodes numbered in preorder."""
    m = arity.shape[0]
    child_idx = np.empty(max(m - 1, 0), np.int64)
    filled = np.zeros(m, np.int64)
    stack = np.empty(m, np.int64)
    top = -1
    for j in range(m):
        if j > 0:
            p = stack[top]
            child_idx[child_ptr[p] + filled[p]] = j
            filled[p] += 1
            if filled[p] == arity[p]:
                top -= 1
        if arity[j] > 0:
            top += 1
            stack[top] = j
    return child_idx


@kernel
def walk(child_ptr, child_idx, root):
    """Preorder walk from ``root`` that tolerates cycles and shared children.

    Returns ``(order, visits)``: reached nodes in preorder, and how many times
    each node was reached through a parent link (1 for a proper tree node).
    """
    m = child_ptr.shape[0] - 1
    visits = np.zeros(m, np.int64)
    order = np.empty(m, np.int64)
    stack = np.empty(m + 1, np.int64)
    count = 0
    top = 0
    stack[0] = root
    visits[root] = 1
    while top >= 0:
        v = stack[top]
        top -= 1
        order[count] = v
        count += 1
        for j in range(child_ptr[v + 1] - 1, child_ptr[v] - 1, -1):
            c = child_idx[j]
            visits[c] += 1
            if visits[c] == 1:
                top += 1
                stack[top] = c
    return order[:count], visits


@kernel
def fdr_fill(buf, pos, limit, bounds, out, state):
    """Fast Dice Roller over a buffered bit stream.

    Fills ``out[r, j]`` uniform in ``[0, bounds[j])`` reading bits MSB-first
    from ``buf`` starting at bit ``pos``.  Stops early when the next bit would
    pass ``limit``; ``state = [r, j, v, c]`` lets the caller refill the buffer
    and resume mid-draw.  Returns the new bit position.

    Each loop keeps ``c`` uniform on ``[0, v)``; once ``v >= m`` either ``c < m``
    is accepted or the excess ``c - m`` (uniform on ``[0, v - m)``) is kept, so
    no randomness is thrown away.  Expected cost is below ``log2(m) + 2`` bits.
    """
    rows = out.shape[0]
    cols = bounds.shape[0]
    r = state[0]
    j = state[1]
    v = state[2]
    c = state[3]
    while r < rows:
        while j < cols:
            m = bounds[j]
            while v < m:
                if pos >= limit:
                    state[0] = r
                    state[1] = j
                    state[2] = v
                    state[3] = c
                    return pos
                bit = (buf[pos >> 6] >> np.uint64(63 - (pos & 63))) & np.uint64(1)
                pos += 1
                v = 2 * v
                c = 2 * c + np.int64(bit)
                if v >= m:
                    if c < m:
                        break
                    v -= m
                    c -= m
            out[r, j] = c
            v = 1
            c = 0
            j += 1
        j = 0
        r += 1
    state[0] = r
    state[1] = 0
    state[2] = 1
    state[3] = 0
    return pos
