"""Maximum-weight maximum-cardinality matching on a dense complete graph.

Edmonds' blossom algorithm with Galil's O(n^3) primal-dual bookkeeping, laid
out on flat integer arrays so it compiles under numba. The recursive parts of
the textbook formulation (blossom expansion and augmentation) run on explicit
work stacks; they touch disjoint sub-blossoms, so processing order does not
change the result.

Node ids ``0..n-1`` are vertices, ``n..2n-1`` are non-trivial blossoms.
Vertex duals and slacks are stored pre-multiplied by two. ``-1`` encodes
"no edge"/"no vertex". Weights are compared exactly, without tolerances.
"""

import numpy as np

from ._backend import njit

# rows of the per-node integer state table
LABEL = 0  # 0 free, 1 S, 2 T, bit 4 = breadcrumb during scans
LEV = 1  # label edge (v, w), w inside the node
LEW = 2
BEV = 3  # least-slack edge
BEW = 4
PARENT = 5
BASE = 6
NCH = 7  # number of sub-blossoms
HASMB = 8  # mybestedges list is valid
NMB = 9
ACTIVE = 10
NROWS = 11

# rows of the scalar meta array
QLEN = 0
NFREE = 1


@njit(cache=True)
def _leaves(b, st, childs, n, stack, out):
    cnt = 0
    top = 1
    stack[0] = b
    while top > 0:
        top -= 1
        x = stack[top]
        if x < n:
            out[cnt] = x
            cnt += 1
        else:
            for k in range(st[NCH, x]):
                stack[top] = childs[x - n, k]
                top += 1
    return cnt


@njit(cache=True)
def _slack(v, w, wt, dual):
    return dual[v] + dual[w] - 2.0 * wt[v, w]


@njit(cache=True)
def _wrap(j, length):
    return ((j % length) + length) % length


@njit(cache=True)
def _assign_label(w, t, v, st, inblossom, mate, childs, n, queue, meta, stack, buf):
    while True:
        b = inblossom[w]
        st[LABEL, w] = t
        st[LABEL, b] = t
        st[LEV, w] = v
        st[LEV, b] = v
        if v >= 0:
            st[LEW, w] = w
            st[LEW, b] = w
        else:
            st[LEW, w] = -1
            st[LEW, b] = -1
        st[BEV, w] = -1
        st[BEW, w] = -1
        st[BEV, b] = -1
        st[BEW, b] = -1
        if t == 1:
            if b >= n:
                cnt = _leaves(b, st, childs, n, stack, buf)
                for k in range(cnt):
                    queue[meta[QLEN]] = buf[k]
                    meta[QLEN] += 1
            else:
                queue[meta[QLEN]] = b
                meta[QLEN] += 1
            return
        # a T-blossom passes label S on to the mate of its base
        base = st[BASE, b]
        w = mate[base]
        t = 1
        v = base


@njit(cache=True)
def _scan_blossom(v, w, st, inblossom, path):
    plen = 0
    base = -1
    while v != -1:
        b = inblossom[v]
        if st[LABEL, b] & 4:
            base = st[BASE, b]
            break
        path[plen] = b
        plen += 1
        st[LABEL, b] = 5
        if st[LEV, b] == -1:
            v = -1
        else:
            v = st[LEV, b]
            b = inblossom[v]
            v = st[LEV, b]
        if w != -1:
            v, w = w, v
    for k in range(plen):
        st[LABEL, path[k]] = 1
    return base


@njit(cache=True)
def _add_blossom(base, v, w, wt, dual, bdual, st, inblossom, childs, cev, cew,
                 mbv, mbw, n, queue, meta, unused, stack, buf, tmpc, tmpv, tmpw,
                 bestto_v, bestto_w, touched, sub_leaves):
    bb = inblossom[base]
    bv = inblossom[v]
    bw = inblossom[w]
    meta[NFREE] -= 1
    b = unused[meta[NFREE]]
    bi = b - n
    st[BASE, b] = base
    st[PARENT, b] = -1
    st[PARENT, bb] = b
    # trace back from v to the base, collecting sub-blossoms and edges
    m = 0
    tmpv[0] = v
    tmpw[0] = w
    ne = 1
    while bv != bb:
        st[PARENT, bv] = b
        tmpc[m] = bv
        m += 1
        tmpv[ne] = st[LEV, bv]
        tmpw[ne] = st[LEW, bv]
        ne += 1
        v = st[LEV, bv]
        bv = inblossom[v]
    tmpc[m] = bb
    m += 1
    for k in range(m):
        childs[bi, k] = tmpc[m - 1 - k]
    for k in range(ne):
        cev[bi, k] = tmpv[ne - 1 - k]
        cew[bi, k] = tmpw[ne - 1 - k]
    while bw != bb:
        st[PARENT, bw] = b
        childs[bi, m] = bw
        m += 1
        cev[bi, ne] = st[LEW, bw]
        cew[bi, ne] = st[LEV, bw]
        ne += 1
        w = st[LEV, bw]
        bw = inblossom[w]
    st[NCH, b] = m
    st[LABEL, b] = 1
    st[LEV, b] = st[LEV, bb]
    st[LEW, b] = st[LEW, bb]
    bdual[b] = 0.0
    st[ACTIVE, b] = 1
    st[HASMB, b] = 0
    st[NMB, b] = 0
    # former T-vertices become S-vertices and join the queue
    cnt = _leaves(b, st, childs, n, stack, buf)
    for k in range(cnt):
        x = buf[k]
        if st[LABEL, inblossom[x]] == 2:
            queue[meta[QLEN]] = x
            meta[QLEN] += 1
        inblossom[x] = b
    # least-slack edge from b to every other S-blossom
    ntouched = 0
    for c in range(m):
        sb = childs[bi, c]
        if sb >= n and st[HASMB, sb] == 1:
            sbi = sb - n
            for k in range(st[NMB, sb]):
                i = mbv[sbi, k]
                j = mbw[sbi, k]
                if inblossom[j] == b:
                    i, j = j, i
                bj = inblossom[j]
                if bj != b and st[LABEL, bj] == 1:
                    if bestto_v[bj] == -1:
                        touched[ntouched] = bj
                        ntouched += 1
                        bestto_v[bj] = i
                        bestto_w[bj] = j
                    elif _slack(i, j, wt, dual) < _slack(bestto_v[bj], bestto_w[bj], wt, dual):
                        bestto_v[bj] = i
                        bestto_w[bj] = j
            st[HASMB, sb] = 0
        else:
            if sb >= n:
                nl = _leaves(sb, st, childs, n, stack, sub_leaves)
            else:
                sub_leaves[0] = sb
                nl = 1
            for q in range(nl):
                x = sub_leaves[q]
                for y in range(n):
                    if y == x:
                        continue
                    i = x
                    j = y
                    if inblossom[j] == b:
                        i, j = j, i
                    bj = inblossom[j]
                    if bj != b and st[LABEL, bj] == 1:
                        if bestto_v[bj] == -1:
                            touched[ntouched] = bj
                            ntouched += 1
                            bestto_v[bj] = i
                            bestto_w[bj] = j
                        elif _slack(i, j, wt, dual) < _slack(bestto_v[bj], bestto_w[bj], wt, dual):
                            bestto_v[bj] = i
                            bestto_w[bj] = j
        st[BEV, sb] = -1
        st[BEW, sb] = -1
    best_v = -1
    best_w = -1
    best_slack = 0.0
    for k in range(ntouched):
        bj = touched[k]
        i = bestto_v[bj]
        j = bestto_w[bj]
        mbv[bi, k] = i
        mbw[bi, k] = j
        bestto_v[bj] = -1
        bestto_w[bj] = -1
        s = _slack(i, j, wt, dual)
        if best_v == -1 or s < best_slack:
            best_v = i
            best_w = j
            best_slack = s
    st[NMB, b] = ntouched
    st[HASMB, b] = 1
    st[BEV, b] = best_v
    st[BEW, b] = best_w


@njit(cache=True)
def _expand_blossom(b0, endstage, bdual, st, inblossom, mate, childs, cev, cew,
                    allow, n, queue, meta, unused, stack, buf, work, sub_leaves):
    top = 1
    work[0] = b0
    while top > 0:
        top -= 1
        b = work[top]
        bi = b - n
        nch = st[NCH, b]
        for k in range(nch):
            s = childs[bi, k]
            st[PARENT, s] = -1
            if s >= n:
                if endstage and bdual[s] == 0.0:
                    work[top] = s
                    top += 1
                else:
                    cnt = _leaves(s, st, childs, n, stack, buf)
                    for q in range(cnt):
                        inblossom[buf[q]] = s
            else:
                inblossom[s] = s
        if (not endstage) and st[LABEL, b] == 2:
            # relabel sub-blossoms of an expanding T-blossom, from the entry
            # child round to the base
            entrychild = inblossom[st[LEW, b]]
            j = 0
            for k in range(nch):
                if childs[bi, k] == entrychild:
                    j = k
                    break
            if j & 1:
                j -= nch
                jstep = 1
            else:
                jstep = -1
            v = st[LEV, b]
            w = st[LEW, b]
            while j != 0:
                if jstep == 1:
                    p = cev[bi, _wrap(j, nch)]
                    q = cew[bi, _wrap(j, nch)]
                else:
                    q = cev[bi, _wrap(j - 1, nch)]
                    p = cew[bi, _wrap(j - 1, nch)]
                st[LABEL, w] = 0
                st[LABEL, q] = 0
                _assign_label(w, 2, v, st, inblossom, mate, childs, n, queue, meta,
                              stack, buf)
                allow[p, q] = True
                allow[q, p] = True
                j += jstep
                if jstep == 1:
                    v = cev[bi, _wrap(j, nch)]
                    w = cew[bi, _wrap(j, nch)]
                else:
                    w = cev[bi, _wrap(j - 1, nch)]
                    v = cew[bi, _wrap(j - 1, nch)]
                allow[v, w] = True
                allow[w, v] = True
                j += jstep
            bw = childs[bi, _wrap(j, nch)]
            st[LABEL, w] = 2
            st[LABEL, bw] = 2
            st[LEV, w] = v
            st[LEW, w] = w
            st[LEV, bw] = v
            st[LEW, bw] = w
            st[BEV, bw] = -1
            st[BEW, bw] = -1
            j += jstep
            while childs[bi, _wrap(j, nch)] != entrychild:
                bv = childs[bi, _wrap(j, nch)]
                if st[LABEL, bv] == 1:
                    j += jstep
                    continue
                found = -1
                if bv >= n:
                    cnt = _leaves(bv, st, childs, n, stack, sub_leaves)
                    for q in range(cnt):
                        if st[LABEL, sub_leaves[q]] != 0:
                            found = sub_leaves[q]
                            break
                elif st[LABEL, bv] != 0:
                    found = bv
                if found != -1:
                    st[LABEL, found] = 0
                    st[LABEL, mate[st[BASE, bv]]] = 0
                    _assign_label(found, 2, st[LEV, found], st, inblossom, mate,
                                  childs, n, queue, meta, stack, buf)
                j += jstep
        # recycle the blossom id
        st[LABEL, b] = 0
        st[LEV, b] = -1
        st[LEW, b] = -1
        st[BEV, b] = -1
        st[BEW, b] = -1
        st[PARENT, b] = -1
        st[BASE, b] = -1
        st[NCH, b] = 0
        st[HASMB, b] = 0
        st[NMB, b] = 0
        st[ACTIVE, b] = 0
        bdual[b] = 0.0
        unused[meta[NFREE]] = b
        meta[NFREE] += 1


@njit(cache=True)
def _augment_blossom(b0, v0, st, mate, childs, cev, cew, n, work_b, work_v, tmpc,
                     tmpv, tmpw):
    top = 1
    work_b[0] = b0
    work_v[0] = v0
    while top > 0:
        top -= 1
        b = work_b[top]
        v = work_v[top]
        bi = b - n
        nch = st[NCH, b]
        t = v
        while st[PARENT, t] != b:
            t = st[PARENT, t]
        if t >= n:
            work_b[top] = t
            work_v[top] = v
            top += 1
        i = 0
        for k in range(nch):
            if childs[bi, k] == t:
                i = k
                break
        j = i
        if i & 1:
            j -= nch
            jstep = 1
        else:
            jstep = -1
        while j != 0:
            j += jstep
            t = childs[bi, _wrap(j, nch)]
            if jstep == 1:
                w = cev[bi, _wrap(j, nch)]
                x = cew[bi, _wrap(j, nch)]
            else:
                x = cev[bi, _wrap(j - 1, nch)]
                w = cew[bi, _wrap(j - 1, nch)]
            if t >= n:
                work_b[top] = t
                work_v[top] = w
                top += 1
            j += jstep
            t = childs[bi, _wrap(j, nch)]
            if t >= n:
                work_b[top] = t
                work_v[top] = x
                top += 1
            mate[w] = x
            mate[x] = w
        # rotate so that the sub-blossom holding v becomes the base
        for k in range(nch):
            tmpc[k] = childs[bi, (k + i) % nch]
            tmpv[k] = cev[bi, (k + i) % nch]
            tmpw[k] = cew[bi, (k + i) % nch]
        for k in range(nch):
            childs[bi, k] = tmpc[k]
            cev[bi, k] = tmpv[k]
            cew[bi, k] = tmpw[k]
        # the new base sub-blossom has v as base once its own work item runs
        st[BASE, b] = v


@njit(cache=True)
def _augment_matching(v, w, st, inblossom, mate, childs, cev, cew, n, work_b,
                      work_v, tmpc, tmpv, tmpw):
    for side in range(2):
        if side == 0:
            s = v
            j = w
        else:
            s = w
            j = v
        while True:
            bs = inblossom[s]
            if bs >= n:
                _augment_blossom(bs, s, st, mate, childs, cev, cew, n, work_b,
                                 work_v, tmpc, tmpv, tmpw)
            mate[s] = j
            if st[LEV, bs] == -1:
                break
            t = st[LEV, bs]
            bt = inblossom[t]
            s = st[LEV, bt]
            j = st[LEW, bt]
            if bt >= n:
                _augment_blossom(bt, j, st, mate, childs, cev, cew, n, work_b,
                                 work_v, tmpc, tmpv, tmpw)
            mate[j] = s


@njit(cache=True)
def max_weight_perfect_matching_dense(wt):
    """Return ``mate`` for a maximum-weight perfect matching of ``wt``.

    ``wt`` is a symmetric ``(n, n)`` float array (diagonal ignored) and ``n``
    must be even; every vertex is matched since the graph is complete and the
    search maximises cardinality first.
    """
    n = wt.shape[0]
    mate = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return mate
    maxweight = 0.0
    for i in range(n):
        for j in range(n):
            if i != j and wt[i, j] > maxweight:
                maxweight = wt[i, j]
    nn = 2 * n
    st = np.full((NROWS, nn), -1, dtype=np.int64)
    st[LABEL, :] = 0
    st[NCH, :] = 0
    st[HASMB, :] = 0
    st[NMB, :] = 0
    st[ACTIVE, :] = 0
    for v in range(n):
        st[BASE, v] = v
    inblossom = np.arange(n, dtype=np.int64)
    dual = np.full(n, maxweight)
    bdual = np.zeros(nn)
    childs = np.empty((n, n + 1), dtype=np.int64)
    cev = np.empty((n, n + 1), dtype=np.int64)
    cew = np.empty((n, n + 1), dtype=np.int64)
    mbv = np.empty((n, n), dtype=np.int64)
    mbw = np.empty((n, n), dtype=np.int64)
    allow = np.zeros((n, n), dtype=np.bool_)
    queue = np.empty(nn + 2, dtype=np.int64)
    meta = np.zeros(2, dtype=np.int64)
    unused = np.empty(n, dtype=np.int64)
    for k in range(n):
        unused[k] = nn - 1 - k
    meta[NFREE] = n
    stack = np.empty(nn + 2, dtype=np.int64)
    buf = np.empty(n, dtype=np.int64)
    sub_leaves = np.empty(n, dtype=np.int64)
    path = np.empty(nn, dtype=np.int64)
    work = np.empty(nn, dtype=np.int64)
    work_b = np.empty(nn, dtype=np.int64)
    work_v = np.empty(nn, dtype=np.int64)
    tmpc = np.empty(n + 1, dtype=np.int64)
    tmpv = np.empty(n + 1, dtype=np.int64)
    tmpw = np.empty(n + 1, dtype=np.int64)
    bestto_v = np.full(nn, -1, dtype=np.int64)
    bestto_w = np.full(nn, -1, dtype=np.int64)
    touched = np.empty(nn, dtype=np.int64)

    while True:
        # new stage: forget labels, least-slack edges and allowable edges
        for b in range(nn):
            st[LABEL, b] = 0
            st[LEV, b] = -1
            st[LEW, b] = -1
            st[BEV, b] = -1
            st[BEW, b] = -1
            st[HASMB, b] = 0
        allow[:, :] = False
        meta[QLEN] = 0
        for v in range(n):
            if mate[v] == -1 and st[LABEL, inblossom[v]] == 0:
                _assign_label(v, 1, -1, st, inblossom, mate, childs, n, queue, meta,
                              stack, buf)
        augmented = False
        while True:
            while meta[QLEN] > 0 and not augmented:
                meta[QLEN] -= 1
                v = queue[meta[QLEN]]
                for w in range(n):
                    if w == v:
                        continue
                    bv = inblossom[v]
                    bw = inblossom[w]
                    if bv == bw:
                        continue
                    kslack = 0.0
                    if not allow[v, w]:
                        kslack = _slack(v, w, wt, dual)
                        if kslack <= 0.0:
                            allow[v, w] = True
                            allow[w, v] = True
                    if allow[v, w]:
                        if st[LABEL, bw] == 0:
                            _assign_label(w, 2, v, st, inblossom, mate, childs, n,
                                          queue, meta, stack, buf)
                        elif st[LABEL, bw] == 1:
                            base = _scan_blossom(v, w, st, inblossom, path)
                            if base != -1:
                                _add_blossom(base, v, w, wt, dual, bdual, st,
                                             inblossom, childs, cev, cew, mbv, mbw,
                                             n, queue, meta, unused, stack, buf,
                                             tmpc, tmpv, tmpw, bestto_v, bestto_w,
                                             touched, sub_leaves)
                            else:
                                _augment_matching(v, w, st, inblossom, mate, childs,
                                                  cev, cew, n, work_b, work_v,
                                                  tmpc, tmpv, tmpw)
                                augmented = True
                                break
                        elif st[LABEL, w] == 0:
                            st[LABEL, w] = 2
                            st[LEV, w] = v
                            st[LEW, w] = w
                    elif st[LABEL, bw] == 1:
                        if st[BEV, bv] == -1 or kslack < _slack(st[BEV, bv], st[BEW, bv], wt, dual):
                            st[BEV, bv] = v
                            st[BEW, bv] = w
                    elif st[LABEL, w] == 0:
                        if st[BEV, w] == -1 or kslack < _slack(st[BEV, w], st[BEW, w], wt, dual):
                            st[BEV, w] = v
                            st[BEW, w] = w
            if augmented:
                break

            deltatype = -1
            delta = 0.0
            dv = -1
            dw = -1
            dblossom = -1
            for v in range(n):
                if st[LABEL, inblossom[v]] == 0 and st[BEV, v] != -1:
                    d = _slack(st[BEV, v], st[BEW, v], wt, dual)
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 2
                        dv = st[BEV, v]
                        dw = st[BEW, v]
            for b in range(nn):
                if b >= n and st[ACTIVE, b] == 0:
                    continue
                if st[PARENT, b] == -1 and st[LABEL, b] == 1 and st[BEV, b] != -1:
                    d = _slack(st[BEV, b], st[BEW, b], wt, dual) / 2.0
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 3
                        dv = st[BEV, b]
                        dw = st[BEW, b]
            for b in range(n, nn):
                if st[ACTIVE, b] == 1 and st[PARENT, b] == -1 and st[LABEL, b] == 2:
                    if deltatype == -1 or bdual[b] < delta:
                        delta = bdual[b]
                        deltatype = 4
                        dblossom = b
            if deltatype == -1:
                # maximum cardinality reached; final update keeps duals feasible
                deltatype = 1
                mind = dual[0]
                for v in range(1, n):
                    if dual[v] < mind:
                        mind = dual[v]
                delta = max(0.0, mind)

            for v in range(n):
                lab = st[LABEL, inblossom[v]]
                if lab == 1:
                    dual[v] -= delta
                elif lab == 2:
                    dual[v] += delta
            for b in range(n, nn):
                if st[ACTIVE, b] == 1 and st[PARENT, b] == -1:
                    if st[LABEL, b] == 1:
                        bdual[b] += delta
                    elif st[LABEL, b] == 2:
                        bdual[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2 or deltatype == 3:
                allow[dv, dw] = True
                allow[dw, dv] = True
                queue[meta[QLEN]] = dv
                meta[QLEN] += 1
            else:
                _expand_blossom(dblossom, False, bdual, st, inblossom, mate, childs,
                                cev, cew, allow, n, queue, meta, unused, stack, buf,
                                work, sub_leaves)

        if not augmented:
            break
        for b in range(n, nn):
            if (st[ACTIVE, b] == 1 and st[PARENT, b] == -1 and st[LABEL, b] == 1
                    and bdual[b] == 0.0):
                _expand_blossom(b, True, bdual, st, inblossom, mate, childs, cev, cew,
                                allow, n, queue, meta, unused, stack, buf, work,
                                sub_leaves)
    return mate
