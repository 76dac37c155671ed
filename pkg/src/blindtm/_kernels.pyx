# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. ``_fallback.py`` holds the reference versions; both
must return identical results on identical inputs."""

import numpy as np
cimport numpy as cnp

from libc.stdint cimport int8_t, int32_t, int64_t, uint8_t, uint64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset
from cpython.bytes cimport PyBytes_FromStringAndSize, PyBytes_AS_STRING

from . import _fallback
from ._fallback import SearchLimitExceeded

cnp.import_array()

cdef enum:
    K_INPUT = 0
    K_CONST0 = 1
    K_CONST1 = 2
    K_NOT = 3
    K_AND = 4
    K_OR = 5
    VX = 2


# --------------------------------------------------------------------------
# machine search


def bfs(m, word, int k, int limit):
    """List of ``(witness, state, heads, tapes)`` for accepting configurations
    in BFS order; same contract as ``_fallback.bfs``."""
    if len(m.alphabet) > 255:
        return list(_fallback.bfs(m, word, k, limit))
    cdef int T = m.tapes
    cdef int lo = -k
    cdef int hi = max(k, len(word) - 1)
    cdef int W = hi - lo + 1
    cdef int neutral = m.neutral
    cdef int nT = len(m.transitions)
    cdef int nQ = len(m.states)

    rd = np.zeros((max(nT, 1), T), dtype=np.int32)
    wr = np.zeros((max(nT, 1), T), dtype=np.int32)
    mv = np.zeros((max(nT, 1), T), dtype=np.int32)
    dst = np.zeros(max(nT, 1), dtype=np.int32)
    for jx, tr in enumerate(m.transitions):
        rd[jx] = tr.reads
        wr[jx] = tr.writes
        mv[jx] = tr.moves
        dst[jx] = tr.dst
    bs_ptr = np.zeros(nQ + 1, dtype=np.int32)
    groups = m.by_state
    for q in range(nQ):
        bs_ptr[q + 1] = bs_ptr[q] + len(groups[q])
    bs_idx = np.zeros(max(int(bs_ptr[nQ]), 1), dtype=np.int32)
    pos = 0
    for q in range(nQ):
        for jx in groups[q]:
            bs_idx[pos] = jx
            pos += 1
    acc = np.zeros(max(nQ, 1), dtype=np.uint8)
    for q in m.accepting:
        acc[q] = 1

    cdef int32_t[:, ::1] RD = rd
    cdef int32_t[:, ::1] WR = wr
    cdef int32_t[:, ::1] MV = mv
    cdef int32_t[::1] DST = dst
    cdef int32_t[::1] BSP = bs_ptr
    cdef int32_t[::1] BSI = bs_idx
    cdef uint8_t[::1] ACC = acc

    cdef Py_ssize_t keylen = 4 + 4 * T + T * W
    cdef Py_ssize_t head_off = 4
    cdef Py_ssize_t cell_off = 4 + 4 * T
    scratch_obj = bytearray(keylen)
    cdef char* scratch = scratch_obj

    memset(scratch, 0, keylen)
    (<int32_t*>scratch)[0] = m.initial
    cdef int32_t* sh = <int32_t*>(scratch + head_off)
    cdef uint8_t* sc = <uint8_t*>(scratch + cell_off)
    cdef int t, j, jj, state, r, w, nid, cid
    for t in range(T):
        sh[t] = -lo
    for ix, sym in enumerate(word):
        sc[ix - lo] = sym
    start = PyBytes_FromStringAndSize(scratch, keylen)

    nodes = [start]
    parent = [-1]
    via = [-1]
    index = {start: 0}
    out = []

    if m.initial in m.accepting:
        out.append(_result(0, nodes, parent, via, T, W, lo))
        if limit and len(out) >= limit:
            return out

    cdef const char* base
    cdef const int32_t* heads
    cdef const uint8_t* cells
    cdef bint ok
    frontier = [0]
    for _ in range(k):
        nxt = []
        for nid in frontier:
            key = nodes[nid]
            base = PyBytes_AS_STRING(key)
            state = (<const int32_t*>base)[0]
            heads = <const int32_t*>(base + head_off)
            cells = <const uint8_t*>(base + cell_off)
            for jj in range(BSP[state], BSP[state + 1]):
                j = BSI[jj]
                ok = True
                for t in range(T):
                    r = RD[j, t]
                    if r != neutral and cells[t * W + heads[t]] != r:
                        ok = False
                        break
                if not ok:
                    continue
                memcpy(scratch, base, keylen)
                (<int32_t*>scratch)[0] = DST[j]
                for t in range(T):
                    w = WR[j, t]
                    if w != neutral:
                        sc[t * W + heads[t]] = <uint8_t>w
                    sh[t] = heads[t] + MV[j, t]
                nk = PyBytes_FromStringAndSize(scratch, keylen)
                if nk in index:
                    continue
                cid = len(nodes)
                index[nk] = cid
                nodes.append(nk)
                parent.append(nid)
                via.append(j)
                nxt.append(cid)
                if ACC[DST[j]]:
                    out.append(_result(cid, nodes, parent, via, T, W, lo))
                    if limit and len(out) >= limit:
                        return out
        frontier = nxt
        if not frontier:
            break
    return out


cdef _result(int nid, list nodes, list parent, list via, int T, int W, int lo):
    path = []
    cdef int cur = nid
    while parent[cur] >= 0:
        path.append(via[cur])
        cur = parent[cur]
    path.reverse()
    key = nodes[nid]
    cdef const char* base = PyBytes_AS_STRING(key)
    cdef const int32_t* heads = <const int32_t*>(base + 4)
    cdef const uint8_t* cells = <const uint8_t*>(base + 4 + 4 * T)
    cdef int t, i
    tapes = []
    for t in range(T):
        tapes.append(tuple((i + lo, cells[t * W + i]) for i in range(W) if cells[t * W + i]))
    head_t = tuple(heads[t] + lo for t in range(T))
    return path, (<const int32_t*>base)[0], head_t, tuple(tapes)


# --------------------------------------------------------------------------
# circuits: bit-parallel evaluation


cdef void _eval64(const int8_t* kinds, const int64_t* ptr, const int32_t* fanin,
                  Py_ssize_t G, uint64_t* vals) noexcept nogil:
    cdef Py_ssize_t g, e
    cdef uint64_t acc
    cdef int8_t kind
    for g in range(G):
        kind = kinds[g]
        if kind == K_INPUT:
            continue
        elif kind == K_CONST0:
            vals[g] = 0
        elif kind == K_CONST1:
            vals[g] = <uint64_t>0xFFFFFFFFFFFFFFFF
        elif kind == K_NOT:
            vals[g] = ~vals[fanin[ptr[g]]]
        elif kind == K_AND:
            acc = <uint64_t>0xFFFFFFFFFFFFFFFF
            for e in range(ptr[g], ptr[g + 1]):
                acc &= vals[fanin[e]]
                if acc == 0:
                    break
            vals[g] = acc
        else:
            acc = 0
            for e in range(ptr[g], ptr[g + 1]):
                acc |= vals[fanin[e]]
                if acc == <uint64_t>0xFFFFFFFFFFFFFFFF:
                    break
            vals[g] = acc


def eval_words(kinds, ptr, fanin, input_ids, words, mask):
    """Bit-parallel evaluation with up to 64 lanes; mirrors the fallback."""
    cdef int8_t[::1] K = np.ascontiguousarray(kinds, dtype=np.int8)
    cdef int64_t[::1] P = np.ascontiguousarray(ptr, dtype=np.int64)
    cdef int32_t[::1] F = np.ascontiguousarray(fanin, dtype=np.int32)
    if mask >> 64:
        return _fallback.eval_words(kinds, ptr, fanin, input_ids, words, mask)
    vals = np.zeros(len(K), dtype=np.uint64)
    cdef uint64_t[::1] V = vals
    for i, g in enumerate(input_ids):
        V[g] = words[i]
    if len(K):
        _eval64(&K[0], &P[0], &F[0] if len(F) else NULL, len(K), &V[0])
    m64 = int(mask)
    return [int(v) & m64 for v in vals]


def structure(kinds, ptr, fanin, Py_ssize_t output):
    """(weft, depth, large gate count); mirrors the fallback."""
    cdef int8_t[::1] K = np.ascontiguousarray(kinds, dtype=np.int8)
    cdef int64_t[::1] P = np.ascontiguousarray(ptr, dtype=np.int64)
    cdef int32_t[::1] F = np.ascontiguousarray(fanin, dtype=np.int32)
    cdef Py_ssize_t G = K.shape[0], g, e
    wbuf = np.full(G, -1, dtype=np.int32)
    dbuf = np.zeros(G, dtype=np.int32)
    cdef int32_t[::1] weft = wbuf
    cdef int32_t[::1] depth = dbuf
    cdef int32_t best_w, best_d, a
    cdef int8_t kind
    cdef bint large
    cdef Py_ssize_t large_count = 0
    with nogil:
        for g in range(G):
            kind = K[g]
            if kind == K_INPUT:
                weft[g] = 0
                continue
            if kind == K_CONST0 or kind == K_CONST1:
                continue
            large = (kind == K_AND or kind == K_OR) and P[g + 1] - P[g] >= 3
            large_count += large
            best_w = -1
            best_d = 0
            for e in range(P[g], P[g + 1]):
                a = F[e]
                if weft[a] > best_w:
                    best_w = weft[a]
                if depth[a] > best_d:
                    best_d = depth[a]
            depth[g] = best_d + 1
            if best_w >= 0:
                weft[g] = best_w + large
    return max(int(weft[output]), 0), int(depth[output]), large_count


def brute_first(kinds, ptr, fanin, input_ids, int output, int weight, lanes=64):
    cdef int8_t[::1] K = np.ascontiguousarray(kinds, dtype=np.int8)
    cdef int64_t[::1] P = np.ascontiguousarray(ptr, dtype=np.int64)
    fanin_arr = np.ascontiguousarray(fanin, dtype=np.int32)
    if len(fanin_arr) == 0:
        fanin_arr = np.zeros(1, dtype=np.int32)
    cdef int32_t[::1] F = fanin_arr
    ids_arr = np.ascontiguousarray(input_ids, dtype=np.int32)
    if len(ids_arr) == 0:
        ids_arr = np.zeros(1, dtype=np.int32)
    cdef int32_t[::1] IDS = ids_arr
    cdef int N = len(input_ids)
    cdef int w = weight
    cdef Py_ssize_t G = len(K)
    if w < 0 or w > N:
        return None
    vals_arr = np.zeros(G, dtype=np.uint64)
    cdef uint64_t[::1] V = vals_arr
    combo_arr = np.arange(max(w, 1), dtype=np.int32)
    cdef int32_t[::1] c = combo_arr
    batch_arr = np.zeros((64, max(w, 1)), dtype=np.int32)
    cdef int32_t[:, ::1] B = batch_arr
    cdef int used, lane, i, jdx
    cdef bint more = True
    cdef uint64_t out, bit
    while more:
        used = 0
        while more and used < 64:
            bit = (<uint64_t>1) << used
            for i in range(w):
                B[used, i] = c[i]
                V[IDS[c[i]]] |= bit
            used += 1
            # advance to the next combination in lexicographic order
            i = w - 1
            while i >= 0 and c[i] == N - w + i:
                i -= 1
            if i < 0:
                more = False
            else:
                c[i] += 1
                for jdx in range(i + 1, w):
                    c[jdx] = c[jdx - 1] + 1
        with nogil:
            _eval64(&K[0], &P[0], &F[0], G, &V[0])
        out = V[output]
        if used < 64:
            out &= ((<uint64_t>1) << used) - 1
        if out:
            lane = 0
            while not (out >> lane) & 1:
                lane += 1
            return [int(B[lane, i]) for i in range(w)]
        for lane in range(used):
            for i in range(w):
                V[IDS[B[lane, i]]] = 0
    return None


# --------------------------------------------------------------------------
# circuits: branch and bound with three-valued propagation


cdef struct Prop:
    const int8_t* kinds
    const int64_t* ptr
    const int32_t* fanin
    const int64_t* fo_ptr
    const int32_t* fanout
    int8_t* val
    int32_t* c0
    int32_t* c1
    int32_t* trail
    Py_ssize_t ntrail
    Py_ssize_t qhead
    int ones
    int assigned


cdef inline bint _assign(Prop* p, int32_t g, int v) noexcept nogil:
    cdef int8_t cur = p.val[g]
    if cur == VX:
        p.val[g] = <int8_t>v
        p.trail[p.ntrail] = g
        p.ntrail += 1
        if p.kinds[g] == K_INPUT:
            p.assigned += 1
            p.ones += v
        return True
    return cur == v


cdef bint _check(Prop* p, int32_t f, bint own) noexcept nogil:
    cdef int8_t kind = p.kinds[f]
    cdef int32_t a
    cdef int64_t lo, hi, e
    cdef int n, ctrl, hits, rest
    cdef int8_t vf
    if kind == K_NOT:
        a = p.fanin[p.ptr[f]]
        if p.val[a] != VX:
            return _assign(p, f, 1 - p.val[a])
        if p.val[f] != VX:
            return _assign(p, a, 1 - p.val[f])
        return True
    if kind != K_AND and kind != K_OR:
        return True
    lo = p.ptr[f]
    hi = p.ptr[f + 1]
    n = <int>(hi - lo)
    if kind == K_AND:
        ctrl = 0
        hits = p.c0[f]
        rest = p.c1[f]
    else:
        ctrl = 1
        hits = p.c1[f]
        rest = p.c0[f]
    vf = p.val[f]
    if hits > 0:
        return _assign(p, f, ctrl)
    if rest == n:
        return _assign(p, f, 1 - ctrl)
    if vf == 1 - ctrl:
        if own:
            for e in range(lo, hi):
                a = p.fanin[e]
                if p.val[a] == VX and not _assign(p, a, 1 - ctrl):
                    return False
    elif vf == ctrl and rest == n - 1:
        for e in range(lo, hi):
            a = p.fanin[e]
            if p.val[a] == VX:
                return _assign(p, a, ctrl)
    return True


cdef bint _propagate(Prop* p) noexcept nogil:
    cdef int32_t g, f
    cdef int64_t e, lo, hi
    cdef int32_t* counter
    while p.qhead < p.ntrail:
        g = p.trail[p.qhead]
        p.qhead += 1
        counter = p.c1 if p.val[g] else p.c0
        lo = p.fo_ptr[g]
        hi = p.fo_ptr[g + 1]
        for e in range(lo, hi):
            counter[p.fanout[e]] += 1
        for e in range(lo, hi):
            if not _check(p, p.fanout[e], False):
                return False
        if not _check(p, g, True):
            return False
    return True


cdef void _undo(Prop* p, Py_ssize_t mark) noexcept nogil:
    cdef Py_ssize_t idx
    cdef int32_t g
    cdef int64_t e
    cdef int32_t* counter
    idx = p.ntrail - 1
    while idx >= mark:
        g = p.trail[idx]
        if idx < p.qhead:
            counter = p.c1 if p.val[g] else p.c0
            for e in range(p.fo_ptr[g], p.fo_ptr[g + 1]):
                counter[p.fanout[e]] -= 1
        if p.kinds[g] == K_INPUT:
            p.assigned -= 1
            p.ones -= p.val[g]
        p.val[g] = VX
        idx -= 1
    p.ntrail = mark
    if p.qhead > mark:
        p.qhead = mark


cdef bint _settle(Prop* p, const int32_t* ids, int n_in, int weight) noexcept nogil:
    cdef int free_ = n_in - p.assigned
    cdef int v, i
    if p.ones > weight or p.ones + free_ < weight:
        return False
    if free_ and (p.ones == weight or p.ones + free_ == weight):
        v = 0 if p.ones == weight else 1
        for i in range(n_in):
            if p.val[ids[i]] == VX and not _assign(p, ids[i], v):
                return False
        return _propagate(p)
    return True


def bcp_search(kinds, ptr, fanin, fo_ptr, fanout, input_ids, int output, int weight,
               long long node_limit):
    kinds_a = np.ascontiguousarray(kinds, dtype=np.int8)
    ptr_a = np.ascontiguousarray(ptr, dtype=np.int64)
    fanin_a = np.ascontiguousarray(fanin, dtype=np.int32)
    fo_ptr_a = np.ascontiguousarray(fo_ptr, dtype=np.int64)
    fanout_a = np.ascontiguousarray(fanout, dtype=np.int32)
    ids_a = np.ascontiguousarray(input_ids, dtype=np.int32)
    G = len(kinds_a)
    # keep pointers valid for empty arrays
    if len(fanin_a) == 0:
        fanin_a = np.zeros(1, dtype=np.int32)
    if len(fanout_a) == 0:
        fanout_a = np.zeros(1, dtype=np.int32)
    if len(ids_a) == 0:
        ids_a = np.zeros(1, dtype=np.int32)
    cdef int n_in = len(input_ids)
    val_a = np.full(G, VX, dtype=np.int8)
    c0_a = np.zeros(G, dtype=np.int32)
    c1_a = np.zeros(G, dtype=np.int32)
    trail_a = np.zeros(G + 1, dtype=np.int32)
    stack_pos_a = np.zeros(n_in + 1, dtype=np.int32)
    stack_mark_a = np.zeros(n_in + 1, dtype=np.int64)
    stack_zero_a = np.zeros(n_in + 1, dtype=np.int8)

    cdef int8_t[::1] K = kinds_a
    cdef int64_t[::1] P = ptr_a
    cdef int32_t[::1] F = fanin_a
    cdef int64_t[::1] FP = fo_ptr_a
    cdef int32_t[::1] FO = fanout_a
    cdef int32_t[::1] IDS = ids_a
    cdef int8_t[::1] VAL = val_a
    cdef int32_t[::1] C0 = c0_a
    cdef int32_t[::1] C1 = c1_a
    cdef int32_t[::1] TR = trail_a
    cdef int32_t[::1] SP = stack_pos_a
    cdef int64_t[::1] SM = stack_mark_a
    cdef int8_t[::1] SZ = stack_zero_a

    cdef Prop p
    p.kinds = &K[0]
    p.ptr = &P[0]
    p.fanin = &F[0]
    p.fo_ptr = &FP[0]
    p.fanout = &FO[0]
    p.val = &VAL[0]
    p.c0 = &C0[0]
    p.c1 = &C1[0]
    p.trail = &TR[0]
    p.ntrail = 0
    p.qhead = 0
    p.ones = 0
    p.assigned = 0

    cdef Py_ssize_t g
    for g in range(G):
        if K[g] == K_CONST0:
            _assign(&p, <int32_t>g, 0)
        elif K[g] == K_CONST1:
            _assign(&p, <int32_t>g, 1)
        elif (K[g] == K_AND or K[g] == K_OR) and P[g] == P[g + 1]:
            _assign(&p, <int32_t>g, 1 if K[g] == K_AND else 0)
    if not (_assign(&p, output, 1) and _propagate(&p)):
        return None

    cdef int depth = 0
    cdef int pos = 0
    cdef long long nodes = 0
    cdef bint ok, zero
    cdef int status = 0  # 1 found, 2 exhausted, 3 limit
    cdef Py_ssize_t mark
    with nogil:
        ok = _settle(&p, &IDS[0], n_in, weight)
        while True:
            if ok:
                while pos < n_in and p.val[IDS[pos]] != VX:
                    pos += 1
                if pos == n_in:
                    status = 1
                    break
                nodes += 1
                if node_limit and nodes > node_limit:
                    status = 3
                    break
                SP[depth] = pos
                SM[depth] = p.ntrail
                SZ[depth] = 0
                depth += 1
                ok = _assign(&p, IDS[pos], 1) and _propagate(&p) and _settle(&p, &IDS[0], n_in, weight)
                continue
            while True:
                if depth == 0:
                    status = 2
                    break
                depth -= 1
                pos = SP[depth]
                mark = SM[depth]
                zero = SZ[depth]
                _undo(&p, mark)
                if zero:
                    continue
                SZ[depth] = 1
                depth += 1
                ok = _assign(&p, IDS[pos], 0) and _propagate(&p) and _settle(&p, &IDS[0], n_in, weight)
                break
            if status:
                break
    if status == 3:
        raise SearchLimitExceeded(f"search exceeded {node_limit} decisions")
    if status == 2:
        return None
    return [i for i in range(n_in) if VAL[IDS[i]] == 1]
