"""Pure-Python kernels. Same algorithms, same results as ``_kernels.pyx``."""

from __future__ import annotations

from itertools import combinations

# gate kinds, shared with the compiled kernels
INPUT, CONST0, CONST1, NOT, AND, OR = range(6)
X = 2


class SearchLimitExceeded(RuntimeError):
    pass


# --------------------------------------------------------------------------
# machine search


def _window(k, word_len):
    lo = -k
    hi = max(k, word_len - 1)
    return lo, hi - lo + 1


def _decode(key, tapes, lo, width):
    state, heads, cells = key
    out = []
    for t in range(tapes):
        row = cells[t * width:(t + 1) * width]
        out.append(tuple((i + lo, s) for i, s in enumerate(row) if s))
    return state, tuple(heads), tuple(out)


def bfs(m, word, k, limit):
    """Yield ``(witness, state, heads, tapes)`` for accepting configurations.

    Configurations are deduplicated globally; ``limit`` > 0 stops after that
    many hits.
    """
    T = m.tapes
    lo, width = _window(k, len(word))
    neutral = m.neutral
    trans = m.transitions
    by_state = m.by_state
    accepting = m.accepting

    cells = bytearray(T * width)
    for i, s in enumerate(word):
        cells[i - lo] = s
    start = (m.initial, (0,) * T, bytes(cells))
    nodes = [start]
    parent = [-1]
    via = [-1]
    index = {start: 0}
    hits = 0

    def result(nid):
        path = []
        while parent[nid] >= 0:
            path.append(via[nid])
            nid = parent[nid]
        path.reverse()
        return path

    if m.initial in accepting:
        yield [], *_decode(start, T, lo, width)
        hits += 1
        if limit and hits >= limit:
            return

    frontier = [0]
    for _ in range(k):
        nxt = []
        for nid in frontier:
            state, heads, cb = nodes[nid]
            for j in by_state[state]:
                t = trans[j]
                reads = t.reads
                for tape in range(T):
                    r = reads[tape]
                    if r != neutral and cb[tape * width + heads[tape] - lo] != r:
                        break
                else:
                    writes = t.writes
                    nb = cb
                    if any(w != neutral for w in writes):
                        ba = bytearray(cb)
                        for tape in range(T):
                            w = writes[tape]
                            if w != neutral:
                                ba[tape * width + heads[tape] - lo] = w
                        nb = bytes(ba)
                    nh = tuple(h + d for h, d in zip(heads, t.moves))
                    key = (t.dst, nh, nb)
                    if key in index:
                        continue
                    cid = len(nodes)
                    index[key] = cid
                    nodes.append(key)
                    parent.append(nid)
                    via.append(j)
                    nxt.append(cid)
                    if t.dst in accepting:
                        yield result(cid), *_decode(key, T, lo, width)
                        hits += 1
                        if limit and hits >= limit:
                            return
        frontier = nxt
        if not frontier:
            return


# --------------------------------------------------------------------------
# circuits: bit-parallel evaluation


def _list(a):
    return a.tolist() if hasattr(a, "tolist") else list(a)


def eval_words(kinds, ptr, fanin, input_ids, words, mask):
    """Evaluate every gate on bit-vectors; lane b of ``words[i]`` feeds input i."""
    kinds, ptr, fanin, input_ids = map(_list, (kinds, ptr, fanin, input_ids))
    vals = [0] * len(kinds)
    for i, g in enumerate(input_ids):
        vals[g] = words[i]
    for g, kind in enumerate(kinds):
        if kind == INPUT:
            continue
        if kind == CONST0:
            vals[g] = 0
        elif kind == CONST1:
            vals[g] = mask
        elif kind == NOT:
            vals[g] = mask ^ vals[fanin[ptr[g]]]
        elif kind == AND:
            acc = mask
            for a in fanin[ptr[g]:ptr[g + 1]]:
                acc &= vals[a]
                if not acc:
                    break
            vals[g] = acc
        else:
            acc = 0
            for a in fanin[ptr[g]:ptr[g + 1]]:
                acc |= vals[a]
                if acc == mask:
                    break
            vals[g] = acc
    return vals


def structure(kinds, ptr, fanin, output):
    """(weft, depth, large gate count) by one pass in topological order.

    Weft counts AND/OR gates of fan-in >= 3 along paths that start at an
    input; depth counts the non-source gates on the longest path.
    """
    kinds, ptr, fanin = map(_list, (kinds, ptr, fanin))
    G = len(kinds)
    weft = [-1] * G
    depth = [0] * G
    large_count = 0
    for g in range(G):
        kind = kinds[g]
        if kind == INPUT:
            weft[g] = 0
            continue
        if kind == CONST0 or kind == CONST1:
            continue
        lo, hi = ptr[g], ptr[g + 1]
        large = (kind == AND or kind == OR) and hi - lo >= 3
        large_count += large
        best_w, best_d = -1, 0
        for e in range(lo, hi):
            a = fanin[e]
            if weft[a] > best_w:
                best_w = weft[a]
            if depth[a] > best_d:
                best_d = depth[a]
        depth[g] = best_d + 1
        if best_w >= 0:
            weft[g] = best_w + large
    return max(weft[output], 0), depth[output], large_count


def brute_first(kinds, ptr, fanin, input_ids, output, weight, lanes=256):
    """First weight-``weight`` input set (lexicographic) that satisfies the circuit."""
    kinds, ptr, fanin, input_ids = map(_list, (kinds, ptr, fanin, input_ids))
    n = len(input_ids)
    combos = combinations(range(n), weight)
    while True:
        batch = []
        for c in combos:
            batch.append(c)
            if len(batch) == lanes:
                break
        if not batch:
            return None
        words = [0] * n
        for lane, c in enumerate(batch):
            bit = 1 << lane
            for i in c:
                words[i] |= bit
        mask = (1 << len(batch)) - 1
        out = eval_words(kinds, ptr, fanin, input_ids, words, mask)[output]
        if out:
            lane = (out & -out).bit_length() - 1
            return list(batch[lane])
        if len(batch) < lanes:
            return None


# --------------------------------------------------------------------------
# circuits: branch and bound with three-valued propagation


class _Propagator:
    def __init__(self, kinds, ptr, fanin, fo_ptr, fanout):
        self.kinds = kinds
        self.ptr = ptr
        self.fanin = fanin
        self.fo_ptr = fo_ptr
        self.fanout = fanout
        n = len(kinds)
        self.val = [X] * n
        self.c0 = [0] * n
        self.c1 = [0] * n
        self.trail = []
        self.qhead = 0
        self.ones = 0
        self.assigned_inputs = 0

    def assign(self, g, v):
        cur = self.val[g]
        if cur == X:
            self.val[g] = v
            self.trail.append(g)
            if self.kinds[g] == INPUT:
                self.assigned_inputs += 1
                self.ones += v
            return True
        return cur == v

    def _check(self, f, own):
        kind = self.kinds[f]
        val = self.val
        if kind == NOT:
            a = self.fanin[self.ptr[f]]
            if val[a] != X:
                return self.assign(f, 1 - val[a])
            if val[f] != X:
                return self.assign(a, 1 - val[f])
            return True
        if kind != AND and kind != OR:
            return True
        lo, hi = self.ptr[f], self.ptr[f + 1]
        n = hi - lo
        # OR is AND with every value flipped
        ctrl = 0 if kind == AND else 1
        hits = self.c0[f] if kind == AND else self.c1[f]
        rest = self.c1[f] if kind == AND else self.c0[f]
        vf = val[f]
        if hits > 0:
            return self.assign(f, ctrl)
        if rest == n:
            return self.assign(f, 1 - ctrl)
        if vf == 1 - ctrl:
            if own:
                for a in self.fanin[lo:hi]:
                    if val[a] == X and not self.assign(a, 1 - ctrl):
                        return False
        elif vf == ctrl and rest == n - 1:
            for a in self.fanin[lo:hi]:
                if val[a] == X:
                    return self.assign(a, ctrl)
        return True

    def propagate(self):
        trail = self.trail
        val = self.val
        fanout = self.fanout
        fo_ptr = self.fo_ptr
        while self.qhead < len(trail):
            g = trail[self.qhead]
            self.qhead += 1
            counter = self.c1 if val[g] else self.c0
            outs = fanout[fo_ptr[g]:fo_ptr[g + 1]]
            # count first: undo() relies on processed entries being fully counted
            for f in outs:
                counter[f] += 1
            for f in outs:
                if not self._check(f, False):
                    return False
            if not self._check(g, True):
                return False
        return True

    def undo(self, mark):
        trail = self.trail
        val = self.val
        fanout = self.fanout
        fo_ptr = self.fo_ptr
        for idx in range(len(trail) - 1, mark - 1, -1):
            g = trail[idx]
            if idx < self.qhead:
                counter = self.c1 if val[g] else self.c0
                for f in fanout[fo_ptr[g]:fo_ptr[g + 1]]:
                    counter[f] -= 1
            if self.kinds[g] == INPUT:
                self.assigned_inputs -= 1
                self.ones -= val[g]
            val[g] = X
        del trail[mark:]
        self.qhead = min(self.qhead, mark)


def bcp_search(kinds, ptr, fanin, fo_ptr, fanout, input_ids, output, weight, node_limit):
    """Lexicographically first satisfying input set of the given weight.

    Depth-first over inputs in order, value 1 before 0, pruning with
    three-valued forward/backward propagation and the cardinality bound.
    """
    kinds, ptr, fanin, fo_ptr, fanout, input_ids = map(
        _list, (kinds, ptr, fanin, fo_ptr, fanout, input_ids))
    p = _Propagator(kinds, ptr, fanin, fo_ptr, fanout)
    n_in = len(input_ids)
    for g, kind in enumerate(kinds):
        if kind == CONST0:
            p.assign(g, 0)
        elif kind == CONST1:
            p.assign(g, 1)
        elif kind in (AND, OR) and ptr[g] == ptr[g + 1]:
            p.assign(g, 1 if kind == AND else 0)
    if not (p.assign(output, 1) and p.propagate()):
        return None

    def settle():
        # cardinality forcing at the current node
        free = n_in - p.assigned_inputs
        if p.ones > weight or p.ones + free < weight:
            return False
        if free and (p.ones == weight or p.ones + free == weight):
            v = 0 if p.ones == weight else 1
            for g in input_ids:
                if p.val[g] == X and not p.assign(g, v):
                    return False
            return p.propagate()
        return True

    stack = []  # (position, trail mark, zero branch taken)
    pos = 0
    nodes = 0
    ok = settle()
    while True:
        if ok:
            while pos < n_in and p.val[input_ids[pos]] != X:
                pos += 1
            if pos == n_in:
                return [i for i, g in enumerate(input_ids) if p.val[g] == 1]
            nodes += 1
            if node_limit and nodes > node_limit:
                raise SearchLimitExceeded(f"search exceeded {node_limit} decisions")
            stack.append((pos, len(p.trail), False))
            ok = p.assign(input_ids[pos], 1) and p.propagate() and settle()
            continue
        while True:
            if not stack:
                return None
            pos, mark, zero = stack.pop()
            p.undo(mark)
            if zero:
                continue
            stack.append((pos, mark, True))
            ok = p.assign(input_ids[pos], 0) and p.propagate() and settle()
            break
