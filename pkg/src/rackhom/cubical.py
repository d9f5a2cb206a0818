"""Finite truncated cubical sets, the cube-category models, and the functors
that cut a cubical set down to (or collapse it onto) a single-vertex object
whose two first faces coincide ("L-sets").

A CubSet stores cells per degree as indices 0..k-1 with a side table of
human-readable labels, face tables d_{i,eps} (1 <= i <= n, eps in {0,1}) and
degeneracy tables s_i (1 <= i <= n, mapping degree n-1 into degree n).  All
structure maps honour the cubical identities; `validate_cubical` checks
every instance exhaustively and returns a report.

Composition convention: "d_{i,eps} d_{j,omega}" etc. are written as function
composition (right map applied first).  The identities checked are

    d_{i,eps} d_{k,omega} = d_{k-1,omega} d_{i,eps}          (i < k)
    s_i s_k = s_{k+1} s_i                                    (i <= k)
    d_{k,eps} s_i = s_i d_{k-1,eps}   (i < k)
                  = id                (i = k)
                  = s_{i-1} d_{k,eps} (i > k)
"""

from __future__ import annotations

import json
import warnings
from itertools import combinations


class InternalInvariantViolation(AssertionError):
    pass


class QuotientIllDefined(Exception):
    def __init__(self, message, witnesses):
        super().__init__(message)
        self.witnesses = witnesses


class TruncationTooLow(Exception):
    pass


class CubSet:
    __slots__ = ("max_degree", "sizes", "labels", "_face", "_degen", "is_lset", "_index")

    def __init__(self, max_degree, labels, face, degen, is_lset=False):
        """labels: list per degree of cell labels; face[(n,i,eps)] and
        degen[(n,i)] are tuples of target indices (degen maps degree n-1
        into degree n)."""
        self.max_degree = max_degree
        self.labels = tuple(tuple(lbls) for lbls in labels)
        self.sizes = tuple(len(l) for l in self.labels)
        self._face = dict(face)
        self._degen = dict(degen)
        self.is_lset = is_lset
        self._index = tuple({lbl: i for i, lbl in enumerate(lbls)} for lbls in self.labels)

    # -- structure maps --------------------------------------------------

    def n_cells(self, n: int) -> int:
        return self.sizes[n] if 0 <= n <= self.max_degree else 0

    def face(self, n: int, i: int, eps: int, c: int) -> int:
        return self._face[(n, i, eps)][c]

    def degen(self, n: int, i: int, c: int) -> int:
        """s_i applied to a cell of degree n-1, landing in degree n."""
        return self._degen[(n, i)][c]

    def label(self, n: int, c: int):
        return self.labels[n][c]

    def index(self, n: int, label) -> int:
        return self._index[n][label]

    def face_word(self, n: int, word, c: int) -> int:
        """Apply faces at an index *set*, largest index first, so the
        remaining indices need no shifting.  word: iterable of (i, eps)."""
        for i, eps in sorted(word, reverse=True):
            c = self.face(n, i, eps, c)
            n -= 1
        return c

    def degenerate_cells(self, n: int):
        """Indices of degree-n cells in the image of some degeneracy."""
        if n == 0:
            return set()
        out = set()
        for i in range(1, n + 1):
            out.update(self._degen[(n, i)])
        return out

    # -- validation --------------------------------------------------------

    def validate(self):
        report = validate_cubical(self)
        if report:
            raise InternalInvariantViolation(
                "cubical identities violated: %s" % (report[:3],))
        return self


def validate_cubical(x: CubSet):
    """Exhaustively check every cubical identity instance on every cell.

    Returns a list of violations (degree, cell label, identity description);
    empty list means the structure is a genuine truncated cubical set.
    """
    bad = []
    N = x.max_degree
    # face-face: cells of degree n >= 2
    for n in range(2, N + 1):
        for i in range(1, n + 1):
            for k in range(i + 1, n + 1):
                for eps in (0, 1):
                    for om in (0, 1):
                        for c in range(x.n_cells(n)):
                            lhs = x.face(n - 1, i, eps, x.face(n, k, om, c))
                            rhs = x.face(n - 1, k - 1, om, x.face(n, i, eps, c))
                            if lhs != rhs:
                                bad.append((n, x.label(n, c),
                                            "d_%d,%d d_%d,%d != d_%d,%d d_%d,%d" % (i, eps, k, om, k - 1, om, i, eps)))
    # degen-degen: maps X_{n-1} -> X_{n+1}
    for n in range(1, N):
        for i in range(1, n + 2):
            for k in range(i, n + 1):
                for c in range(x.n_cells(n - 1)):
                    lhs = x.degen(n + 1, i, x.degen(n, k, c))
                    rhs = x.degen(n + 1, k + 1, x.degen(n, i, c))
                    if lhs != rhs:
                        bad.append((n - 1, x.label(n - 1, c),
                                    "s_%d s_%d != s_%d s_%d" % (i, k, k + 1, i)))
    # mixed: s_i : X_{n-1} -> X_n then d_{k,eps}
    for n in range(1, N + 1):
        for i in range(1, n + 1):
            for k in range(1, n + 1):
                for eps in (0, 1):
                    for c in range(x.n_cells(n - 1)):
                        got = x.face(n, k, eps, x.degen(n, i, c))
                        if i == k:
                            want = c
                        elif i < k:
                            want = x.degen(n - 1, i, x.face(n - 1, k - 1, eps, c))
                        else:
                            want = x.degen(n - 1, i - 1, x.face(n - 1, k, eps, c))
                        if got != want:
                            bad.append((n - 1, x.label(n - 1, c),
                                        "d_%d,%d s_%d violation" % (k, eps, i)))
    if x.is_lset:
        if x.n_cells(0) != 1:
            bad.append((0, None, "is_lset but |X_0| != 1"))
        for n in range(1, N + 1):
            for c in range(x.n_cells(n)):
                if x.face(n, 1, 0, c) != x.face(n, 1, 1, c):
                    bad.append((n, x.label(n, c), "is_lset but d_1,0 != d_1,1"))
    return bad


# -- the cube category ------------------------------------------------------


def cube_morphisms(m: int, n: int):
    """Hom(square_m, square_n): each output coordinate is a constant 0/1 or
    copies a distinct input variable, variable indices strictly increasing
    across outputs.  Returned as tuples of ('c',eps) / ('v',j) entries."""
    out = []
    for k in range(0, min(m, n) + 1):
        for outpos in combinations(range(n), k):
            for invars in combinations(range(1, m + 1), k):
                base = {}
                for pos, var in zip(outpos, invars):
                    base[pos] = ("v", var)
                rest = [p for p in range(n) if p not in base]
                for bits in range(2 ** len(rest)):
                    word = dict(base)
                    for t, p in enumerate(rest):
                        word[p] = ("c", (bits >> t) & 1)
                    out.append(tuple(word[p] for p in range(n)))
    out.sort()
    return out


def morphism_source_degree(f) -> int:
    return max((e[1] for e in f if e[0] == "v"), default=0)


def precompose_delta(f, i: int, eps: int):
    """f o delta_{i,eps}: substitute input i := eps, renumber higher inputs."""
    out = []
    for e in f:
        if e[0] == "v":
            j = e[1]
            if j == i:
                out.append(("c", eps))
            elif j > i:
                out.append(("v", j - 1))
            else:
                out.append(e)
        else:
            out.append(e)
    return tuple(out)


def precompose_sigma(f, i: int):
    """f o sigma_i: inputs above i shift up (input i of the source is unused)."""
    out = []
    for e in f:
        if e[0] == "v" and e[1] >= i:
            out.append(("v", e[1] + 1))
        else:
            out.append(e)
    return tuple(out)


def morphism_normal_form(f, m: int):
    """Canonical surjection-then-injection factorization of a cube-category
    morphism: strictly increasing sigma indices (the unused inputs, deleted
    largest-first so no reindexing occurs) followed by strictly increasing
    delta insertions (i, eps) at the constant output positions."""
    deltas = tuple((pos + 1, e[1]) for pos, e in enumerate(f) if e[0] == "c")
    used = {e[1] for e in f if e[0] == "v"}
    sigmas = tuple(sorted(set(range(1, m + 1)) - used))
    return sigmas, deltas


def morphism_from_normal_form(sigmas, deltas, m: int, n: int):
    """Rebuild the output-tuple form; inverse of morphism_normal_form."""
    used = [j for j in range(1, m + 1) if j not in set(sigmas)]
    consts = dict()
    for i, eps in deltas:
        consts[i] = eps
    out = []
    it = iter(used)
    for pos in range(1, n + 1):
        if pos in consts:
            out.append(("c", consts[pos]))
        else:
            out.append(("v", next(it)))
    return tuple(out)


# -- standard models ---------------------------------------------------------


def standard_model(kind: str, n: int, truncation=None) -> CubSet:
    """The representable cubical set on the n-cube ("cube") or its collapse
    to a single vertex ("lcube")."""
    if truncation is None:
        truncation = n + 1
    if truncation < n:
        warnings.warn("truncation %d below %d: top cells missing" % (truncation, n),
                      stacklevel=2)
    if kind == "cube":
        labels = [cube_morphisms(m, n) for m in range(truncation + 1)]
        face = {}
        degen = {}
        index = [{f: i for i, f in enumerate(ls)} for ls in labels]
        for m in range(1, truncation + 1):
            for i in range(1, m + 1):
                for eps in (0, 1):
                    face[(m, i, eps)] = tuple(
                        index[m - 1][precompose_delta(f, i, eps)] for f in labels[m])
                degen[(m, i)] = tuple(
                    index[m][precompose_sigma(f, i)] for f in labels[m - 1])
        return CubSet(truncation, labels, face, degen, is_lset=False).validate()
    if kind == "lcube":
        cube = standard_model("cube", n, truncation + 1)
        return gamma_functor(cube)
    raise ValueError("unknown standard model %r" % (kind,))


# -- the L functor (equalizer of iterated first faces) ----------------------


def l_functor(x: CubSet) -> CubSet:
    """Subobject of x on the cells whose iterated first-face words all agree,
    with a single 0-cell.  Raises if the 0-cell is not unique."""
    N = x.max_degree
    keep = [set(range(x.n_cells(0)))]
    for n in range(1, N + 1):
        good = set()
        for c in range(x.n_cells(n)):
            a = x.face(n, 1, 0, c)
            b = x.face(n, 1, 1, c)
            if a == b and a in keep[n - 1]:
                good.add(c)
        keep.append(good)
    # degree 0: the common endpoint of the kept 1-cells
    if x.n_cells(0) == 1:
        zero = {0}
    else:
        zero = {x.face(1, 1, 0, c) for c in keep[1]}
        if len(zero) != 1:
            raise InternalInvariantViolation(
                "L functor needs a unique 0-cell; found endpoints %r" % (sorted(zero),))
    keep[0] = zero
    new_index = []
    labels = []
    for n in range(N + 1):
        order = sorted(keep[n])
        new_index.append({c: i for i, c in enumerate(order)})
        labels.append([x.label(n, c) for c in order])
    face = {}
    degen = {}
    for n in range(1, N + 1):
        order = sorted(keep[n])
        for i in range(1, n + 1):
            for eps in (0, 1):
                col = []
                for c in order:
                    t = x.face(n, i, eps, c)
                    if t not in new_index[n - 1]:
                        raise InternalInvariantViolation(
                            "face left the equalizer subset at degree %d" % n)
                    col.append(new_index[n - 1][t])
                face[(n, i, eps)] = tuple(col)
            col = []
            for c in sorted(keep[n - 1]):
                t = x.degen(n, i, c)
                if t not in new_index[n]:
                    raise InternalInvariantViolation(
                        "degeneracy image escaped the equalizer subset at degree %d" % n)
                col.append(new_index[n][t])
            degen[(n, i)] = tuple(col)
    return CubSet(N, labels, face, degen, is_lset=True).validate()


# -- the Gamma functor (coequalizer of the two first faces) ------------------


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller root wins, for deterministic class representatives
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def gamma_functor(x: CubSet) -> CubSet:
    """Quotient of x identifying the two first faces of every cell, degree by
    degree; the output is truncated one below x (degree-n classes need the
    degree-(n+1) cells to generate the relation)."""
    gx, _ = gamma_functor_with_projection(x)
    return gx


def gamma_functor_with_projection(x: CubSet):
    """gamma_functor plus the projection tables proj[n][cell] = class index."""
    N = x.max_degree
    if N < 1:
        raise TruncationTooLow("gamma needs at least degree 1")
    M = N - 1
    uf = []
    for n in range(M + 1):
        u = _UnionFind(x.n_cells(n))
        for c in range(x.n_cells(n + 1)):
            u.union(x.face(n + 1, 1, 0, c), x.face(n + 1, 1, 1, c))
        uf.append(u)
    reps = []
    cls_index = []
    for n in range(M + 1):
        rep = sorted({uf[n].find(c) for c in range(x.n_cells(n))})
        reps.append(rep)
        cls_index.append({r: i for i, r in enumerate(rep)})
    if len(reps[0]) != 1:
        raise QuotientIllDefined(
            "degree-0 coequalizer is not a single class (disconnected input)",
            witnesses=[x.label(0, r) for r in reps[0]])

    def cls(n, c):
        return cls_index[n][uf[n].find(c)]

    labels = [[x.label(n, r) for r in reps[n]] for n in range(M + 1)]
    face = {}
    degen = {}
    for n in range(1, M + 1):
        members = [[] for _ in range(len(reps[n]))]
        for c in range(x.n_cells(n)):
            members[cls(n, c)].append(c)
        for i in range(1, n + 1):
            for eps in (0, 1):
                col = []
                for k, ms in enumerate(members):
                    images = {cls(n - 1, x.face(n, i, eps, c)) for c in ms}
                    if len(images) != 1:
                        raise QuotientIllDefined(
                            "induced face d_%d,%d not constant on a class" % (i, eps),
                            witnesses=[x.label(n, c) for c in ms])
                    col.append(images.pop())
                face[(n, i, eps)] = tuple(col)
        for i in range(1, n + 1):
            membs = [[] for _ in range(len(reps[n - 1]))]
            for c in range(x.n_cells(n - 1)):
                membs[cls(n - 1, c)].append(c)
            col = []
            for k, ms in enumerate(membs):
                images = {cls(n, x.degen(n, i, c)) for c in ms}
                if len(images) != 1:
                    raise QuotientIllDefined(
                        "induced degeneracy s_%d not constant on a class" % i,
                        witnesses=[x.label(n - 1, c) for c in ms])
                col.append(images.pop())
            degen[(n, i)] = tuple(col)
    gx = CubSet(M, labels, face, degen, is_lset=True).validate()
    proj = [tuple(cls(n, c) for c in range(x.n_cells(n))) for n in range(M + 1)]
    return gx, proj


# -- comparisons -------------------------------------------------------------


def verify_cubset_map(x: CubSet, y: CubSet, maps, up_to=None) -> bool:
    """Check that maps[n]: cells(x,n) -> cells(y,n) is a degreewise bijection
    commuting with every face and degeneracy (cell-by-cell)."""
    N = min(x.max_degree, y.max_degree) if up_to is None else up_to
    for n in range(N + 1):
        if x.n_cells(n) != y.n_cells(n):
            return False
        if sorted(maps[n]) != list(range(x.n_cells(n))) or \
                sorted(set(maps[n])) != list(range(y.n_cells(n))):
            return False
    for n in range(1, N + 1):
        for i in range(1, n + 1):
            for eps in (0, 1):
                for c in range(x.n_cells(n)):
                    if maps[n - 1][x.face(n, i, eps, c)] != y.face(n, i, eps, maps[n][c]):
                        return False
            for c in range(x.n_cells(n - 1)):
                if maps[n][x.degen(n, i, c)] != y.degen(n, i, maps[n - 1][c]):
                    return False
    return True


def find_isomorphism(x: CubSet, y: CubSet, up_to=None):
    """Backtracking search for a cubical isomorphism x -> y through degree
    up_to; returns the degreewise maps or None.  Intended for small objects;
    candidates are pruned by commuting with the already-fixed lower degrees.
    """
    N = min(x.max_degree, y.max_degree) if up_to is None else up_to
    for n in range(N + 1):
        if x.n_cells(n) != y.n_cells(n):
            return None
    maps = [None] * (N + 1)

    def extend(n):
        if n > N:
            return True
        kx, ky = x.n_cells(n), y.n_cells(n)
        cands = []
        for c in range(kx):
            ok = []
            for d in range(ky):
                good = True
                if n >= 1:
                    for i in range(1, n + 1):
                        for eps in (0, 1):
                            if maps[n - 1][x.face(n, i, eps, c)] != y.face(n, i, eps, d):
                                good = False
                                break
                        if not good:
                            break
                if good:
                    ok.append(d)
            cands.append(ok)

        assign = [None] * kx
        # degeneracy images are forced by the lower-degree map
        if n >= 1:
            for i in range(1, n + 1):
                for c in range(x.n_cells(n - 1)):
                    src = x.degen(n, i, c)
                    tgt = y.degen(n, i, maps[n - 1][c])
                    if assign[src] is not None and assign[src] != tgt:
                        return False
                    if tgt not in cands[src]:
                        return False
                    assign[src] = tgt
        used = set(a for a in assign if a is not None)
        if len(used) != sum(1 for a in assign if a is not None):
            return False
        free = [c for c in range(kx) if assign[c] is None]
        free.sort(key=lambda c: len(cands[c]))

        def place(t):
            if t == len(free):
                return extend(n + 1)
            c = free[t]
            for d in cands[c]:
                if d in used:
                    continue
                assign[c] = d
                used.add(d)
                maps[n] = assign
                if place(t + 1):
                    return True
                used.discard(d)
                assign[c] = None
            return False

        maps[n] = assign
        return place(0)

    if extend(0):
        return maps
    return None


def cubset_to_json(x: CubSet) -> str:
    doc = {
        "max_degree": x.max_degree,
        "cells": [list(range(k)) for k in x.sizes],
        "faces": {"%d,%d,%d" % k: list(v) for k, v in sorted(x._face.items())},
        "degeneracies": {"%d,%d" % k: list(v) for k, v in sorted(x._degen.items())},
        "is_lset": x.is_lset,
        "labels": [[repr(l) for l in lbls] for lbls in x.labels],
    }
    return json.dumps(doc, sort_keys=True)
