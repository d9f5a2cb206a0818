"""The three nerve constructions: cubical nerve of a one-object groupoid,
simplicial bar nerve, and the rack nerve.

Cubical-nerve cells in degree n are functors from the subset poset of
{1..n} into the group, encoded as vertex labelings v with v(empty) = e and
F(A -> B) = v(A)^-1 v(B); this is a bijection with G^(2^n - 1), avoiding
backtracking over edge labelings (cross-checked against brute force in the
tests at small sizes).  Faces precompose with the coordinate insertions and
renormalize so the new origin maps to the unit.

Simplicial degeneracies are indexed 1..n+1, with s_i inserting the unit
before position i (so s_1(g) = (e, g)); faces keep the usual 0..n indexing.
The matching identities are documented on validate_simplicial.
"""

from __future__ import annotations

from .cubical import CubSet
from .racks import FiniteGroup, PointedRack


class BudgetExceeded(Exception):
    def __init__(self, message, degree):
        super().__init__(message)
        self.degree = degree


class SimplicialSet:
    __slots__ = ("max_degree", "sizes", "labels", "_face", "_degen", "_index")

    def __init__(self, max_degree, labels, face, degen):
        """face[(n,i)]: X_n -> X_{n-1} for 0 <= i <= n;
        degen[(n,i)]: X_{n-1} -> X_n for 1 <= i <= n."""
        self.max_degree = max_degree
        self.labels = tuple(tuple(l) for l in labels)
        self.sizes = tuple(len(l) for l in self.labels)
        self._face = dict(face)
        self._degen = dict(degen)
        self._index = tuple({lbl: i for i, lbl in enumerate(lbls)} for lbls in self.labels)

    def n_cells(self, n):
        return self.sizes[n] if 0 <= n <= self.max_degree else 0

    def face(self, n, i, c):
        return self._face[(n, i)][c]

    def degen(self, n, i, c):
        return self._degen[(n, i)][c]

    def label(self, n, c):
        return self.labels[n][c]

    def index(self, n, label):
        return self._index[n][label]

    def degenerate_cells(self, n):
        if n == 0:
            return set()
        out = set()
        for i in range(1, n + 1):
            out.update(self._degen[(n, i)])
        return out


def validate_simplicial(x: SimplicialSet):
    """Simplicial identities, adjusted for 1-indexed degeneracies
    (S_J below is the classical s_{J-1}):

        d_i d_k = d_{k-1} d_i                    (i < k)
        S_A S_B = S_{B+1} S_A                    (A <= B)
        d_i S_J = S_{J-1} d_i   (i <= J-2) ; id  (i in {J-1, J}) ;
                  S_J d_{i-1}   (i >= J+1)
    """
    bad = []
    N = x.max_degree
    for n in range(2, N + 1):
        for i in range(0, n + 1):
            for k in range(i + 1, n + 1):
                for c in range(x.n_cells(n)):
                    if x.face(n - 1, i, x.face(n, k, c)) != x.face(n - 1, k - 1, x.face(n, i, c)):
                        bad.append((n, x.label(n, c), "d_%d d_%d" % (i, k)))
    for n in range(1, N):
        for a in range(1, n + 2):
            for b in range(a, n + 1):
                for c in range(x.n_cells(n - 1)):
                    if x.degen(n + 1, a, x.degen(n, b, c)) != x.degen(n + 1, b + 1, x.degen(n, a, c)):
                        bad.append((n - 1, x.label(n - 1, c), "s_%d s_%d" % (a, b)))
    for n in range(1, N + 1):
        for j in range(1, n + 1):
            for i in range(0, n + 1):
                for c in range(x.n_cells(n - 1)):
                    got = x.face(n, i, x.degen(n, j, c))
                    if i in (j - 1, j):
                        want = c
                    elif i <= j - 2:
                        want = x.degen(n - 1, j - 1, x.face(n - 1, i, c))
                    else:
                        want = x.degen(n - 1, j, x.face(n - 1, i - 1, c))
                    if got != want:
                        bad.append((n - 1, x.label(n - 1, c), "d_%d s_%d" % (i, j)))
    return bad


# -- bar nerve ----------------------------------------------------------------


def bar_nerve(g: FiniteGroup, max_degree: int, budget: int = 2_000_000) -> SimplicialSet:
    """Degree-n cells are n-tuples of group elements; the three-case face
    formula drops, multiplies, or truncates; degeneracies insert the unit."""
    cells = [[()]]
    for n in range(1, max_degree + 1):
        if g.order ** n > budget:
            raise BudgetExceeded("bar nerve degree %d exceeds budget" % n, n)
        cells.append([prev + (a,) for prev in cells[n - 1] for a in range(g.order)])
    index = [{t: k for k, t in enumerate(cs)} for cs in cells]
    face = {}
    degen = {}
    for n in range(1, max_degree + 1):
        for i in range(0, n + 1):
            col = []
            for t in cells[n]:
                if i == 0:
                    out = t[1:]
                elif i == n:
                    out = t[:-1]
                else:
                    out = t[:i - 1] + (g.mul[t[i - 1]][t[i]],) + t[i + 1:]
                col.append(index[n - 1][out])
            face[(n, i)] = tuple(col)
        for i in range(1, n + 1):
            degen[(n, i)] = tuple(index[n][t[:i - 1] + (g.unit,) + t[i - 1:]]
                                  for t in cells[n - 1])
    labels = [[tuple(g.elements[a] for a in t) for t in cs] for cs in cells]
    x = SimplicialSet(max_degree, labels, face, degen)
    bad = validate_simplicial(x)
    assert not bad, "bar nerve failed simplicial identities: %s" % (bad[:3],)
    return x


def bar_cell_index(g: FiniteGroup, nerve: SimplicialSet, tup):
    return nerve.index(len(tup), tuple(g.elements[a] for a in tup))


# -- rack nerve ----------------------------------------------------------------


def rack_nerve(x: PointedRack, max_degree: int, budget: int = 2_000_000,
               validate: bool = True) -> CubSet:
    """Nerve of a pointed rack: degree-n cells are n-tuples; the eps=1 face
    at i acts on the earlier entries by <| x_i and drops entry i, the eps=0
    face just drops it; degeneracies insert the neutral element."""
    cells = [[()]]
    for n in range(1, max_degree + 1):
        if x.order ** n > budget:
            raise BudgetExceeded("rack nerve degree %d exceeds budget" % n, n)
        cells.append([prev + (a,) for prev in cells[n - 1] for a in range(x.order)])
    index = [{t: k for k, t in enumerate(cs)} for cs in cells]
    face = {}
    degen = {}
    for n in range(1, max_degree + 1):
        for i in range(1, n + 1):
            col0, col1 = [], []
            for t in cells[n]:
                col0.append(index[n - 1][t[:i - 1] + t[i:]])
                conj = tuple(x.op[a][t[i - 1]] for a in t[:i - 1])
                col1.append(index[n - 1][conj + t[i:]])
            face[(n, i, 0)] = tuple(col0)
            face[(n, i, 1)] = tuple(col1)
            degen[(n, i)] = tuple(index[n][t[:i - 1] + (x.basepoint,) + t[i - 1:]]
                                  for t in cells[n - 1])
    labels = [[tuple(x.elements[a] for a in t) for t in cs] for cs in cells]
    out = CubSet(max_degree, labels, face, degen, is_lset=True)
    if validate:
        out.validate()
    return out


def rack_cell_index(x: PointedRack, nerve: CubSet, tup):
    return nerve.index(len(tup), tuple(x.elements[a] for a in tup))


# -- cubical nerve of a group --------------------------------------------------


def _insert_bit(mask: int, i: int, eps: int) -> int:
    """Coordinate insertion {0,1}^(n-1) -> {0,1}^n at position i (1-based)."""
    low = mask & ((1 << (i - 1)) - 1)
    high = mask >> (i - 1)
    return low | (eps << (i - 1)) | (high << i)


def _delete_bit(mask: int, i: int) -> int:
    low = mask & ((1 << (i - 1)) - 1)
    high = mask >> i
    return low | (high << (i - 1))


def group_cubical_nerve(g: FiniteGroup, max_degree: int,
                        budget: int = 2_000_000, validate: bool = True) -> CubSet:
    """Degree-n cells: vertex labelings v of the nonzero masks of {0,1}^n
    (v(0) = e implicitly), as tuples indexed by mask-1.  Faces precompose
    with the insertion delta_{i,eps} and renormalize so the new origin maps
    to the unit; degeneracies precompose with the coordinate deletion."""
    order = g.order
    for n in range(max_degree + 1):
        if order ** (2 ** n - 1) > budget:
            raise BudgetExceeded("cubical nerve degree %d needs %d cells"
                                 % (n, order ** (2 ** n - 1)), n)
    from itertools import product as iproduct

    cells = []
    for n in range(max_degree + 1):
        cells.append([tuple(t) for t in iproduct(range(order), repeat=2 ** n - 1)])
    index = [{t: k for k, t in enumerate(cs)} for cs in cells]

    def vertex(v, mask):
        return g.unit if mask == 0 else v[mask - 1]

    face = {}
    degen = {}
    for n in range(1, max_degree + 1):
        for i in range(1, n + 1):
            for eps in (0, 1):
                ins = [_insert_bit(m, i, eps) for m in range(2 ** (n - 1))]
                base_inv = None
                col = []
                for v in cells[n]:
                    o = vertex(v, ins[0])
                    oi = g.inv[o]
                    w = tuple(g.mul[oi][vertex(v, ins[m])] for m in range(1, 2 ** (n - 1)))
                    col.append(index[n - 1][w])
                face[(n, i, eps)] = tuple(col)
            dels = [_delete_bit(m, i) for m in range(1, 2 ** n)]
            degen[(n, i)] = tuple(index[n][tuple(vertex(v, dm) for dm in dels)]
                                  for v in cells[n - 1])
    labels = [[tuple(g.elements[a] for a in t) for t in cs] for cs in cells]
    out = CubSet(max_degree, labels, face, degen, is_lset=False)
    if validate:
        out.validate()
    return out


def lnerve_inclusion_labels(g: FiniteGroup, tup):
    """Vertex labeling of the cubical-nerve cell corresponding to a rack
    nerve cell (g_1,...,g_n): v(A) is the product of the g_i over i in A in
    increasing order.  This realizes the explicit bijection between the
    rack nerve and the first-face equalizer of the cubical nerve."""
    n = len(tup)
    v = []
    for mask in range(1, 2 ** n):
        acc = g.unit
        for i in range(n):
            if mask >> i & 1:
                acc = g.mul[acc][tup[i]]
        v.append(acc)
    return tuple(v)
