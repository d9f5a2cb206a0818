from itertools import product

import pytest

from rackhom.cubical import l_functor, validate_cubical, verify_cubset_map
from rackhom.nerves import (
    BudgetExceeded,
    bar_nerve,
    group_cubical_nerve,
    lnerve_inclusion_labels,
    rack_nerve,
    validate_simplicial,
)
from rackhom.racks import conj_rack, preset, symmetric_group, trivial_rack


def test_trivial_group_nerve_sizes():
    g = preset("cyclic:1")
    x = group_cubical_nerve(g, 3)
    assert x.sizes == (1, 1, 1, 1)


def test_z2_cubical_nerve_counts():
    g = preset("cyclic:2")
    x = group_cubical_nerve(g, 3)
    assert [x.n_cells(n) for n in range(4)] == [1, 2, 8, 128]
    assert validate_cubical(x) == []


def brute_force_functor_count(g, n):
    """Oracle: count edge labelings of the n-cube poset with commuting squares.

    Edges A -> A|{i}; squares A -> A|{i} -> A|{i,j} must commute.
    """
    masks = list(range(2 ** n))
    edges = []
    for m in masks:
        for i in range(n):
            if not (m >> i) & 1:
                edges.append((m, i))
    count = 0
    for assignment in product(range(g.order), repeat=len(edges)):
        lab = {e: v for e, v in zip(edges, assignment)}
        ok = True
        for m in masks:
            for i in range(n):
                if (m >> i) & 1:
                    continue
                for j in range(i + 1, n):
                    if (m >> j) & 1:
                        continue
                    a = g.mul[lab[(m, i)]][lab[(m | (1 << i), j)]]
                    b = g.mul[lab[(m, j)]][lab[(m | (1 << j), i)]]
                    if a != b:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


def test_vertex_labeling_encoding_matches_brute_force():
    z2 = preset("cyclic:2")
    for n in range(0, 4):
        assert brute_force_functor_count(z2, n) == z2.order ** (2 ** n - 1)
    z3 = preset("cyclic:3")
    for n in range(0, 3):
        assert brute_force_functor_count(z3, n) == z3.order ** (2 ** n - 1)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded) as exc:
        group_cubical_nerve(symmetric_group(3), 4, budget=10_000)
    assert exc.value.degree <= 4


def test_bar_faces_and_degeneracies():
    g = symmetric_group(3)
    x = bar_nerve(g, 3)
    a, b = 1, 4
    idx = x.index(2, (g.elements[a], g.elements[b]))
    assert x.label(1, x.face(2, 1, idx)) == (g.elements[g.mul[a][b]],)
    assert x.label(1, x.face(2, 0, idx)) == (g.elements[b],)
    assert x.label(1, x.face(2, 2, idx)) == (g.elements[a],)
    gidx = x.index(1, (g.elements[a],))
    assert x.label(2, x.degen(2, 1, gidx)) == (g.elements[g.unit], g.elements[a])
    assert x.label(2, x.degen(2, 2, gidx)) == (g.elements[a], g.elements[g.unit])
    assert validate_simplicial(x) == []


def test_rack_nerve_faces():
    g = symmetric_group(3)
    r = conj_rack(g)
    x = rack_nerve(r, 3)
    a, b = 1, 4
    idx = x.index(2, (r.elements[a], r.elements[b]))
    assert x.label(1, x.face(2, 2, 1, idx)) == (r.elements[r.op[a][b]],)
    assert x.label(1, x.face(2, 2, 0, idx)) == (r.elements[a],)
    assert x.label(1, x.face(2, 1, 0, idx)) == (r.elements[b],)
    assert x.label(1, x.face(2, 1, 1, idx)) == (r.elements[b],)


def test_trivial_rack_nerve_faces_agree():
    r = trivial_rack(3)
    x = rack_nerve(r, 3)
    for n in range(1, 4):
        for i in range(1, n + 1):
            assert x._face[(n, i, 0)] == x._face[(n, i, 1)]


def test_rack_nerve_degenerate_cells_are_tuples_with_e():
    r = conj_rack(symmetric_group(3))
    x = rack_nerve(r, 3)
    for n in range(1, 4):
        degen = x.degenerate_cells(n)
        for c in range(x.n_cells(n)):
            has_e = r.elements[r.basepoint] in x.label(n, c)
            assert (c in degen) == has_e


def test_lnerve_isomorphism_explicit_bijection():
    """rack_nerve(conj G) == l_functor(cubical nerve of G) via the explicit
    product-labeling bijection, checked cell-by-cell."""
    for name, depth in (("cyclic:2", 3), ("cyclic:3", 2), ("symmetric:3", 2)):
        g = preset(name)
        r = conj_rack(g)
        x = group_cubical_nerve(g, depth, budget=10 ** 7, validate=(g.order <= 3))
        lx = l_functor(x)
        rn = rack_nerve(r, depth)
        maps = []
        for n in range(depth + 1):
            col = []
            for c in range(rn.n_cells(n)):
                tup = tuple(g.elements.index(e) for e in rn.label(n, c))
                v = lnerve_inclusion_labels(g, tup)
                lbl = tuple(g.elements[a] for a in v)
                col.append(lx.index(n, lbl))
            maps.append(col)
        assert verify_cubset_map(rn, lx, maps)


def test_lnerve_iso_z2_degree3_counts():
    g = preset("cyclic:2")
    lx = l_functor(group_cubical_nerve(g, 3))
    rn = rack_nerve(conj_rack(g), 3)
    assert lx.sizes == rn.sizes == (1, 2, 4, 8)
