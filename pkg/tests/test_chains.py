from fractions import Fraction

import pytest

from rackhom.chains import (
    TensorComplex,
    build_complex,
    eta_section,
    homology,
    identity_map,
    les_for_group,
    long_exact_sequence,
    rack_conjugation_data,
    s_map_cubical,
    s_map_rack_formula,
    verify_chain_map,
    verify_homotopy,
)
from rackhom.cubical import TruncationTooLow, standard_model
from rackhom.exactfield import QQ, FieldTag, Matrix
from rackhom.nerves import bar_nerve, group_cubical_nerve, lnerve_inclusion_labels, rack_nerve
from rackhom.racks import conj_rack, preset, symmetric_group


def test_rack_z2_complex_trivial_boundary():
    c = build_complex(rack_nerve(conj_rack(preset("cyclic:2")), 4), QQ)
    assert c.dims == [1, 1, 1, 1, 1]
    for n in range(1, 5):
        assert c.d(n).is_zero()


def test_cube2_contractible():
    c = build_complex(standard_model("cube", 2, truncation=3), QQ)
    assert homology(c, up_to=2).dims == [1, 0, 0]


def test_s3_rack_dims_are_powers_of_five():
    c = build_complex(rack_nerve(conj_rack(symmetric_group(3)), 3), QQ)
    assert c.dims == [1, 5, 25, 125]


def test_ln_homology():
    # H_0 = k (reduced-homology caveat), H_1 = k^n, higher vanish
    for n in (1, 2, 3):
        ln = standard_model("lcube", n, truncation=max(n, 3) + 1)
        hs = homology(build_complex(ln, QQ), up_to=3)
        assert hs.dims == [1, n, 0, 0]


def test_hr1_of_s3_counts_conjugacy_classes():
    c = build_complex(rack_nerve(conj_rack(symmetric_group(3)), 2), QQ)
    hs = homology(c, up_to=1)
    assert hs.dims[1] == 2


def test_bar_z2_rational_homology_vanishes():
    c = build_complex(bar_nerve(preset("cyclic:2"), 4), QQ)
    assert homology(c, up_to=3).dims == [1, 0, 0, 0]


def test_homology_needs_one_more_degree():
    c = build_complex(rack_nerve(conj_rack(preset("cyclic:2")), 2), QQ)
    with pytest.raises(TruncationTooLow):
        homology(c, up_to=3)


def test_normalized_and_unnormalized_agree_for_simplicial():
    # simplicial normalization is a quasi-isomorphism; tested on bar nerves
    for name in ("cyclic:2", "cyclic:3", "symmetric:3"):
        nerve = bar_nerve(preset(name), 3)
        hn = homology(build_complex(nerve, QQ, "normalized"), up_to=2)
        hu = homology(build_complex(nerve, QQ, "unnormalized"), up_to=2)
        assert hn.dims == hu.dims


def test_unnormalized_cubical_homology_differs():
    # cubical homology must be normalized: already for the one-point cubical
    # set (nerve of the trivial group) the unnormalized complex has zero
    # differential and H^u_n = k in every degree.
    nerve = group_cubical_nerve(preset("cyclic:1"), 3)
    hu = homology(build_complex(nerve, QQ, "unnormalized"), up_to=2)
    hn = homology(build_complex(nerve, QQ, "normalized"), up_to=2)
    assert hu.dims == [1, 1, 1]
    assert hn.dims == [1, 0, 0]


def test_projection_contract():
    c = build_complex(rack_nerve(conj_rack(symmetric_group(3)), 3), QQ)
    hs = homology(c, up_to=2)
    for n in range(3):
        proj = hs.projection(n)
        rep = hs.rep_matrix(n)
        assert proj @ rep == Matrix.identity(QQ, hs.dims[n])
        # projection kills boundaries
        if n < 2:
            assert (proj @ c.d(n + 1)).is_zero()


def test_projection_independent_of_representative():
    c = build_complex(rack_nerve(conj_rack(symmetric_group(3)), 3), QQ)
    hs = homology(c, up_to=2)
    n = 1
    rep = hs.reps[n][0]
    # perturb by a boundary
    b = c.d(2).column(3)
    pert = dict(rep)
    for r, v in b.items():
        w = pert.get(r, QQ.zero()) + v
        if w:
            pert[r] = w
        elif r in pert:
            del pert[r]
    assert hs.project_vec(n, rep) == hs.project_vec(n, pert)


def test_eta_section_values_and_contract():
    r = conj_rack(symmetric_group(3))
    nerve = rack_nerve(r, 3)
    eta = eta_section(nerve, QQ)
    unnorm = eta.unnormalized
    norm = eta.source
    e = r.basepoint
    g = 1 if r.basepoint != 1 else 2
    # degree 1: eta(g) = (g) - (e)
    k = norm.pos_of_cell[1][nerve.index(1, (r.elements[g],))]
    col = eta.mat(1).column(k)
    want = {
        unnorm.pos_of_cell[1][nerve.index(1, (r.elements[g],))]: Fraction(1),
        unnorm.pos_of_cell[1][nerve.index(1, (r.elements[e],))]: Fraction(-1),
    }
    assert col == want
    # quotient o section = id in all degrees, on all basis vectors
    for n in range(4):
        cols = []
        for c in range(unnorm.dim(n)):
            p = norm.pos_of_cell[n][unnorm.cell_of_pos[n][c]]
            cols.append({} if p is None else {p: QQ.one()})
        xi = Matrix(QQ, norm.dim(n), unnorm.dim(n), cols)
        assert xi @ eta.mat(n) == Matrix.identity(QQ, norm.dim(n))
    # eta kills degenerate cells: apply the same operator inside Q
    from rackhom.chains import GradedMap

    for n in range(1, 4):
        for cell in sorted(nerve.degenerate_cells(n))[:5]:
            vec = {cell: QQ.one()}
            for i in range(n, 0, -1):
                out = dict(vec)
                for c, v in vec.items():
                    t = nerve.degen(n, i, nerve.face(n, i, 0, c))
                    w = out.get(t, QQ.zero()) - v
                    if w:
                        out[t] = w
                    elif t in out:
                        del out[t]
                vec = out
            assert vec == {}


def test_s2_formula():
    g = symmetric_group(3)
    r = conj_rack(g)
    s = s_map_rack_formula(g, QQ, 2)
    src, tgt = s.source, s.target
    a, b = 1, 4
    if r.op[a][b] == a:
        b = 2
    k = src.pos_of_cell[2][src.source.index(2, (r.elements[a], r.elements[b]))]
    col = s.mat(2).column(k)
    want = {}
    p1 = tgt.pos_of_cell[2][tgt.source.index(2, (g.elements[a], g.elements[b]))]
    p2 = tgt.pos_of_cell[2][tgt.source.index(2, (g.elements[b], g.elements[r.op[a][b]]))]
    want[p1] = Fraction(1)
    want[p2] = Fraction(-1)
    assert col == want


def test_s_is_chain_map_many_groups():
    for name, depth in (("cyclic:2", 4), ("cyclic:3", 4), ("symmetric:3", 4)):
        s = s_map_rack_formula(preset(name), QQ, depth)
        assert verify_chain_map(s) == []


def test_s_abelian_is_antisymmetrization():
    from itertools import permutations

    g = preset("cyclic:3")
    s = s_map_rack_formula(g, QQ, 3)
    src, tgt = s.source, s.target
    for n in range(1, 4):
        for k in range(src.dim(n)):
            tup = tuple(g.elements.index(e) for e in src.label(n, k))
            want = {}
            for im in permutations(range(n)):
                sign = 1
                for x in range(n):
                    for y in range(x + 1, n):
                        if im[x] > im[y]:
                            sign = -sign
                term = tuple(tup[im[i]] for i in range(n))
                cell = tgt.source.index(n, tuple(g.elements[a] for a in term))
                p = tgt.cell_pos(n, cell)
                if p is None:
                    continue
                w = want.get(p, QQ.zero()) + QQ.of_int(sign)
                if w:
                    want[p] = w
                elif p in want:
                    del want[p]
            assert s.mat(n).column(k) == want


def test_s_cubical_and_rack_modes_agree_via_nerve_isomorphism():
    g = preset("cyclic:2")
    sc = s_map_cubical(g, QQ, 3)
    sr = s_map_rack_formula(g, QQ, 3, bar=sc.target)
    rackC = sr.source
    nerveC = sc.source
    r = conj_rack(g)
    for n in range(4):
        cols = []
        for k in range(rackC.dim(n)):
            tup = tuple(r.elements.index(e) for e in rackC.label(n, k))
            v = lnerve_inclusion_labels(g, tup)
            lbl = tuple(g.elements[a] for a in v)
            p = nerveC.cell_pos(n, nerveC.source.index(n, lbl))
            cols.append({p: QQ.one()})
        incl = Matrix(QQ, nerveC.dim(n), rackC.dim(n), cols)
        assert sc.mat(n) @ incl == sr.mat(n)


def test_verify_homotopy_trivial():
    c = build_complex(rack_nerve(conj_rack(preset("cyclic:3")), 3), QQ)
    idm = identity_map(c)
    zero_h = lambda: __import__("rackhom.chains", fromlist=["GradedMap"]).GradedMap(
        c, c, {n: Matrix.zeros(QQ, c.dim(n + 1), c.dim(n)) for n in range(3)}, shift=1)
    assert verify_homotopy(idm, idm, zero_h()) == []


def test_conjugation_homotopy_s3():
    r = conj_rack(symmetric_group(3))
    c = build_complex(rack_nerve(r, 4), QQ)
    a = r.elements.index((1, 0, 2))
    c_a, h_a = rack_conjugation_data(c, r, a)
    assert verify_chain_map(c_a) == []
    # d h + h d = c_a - id through degree 3
    bad = verify_homotopy(identity_map(c, 3), c_a, h_a)
    assert bad == []
    # and c_a therefore induces the identity on homology
    hs = homology(c, up_to=3)
    for n in range(4):
        for rep in hs.reps[n]:
            assert hs.project_vec(n, c_a.mat(n).apply(rep)) == hs.project_vec(n, rep)


def test_tensor_complex_d_squared_zero():
    c = build_complex(rack_nerve(conj_rack(symmetric_group(3)), 3), QQ)
    t = TensorComplex(c, c, up_to=3)
    for n in range(2, 4):
        assert (t.d(n - 1) @ t.d(n)).is_zero()


# -- long exact sequences -----------------------------------------------------


def test_les_z2_through_3():
    res = les_for_group("lrel", preset("cyclic:2"), QQ, 3)
    assert res.all_exact
    assert res.dims["sub"] == [1, 1, 1, 1]
    assert res.dims["total"] == [1, 0, 0, 0]
    # exactness forces H^rel_{n+1} = HR_n for n >= 1
    assert res.dims["quotient"][2] == res.dims["sub"][1]
    assert res.dims["quotient"][3] == res.dims["sub"][2]


def test_les_trivial_group_relative_vanishes():
    res = les_for_group("lrel", preset("cyclic:1"), QQ, 2)
    assert res.all_exact
    assert res.dims["quotient"] == [0, 0, 0]


def test_les_s3_through_2():
    res = les_for_group("lrel", symmetric_group(3), QQ, 2)
    assert res.all_exact
    assert res.dims["sub"] == [1, 2, 4]
    assert res.dims["total"] == [1, 0, 0]


def test_les_z3_materialized_vs_streamed():
    g = preset("cyclic:3")
    a = les_for_group("lrel", g, QQ, 2)  # materialized (3^7 cells at top)
    assert a.all_exact
    assert a.dims["sub"] == [1, 2, 4]
    assert a.dims["quotient"][2] == a.dims["sub"][1]


def test_les_gamma_z2():
    res = les_for_group("gamma", preset("cyclic:2"), QQ, 2)
    assert res.all_exact


def test_les_generic_cubset_input():
    x = group_cubical_nerve(preset("cyclic:2"), 3)
    res = long_exact_sequence("lrel", x, QQ, 2)
    assert res.all_exact
    assert res.dims["sub"] == [1, 1, 1]


def test_les_over_prime_fields():
    from rackhom.exactfield import FieldTag

    # F_2: the top homology of BZ/2 is nonzero, so the stream exhausts and
    # hands back the complete mod-2 image; the sequence is still exact
    res = les_for_group("lrel", preset("cyclic:2"), FieldTag(2), 3)
    assert res.all_exact
    assert res.dims["total"] == [1, 1, 1, 1]
    assert res.dims["sub"] == [1, 1, 1, 1]
    # F_3 is coprime to |G|: rational-style vanishing, certified by saturation
    res3 = les_for_group("lrel", preset("cyclic:2"), FieldTag(3), 3)
    assert res3.all_exact
    assert res3.dims["total"] == [1, 0, 0, 0]
