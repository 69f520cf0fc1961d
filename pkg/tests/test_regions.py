import json
from functools import cache
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from sparse_expsum import bounds as B
from sparse_expsum.regions import (
    exponent_form,
    ge,
    form,
    halfplane_intersect,
    le,
    lt,
    parse_frac,
    point_in_region,
    region_cor22_vs_cp11,
    region_thm21_nontrivial,
    region_thm23_vs_prior,
    region_to_csv,
    region_to_json,
    slice_region,
)

X, Y = form(1, 0, 0), form(0, 1, 0)
SQUARE = [ge(X, form()), le(X, form(c0=1)), ge(Y, form()), le(Y, form(c0=1))]


def case_of(v):
    if v >= F(2, 3):
        return None
    for case, lo in ((1, F(29, 48)), (2, F(59, 112)), (3, F(1, 2))):
        if v >= lo:
            return case
    return 4


def row_exponent(row, **coords):
    return sum(ex * coords[k] for k, ex in row.items() if k != "p") + row["p"]


def fig61_oracle(delta, gamma):
    if not (0 <= gamma <= delta <= 1 and delta <= F(89, 92)):
        return False
    case = case_of(delta - gamma)
    if case is None:
        return False
    ours = row_exponent(B.COR22_ROWS[case - 1], d=delta, e=gamma)
    return ours < 1 and ours < max(delta, F(13, 46) * gamma + F(89, 92))


def fig62_oracle(eps, eta):
    if not (0 <= eps <= 1 and 0 <= eta <= 1 and eps + eta < 1):
        return False
    case = case_of(eta)
    if case is None:
        return False
    ours = row_exponent(B.THM23_ROWS[case - 1], h=eps, n=eta)
    return ours < 1 and ours < F(89, 92) and ours < max(1 - eta, eps / 2 + F(3, 4))


def test_halfplane_square():
    poly = halfplane_intersect(SQUARE)
    assert set(poly.vertices) == {(0, 0), (1, 0), (1, 1), (0, 1)}
    assert poly.area == 1


def test_halfplane_empty():
    assert halfplane_intersect([le(X, form()), ge(X, form(c0=1))]).is_empty


def test_halfplane_triangle():
    poly = halfplane_intersect(SQUARE + [le(X + Y, form(c0=F(1, 2)))])
    assert set(poly.vertices) == {(0, 0), (F(1, 2), 0), (0, F(1, 2))}


def test_halfplane_unbounded():
    with pytest.raises(ValueError):
        halfplane_intersect([ge(X, form())])


def test_degenerate_strict():
    # x <= 0 and x >= 0 is a segment; with x < 0 it is empty
    seg = halfplane_intersect(SQUARE + [le(X, form())])
    assert seg.kind == "segment"
    assert halfplane_intersect(SQUARE + [lt(X, form())]).is_empty


def test_exponent_forms():
    (f,) = exponent_form("cor22", 1)
    assert (f.cx, f.cy, f.c0) == (0, F(1, 4), F(11, 12))
    (f,) = exponent_form("thm23", 4)
    assert (f.cx, f.cy, f.c0) == (F(1, 4), F(-31, 80), 1)
    a, b = exponent_form("cp11")
    assert (a.cx, a.cy, a.c0) == (1, 0, 0)
    assert (b.cx, b.cy, b.c0) == (0, F(13, 46), F(89, 92))
    with pytest.raises(ValueError):
        exponent_form("nope")


def test_fig61_examples():
    region = region_cor22_vs_cp11()
    assert point_in_region((F(3, 10), 0), region)
    assert not point_in_region((0, 0), region)
    section = slice_region(region, "y", 0)
    assert section[0].lo == F(60, 253) and not section[0].lo_closed
    assert not point_in_region((F(60, 253), 0), region)


def test_fig62_examples():
    region = region_thm23_vs_prior()
    assert point_in_region((0, F(55, 100)), region) == fig62_oracle(F(0), F(55, 100))
    cell = region.cell("case4/a65_1")
    assert cell.edge_on(1, F(31, 20), 1)
    assert cell.edge_on(F(-20, 31), 1, F(60, 713))


@pytest.mark.parametrize("build", [region_cor22_vs_cp11, region_thm23_vs_prior, lambda: region_thm21_nontrivial(2)])
def test_cells_satisfy_own_constraints(build):
    region = build()
    assert region.cells
    for cell in region.cells:
        for v in cell.polygon.vertices:
            assert all(hp.slack(v) >= 0 for hp in cell.planes)
        if not cell.degenerate:
            assert cell.contains(cell.polygon.centroid())


def test_cells_disjoint_at_centroids():
    region = region_cor22_vs_cp11()
    for cell in region.cells:
        if cell.degenerate:
            continue
        c = cell.polygon.centroid()
        assert sum(other.contains(c) for other in region.cells) == 1


def test_fig62_inside_simplex():
    for cell in region_thm23_vs_prior().cells:
        assert all(x + y <= 1 for x, y in cell.polygon.vertices)


FIG61 = cache(region_cor22_vs_cp11)
FIG62 = cache(region_thm23_vs_prior)

fracs = st.fractions(min_value=0, max_value=1, max_denominator=500)


@settings(max_examples=400)
@given(fracs, fracs)
def test_fig61_membership_oracle(x, y):
    assert point_in_region((x, y), FIG61()) == fig61_oracle(x, y)


@settings(max_examples=400)
@given(fracs, fracs)
def test_fig62_membership_oracle(x, y):
    assert point_in_region((x, y), FIG62()) == fig62_oracle(x, y)


def test_thm21_ranges():
    # ours < 1 reproduces the nontrivial Delta ranges when Gamma = 1
    region = region_thm21_nontrivial(2)
    for k in range(1, 5):
        row = B.THM21_ROWS[k - 1]
        lo, hi = B.CASE_RANGES[k - 1]
        lo = lo or F(0)
        inside = [x for x in (lo, (lo + hi) / 2) if row["Delta"] * x + row["p"] < 1]
        for x in inside:
            assert point_in_region((x, 0), region)
    with pytest.raises(ValueError):
        region_thm21_nontrivial(1)


def test_thm21_feasible_subset():
    full, feas = region_thm21_nontrivial(3), region_thm21_nontrivial(3, feasible_only=True)
    for cell in feas.cells:
        for v in cell.polygon.vertices:
            assert v[0] + v[1] <= 1
        if not cell.degenerate:
            assert point_in_region(cell.polygon.centroid(), full)


def test_csv_and_json_roundtrip():
    region = region_cor22_vs_cp11()
    lines = region_to_csv(region).splitlines()
    assert lines[0] == "cell_id,vertex_index,x_num,x_den,y_num,y_den"
    assert "60,253,0,1" in "\n".join(lines)
    data = json.loads(region_to_json(region, decimals=True))
    verts = [tuple(map(parse_frac, v)) for c in data["cells"] for v in c["vertices"]]
    assert (F(60, 253), 0) in verts
    assert len(lines) - 1 == len(verts)
    dec = data["cells"][0]["vertices_decimal"][0]
    assert float(dec[0]) == pytest.approx(float(verts[0][0]), rel=1e-11)
