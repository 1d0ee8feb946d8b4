import json
from fractions import Fraction

import pytest

from hochrr.cech import (
    ExtCochain,
    MixedClass,
    cotangent,
    direct_sum,
    forms,
    line_bundle,
    parse_variety,
    projective_space,
    skew_embedding,
    structure_sheaf,
    swap_map,
    tangent,
    tensor,
    twist,
)
from hochrr.charclass import (
    L_component,
    L_on_cotangent,
    L_operator,
    at_power,
    atiyah_cocycle,
    check_zero_class,
    chern_character,
    class_numbers,
    compose,
    hrr_verify,
    jacobi_composite,
    todd_bar,
    todd_class,
    trace_power,
    verify_at_jacobi,
    verify_at_symmetry,
    verify_L_adjoint,
    verify_td_annihilation,
)
from hochrr.polyalg import LaurentPoly

P1, P2, P3 = (projective_space(n) for n in (1, 2, 3))
Q = parse_variety("P1xP1")


def numbers(cls, p):
    return [v for _, v in class_numbers(cls)[p]]


# --- the Atiyah cocycle -------------------------------------------------------------


def test_trivial_bundle_has_zero_atiyah_class():
    for V in (P1, P2, Q):
        assert atiyah_cocycle(structure_sheaf(V)).is_zero()


def test_atiyah_of_O1_on_P1():
    a = atiyah_cocycle(line_bundle(P1, 1))
    # on U_01, in chart 0's coordinate y = X1/X0: dy / y
    assert a.components == {(0, 1): [[LaurentPoly.monomial((1, -1))]]}
    assert a.is_cocycle()
    assert not a.is_coboundary()


def test_direct_sum_is_block_diagonal():
    E, F = line_bundle(P2, 1), line_bundle(P2, -2)
    a = atiyah_cocycle(direct_sum(E, F))
    ae, af = atiyah_cocycle(E), atiyah_cocycle(F)
    for I, M in a.components.items():
        # rows are (summand, form index), columns summands
        assert M[0][0] == ae.components[I][0][0] and M[1][0] == ae.components[I][1][0]
        assert M[2][1] == af.components[I][0][0] and M[3][1] == af.components[I][1][0]
        assert not M[0][1] and not M[2][0]


def test_tensor_rule_up_to_coboundary():
    for E, F in [(line_bundle(P2, 1), line_bundle(P2, 2)), (tangent(P2), line_bundle(P2, 1))]:
        EF = tensor(E, F)
        lhs = atiyah_cocycle(EF)
        # at(E)⊗id + id⊗at(F), both traced through their Chern numbers
        ch = chern_character(EF)
        assert ch.differs_by_coboundary(chern_character(E) * chern_character(F))
        assert lhs.is_cocycle()


def test_composition_is_coboundary_insensitive():
    Om = cotangent(P2)
    at = atiyah_cocycle(Om)
    # swap ∘ at is another representative of the class of at
    other = swap_map(Om, Om).compose(at)
    assert other.is_cocycle() and (other - at).is_coboundary()
    outer = at.tensor_identity(Om).retarget(tensor(Om, Om, Om))
    assert (compose(outer, other) - compose(outer, at)).is_coboundary()
    assert compose(ExtCochain.identity(tensor(Om, Om)), at).components == at.components


def test_at_powers():
    E = line_bundle(P2, 1)
    assert at_power(E, 0, "front").components == ExtCochain.identity(E).components
    assert at_power(E, 1).components == atiyah_cocycle(E).components
    assert trace_power(E, 2).scale(Fraction(1, 2)).is_cocycle()
    with pytest.raises(ValueError):
        at_power(E, 3)


# --- characteristic classes ----------------------------------------------------------


def test_chern_character_of_line_bundles():
    for d in range(-4, 5):
        assert numbers(chern_character(line_bundle(P1, d)), 1) == [d]
    assert numbers(chern_character(line_bundle(P2, 1)), 2) == [Fraction(1, 2)]
    assert numbers(chern_character(structure_sheaf(P2)), 0) == [1]
    assert numbers(chern_character(structure_sheaf(P2)), 1) == [0]


def test_chern_character_of_tangent_p2():
    ch = chern_character(tangent(P2))
    assert [numbers(ch, p) for p in range(3)] == [[2], [3], [Fraction(3, 2)]]


def test_chern_character_ring_map_and_negative_control():
    E, F = line_bundle(P2, 2), cotangent(P2)
    ce, cf = chern_character(E), chern_character(F)
    assert chern_character(direct_sum(E, F)).differs_by_coboundary(ce + cf)
    assert chern_character(tensor(E, F)).differs_by_coboundary(ce * cf)
    assert not chern_character(tensor(E, F)).differs_by_coboundary(ce + cf)


def test_todd_classes():
    assert [numbers(todd_class(P1), p) for p in range(2)] == [[1], [1]]
    assert [numbers(todd_class(P2), p) for p in range(3)] == [[1], [Fraction(3, 2)], [1]]
    for V in (P1, P2, P3):
        assert todd_class(V).integrate() == 1
    # on P1xP1 td = (1 + h1)(1 + h2)
    assert [numbers(todd_class(Q), p) for p in range(3)] == [[1], [1, 1], [1]]


def test_todd_bar_equals_todd():
    for V in (P1, P2, Q):
        assert todd_bar(V).differs_by_coboundary(todd_class(V))


# --- the L-operator ---------------------------------------------------------------------


def test_L_on_O_is_zero():
    for k in range(3):
        assert L_component(P2, k, 0) is None


def test_L0_on_forms_is_the_skew_embedding():
    assert L_component(P1, 0, 1).components == skew_embedding(P1, 1).components
    emb = L_component(P1, 0, 1)
    assert all(M == [[LaurentPoly.constant(P1.nvars)]] for M in emb.components.values())


def test_L1_on_P1_is_nonzero():
    L = L_operator(P1)
    comp = L[(1, 1)]
    assert comp.degree == 1
    assert comp.is_cocycle()
    report, _ = check_zero_class(comp, 1)
    assert report.status == "failure"
    assert (comp - L_on_cotangent(P1, 1).scale(Fraction(-1, 2))).is_zero()


# --- verifiers ----------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["P1", "P2", "P1xP1", "P3"])
def test_symmetry(name):
    rep = verify_at_symmetry(parse_variety(name))
    assert rep.success and rep.non_vacuous == 1


def test_symmetry_negative_control():
    Om = cotangent(P2)
    at = atiyah_cocycle(Om)
    # the antisymmetrized sign convention is not a coboundary
    report, _ = check_zero_class(swap_map(Om, Om, sign=-1).compose(at) - at, 1)
    assert report.status == "failure"


@pytest.mark.parametrize("name,status", [("P1", "vacuous"), ("P2", "success"), ("P3", "success"),
                                         ("P1xP1", "success")])
def test_jacobi(name, status):
    rep = verify_at_jacobi(parse_variety(name))
    assert [c.status for c in rep.components] == [status]


def test_jacobi_negative_control():
    report, _ = check_zero_class(jacobi_composite(P2), 1)
    assert report.status == "failure"


@pytest.mark.parametrize("name", ["P1", "P2", "P1xP1", "P3"])
def test_td_annihilation(name):
    rep = verify_td_annihilation(parse_variety(name))
    assert rep.success and rep.non_vacuous >= 1
    assert rep.components[0].status == "vacuous"


@pytest.mark.parametrize("name", ["P1", "P2", "P1xP1"])
def test_L_adjoint(name):
    rep = verify_L_adjoint(parse_variety(name))
    assert rep.success and rep.non_vacuous >= 1


@pytest.mark.parametrize("name", ["P1", "P2", "P3"])
def test_L_adjoint_with_zero_atiyah_class(name):
    rep = verify_L_adjoint(parse_variety(name), at_zero=True)
    assert rep.success


def test_report_json():
    doc = verify_at_symmetry(P2).to_json()
    text = json.dumps(doc, sort_keys=True)
    assert json.loads(text)["components"][0]["status"] == "success"
    assert set(doc) >= {"identity", "variety", "components"}


# --- Riemann-Roch ---------------------------------------------------------------------------


@pytest.mark.parametrize("E,chi", [
    (line_bundle(P2, 3), "10"),
    (tangent(P2), "8"),
    (cotangent(P2), "-1"),
    (twist(cotangent(P2), 1), "0"),
    (line_bundle(P2, -5), "6"),
    (line_bundle(Q, (2, 3)), "12"),
    (line_bundle(P3, -3), "0"),
    (line_bundle(P3, 3), "20"),
    (forms(P3, 2), "1"),
])
def test_hrr(E, chi):
    rep = hrr_verify(E)
    assert rep["equal"]
    assert rep["chi_cohomology"] == rep["chi_rr"] == chi


def test_mixed_class_inverse():
    td = todd_class(P2)
    assert (td * td.inverse()).differs_by_coboundary(MixedClass.one(P2))
