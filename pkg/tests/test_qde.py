"""Quantum differential system: frames, coefficient tables, operators."""

from fractions import Fraction
from math import factorial

import pytest

from qfano import qde
from qfano.fixtures_io import fixture_lines, fixture_text, load_named_expressions
from qfano.reconstruct import QuantumMatrix, reconstruct
from qfano.ring import make_bundle

F = Fraction


@pytest.fixture(scope="module")
def p1p1():
    spec = make_bundle(1, 2)
    mp, mxi = reconstruct(spec)
    return spec, mp, mxi


@pytest.fixture(scope="module")
def p1p1_js(p1p1):
    spec, mp, mxi = p1p1
    return qde.j_series(mp, mxi, spec, 6)


@pytest.fixture(scope="module")
def flagship():
    spec = make_bundle(4, 6, [-3, 5, -5])
    mp, mxi = reconstruct(spec)
    return spec, mp, mxi


@pytest.fixture(scope="module")
def flagship_js(flagship):
    spec, mp, mxi = flagship
    return qde.j_series(mp, mxi, spec, 8)


@pytest.fixture(scope="module")
def operators():
    return load_named_expressions(fixture_lines("qde_operators.txt"))


def apery_fixture():
    return [[int(tok) for tok in line.split(",")]
            for line in fixture_lines("apery_table_8x8.csv") if line.strip()]


def test_p1p1_coefficients_closed_form(p1p1_js):
    ctable = qde.identity_coefficients(p1p1_js)
    assert set(ctable) == {(a, b) for a in range(7) for b in range(7 - a)}
    for (a, b), val in ctable.items():
        assert val == F(1, (factorial(a) * factorial(b)) ** 2)


def test_p1p1_vectors_match_hand_oracle(p1p1_js):
    # basis order (1, p, xi, p*xi)
    assert p1p1_js.vector(0, 0) == [{0: 1}, {}, {}, {}]
    assert p1p1_js.vector(1, 0) == [{-2: 1}, {-3: -2}, {}, {}]
    assert p1p1_js.vector(1, 1) == [{-4: 1}, {-5: -2}, {-5: -2}, {-6: 4}]


def test_p1p1_row_recursion_closed_form(p1p1):
    spec, mp, mxi = p1p1
    ctable = qde.identity_series(mp, mxi, spec, 10)
    for (a, b), val in ctable.items():
        assert val == F(1, (factorial(a) * factorial(b)) ** 2)


def test_flagship_hand_coefficients(flagship_js):
    c = qde.identity_coefficients(flagship_js)
    assert c[(0, 0)] == 1
    assert c[(1, 0)] == 0
    assert c[(0, 1)] == 1
    assert c[(1, 1)] == 5
    assert c[(0, 2)] == F(1, 64)
    assert c[(2, 1)] == 1


def test_flagship_apery_corner(flagship, flagship_js):
    spec = flagship[0]
    table = qde.apery_table(qde.identity_coefficients(flagship_js), 4, spec)
    expected = [row[:4] for row in apery_fixture()[:4]]
    assert table == expected


def test_apery_fixture_structure():
    table = apery_fixture()
    assert [table[i][i] for i in range(8)] == [
        1, 5, 73, 1445, 33001, 819005, 21460825, 584307365]
    for i in range(8):
        for j in range(8):
            assert (table[i][j] == 0) == (i > 2 * j)


def test_apery_rejects_non_integer(flagship):
    spec = flagship[0]
    with pytest.raises(ValueError, match="not an integer"):
        qde.apery_table({(0, 0): F(1, 3)}, 1, spec)


def test_apery_reports_missing_order(flagship):
    spec = flagship[0]
    with pytest.raises(ValueError, match="order >= 3"):
        qde.apery_table({(0, 0): F(1), (0, 1): F(1), (1, 0): F(0),
                         (1, 1): F(5), (0, 2): F(1, 64), (2, 0): F(0)}, 3, spec)


def test_row_recursion_matches_frames(flagship, flagship_js):
    spec, mp, mxi = flagship
    deep = qde.identity_series(mp, mxi, spec, 8)
    assert deep == qde.identity_coefficients(flagship_js)


def test_flatness_and_homogeneity_pass(flagship_js):
    assert qde.check_flatness(flagship_js) is None
    assert qde.check_homogeneity(flagship_js) is None


def test_flatness_detects_tampering(flagship):
    spec, mp, mxi = flagship
    js = qde.j_series(mp, mxi, spec, 2)
    js.frames[(1, 0)][4][2] += 1
    report = qde.check_flatness(js)
    assert report is not None and "(1,0)" in report


def test_corrupted_matrix_fails_flat(flagship):
    spec, mp, mxi = flagship
    bad = QuantumMatrix(spec, "xi")
    for j in range(spec.size):
        col = {row: dict(qp) for row, qp in mxi.column(j).items()}
        bad.set_column(j, col)
    # double one quantum term of the xi matrix; grading and purity survive
    for row, qp in bad.column(spec.size - 11).items():
        for key in qp:
            if key != (0, 0):
                qp[key] *= 2
    with pytest.raises(qde.FlatnessError, match="flat frame inconsistent"):
        qde.j_series(mp, bad, spec, 2)


def test_parse_operator_basics():
    assert qde.parse_operator("0") == []
    op = qde.parse_operator("D1*D2^7 - 2*D2^8 + 5*q2*D1^2")
    assert op[0] == qde.OpTerm(F(1), 0, 0, 0, 1, 7)
    assert op[1] == qde.OpTerm(F(-2), 0, 0, 0, 0, 8)
    assert op[2] == qde.OpTerm(F(5), 0, 1, 0, 2, 0)
    with pytest.raises(ValueError, match="unknown atom 'D3'"):
        qde.parse_operator("D3^2")
    with pytest.raises(ValueError, match="bad exponent"):
        qde.parse_operator("q1^x")


def test_operator_fixture_term_counts(operators):
    counts = {name: len(qde.parse_operator(text))
              for name, text in operators.items()}
    assert counts == {"annihilator_1": 23, "annihilator_2": 9,
                      "annihilator_3": 7, "annihilator_4": 12}


def test_operators_annihilate_flagship(flagship_js, operators):
    for name, text in sorted(operators.items()):
        op = qde.parse_operator(text)
        assert qde.check_operator(op, flagship_js) is None, name


def test_operators_annihilate_p1p1_diagonal_relation(p1p1_js):
    # D1^2 - q1 and D2^2 - q2 generate the annihilator for the product
    for text in ("D1^2 - q1", "D2^2 - q2"):
        assert qde.check_operator(qde.parse_operator(text), p1p1_js) is None


def test_nonannihilating_operator_reported(flagship_js):
    report = qde.check_operator(qde.parse_operator("D1"), flagship_js)
    assert report is not None and "index (0,0)" in report


def test_unit_fibre_derivation_action(p1p1_js):
    res = qde.apply_operator(qde.parse_operator("D2"), p1p1_js)
    # at the origin index: xi cup the unit, sitting at z^0
    assert res[(0, 0)] == [{}, {}, {0: 1}, {}]


def test_order_zero_series(flagship):
    spec, mp, mxi = flagship
    js = qde.j_series(mp, mxi, spec, 0)
    assert set(js.frames) == {(0, 0)}
    assert qde.identity_coefficients(js) == {(0, 0): 1}
    assert qde.check_flatness(js) is None


def test_negative_order_rejected(flagship):
    spec, mp, mxi = flagship
    with pytest.raises(ValueError, match="order must be >= 0"):
        qde.j_series(mp, mxi, spec, -1)
