"""Tests for seed invariants and the degree <= n matrix columns."""

import random
from fractions import Fraction

import pytest

from qfano import seeds
from qfano.ring import basis_index, make_bundle, monomial_class


@pytest.fixture(scope="module")
def flagship():
    return make_bundle(4, 6, [-3, 5, -5])


@pytest.fixture(scope="module")
def p1p1():
    return make_bundle(1, 2)


def mono(spec, a, b):
    return monomial_class(spec, a, b)


def test_fiber_multiplicity_two_vanishes(flagship):
    for k in (2, 3, 5):
        assert seeds.fiber_invariant(
            flagship, mono(flagship, 0, 5), mono(flagship, 4, 5), k) == 0


def test_fiber_values(flagship, p1p1):
    assert seeds.fiber_invariant(
        flagship, mono(flagship, 0, 5), mono(flagship, 4, 5), 1) == 1
    assert seeds.fiber_invariant(p1p1, mono(p1p1, 0, 1), mono(p1p1, 1, 1), 1) == 1
    # degree mismatch integrates to zero without any explicit filter
    assert seeds.fiber_invariant(
        flagship, mono(flagship, 1, 0), mono(flagship, 4, 5), 1) == 0


def test_blowup_oracle_values(flagship):
    cases = [
        ((4, 0), (2, 4), 2),
        ((2, 0), (4, 4), 2),
        ((2, 0), (3, 5), 5),
        ((3, 0), (4, 3), 2),
        ((3, 0), (3, 4), 5),
        ((3, 0), (2, 5), 5),
    ]
    for (aa, ba), (ab, bb), want in cases:
        got = seeds.blowup_invariant(
            flagship, mono(flagship, aa, ba), mono(flagship, ab, bb), 1)
        assert got == want, ((aa, ba), (ab, bb))


def test_blowup_vanishing_and_symmetry(flagship):
    rng = random.Random(7)
    for _ in range(25):
        i = rng.randrange(flagship.size)
        j = rng.randrange(flagship.size)
        a = mono(flagship, *flagship.basis[i])
        b = mono(flagship, *flagship.basis[j])
        assert seeds.blowup_invariant(flagship, a, b, 2) == 0
        assert (seeds.blowup_invariant(flagship, a, b, 1)
                == seeds.blowup_invariant(flagship, b, a, 1))
        if flagship.degree(i) + flagship.degree(j) != flagship.dim + 1:
            assert seeds.blowup_invariant(flagship, a, b, 1) == 0


def test_blowup_rejects_other_bundles(p1p1):
    with pytest.raises(ValueError):
        seeds.blowup_invariant(p1p1, mono(p1p1, 1, 0), mono(p1p1, 1, 1), 1)


def test_product_invariant(p1p1):
    assert seeds.product_invariant(p1p1, mono(p1p1, 1, 0), mono(p1p1, 1, 1), 1) == 1
    assert seeds.product_invariant(p1p1, mono(p1p1, 1, 0), mono(p1p1, 1, 1), 2) == 0
    assert seeds.product_invariant(p1p1, mono(p1p1, 0, 1), mono(p1p1, 1, 1), 1) == 0
    twisted = make_bundle(4, 6, [-3, 5, -5])
    with pytest.raises(ValueError):
        seeds.product_invariant(twisted, mono(twisted, 1, 0),
                                mono(twisted, 1, 1), 1)


def test_builtin_source_dispatch(flagship, p1p1):
    assert isinstance(seeds.builtin_source(flagship), seeds.BlowupSeeds)
    assert isinstance(seeds.builtin_source(p1p1), seeds.ProductSeeds)
    other = make_bundle(3, 2, [1])
    with pytest.raises(ValueError):
        seeds.builtin_source(other)


def qpoly(col, spec, a, b):
    return col.get(basis_index(spec, a + b, a) - 1, {})


def test_flagship_seed_columns(flagship):
    cp, cx = seeds.seed_columns(flagship, seeds.BlowupSeeds(flagship))
    assert sorted(cp) == sorted(cx) == [i for i in range(flagship.size)
                                        if flagship.degree(i) <= flagship.n]
    # column of the identity: purely classical p resp. xi
    assert cp[0] == {1: {(0, 0): Fraction(1)}}
    assert cx[0] == {2: {(0, 0): Fraction(1)}}
    # column of p^2: classical p^3 plus q1*(2 xi - p)
    col = cp[basis_index(flagship, 2, 2) - 1]
    assert col == {
        basis_index(flagship, 3, 3) - 1: {(0, 0): Fraction(1)},
        1: {(1, 0): Fraction(-1)},
        2: {(1, 0): Fraction(2)},
    }
    # column of p^3: classical p^4 plus q1*(2 xi^2 - p xi)
    col = cp[basis_index(flagship, 3, 3) - 1]
    assert col == {
        basis_index(flagship, 4, 4) - 1: {(0, 0): Fraction(1)},
        basis_index(flagship, 2, 1) - 1: {(1, 0): Fraction(-1)},
        basis_index(flagship, 2, 0) - 1: {(1, 0): Fraction(2)},
    }
    # column of p^4: no classical part, q1 with alternating signs
    col = cp[basis_index(flagship, 4, 4) - 1]
    assert col == {
        basis_index(flagship, 3, 3) - 1: {(1, 0): Fraction(-1)},
        basis_index(flagship, 3, 2) - 1: {(1, 0): Fraction(1)},
        basis_index(flagship, 3, 1) - 1: {(1, 0): Fraction(-1)},
        basis_index(flagship, 3, 0) - 1: {(1, 0): Fraction(1)},
    }
    # every degree <= n column of the xi matrix is purely classical here
    for col in cx.values():
        for qp in col.values():
            assert set(qp) == {(0, 0)}


def test_p1p1_seed_columns(p1p1):
    cp, cx = seeds.seed_columns(p1p1, seeds.ProductSeeds(p1p1))
    pcol = cp[basis_index(p1p1, 1, 1) - 1]
    assert pcol == {0: {(1, 0): Fraction(1)}}
    xcol = cx[basis_index(p1p1, 1, 0) - 1]
    assert xcol == {0: {(0, 1): Fraction(1)}}


def test_seed_table_validation(flagship):
    table = seeds.SeedTable(flagship)
    i = basis_index(flagship, 3, 3) - 1
    j = basis_index(flagship, 7, 3) - 1
    table.set(i, j, 1, 5)
    assert table.pure_base(j, i, 1) == 5
    with pytest.raises(ValueError, match="symmetry violation"):
        table.set(j, i, 1, 4)
    with pytest.raises(ValueError, match="dimension constraint"):
        table.set(i, i, 1, 1)
    with pytest.raises(seeds.MissingSeedError,
                       match=r"missing seed invariant \(3,3\) \(7,3\) 2 0"):
        table.pure_base(i, j, 2)


def test_load_seeds(tmp_path, flagship):
    path = tmp_path / "t.seeds"
    path.write_text(
        "# comment line\n"
        "(3,3) (7,3) 1 0 5   # trailing comment\n"
        "\n"
        "(4,4) (6,2) 1 0 2\n")
    table = seeds.load_seeds(str(path), flagship)
    i = basis_index(flagship, 3, 3) - 1
    j = basis_index(flagship, 7, 3) - 1
    assert table.pure_base(i, j, 1) == 5


def test_load_seeds_rejections(tmp_path, flagship):
    def attempt(body):
        path = tmp_path / "bad.seeds"
        path.write_text(body)
        return seeds.load_seeds(str(path), flagship)

    with pytest.raises(ValueError, match="5 fields"):
        attempt("(3,3) (7,3) 1 0\n")
    with pytest.raises(ValueError, match="base-ray rows"):
        attempt("(3,3) (9,4) 0 1 1\n")
    with pytest.raises(ValueError, match="pair"):
        attempt("3,3 (7,3) 1 0 5\n")
    with pytest.raises(ValueError, match="no basis monomial"):
        attempt("(3,9) (7,3) 1 0 5\n")
    with pytest.raises(ValueError, match="symmetry violation"):
        attempt("(3,3) (7,3) 1 0 5\n(7,3) (3,3) 1 0 4\n")
    with pytest.raises(ValueError, match="dimension constraint"):
        attempt("(3,3) (6,3) 1 0 5\n")


def test_missing_seed_reported_with_exact_key(flagship):
    table = seeds.SeedTable(flagship)
    with pytest.raises(seeds.MissingSeedError) as err:
        seeds.seed_columns(flagship, table)
    assert "missing seed invariant" in str(err.value)


def test_dump_round_trip(tmp_path, flagship):
    lines = seeds.dump_seed_lines(flagship, seeds.BlowupSeeds(flagship))
    path = tmp_path / "dump.seeds"
    path.write_text("\n".join(lines) + "\n")
    table = seeds.load_seeds(str(path), flagship)
    want = seeds.seed_columns(flagship, seeds.BlowupSeeds(flagship))
    assert seeds.seed_columns(flagship, table) == want


def test_empty_seed_file_ok_when_nothing_demanded(tmp_path):
    spec = make_bundle(1, 2, [1])
    assert seeds.demanded_invariants(spec) == []
    path = tmp_path / "empty.seeds"
    path.write_text("# nothing\n")
    table = seeds.load_seeds(str(path), spec)
    cp, cx = seeds.seed_columns(spec, table)
    assert set(cp) == {0, 1, 2}


def test_mixed_curve_class_out_of_scope():
    spec = make_bundle(2, 2, [-2])
    with pytest.raises(ValueError, match="mixed curve class"):
        seeds.seed_columns(spec, seeds.SeedTable(spec))
