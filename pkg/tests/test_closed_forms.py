from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from crystal_cone import closed_forms as cf
from crystal_cone.cartan import IndexSequence, builtin_family, cartan_A, cartan_rank2
from crystal_cone.forms import LinearForm, apply_S_k, xi_closure
from crystal_cone.zinf import ZSeq

L = LinearForm.from_dict
FINITE_RANK2 = [(0, 0), (1, 1), (1, 2), (2, 1), (1, 3), (3, 1)]


# ---------------------------------------------------------------- Chebyshev and a_l


def test_chebyshev_values():
    assert [cf.chebyshev_P(4, k) for k in range(5)] == [1, 4, 15, 56, 209]
    assert cf.chebyshev_P(7, -1) == 0
    with pytest.raises(ValueError):
        cf.chebyshev_P(1, -2)


@given(st.integers(-6, 6))
def test_chebyshev_low_degree_polynomials(lam):
    assert cf.chebyshev_P(lam, 1) == lam
    assert cf.chebyshev_P(lam, 2) == lam**2 - 1
    assert cf.chebyshev_P(lam, 3) == lam**3 - 2 * lam


@pytest.mark.parametrize("alpha", [Fraction(2), Fraction(3), Fraction(1, 2), Fraction(-3, 2)])
def test_chebyshev_closed_form(alpha):
    lam = alpha + 1 / alpha
    for k in range(12):
        closed = (alpha ** (k + 1) - alpha ** (-k - 1)) / (alpha - 1 / alpha)
        assert cf.chebyshev_P(lam, k) == closed


@given(st.integers(-5, 5))
def test_chebyshev_generating_function(lam):
    # (1 - lam z + z^2) * sum P_k z^k = 1, coefficientwise
    P = [cf.chebyshev_P(lam, k) for k in range(15)]
    assert P[0] == 1 and P[1] - lam * P[0] == 0
    for k in range(2, 15):
        assert P[k] - lam * P[k - 1] + P[k - 2] == 0


@given(st.integers(-6, 8), st.integers(1, 20))
def test_chebyshev_identities(lam, k):
    P = lambda m: cf.chebyshev_P(lam, m)
    assert (lam + 2) * P(k) ** 2 - (P(k + 1) + P(k)) * (P(k) + P(k - 1)) == 1
    assert (P(k) + P(k - 1)) ** 2 - (lam + 2) * P(k) * P(k - 1) == 1


@given(st.integers(1, 5), st.integers(1, 5))
def test_first_coefficients(c1, c2):
    a = cf.rank2_a(c1, c2, 7)
    p = c1 * c2
    assert a[:2] == [0, 1]
    assert a[2] == c1
    assert a[3] == p - 1
    assert a[4] == c1 * (p - 2)
    assert a[5] == (p - 1) * (p - 2) - 1
    assert a[6] == c1 * (p - 1) * (p - 3)
    assert a[7] == p * (p - 2) * (p - 3) - 1


def test_recursion_matches_chebyshev_closed_form():
    for c1, c2 in product(range(5), repeat=2):
        a = cf.rank2_a(c1, c2, 25)
        assert [cf.rank2_a_chebyshev(c1, c2, l) for l in range(26)] == a


def test_affine_a1_coefficients_are_linear():
    assert cf.rank2_a(2, 2, 30) == list(range(31))


def test_g2_coefficients():
    assert cf.rank2_a(3, 1, 6) == [0, 1, 3, 2, 3, 1, 0]
    assert cf.rank2_a(1, 3, 6) == [0, 1, 1, 2, 1, 1, 0]


@pytest.mark.parametrize("c, lmax", list(zip(FINITE_RANK2, [2, 3, 4, 4, 6, 6])) + [((2, 2), cf.UNBOUNDED), ((1, 4), cf.UNBOUNDED), ((3, 3), cf.UNBOUNDED)])
def test_lmax(c, lmax):
    assert cf.rank2_lmax(*c) == lmax


@pytest.mark.parametrize("c", FINITE_RANK2)
def test_boundary_coefficients_in_finite_type(c):
    lm = cf.rank2_lmax(*c)
    a = cf.rank2_a(*c, lm + 1)
    assert a[lm] == 0 and a[lm - 1] == 1 and a[lm + 1] < 0
    assert all(v > 0 for v in a[1:lm])


@pytest.mark.parametrize("c1, c2", list(product(range(1, 5), repeat=2)) + [(0, 0)])
def test_determinant_identity(c1, c2):
    a, b = cf.rank2_a(c1, c2, 22), cf.rank2_a(c2, c1, 22)
    for l in range(1, 21):
        assert a[l] * b[l] - a[l + 1] * b[l - 1] == 1


def test_rank2_coefficients_bundle():
    rc = cf.Rank2Coefficients.build(1, 2)
    assert rc.l_max == 4 and rc.lam == 0
    assert rc.a[:5] == (0, 1, 1, 1, 0) and rc.a_prime[:5] == (0, 1, 2, 1, 0)


# ---------------------------------------------------------------- rank 2 forms


def _phi(c1, c2, k, l):
    """``S_{k+l-1} ... S_k x_k`` computed with the generic maps."""
    cartan, iota = cartan_rank2(c1, c2), IndexSequence.standard(2)
    f = LinearForm.coordinate(k)
    for m in range(k, k + l):
        f = apply_S_k(iota, cartan, f, m)
    return f


@pytest.mark.parametrize("c1, c2", FINITE_RANK2 + [(2, 2), (1, 4), (3, 3), (2, 5)])
def test_s_chain_matches_closed_form(c1, c2):
    lm = cf.rank2_lmax(c1, c2)
    top = 8 if lm == cf.UNBOUNDED else lm - 1
    a, b = cf.rank2_a(c1, c2, top + 2), cf.rank2_a(c2, c1, top + 2)
    for l in range(top + 1):
        assert _phi(c1, c2, 1, l) == L({l + 1: a[l + 1], l + 2: -a[l]})
        assert _phi(c1, c2, 2, l) == L({l + 2: b[l + 1], l + 3: -b[l]})


@pytest.mark.parametrize("c1, c2", FINITE_RANK2)
def test_last_s_chain_form_is_a_negated_coordinate(c1, c2):
    lm = cf.rank2_lmax(c1, c2)
    assert _phi(c1, c2, 1, lm - 1) == L({lm + 1: -1})


@pytest.mark.parametrize("c1, c2", FINITE_RANK2 + [(2, 2), (3, 3)])
def test_next_s_map_steps_back(c1, c2):
    cartan, iota = cartan_rank2(c1, c2), IndexSequence.standard(2)
    lm = cf.rank2_lmax(c1, c2)
    top = 8 if lm == cf.UNBOUNDED else lm - 1
    for l in range(1, top + 1):
        assert apply_S_k(iota, cartan, _phi(c1, c2, 1, l), l + 2) == _phi(c1, c2, 1, l - 1)


@pytest.mark.parametrize("c1, c2", FINITE_RANK2 + [(2, 2), (3, 3)])
def test_shifted_forms_are_redundant(c1, c2):
    # a_{l+1} phi^{(l-1)}_2 = a'_l phi^{(l)}_1 + x_{l+2}
    lm = cf.rank2_lmax(c1, c2)
    top = 8 if lm == cf.UNBOUNDED else lm - 1
    a, b = cf.rank2_a(c1, c2, top + 2), cf.rank2_a(c2, c1, top + 2)
    for l in range(1, top + 1):
        lhs = _phi(c1, c2, 2, l - 1).scale(a[l + 1])
        rhs = _phi(c1, c2, 1, l).scale(b[l]) + LinearForm.coordinate(l + 2)
        assert lhs == rhs


def test_rank2_generators_affine_a1():
    system = cf.rank2_generators(2, 2, 5)
    assert [str(f) for f in system.forms] == [
        "1*x1 >= 0", "2*x2 - 1*x3 >= 0", "3*x3 - 2*x4 >= 0", "4*x4 - 3*x5 >= 0", "5*x5 - 4*x6 >= 0",
    ]
    assert system.vanish_from is None


def test_rank2_generators_finite_vanishing():
    system = cf.rank2_generators(1, 2, 20)
    assert system.vanish_from == 5 and len(system.forms) == 3
    assert system.free_positions(10) == [1, 2, 3, 4]
    assert system.admits(ZSeq((1, 1, 1, 1)))
    assert not system.admits(ZSeq((0, 0, 0, 0, 1)))
    assert not system.admits(ZSeq((0, 0, 1)))  # x2 - x3 < 0
    assert not system.admits(ZSeq((-1,)))


# ---------------------------------------------------------------- type A_n


@given(st.integers(1, 5), st.integers(1, 40))
def test_an_index_bijection(n, k):
    j, i = cf.an_double(n, k)
    assert cf.an_flat(n, j, i) == k
    assert cf.an_flat(n, j, 0) is None and cf.an_flat(n, j, n + 1) is None


def test_admissible_partitions():
    assert list(cf.admissible_partitions(3, 2)) == [(2, 2), (2, 1), (2, 0), (1, 1), (1, 0), (0, 0)]
    assert cf.is_admissible_partition(3, 1, (3,))
    assert not cf.is_admissible_partition(3, 1, (4,))
    assert not cf.is_admissible_partition(3, 2, (1, 2))
    assert not cf.is_admissible_partition(3, 2, (1,))


def test_phi_lambda_a2_examples():
    assert cf.phi_lambda(2, 1, 1, (0,)) == L({1: 1})
    assert cf.phi_lambda(2, 1, 1, (1,)) == L({2: 1, 3: -1})
    assert cf.phi_lambda(2, 1, 1, (2,)) == L({4: -1})
    with pytest.raises(cf.PartitionNotAdmissible):
        cf.phi_lambda(2, 1, 1, (3,))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_full_partition_gives_negated_coordinate(n):
    for i in range(1, n + 1):
        for j in (1, 2):
            lam = (n + 1 - i,) * i
            assert cf.phi_lambda(n, j, i, lam) == L({cf.an_flat(n, j + i, n + 1 - i): -1})


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_phi_lambda_splits_into_width_one_forms(n):
    for i in range(1, n + 1):
        for lam in cf.admissible_partitions(n, i):
            for j in (1, 2):
                parts = LinearForm()
                for k in range(1, i + 1):
                    parts = parts + cf.phi_lambda(n, j + k - 1, 1, (i - k + lam[k - 1],))
                assert cf.phi_lambda(n, j, i, lam) == parts


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_an_s_chain_matches_closed_form(n):
    cartan, iota = cartan_A(n), IndexSequence.standard(n)
    s = lambda f, k: apply_S_k(iota, cartan, f, k)
    for i in range(1, n + 1):
        for lam in cf.admissible_partitions(n, i):
            for j in (1, 2):
                assert cf.an_s_chain_form(n, j, i, lam, s) == cf.phi_lambda(n, j, i, lam)


@pytest.mark.parametrize("n", [2, 3])
def test_partition_moves_match_s_maps(n):
    cartan, iota = cartan_A(n), IndexSequence.standard(n)
    for i in range(1, n + 1):
        for lam in cf.admissible_partitions(n, i):
            for j in (1, 2):
                f = cf.phi_lambda(n, j, i, lam)
                for target in product(range(1, j + i + 2), range(1, n + 1)):
                    k = cf.an_flat(n, *target)
                    expected = apply_S_k(iota, cartan, f, k)
                    mu = cf.partition_S_action(n, j, i, lam, target)
                    assert cf.phi_lambda(n, j, i, mu) == expected


@pytest.mark.parametrize("n", [2, 3, 4])
def test_closure_consists_of_partition_forms(n):
    cartan, iota = cartan_A(n), IndexSequence.standard(n)
    window = 4 * n
    closure = set(xi_closure(iota, cartan, window))
    family = {
        cf.phi_lambda(n, j, i, lam)
        for j in range(1, 5) for i in range(1, n + 1) for lam in cf.admissible_partitions(n, i)
    }
    assert closure <= family
    assert {f for f in family if f.support_max <= window} <= closure


def test_an_theorem_system_a2():
    system = cf.an_theorem_system(2, 6)
    assert set(system.forms) == {L({1: 1}), L({2: 1, 3: -1}), L({3: 1})}
    assert system.vanishing == (4, 5, 6)
    assert system.free_positions(6) == [1, 2, 3]
    with pytest.raises(ValueError):
        cf.an_theorem_system(0, 3)


def test_a2_theorem_cone_equals_rank2_cone_in_flat_indexing():
    an = cf.an_theorem_system(2, 8)
    r2 = cf.rank2_generators(1, 1, 8)
    for coords in product(range(4), repeat=5):
        x = ZSeq(coords)
        assert an.admits(x) == r2.admits(x)


# ---------------------------------------------------------------- affine type A


@given(st.integers(3, 6), st.integers(1, 40), st.integers(1, 4))
def test_affine_index_bijection(n, pos, k):
    if pos < k:
        return
    j, i = cf.affine_double(n, pos, k)
    assert 1 <= i <= n - 1 and cf.affine_flat(n, j, i, k) == pos
    # the column n wraps to the next row
    assert cf.affine_flat(n, j, n, k) == cf.affine_flat(n, j + 1, 1, k)


def test_affine_double_rejects_positions_before_k():
    with pytest.raises(ValueError):
        cf.affine_double(3, 1, 2)


def test_c0_is_the_coordinate_form():
    C = cf.AdmissibleMatrix.c0(3)
    assert cf.affine_is_admissible(C) == (True, None)
    assert cf.affine_form(C, 4) == LinearForm.coordinate(4)
    assert C.s(5, 1) == 1 and C.s(5, 2) == 0


@pytest.mark.parametrize(
    "rows, fragment",
    [
        (((0, 1),), "tail"),
        (((-1, 0), (2, 0)), "nonnegativity"),
        (((0, 0), (1, 0)), "running sum"),
        (((1, 0), (-1, 1), (1, -1)), "successor"),
        (((1, 1), (0, -1)), "running sum"),
    ],
)
def test_inadmissible_matrices(rows, fragment):
    ok, msg = cf.affine_is_admissible(cf.AdmissibleMatrix(3, rows))
    assert not ok and fragment in msg


def test_admissible_matrix_trims_and_checks_width():
    assert cf.AdmissibleMatrix(3, ((1, 0), (0, 0))).rows == ((1, 0),)
    with pytest.raises(ValueError):
        cf.AdmissibleMatrix(3, ((1, 0, 0),))


def test_partial_sums_round_trip():
    C = cf.AdmissibleMatrix(3, ((0, 1), (1, -1)))
    assert cf.AdmissibleMatrix.from_partial_sums(3, C.s_rows(2)) == C
    assert cf.AdmissibleMatrix.from_entries(3, C.entries()) == C


@pytest.mark.parametrize("J, count", [(1, 1), (2, 2), (3, 6), (4, 18), (5, 54)])
def test_admissible_counts_n3(J, count):
    direct = cf.enumerate_admissible(3, J)
    assert len(direct) == count
    assert direct == cf.enumerate_admissible(3, J, strategy="type1")


@pytest.mark.parametrize("n, J", [(4, 3), (4, 4), (5, 3)])
def test_enumeration_strategies_agree(n, J):
    assert cf.enumerate_admissible(n, J) == cf.enumerate_admissible(n, J, strategy="type1")


def test_enumerate_admissible_arguments():
    with pytest.raises(ValueError):
        cf.enumerate_admissible(3, 0)
    with pytest.raises(ValueError):
        cf.enumerate_admissible(3, 2, strategy="bogus")


def test_total_bound_caps_absolute_entry_sum():
    full = cf.enumerate_admissible(3, 4)
    size = lambda C: sum(abs(v) for v in C.entries().values())
    for bound in (1, 3, 5):
        want = {C for C in full if size(C) <= bound}
        assert cf.enumerate_admissible(3, 4, total_bound=bound) == want
        assert cf.enumerate_admissible(3, 4, total_bound=bound, strategy="type1") == want
    assert cf.enumerate_admissible(3, 4, total_bound=1) == {cf.AdmissibleMatrix.c0(3)}


@pytest.mark.parametrize("n, J", [(3, 4), (4, 3)])
def test_moves_realize_s_maps(n, J):
    cartan, iota = builtin_family(f"affineA{n}"), IndexSequence.standard(n)
    for k in (1, 2):
        for C in cf.enumerate_admissible(n, J):
            f = cf.affine_form(C, k)
            for (j, i), v in C.entries().items():
                move = cf.TypeI(j, i) if v > 0 else cf.TypeII(j, i)
                D = cf.affine_move(C, move)
                pos = cf.affine_flat(n, j, i, k)
                expected = apply_S_k(iota, cartan, f, pos)
                if D is None:
                    # only the first-occurrence case leaves the form fixed
                    assert expected == f and v < 0
                else:
                    assert cf.affine_form(D, k) == expected
                    assert cf.affine_is_admissible(D)[0]


def test_move_on_zero_entry_and_bad_index():
    C = cf.AdmissibleMatrix.c0(3)
    assert cf.affine_move(C, cf.TypeI(2, 1)) == C
    assert cf.affine_move(C, cf.TypeII(1, 1)) is None
    with pytest.raises(ValueError):
        cf.affine_move(C, cf.TypeI(1, 3))


def test_first_move_gives_beta_step():
    cartan, iota = builtin_family("affineA3"), IndexSequence.standard(3)
    D = cf.affine_move(cf.AdmissibleMatrix.c0(3), cf.TypeI(1, 1))
    assert cf.affine_form(D) == apply_S_k(iota, cartan, LinearForm.coordinate(1), 1)
    assert cf.affine_form(D) == L({2: 1, 3: 1, 4: -1})


@pytest.mark.parametrize("n, J", [(3, 5), (4, 3)])
def test_beta_reconstruction(n, J):
    for C in cf.enumerate_admissible(n, J):
        for k in (1, 3):
            assert cf.reconstruct_from_beta(C, k) == cf.affine_form(C, k)


def test_affine_beta_matches_generic_beta():
    from crystal_cone.forms import beta_k

    cartan, iota = builtin_family("affineA4"), IndexSequence.standard(4)
    for j, i in product(range(1, 4), range(1, 4)):
        assert cf.affine_beta(4, j, i) == beta_k(iota, cartan, cf.affine_flat(4, j, i))


def test_matrix_of_form_inverts_affine_form():
    for C in cf.enumerate_admissible(3, 4):
        assert cf.affine_matrix_of_form(cf.affine_form(C, 2), 3, 2) == C
    with pytest.raises(ValueError):
        cf.affine_matrix_of_form(L({1: 1}), 3, 2)


@pytest.mark.parametrize("n, K, J, k", [(3, 12, 3, 1), (4, 14, 2, 2), (3, 20, 5, 3)])
def test_closure_matches_admissible_forms_on_region(n, K, J, k):
    cartan, iota = builtin_family(f"affineA{n}"), IndexSequence.standard(n)
    region = k - 1 + J * (n - 1)
    closure = {f for f in xi_closure(iota, cartan, K, {k}) if f.support_max <= region}
    assert closure == {cf.affine_form(C, k) for C in cf.enumerate_admissible(n, J)}
