import numpy as np
import pytest

from bethekit import vectors as vec
from bethekit.betheroots import ground_state_roots, homotopy_all, xxx_one_magnon_roots
from bethekit.chain import scalar_data, xxx_chain, xxz_chain
from bethekit.rmatrix import Normalization, random_points
from bethekit.tensoralg import PreconditionError


def spread(n, seed):
    return np.linspace(-0.6, 0.6, n) + 0.05 * np.random.default_rng(seed).standard_normal(n)


@pytest.fixture(scope="module")
def xxz4():
    return xxz_chain(4, delta=0.35, offsets=spread(4, 21))


def test_b_product_is_commutative(xxz4, rng):
    u = random_points(rng, 3, 0.6)
    a = vec.build_bethe_vector(xxz4, u).state
    b = vec.build_bethe_vector(xxz4, u[::-1]).state
    assert np.allclose(a, b, atol=1e-12 * np.linalg.norm(a))


def test_dual_vector_and_sandwich_agree(xxz4, rng):
    v, u = random_points(rng, 2, 0.6), random_points(rng, 2, 0.6)
    direct = vec.dual_bethe_vector(xxz4, v).state @ vec.build_bethe_vector(xxz4, u).state
    assert np.isclose(vec.sandwich(xxz4, v, u), direct)


def test_bethe_vector_record(xxz4):
    bv = vec.build_bethe_vector(xxz4, [0.1, 0.3j])
    rec = bv.to_record()
    assert rec["N"] == 4 and len(rec["roots"]) == 2 and len(rec["amplitudes"]) == 16
    assert not rec["dual"] and bv.norm > 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_a_and_d_action_formulas(xxz4, rng, n):
    res = vec.action_residuals(xxz4, complex(random_points(rng, 1)[0]), random_points(rng, n, 0.6))
    assert res["A"] < 1e-11 and res["D"] < 1e-11


def test_unwanted_terms_vanish_on_shell(xxz4):
    for rs in homotopy_all(xxz4, 2)[:3]:
        coeffs = vec.transfer_unwanted_coefficients(xxz4, 0.21 + 0.4j, rs.roots)
        data = scalar_data(xxz4)
        scale = max(abs(data.a(u)) + abs(data.d(u)) for u in rs.roots)
        assert np.max(np.abs(coeffs)) < 1e-10 * scale
        assert vec.onshell_residual(xxz4, rs.roots) < 1e-10


def test_offshell_vector_is_not_eigenvector(xxz4):
    assert vec.onshell_residual(xxz4, [0.11 + 0.2j, -0.4]) > 1e-3


@pytest.mark.parametrize("m,n", [(1, 1), (1, 2), (2, 3)])
def test_c_action(xxz4, rng, m, n):
    assert vec.c_action_residual(xxz4, random_points(rng, m, 0.6), random_points(rng, n, 0.6)) < 1e-10


def test_c_action_needs_enough_b_operators(xxz4):
    with pytest.raises(PreconditionError):
        vec.c_action_residual(xxz4, [0.1, 0.2], [0.3])


@pytest.mark.parametrize("relation", ["AB", "CD", "DB", "CA"])
@pytest.mark.parametrize("alternative", [False, True])
def test_multiple_commutation_relations(relation, alternative, rng):
    spec = xxx_chain(4, offsets=0.3 * rng.standard_normal(4))
    v, u = random_points(rng, 2, 0.6), random_points(rng, 2, 0.6)
    assert vec.mcr_residual(spec, v, u, relation, alternative) < 1e-10


def test_mcr_budget(rng):
    spec = xxx_chain(vec.MCR_MAX_SITES + 1)
    with pytest.raises(PreconditionError):
        vec.mcr_residual(spec, random_points(rng, 1), random_points(rng, 1))


@pytest.mark.parametrize("norm", list(Normalization))
def test_coordinate_form_matches_b_product(norm, rng):
    spec = xxz_chain(5, delta=-0.3, norm=norm)
    for n in (1, 2, 3):
        u = random_points(rng, n, 0.5)
        psi = vec.build_bethe_vector(spec, u).state
        coord = vec.coordinate_form(spec, u)
        assert np.max(np.abs(psi - coord)) < 1e-11 * np.max(np.abs(psi))


def test_null_vector_at_singular_pair():
    spec = xxx_chain(4, norm=Normalization.SINH)
    roots = [0.5j, -0.5j]
    psi = vec.build_bethe_vector(spec, roots).state
    bound = np.prod([vec.b_norm_bound(spec, u) for u in roots])
    assert np.linalg.norm(psi) < vec.NULL_VECTOR_RTOL * bound
    with pytest.raises(vec.NullVectorError):
        vec.onshell_residual(spec, roots)


@pytest.mark.parametrize("n_sites", [4, 6, 8])
@pytest.mark.parametrize("delta", [-0.9, 0.0, 0.5, 1.0, 3.0])
def test_special_vector_eigenvalue(n_sites, delta):
    res, energy = vec.special_vector_check(n_sites, delta)
    assert res < 1e-10
    assert np.isfinite(energy)


def test_special_vector_structure():
    psi = vec.special_vector(4)
    assert np.count_nonzero(np.abs(psi) > 0) == 4
    with pytest.raises(PreconditionError):
        vec.special_vector_check(5, 0.0)


def test_special_limit_collinearity_is_quadratic():
    small = vec.special_limit_collinearity(0.4, 1e-2)
    smaller = vec.special_limit_collinearity(0.4, 5e-3)
    assert small < 1e-2
    assert smaller / small == pytest.approx(0.25, rel=0.1)


def test_collinearity_residual_is_scale_invariant():
    x = np.array([1.0, 2j, -1])
    assert vec.collinearity_residual(x, (3 - 1j) * x) < 1e-15
    assert vec.collinearity_residual(x, np.array([1.0, 0, 0])) > 0.1


@pytest.mark.parametrize("dual", [False, True])
@pytest.mark.parametrize("split", [1, 2, 3])
def test_composite_model(dual, split, rng):
    spec = xxz_chain(5, delta=0.45, offsets=0.4 * rng.standard_normal(5))
    for n in (1, 2):
        assert vec.composite_decomposition_residual(spec, split, random_points(rng, n, 0.6), dual=dual) < 1e-10


def test_zero_modes_match_exact_and_algebra(rng):
    spec = xxx_chain(4, offsets=0.3 * rng.standard_normal(4))
    approx = vec.zero_modes(spec)
    exact = vec.exact_zero_modes(4)
    for i in (1, 2):
        for j in (1, 2):
            assert np.max(np.abs(approx.entry(i, j) - exact.entry(i, j))) < 1e-6
    assert max(vec.zero_mode_commutator_residuals(exact).values()) < 1e-14
    assert max(vec.zero_mode_action_residuals(spec, random_points(rng, 2, 0.7), approx).values()) < 1e-6


def test_zero_modes_need_rational_fg_chain():
    with pytest.raises(PreconditionError):
        vec.zero_modes(xxz_chain(3, delta=0.2, norm=Normalization.FG))
    with pytest.raises(PreconditionError):
        vec.zero_modes(xxx_chain(3, norm=Normalization.SINH))


def test_infinite_root_relation():
    spec = xxx_chain(4, offsets=spread(4, 22))
    exact = vec.exact_zero_modes(4)
    for rs in homotopy_all(spec, 1)[:2]:
        assert vec.infinite_root_residual(spec, rs.roots, exact) < 1e-10


def test_form_factor_limits():
    hom = xxx_chain(4)
    magnons = xxx_one_magnon_roots(4)
    pair = ground_state_roots(hom, 2).roots
    res = vec.form_factor_limit_residuals(hom, 0.37 + 0.2j, pair, [magnons[0]], [magnons[2]])
    assert res["12"] < 1e-5 and res["21"] < 1e-5


def test_generating_functional_closed_form():
    spec = xxx_chain(4, offsets=spread(4, 23))
    beta1, beta2 = 0.3, -0.2 + 0.4j
    u = homotopy_all(spec, 2, 1.0)[0].roots
    for v_set in homotopy_all(spec, 2, np.exp(beta2 - beta1))[:3]:
        v = v_set.roots
        direct = vec.generating_functional_direct(spec, 2, v, u, beta1, beta2)
        closed = vec.generating_functional_closed(spec, 2, v, u, beta1, beta2)
        assert abs(direct - closed) < 1e-9 * max(abs(direct), 1e-6)


def test_local_mean_values_site_independent_on_homogeneous_chain():
    spec = xxz_chain(6, delta=0.3)
    rs = ground_state_roots(spec, 2)
    means = vec.local_mean_values(spec, rs.roots)
    assert np.allclose(means, means[0]) and np.isclose(np.sum(means), 6 - 2)
