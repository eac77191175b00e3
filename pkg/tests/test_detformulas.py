import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bethekit import detformulas as det
from bethekit.betheroots import homotopy_all
from bethekit.chain import scalar_data, xxx_chain, xxz_chain
from bethekit.rmatrix import random_points, rational, trigonometric
from bethekit.tensoralg import BudgetError, PreconditionError
from bethekit.vectors import sandwich

KINDS = [rational(1j), trigonometric(0.5 - 0.8j)]
ids = [k.label for k in KINDS]


def test_bipartitions_count_and_order():
    parts = list(det.bipartitions(3))
    assert len(parts) == 8
    assert parts[0] == ((), (0, 1, 2)) and parts[-1] == ((0, 1, 2), ())
    assert len(list(det.bipartitions(5, 2))) == 10


@pytest.mark.parametrize("kind", KINDS, ids=ids)
@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_izergin_matches_bruteforce(kind, n, rng):
    x, y = random_points(rng, n), random_points(rng, n)
    brute = det.dwpf_bruteforce(kind, x, y)
    izergin = det.dwpf_izergin(kind, x, y)
    assert abs(brute - izergin) <= 1e-10 * max(abs(brute), 1)


@pytest.mark.parametrize("kind", KINDS, ids=ids)
def test_izergin_is_symmetric(kind, rng):
    x, y = random_points(rng, 3), random_points(rng, 3)
    base = det.dwpf_izergin(kind, x, y)
    assert np.isclose(det.dwpf_izergin(kind, x[::-1], y[[1, 2, 0]]), base)


def test_izergin_at_h_zero_is_finite():
    kind = rational(1j)
    x = np.array([0.2, 0.5 + 0.1j])
    y = np.array([x[0] + 1j, -0.4])
    assert np.isfinite(det.dwpf_izergin(kind, x, y))
    assert abs(det.dwpf_izergin(kind, x, y) - det.dwpf_bruteforce(kind, x, y)) < 1e-12


def test_asm_counts():
    assert [det.asm_count(m) for m in range(1, 8)] == [1, 2, 7, 42, 429, 7436, 218348]
    for m in range(1, 6):
        asms = det.enumerate_asms(m)
        assert len(asms) == det.asm_count(m)
        for a in asms[:50]:
            assert np.all(a.sum(axis=0) == 1) and np.all(a.sum(axis=1) == 1)
            partial = np.cumsum(a, axis=1)
            assert partial.min() >= 0 and partial.max() <= 1


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.floats(0.1, 1.5), st.floats(0.1, 1.3))
def test_kuperberg_determinant(m, alpha, beta):
    a, b = alpha + 0.2j, beta - 0.1j
    closed, direct = det.kuperberg_det(m, a, b)
    s = np.add.outer(np.arange(1, m + 1), np.arange(1, m + 1)) - 1
    # LU accuracy degrades with the condition number of the matrix
    cond = np.linalg.cond(np.sinh(a * s) / np.sinh(b * s))
    assert abs(closed - direct) <= 1e-13 * cond * abs(closed)


def _onshell_chain(kind_name):
    offsets = np.linspace(-0.6, 0.6, 4) + 0.05 * np.random.default_rng(8).standard_normal(4)
    if kind_name == "rational":
        return xxx_chain(4, c=1j, offsets=offsets)
    return xxz_chain(4, delta=0.35, offsets=offsets)


@pytest.mark.parametrize("kind_name", ["rational", "trigonometric"])
def test_slavnov_against_partition_sum_and_vectors(kind_name, rng):
    spec = _onshell_chain(kind_name)
    kappa = 0.7 - 0.3j
    data = scalar_data(spec)
    sets = homotopy_all(spec, 2, kappa)
    for rs in sets[:3]:
        v = random_points(rng, 2, 0.5)
        sum_form = det.scalar_product_sum(spec.kind, v, rs.roots, data.r)
        slav = det.slavnov_determinant(spec.kind, v, rs.roots, data.r, kappa)
        left = det.slavnov_determinant(spec.kind, rs.roots, v, data.r, kappa, onshell="left")
        jac = det.slavnov_jacobian_form(spec.kind, v, rs.roots, data, kappa)
        for other in (slav, left, jac):
            assert abs(other - sum_form) <= 1e-9 * abs(sum_form)
        dd = np.prod([data.d(x) for x in v]) * np.prod([data.d(x) for x in rs.roots])
        assert abs(sandwich(spec, v, rs.roots) - dd * sum_form) <= 1e-9 * abs(dd * sum_form)
        unnorm = det.slavnov_unnormalized(spec.kind, v, rs.roots, data, kappa)
        assert abs(unnorm - dd * sum_form) <= 1e-9 * abs(dd * sum_form)


@pytest.mark.parametrize("kind_name", ["rational", "trigonometric"])
def test_gaudin_norm_matches_sandwich(kind_name):
    spec = _onshell_chain(kind_name)
    kappa = 1.4
    data = scalar_data(spec)
    for rs in homotopy_all(spec, 2, kappa)[:3]:
        u = rs.roots
        norm = det.gaudin_norm(spec.kind, u, kappa, data.dlog_r)
        dd = np.prod([data.d(x) for x in u]) ** 2
        assert abs(sandwich(spec, u, u) - dd * norm) <= 1e-8 * abs(dd * norm)


def test_gaudin_matrix_is_psi_jacobian(rng):
    kind = trigonometric(0.4 - 0.9j)
    xi = random_points(rng, 3, 0.5)

    def log_r(z):
        return np.sum(np.log(kind.sh(z - xi + kind.const) / kind.sh(z - xi)))

    def dlog_r(z):
        return np.sum(kind.dlog_sh(z - xi + kind.const) - kind.dlog_sh(z - xi))

    u = random_points(rng, 3, 0.7)
    g = det.gaudin_matrix(kind, u, dlog_r)
    assert np.max(np.abs(g - det.psi_jacobian(kind, u, log_r))) < 1e-7 * np.max(np.abs(g))


@pytest.mark.parametrize("kind", KINDS, ids=ids)
def test_two_representations_agree(kind, rng):
    for n in (1, 2, 3):
        left, right = det.two_representation_determinants(kind, random_points(rng, n), random_points(rng, n), 0.8)
        assert abs(left - right) <= 1e-10 * abs(left)


@pytest.mark.parametrize("kind", KINDS, ids=ids)
@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (1, 3), (2, 2)])
def test_summation_lemma(kind, m, n, rng):
    r1, r2 = det.summation_lemma_residuals(kind, random_points(rng, m + n), random_points(rng, m), random_points(rng, n))
    assert r1 < 1e-10 and r2 < 1e-10


def test_rational_sum_identity_and_trigonometric_control(rng):
    u, v = random_points(rng, 2), random_points(rng, 2)
    assert det.rational_sum_identity_residual(rational(1j), u, v) < 1e-10
    assert det.rational_sum_identity_residual(trigonometric(0.5 - 0.8j), u, v) > 1e-4


@pytest.mark.parametrize("kind", KINDS, ids=ids)
def test_vandermonde_and_column_expansions(kind, rng):
    v = random_points(rng, 4)
    assert det.vandermonde_split_residual(kind, v) < 1e-12
    phi1 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    phi2 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert det.column_expansion_residual(phi1, phi2) < 1e-12
    assert det.delta_weighted_expansion_residual(kind, v, phi1, phi2) < 1e-12


@pytest.mark.parametrize("kind", KINDS, ids=ids)
def test_shifted_sum(kind, rng):
    u, v = random_points(rng, 3), random_points(rng, 3)

    def phi(a, b):
        return 1.0 / (kind.sh(a - b) + 2.0)

    residual = det.shifted_sum_residual(kind, u, v, phi, lambda x: np.exp(x), lambda x: x**2 + 1)
    assert residual < 1e-10


def test_partition_budget_and_shapes(rng):
    with pytest.raises(BudgetError):
        det.scalar_product_sum(rational(1j), random_points(rng, 20), random_points(rng, 20), lambda z: 1.0)
    with pytest.raises(PreconditionError):
        det.dwpf_izergin(rational(1j), [0.1], [0.2, 0.3])
    with pytest.raises(PreconditionError):
        det.slavnov_determinant(rational(1j), [0.1], [0.2], lambda z: 1.0, onshell="both")
