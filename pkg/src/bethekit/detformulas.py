"""Determinant formulas: domain-wall partition function, ASM counts, scalar products, norms.

Notation follows ``rmatrix``: ``sh`` is the identity (rational) or sinh (trigonometric),
and every formula that carries the constant ``c`` in the rational case carries
``sh(c)`` in the trigonometric case. Products over sets use ``prod_f`` and friends,
and

    Delta(v)  = prod_{j<k} g(v_k, v_j),    Delta'(v) = prod_{j<k} g(v_j, v_k).

Functions taking a model-independent function ``r`` accept any callable; the
generalized model is specified entirely by r(u) = a(u)/d(u).
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Iterator

import numpy as np

from .chain import ChainSpec, ScalarData, apply_entry, vacuum
from .rmatrix import Normalization, RMatrixKind, f, g, h, kernel, prod_f, prod_g, prod_h, t
from .tensoralg import BudgetError, PreconditionError, determinant

PARTITION_BUDGET = 6
DWPF_BRUTE_MAX = 5


# ----------------------------------------------------------------------------
# partitions and Vandermonde-type products


def bipartitions(n: int, size_first: int | None = None) -> Iterator[tuple[tuple, tuple]]:
    """Partitions of range(n) into (I, II), in increasing bitmask order of I.

    Both parts keep the natural order. With ``size_first`` only partitions with
    #I = size_first are produced.
    """
    for mask in range(1 << n):
        first = tuple(k for k in range(n) if mask >> k & 1)
        if size_first is not None and len(first) != size_first:
            continue
        second = tuple(k for k in range(n) if not mask >> k & 1)
        yield first, second


def partition_parity(first, second) -> int:
    """Parity of the permutation placing ``first`` before ``second``."""
    inversions = sum(1 for a in first for b in second if a > b)
    return inversions % 2


def delta(kind: RMatrixKind, v) -> complex:
    """prod_{j<k} g(v_k, v_j)."""
    out = 1.0 + 0j
    for j, k in itertools.combinations(range(len(v)), 2):
        out *= g(kind, v[k], v[j])
    return out


def delta_prime(kind: RMatrixKind, v) -> complex:
    """prod_{j<k} g(v_j, v_k)."""
    out = 1.0 + 0j
    for j, k in itertools.combinations(range(len(v)), 2):
        out *= g(kind, v[j], v[k])
    return out


def _pick(values, idx):
    return [values[i] for i in idx]


def _check_partition_budget(n: int) -> None:
    if n > PARTITION_BUDGET:
        raise BudgetError(f"partition sums limited to {PARTITION_BUDGET} variables per set")


# ----------------------------------------------------------------------------
# domain-wall partition function


def dwpf_izergin(kind: RMatrixKind, x, y) -> complex:
    """Izergin determinant for K_n(x|y).

    K_n = prod_{l>m} g(x_l, x_m) g(y_m, y_l) * h(x, y) * det t(x_j, y_k).

    The factor h(x, y) is absorbed row by row (t h = g), so zeros of h that cancel
    poles of t are handled exactly.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    n = len(x)
    if len(y) != n:
        raise PreconditionError("both sets need the same cardinality")
    if n == 0:
        return 1.0 + 0j
    pref = 1.0 + 0j
    for m, l in itertools.combinations(range(n), 2):
        pref *= g(kind, x[l], x[m]) * g(kind, y[m], y[l])
    hmat = np.array([[h(kind, xj, yk) for yk in y] for xj in x])
    mat = np.empty((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            mat[j, k] = g(kind, x[j], y[k]) * np.prod(np.delete(hmat[j], k))
    return complex(pref * determinant(mat))


def dwpf_bruteforce(kind: RMatrixKind, x, y) -> complex:
    """K_n(x|y) as the all-down component of B(x_n)...B(x_1)|0> on the chain with xi = y."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    n = len(x)
    if len(y) != n:
        raise PreconditionError("both sets need the same cardinality")
    if n > DWPF_BRUTE_MAX:
        raise BudgetError(f"brute-force partition function limited to n <= {DWPF_BRUTE_MAX}")
    if n == 0:
        return 1.0 + 0j
    spec = ChainSpec(kind, Normalization.FG, tuple(y))
    psi = vacuum(n)
    for xk in x:
        psi = apply_entry(spec, xk, 1, 2, psi)
    return complex(psi[(1 << n) - 1])


# ----------------------------------------------------------------------------
# alternating-sign matrices


def asm_count(m: int) -> int:
    """Number of m x m alternating-sign matrices, prod_{k<m} (3k+1)! / (m+k)! (exact)."""
    if m < 1:
        raise PreconditionError("m must be a positive integer")
    num = 1
    den = 1
    for k in range(m):
        num *= math.factorial(3 * k + 1)
        den *= math.factorial(m + k)
    count, rem = divmod(num, den)
    assert rem == 0
    return count


def enumerate_asms(m: int) -> list[np.ndarray]:
    """All m x m alternating-sign matrices by row-by-row backtracking.

    Partial row and column sums must stay in {0, 1} and every full line sums to 1,
    which is equivalent to the alternation rule for nonzero entries.
    """
    if m < 1:
        raise PreconditionError("m must be a positive integer")
    if m > 6:
        raise BudgetError("enumeration limited to m <= 6")

    def rows_for(col_sums):
        out = []

        def build(k, partial, row):
            if k == m:
                if partial == 1:
                    out.append(tuple(row))
                return
            for e in (-1, 0, 1):
                if partial + e in (0, 1) and col_sums[k] + e in (0, 1):
                    row.append(e)
                    build(k + 1, partial + e, row)
                    row.pop()

        build(0, 0, [])
        return out

    result = []

    def grow(rows, col_sums):
        if len(rows) == m:
            if all(s == 1 for s in col_sums):
                result.append(np.array(rows, dtype=int))
            return
        for row in rows_for(col_sums):
            grow(rows + [row], tuple(s + e for s, e in zip(col_sums, row)))

    grow([], (0,) * m)
    return result


def kuperberg_det(m: int, alpha: complex, beta: complex) -> tuple[complex, complex]:
    """(closed form, direct determinant) of det[sinh(alpha(j+k-1)) / sinh(beta(j+k-1))]."""
    if m < 1:
        raise PreconditionError("m must be a positive integer")
    idx = np.arange(1, m + 1)
    s = idx[:, None] + idx[None, :] - 1
    den = np.sinh(beta * s)
    if np.min(np.abs(den)) < 1e-12:
        raise PreconditionError("sinh(beta (j+k-1)) vanishes")
    direct = determinant(np.sinh(alpha * s) / den)
    closed = 2.0 ** (m * m - m) + 0j
    for j in range(1, m + 1):
        for k in range(1, m + 1):
            if j > k:
                closed *= np.sinh(beta * (j - k)) ** 2
            closed *= np.sinh(alpha + beta * (j - k)) / np.sinh(beta * (j + k - 1))
    return complex(closed), complex(direct)


# ----------------------------------------------------------------------------
# scalar products


def scalar_product_sum(kind: RMatrixKind, v, u, r: Callable) -> complex:
    """S_n(v|u) = <0|C(v)B(u)|0> / (d(v)d(u)) as the double sum over partitions.

    Sum of r(u_II) r(v_I) K(v_II|u_II) K(u_I|v_I) f(v_II, v_I) f(u_I, u_II)
    over partitions with #u_I = #v_I.
    """
    v = list(np.asarray(v, dtype=complex))
    u = list(np.asarray(u, dtype=complex))
    n = len(u)
    if len(v) != n:
        raise PreconditionError("both sets need the same cardinality")
    _check_partition_budget(n)
    rv = [complex(r(x)) for x in v]
    ru = [complex(r(x)) for x in u]
    total = 0j
    for vi, vii in bipartitions(n):
        k = len(vii)
        for ui, uii in bipartitions(n, n - k):
            term = np.prod(_pick(ru, uii)) * np.prod(_pick(rv, vi))
            term *= dwpf_izergin(kind, _pick(v, vii), _pick(u, uii))
            term *= dwpf_izergin(kind, _pick(u, ui), _pick(v, vi))
            term *= prod_f(kind, _pick(v, vii), _pick(v, vi)) * prod_f(kind, _pick(u, ui), _pick(u, uii))
            total += term
    return complex(total)


def _ratio_ff(kind, x, others) -> complex:
    """f(others, x) / f(x, others)."""
    out = 1.0 + 0j
    for y in others:
        out *= f(kind, y, x) / f(kind, x, y)
    return out


def slavnov_matrix(kind: RMatrixKind, v, u, r: Callable, kappa=1.0) -> np.ndarray:
    """M_jk = t(v_k, u_j) (kappa - r(v_k) f(u_j', v_k) / f(v_k, u_j')), u_j' = u without u_j."""
    n = len(u)
    mat = np.empty((n, n), dtype=complex)
    for k, vk in enumerate(v):
        rv = complex(r(vk))
        for j, uj in enumerate(u):
            others = np.delete(u, j)
            mat[j, k] = t(kind, vk, uj) * (kappa - rv * _ratio_ff(kind, vk, others))
    return mat


def slavnov_determinant(kind: RMatrixKind, v, u, r: Callable, kappa=1.0, onshell: str = "right") -> complex:
    """S_n(v|u) with one side on-shell for the twist ``kappa``.

    ``onshell='right'`` means u solves the twisted Bethe equations and v is free;
    ``onshell='left'`` swaps the roles (the product is symmetric in v and u).
    Value: Delta'(u) Delta(v) h(v, u) det M.
    """
    v = np.asarray(v, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if len(v) != len(u):
        raise PreconditionError("both sets need the same cardinality")
    if onshell == "left":
        v, u = u, v
    elif onshell != "right":
        raise PreconditionError("onshell must be 'left' or 'right'")
    if len(u) == 0:
        return 1.0 + 0j
    mat = slavnov_matrix(kind, v, u, r, kappa)
    return complex(delta_prime(kind, u) * delta(kind, v) * prod_h(kind, v, u) * determinant(mat))


def slavnov_unnormalized(kind: RMatrixKind, v, u, data: ScalarData, kappa=1.0) -> complex:
    """<0|C(v)B(u)|0> for on-shell u without dividing by d; valid where d(v_k) = 0."""
    v = np.asarray(v, dtype=complex)
    u = np.asarray(u, dtype=complex)
    n = len(u)
    if n == 0:
        return 1.0 + 0j
    mat = np.empty((n, n), dtype=complex)
    for k, vk in enumerate(v):
        dv, av = data.d(vk), data.a(vk)
        for j, uj in enumerate(u):
            others = np.delete(u, j)
            mat[j, k] = t(kind, vk, uj) * (kappa * dv - av * _ratio_ff(kind, vk, others))
    du = np.prod([data.d(x) for x in u])
    return complex(du * delta_prime(kind, u) * delta(kind, v) * prod_h(kind, v, u) * determinant(mat))


def _dlog_f_first(kind, x, y):
    """d/dx log f(x, y)."""
    return kind.dlog_sh(x - y + kind.const) - kind.dlog_sh(x - y)


def slavnov_jacobian_form(kind: RMatrixKind, v, u, data: ScalarData, kappa=1.0) -> complex:
    """S_n(v|u) = Delta'(u) Delta(v) / g(v, u) * det(sh(c) / d(v_k) * d tau(v_k|u) / d u_j).

    tau(z|u) = a(z) f(u, z) + kappa d(z) f(z, u) is the twisted eigenvalue.
    """
    v = np.asarray(v, dtype=complex)
    u = np.asarray(u, dtype=complex)
    n = len(u)
    if n == 0:
        return 1.0 + 0j
    sc = kind.sh_const
    mat = np.empty((n, n), dtype=complex)
    for k, vk in enumerate(v):
        fa = prod_f(kind, u, vk)
        fd = prod_f(kind, vk, u)
        av, dv = data.a(vk), data.d(vk)
        for j, uj in enumerate(u):
            dtau = av * fa * _dlog_f_first(kind, uj, vk) \
                + kappa * dv * fd * (kind.dlog_sh(vk - uj) - kind.dlog_sh(vk - uj + kind.const))
            mat[j, k] = sc / dv * dtau
    return complex(delta_prime(kind, u) * delta(kind, v) / prod_g(kind, v, u) * determinant(mat))


def two_representation_determinants(kind: RMatrixKind, v, u, kappa=1.0) -> tuple[complex, complex]:
    """Both sides of the identity between the two determinant representations.

    Left:  det(t(u_j, v_k) + kappa t(v_k, u_j) h(v_k, u) h(v, v_k) / (h(u, v_k) h(v_k, v)))
    Right: det(t(u_k, v_j) + kappa t(v_j, u_k) h(u_k, u) h(v, u_k) / (h(u, u_k) h(u_k, v)))
    They agree for arbitrary sets u, v.
    """
    v = np.asarray(v, dtype=complex)
    u = np.asarray(u, dtype=complex)
    n = len(u)
    left = np.empty((n, n), dtype=complex)
    right = np.empty((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            vk, uj = v[k], u[j]
            left[j, k] = t(kind, uj, vk) + kappa * t(kind, vk, uj) * prod_h(kind, vk, u) * prod_h(kind, v, vk) \
                / (prod_h(kind, u, vk) * prod_h(kind, vk, v))
            uk, vj = u[k], v[j]
            right[j, k] = t(kind, uk, vj) + kappa * t(kind, vj, uk) * prod_h(kind, uk, u) * prod_h(kind, v, uk) \
                / (prod_h(kind, u, uk) * prod_h(kind, uk, v))
    return determinant(left), determinant(right)


# ----------------------------------------------------------------------------
# norms


def gaudin_matrix(kind: RMatrixKind, u, dlog_r: Callable) -> np.ndarray:
    """M~_jk = -delta_jk (log'r(u_j) + sum_{m != j} K(u_j - u_m)) + (1 - delta_jk) K(u_j - u_k)."""
    u = np.asarray(u, dtype=complex)
    n = len(u)
    mat = np.zeros((n, n), dtype=complex)
    for j in range(n):
        acc = complex(dlog_r(u[j]))
        for m in range(n):
            if m != j:
                kv = kernel(kind, u[j] - u[m])
                acc += kv
                mat[j, m] = kv
        mat[j, j] = -acc
    return mat


def gaudin_norm(kind: RMatrixKind, u, kappa, dlog_r: Callable) -> complex:
    """S_n(u|u) = (sh(c) kappa)^n prod_{j != k} f(u_j, u_k) det M~ for on-shell u."""
    u = np.asarray(u, dtype=complex)
    n = len(u)
    pref = (kind.sh_const * kappa) ** n
    for j in range(n):
        for k in range(n):
            if j != k:
                pref *= f(kind, u[j], u[k])
    return complex(pref * determinant(gaudin_matrix(kind, u, dlog_r)))


def psi_functions(kind: RMatrixKind, u, log_r: Callable) -> np.ndarray:
    """Psi_j = log r(u_j) + sum_{k != j} log(sh(u_k - u_j + c) / sh(u_k - u_j - c))."""
    u = np.asarray(u, dtype=complex)
    c = kind.const
    out = np.empty(len(u), dtype=complex)
    for j, uj in enumerate(u):
        acc = complex(log_r(uj))
        for k, uk in enumerate(u):
            if k != j:
                acc += np.log(kind.sh(uk - uj + c) / kind.sh(uk - uj - c))
        out[j] = acc
    return out


def psi_jacobian(kind: RMatrixKind, u, log_r: Callable, step: float = 1e-5) -> np.ndarray:
    """-d Psi_j / d u_k by central differences (an independent check of M~)."""
    u = np.asarray(u, dtype=complex)
    n = len(u)
    jac = np.empty((n, n), dtype=complex)
    for k in range(n):
        e = np.zeros(n, dtype=complex)
        e[k] = step
        # log branches cancel for small steps
        diff = psi_functions(kind, u + e, log_r) - psi_functions(kind, u - e, log_r)
        diff = diff - 2j * np.pi * np.round(np.imag(diff) / (2 * np.pi))
        jac[:, k] = -diff / (2 * step)
    return jac


# ----------------------------------------------------------------------------
# summation identities


def summation_lemma_residuals(kind: RMatrixKind, xi, u, v) -> tuple[float, float]:
    """Relative residuals of the two closed forms of
    sum K_m(xi_I|u) K_n(v|xi_II) f(xi_II, xi_I) over partitions of xi with #xi_I = #u.

    First: (-1)^m f(xi, u) K_{m+n}({u - c, v}|xi).
    Second: (-1)^n f(v, xi) K_{m+n}(xi|{u, v + c}).
    """
    xi = list(np.asarray(xi, dtype=complex))
    u = list(np.asarray(u, dtype=complex))
    v = list(np.asarray(v, dtype=complex))
    m, n = len(u), len(v)
    if len(xi) != m + n:
        raise PreconditionError("#xi must equal #u + #v")
    _check_partition_budget(m + n)
    c = kind.const
    lhs = 0j
    for first, second in bipartitions(m + n, m):
        xi1, xi2 = _pick(xi, first), _pick(xi, second)
        lhs += dwpf_izergin(kind, xi1, u) * dwpf_izergin(kind, v, xi2) * prod_f(kind, xi2, xi1)
    rhs1 = (-1) ** m * prod_f(kind, xi, u) * dwpf_izergin(kind, [x - c for x in u] + v, xi)
    rhs2 = (-1) ** n * prod_f(kind, v, xi) * dwpf_izergin(kind, xi, u + [x + c for x in v])
    scale = max(abs(lhs), 1e-300)
    return float(abs(lhs - rhs1) / scale), float(abs(lhs - rhs2) / scale)


def rational_sum_identity_residual(kind: RMatrixKind, u, v) -> float:
    """|sum K_n(u|w_II + c) f(w_II, w_I) - (-1)^n| over partitions of w = {u, v}, #w_II = #u.

    Holds for the rational kind only; the trigonometric kind gives a nonzero residual.
    """
    u = list(np.asarray(u, dtype=complex))
    v = list(np.asarray(v, dtype=complex))
    n = len(u)
    w = u + v
    _check_partition_budget(len(w))
    c = kind.const
    total = 0j
    for first, second in bipartitions(len(w), len(v)):
        w1, w2 = _pick(w, first), _pick(w, second)
        total += dwpf_izergin(kind, u, [x + c for x in w2]) * prod_f(kind, w2, w1)
    return float(abs(total - (-1) ** n))


def vandermonde_split_residual(kind: RMatrixKind, v) -> float:
    """Max over partitions of |Delta(v) - (-1)^P Delta(v_I) Delta(v_II) g(v_II, v_I)| / |Delta(v)|."""
    v = list(np.asarray(v, dtype=complex))
    n = len(v)
    _check_partition_budget(n)
    full = delta(kind, v)
    worst = 0.0
    for first, second in bipartitions(n):
        a, b = _pick(v, first), _pick(v, second)
        rhs = (-1) ** partition_parity(first, second) * delta(kind, a) * delta(kind, b) * prod_g(kind, b, a)
        worst = max(worst, abs(full - rhs) / abs(full))
    return float(worst)


def column_expansion_residual(phi1: np.ndarray, phi2: np.ndarray) -> float:
    """|det(phi1 + phi2) - sum (-1)^P det[phi1(v_I) | phi2(v_II)]| relative to the left side."""
    n = phi1.shape[0]
    _check_partition_budget(n)
    lhs = determinant(phi1 + phi2)
    rhs = 0j
    for first, second in bipartitions(n):
        mat = np.concatenate([phi1[:, list(first)], phi2[:, list(second)]], axis=1)
        rhs += (-1) ** partition_parity(first, second) * determinant(mat)
    return float(abs(lhs - rhs) / max(abs(lhs), 1e-300))


def delta_weighted_expansion_residual(kind: RMatrixKind, v, phi1: np.ndarray, phi2: np.ndarray) -> float:
    """Delta(v) det(phi1 + phi2) against sum Delta(v_I) Delta(v_II) g(v_II, v_I) det[phi1 | phi2]."""
    v = list(np.asarray(v, dtype=complex))
    n = len(v)
    _check_partition_budget(n)
    lhs = delta(kind, v) * determinant(phi1 + phi2)
    rhs = 0j
    for first, second in bipartitions(n):
        mat = np.concatenate([phi1[:, list(first)], phi2[:, list(second)]], axis=1)
        rhs += delta(kind, _pick(v, first)) * delta(kind, _pick(v, second)) \
            * prod_g(kind, _pick(v, second), _pick(v, first)) * determinant(mat)
    return float(abs(lhs - rhs) / max(abs(lhs), 1e-300))


def shifted_sum_residual(kind: RMatrixKind, u, v, phi: Callable, alpha1: Callable, alpha2: Callable) -> float:
    """Sum alpha1(v_I) alpha2(v_II) f(v_II, v_I) Omega({v_I - c, v_II}|u) against
    Delta(v) det(alpha1(v_k) phi(u_j, v_k - c) + alpha2(v_k) phi(u_j, v_k)),
    where Omega(v|u) = Delta(v) det phi(u_j, v_k).
    """
    u = list(np.asarray(u, dtype=complex))
    v = list(np.asarray(v, dtype=complex))
    n = len(v)
    _check_partition_budget(n)
    c = kind.const

    def omega(vs):
        return delta(kind, vs) * determinant(np.array([[phi(uj, vk) for vk in vs] for uj in u]))

    lhs = 0j
    for first, second in bipartitions(n):
        a, b = _pick(v, first), _pick(v, second)
        weight = np.prod([alpha1(x) for x in a]) * np.prod([alpha2(x) for x in b])
        lhs += weight * prod_f(kind, b, a) * omega([x - c for x in a] + b)
    mat = np.array([[alpha1(vk) * phi(uj, vk - c) + alpha2(vk) * phi(uj, vk) for vk in v] for uj in u])
    rhs = delta(kind, v) * determinant(mat)
    return float(abs(lhs - rhs) / max(abs(rhs), 1e-300))
