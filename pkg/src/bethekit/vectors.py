"""Bethe vectors and operator-level checks of the algebraic Bethe ansatz.

Bethe vectors are B(u_n)...B(u_1)|0> and dual vectors <0|C(u_1)...C(u_n>, built
matrix-free from the monodromy entries. The checks in this module compare such
vectors, or dense operator products on small chains, against closed formulas:
the one-operator actions, the multiple commutation relations, the composite-model
decomposition, the coordinate form, and the zero-mode algebra of the rational chain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import detformulas as det
from .betheroots import eigenvalue
from .chain import (
    ChainSpec,
    apply_entry,
    apply_transfer,
    l_operator,
    monodromy,
    pauli_hamiltonian,
    scalar_data,
    vacuum,
)
from .rmatrix import Normalization, f, g, prod_f
from .tensoralg import (
    BetheKitError,
    BudgetError,
    PreconditionError,
    embed_site,
    unit_matrix,
)

NULL_VECTOR_RTOL = 1e-12
ZERO_MODE_SCALE = 1e6
LIMIT_POINT = 1e5
MCR_MAX_SITES = 5
MCR_MAX_OPERATORS = 5


class NullVectorError(BetheKitError):
    """The Bethe vector vanishes (within the relative threshold)."""


@dataclass
class BetheVector:
    spec: ChainSpec
    roots: np.ndarray
    state: np.ndarray
    dual: bool = False

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.state))

    def to_record(self) -> dict:
        return {
            "N": self.spec.n_sites,
            "normalization": self.spec.norm.value,
            "dual": self.dual,
            "roots": [[float(np.real(u)), float(np.imag(u))] for u in self.roots],
            "amplitudes": [[float(np.real(x)), float(np.imag(x))] for x in self.state],
        }


def _as_roots(roots) -> np.ndarray:
    return np.atleast_1d(np.asarray(roots, dtype=complex))


def apply_b_product(spec: ChainSpec, roots, psi: np.ndarray) -> np.ndarray:
    """B(u_n)...B(u_1) psi (the B operators commute)."""
    for u in _as_roots(roots):
        psi = apply_entry(spec, u, 1, 2, psi)
    return psi


def apply_c_product_left(spec: ChainSpec, roots, row: np.ndarray) -> np.ndarray:
    """row^T C(u_1)...C(u_n) as a row vector."""
    for u in _as_roots(roots)[::-1]:
        row = apply_entry(spec, u, 2, 1, row, left=True)
    return row


def build_bethe_vector(spec: ChainSpec, roots) -> BetheVector:
    """B(u_n)...B(u_1)|0>."""
    roots = _as_roots(roots)
    if len(roots) > spec.n_sites:
        raise PreconditionError("more roots than sites gives the zero vector")
    return BetheVector(spec, roots, apply_b_product(spec, roots, vacuum(spec.n_sites)))


def dual_bethe_vector(spec: ChainSpec, roots) -> BetheVector:
    """<0|C(u_1)...C(u_n) as a row vector (no complex conjugation)."""
    roots = _as_roots(roots)
    if len(roots) > spec.n_sites:
        raise PreconditionError("more roots than sites gives the zero vector")
    return BetheVector(spec, roots, apply_c_product_left(spec, roots, vacuum(spec.n_sites)), dual=True)


def sandwich(spec: ChainSpec, v, u) -> complex:
    """<0|C(v)B(u)|0> by explicit vectors."""
    return complex(dual_bethe_vector(spec, v).state @ build_bethe_vector(spec, u).state)


def b_norm_bound(spec: ChainSpec, u) -> float:
    """Upper bound prod_k ||L_k(u)||_2 on the operator norm of B(u)."""
    return float(np.prod([np.linalg.norm(l_operator(spec, u, k), 2) for k in range(1, spec.n_sites + 1)]))


def onshell_residual(spec: ChainSpec, roots, kappa=1.0, probes=None) -> float:
    """max over probe points z of ||T_kappa(z) psi - tau_kappa(z|u) psi|| / ||psi||.

    Raises ``NullVectorError`` when ||psi|| < 1e-12 prod_j ||B(u_j)||.
    """
    roots = _as_roots(roots)
    psi = build_bethe_vector(spec, roots).state
    bound = np.prod([b_norm_bound(spec, u) for u in roots]) if len(roots) else 1.0
    nrm = np.linalg.norm(psi)
    if nrm < NULL_VECTOR_RTOL * bound:
        raise NullVectorError(f"Bethe vector vanishes: norm {nrm:.3e} against bound {bound:.3e}")
    if probes is None:
        probes = (0.3137 + 0.2113j, -0.7291 + 0.4571j, 1.1173 - 0.3319j)
    worst = 0.0
    for z in probes:
        lhs = apply_transfer(spec, z, psi, kappa)
        tau = eigenvalue(spec, z, roots, kappa)
        scale = max(abs(tau), 1.0)
        worst = max(worst, np.linalg.norm(lhs - tau * psi) / (nrm * scale))
    return float(worst)


# ----------------------------------------------------------------------------
# one-operator actions


def action_residuals(spec: ChainSpec, v, roots) -> dict:
    """Residuals of the A(v) and D(v) action formulas on B(u)|0> (vector identities)."""
    kind = spec.kind
    data = scalar_data(spec)
    u = list(_as_roots(roots))
    n = len(u)
    psi = build_bethe_vector(spec, u).state
    out = {}
    for label, (i, fun) in {"A": (1, data.a), "D": (2, data.d)}.items():
        lhs = apply_entry(spec, v, i, i, psi)
        if label == "A":
            rhs = fun(v) * prod_f(kind, u, v) * psi
        else:
            rhs = fun(v) * prod_f(kind, v, u) * psi
        for k in range(n):
            rest = u[:k] + u[k + 1:]
            if label == "A":
                coef = data.a(u[k]) * g(kind, v, u[k]) * prod_f(kind, rest, u[k])
            else:
                coef = data.d(u[k]) * g(kind, u[k], v) * prod_f(kind, u[k], rest)
            rhs = rhs + coef * build_bethe_vector(spec, rest + [v]).state
        out[label] = float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), 1e-300))
    return out


def transfer_unwanted_coefficients(spec: ChainSpec, v, roots) -> np.ndarray:
    """Coefficients a(u_k) g(v,u_k) f(u_k',u_k) + d(u_k) g(u_k,v) f(u_k,u_k') of the unwanted terms."""
    kind = spec.kind
    data = scalar_data(spec)
    u = list(_as_roots(roots))
    out = []
    for k in range(len(u)):
        rest = u[:k] + u[k + 1:]
        out.append(data.a(u[k]) * g(kind, v, u[k]) * prod_f(kind, rest, u[k])
                   + data.d(u[k]) * g(kind, u[k], v) * prod_f(kind, u[k], rest))
    return np.array(out, dtype=complex)


def c_action_residual(spec: ChainSpec, v, roots) -> float:
    """C(v)B(u)|0> against the sum over partitions of {v, u} into three subsets."""
    kind = spec.kind
    data = scalar_data(spec)
    v = list(_as_roots(v))
    u = list(_as_roots(roots))
    n, m = len(v), len(u)
    if n > m:
        raise PreconditionError("need #v <= #u")
    w = v + u
    if len(w) > MCR_MAX_OPERATORS + 1:
        raise BudgetError("too many parameters")
    c = kind.const
    lhs = build_bethe_vector(spec, u).state
    for x in v[::-1]:
        lhs = apply_entry(spec, x, 2, 1, lhs)
    rhs = np.zeros_like(lhs)
    for labels in itertools.product(range(3), repeat=len(w)):
        s1 = [w[i] for i in range(len(w)) if labels[i] == 0]
        s2 = [w[i] for i in range(len(w)) if labels[i] == 1]
        s3 = [w[i] for i in range(len(w)) if labels[i] == 2]
        if len(s1) != n or len(s2) != n:
            continue
        coef = np.prod([data.d(x) for x in s1]) * np.prod([data.a(x) for x in s2])
        if coef == 0:
            continue
        coef *= det.dwpf_izergin(kind, v, [x + c for x in s1]) * det.dwpf_izergin(kind, s2, [x + c for x in v])
        coef *= prod_f(kind, s1, s2) * prod_f(kind, s1, s3) * prod_f(kind, s3, s2)
        rhs = rhs + coef * build_bethe_vector(spec, s3).state
    return float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), 1e-300))


# ----------------------------------------------------------------------------
# multiple commutation relations (dense operators)


def _op_product(spec: ChainSpec, i: int, j: int, params) -> np.ndarray:
    dim = 2**spec.n_sites
    out = np.eye(dim, dtype=complex)
    for x in params:
        out = out @ monodromy(spec, x).entry(i, j)
    return out


def mcr_residual(spec: ChainSpec, v, u, relation: str = "AB", alternative: bool = False) -> float:
    """Relative max-abs residual of a multiple commutation relation as dense matrices.

    relation: ``AB`` A(v)B(u), ``CD`` C(v)D(u), ``DB`` D(v)B(u), ``CA`` C(v)A(u).
    With #v = m, #u = n and w = {v, u} split into w_I (m) and w_II (n):

      AB, CD: (-1)^n sum K_n(u|w_II + c) f(w_II, w_I) X(w_II) Y(w_I)
      DB, CA: (-1)^n sum K_n(w_II|u + c) f(w_I, w_II) X(w_II) Y(w_I)

    The alternative coefficient is (-1)^m K_m(w_I|v + c) or (-1)^m K_m(v|w_I + c).
    """
    if spec.n_sites > MCR_MAX_SITES:
        raise BudgetError(f"operator-level checks limited to {MCR_MAX_SITES} sites")
    kind = spec.kind
    c = kind.const
    v = list(_as_roots(v))
    u = list(_as_roots(u))
    m, n = len(v), len(u)
    if m + n > MCR_MAX_OPERATORS:
        raise BudgetError(f"at most {MCR_MAX_OPERATORS} operators")
    ops = {"AB": ((1, 1), (1, 2)), "CD": ((2, 1), (2, 2)), "DB": ((2, 2), (1, 2)), "CA": ((2, 1), (1, 1))}
    if relation not in ops:
        raise PreconditionError(f"unknown relation {relation}")
    (li, lj), (ri, rj) = ops[relation]
    lhs = _op_product(spec, li, lj, v) @ _op_product(spec, ri, rj, u)
    w = v + u
    rhs = np.zeros_like(lhs)
    for first, second in det.bipartitions(m + n, m):
        w1 = [w[i] for i in first]
        w2 = [w[i] for i in second]
        if relation in ("AB", "CD"):
            if alternative:
                coef = (-1) ** m * det.dwpf_izergin(kind, w1, [x + c for x in v])
            else:
                coef = (-1) ** n * det.dwpf_izergin(kind, u, [x + c for x in w2])
            coef *= prod_f(kind, w2, w1)
        else:
            if alternative:
                coef = (-1) ** m * det.dwpf_izergin(kind, v, [x + c for x in w1])
            else:
                coef = (-1) ** n * det.dwpf_izergin(kind, w2, [x + c for x in u])
            coef *= prod_f(kind, w1, w2)
        rhs = rhs + coef * (_op_product(spec, ri, rj, w2) @ _op_product(spec, li, lj, w1))
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(lhs)), 1e-300))


# ----------------------------------------------------------------------------
# coordinate form and the special vector


def coordinate_form(spec: ChainSpec, roots) -> np.ndarray:
    """Bethe vector written with local lowering operators (homogeneous chain).

    In the (f, 1, g) normalization:
    B(u)|0> = prod_j g(u_j, xi) Sym_u prod_{k<j} f(u_j, u_k)
              sum_{j_n > ... > j_1} prod_k f(u_k, xi)^{N - j_k} sigma^-_{j_k} |0>.
    Other normalizations multiply each B(u_j) by d(u_j).
    """
    if not spec.homogeneous:
        raise PreconditionError("the coordinate form is implemented for homogeneous chains")
    roots = _as_roots(roots)
    n = len(roots)
    N = spec.n_sites
    if n > 3 or N > 8:
        raise BudgetError("coordinate form limited to n <= 3 and N <= 8")
    kind = spec.kind
    xi = spec.xi[0]
    fx = np.array([f(kind, u, xi) for u in roots])
    psi = np.zeros(2**N, dtype=complex)
    for perm in itertools.permutations(range(n)):
        uu = roots[list(perm)]
        fk = fx[list(perm)]
        weight = 1.0 + 0j
        for k, j in itertools.combinations(range(n), 2):
            weight *= f(kind, uu[j], uu[k])
        for sites in itertools.combinations(range(1, N + 1), n):
            amp = weight * np.prod([fk[k] ** (N - sites[k]) for k in range(n)])
            psi[sum(1 << (s - 1) for s in sites)] += amp
    pref = np.prod([g(kind, u, xi) for u in roots])
    norm_factor = np.prod([scalar_data(spec).d(u) for u in roots]) if spec.norm is not Normalization.FG else 1.0
    return pref * norm_factor * psi


def collinearity_residual(x: np.ndarray, y: np.ndarray) -> float:
    """1 - |<x, y>| / (||x|| ||y||); zero iff the vectors are parallel."""
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        return 1.0
    return float(abs(1 - abs(np.vdot(x, y)) / (nx * ny)))


def special_vector(n_sites: int) -> np.ndarray:
    """sum_{j=1}^N (-1)^j sigma^-_j sigma^-_{j+1} |0> with periodic sites."""
    if n_sites < 3:
        raise PreconditionError("need at least three sites")
    psi = np.zeros(2**n_sites, dtype=complex)
    for j in range(1, n_sites + 1):
        k = j % n_sites + 1
        psi[(1 << (j - 1)) | (1 << (k - 1))] += (-1) ** j
    return psi


def special_vector_check(n_sites: int, delta: float) -> tuple[float, float]:
    """(eigen-residual against the Pauli Hamiltonian, eigenvalue) of the special vector."""
    if n_sites % 2 or n_sites > 12:
        raise PreconditionError("special vector check needs even N <= 12")
    psi = special_vector(n_sites)
    ham = pauli_hamiltonian(n_sites, delta)
    hpsi = ham @ psi
    energy = np.vdot(psi, hpsi) / np.vdot(psi, psi)
    res = np.linalg.norm(hpsi - energy * psi) / np.linalg.norm(psi)
    return float(res), complex(energy)


# ----------------------------------------------------------------------------
# composite model


def _partial_spec(spec: ChainSpec, sites) -> ChainSpec:
    return spec.with_xi(tuple(spec.xi[s - 1] for s in sites))


def composite_decomposition_residual(spec: ChainSpec, split: int, roots, dual: bool = False) -> float:
    """B(u)|0> = sum a2(u_I) d1(u_II) B1(u_I) B2(u_II)|0> f(u_II, u_I) (or the dual version).

    Partial monodromy T1 acts on sites 1..split, T2 on split+1..N.
    """
    N = spec.n_sites
    if not 1 <= split <= N:
        raise PreconditionError("split must lie in 1..N")
    u = list(_as_roots(roots))
    if len(u) > 3:
        raise BudgetError("composite check limited to n <= 3")
    kind = spec.kind
    s1 = list(range(1, split + 1))
    s2 = list(range(split + 1, N + 1))
    d1 = scalar_data(_partial_spec(spec, s1))
    if s2:
        d2 = scalar_data(_partial_spec(spec, s2))
        a2, dd2 = d2.a, d2.d
    else:
        def a2(x):
            return 1.0 + 0j
        dd2 = a2
    if not dual:
        lhs = build_bethe_vector(spec, u).state
    else:
        lhs = dual_bethe_vector(spec, u).state
    rhs = np.zeros_like(lhs)
    for first, second in det.bipartitions(len(u)):
        uI = [u[i] for i in first]
        uII = [u[i] for i in second]
        if not dual:
            coef = np.prod([a2(x) for x in uI]) * np.prod([d1.d(x) for x in uII]) * prod_f(kind, uII, uI)
            vec = vacuum(N)
            for x in uII:
                vec = apply_entry(spec, x, 1, 2, vec, sites=s2) if s2 else vec * 0
            for x in uI:
                vec = apply_entry(spec, x, 1, 2, vec, sites=s1)
        else:
            coef = np.prod([d1.a(x) for x in uII]) * np.prod([dd2(x) for x in uI]) * prod_f(kind, uI, uII)
            vec = vacuum(N)
            for x in uII[::-1]:
                vec = apply_entry(spec, x, 2, 1, vec, sites=s2, left=True) if s2 else vec * 0
            for x in uI[::-1]:
                vec = apply_entry(spec, x, 2, 1, vec, sites=s1, left=True)
        rhs = rhs + coef * vec
    return float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), 1e-300))


# ----------------------------------------------------------------------------
# zero modes of the rational chain


@dataclass
class ZeroModes:
    """Zero modes T[0] = lim (u/c)(T(u) - 1) and the scalars a[0], d[0], r[0]."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    a0: complex
    d0: complex

    @property
    def r0(self) -> complex:
        return self.a0 - self.d0

    def entry(self, i: int, j: int) -> np.ndarray:
        return [[self.A, self.B], [self.C, self.D]][i - 1][j - 1]


def _require_zero_mode_chain(spec: ChainSpec) -> None:
    if spec.kind.trigonometric or spec.norm is not Normalization.FG:
        raise PreconditionError("zero modes need the rational chain in the (f, 1, g) normalization")


def _scaled(spec, u, sites):
    c = spec.kind.const
    blocks = monodromy(spec, u, sites).blocks
    dim = blocks[0][0].shape[0]
    eye = np.eye(dim, dtype=complex)
    return [[(u / c) * (blocks[i][j] - (eye if i == j else 0)) for j in range(2)] for i in range(2)]


def zero_modes(spec: ChainSpec, sites=None, scale: float = ZERO_MODE_SCALE) -> ZeroModes:
    """Zero modes of the (partial) monodromy matrix by two-point Richardson extrapolation."""
    _require_zero_mode_chain(spec)
    u = scale * abs(spec.kind.const)
    x1 = _scaled(spec, u, sites)
    x2 = _scaled(spec, 2 * u, sites)
    blocks = [[2 * x2[i][j] - x1[i][j] for j in range(2)] for i in range(2)]
    data = scalar_data(spec if sites is None else _partial_spec(spec, sorted(sites)))
    c = spec.kind.const

    def scalar_mode(fun):
        y1 = (u / c) * (fun(u) - 1)
        y2 = (2 * u / c) * (fun(2 * u) - 1)
        return complex(2 * y2 - y1)

    return ZeroModes(blocks[0][0], blocks[0][1], blocks[1][0], blocks[1][1],
                     scalar_mode(data.a), scalar_mode(data.d))


def exact_zero_modes(n_sites: int, sites=None) -> ZeroModes:
    """T^{ij}[0] = sum_k E^{ji}_k over the chosen sites, with a[0] = #sites, d[0] = 0."""
    sites = range(1, n_sites + 1) if sites is None else sites
    sites = list(sites)
    blocks = [[sum(embed_site(unit_matrix(j, i), k, n_sites) for k in sites) for j in (1, 2)] for i in (1, 2)]
    return ZeroModes(blocks[0][0], blocks[0][1], blocks[1][0], blocks[1][1], complex(len(sites)), 0j)


def zero_mode_action_residuals(spec: ChainSpec, roots, modes: ZeroModes | None = None) -> dict:
    """Relative residuals of the zero-mode actions on B(u)|0>.

    A[0] -> (a[0] - n), D[0] -> (d[0] + n), C[0] -> sum of the coefficients
    (a(u_k) f(u_k', u_k) - d(u_k) f(u_k, u_k')) B(u_k')|0>.
    """
    modes = modes or zero_modes(spec)
    kind = spec.kind
    data = scalar_data(spec)
    u = list(_as_roots(roots))
    n = len(u)
    psi = build_bethe_vector(spec, u).state
    nrm = np.linalg.norm(psi)
    out = {
        "A": float(np.linalg.norm(modes.A @ psi - (modes.a0 - n) * psi) / nrm),
        "D": float(np.linalg.norm(modes.D @ psi - (modes.d0 + n) * psi) / nrm),
    }
    rhs = np.zeros_like(psi)
    for k in range(n):
        rest = u[:k] + u[k + 1:]
        coef = data.a(u[k]) * prod_f(kind, rest, u[k]) - data.d(u[k]) * prod_f(kind, u[k], rest)
        rhs = rhs + coef * build_bethe_vector(spec, rest).state
    out["C"] = float(np.linalg.norm(modes.C @ psi - rhs) / nrm)
    return out


def zero_mode_commutator_residuals(modes: ZeroModes) -> dict:
    """[B[0], A[0]] = B[0] and [C[0], B[0]] = A[0] - D[0], relative max-abs residuals."""
    A, B, C, D = modes.A, modes.B, modes.C, modes.D
    scale = max(np.max(np.abs(B)), 1.0)
    return {
        "BA": float(np.max(np.abs(B @ A - A @ B - B)) / scale),
        "CB": float(np.max(np.abs(C @ B - B @ C - (A - D))) / scale),
    }


def infinite_root_residual(spec: ChainSpec, roots, modes: ZeroModes | None = None) -> float:
    """C[0] B[0] B(u)|0> against (r[0] - 2n) B(u)|0> for on-shell finite roots."""
    modes = modes or zero_modes(spec)
    psi = build_bethe_vector(spec, roots).state
    n = len(_as_roots(roots))
    lhs = modes.C @ (modes.B @ psi)
    return float(np.linalg.norm(lhs - (modes.r0 - 2 * n) * psi) / np.linalg.norm(psi))


def _richardson_limit(fun, w: float) -> complex:
    """lim_{x->inf} fun(x) from fun(w), fun(2w) assuming a 1/x correction."""
    return complex(2 * fun(2 * w) - fun(w))


def form_factor_limit_residuals(spec: ChainSpec, z, v_plus, u, v, w: float = LIMIT_POINT) -> dict:
    """Check the zero-mode relations between form factors of a (d = 1) rational chain.

    ``u`` and ``v`` are on-shell sets of equal size n; ``v_plus`` is on-shell with n+1 roots.
      <C(v_plus) B(z) B(u)> = -lim (w/c) <C(v_plus) A(z) B(w) B(u)>
      <C(v) C(z) B(v_plus)> = -lim (w/c) <C({v, w}) A(z) B(v_plus)>
    """
    _require_zero_mode_chain(spec)
    c = spec.kind.const
    v_plus = list(_as_roots(v_plus))
    u = list(_as_roots(u))
    v = list(_as_roots(v))
    dual_plus = dual_bethe_vector(spec, v_plus).state
    psi_u = build_bethe_vector(spec, u).state
    lhs12 = dual_plus @ apply_entry(spec, z, 1, 2, psi_u)

    def f12(x):
        return -(x / c) * (dual_plus @ apply_entry(spec, z, 1, 1, apply_entry(spec, x, 1, 2, psi_u)))

    rhs12 = _richardson_limit(f12, w * abs(c))
    psi_plus = build_bethe_vector(spec, v_plus).state
    dual_v = dual_bethe_vector(spec, v).state
    lhs21 = dual_v @ apply_entry(spec, z, 2, 1, psi_plus)

    def f21(x):
        row = dual_bethe_vector(spec, v + [x]).state
        return -(x / c) * (row @ apply_entry(spec, z, 1, 1, psi_plus))

    rhs21 = _richardson_limit(f21, w * abs(c))
    return {
        "12": float(abs(lhs12 - rhs12) / max(abs(lhs12), 1e-300)),
        "21": float(abs(lhs21 - rhs21) / max(abs(lhs21), 1e-300)),
        "values": (complex(lhs12), complex(rhs12), complex(lhs21), complex(rhs21)),
    }


def generating_functional_direct(spec: ChainSpec, split: int, v, u, beta1, beta2) -> complex:
    """<0|C(v) exp(beta1 A1[0] + beta2 D1[0]) B(u)|0> with exact partial zero modes on sites 1..split."""
    _require_zero_mode_chain(spec)
    modes = exact_zero_modes(spec.n_sites, range(1, split + 1))
    op = expm(beta1 * modes.A + beta2 * modes.D)
    return complex(dual_bethe_vector(spec, v).state @ op @ build_bethe_vector(spec, u).state)


def generating_functional_closed(spec: ChainSpec, split: int, v, u, beta1, beta2) -> complex:
    """exp(beta1 a1[0] + beta2 d1[0]) l(v)/l(u) <C(v)B(u)> with l = r of the first partial chain.

    ``v`` must solve the twisted equations with kappa = exp(beta2 - beta1) and ``u`` the
    ordinary ones.
    """
    _require_zero_mode_chain(spec)
    kind = spec.kind
    xi1 = spec.xi[:split]
    ell_v = np.prod([prod_f(kind, x, xi1) for x in _as_roots(v)])
    ell_u = np.prod([prod_f(kind, x, xi1) for x in _as_roots(u)])
    return complex(np.exp(beta1 * split) * ell_v / ell_u * sandwich(spec, v, u))


def local_mean_values(spec: ChainSpec, roots) -> np.ndarray:
    """<C(u) E^{11}_k B(u)> / <C(u) B(u)> for every site k."""
    psi = build_bethe_vector(spec, roots).state
    row = dual_bethe_vector(spec, roots).state
    norm = row @ psi
    return np.array([row @ embed_site(unit_matrix(1, 1), k, spec.n_sites) @ psi / norm
                     for k in range(1, spec.n_sites + 1)])


def special_limit_collinearity(delta: float, twist_angle: float) -> float:
    """Collinearity of the special vector with the N = 4 Bethe vector whose roots tend to +-eta/2.

    The roots solve the twisted equations at kappa = exp(i twist_angle). The vector itself
    vanishes as the twist is removed, while its direction converges to the special vector
    with an error of order twist_angle**2.
    """
    from .betheroots import four_site_closed_form
    from .chain import xxz_chain

    spec = xxz_chain(4, delta=delta)
    half = spec.kind.const / 2
    best = None
    for pair in four_site_closed_form(spec.kind.const, np.exp(1j * twist_angle)):
        if not np.all(np.isfinite(pair)):
            continue
        dist = min(abs(pair[0] - half) + abs(pair[1] + half), abs(pair[0] + half) + abs(pair[1] - half))
        if best is None or dist < best[0]:
            best = (dist, pair)
    if best is None:
        raise PreconditionError("no finite branch found")
    psi = build_bethe_vector(spec, best[1]).state
    return collinearity_residual(psi, special_vector(4))
