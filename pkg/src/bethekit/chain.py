"""Monodromy matrices, transfer matrices, vacuum eigenvalues and Hamiltonians.

The L-operator at site k is ``R_{0k}(u, xi_k)`` with the auxiliary space as the left
factor, and the monodromy matrix is ``T(u) = L_N(u) ... L_1(u)``. Its auxiliary
blocks are A = T^{11}, B = T^{12}, C = T^{21}, D = T^{22}.

Inhomogeneities ``xi`` are stored as the second argument of the R-matrix. The
homogeneous chain whose spectral parameter matches the usual symmetric convention
sits at ``xi = c/2`` (rational) or ``xi = eta/2`` (trigonometric); the helpers
``xxx_chain`` and ``xxz_chain`` place the inhomogeneities there plus optional offsets.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .rmatrix import (
    Normalization,
    RMatrixKind,
    anisotropy,
    eta_from_delta,
    f,
    r_matrix,
    rational,
    trigonometric,
)
from .tensoralg import (
    N_MAX_DENSE,
    N_MAX_SECTOR,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    BudgetError,
    PreconditionError,
    embed_operator,
)

DERIVATIVE_STEP = 1e-6


@dataclass(frozen=True)
class ChainSpec:
    """An inhomogeneous spin-1/2 chain."""

    kind: RMatrixKind
    norm: Normalization
    xi: tuple
    model: str = ""

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(complex(x) for x in self.xi))
        object.__setattr__(self, "norm", Normalization(self.norm))
        if not self.xi:
            raise PreconditionError("a chain needs at least one site")
        if not self.model:
            object.__setattr__(self, "model", "xxz" if self.kind.trigonometric else "xxx")

    @property
    def n_sites(self) -> int:
        return len(self.xi)

    @property
    def homogeneous(self) -> bool:
        return all(abs(x - self.xi[0]) < 1e-14 for x in self.xi)

    def with_norm(self, norm: Normalization) -> "ChainSpec":
        return replace(self, norm=Normalization(norm))

    def with_xi(self, xi) -> "ChainSpec":
        return replace(self, xi=tuple(xi))


def homogeneous_point(kind: RMatrixKind) -> complex:
    """Inhomogeneity value of the homogeneous chain (c/2 or eta/2)."""
    return kind.const / 2


def xxx_chain(n_sites: int, c: complex = 1j, norm=Normalization.FG, offsets=None) -> ChainSpec:
    """Rational chain with xi_k = c/2 + offsets_k."""
    kind = rational(c)
    off = np.zeros(n_sites) if offsets is None else np.asarray(offsets, dtype=complex)
    if len(off) != n_sites:
        raise PreconditionError("offsets length must equal the number of sites")
    return ChainSpec(kind, norm, tuple(homogeneous_point(kind) + off), "xxx")


def xxz_chain(n_sites: int, delta: float | None = None, eta: complex | None = None,
              norm=Normalization.SINH, offsets=None) -> ChainSpec:
    """Trigonometric chain with xi_k = eta/2 + offsets_k and cosh(eta) = delta."""
    if (delta is None) == (eta is None):
        raise PreconditionError("give exactly one of delta or eta")
    kind = trigonometric(eta_from_delta(delta) if eta is None else eta)
    off = np.zeros(n_sites) if offsets is None else np.asarray(offsets, dtype=complex)
    if len(off) != n_sites:
        raise PreconditionError("offsets length must equal the number of sites")
    return ChainSpec(kind, norm, tuple(homogeneous_point(kind) + off), "xxz")


def check_xi_separation(spec: ChainSpec, tol: float = 1e-9) -> None:
    """Require sh(xi_j - xi_k +- const) != 0 for all pairs."""
    kind = spec.kind
    for j, xj in enumerate(spec.xi):
        for k, xk in enumerate(spec.xi):
            if j == k:
                continue
            for s in (1, -1):
                if abs(kind.sh(xj - xk + s * kind.const)) < tol:
                    raise PreconditionError(f"inhomogeneities {j + 1} and {k + 1} differ by the R-matrix constant")


def l_operator(spec: ChainSpec, u, site: int) -> np.ndarray:
    """4x4 L-operator R_{0k}(u, xi_k), auxiliary space as the left factor."""
    return r_matrix(spec.kind, spec.norm, u, spec.xi[site - 1])


def l_blocks(l4: np.ndarray) -> list[list[np.ndarray]]:
    """Auxiliary 2x2 block structure of a 4x4 L-operator."""
    return [[l4[2 * i:2 * i + 2, 2 * j:2 * j + 2] for j in range(2)] for i in range(2)]


@dataclass
class MonodromyBlocks:
    """Auxiliary blocks of the monodromy matrix at one spectral parameter."""

    u: complex
    blocks: list = field(repr=False)

    def entry(self, i: int, j: int) -> np.ndarray:
        """T^{ij} with 1-based labels."""
        return self.blocks[i - 1][j - 1]

    @property
    def A(self):
        return self.blocks[0][0]

    @property
    def B(self):
        return self.blocks[0][1]

    @property
    def C(self):
        return self.blocks[1][0]

    @property
    def D(self):
        return self.blocks[1][1]

    def full(self) -> np.ndarray:
        """Monodromy matrix on V_aux (x) chain, auxiliary space on the left."""
        return np.block(self.blocks)


def _site_set(spec: ChainSpec, sites) -> set:
    if sites is None:
        return set(range(1, spec.n_sites + 1))
    sites = set(sites)
    if not sites <= set(range(1, spec.n_sites + 1)):
        raise PreconditionError("site subset out of range")
    return sites


def monodromy(spec: ChainSpec, u, sites: Sequence[int] | None = None) -> MonodromyBlocks:
    """Dense monodromy blocks on the full chain space.

    With ``sites`` given, only those sites carry L-operators (a partial monodromy
    matrix); the others act as the identity.
    """
    n = spec.n_sites
    if n > N_MAX_DENSE:
        raise BudgetError(f"dense monodromy limited to {N_MAX_DENSE} sites")
    active = _site_set(spec, sites)
    eye2 = np.eye(2, dtype=complex)
    blocks = [[np.eye(1, dtype=complex), np.zeros((1, 1), complex)],
              [np.zeros((1, 1), complex), np.eye(1, dtype=complex)]]
    for k in range(1, n + 1):
        if k in active:
            lb = l_blocks(l_operator(spec, u, k))
            blocks = [[sum(np.kron(lb[i][m], blocks[m][j]) for m in range(2)) for j in range(2)]
                      for i in range(2)]
        else:
            blocks = [[np.kron(eye2, blocks[i][j]) for j in range(2)] for i in range(2)]
    return MonodromyBlocks(complex(u), blocks)


def transfer_matrix(spec: ChainSpec, u, kappa: complex = 1.0) -> np.ndarray:
    """Twisted transfer matrix A(u) + kappa D(u)."""
    m = monodromy(spec, u)
    return m.A + kappa * m.D


def _apply_l(state: np.ndarray, l4: np.ndarray, site: int, n: int, left: bool) -> np.ndarray:
    l = l4.reshape(2, 2, 2, 2)  # (aux_out, site_out, aux_in, site_in)
    ax = 1 + n - site
    if not left:
        out = np.tensordot(l, state, axes=([2, 3], [0, ax]))
        return np.moveaxis(out, 1, ax)
    out = np.tensordot(state, l, axes=([0, ax], [0, 1]))
    out = np.moveaxis(out, -2, 0)
    return np.moveaxis(out, -1, ax)


def apply_entry(spec: ChainSpec, u, i: int, j: int, psi: np.ndarray,
                sites: Sequence[int] | None = None, left: bool = False) -> np.ndarray:
    """Matrix-free T^{ij}(u) psi, or psi^T T^{ij}(u) when ``left`` is true."""
    n = spec.n_sites
    if n > N_MAX_SECTOR:
        raise BudgetError(f"matrix-free monodromy limited to {N_MAX_SECTOR} sites")
    active = sorted(_site_set(spec, sites))
    state = np.zeros((2,) + (2,) * n, dtype=complex)
    start, stop = (i, j) if left else (j, i)
    state[start - 1] = np.asarray(psi, dtype=complex).reshape((2,) * n)
    order = active[::-1] if left else active
    for k in order:
        state = _apply_l(state, l_operator(spec, u, k), k, n, left)
    return state[stop - 1].reshape(-1)


def apply_transfer(spec: ChainSpec, u, psi: np.ndarray, kappa: complex = 1.0) -> np.ndarray:
    """Matrix-free (A(u) + kappa D(u)) psi."""
    return apply_entry(spec, u, 1, 1, psi) + kappa * apply_entry(spec, u, 2, 2, psi)


def vacuum(n_sites: int) -> np.ndarray:
    v = np.zeros(2**n_sites, dtype=complex)
    v[0] = 1.0
    return v


@dataclass(frozen=True)
class ScalarData:
    """Vacuum eigenvalues a(u), d(u) and derived r(u) = a/d, (log r)'."""

    kind: RMatrixKind
    a: Callable
    d: Callable
    dlog_r: Callable

    def r(self, u) -> complex:
        return self.a(u) / self.d(u)


def scalar_data(spec: ChainSpec) -> ScalarData:
    """Closed-form a(u), d(u) consistent with the vacuum action of ``monodromy``."""
    kind = spec.kind
    xi = np.array(spec.xi)
    c = kind.const
    norm = spec.norm

    if norm is Normalization.FG:
        def a(u):
            return complex(np.prod([f(kind, u, x) for x in xi]))

        def d(u):
            return 1.0 + 0j
    elif norm is Normalization.SINH:
        def a(u):
            return complex(np.prod(kind.sh(u - xi + c)))

        def d(u):
            return complex(np.prod(kind.sh(u - xi)))
    else:
        def a(u):
            return 1.0 + 0j

        def d(u):
            return complex(np.prod(kind.sh(u - xi) / kind.sh(u - xi + c)))

    def dlog_r(u):
        return complex(np.sum(kind.dlog_sh(u - xi + c) - kind.dlog_sh(u - xi)))

    return ScalarData(kind, a, d, dlog_r)


def generalized_scalar_data(kind: RMatrixKind, r: Callable, dlog_r: Callable | None = None,
                            step: float = 1e-6) -> ScalarData:
    """Scalar data of a generalized model specified only by r(u) (with d = 1)."""
    if dlog_r is None:
        def dlog_r(u):
            return (np.log(r(u + step) / r(u - step))) / (2 * step)
    return ScalarData(kind, r, lambda u: 1.0 + 0j, dlog_r)


def pauli_hamiltonian(n_sites: int, delta: float) -> np.ndarray:
    """Dense periodic sum of (sx sx + sy sy + delta sz sz) over nearest neighbours."""
    if n_sites < 2:
        raise PreconditionError("the Hamiltonian needs at least two sites")
    if n_sites > N_MAX_DENSE:
        raise BudgetError(f"{n_sites} sites exceeds the dense budget of {N_MAX_DENSE}")
    bond = np.kron(SIGMA_X, SIGMA_X) + np.kron(SIGMA_Y, SIGMA_Y) + delta * np.kron(SIGMA_Z, SIGMA_Z)
    h = np.zeros((2**n_sites, 2**n_sites), dtype=complex)
    for k in range(1, n_sites + 1):
        k1 = k % n_sites + 1
        h += embed_operator(bond, (k1, k), n_sites)
    return h


def pauli_hamiltonian_sparse(n_sites: int, delta: float) -> sp.csr_matrix:
    """Sparse real version of ``pauli_hamiltonian`` on the full space."""
    if not 2 <= n_sites <= N_MAX_SECTOR:
        raise BudgetError(f"sparse Hamiltonian needs 2..{N_MAX_SECTOR} sites")
    dim = 2**n_sites
    states = np.arange(dim, dtype=np.int64)
    diag = np.zeros(dim)
    rows, cols, vals = [], [], []
    for k in range(n_sites):
        k1 = (k + 1) % n_sites
        bk = (states >> k) & 1
        bk1 = (states >> k1) & 1
        diag += delta * np.where(bk == bk1, 1.0, -1.0)
        anti = bk != bk1
        src = states[anti]
        rows.append(src ^ ((1 << k) | (1 << k1)))
        cols.append(src)
        vals.append(np.full(src.size, 2.0))
    rows.append(states)
    cols.append(states)
    vals.append(diag)
    mat = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                        shape=(dim, dim))
    return mat.tocsr()


def trace_identity_hamiltonian(spec: ChainSpec, step: float | None = None) -> np.ndarray:
    """Hamiltonian from the logarithmic derivative of the transfer matrix.

    Evaluated with the sh-normalized R-matrix at the homogeneous point xi_0:
    H = 2 sh(c) T'(xi_0) T(xi_0)^{-1} - N Delta, derivative by central difference.
    """
    if not spec.homogeneous:
        raise PreconditionError("the trace identity needs a homogeneous chain")
    work = spec.with_norm(Normalization.SINH)
    kind = spec.kind
    x0 = spec.xi[0]
    hstep = DERIVATIVE_STEP * abs(kind.const) if step is None else step
    t0 = transfer_matrix(work, x0)
    dt = (transfer_matrix(work, x0 + hstep) - transfer_matrix(work, x0 - hstep)) / (2 * hstep)
    n = spec.n_sites
    ham = 2 * kind.sh_const * np.linalg.solve(t0.T, dt.T).T
    return ham - n * anisotropy(kind) * np.eye(2**n)


def hamiltonian(spec: ChainSpec) -> tuple[np.ndarray, np.ndarray]:
    """(Pauli construction, trace-identity construction) of the chain Hamiltonian."""
    if not spec.homogeneous:
        raise PreconditionError("hamiltonian needs a homogeneous chain")
    return pauli_hamiltonian(spec.n_sites, anisotropy(spec.kind)), trace_identity_hamiltonian(spec)


def rtt_residual(spec: ChainSpec, u, v, kappa: tuple = (1.0, 1.0)) -> float:
    """Max-abs of R12(u,v) T1(u) T2(v) - T2(v) T1(u) R12(u,v).

    ``kappa`` multiplies the monodromy matrix by diag(kappa1, kappa2) to test twist invariance.
    """
    tw = np.diag(np.asarray(kappa, dtype=complex))
    mu = monodromy(spec, u).blocks
    mv = monodromy(spec, v).blocks
    tu = [[tw[i, i] * mu[i][j] for j in range(2)] for i in range(2)]
    tv = [[tw[i, i] * mv[i][j] for j in range(2)] for i in range(2)]
    r = r_matrix(spec.kind, spec.norm, u, v).reshape(2, 2, 2, 2)
    worst = 0.0
    for i in range(2):
        for k in range(2):
            for j in range(2):
                for l in range(2):
                    lhs = sum(r[i, k, a, b] * (tu[a][j] @ tv[b][l]) for a in range(2) for b in range(2))
                    rhs = sum((tv[k][b] @ tu[i][a]) * r[a, b, j, l] for a in range(2) for b in range(2))
                    worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
