"""Dense linear algebra on tensor products of two-dimensional site spaces.

Basis convention: site 1 is the rightmost Kronecker factor, so bit ``k-1`` of a
basis index encodes site ``k``. Bit value 0 is spin up, 1 is spin down, and the
vacuum (all spins up) is basis index 0. Operators are plain ``numpy`` arrays of
shape ``(2**N, 2**N)``; state vectors have length ``2**N``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

N_MAX_DENSE = 12
N_MAX_SECTOR = 16
LANCZOS_SEED = 20240601
DENSE_SECTOR_LIMIT = 2000

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)


class BetheKitError(Exception):
    """Base class for library errors."""


class PreconditionError(BetheKitError, ValueError):
    """An input violates a documented precondition."""


class BudgetError(PreconditionError):
    """A size limit (sites, partitions, terms) was exceeded."""


class ConvergenceError(BetheKitError, RuntimeError):
    """An iterative method failed to converge."""


def unit_matrix(a: int, b: int) -> np.ndarray:
    """Elementary 2x2 matrix E^{ab} with labels 1 (up) and 2 (down)."""
    e = np.zeros((2, 2), dtype=complex)
    e[a - 1, b - 1] = 1.0
    return e


def n_sites_of(op: np.ndarray) -> int:
    """Number of sites of a square operator or a state vector."""
    dim = op.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n or (op.ndim == 2 and op.shape[1] != dim):
        raise PreconditionError(f"dimension {op.shape} is not a power of two")
    return n


def _check_budget(n_sites: int, limit: int = N_MAX_DENSE) -> None:
    if n_sites > limit:
        raise BudgetError(f"{n_sites} sites exceeds the dense budget of {limit}")


def kron(a: np.ndarray, b: np.ndarray, n_max: int = N_MAX_DENSE) -> np.ndarray:
    """Kronecker product; ``a`` becomes the left (higher-numbered) factor."""
    _check_budget(n_sites_of(a) + n_sites_of(b), n_max)
    return np.kron(a, b)


def kron_all(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of several factors, left to right."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = kron(out, op)
    return out


def embed_operator(op: np.ndarray, sites: tuple[int, ...] | list[int], n_sites: int) -> np.ndarray:
    """Embed an operator acting on the ordered ``sites`` into the N-site space.

    ``op`` acts on ``V_{sites[0]} (x) V_{sites[1]} (x) ...`` with ``sites[0]`` as
    the left factor.
    """
    sites = list(sites)
    k = len(sites)
    if op.shape != (2**k, 2**k):
        raise PreconditionError("operator size does not match the number of sites")
    if len(set(sites)) != k or any(s < 1 or s > n_sites for s in sites):
        raise PreconditionError(f"invalid sites {sites} for a {n_sites}-site chain")
    _check_budget(n_sites)
    rest = [s for s in range(n_sites, 0, -1) if s not in sites]
    full = np.kron(op, np.eye(2 ** (n_sites - k), dtype=complex))
    order = sites + rest
    # axis position of site s in C-order reshape is n_sites - s
    perm = [order.index(s) for s in range(n_sites, 0, -1)]
    t = full.reshape((2,) * (2 * n_sites))
    t = t.transpose(perm + [n_sites + p for p in perm])
    return t.reshape(2**n_sites, 2**n_sites)


def embed_site(op2: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Single-site operator acting at ``site`` (1-based)."""
    if not 1 <= site <= n_sites:
        raise PreconditionError(f"site {site} out of range 1..{n_sites}")
    _check_budget(n_sites)
    left = np.eye(2 ** (n_sites - site), dtype=complex)
    right = np.eye(2 ** (site - 1), dtype=complex)
    return np.kron(np.kron(left, op2), right)


def permutation_matrix() -> np.ndarray:
    """4x4 swap operator on V (x) V."""
    p = np.zeros((4, 4), dtype=complex)
    for a, b in itertools.product(range(2), repeat=2):
        p[2 * a + b, 2 * b + a] = 1.0
    return p


def partial_trace(op: np.ndarray, which: str = "first", dim_first: int = 2) -> np.ndarray:
    """Trace out the first or second factor of ``V_a (x) V_b`` with ``dim V_a = dim_first``."""
    dim = op.shape[0]
    if op.shape != (dim, dim) or dim % dim_first:
        raise PreconditionError("operator does not factor as requested")
    db = dim // dim_first
    t = op.reshape(dim_first, db, dim_first, db)
    if which == "first":
        return np.einsum("ibic->bc", t)
    if which == "second":
        return np.einsum("aibi->ab", t)
    raise PreconditionError("which must be 'first' or 'second'")


def trace_site(op: np.ndarray, site: int) -> np.ndarray:
    """Partial trace over one site of an N-site operator."""
    n = n_sites_of(op)
    if not 1 <= site <= n:
        raise PreconditionError(f"site {site} out of range")
    t = op.reshape((2,) * (2 * n))
    ax = n - site
    return np.trace(t, axis1=ax, axis2=n + ax).reshape(2 ** (n - 1), 2 ** (n - 1))


def sector_indices(n_sites: int, n_down: int) -> np.ndarray:
    """Sorted basis indices with exactly ``n_down`` down spins."""
    if not 0 <= n_down <= n_sites:
        raise PreconditionError("magnon count out of range")
    idx = [sum(1 << b for b in combo) for combo in itertools.combinations(range(n_sites), n_down)]
    return np.array(sorted(idx), dtype=np.int64)


def popcount(indices: np.ndarray) -> np.ndarray:
    """Number of set bits of each integer."""
    x = np.asarray(indices, dtype=np.int64).copy()
    count = np.zeros_like(x)
    while np.any(x):
        count += x & 1
        x >>= 1
    return count


def hermitian_ground_state(op, sector: int | None = None, tol: float = 1e-10, max_iter: int = 10000):
    """Lowest eigenpair of a Hermitian operator, optionally inside an S^z sector.

    ``op`` may be a dense array or a scipy sparse matrix on the full 2^N space.
    Returns ``(energy, state)`` with the state embedded in the full space.
    """
    dim = op.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n:
        raise PreconditionError("dimension is not a power of two")
    if sector is not None and n > N_MAX_SECTOR:
        raise BudgetError(f"{n} sites exceeds the sector budget of {N_MAX_SECTOR}")
    is_sparse = sp.issparse(op)
    if sector is not None:
        idx = sector_indices(n, sector)
        sub = op[idx][:, idx]
    else:
        idx = np.arange(dim)
        sub = op
    if is_sparse:
        sub = sp.csr_matrix(sub)
        herm_err = abs(sub - sub.conj().T).max() if sub.nnz else 0.0
        scale = abs(sub).max() if sub.nnz else 1.0
    else:
        sub = np.asarray(sub)
        herm_err = np.max(np.abs(sub - sub.conj().T)) if sub.size else 0.0
        scale = np.max(np.abs(sub)) if sub.size else 1.0
    if herm_err > tol * max(scale, 1.0):
        raise PreconditionError(f"operator is not Hermitian (deviation {herm_err:.3e})")
    if sector is not None and not is_sparse:
        full = np.asarray(op)
        mask = np.ones(dim, dtype=bool)
        mask[idx] = False
        leak = np.max(np.abs(full[np.ix_(mask, idx)])) if mask.any() else 0.0
        if leak > tol * max(scale, 1.0):
            raise PreconditionError("operator does not conserve the requested sector")
    m = sub.shape[0]
    if m <= DENSE_SECTOR_LIMIT:
        dense = sub.toarray() if is_sparse else sub
        w, v = np.linalg.eigh(dense)
        energy, vec = float(w[0]), v[:, 0]
    else:
        try:
            # a symmetric start vector can be orthogonal to the ground state
            # (e.g. zero momentum when the ground state has momentum pi)
            v0 = np.random.default_rng(LANCZOS_SEED).standard_normal(m)
            w, v = spla.eigsh(sub, k=1, which="SA", tol=1e-13, maxiter=max_iter, v0=v0)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError("iterative eigensolver did not converge") from exc
        energy, vec = float(w[0]), v[:, 0]
    vec = vec / np.linalg.norm(vec)
    # fix the global phase: largest component real positive
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[k]) / vec[k])
    resid = np.linalg.norm(sub @ vec - energy * vec)
    norm_est = scale * math.sqrt(m) if m else 1.0
    if resid > 1e-9 * max(norm_est, 1.0):
        raise ConvergenceError(f"eigen-residual {resid:.3e} above tolerance")
    state = np.zeros(dim, dtype=complex)
    state[idx] = vec
    return energy, state


def determinant(m: np.ndarray) -> complex:
    """Determinant by LU with partial pivoting; exact for 1x1 and 0x0."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise PreconditionError("determinant needs a square matrix")
    if m.shape[0] == 0:
        return 1.0 + 0j
    if m.shape[0] == 1:
        return complex(m[0, 0])
    return complex(np.linalg.det(m))


def cauchy_determinant_closed(x, y) -> complex:
    """Closed form of det[1/(x_j - y_k)]."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    n = len(x)
    num = 1.0 + 0j
    for j in range(n):
        for k in range(j + 1, n):
            num *= (x[j] - x[k]) * (y[k] - y[j])
    den = np.prod(np.subtract.outer(x, y))
    return complex(num / den)
