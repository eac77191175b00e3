"""Bethe equations: residuals, Newton solvers, twist homotopy and admissibility.

Twisted Bethe equations read r(u_j) = kappa f(u_j, u_others) / f(u_others, u_j).
The polynomial form used for continuation is Y_kappa(u_j | u) = 0 with

    Y_kappa(x | u) = (-1)^n a(x) h(u, x) + kappa d(x) h(x, u).

For homogeneous chains with |Delta| < 1 (or the rational chain with imaginary c)
the equations are also solved in real logarithmic form with (half-)integer
quantum numbers I_j:

    N p(w_j) - sum_k theta(w_j - w_k) = 2 pi I_j - s i log(kappa),

where w is the root measured from the symmetric point and s = +1 when the
constant is -i*zeta (or -i*gamma), s = -1 for the opposite orientation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .chain import ChainSpec, homogeneous_point, scalar_data
from .rmatrix import Normalization, anisotropy, f
from .tensoralg import BudgetError, ConvergenceError, PreconditionError

DISTINCT_TOL = 1e-8
INFINITY_THRESHOLD = 1e4
KAPPA_SMALL = 1e-3
KAPPA0 = 0.0  # the kappa = 0 start xi_s - const is exact and nondegenerate
FACTOR_ZERO_TOL = 1e-5
REFOLLOW_BUMPS = (0.3, -0.3, 0.6, -0.6, 1.0, -1.0)


@dataclass
class BetheRootSet:
    """A solution of the (twisted) Bethe equations."""

    roots: np.ndarray
    kappa: complex
    residual_norm: float
    admissible: bool = True
    reason: str = ""
    quantum_numbers: tuple | None = None
    rule: str | None = None
    infinite: int = 0
    history: list = field(default_factory=list, repr=False)

    @property
    def n(self) -> int:
        return len(self.roots)

    def to_record(self, spec: ChainSpec) -> dict:
        return {
            "model": spec.model,
            "N": spec.n_sites,
            "n": self.n,
            "kappa": [float(np.real(self.kappa)), float(np.imag(self.kappa))],
            "roots": [[float(np.real(u)), float(np.imag(u))] for u in self.roots],
            "residual": float(self.residual_norm),
            "admissible": bool(self.admissible),
            "reason": self.reason,
            "quantum_numbers": None if self.quantum_numbers is None else [float(x) for x in self.quantum_numbers],
            "rule": self.rule,
            "infinite_roots": self.infinite,
        }


def _require_distinct(roots) -> None:
    for a, b in itertools.combinations(roots, 2):
        if abs(a - b) < DISTINCT_TOL:
            raise PreconditionError(f"coinciding roots {a} and {b}")


def _fold_strip(spec: ChainSpec, roots: np.ndarray) -> np.ndarray:
    """Imaginary parts into (-pi/2, pi/2] for the trigonometric kind (period i*pi)."""
    if not spec.kind.trigonometric:
        return roots
    im = np.imag(roots)
    shifted = im - np.pi * np.ceil((im - np.pi / 2) / np.pi)
    return np.real(roots) + 1j * shifted


def y_components(spec: ChainSpec, roots, kappa) -> tuple[np.ndarray, np.ndarray]:
    """The two terms (-1)^n a h(u, u_j) and kappa d h(u_j, u) of Y_kappa(u_j | u)."""
    data = scalar_data(spec)
    kind = spec.kind
    roots = np.asarray(roots, dtype=complex)
    n = len(roots)
    sc = kind.sh_const
    left = np.empty(n, dtype=complex)
    right = np.empty(n, dtype=complex)
    for j, uj in enumerate(roots):
        h1 = np.prod(kind.sh(roots - uj + kind.const)) / sc**n
        h2 = np.prod(kind.sh(uj - roots + kind.const)) / sc**n
        left[j] = (-1) ** n * data.a(uj) * h1
        right[j] = kappa * data.d(uj) * h2
    return left, right


def bethe_residual(spec: ChainSpec, roots, kappa=1.0) -> np.ndarray:
    """Components Y_kappa(u_j | u); all vanish on a solution."""
    _require_distinct(roots)
    left, right = y_components(spec, roots, kappa)
    return left + right


def ratio_residual(spec: ChainSpec, roots, kappa=1.0) -> float:
    """max_j |1 - kappa f(u_j, u_j') / f(u_j', u_j) / r(u_j)| (product-form residual)."""
    _require_distinct(roots)
    data = scalar_data(spec)
    kind = spec.kind
    worst = 0.0
    for j, uj in enumerate(roots):
        rhs = kappa
        for k, uk in enumerate(roots):
            if k != j:
                rhs *= f(kind, uj, uk) / f(kind, uk, uj)
        worst = max(worst, abs(1 - rhs / data.r(uj)))
    return float(worst)


def eigenvalue(spec: ChainSpec, z, roots, kappa=1.0) -> complex:
    """Twisted transfer-matrix eigenvalue a(z) f(u, z) + kappa d(z) f(z, u)."""
    data = scalar_data(spec)
    kind = spec.kind
    fa = np.prod([f(kind, u, z) for u in roots]) if len(roots) else 1.0
    fd = np.prod([f(kind, z, u) for u in roots]) if len(roots) else 1.0
    return complex(data.a(z) * fa + kappa * data.d(z) * fd)


def bethe_energy(spec: ChainSpec, roots) -> float | complex:
    """Energy of the Pauli Hamiltonian on the Bethe state (homogeneous chains)."""
    if not spec.homogeneous:
        raise PreconditionError("energy formula needs a homogeneous chain")
    kind = spec.kind
    c = kind.const
    w = np.asarray(roots, dtype=complex) - spec.xi[0] + c / 2
    e = spec.n_sites * anisotropy(kind) + 2 * kind.sh_const**2 * np.sum(
        1.0 / (kind.sh(w - c / 2) * kind.sh(w + c / 2)))
    return complex(e)


# ----------------------------------------------------------------------------
# logarithmic form


@dataclass(frozen=True)
class _LogForm:
    trig: bool
    width: float  # zeta (trig) or gamma (rational)
    orientation: int
    n_sites: int

    def p(self, w):
        if self.trig:
            return 2 * np.arctan(np.tanh(w) / np.tan(self.width / 2))
        return 2 * np.arctan(2 * w / self.width)

    def dp(self, w):
        if self.trig:
            return 2 * np.sin(self.width) / (np.cosh(2 * w) - np.cos(self.width))
        return (4 / self.width) / (1 + (2 * w / self.width) ** 2)

    def theta(self, x):
        if self.trig:
            return 2 * np.arctan(np.tanh(x) / np.tan(self.width))
        return 2 * np.arctan(x / self.width)

    def dtheta(self, x):
        if self.trig:
            return 2 * np.sin(2 * self.width) / (np.cosh(2 * x) - np.cos(2 * self.width))
        return (2 / self.width) / (1 + (x / self.width) ** 2)

    def p_inverse(self, x):
        if self.trig:
            return np.arctanh(np.tan(x / 2) * np.tan(self.width / 2))
        return self.width / 2 * np.tan(x / 2)

    @property
    def p_range(self) -> float:
        return np.pi - self.width if self.trig else np.pi


def _log_form(spec: ChainSpec) -> _LogForm:
    if not spec.homogeneous:
        raise PreconditionError("the logarithmic form needs a homogeneous chain")
    const = spec.kind.const
    if spec.kind.trigonometric:
        if abs(np.real(const)) > 1e-14:
            raise PreconditionError("the logarithmic form needs |Delta| < 1 (purely imaginary eta)")
        zeta = -np.imag(const)
        s = 1 if zeta > 0 else -1
        zeta = abs(zeta)
        if not 0 < zeta < np.pi:
            raise PreconditionError("zeta must lie in (0, pi)")
        return _LogForm(True, zeta, s, spec.n_sites)
    if abs(np.real(const)) > 1e-14:
        raise PreconditionError("the rational logarithmic form needs purely imaginary c")
    gamma = -np.imag(const)
    return _LogForm(False, abs(gamma), 1 if gamma > 0 else -1, spec.n_sites)


def quantum_number_offset(n_sites: int, n: int) -> float:
    """Fractional part required of every I_j: (N - n + 1)/2 mod 1."""
    return ((n_sites - n + 1) / 2) % 1.0


def symmetric_quantum_numbers(n: int) -> tuple:
    """I_j = j - (n + 1)/2."""
    return tuple(j - (n + 1) / 2 for j in range(1, n + 1))


def literal_quantum_numbers(n: int) -> tuple:
    """I_j = j - (n - 1)/2, the symmetric set shifted by one."""
    return tuple(j - (n - 1) / 2 for j in range(1, n + 1))


def solve_log_form(spec: ChainSpec, quantum_numbers, kappa=1.0, max_iter: int = 200,
                   tol: float = 1e-12, steps: int = 10) -> BetheRootSet:
    """Newton solution of the logarithmic Bethe equations with continuation in the coupling."""
    lf = _log_form(spec)
    qn = np.asarray(quantum_numbers, dtype=float)
    n = len(qn)
    if n == 0:
        return BetheRootSet(np.zeros(0, complex), complex(kappa), 0.0, True, "", tuple(qn))
    if np.any(np.diff(qn) <= 0):
        raise PreconditionError("quantum numbers must be strictly increasing")
    frac = quantum_number_offset(spec.n_sites, n)
    if np.any(np.abs(((qn - frac) + 0.5) % 1.0 - 0.5) > 1e-12):
        raise PreconditionError(f"quantum numbers must be congruent to {frac} mod 1 for N={spec.n_sites}, n={n}")
    N = spec.n_sites
    target = 2 * np.pi * qn - lf.orientation * 1j * np.log(complex(kappa))
    # outer quantum numbers can exceed the bare-momentum range at zero coupling
    # (attractive regime); then the target is scaled into range and continued too
    reach = np.max(np.abs(np.real(target / N)))
    shrink = min(1.0, 0.9 * lf.p_range / reach) if reach > 0 else 1.0
    w = lf.p_inverse(shrink * target / N).astype(complex)

    def residual(w, lam):
        diff = w[:, None] - w[None, :]
        goal = (shrink + (1 - shrink) * lam) * target
        return N * lf.p(w) - lam * np.sum(lf.theta(diff), axis=1) - goal

    def jac(w, lam):
        diff = w[:, None] - w[None, :]
        dth = lf.dtheta(diff)
        np.fill_diagonal(dth, 0.0)
        jm = lam * dth
        np.fill_diagonal(jm, N * lf.dp(w) - lam * np.sum(dth, axis=1))
        return jm

    def newton(w, lam, iters):
        for _ in range(iters):
            with np.errstate(over="ignore", invalid="ignore"):
                res = residual(w, lam)
            if not np.all(np.isfinite(res)):
                return w, False
            if np.max(np.abs(res)) < tol * N:
                return w, True
            try:
                with np.errstate(over="ignore", invalid="ignore"):
                    step = np.linalg.solve(jac(w, lam), res)
            except np.linalg.LinAlgError:
                return w, False
            w = w - step
            if not np.all(np.isfinite(w)):
                return w, False
        with np.errstate(over="ignore", invalid="ignore"):
            final = residual(w, lam)
        return w, bool(np.all(np.isfinite(final)) and np.max(np.abs(final)) < tol * N)

    lam, dlam = 0.0, 1.0 / steps
    total = 0
    while lam < 1.0:
        nxt = min(1.0, lam + dlam)
        w_try, ok = newton(w.copy(), nxt, 30)
        total += 1
        if ok:
            w, lam = w_try, nxt
            dlam = min(dlam * 1.5, 0.5)
        else:
            dlam /= 2
            if dlam < 1e-6 or total > max_iter:
                raise ConvergenceError("logarithmic Bethe equations did not converge")
    w, ok = newton(w, 1.0, max_iter)
    if not ok:
        raise ConvergenceError("logarithmic Bethe equations did not converge")
    roots = w + spec.xi[0] - spec.kind.const / 2
    roots = _fold_strip(spec, roots)
    res = float(np.max(np.abs(residual(w, 1.0))))
    rs = BetheRootSet(np.asarray(roots), complex(kappa), res, quantum_numbers=tuple(qn))
    rs.admissible, rs.reason = classify_admissibility(spec, roots, kappa)
    return rs


def ground_state_roots(spec: ChainSpec, n: int | None = None, kappa=1.0) -> BetheRootSet:
    """Ground-state roots in the sector with n magnons (default N/2).

    Both the symmetric rule I_j = j - (n+1)/2 and the shifted rule I_j = j - (n-1)/2
    are tried; the solution with lower real energy is returned and ``rule`` records
    which one was used. When N is odd both sets are shifted by 1/2 to fix parity.
    """
    N = spec.n_sites
    n = N // 2 if n is None else n
    frac = quantum_number_offset(N, n)
    candidates = {"symmetric": symmetric_quantum_numbers(n), "literal": literal_quantum_numbers(n)}
    if abs(((n + 1) / 2 - frac) % 1.0) > 1e-12:
        candidates = {k + "-shifted": tuple(x + 0.5 for x in v) for k, v in candidates.items()}
        candidates["symmetric-shifted-down"] = tuple(x - 0.5 for x in symmetric_quantum_numbers(n))
    best = None
    for rule, qn in candidates.items():
        try:
            rs = solve_log_form(spec, qn, kappa)
        except ConvergenceError:
            continue
        energy = float(np.real(bethe_energy(spec, rs.roots)))
        rs.rule = rule
        rs.history.append(("energy", energy))
        if best is None or energy < best[0] - 1e-12:
            best = (energy, rs)
    if best is None:
        raise ConvergenceError("no quantum-number rule converged")
    return best[1]


def xxx_one_magnon_roots(n_sites: int, c: complex = 1j) -> np.ndarray:
    """Finite roots (|c|/2) cot(pi k / N), k = 1..N-1, of the homogeneous one-magnon problem."""
    k = np.arange(1, n_sites)
    return abs(c) / 2 / np.tan(np.pi * k / n_sites)


# ----------------------------------------------------------------------------
# polynomial form: Newton and homotopy


def _prod_and_grad(factors: np.ndarray, dfactors: np.ndarray) -> tuple[complex, complex]:
    """Product of factors and its derivative, robust to zero factors."""
    total = complex(np.prod(factors))
    grad = 0j
    for i in range(len(factors)):
        grad += dfactors[i] * np.prod(np.delete(factors, i))
    return total, complex(grad)


def _y_system(spec: ChainSpec, roots: np.ndarray, kappa):
    """Y-form residual (sh normalization), Jacobian, kappa-derivative and term scale."""
    kind = spec.kind
    sh, dsh = kind.sh, kind.dsh
    c = kind.const
    sc = kind.sh_const
    xi = np.array(spec.xi)
    n = len(roots)
    sign = (-1) ** n
    res = np.empty(n, dtype=complex)
    scale = np.empty(n)
    dk = np.empty(n, dtype=complex)
    jac = np.zeros((n, n), dtype=complex)
    for j, uj in enumerate(roots):
        a, da = _prod_and_grad(sh(uj - xi + c), dsh(uj - xi + c))
        d, dd = _prod_and_grad(sh(uj - xi), dsh(uj - xi))
        others = np.delete(np.arange(n), j)
        f1 = sh(roots[others] - uj + c) / sc
        f2 = sh(uj - roots[others] + c) / sc
        h1 = complex(np.prod(f1))
        h2 = complex(np.prod(f2))
        left = sign * a * h1
        right = kappa * d * h2
        res[j] = left + right
        scale[j] = abs(left) + abs(right) + 1e-300
        dk[j] = d * h2
        _, dh1 = _prod_and_grad(f1, -dsh(roots[others] - uj + c) / sc)
        _, dh2 = _prod_and_grad(f2, dsh(uj - roots[others] + c) / sc)
        jac[j, j] = sign * (da * h1 + a * dh1) + kappa * (dd * h2 + d * dh2)
        for pos, k in enumerate(others):
            rest1 = np.prod(np.delete(f1, pos))
            rest2 = np.prod(np.delete(f2, pos))
            jac[j, k] = sign * a * rest1 * dsh(roots[k] - uj + c) / sc \
                - kappa * d * rest2 * dsh(uj - roots[k] + c) / sc
    return res, jac, dk, scale


def newton_polish(spec: ChainSpec, roots, kappa, tol: float = 1e-12, max_iter: int = 50,
                  max_step: float | None = None) -> tuple[np.ndarray, bool, float]:
    """Newton iteration on the Y-form; returns (roots, converged, relative residual).

    Converged means a relative residual below ``tol`` or a Newton step at rounding level;
    the second test matters near kappa = 0 where both terms of Y are small.
    """
    u = np.asarray(roots, dtype=complex).copy()
    rel = np.inf
    for _ in range(max_iter):
        res, jac, _, scale = _y_system(spec, u, kappa)
        rel = float(np.max(np.abs(res) / scale))
        if rel < tol:
            return u, True, rel
        try:
            step = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError:
            return u, False, rel
        if not np.all(np.isfinite(step)):
            return u, False, rel
        if max_step is not None and np.max(np.abs(step)) > max_step:
            return u, False, rel
        u = u - step
        if np.max(np.abs(step), initial=0.0) < 1e-14 * (1 + np.max(np.abs(u), initial=0.0)):
            res, _, _, scale = _y_system(spec, u, kappa)
            return u, True, float(np.max(np.abs(res) / scale))
    res, _, _, scale = _y_system(spec, u, kappa)
    rel = float(np.max(np.abs(res) / scale))
    return u, rel < tol, rel


def solve_twisted_newton(spec: ChainSpec, start, kappa, tol: float = 1e-12) -> BetheRootSet:
    """Polish an approximate solution of the twisted equations by Newton iteration."""
    u, ok, rel = newton_polish(spec, start, kappa, tol=tol)
    if not ok:
        raise ConvergenceError(f"Newton polish failed (relative residual {rel:.2e})")
    u = _fold_strip(spec, u)
    adm, reason = classify_admissibility(spec, u, kappa)
    return BetheRootSet(u, complex(kappa), rel, adm, reason)


def kappa0_start(spec: ChainSpec, subset) -> np.ndarray:
    """Exact kappa = 0 solution u_j = xi_{s_j} - const for a subset of sites (1-based)."""
    return np.array([spec.xi[s - 1] - spec.kind.const for s in subset], dtype=complex)


def _kappa_path(kappa0, kappa1, bump):
    span = kappa1 - kappa0

    def path(s):
        return kappa0 + span * s + 1j * bump * abs(span) * s * (1 - s)

    def dpath(s):
        return span + 1j * bump * abs(span) * (1 - 2 * s)

    return path, dpath


def _follow(spec, roots, kappa0, kappa1, bump, min_step, max_step_s):
    path, dpath = _kappa_path(kappa0, kappa1, bump)
    u = roots.copy()
    s, ds = 0.0, min(0.05, max_step_s)
    infinite = 0
    budget = 4000
    while s < 1.0:
        budget -= 1
        if budget < 0:
            return u, s, infinite, False
        ds = min(ds, 1.0 - s)
        k = path(s)
        _, jac, dk, _ = _y_system(spec, u, k)
        try:
            tangent = -np.linalg.solve(jac, dk * dpath(s))
        except np.linalg.LinAlgError:
            return u, s, infinite, False
        sep = np.min([abs(a - b) for a, b in itertools.combinations(u, 2)]) if len(u) > 1 else 1.0
        sep = min(sep, 1.0 + np.max(np.abs(u)))
        if sep < 1e-6:
            # roots are colliding along this path
            return u, s, infinite, False
        move = ds * np.max(np.abs(tangent), initial=0.0)
        if move > 0.05 * sep and ds > min_step:
            # keep the predictor small compared with the root separation
            ds = max(ds * 0.04 * sep / move, min_step)
            continue
        pred = u + ds * tangent
        new, ok, _ = newton_polish(spec, pred, path(s + ds), tol=1e-12, max_iter=8, max_step=0.1 * sep)
        if ok and np.max(np.abs(new - pred), initial=0.0) > 0.02 * sep:
            ok = False
        if ok:
            u, s = new, s + ds
            ds = min(ds * 1.6, max_step_s)
            big = np.abs(u) > INFINITY_THRESHOLD
            if np.any(big):
                infinite += int(np.sum(big))
                u = u[~big]
                if len(u) == 0:
                    return u, s, infinite, True
        else:
            ds /= 2
            if ds < min_step:
                return u, s, infinite, False
    return u, 1.0, infinite, True


def solve_homotopy(spec: ChainSpec, start, kappa_target=1.0, kappa0: float = KAPPA0,
                   min_step: float = 1e-6, max_step: float = 0.05,
                   bumps=(0.0, 0.5, -0.5, 1.0, -1.0)) -> BetheRootSet:
    """Path-follow a solution of the twisted equations from kappa0 to kappa_target.

    ``start`` is an approximate solution at kappa0 (for example ``kappa0_start``).
    A straight path in kappa is tried first, then paths bent into the complex plane.
    Roots growing beyond 1e4 in modulus are declared infinite and dropped.
    """
    u0 = np.asarray(start, dtype=complex)
    _require_distinct(u0)
    u0, ok, rel = newton_polish(spec, u0, kappa0)
    if not ok or rel > 1e-10:
        raise ConvergenceError(f"start point is not a solution at kappa0 (residual {rel:.2e})")
    if abs(kappa_target - kappa0) == 0:
        adm, reason = classify_admissibility(spec, u0, kappa0)
        return BetheRootSet(_fold_strip(spec, u0), complex(kappa0), rel, adm, reason)
    last_s = 0.0
    for bump in bumps:
        u, s, infinite, ok = _follow(spec, u0, kappa0, kappa_target, bump, min_step, max_step)
        if ok:
            break
        last_s = max(last_s, s)
    else:
        path, _ = _kappa_path(kappa0, kappa_target, 0.0)
        raise ConvergenceError(f"homotopy path failed; last good kappa about {path(last_s)}")
    if len(u):
        u, _, rel = newton_polish(spec, u, kappa_target)
    else:
        rel = 0.0
    u = _fold_strip(spec, u)
    adm, reason = classify_admissibility(spec, u, kappa_target) if len(u) else (True, "")
    return BetheRootSet(u, complex(kappa_target), rel, adm, reason, infinite=infinite)


def homotopy_all(spec: ChainSpec, n: int, kappa_target=1.0, kappa0: float = KAPPA0) -> list:
    """Continue every kappa0 branch xi_s - const (subsets in lexicographic order)."""
    if math.comb(spec.n_sites, n) > 5000:
        raise BudgetError("too many branches")
    out = []
    subsets = list(itertools.combinations(range(1, spec.n_sites + 1), n))
    for subset in subsets:
        rs = solve_homotopy(spec, kappa0_start(spec, subset), kappa_target, kappa0)
        rs.history.append(("start_subset", subset))
        out.append(rs)
    # distinct starts must end at distinct solutions; coinciding ends mean a path
    # jumped near a branch point, so re-follow those along bent paths
    for bump in REFOLLOW_BUMPS:
        clash = _coinciding_ends(spec, out)
        if not clash:
            break
        for i in clash:
            try:
                rs = solve_homotopy(spec, kappa0_start(spec, subsets[i]), kappa_target, kappa0, bumps=(bump,))
            except ConvergenceError:
                continue
            rs.history.append(("start_subset", subsets[i]))
            rs.history.append(("bent_path", bump))
            out[i] = rs
    return out


def _coinciding_ends(spec: ChainSpec, sets: list) -> list[int]:
    """Indices of finite, admissible root sets that coincide with another one."""
    idx = []
    for a, b in itertools.combinations(range(len(sets)), 2):
        x, y = sets[a], sets[b]
        if x.infinite or y.infinite or len(x.roots) != len(y.roots) or not len(x.roots):
            continue
        if same_root_set(spec, x.roots, y.roots, tol=1e-6):
            idx.extend((a, b))
    return sorted(set(idx))


def four_site_closed_form(eta: complex, kappa) -> list:
    """The six solutions of the homogeneous N = 4, n = 2 twisted XXZ equations.

    With w = sh(u - eta/2) / sh(u + eta/2) and kappa = theta^-2 the system reduces
    to quadratics in w. Roots refer to the chain with xi = eta/2 (``xxz_chain``).
    Branches that run into a pole at the requested kappa come back as nan or inf.
    """
    delta = np.cosh(eta)
    theta = 1 / np.sqrt(complex(kappa))
    with np.errstate(divide="ignore", invalid="ignore"):
        return _four_site_pairs(eta, delta, theta)


def _four_site_pairs(eta, delta, theta):
    pairs = []
    for sgn in (1, -1):
        it = sgn * 1j * theta
        base = sgn * 1j * delta * theta / (1 + it)
        root = np.sqrt(-it - delta**2 * theta**2 / (1 + it) ** 2)
        pairs.append((base + root, base - root))
    for sgn in (1, -1):
        for branch in (1, -1):
            x = sgn * delta * theta / (1 + sgn * theta) + branch * np.sqrt(
                delta**2 * theta**2 / (1 + sgn * theta) ** 2 + sgn * 2 * theta)
            rt = np.sqrt(x**2 / 4 - sgn * theta)
            pairs.append((x / 2 + rt, x / 2 - rt))
    a = eta / 2
    out = []
    for w1, w2 in pairs:
        us = []
        for w in (w1, w2):
            e2u = (np.exp(a) - w * np.exp(-a)) / (np.exp(-a) - w * np.exp(a))
            us.append(0.5 * np.log(e2u))
        out.append(np.array(us, dtype=complex))
    return out


def four_site_homotopy(spec: ChainSpec, kappa_target=1.0, kappa0: float = KAPPA_SMALL) -> list:
    """Continue the six closed-form small-kappa solutions of the homogeneous N = 4 chain.

    At kappa = 0 the homogeneous chain has coinciding starting roots, so the paths
    start at ``kappa0`` from the closed-form solutions instead.
    """
    if spec.n_sites != 4 or not spec.homogeneous or not spec.kind.trigonometric:
        raise PreconditionError("closed-form starts exist for the homogeneous 4-site XXZ chain")
    if abs(spec.xi[0] - spec.kind.const / 2) > 1e-12:
        raise PreconditionError("closed-form starts assume xi = eta/2")
    return [solve_homotopy(spec, st, kappa_target, kappa0)
            for st in four_site_closed_form(spec.kind.const, kappa0)]


def same_root_set(spec: ChainSpec, x, y, tol: float = 1e-8) -> bool:
    """Whether two root lists agree up to ordering (and i*pi periodicity for trig)."""
    x = _fold_strip(spec, np.asarray(x, complex))
    y = _fold_strip(spec, np.asarray(y, complex))
    if len(x) != len(y):
        return False
    for perm in itertools.permutations(range(len(y))):
        d = x - y[list(perm)]
        if spec.kind.trigonometric:
            d = d - 1j * np.pi * np.round(np.imag(d) / np.pi)
        if np.max(np.abs(d), initial=0.0) < tol:
            return True
    return False


# ----------------------------------------------------------------------------
# admissibility


def classify_admissibility(spec: ChainSpec, roots, kappa=1.0, tol: float = FACTOR_ZERO_TOL) -> tuple[bool, str]:
    """Admissible iff roots are distinct and both sides of every polynomial equation are nonzero.

    Reasons for rejection: ``coinciding``, ``xi-pair`` (roots xi_s and xi_s - const),
    ``string`` (other patterns where both sides vanish, e.g. roots of unity anisotropy).
    A factor counts as zero when it is below ``tol`` relative to its counterpart on the
    other side; path-followed singular solutions are only approached to about 1e-6.
    """
    roots = np.asarray(roots, dtype=complex)
    for a, b in itertools.combinations(roots, 2):
        d = a - b
        if spec.kind.trigonometric:
            d = d - 1j * np.pi * np.round(np.imag(d) / np.pi)
        if abs(d) < DISTINCT_TOL:
            return False, "coinciding"
    work = spec.with_norm(Normalization.SINH)
    kind = work.kind
    sh = kind.sh
    c = kind.const
    xi = np.array(work.xi)
    vanishing = False
    for j, uj in enumerate(roots):
        lhs_f = np.abs(np.concatenate([sh(uj - xi + c), np.delete(sh(roots - uj + c), j)]))
        rhs_f = np.abs(np.concatenate([sh(uj - xi), np.delete(sh(roots - uj - c), j)]))
        # a side vanishes when one of its factors does; comparing whole products
        # would flag long chains whose many O(1) factor ratios multiply to tiny numbers
        scale = lhs_f + rhs_f
        if np.min(lhs_f / scale) < tol and (kappa == 0 or np.min(rhs_f / scale) < tol):
            vanishing = True
    if not vanishing:
        return True, ""
    for uj in roots:
        for s in xi:
            if abs(sh(uj - s)) < 1e-5:
                for uk in roots:
                    if abs(sh(uk - (s - c))) < 1e-5:
                        return False, "xi-pair"
    return False, "string"


# ----------------------------------------------------------------------------
# thermodynamic density


def density_rho(zeta: float, u):
    """Ground-state root density 1 / (2 zeta cosh(pi u / zeta))."""
    if not 0 < zeta < np.pi:
        raise PreconditionError("zeta must lie in (0, pi)")
    with np.errstate(over="ignore"):
        return 1.0 / (2 * zeta * np.cosh(np.pi * np.asarray(u) / zeta))


def bare_momentum_derivative(zeta: float, u):
    return np.sin(zeta) / np.real(np.sinh(u - 0.5j * zeta) * np.sinh(u + 0.5j * zeta))


def density_kernel(zeta: float, u):
    return np.sin(2 * zeta) / np.real(np.sinh(u - 1j * zeta) * np.sinh(u + 1j * zeta))


def density_equation_residual(zeta: float, u: float) -> float:
    """rho(u) + (1/2pi) int K(u - v) rho(v) dv - p0'(u) / 2pi, by adaptive quadrature."""
    with np.errstate(over="ignore", invalid="ignore"):
        val, _ = integrate.quad(lambda v: density_kernel(zeta, u - v) * density_rho(zeta, v),
                                -np.inf, np.inf, epsabs=1e-13, epsrel=1e-13, limit=400)
    return float(density_rho(zeta, u) + val / (2 * np.pi) - bare_momentum_derivative(zeta, u) / (2 * np.pi))
