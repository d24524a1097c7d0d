"""T4-configuration detection, witness validation, and laminate unrolling.

For fixed mu the defining system is linear in the base point and the four
rank-one increments, and it decouples entrywise into a shared 5x5 solve.
Detection runs a multi-start Newton iteration on mu over a seed grid,
vectorized across seeds; a "not found" result is not a certificate of
absence.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import GeometryError, Mat2, rank_one_connected
from .scalar import DEFAULT_TOL, EXACT, Scalar, scalar_sqrt

MU_CAP = 1e3
SEED_GRID_1D = tuple(1 + 2 ** j / 8 for j in range(10))


@dataclass(frozen=True)
class T4Witness:
    ordering: tuple[int, int, int, int]
    p: Mat2
    c: tuple[Mat2, Mat2, Mat2, Mat2]
    mu: tuple[Scalar, Scalar, Scalar, Scalar]

    def corners(self) -> tuple[Mat2, Mat2, Mat2, Mat2, Mat2]:
        """Q_0 = P, Q_k = P + C_1 + ... + C_k (Q_4 = P when sum C_i = 0)."""
        q = [self.p]
        for ci in self.c:
            q.append(q[-1] + ci)
        return tuple(q)

    def reconstructed(self) -> tuple[Mat2, Mat2, Mat2, Mat2]:
        """The four configuration points implied by (P, C, mu)."""
        out = []
        acc = self.p
        for k in range(4):
            out.append(acc + self.c[k].scale(self.mu[k]))
            acc = acc + self.c[k]
        return tuple(out)


@dataclass(frozen=True)
class T4Report:
    eq_residual_sq: tuple[Scalar, Scalar, Scalar, Scalar]
    c_dets: tuple[Scalar, Scalar, Scalar, Scalar]
    c_sum_norm_sq: Scalar
    mu_margin: Scalar
    accepted: bool

    @property
    def max_residual(self) -> float:
        worst = max(max(self.eq_residual_sq), self.c_sum_norm_sq)
        return float(scalar_sqrt(float(worst)))


def _float_mat(m: Mat2) -> Mat2:
    return Mat2(*(float(e) for e in m.entries()))


def check_t4_witness(x, w: T4Witness, tol: Scalar = 0) -> T4Report:
    """Residual report for a candidate witness against four given matrices.

    When the witness and the inputs are in different scalar modes the whole
    comparison is performed in float.
    """
    if w.p.mode != x[0].mode:
        x = [_float_mat(m) for m in x]
        w = T4Witness(w.ordering, _float_mat(w.p),
                      tuple(_float_mat(c) for c in w.c),
                      tuple(float(m) for m in w.mu))
    recon = w.reconstructed()
    res_sq = tuple((x[i] - recon[i]).frob_sq() for i in range(4))
    dets = tuple(ci.det() for ci in w.c)
    csum = w.c[0] + w.c[1] + w.c[2] + w.c[3]
    margin = min(w.mu) - 1
    scale = max(1, max(float(xi.frob_sq()) for xi in x))
    ok = all(float(r) <= float(tol) ** 2 * scale for r in res_sq)
    ok = ok and all(abs(float(d)) <= max(float(tol), float(tol) ** 2 * scale)
                    for d in dets)
    ok = ok and float(csum.frob_sq()) <= float(tol) ** 2 * scale
    ok = ok and all(not ci.is_zero() for ci in w.c)
    ok = ok and margin > tol
    return T4Report(res_sq, dets, csum.frob_sq(), margin, ok)


def _system_matrix(mu: np.ndarray) -> np.ndarray:
    n = mu.shape[0]
    a = np.zeros((n, 5, 5))
    for k in range(4):
        a[:, k, 0] = 1.0
        a[:, k, 1:k + 1] = 1.0
        a[:, k, k + 1] = mu[:, k]
    a[:, 4, 1:5] = 1.0
    return a


def _batched_solve(mu: np.ndarray, xflat: np.ndarray, jacobian: bool = False):
    """Solve the linear system for (P, C) at each mu in the batch.

    mu: (N, 4); xflat: (4, 4) flattened input matrices.  Returns
    (P, C, dets[, jac]) with shapes (N, 4), (N, 4, 4), (N, 4)[, (N, 4, 4)].
    The Jacobian d det(C_i) / d mu_k comes from the same factorization:
    dA/dmu_k is a single entry, so the sensitivity of the solution is
    -(A^-1 e_k) outer the (k+1)-th solution row.
    """
    n = mu.shape[0]
    a = _system_matrix(mu)
    ncols = 8 if jacobian else 4
    rhs = np.zeros((n, 5, ncols))
    rhs[:, 0:4, 0:4] = xflat[None, :, :]
    if jacobian:
        rhs[:, :, 4:8] = np.eye(5, 4)[None, :, :]
    try:
        full = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError:
        bad = np.abs(np.linalg.det(a)) < 1e-12
        a[bad] = np.eye(5)
        full = np.linalg.solve(a, rhs)
        full[bad] = np.nan
    sol = full[:, :, 0:4]
    p = sol[:, 0, :]
    c = sol[:, 1:5, :]
    dets = c[:, :, 0] * c[:, :, 3] - c[:, :, 1] * c[:, :, 2]
    if not jacobian:
        return p, c, dets
    y = full[:, 1:5, 4:8]  # y[n, i, k] = (A^-1 e_k)[i+1]
    adj = np.stack([c[:, :, 3], -c[:, :, 2], -c[:, :, 1], c[:, :, 0]],
                   axis=-1)
    g = np.einsum("nie,nke->nik", adj, c)
    jac = -y * g
    return p, c, dets, jac


def _exact_solve(mu, x):
    """Entrywise 5x5 Gaussian elimination over the rationals.

    mu: four Fractions; x: four exact Mat2.  Returns (P, C_list) or None when
    the system is singular.
    """
    a = [[Fraction(0)] * 5 for _ in range(5)]
    for k in range(4):
        a[k][0] = Fraction(1)
        for j in range(1, k + 1):
            a[k][j] = Fraction(1)
        a[k][k + 1] = Fraction(mu[k])
    for j in range(1, 5):
        a[4][j] = Fraction(1)
    rhs = [[Fraction(e) for e in x[k].entries()] for k in range(4)]
    rhs.append([Fraction(0)] * 4)
    # forward elimination with partial (first nonzero) pivoting
    m = [row[:] for row in a]
    b = [row[:] for row in rhs]
    for col in range(5):
        piv = next((r for r in range(col, 5) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        b[col], b[piv] = b[piv], b[col]
        for r in range(col + 1, 5):
            f = m[r][col] / m[col][col]
            if f:
                for cc in range(col, 5):
                    m[r][cc] -= f * m[col][cc]
                for cc in range(4):
                    b[r][cc] -= f * b[col][cc]
    sol = [[Fraction(0)] * 4 for _ in range(5)]
    for r in range(4, -1, -1):
        for cc in range(4):
            acc = b[r][cc]
            for k in range(r + 1, 5):
                acc -= m[r][k] * sol[k][cc]
            sol[r][cc] = acc / m[r][r]
    p = Mat2(*sol[0])
    c = [Mat2(*sol[k]) for k in range(1, 5)]
    return p, c


def _default_seed_grid():
    return np.array(list(itertools.product(SEED_GRID_1D, repeat=4)))


def solve_t4_ordering(x, seeds=None, tol: float = 1e-9,
                      max_iter: int = 30):
    """Search for a witness for one fixed ordering of four matrices.

    Returns (witness, reason); witness is None when no seed converges or a
    precondition fails.
    """
    for i in range(4):
        for j in range(i + 1, 4):
            if x[i] == x[j]:
                return None, "points not pairwise distinct"
            if rank_one_connected(x[i], x[j], DEFAULT_TOL):
                return None, "rank-one connection present"
    if seeds is None:
        seeds = _default_seed_grid()
    xflat = np.array([[float(e) for e in xi.entries()] for xi in x])
    scale = max(1.0, float(np.abs(xflat).max()) ** 2)
    mu = np.array(seeds, dtype=float).copy()
    converged = np.zeros((0, 4))
    for _ in range(max_iter):
        if mu.shape[0] == 0:
            break
        _, _, f0, jac = _batched_solve(mu, xflat, jacobian=True)
        good = np.isfinite(f0).all(axis=1) & np.isfinite(jac).all(axis=(1, 2))
        hit = good & (np.abs(f0).max(axis=1) <= tol * scale) & \
            (mu > 1.0 + tol).all(axis=1) & (mu < MU_CAP).all(axis=1)
        if hit.any():
            converged = mu[hit]
            # polish: quadratic convergence makes a few extra steps enough
            # for the exact-rational recovery below
            for _ in range(3):
                _, _, fc, jc = _batched_solve(converged, xflat, jacobian=True)
                fine = np.isfinite(fc).all(axis=1) & \
                    np.isfinite(jc).all(axis=(1, 2)) & \
                    (np.abs(np.linalg.det(jc)) > 1e-14)
                if not fine.all():
                    break
                converged = converged + np.linalg.solve(
                    jc, -fc[:, :, None])[:, :, 0]
            break
        detj = np.abs(np.linalg.det(np.where(good[:, None, None], jac,
                                             np.eye(4)[None])))
        good &= detj > 1e-14
        delta = np.zeros_like(mu)
        if good.any():
            delta[good] = np.linalg.solve(jac[good],
                                          -f0[good][:, :, None])[:, :, 0]
        # damp large steps to keep mu in range
        norm = np.abs(delta).max(axis=1)
        factor = np.minimum(1.0, 2.0 / np.maximum(norm, 1e-30))
        mu = mu + delta * factor[:, None]
        alive = good & (mu > 1.0).all(axis=1) & (mu < MU_CAP).all(axis=1) \
            & np.isfinite(mu).all(axis=1)
        mu = mu[alive]
    if converged.shape[0] == 0:
        return None, "no converged seed"
    # deterministic pick: smallest mu vector lexicographically after rounding
    order = np.lexsort(np.round(converged, 8).T[::-1])
    best = converged[order[0]]
    witness = _build_witness(x, best, tol)
    if witness is None:
        return None, "converged seed failed validation"
    return witness, "ok"


def _build_witness(x, mu_float, tol):
    ordering = (0, 1, 2, 3)
    if all(xi.mode == EXACT for xi in x):
        for cap in (10, 100, 10 ** 3, 10 ** 4, 10 ** 6):
            mu_exact = tuple(Fraction(m).limit_denominator(cap)
                             for m in mu_float)
            sol = _exact_solve(mu_exact, x)
            if sol is None:
                continue
            p, c = sol
            w = T4Witness(ordering, p, tuple(c), mu_exact)
            if check_t4_witness(x, w, 0).accepted:
                return w
    xf = [Mat2(*(float(e) for e in xi.entries())) for xi in x]
    p, c, _ = _batched_solve(np.array([mu_float]),
                             np.array([[float(e) for e in xi.entries()]
                                       for xi in x]))
    pw = Mat2(*p[0])
    cw = tuple(Mat2(*c[0, k]) for k in range(4))
    w = T4Witness(ordering, pw, cw, tuple(float(m) for m in mu_float))
    report = check_t4_witness(xf, w, max(float(tol) ** 0.5, 1e-6))
    if report.accepted:
        return w
    return None


def cyclic_class(ordering) -> tuple:
    """Canonical representative of the cyclic rotation class of an ordering."""
    rots = [tuple(ordering[i:]) + tuple(ordering[:i]) for i in range(4)]
    return min(rots)


@dataclass(frozen=True)
class Detection:
    witnesses: tuple[T4Witness, ...]
    failures: dict

    def found(self) -> bool:
        return bool(self.witnesses)


def detect_t4(x, tol: float = 1e-9, seeds=None) -> Detection:
    """Try all 24 orderings; duplicates from cyclic rotations are retained."""
    witnesses = []
    failures = {}
    for perm in itertools.permutations(range(4)):
        ordered = [x[i] for i in perm]
        w, reason = solve_t4_ordering(ordered, seeds=seeds, tol=tol)
        if w is None:
            failures[perm] = reason
        else:
            witnesses.append(T4Witness(perm, w.p, w.c, w.mu))
    return Detection(tuple(witnesses), failures)


# --- laminate measures ---------------------------------------------------


@dataclass(frozen=True)
class DiscreteLaminate:
    atoms: tuple  # ((Mat2, weight), ...)
    barycenter: Mat2
    off_support_mass: Scalar

    def total_mass(self) -> Scalar:
        return sum(w for _, w in self.atoms)

    def mean(self) -> Mat2:
        acc = None
        for m, w in self.atoms:
            term = m.scale(w)
            acc = term if acc is None else acc + term
        return acc


def laminate_unroll(x, w: T4Witness, target_corner: int,
                    rounds: int, tol: Scalar = 0) -> DiscreteLaminate:
    """Unit mass at a corner, split backwards through the cyclic scaffold.

    Each split replaces the unique off-support atom Q_k with
    (1/mu_k) X_k + (1 - 1/mu_k) Q_{k-1}; the split direction is the rank-one
    increment C_k and the mean is preserved exactly.
    """
    if not 0 <= target_corner <= 3:
        raise GeometryError("target_corner must be in 0..3")
    if rounds < 0:
        raise GeometryError("rounds must be nonnegative")
    exact = x[0].mode == EXACT
    if tol == 0 and not exact:
        tol = DEFAULT_TOL
    report = check_t4_witness(x, w, tol)
    if not report.accepted:
        raise GeometryError("invalid T4 witness")
    one = Fraction(1) if exact else 1.0
    q = w.corners()  # Q_0..Q_4 with Q_4 == Q_0
    target = q[target_corner]
    weights = {}  # mass accumulated at each X_i
    off_atom = target
    off_mass = one
    k = target_corner if target_corner >= 1 else 4
    for _ in range(4 * rounds):
        mu_k = w.mu[k - 1]
        weights[k - 1] = weights.get(k - 1, 0 * one) + off_mass / mu_k
        off_mass = off_mass * (one - one / mu_k)
        off_atom = q[k - 1]
        k = k - 1 if k - 1 >= 1 else 4
    atoms = [(x[i], weights[i]) for i in sorted(weights)]
    atoms.append((off_atom, off_mass))
    bary = None
    for m, wt in atoms:
        term = m.scale(wt)
        bary = term if bary is None else bary + term
    if exact and bary != target:
        raise GeometryError("barycenter drifted during unrolling")
    return DiscreteLaminate(tuple(atoms), bary, off_mass)
