"""Critical points of P(X) = prod (X - Z_k): the n-1 zeros of P'.

The production path runs a simultaneous Aberth-type iteration on the zeros
of S(z) = sum m_k/(z - z_k) using only product-form evaluations, so large
degrees never touch expanded coefficients.  A companion-matrix eigenvalue
oracle and the finite-support closed form provide independent routes.

Writing S = Q/R with R = prod (z - z_k) over distinct roots, the Newton
correction for Q expressed through S alone is

    1/corr_i = S'(w_i)/S(w_i) + sum_k 1/(w_i - z_k) - sum_{j != i} 1/(w_i - w_j),

i.e. Newton on the numerator with Aberth repulsion between iterates.  The
naive S/S' step is not used: S decays like n/z at infinity, so Newton on S
chases the spurious zero at infinity from any exterior start.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ContractError, ConvergenceError, ParameterError, ScopeError
from .logderiv import RootSet, as_roots

_EPS = float(np.finfo(float).eps)

#: roots closer than this (relative) are clustered into one multiple root
DUPLICATE_RTOL = 1e-14

#: companion-matrix oracle degree cap (conditioning guard)
ORACLE_MAX_N = 64

DEFAULT_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 500

_GOLDEN_ANGLE = 2.0 * np.pi * 0.6180339887498949


@dataclass(frozen=True)
class CriticalSet:
    """The n-1 critical points (repetition = multiplicity) with certificates.

    residuals[i] is |S(W_i)| * min_k |W_i - Z_k| (zero for points placed at
    repeated roots, which are detected exactly rather than solved for).
    """

    points: np.ndarray
    residuals: np.ndarray
    method: str
    near_duplicate_clusters: int = 0

    def __post_init__(self):
        pts = np.ascontiguousarray(np.atleast_1d(np.asarray(self.points, dtype=complex)))
        res = np.ascontiguousarray(np.atleast_1d(np.asarray(self.residuals, dtype=float)))
        if pts.shape != res.shape:
            raise ParameterError("points and residuals must have equal length")
        pts.setflags(write=False)
        res.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "residuals", res)

    def __len__(self):
        return len(self.points)

    def to_json(self) -> dict:
        return {"points": [[w.real, w.imag] for w in self.points],
                "residuals": [float(r) for r in self.residuals],
                "method": self.method}


@dataclass(frozen=True)
class FiniteSupportInstance:
    """P(X) = prod_i (X - z_i)^{N_i} with distinct atoms and positive counts."""

    atoms: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        atoms = np.atleast_1d(np.asarray(self.atoms, dtype=complex))
        counts = np.atleast_1d(np.asarray(self.counts, dtype=int))
        if atoms.size == 0 or atoms.shape != counts.shape:
            raise ParameterError("need equally many atoms and counts, at least one")
        if len(np.unique(atoms)) != atoms.size:
            raise ParameterError("atoms must be pairwise distinct")
        if np.any(counts < 1):
            raise ParameterError("all counts must be >= 1")
        atoms.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def expanded_roots(self) -> RootSet:
        return RootSet(np.repeat(self.atoms, self.counts))


# ---------------------------------------------------------------------------
# root clustering


def _cluster_roots(roots: np.ndarray):
    """Group near-duplicate roots (within DUPLICATE_RTOL, relative) into
    (distinct values, integer multiplicities, #nontrivial-nonexact clusters)."""
    order = np.argsort(roots)
    sorted_roots = roots[order]
    reps = [sorted_roots[0]]
    mult = [1]
    inexact = 0
    for z in sorted_roots[1:]:
        rep = reps[-1]
        tol = DUPLICATE_RTOL * (1.0 + 0.5 * (abs(rep) + abs(z)))
        if abs(z - rep) <= tol:
            mult[-1] += 1
            if z != rep:
                inexact += 1
        else:
            reps.append(z)
            mult.append(1)
    return np.asarray(reps, dtype=complex), np.asarray(mult, dtype=float), inexact


# ---------------------------------------------------------------------------
# Aberth iteration


def _field_sums(w, z, m, chunk):
    """S, S', unweighted pole sum and nearest-root distance at the points w."""
    nz = len(w)
    S = np.empty(nz, complex)
    Sp = np.empty(nz, complex)
    U = np.empty(nz, complex)
    dmin = np.empty(nz)
    for a in range(0, nz, chunk):
        D = w[a:a + chunk, None] - z[None, :]
        with np.errstate(divide="ignore"):
            R = 1.0 / D
        S[a:a + chunk] = (m * R).sum(axis=1)
        Sp[a:a + chunk] = -(m * R * R).sum(axis=1)
        U[a:a + chunk] = R.sum(axis=1)
        dmin[a:a + chunk] = np.abs(D).min(axis=1)
    return S, Sp, U, dmin


def _initial_iterates(z, m, chunk):
    """First-order zero estimates: one candidate near each distinct root
    (displacement m_k/T_k capped at half the nearest-neighbour gap), then the
    two closest candidates merge into their midpoint, leaving q-1 points."""
    q = len(z)
    T = np.empty(q, complex)
    dnear = np.empty(q)
    for a in range(0, q, chunk):
        D = z[a:a + chunk, None] - z[None, :]
        rng = np.arange(a, min(a + chunk, q))
        D[rng - a, rng] = np.inf
        with np.errstate(divide="ignore"):
            T[a:a + chunk] = (m / D).sum(axis=1)
        dnear[a:a + chunk] = np.abs(D).min(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        disp = np.where(T != 0, m / np.where(T == 0, 1.0, T), dnear / 2)
    cap = dnear / 2
    mag = np.abs(disp)
    shrink = np.where(mag > cap, cap / np.where(mag == 0, 1.0, mag), 1.0)
    cand = z - disp * shrink
    best = (np.inf, 0, 1)
    for i in range(q - 1):
        d = np.abs(cand[i] - cand[i + 1:])
        j = int(np.argmin(d))
        if d[j] < best[0]:
            best = (float(d[j]), i, i + 1 + j)
    _, i, j = best
    merged = 0.5 * (cand[i] + cand[j])
    return np.append(np.delete(cand, [i, j]), merged)


def _aberth_zeros(z, m, tol, max_sweeps, chunk):
    """Zeros of S(w) = sum m_k/(w - z_k) for distinct z_k; returns (w, residuals).

    Convergence requires small Newton corrections *and* certified residuals
    |S(w)| * dmin <= max(tol, floor) where floor = 8 eps (1+|w|) |S'(w)| dmin
    is the representable double-precision limit (an iterate cannot sit closer
    than eps(1+|w|) to the true zero, which bounds the attainable |S|).
    """
    q = len(z)
    nz = q - 1
    if nz == 0:
        return np.empty(0, complex), np.empty(0)
    w = _initial_iterates(z, m, chunk)
    idx = np.arange(nz)
    corr_small = False
    res = np.full(nz, np.inf)
    for sweep in range(max_sweeps):
        S, Sp, U, dmin = _field_sums(w, z, m, chunk)
        res = np.where(S == 0, 0.0, np.abs(S) * dmin)
        floor = 8.0 * _EPS * (1.0 + np.abs(w)) * np.abs(Sp) * dmin
        if corr_small and np.all(res <= np.maximum(tol, floor)):
            return w, res
        Rep = np.empty(nz, complex)
        for a in range(0, nz, chunk):
            D = w[a:a + chunk, None] - w[None, :]
            rng = idx[a:a + chunk]
            D[rng - a, rng] = np.inf
            with np.errstate(divide="ignore"):
                Rep[a:a + chunk] = (1.0 / D).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = 1.0 / (Sp / S + U - Rep)
        corr[S == 0] = 0.0
        bad = ~np.isfinite(corr)
        if bad.any():
            # collided iterates or an iterate sitting on a pole: nudge apart
            corr[bad] = 0.0
            w = w.copy()
            w[bad] += (1.0 + np.abs(w[bad])) * 1e-9 * np.exp(1j * _GOLDEN_ANGLE * (sweep + np.flatnonzero(bad)))
        w = w - corr
        corr_small = bool(np.max(np.abs(corr) / (1.0 + np.abs(w))) < tol)
    raise ConvergenceError(
        f"Aberth iteration did not certify after {max_sweeps} sweeps "
        f"(worst residual {res.max():.3e})", worst_residual=float(res.max()))


def critical_points(roots, tol: float = DEFAULT_TOL,
                    max_sweeps: int = DEFAULT_MAX_SWEEPS, chunk: int = 512) -> CriticalSet:
    """All n-1 critical points by the Aberth iteration on S.

    Exact (or near-exact) repeated roots are removed first and re-inserted
    as critical points of multiplicity m-1; the iteration then runs on the
    reduced simple-root set with integer weights.
    """
    rs = as_roots(roots)
    if rs.n < 2:
        raise ParameterError("critical points need at least two roots")
    if not tol > 0:
        raise ParameterError("tol must be positive")
    z, mult, inexact = _cluster_roots(rs.roots)
    repeated = np.repeat(z, (mult - 1).astype(int))
    zeros, res = _aberth_zeros(z, mult, tol, max_sweeps, chunk)
    points = np.concatenate([zeros, repeated])
    residuals = np.concatenate([res, np.zeros(len(repeated))])
    order = np.argsort(points)
    return CriticalSet(points[order], residuals[order], "aberth",
                       near_duplicate_clusters=inexact)


def _residuals_against(points: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """|S(W)| * min_k |W - Z_k| per point; zero where W sits on a root."""
    if len(points) == 0:
        return np.empty(0)
    D = points[:, None] - roots[None, :]
    dmin = np.abs(D).min(axis=1)
    on_root = dmin == 0
    D_safe = np.where(D == 0, np.inf, D)
    with np.errstate(divide="ignore"):
        S = (1.0 / D_safe).sum(axis=1)
    return np.where(on_root, 0.0, np.abs(np.where(on_root, 0.0, S)) * dmin)


# ---------------------------------------------------------------------------
# companion-matrix oracle


def _coeffs_from_roots(roots: np.ndarray) -> np.ndarray:
    """Monic expanded coefficients, highest degree first."""
    c = np.ones(1, dtype=complex)
    for z in roots:
        c = np.convolve(c, np.array([1.0, -z], dtype=complex))
    return c


#: working precision (decimal digits) for the oracle's coefficient route;
#: double precision alone leaves forward errors up to ~1e-3 near n = 64
_ORACLE_DPS = 40


def _mp_coeffs_from_roots(roots: np.ndarray):
    """Expanded coefficients by balanced product tree in extended precision
    (exact in the binary inputs up to the working precision)."""
    import mpmath as mp

    polys = [[mp.mpc(1), mp.mpc(-z)] for z in roots]
    while len(polys) > 1:
        nxt = []
        for i in range(0, len(polys) - 1, 2):
            a, b = polys[i], polys[i + 1]
            c = [mp.mpc(0)] * (len(a) + len(b) - 1)
            for ia, va in enumerate(a):
                for ib, vb in enumerate(b):
                    c[ia + ib] += va * vb
            nxt.append(c)
        if len(polys) % 2:
            nxt.append(polys[-1])
        polys = nxt
    return polys[0]


def _mp_horner(coeffs, w):
    acc = coeffs[0]
    for v in coeffs[1:]:
        acc = acc * w + v
    return acc


def _companion_eigs(coeffs: np.ndarray) -> np.ndarray:
    """Roots of a polynomial (coefficients highest-first) via its companion matrix."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / c[0]
    deg = len(c) - 1
    if deg == 0:
        return np.empty(0, dtype=complex)
    A = np.zeros((deg, deg), dtype=complex)
    if deg > 1:
        A[1:, :-1] = np.eye(deg - 1)
    A[:, -1] = -c[1:][::-1]
    return np.linalg.eigvals(A)


def critical_points_oracle(roots) -> CriticalSet:
    """Independent oracle on the coefficient route: expand P in extended
    precision, differentiate, take companion-matrix eigenvalues, then refine
    all eigenvalues together by a Durand-Kerner sweep on those coefficients.

    Everything stays in the coefficient representation (no product-form
    evaluation), so the route is independent of the Aberth solver.  The
    refinement is needed because double-precision coefficient conditioning
    near n = 64 leaves eigenvalue errors far above the 1e-6 comparison
    scale; the simultaneous (repelling) iteration, unlike per-point Newton,
    cannot collapse two eigenvalues into one basin.
    """
    import mpmath as mp

    rs = as_roots(roots)
    if rs.n < 2:
        raise ParameterError("critical points need at least two roots")
    if rs.n > ORACLE_MAX_N:
        raise ScopeError(f"oracle limited to n <= {ORACLE_MAX_N}, got {rs.n}")
    n = rs.n
    with mp.workdps(_ORACLE_DPS):
        coeffs = _mp_coeffs_from_roots(rs.roots)
        dcoeffs = [c * (n - k) for k, c in enumerate(coeffs[:-1])]
        lead = dcoeffs[0]
        starts = _companion_eigs(np.array([complex(c) for c in dcoeffs]))
        w = [mp.mpc(z) for z in starts]
        d = len(w)
        # split exactly coincident starts (multiple eigenvalues) so the
        # Weierstrass denominators stay nonzero
        for i in range(d):
            for j in range(i):
                if w[i] == w[j]:
                    w[i] += (1 + abs(w[i])) * mp.mpc(1e-6) * mp.expjpi(2 * 0.618033988749895 * i)
        tol = mp.mpf("1e-25")
        for _ in range(60):
            worst = mp.mpf(0)
            for i in range(d):
                denom = lead
                for j in range(d):
                    if j != i:
                        denom *= w[i] - w[j]
                if denom == 0:
                    continue
                step = _mp_horner(dcoeffs, w[i]) / denom
                w[i] = w[i] - step
                worst = max(worst, abs(step) / (1 + abs(w[i])))
            if worst <= tol:
                break
        pts = np.array([complex(v) for v in w])
    residuals = _residuals_against(pts, rs.roots)
    order = np.argsort(pts)
    return CriticalSet(pts[order], residuals[order], "companion")


# ---------------------------------------------------------------------------
# finite-support closed form


def finite_support_critical(inst: FiniteSupportInstance) -> CriticalSet:
    """Each atom z_i with multiplicity N_i - 1, plus the r-1 zeros of
    Q(X) = sum_i N_i prod_{j != i} (X - z_j)."""
    atoms = inst.atoms
    counts = inst.counts
    r = len(atoms)
    qcoeffs = np.zeros(r, dtype=complex)
    for i in range(r):
        others = np.delete(atoms, i)
        qcoeffs += counts[i] * _coeffs_from_roots(others)
    extra = _companion_eigs(qcoeffs) if r > 1 else np.empty(0, complex)
    repeated = np.repeat(atoms, counts - 1)
    res_extra = _residuals_against(extra, inst.expanded_roots().roots)
    points = np.concatenate([extra, repeated])
    residuals = np.concatenate([res_extra, np.zeros(len(repeated))])
    order = np.argsort(points)
    return CriticalSet(points[order], residuals[order], "finite_support")


# ---------------------------------------------------------------------------
# multiset comparison


def multiset_match_distance(a, b) -> float:
    """Largest pointwise distance under the optimal (Hungarian) pairing."""
    pa = np.atleast_1d(np.asarray(a, dtype=complex))
    pb = np.atleast_1d(np.asarray(b, dtype=complex))
    if pa.shape != pb.shape:
        raise ContractError(f"multisets differ in size: {pa.shape} vs {pb.shape}")
    if pa.size == 0:
        return 0.0
    C = np.abs(pa[:, None] - pb[None, :])
    rows, cols = linear_sum_assignment(C)
    return float(C[rows, cols].max())
