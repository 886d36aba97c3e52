"""The five desk-scale verification experiments.

Single-trajectory experiments (convergence, growth, log^- law of large
numbers) extend ONE sample path through the whole n schedule, mirroring
statements that hold along a fixed realization.  Monte Carlo experiments
(Jensen, anti-concentration) draw fresh trials keyed by (seed, trial_id),
so any execution order reproduces the same report.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import mobius as mb
from .critical import critical_points, finite_support_critical
from .errors import (ConvergenceError, NonDegeneracyError, ParameterError,
                     PoleOnContourError)
from .logderiv import Circle, circle_sup_norm, eval_S, log_minus, log_plus, pole_tolerance
from .measures import (EmpiricalMeasure, from_points, log_minus_integral,
                       reference_quantization, sliced_w1, quadrant_discrepancy)
from .report import Report
from .sampler import BaseMeasure, SeedSpec, sample

# substream purposes (never reuse a number)
_P_TRAJECTORY = 1
_P_REFERENCE = 2
_P_JENSEN_ROOTS = 3
_P_JENSEN_MOBIUS = 4
_P_ANTICONC = 5
_P_GROWTH_GEOM = 6
_P_LLN_MOBIUS = 7

_MOBIUS_ATTEMPTS = 100

EXPERIMENTS = ("convergence", "jensen", "anticoncentration", "growth", "lln")


@dataclass(frozen=True)
class ExperimentConfig:
    measure: BaseMeasure
    n_schedule: tuple
    trials: int = 1
    seed: SeedSpec = SeedSpec(0, 0)
    # tolerance knobs
    tol_solver: float = 1e-10
    m_circle: int = 4096
    directions: int = 64
    r_ball: float | None = None          # default sqrt(#probes)
    R_infty: float = 10.0
    # convergence
    k_reference: int | None = None       # default 1e5 (convergence), 1e6 (lln)
    improvement_factor: float | None = 4.0
    quadrant_max: float | None = 0.05
    # jensen
    jensen_pass_rate: float = 0.99
    jensen_slack: float = 0.05
    # anti-concentration
    probes: tuple = (2 + 0j, 3j, -2 - 2j)
    projection: tuple = (1.0, 0.0)
    slope_min: float = -1.9
    slope_max: float = -1.2
    min_hits: int = 10
    # growth
    growth_ratio_max: float = 6.0
    circle_center: complex | None = None
    circle_radius: float | None = None
    # lln
    u_transform: mb.MobiusTransform | None = None
    # accepted for the CLI surface; execution is sequential either way
    threads: int | None = None

    def __post_init__(self):
        ns = tuple(int(n) for n in self.n_schedule)
        if len(ns) == 0 or any(n < 1 for n in ns):
            raise ParameterError("n_schedule must contain positive integers")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ParameterError("n_schedule must be strictly increasing")
        object.__setattr__(self, "n_schedule", ns)
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not self.tol_solver > 0:
            raise ParameterError("tol_solver must be positive")
        if self.m_circle < 1 or self.directions < 1:
            raise ParameterError("m_circle and directions must be positive")
        probes = tuple(complex(p) for p in self.probes)
        if len(set(probes)) != len(probes):
            raise ParameterError("probes must be pairwise distinct")
        object.__setattr__(self, "probes", probes)

    def to_json(self) -> dict:
        return {
            "measure": self.measure.to_json(),
            "n_schedule": list(self.n_schedule),
            "trials": self.trials,
            "seed": self.seed.to_json(),
            "tolerances": {
                "tol_solver": self.tol_solver,
                "m_circle": self.m_circle,
                "directions": self.directions,
                "r_ball": self.r_ball,
                "R_infty": self.R_infty,
                "k_reference": self.k_reference,
                "improvement_factor": self.improvement_factor,
                "quadrant_max": self.quadrant_max,
                "jensen_pass_rate": self.jensen_pass_rate,
                "jensen_slack": self.jensen_slack,
                "probes": [[p.real, p.imag] for p in self.probes],
                "projection": list(self.projection),
                "slope_min": self.slope_min,
                "slope_max": self.slope_max,
                "min_hits": self.min_hits,
                "growth_ratio_max": self.growth_ratio_max,
                "circle_center": (None if self.circle_center is None
                                  else [self.circle_center.real, self.circle_center.imag]),
                "circle_radius": self.circle_radius,
                "u_transform": (None if self.u_transform is None
                                else self.u_transform.to_json()),
                "threads": self.threads,
            },
        }


def _escaped_mass(m: EmpiricalMeasure, radius: float) -> float:
    return float(m.weights[np.abs(m.atoms) > radius].sum())


# ---------------------------------------------------------------------------
# convergence


def run_convergence(config: ExperimentConfig) -> Report:
    """Distances between the critical-point measure and the root measure
    along one trajectory, at each n of the schedule."""
    rep = Report("convergence", config.to_json())
    t_all = time.perf_counter()
    k_ref = int(config.k_reference or 100_000)
    ref = reference_quantization(config.measure, k_ref,
                                 config.seed.substream(_P_REFERENCE))
    traj = sample(config.measure, config.seed.substream(_P_TRAJECTORY),
                  config.n_schedule[-1])
    failures = 0
    for n in config.n_schedule:
        t_n = time.perf_counter()
        roots = traj.samples[:n]
        mu_n = from_points(roots)
        try:
            cs = critical_points(roots, tol=config.tol_solver)
        except ConvergenceError as exc:
            failures += 1
            rep.add_row(n, "solver_failed", 1.0)
            rep.add_row(n, "solver_worst_residual", exc.worst_residual or math.nan)
            continue
        nu_n = from_points(cs.points)
        rep.add_row(n, "sliced_w1_nu_mu", sliced_w1(nu_n, mu_n, config.directions))
        rep.add_row(n, "sliced_w1_nu_ref", sliced_w1(nu_n, ref, config.directions))
        rep.add_row(n, "quadrant_nu_mu", quadrant_discrepancy(nu_n, mu_n))
        rep.add_row(n, "escaped_mass_nu", _escaped_mass(nu_n, config.R_infty))
        rep.add_row(n, "escaped_mass_mu", _escaped_mass(mu_n, config.R_infty))
        rep.add_row(n, "max_residual", float(cs.residuals.max(initial=0.0)))
        rep.wall_clock[f"n={n}"] = time.perf_counter() - t_n
    rep.add_verdict("all_solves_converged", failures == 0, 0, failures)
    first, last = config.n_schedule[0], config.n_schedule[-1]
    if failures == 0:
        if config.improvement_factor is not None:
            f = config.improvement_factor
            for stat in ("sliced_w1_nu_mu", "sliced_w1_nu_ref"):
                d0, d1 = rep.stat(first, stat), rep.stat(last, stat)
                rep.add_verdict(f"{stat}_improves", d1 * f <= d0, f"x{f}",
                                d0 / d1 if d1 > 0 else math.inf,
                                f"{stat}: {d0:.5g} -> {d1:.5g}")
        if config.quadrant_max is not None:
            q = rep.stat(last, "quadrant_nu_mu")
            rep.add_verdict("quadrant_final", q <= config.quadrant_max,
                            config.quadrant_max, q)
    rep.wall_clock["total"] = time.perf_counter() - t_all
    return rep


# ---------------------------------------------------------------------------
# Jensen


def _valid_jensen_transform(u, roots, crit_pts):
    """The inequality needs a = u^{-1}(0) away from zeros/poles of S and a
    compact contour C' = u^{-1}(C) clear of the poles."""
    pre = mb.preimage_unit_circle(u)
    if not pre.is_circle:
        return None
    a_pt = mb.apply(mb.inverse(u), 0j)
    if mb.is_infinity(a_pt):
        return None
    tau = pole_tolerance(a_pt)
    if np.min(np.abs(a_pt - roots)) <= tau or np.min(np.abs(a_pt - crit_pts)) <= tau:
        return None
    contour_tau = 1e-12 * (1.0 + abs(pre.center) + pre.radius)
    if np.min(np.abs(np.abs(roots - pre.center) - pre.radius)) <= contour_tau:
        return None
    return pre, a_pt


def run_jensen(config: ExperimentConfig) -> Report:
    """Per fresh trial: sampled roots, sampled transform, check
    sum log^-|u(crit)| - sum log^-|u(root)| <= log sup_{C'} |S| - log |S(a)|
    up to the sup-norm discretization slack."""
    rep = Report("jensen", config.to_json())
    t_all = time.perf_counter()
    for n in config.n_schedule:
        if n < 2:
            raise ParameterError("jensen requires n >= 2")
        t_n = time.perf_counter()
        valid = 0
        passed = 0
        skipped = 0
        normalized_ok = 0
        gaps = []
        for t in range(config.trials):
            roots = sample(config.measure,
                           config.seed.substream(_P_JENSEN_ROOTS, t), n).samples
            cs = critical_points(roots, tol=config.tol_solver)
            chosen = None
            for attempt in range(_MOBIUS_ATTEMPTS):
                u = mb.sample_mobius(
                    config.seed.substream(_P_JENSEN_MOBIUS, t * 128 + attempt))
                got = _valid_jensen_transform(u, roots, cs.points)
                if got is not None:
                    chosen = (u,) + got
                    break
            if chosen is None:
                skipped += 1
                continue
            u, pre, a_pt = chosen
            lhs = (float(np.sum(log_minus(np.abs(mb.apply_array(u, cs.points)))))
                   - float(np.sum(log_minus(np.abs(mb.apply_array(u, roots))))))
            try:
                sup = circle_sup_norm(roots, Circle(pre.center, pre.radius),
                                      config.m_circle)
            except PoleOnContourError:
                skipped += 1
                continue
            s_at_a = eval_S(roots, a_pt)
            rhs = math.log(sup) - math.log(s_at_a.magnitude)
            valid += 1
            gap = rhs - lhs
            gaps.append(gap)
            if lhs <= rhs + config.jensen_slack:
                passed += 1
            # normalized one-sided comparison of the two empirical measures
            nu_int = log_minus_integral(from_points(cs.points), u)
            mu_int = log_minus_integral(from_points(roots), u)
            if (1 - 1 / n) * nu_int <= mu_int + (rhs + config.jensen_slack) / n:
                normalized_ok += 1
        rate = passed / valid if valid else 0.0
        rep.add_row(n, "trials_valid", valid)
        rep.add_row(n, "trials_skipped", skipped)
        rep.add_row(n, "pass_rate", rate)
        rep.add_row(n, "normalized_pass_rate", normalized_ok / valid if valid else 0.0)
        if gaps:
            rep.add_row(n, "min_gap", min(gaps))
            rep.add_row(n, "mean_gap", sum(gaps) / len(gaps))
        rep.add_verdict(f"jensen_pass_rate_n{n}", rate >= config.jensen_pass_rate,
                        config.jensen_pass_rate, rate,
                        f"{passed}/{valid} valid trials within slack {config.jensen_slack}")
        rep.wall_clock[f"n={n}"] = time.perf_counter() - t_n
    rep.wall_clock["total"] = time.perf_counter() - t_all
    return rep


# ---------------------------------------------------------------------------
# anti-concentration


def _check_probes_nondegenerate(measure: BaseMeasure, probes) -> None:
    """For a finite-support measure the probe vector (1/(z_i - Z))_i is
    degenerate iff some combination sum_i a_i/(z_i - Z) + b vanishes on every
    atom, i.e. the atoms-by-(probes, 1) matrix has deficient rank."""
    if not measure.has_finite_support:
        return
    atoms, _ = measure.atoms_and_weights()
    probes = np.asarray(probes, dtype=complex)
    if np.min(np.abs(probes[:, None] - atoms[None, :])) == 0.0:
        raise ParameterError("probes must avoid the support atoms")
    M = np.concatenate([1.0 / (probes[None, :] - atoms[:, None]),
                        np.ones((len(atoms), 1), dtype=complex)], axis=1)
    if np.linalg.matrix_rank(M) < len(probes) + 1:
        raise NonDegeneracyError(
            "probe vector admits an almost-sure linear relation over the atoms; "
            "the anti-concentration bound needs a non-degenerate vector "
            "(infinite support, or more atoms than probes)")


def run_anticoncentration(config: ExperimentConfig) -> Report:
    """Concentration-function decay of (S_n(z_1), ..., S_n(z_d)).

    Each trial draws two independent sample paths and tests whether the
    projected difference a Re Delta + b Im Delta lands in the r-ball; this
    pair probability lower-bounds the concentration function sup_x P(||.||
    <= r) of the projected sums, the quantity the n^{-d/2} bound controls.
    A ball around a fixed point would be useless here: the raw sums drift
    at speed n, so that event has exponentially vanishing probability.
    """
    _check_probes_nondegenerate(config.measure, config.probes)
    rep = Report("anticoncentration", config.to_json())
    t_all = time.perf_counter()
    probes = np.asarray(config.probes, dtype=complex)
    d = len(probes)
    r_ball = config.r_ball if config.r_ball is not None else math.sqrt(d)
    aproj, bproj = (float(x) for x in config.projection)
    ns = config.n_schedule
    nmax = ns[-1]
    trials = config.trials
    hits = {n: 0 for n in ns}
    batch = max(1, (1 << 21) // nmax)
    for t0 in range(0, trials, batch):
        bn = min(batch, trials - t0)
        paths = np.empty((2, bn, nmax), dtype=complex)
        for half in range(2):
            for bi in range(bn):
                st = config.seed.substream(_P_ANTICONC, 2 * (t0 + bi) + half)
                paths[half, bi] = sample(config.measure, st, nmax).samples
        acc = np.zeros((2, bn, d))
        prev = 0
        for n in ns:
            for half in range(2):
                seg = paths[half][:, prev:n]
                for pi in range(d):
                    with np.errstate(divide="ignore", invalid="ignore"):
                        V = 1.0 / (probes[pi] - seg)
                    acc[half, :, pi] += aproj * V.real.sum(axis=1) + bproj * V.imag.sum(axis=1)
            prev = n
            delta = acc[0] - acc[1]
            norms = np.sqrt((delta * delta).sum(axis=1))
            hits[n] += int(np.count_nonzero(norms <= r_ball))
    fit_pts = []
    for n in ns:
        p = hits[n] / trials
        rep.add_row(n, "phat", p)
        rep.add_row(n, "hits", hits[n])
        rep.add_row(n, "stderr", math.sqrt(max(p * (1 - p), 0.0) / trials))
        if hits[n] >= config.min_hits:
            fit_pts.append((math.log(n), math.log(p)))
    if len(fit_pts) >= 2:
        xs = np.array([p[0] for p in fit_pts])
        ys = np.array([p[1] for p in fit_pts])
        A = np.vstack([xs, np.ones_like(xs)]).T
        slope = float(np.linalg.lstsq(A, ys, rcond=None)[0][0])
        rep.add_row(0, "slope", slope)
        rep.add_row(0, "fit_rows", len(fit_pts))
        rep.add_verdict("slope_upper", slope <= config.slope_max,
                        config.slope_max, slope)
        rep.add_verdict("slope_lower", slope >= config.slope_min,
                        config.slope_min, slope)
    else:
        rep.add_row(0, "fit_rows", len(fit_pts))
        rep.add_verdict("slope_upper", False, config.slope_max, "inconclusive",
                        f"fewer than 2 rows reached {config.min_hits} hits; raise trials")
    rep.wall_clock["total"] = time.perf_counter() - t_all
    return rep


# ---------------------------------------------------------------------------
# circle-norm growth


def run_growth(config: ExperimentConfig) -> Report:
    """log^+ of the discrete circle sup norm, against log n, along one
    trajectory on a fixed generic circle."""
    rep = Report("growth", config.to_json())
    t_all = time.perf_counter()
    if config.n_schedule[0] < 2:
        raise ParameterError("growth requires n >= 2 (ratios divide by log n)")
    if config.circle_center is not None and config.circle_radius is not None:
        a, r = complex(config.circle_center), float(config.circle_radius)
    else:
        g = config.seed.substream(_P_GROWTH_GEOM).generator()
        v = g.standard_normal(3)
        a = complex(v[0], v[1])
        r = 0.5 + abs(v[2])
    circle = Circle(a, r)
    traj = sample(config.measure, config.seed.substream(_P_TRAJECTORY),
                  config.n_schedule[-1])
    ratios = []
    for n in config.n_schedule:
        roots = traj.samples[:n]
        try:
            sup = circle_sup_norm(roots, circle, config.m_circle)
            sup2 = circle_sup_norm(roots, circle, 2 * config.m_circle)
        except PoleOnContourError:
            rep.add_row(n, "pole_on_contour", 1.0)
            continue
        ratio = log_plus(sup) / math.log(n)
        ratio2 = log_plus(sup2) / math.log(n)
        ratios.append(ratio)
        rep.add_row(n, "sup_norm", sup)
        rep.add_row(n, "ratio", ratio)
        rep.add_row(n, "ratio_refined", ratio2)
        rep.add_row(n, "refine_delta", abs(ratio2 - ratio))
    worst = max(ratios) if ratios else math.inf
    rep.add_verdict("growth_ratio", worst <= config.growth_ratio_max,
                    config.growth_ratio_max, worst,
                    f"circle C({a}, {r}), m={config.m_circle}")
    rep.wall_clock["total"] = time.perf_counter() - t_all
    return rep


# ---------------------------------------------------------------------------
# law of large numbers for the log^- integral


def run_lln_logminus(config: ExperimentConfig) -> Report:
    """int log^-|u| d mu_n along one trajectory against a large-sample
    reference quantization of the base measure."""
    rep = Report("lln", config.to_json())
    t_all = time.perf_counter()
    k_ref = int(config.k_reference or 1_000_000)
    traj = sample(config.measure, config.seed.substream(_P_TRAJECTORY),
                  config.n_schedule[-1])
    ref = reference_quantization(config.measure, k_ref,
                                 config.seed.substream(_P_REFERENCE))
    resamples = 0
    u = config.u_transform
    values = ref_vals = None
    for attempt in range(_MOBIUS_ATTEMPTS):
        if config.u_transform is None:
            u = mb.sample_mobius(config.seed.substream(_P_LLN_MOBIUS, attempt))
        ref_vals = log_minus(np.abs(mb.apply_array(u, ref.atoms)))
        values = [log_minus_integral(from_points(traj.samples[:n]), u)
                  for n in config.n_schedule]
        finite = (all(math.isfinite(v) for v in values)
                  and bool(np.all(np.isfinite(ref_vals))))
        if finite or config.u_transform is not None:
            break  # a fixed transform cannot be resampled; report as-is
        resamples += 1
    rep.add_row(0, "u_resamples", resamples)
    for n, v in zip(config.n_schedule, values):
        rep.add_row(n, "log_minus_mu_n", v)
    ref_value = float(np.dot(ref.weights, ref_vals))
    sigma = float(ref_vals.std())
    n_final = config.n_schedule[-1]
    # the 1e-12 floor keeps zero-variance cases from failing on one ulp
    threshold = 3.0 * sigma * math.sqrt(1.0 / n_final + 1.0 / k_ref) + 1e-12
    diff = abs(values[-1] - ref_value)
    rep.add_row(0, "reference_value", ref_value)
    rep.add_row(0, "reference_sigma", sigma)
    rep.add_row(0, "abs_diff_final", diff)
    rep.add_row(0, "threshold", threshold)
    rep.add_verdict("lln_final_diff", bool(diff <= threshold), threshold, diff,
                    f"3 sigma sqrt(1/n + 1/k), sigma from the k={k_ref} reference sample")
    rep.wall_clock["total"] = time.perf_counter() - t_all
    return rep


RUNNERS = {
    "convergence": run_convergence,
    "jensen": run_jensen,
    "anticoncentration": run_anticoncentration,
    "growth": run_growth,
    "lln": run_lln_logminus,
}


def run_experiment(name: str, config: ExperimentConfig) -> Report:
    if name not in RUNNERS:
        raise ParameterError(f"unknown experiment {name!r}; expected one of {sorted(RUNNERS)}")
    return RUNNERS[name](config)
