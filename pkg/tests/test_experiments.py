import math

import numpy as np
import pytest

from critpoint import mobius as mb
from critpoint.critical import critical_points, finite_support_critical, FiniteSupportInstance
from critpoint.errors import NonDegeneracyError, ParameterError
from critpoint.experiments import (ExperimentConfig, run_anticoncentration,
                                   run_convergence, run_experiment,
                                   run_growth, run_jensen, run_lln_logminus)
from critpoint.logderiv import Circle, circle_sup_norm, eval_S
from critpoint.measures import from_points, log_minus_integral
from critpoint.sampler import BaseMeasure, SeedSpec, multinomial_counts, sample


CIRCLE = BaseMeasure.uniform_circle()


def test_config_validation():
    with pytest.raises(ParameterError):
        ExperimentConfig(measure=CIRCLE, n_schedule=(8, 8))
    with pytest.raises(ParameterError):
        ExperimentConfig(measure=CIRCLE, n_schedule=())
    with pytest.raises(ParameterError):
        ExperimentConfig(measure=CIRCLE, n_schedule=(4,), trials=0)
    with pytest.raises(ParameterError):
        ExperimentConfig(measure=CIRCLE, n_schedule=(4,), probes=(1j, 1j))
    with pytest.raises(ParameterError):
        run_experiment("bogus", ExperimentConfig(measure=CIRCLE, n_schedule=(4,)))


def test_convergence_finite_support_cross_method():
    # on a finite-support trajectory the general solver must agree with the
    # closed form at every n of the schedule
    m = BaseMeasure.finite_support([1.0, -1.0], [0.5, 0.5])
    seed = SeedSpec(3, 3)
    cfg = ExperimentConfig(measure=m, n_schedule=(2, 4), seed=seed,
                           k_reference=64, improvement_factor=None, quadrant_max=None)
    rep = run_convergence(cfg)
    assert rep.stats("solver_failed") == {}
    from critpoint.experiments import _P_TRAJECTORY
    traj = sample(m, seed.substream(_P_TRAJECTORY), 4)
    for n in (2, 4):
        roots = traj.samples[:n]
        counts = [int(np.sum(roots == 1.0)), int(np.sum(roots == -1.0))]
        atoms = [a for a, c in zip([1.0, -1.0], counts) if c > 0]
        kept = [c for c in counts if c > 0]
        closed = finite_support_critical(
            FiniteSupportInstance(np.array(atoms), np.array(kept)))
        solved = critical_points(roots)
        assert np.allclose(np.sort_complex(closed.points),
                           np.sort_complex(solved.points), atol=1e-8)


def test_convergence_single_atom_all_distances_zero():
    m = BaseMeasure.finite_support([0.5 + 0.5j], [1.0])
    cfg = ExperimentConfig(measure=m, n_schedule=(2, 8, 32), seed=SeedSpec(1, 1),
                           k_reference=16)
    rep = run_convergence(cfg)
    for n in (2, 8, 32):
        assert rep.stat(n, "sliced_w1_nu_mu") == 0.0
        assert rep.stat(n, "sliced_w1_nu_ref") == 0.0
        # weights 1/(n-1) are not exactly representable, so quadrant masses
        # can differ from 1 by one ulp; "identically zero" up to that
        assert rep.stat(n, "quadrant_nu_mu") <= 1e-12
    assert rep.passed


def test_convergence_report_shape():
    cfg = ExperimentConfig(measure=CIRCLE, n_schedule=(8, 16), seed=SeedSpec(9, 0),
                           k_reference=500, improvement_factor=None, quadrant_max=None)
    rep = run_convergence(cfg)
    for stat in ("sliced_w1_nu_mu", "sliced_w1_nu_ref", "quadrant_nu_mu",
                 "escaped_mass_nu", "escaped_mass_mu", "max_residual"):
        assert set(rep.stats(stat)) == {8, 16}
    assert any(v.name == "all_solves_converged" and v.passed for v in rep.verdicts)


def test_jensen_trivial_roots_transform():
    # roots {1,-1} with u(z) = z - 0.5: zero left side, nonnegative right side
    roots = np.array([1.0, -1.0], dtype=complex)
    u = mb.affine(1.0, -0.5)
    cs = critical_points(roots)
    from critpoint.logderiv import log_minus
    lhs = (float(np.sum(log_minus(np.abs(mb.apply_array(u, cs.points)))))
           - float(np.sum(log_minus(np.abs(mb.apply_array(u, roots))))))
    assert lhs == pytest.approx(0.0, abs=1e-12)
    s_a = eval_S(roots, 0.5)
    assert abs(s_a.value) == pytest.approx(4 / 3)
    sup = circle_sup_norm(roots, Circle(0.5, 1.0), 4096)
    rhs = math.log(sup) - math.log(abs(s_a.value))
    assert lhs <= rhs


def test_jensen_run_and_normalized_echo():
    cfg = ExperimentConfig(measure=BaseMeasure.uniform_disk(), n_schedule=(8,),
                           trials=50, seed=SeedSpec(21, 0), m_circle=512)
    rep = run_jensen(cfg)
    assert rep.stat(8, "trials_valid") >= 45
    assert rep.stat(8, "pass_rate") >= 0.98
    assert rep.stat(8, "normalized_pass_rate") == rep.stat(8, "pass_rate")
    assert rep.stat(8, "min_gap") > -cfg.jensen_slack


def test_anticoncentration_degenerate_control():
    m = BaseMeasure.finite_support([1.0, -1.0], [0.5, 0.5])
    cfg = ExperimentConfig(measure=m, n_schedule=(10, 20), trials=10,
                           probes=(2 + 0j, 3j, -2 - 2j))
    with pytest.raises(NonDegeneracyError):
        run_anticoncentration(cfg)


def test_anticoncentration_probe_on_atom_rejected():
    m = BaseMeasure.finite_support([2.0, -1.0, 1j, -1j], [0.25] * 4)
    cfg = ExperimentConfig(measure=m, n_schedule=(10,), trials=10,
                           probes=(2 + 0j, 3j, -2 - 2j))
    with pytest.raises(ParameterError):
        run_anticoncentration(cfg)


def test_anticoncentration_finite_support_nondegenerate_runs():
    # four atoms vs three probes: rank can reach 4 = d + 1
    m = BaseMeasure.finite_support([1.0, -1.0, 1j, -1j], [0.25] * 4)
    cfg = ExperimentConfig(measure=m, n_schedule=(10, 40), trials=200,
                           seed=SeedSpec(10, 1), probes=(2 + 0j, 3j, -2 - 2j))
    rep = run_anticoncentration(cfg)
    assert set(rep.stats("phat")) == {10, 40}


def test_anticoncentration_small_run_decays():
    cfg = ExperimentConfig(measure=CIRCLE, n_schedule=(50, 200, 800),
                           trials=2000, seed=SeedSpec(5, 3))
    rep = run_anticoncentration(cfg)
    ph = rep.stats("phat")
    se = rep.stats("stderr")
    assert ph[200] <= ph[50] + 3 * (se[50] + se[200])
    assert ph[800] <= ph[200] + 3 * (se[200] + se[800])
    slope = rep.stat(0, "slope")
    assert -2.2 < slope < -0.8


def test_anticoncentration_inconclusive_verdict():
    cfg = ExperimentConfig(measure=CIRCLE, n_schedule=(50, 100), trials=5,
                           r_ball=1e-9, seed=SeedSpec(5, 4))
    rep = run_anticoncentration(cfg)
    assert not rep.passed
    assert any("inconclusive" in str(v.observed) for v in rep.verdicts)


def test_growth_single_atom_ratio():
    # all roots at 0, circle C(0,2): |S_n| = n/2 everywhere on the contour
    m = BaseMeasure.finite_support([0.0], [1.0])
    cfg = ExperimentConfig(measure=m, n_schedule=(4, 16, 64), seed=SeedSpec(2, 2),
                           circle_center=0j, circle_radius=2.0, m_circle=64)
    rep = run_growth(cfg)
    for n in (4, 16, 64):
        assert rep.stat(n, "sup_norm") == pytest.approx(n / 2, rel=1e-12)
        expected = math.log(n / 2) / math.log(n) if n > 2 else 0.0
        assert rep.stat(n, "ratio") == pytest.approx(expected, abs=1e-12)
    assert rep.passed


def test_growth_refinement_stability():
    cfg = ExperimentConfig(measure=CIRCLE, n_schedule=(64, 256, 1024),
                           seed=SeedSpec(4, 4), circle_center=0.1 + 0.2j,
                           circle_radius=1.7, m_circle=2048)
    rep = run_growth(cfg)
    for n in (64, 256, 1024):
        assert rep.stat(n, "refine_delta") < 0.01
        assert rep.stat(n, "ratio") <= 6.0


def test_growth_draws_generic_circle_when_unset():
    cfg = ExperimentConfig(measure=CIRCLE, n_schedule=(8, 16), seed=SeedSpec(6, 6),
                           m_circle=256)
    rep = run_growth(cfg)
    assert len(rep.stats("ratio")) == 2


def test_lln_single_atom_exact():
    m = BaseMeasure.finite_support([0.5], [1.0])
    cfg = ExperimentConfig(measure=m, n_schedule=(10, 100), seed=SeedSpec(8, 8),
                           u_transform=mb.identity(), k_reference=1000)
    rep = run_lln_logminus(cfg)
    for n in (10, 100):
        assert rep.stat(n, "log_minus_mu_n") == pytest.approx(math.log(2), rel=1e-12)
    assert rep.stat(0, "reference_value") == pytest.approx(math.log(2), rel=1e-12)
    assert rep.passed


def test_lln_support_outside_disk_is_zero():
    m = BaseMeasure.uniform_circle(5.0 + 0j, 1.0)
    cfg = ExperimentConfig(measure=m, n_schedule=(50, 500), seed=SeedSpec(12, 0),
                           u_transform=mb.identity(), k_reference=1000)
    rep = run_lln_logminus(cfg)
    assert rep.stat(500, "log_minus_mu_n") == 0.0
    assert rep.stat(0, "reference_value") == 0.0
    assert rep.passed


def test_lln_uniform_disk_half():
    cfg = ExperimentConfig(measure=BaseMeasure.uniform_disk(), n_schedule=(20_000,),
                           seed=SeedSpec(13, 0), u_transform=mb.identity(),
                           k_reference=200_000)
    rep = run_lln_logminus(cfg)
    assert rep.stat(20_000, "log_minus_mu_n") == pytest.approx(0.5, abs=0.02)
    assert rep.passed


def test_reports_deterministic():
    cfg = ExperimentConfig(measure=CIRCLE, n_schedule=(8, 16), seed=SeedSpec(31, 7),
                           k_reference=500, improvement_factor=None, quadrant_max=None)
    a = run_convergence(cfg)
    b = run_convergence(cfg)
    assert a.series_csv() == b.series_csv()
    ja, jb = a.to_json(), b.to_json()
    ja.pop("wall_clock"), jb.pop("wall_clock")
    assert ja == jb


def test_multinomial_trajectory_consistency():
    # the convergence experiment's finite-support trajectories reproduce
    # multinomial counts on the same stream
    m = BaseMeasure.finite_support([1.0, -1.0], [0.5, 0.5])
    seed = SeedSpec(3, 3)
    z = sample(m, seed, 100).samples
    counts = multinomial_counts(m, seed, 100)
    assert counts[0] == int(np.sum(z == 1.0))
    assert counts[1] == int(np.sum(z == -1.0))
