import math

import pytest

import linfty_ot as lo


def test_counterexample_value_and_certificates():
    mu = lo.grid_measure([0, 0], [1, 1], 3)
    nu = lo.grid_measure([10, 0], [11, 1], 3)
    cost = lo.Cost.sup_norm(2)
    value, plan = lo.solve_bottleneck(mu, nu, cost)
    assert value == 10.0
    assert plan.is_valid()
    assert lo.check_im(plan, cost, 1e-6).passed


def test_bottleneck_matches_brute_force():
    mu = lo.Measure([[0.0, 0.0], [1.0, 0.2], [0.3, 0.9]])
    nu = lo.Measure([[0.5, 0.5], [2.0, 0.0], [0.1, 0.4]])
    cost = lo.Cost.euclidean(2)
    value, _ = lo.solve_bottleneck(mu, nu, cost)
    assert value == lo.brute_force_bottleneck(mu, nu, cost)


def test_rotation_is_im_not_icm():
    pts = [[math.cos(2 * math.pi * k / 12), math.sin(2 * math.pi * k / 12)] for k in range(12)]
    mu = lo.Measure(pts)
    plan = lo.Coupling(mu, mu, [(k, (k + 1) % 12, 1 / 12) for k in range(12)])
    cost = lo.Cost.euclidean(2)
    assert lo.check_im(plan, cost).passed
    icm = lo.check_icm(plan, cost)
    assert not icm.passed
    assert len(icm.witness) == 12
    assert icm.own_max == pytest.approx(2 * math.sin(math.pi / 12), abs=1e-9)


def test_schedule_and_map():
    mu = lo.grid_measure([0, 0], [1, 1], 3)
    nu = lo.grid_measure([2, 0], [3, 1], 3)
    cost = lo.Cost.from_spec("euclidean", 2)
    values, lam, terminal = lo.run_p_schedule(mu, nu, cost)
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))
    assert values[-1] <= lam + 1e-6
    assignment, mass = lo.extract_map(terminal)
    assert len(assignment) == 9
    assert mass == pytest.approx(0.0, abs=1e-9)
    gap, sym = lo.uniqueness_gap(assignment, assignment, 0, mu, nu)
    assert gap == 0.0 and sym == 0.0


def test_errors_become_python_exceptions(tmp_path):
    with pytest.raises(ValueError):
        lo.Measure([[0.0], [1.0]], [0.5, -0.5])
    with pytest.raises(ValueError):
        lo.solve_p(lo.Measure([[0.0]]), lo.Measure([[1.0]]), lo.Cost.euclidean(1), 0.5)
    bad = tmp_path / "bad.json"
    bad.write_text('{"scenario": "counterexample", "bogus": 1}')
    with pytest.raises(lo.ConfigError):
        lo.run_config(str(bad))


def test_run_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"scenario": "rotation"}')
    assert lo.run_config(str(cfg), out=str(tmp_path / "out")) == 0
    assert (tmp_path / "out" / "summary.csv").exists()
