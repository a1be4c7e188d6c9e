"""Smoke tests for the numbench extension module."""

import math
import sys

import numbench as nb


def approx(a, b, tol=1e-9):
    return abs(a - b) <= tol


def test_problem_oracles():
    p = nb.make_problem(2, [[0, 1]], [1.0], utility="log")
    assert p.n == 2 and p.m == 1
    assert approx(nb.eval_objective(p, [1.0, 1.0]), 0.0)
    assert approx(nb.eval_utility(p, [math.e, math.e]), 2.0)
    assert nb.grad_objective(p, [2.0, 4.0]) == [-0.5, -0.25]
    assert approx(nb.eval_constraint(p, 0, [0.2, 0.2]), -0.6)
    assert approx(nb.max_violation(p, [0.7, 0.7]), 0.4)
    assert nb.find_violated(p, [0.7, 0.7], 0.01) == 0
    assert nb.find_violated(p, [0.2, 0.2], 0.01) is None
    assert approx(nb.directional_gap(p, [1.0, 1.0], [0.5, 0.5]), -1.0 / math.sqrt(2.0))
    try:
        nb.eval_objective(p, [0.0, 1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("boundary point must be rejected")


def test_oracle_and_solvers():
    p = nb.make_problem(2, [[0, 1]], [1.0])
    x, lam, ustar = nb.reference_solution(p)
    assert approx(x[0], 0.5) and approx(x[1], 0.5)
    assert approx(lam[0], 2.0)
    assert approx(ustar, -2.0 * math.log(2.0))

    md = nb.solve_md2(p, eps=0.01)
    assert md.stop_reason == "criterion_met"
    assert abs(md.utility - ustar) <= 0.02
    assert md.max_violation <= 0.01 * math.sqrt(2.0) + 1e-12
    again = nb.solve_md2(p, eps=0.01)
    assert again.solution == md.solution and again.total_iters == md.total_iters

    em = nb.solve_em(p, eps=1e-3)
    assert em.stop_reason == "criterion_met"
    assert abs(em.primal_utility - ustar) <= 1e-3
    assert em.violation_norm <= 1e-3
    assert em.iterations <= em.budget
    assert em.certificate_support >= 1

    assert approx(nb.dual_value(p, [2.0]), ustar)
    assert approx(nb.dual_subgradient(p, [2.0])[0], 0.0)
    assert approx(nb.best_response(p, 0, 2.0), 0.5)
    assert nb.duality_gap(p, [0.4, 0.4], [1.0]) >= -1e-9


def test_generator_round_trip():
    g1 = nb.generate(6, 4, p=0.5, b_min=0.5, b_max=1.5, seed=3)
    g2 = nb.generate(6, 4, p=0.5, b_min=0.5, b_max=1.5, seed=3)
    assert g1.to_json() == g2.to_json()
    assert nb.problem_from_json(g1.to_json()).to_json() == g1.to_json()
    x, lam, ustar = nb.reference_solution(g1)
    assert nb.max_violation(g1, x) <= 1e-9
    assert abs(nb.dual_value(g1, lam) - ustar) <= 1e-7

    try:
        nb.reference_solution(nb.generate(8, 2, seed=1, b_min=0.5, b_max=1.5))
    except nb.OracleGuardError:
        pass
    else:
        raise AssertionError("oracle guard must refuse n > 6")


def main():
    tests = [test_problem_oracles, test_oracle_and_solvers, test_generator_round_trip]
    for test in tests:
        test()
        print(f"ok: {test.__name__}")
    print(f"{len(tests)} smoke tests passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
