import math

import numpy as np
import pytest

from polycont import make_homotopy, solve_system, total_degree, track
from polycont.bench import BenchmarkSpec, build, gevp, gevp_data, katsura, random_dense
from polycont.polynomial import evaluate_system_dense, ring
from polycont.tracker import summarize


@pytest.mark.parametrize("n, d", [(1, 1), (2, 3), (3, 2), (5, 4)])
def test_random_dense_has_every_monomial(n, d):
    sys = random_dense(n, d, seed=1)
    assert sys.nvars == n and len(sys.polys) == n
    for p in sys.polys:
        assert len(p.terms) == math.comb(n + d, d)
        assert p.degree == d


def test_random_dense_is_deterministic():
    a, b, c = random_dense(3, 2, seed=4), random_dense(3, 2, seed=4), random_dense(3, 2, seed=5)
    assert [p.terms for p in a.polys] == [p.terms for p in b.polys]
    assert [p.terms for p in a.polys] != [p.terms for p in c.polys]


def test_random_dense_coefficients_are_standard_complex_normal():
    coeffs = np.array([c for p in random_dense(4, 4, seed=0).polys for c in p.terms.values()])
    assert abs(np.mean(np.abs(coeffs) ** 2) - 1) < 0.15
    assert abs(np.mean(coeffs)) < 0.1


def test_katsura_small_forms():
    (u0,) = ring("u0")
    assert katsura(1).polys[0].terms == (u0 - 1).terms
    u0, u1 = ring("u0", "u1")
    k2 = katsura(2)
    assert k2.variables == ("u0", "u1")
    assert k2.polys[0].terms == (u0**2 + 2 * u1**2 - u0).terms
    assert k2.polys[1].terms == (u0 + 2 * u1 - 1).terms


def test_katsura_three_middle_equation():
    u0, u1, u2 = ring("u0", "u1", "u2")
    k3 = katsura(3)
    assert k3.polys[1].terms == (2 * u0 * u1 + 2 * u1 * u2 - u1).terms
    assert k3.degrees == (2, 2, 1)


def test_total_degrees_of_named_benchmarks():
    assert total_degree(random_dense(5, 4, seed=0)) == 1024
    assert total_degree(katsura(12)) == 2048


@pytest.mark.parametrize("n", range(2, 9))
def test_katsura_solution_counts(n):
    res = solve_system(katsura(n), seed=n)
    assert len(res.regular_solutions) == 2 ** (n - 1)
    for s in res.regular_solutions:
        assert s.residual <= 1e-8


def test_gevp_start_solutions_solve_start_system():
    target, start, sols = gevp(5, seed=2)
    assert target.variables[-1] == "lam" and target.nvars == 6
    assert len(sols) == 5
    for s in sols:
        assert np.max(np.abs(evaluate_system_dense(start, s))) <= 1e-12


def test_gevp_has_n_start_paths_for_n_35():
    target, _, sols = gevp(35)
    assert len(sols) == 35
    assert total_degree(target) == 2**35


def test_gevp_diagonal_pencil():
    A = np.diag([1.0, 2.0])
    target, start, sols = gevp(2, A=A, B=np.eye(2), c=np.array([1.0, 1.0]))
    res = summarize(track(start, target, sols, 0.6 + 0.8j), 0.6 + 0.8j)
    lams = sorted(s.point[-1].real for s in res.regular_solutions)
    assert lams == pytest.approx([1.0, 2.0], abs=1e-12)
    for s in res.regular_solutions:
        assert s.residual <= 1e-12


@pytest.mark.parametrize("n", [3, 6])
def test_gevp_solutions_are_eigenpairs(n):
    target, start, sols = gevp(n, seed=n)
    A, B, c = gevp_data(n, seed=n)
    res = summarize(track(start, target, sols, 0.6 + 0.8j), 0.6 + 0.8j)
    assert len(res.regular_solutions) == n
    ref = np.linalg.eigvals(np.linalg.solve(B, A))
    for s in res.regular_solutions:
        v, lam = s.point[:-1], s.point[-1]
        assert np.max(np.abs(A @ v - lam * (B @ v))) <= 1e-8 * max(1.0, abs(lam)) * np.max(np.abs(v))
        assert abs(c @ v - 1) <= 1e-10
        assert np.min(np.abs(ref - lam)) <= 1e-6 * max(1.0, abs(lam))


def test_build_dispatch():
    target, start, sols = build(BenchmarkSpec("katsura", 4))
    assert target.nvars == 4 and start is None and sols is None
    target, start, sols = build(BenchmarkSpec("gevp", 3, seed=1))
    assert len(sols) == 3
    assert BenchmarkSpec("random", 5, 4).expected_solutions == 1024
    with pytest.raises(ValueError):
        BenchmarkSpec("cyclic", 3)


def test_gevp_homotopy_is_linear_in_lambda_times_v():
    target, start, _ = gevp(3, seed=0)
    h = make_homotopy(start, target)
    assert target.degrees == (2, 2, 2, 1)
    assert h.nvars == 4
