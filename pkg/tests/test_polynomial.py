import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polycont import Polynomial, PolynomialSystem, evaluate_dense, format_system, parse_system, total_degree
from polycont.bench import katsura, random_dense
from polycont.parser import PolySyntaxError, format_polynomial, parse_complex, parse_points
from polycont.polynomial import DimensionError, ring


def test_parse_example_start_system():
    sys = parse_system("ring x, y\npoly x^2-1\npoly y^2-1")
    assert sys.variables == ("x", "y")
    assert sys.degrees == (2, 2)
    assert sys.polys[0].terms == {(2, 0): 1, (0, 0): -1}


def test_parse_single_linear():
    sys = parse_system("ring x\npoly x")
    assert sys.degrees == (1,)
    assert sys.polys[0].terms == {(1,): 1}


def test_parse_complex_coefficients_and_round_trip():
    sys = parse_system("ring x, y\npoly x*y + 3.5*i*x - 2")
    assert sys.polys[0].terms == {(1, 1): 1, (1, 0): 3.5j, (0, 0): -2}
    again = parse_system(format_system(sys))
    assert again.polys[0].terms == sys.polys[0].terms


def test_precedence_and_associativity():
    (x,) = ring("x")
    sys = parse_system("ring x\npoly -x^2\npoly 2*-x\npoly x^2^2\npoly (x+1)^2 - x*x")
    assert sys.polys[0].terms == (-(x**2)).terms
    assert sys.polys[1].terms == {(1,): -2}
    assert sys.polys[2].terms == {(4,): 1}
    assert sys.polys[3].terms == {(1,): 2, (0,): 1}


def test_comments_blank_lines_and_glued_imaginary():
    text = "# header\n\nring a, b  # two vars\npoly 2i*a - b   # eq 1\npoly a+b\n"
    sys = parse_system(text)
    assert sys.polys[0].terms == {(1, 0): 2j, (0, 1): -1}


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("ring x\npoly x +* 2", 2, 9),
        ("ring x\npoly y", 2, 6),
        ("ring x\npoly x^1.5", 2, 8),
        ("ring x\npoly x^-1", 2, 8),
        ("ring x\npoly (x+1", 2, 10),
        ("poly x", 1, 1),
    ],
)
def test_syntax_errors_report_location(text, line, column):
    with pytest.raises(PolySyntaxError) as info:
        parse_system(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_unknown_identifier_message():
    with pytest.raises(PolySyntaxError, match="unknown identifier 'z'"):
        parse_system("ring x, y\npoly x + z")


def test_reserved_imaginary_unit():
    with pytest.raises(PolySyntaxError):
        parse_system("ring i, x\npoly x")


def test_parse_complex_literals():
    assert parse_complex("0.6+0.8*i") == 0.6 + 0.8j
    assert parse_complex("-3i") == -3j
    assert parse_complex("1e-3") == 1e-3
    assert parse_points("1, -1\n# comment\n3*i, 2+i\n") == [[1, -1], [3j, 2 + 1j]]


def test_evaluate_dense_basics():
    x, y = ring("x", "y")
    assert evaluate_dense(x**2 - 1, [1, 0]) == 0
    t = x**2 + (y - 5) ** 2 - 16
    assert evaluate_dense(t, [0, 9]) == 0
    with pytest.raises(DimensionError):
        evaluate_dense(t, [0])


def _reordered_sum(p: Polynomial, x) -> complex:
    # independent route: numpy powers, terms summed in reverse graded order
    x = np.asarray(x, dtype=complex)
    terms = [c * np.prod(x ** np.array(m)) for m, c in reversed(p.sorted_terms())]
    return complex(sum(terms))


def test_evaluate_dense_matches_reordered_sum(rng):
    sys = random_dense(3, 4, seed=11)
    for _ in range(20):
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        for p in sys.polys:
            a, b = evaluate_dense(p, x), _reordered_sum(p, x)
            assert abs(a - b) <= 1e-12 * max(1.0, abs(b), sum(abs(c) for c in p.terms.values()))


def test_evaluate_dense_is_linear(rng):
    sys = random_dense(2, 3, seed=5)
    p, q = sys.polys
    for _ in range(20):
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        lhs = evaluate_dense(p + q, x)
        rhs = evaluate_dense(p, x) + evaluate_dense(q, x)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_total_degree():
    assert total_degree(parse_system("ring x, y\npoly x^2-1\npoly y^2-1")) == 4
    assert total_degree(random_dense(5, 4, seed=0)) == 1024
    assert total_degree(parse_system("ring x\npoly 3*x+1")) == 1


def test_total_degree_rejects_zero_polynomial():
    sys = parse_system("ring x, y\npoly x\npoly y - y")
    with pytest.raises(ValueError, match="zero polynomial"):
        total_degree(sys)


@pytest.mark.parametrize("n", range(1, 13))
def test_katsura_total_degree(n):
    assert total_degree(katsura(n)) == 2 ** (n - 1)


def test_zero_polynomial_degree_is_zero():
    assert Polynomial(2).degree == 0
    assert Polynomial(2, {(1, 0): 0.0}).is_zero()


def test_system_rejects_mismatched_monomials():
    with pytest.raises(DimensionError):
        PolynomialSystem(("x", "y"), [Polynomial(1, {(1,): 1})])


finite = st.floats(allow_nan=False, allow_infinity=False, width=64, min_value=-1e300, max_value=1e300)
coefficient = st.builds(complex, finite, finite)


@st.composite
def systems(draw):
    n = draw(st.integers(1, 3))
    names = [f"v{k}" for k in range(n)]
    polys = []
    for _ in range(draw(st.integers(1, 3))):
        monos = st.tuples(*[st.integers(0, 4)] * n)
        terms = draw(st.dictionaries(monos, coefficient, min_size=0, max_size=6))
        polys.append(Polynomial(n, terms))
    return PolynomialSystem(tuple(names), polys)


@settings(max_examples=150, deadline=None)
@given(systems())
def test_print_parse_round_trip(sys):
    again = parse_system(format_system(sys))
    assert again.variables == sys.variables
    assert [p.terms for p in again.polys] == [p.terms for p in sys.polys]
    assert again.degrees == sys.degrees


def test_printer_is_graded_lex_with_full_precision():
    x, y = ring("x", "y")
    p = x * y + 0.1 * x - 2
    text = format_polynomial(p, ("x", "y"))
    assert text == "(1+0i)*x*y + (0.10000000000000001+0i)*x + (-2+0i)"
    assert parse_complex("0.10000000000000001") == 0.1
