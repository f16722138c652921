from fractions import Fraction

from hypothesis import given, settings, strategies as st

from spineless.rational import feasible_point, independent_subset, primitive, rank


def satisfies(x, eqs, ineqs):
    ok_eq = all(sum(a * v for a, v in zip(c, x)) == b for c, b in eqs)
    ok_in = all(sum(a * v for a, v in zip(c, x)) >= b for c, b in ineqs)
    return ok_eq and ok_in


def test_simple_bounds():
    x = feasible_point(1, (), [((1,), 3), ((-1,), -5)])
    assert x == (Fraction(3),)


def test_infeasible_interval():
    assert feasible_point(1, (), [((1,), 3), ((-1,), -2)]) is None


def test_equalities_then_inequalities():
    # x + y = 4, x - y >= 2, y >= 0
    x = feasible_point(2, [((1, 1), 4)], [((1, -1), 2), ((0, 1), 0)])
    assert satisfies(x, [((1, 1), 4)], [((1, -1), 2), ((0, 1), 0)])


def test_inconsistent_equalities():
    assert feasible_point(2, [((1, 1), 1), ((2, 2), 3)], ()) is None


def test_zero_dimensional():
    assert feasible_point(0, (), [((), 0)]) == ()
    assert feasible_point(0, (), [((), 1)]) is None


def test_lexmin_first_coordinate():
    # x >= 0, y >= 0, x + y >= 1: lexicographically least point is (0, 1)
    x = feasible_point(2, (), [((1, 0), 0), ((0, 1), 0), ((1, 1), 1)])
    assert x == (0, 1)


def test_primitive_and_rank():
    assert primitive((Fraction(1, 2), Fraction(3, 4))) == (2, 3)
    assert primitive((4, 6)) == (2, 3)
    assert rank([(1, 2), (2, 4)]) == 1
    assert independent_subset([(1, 0), (2, 0), (0, 1)]) == [0, 2]


coef = st.integers(-3, 3)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.lists(coef, min_size=n, max_size=n), st.integers(-3, 3)), max_size=2),
    st.lists(st.tuples(st.lists(coef, min_size=n, max_size=n), st.integers(-3, 3)), max_size=6),
    st.lists(st.integers(-3, 3), min_size=n, max_size=n))))
def test_planted_point_systems_are_feasible(data):
    n, eqs, ineqs, star = data
    # shift every right-hand side so the planted point satisfies the system
    eqs = [(tuple(c), sum(a * v for a, v in zip(c, star))) for c, _ in eqs]
    ineqs = [(tuple(c), sum(a * v for a, v in zip(c, star)) - abs(s)) for c, s in ineqs]
    x = feasible_point(n, eqs, ineqs)
    assert x is not None
    assert satisfies(x, eqs, ineqs)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.lists(coef, min_size=n, max_size=n), st.integers(-4, 4)), max_size=6))))
def test_answers_are_sound(data):
    n, ineqs = data
    ineqs = [(tuple(c), b) for c, b in ineqs]
    x = feasible_point(n, (), ineqs)
    if x is not None:
        assert satisfies(x, (), ineqs)
    else:
        # no small rational grid point may satisfy an infeasible system
        import itertools
        grid = [Fraction(k, 2) for k in range(-12, 13)]
        for p in itertools.product(grid, repeat=n):
            assert not satisfies(p, (), ineqs)
