import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from subcrit_pa.errors import ParameterError, ProjectionRangeError
from subcrit_pa.projection import MAX_M, TABLE_LIMIT, ProjectionContext, projection_context


def exact_phi(m, i):
    return -float(sum(Fraction(1, j) for j in range(i + 1, m + 1)))


def test_phi_exact_small():
    ctx = ProjectionContext(30)
    for i in range(1, 31):
        assert ctx.phi(i) == pytest.approx(exact_phi(30, i), abs=1e-15)
    assert ctx.phi(30) == 0.0
    assert ctx.lower_limit == pytest.approx(exact_phi(30, 0))


def test_pi_inverts_phi_exhaustively():
    for m in (1, 2, 3, 17, 100, 513):
        ctx = ProjectionContext(m)
        assert all(ctx.pi(ctx.phi(i)) == i for i in range(1, m + 1))


def test_pi_cells():
    ctx = ProjectionContext(50)
    for i in range(2, 51):
        mid = 0.5 * (ctx.phi(i - 1) + ctx.phi(i))
        assert ctx.pi(mid) == i
        assert ctx.pi(math.nextafter(ctx.phi(i - 1), 0.0)) == i
    assert ctx.pi(math.nextafter(ctx.lower_limit, 0.0)) == 1


def test_pi_out_of_range():
    ctx = ProjectionContext(10)
    with pytest.raises(ProjectionRangeError):
        ctx.pi(0.1)
    with pytest.raises(ProjectionRangeError):
        ctx.pi(ctx.lower_limit)


@pytest.mark.parametrize("m", [0, -1, 2.5, MAX_M + 1])
def test_bad_m(m):
    with pytest.raises(ParameterError):
        ProjectionContext(m)


def test_large_m_agrees_with_table_at_boundary():
    m = TABLE_LIMIT + 1000
    big = ProjectionContext(m)
    for i in (1, 2, 100, TABLE_LIMIT - 1, TABLE_LIMIT, TABLE_LIMIT + 1, m - 1, m):
        direct = -sum(1.0 / j for j in range(max(i + 1, TABLE_LIMIT - 10), m + 1))
        if i + 1 >= TABLE_LIMIT - 10:
            assert big.phi(i) == pytest.approx(direct, abs=1e-12)
        assert big.pi(big.phi(i)) == i


@given(st.integers(TABLE_LIMIT + 1, MAX_M), st.floats(0.0, 1.0))
def test_large_m_roundtrip(m, frac):
    ctx = projection_context(m)
    i = max(1, min(m, int(frac * m)))
    x = ctx.phi(i)
    assert ctx.pi(x) == i
    if i > 1:
        assert ctx.phi(i - 1) < x


def test_harmonic_tail_accuracy():
    m = 1 << 30
    ctx = ProjectionContext(m)
    # -phi(m/2) = H(m) - H(m/2) = log 2 - 1/(2m) + O(m^-2)
    assert -ctx.phi(m // 2) == pytest.approx(math.log(2) - 0.5 / m, abs=1e-14)


def test_contexts_are_cached():
    assert projection_context(1234) is projection_context(1234)
