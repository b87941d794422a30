import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jordan_minors.errors import ContractViolation, NotQuasiInvertible
from jordan_minors.pairs import (
    EndoOp,
    PairDescriptor,
    PairElement,
    Side,
    bergman,
    d_operator,
    inner,
    involution,
    pair_determinant,
    q_operator,
    quadratic_map,
    quasi_inverse,
    structure_constant,
    trace_form,
    trace_form_operator,
    triple_product,
)
from jordan_minors.sampling import random_element, random_quasi_invertible

R11 = PairDescriptor.rect_real(1, 1)
DESCRIPTORS = [
    PairDescriptor.rect_real(2, 3),
    PairDescriptor.rect_complex(2, 3),
    PairDescriptor.rect_complex(3, 3),
    PairDescriptor.sym_complex(2),
    PairDescriptor.sym_complex(3),
]
ids = [f"{d.kind.value}-{d.r}x{d.s}" for d in DESCRIPTORS]


def plus(d, m):
    return PairElement(d, Side.PLUS, np.array(m, dtype=d.dtype))


def minus(d, m):
    return PairElement(d, Side.MINUS, np.array(m, dtype=d.dtype))


def scalar(x, side=Side.PLUS):
    return PairElement(R11, side, np.array([[x]], dtype=float))


def test_descriptor_shapes_and_constants():
    d = PairDescriptor.rect_complex(2, 3)
    assert d.shape(Side.PLUS) == (2, 3) and d.shape(Side.MINUS) == (3, 2)
    assert d.rank == 2 and d.p == 5 and d.dim == 6 and d.real_dim == 12
    s = PairDescriptor.sym_complex(4)
    assert s.shape(Side.MINUS) == (4, 4) and s.rank == 4 and s.p == 5 and s.dim == 10


def test_descriptor_json_round_trip():
    for d in DESCRIPTORS:
        assert PairDescriptor.from_json(d.to_json()) == d


def test_element_rejects_wrong_shape_and_asymmetry():
    d = PairDescriptor.rect_real(2, 3)
    with pytest.raises(ContractViolation):
        PairElement(d, Side.PLUS, np.zeros((3, 2)))
    with pytest.raises(ContractViolation):
        PairElement(PairDescriptor.sym_complex(2), Side.PLUS, np.array([[0, 1], [0, 0]], dtype=complex))


def test_element_is_immutable():
    x = plus(PairDescriptor.rect_real(1, 2), [[1, 2]])
    with pytest.raises(AttributeError):
        x.payload = None
    with pytest.raises(ValueError):
        x.payload[0, 0] = 5


@pytest.mark.parametrize("d", DESCRIPTORS, ids=ids)
def test_coordinates_are_orthonormal(d):
    rng = np.random.default_rng(0)
    x = random_element(d, rng)
    assert np.isclose(np.linalg.norm(x.coords()), x.norm())
    assert PairElement(d, Side.PLUS, d.from_coords(x.coords())).allclose(x)


def test_quadratic_map_examples():
    d = PairDescriptor.rect_real(1, 2)
    x = plus(d, [[1, 2]])
    y = minus(d, [[3], [4]])
    assert np.allclose(quadratic_map(x, y).payload, [[11, 22]])
    assert np.allclose(quadratic_map(x, minus(d, [[0], [0]])).payload, 0)
    s = PairDescriptor.sym_complex(2)
    ys = minus(s, [[1, 2j], [2j, -1]])
    assert np.allclose(quadratic_map(plus(s, np.eye(2)), ys).payload, ys.payload)


def test_quadratic_map_needs_opposite_sides():
    d = PairDescriptor.rect_real(2, 2)
    with pytest.raises(ContractViolation):
        quadratic_map(plus(d, np.eye(2)), plus(d, np.eye(2)))


def test_triple_product_examples():
    assert triple_product(scalar(2), scalar(3, Side.MINUS), scalar(5)).payload[0, 0] == 60
    d = PairDescriptor.rect_complex(2, 3)
    rng = np.random.default_rng(3)
    x = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    assert triple_product(x, y, x).allclose(2 * quadratic_map(x, y))
    assert np.allclose(triple_product(x, 0 * y, x).payload, 0)


def test_d_operator_examples():
    d = PairDescriptor.rect_real(2, 3)
    rng = np.random.default_rng(4)
    y = random_element(d, rng, Side.MINUS)
    assert np.allclose(d_operator(PairElement.zeros(d), y).matrix, 0)
    op = d_operator(scalar(1.5), scalar(-2.0, Side.MINUS))
    assert op.matrix.shape == (1, 1) and op.matrix[0, 0] == pytest.approx(2 * 1.5 * -2.0)


def test_d_operator_spectrum_at_tripotent():
    d = PairDescriptor.rect_complex(2, 3)
    e = plus(d, [[1, 0, 0], [0, 0, 0]])
    ev = np.sort(d_operator(e, involution(e)).eigenvalues().real)
    assert np.allclose(ev, [0, 0, 1, 1, 1, 2])


def test_bergman_examples():
    d = PairDescriptor.rect_real(2, 3)
    rng = np.random.default_rng(5)
    x = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    eye = np.eye(d.dim)
    assert np.allclose(bergman(PairElement.zeros(d), y).matrix, eye)
    assert np.allclose(bergman(x, PairElement.zeros(d, Side.MINUS)).matrix, eye)
    x, y = 0.7, -1.3
    assert bergman(scalar(x), scalar(y, Side.MINUS)).matrix[0, 0] == pytest.approx((1 - x * y) ** 2)


def test_bergman_kills_peirce_two_space():
    d = PairDescriptor.rect_real(2, 2)
    e = plus(d, [[1, 0], [0, 0]])
    b = bergman(e, involution(e))
    # basis E11, E12, E21, E22: B z = (1 - e e^T) z (1 - e^T e)
    assert np.allclose(b(plus(d, [[1, 0], [0, 0]])).payload, 0)
    assert np.allclose(b(plus(d, [[0, 1], [0, 0]])).payload, 0)
    assert np.allclose(b(plus(d, [[0, 0], [0, 1]])).payload, [[0, 0], [0, 1]])
    assert np.allclose(np.sort(b.eigenvalues().real), [0, 0, 0, 1])


def test_quasi_inverse_examples():
    d = PairDescriptor.rect_complex(2, 3)
    rng = np.random.default_rng(6)
    x = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    assert quasi_inverse(x, PairElement.zeros(d, Side.MINUS)).allclose(x)
    assert quasi_inverse(PairElement.zeros(d), y).allclose(PairElement.zeros(d))
    assert quasi_inverse(scalar(2.0), scalar(0.25, Side.MINUS)).payload[0, 0] == pytest.approx(4.0)
    with pytest.raises(NotQuasiInvertible):
        quasi_inverse(scalar(2.0), scalar(0.5, Side.MINUS))


def test_pair_determinant_examples():
    d = PairDescriptor.rect_complex(1, 2)
    rng = np.random.default_rng(7)
    x = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    assert pair_determinant(x, PairElement.zeros(d, Side.MINUS)) == 1
    assert pair_determinant(PairElement.zeros(d), y) == 1
    y1, y2 = 0.3 + 0.2j, -1.5j
    assert pair_determinant(plus(d, [[1, 0]]), minus(d, [[y1], [y2]])) == pytest.approx(1 - y1)


@pytest.mark.parametrize("d", DESCRIPTORS, ids=ids)
def test_pair_determinant_vanishes_at_tripotent(d):
    from jordan_minors.spectral import random_tripotent

    e = random_tripotent(d, 1, np.random.default_rng(8))
    assert abs(pair_determinant(e.e, involution(e.e))) < 1e-12


def test_structure_constant_values():
    assert structure_constant(R11) == 2
    assert structure_constant(PairDescriptor.rect_complex(2, 3)) == 5
    assert structure_constant(PairDescriptor.rect_real(3, 4)) == 7
    assert structure_constant(PairDescriptor.sym_complex(2)) == 3
    assert structure_constant(PairDescriptor.sym_complex(4)) == 5


@pytest.mark.parametrize("d", DESCRIPTORS, ids=ids)
def test_structure_constant_against_bergman_oracle(d):
    # independent oracle: Det B(x, y) / Delta(x, y)^p == 1
    rng = np.random.default_rng(9)
    p = structure_constant(d)
    for _ in range(20):
        x, y = random_quasi_invertible(d, rng)
        ratio = bergman(x, y).det() / pair_determinant(x, y) ** p
        assert abs(ratio - 1) < 1e-8
        # and no neighbouring exponent fits
        assert abs(bergman(x, y).det() / pair_determinant(x, y) ** (p + 1) - 1) > 1e-8 or abs(pair_determinant(x, y) - 1) < 1e-6


def test_one_by_one_bergman_is_delta_squared():
    b = bergman(scalar(0.4), scalar(1.1, Side.MINUS))
    assert b.det() == pytest.approx((1 - 0.44) ** 2)


def test_trace_form_examples():
    d = PairDescriptor.rect_real(2, 2)
    e11 = plus(d, [[1, 0], [0, 0]])
    assert trace_form(e11, involution(e11)) == pytest.approx(4)
    assert trace_form(scalar(3.0), scalar(0.5, Side.MINUS)) == pytest.approx(3.0)
    assert trace_form(e11, PairElement.zeros(d, Side.MINUS)) == 0


@pytest.mark.parametrize("d", DESCRIPTORS, ids=ids)
def test_trace_form_matches_operator_trace(d):
    rng = np.random.default_rng(10)
    x = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    assert trace_form(x, y) == pytest.approx(trace_form_operator(x, y), rel=1e-10)
    assert trace_form(x, y) == pytest.approx(trace_form(y, x), rel=1e-10)


def test_involution_examples():
    d = PairDescriptor.rect_real(2, 3)
    rng = np.random.default_rng(11)
    z = random_element(d, rng)
    assert np.array_equal(involution(z).payload, z.payload.T)
    assert involution(z).side is Side.MINUS
    c = random_element(PairDescriptor.rect_complex(2, 3), rng)
    assert involution(involution(c)).allclose(c)


def test_inner_product_examples():
    d = PairDescriptor.rect_complex(2, 3)
    e12 = plus(d, [[0, 1, 0], [0, 0, 0]])
    assert inner(e12, e12) == pytest.approx(5)


@pytest.mark.parametrize("d", DESCRIPTORS, ids=ids)
def test_inner_product_hermitian_positive(d):
    rng = np.random.default_rng(12)
    u = random_element(d, rng)
    v = random_element(d, rng)
    assert inner(u, v) == pytest.approx(np.conj(inner(v, u)))
    assert inner(u, u).real > 0 and abs(inner(u, u).imag) < 1e-12


def test_endo_op_algebra():
    d = PairDescriptor.rect_real(2, 2)
    ident = EndoOp.identity(d)
    e = plus(d, [[1, 0], [0, 0]])
    dop = d_operator(e, involution(e))
    assert np.allclose((dop @ ident).matrix, dop.matrix)
    assert np.allclose((2 * ident - ident).matrix, np.eye(4))
    assert dop.trace() == pytest.approx(4)


@st.composite
def quasi_invertible_points(draw):
    d = draw(st.sampled_from(DESCRIPTORS))
    seed = draw(st.integers(0, 2**32 - 1))
    x, y = random_quasi_invertible(d, np.random.default_rng(seed))
    return d, x, y, np.random.default_rng(seed + 1)


@settings(max_examples=60, deadline=None)
@given(quasi_invertible_points())
def test_fundamental_formula_property(case):
    d, x, y, _ = case
    lhs = q_operator(quadratic_map(x, y))
    rhs = q_operator(x) @ q_operator(y) @ q_operator(x)
    assert np.allclose(lhs, rhs, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(quasi_invertible_points())
def test_quasi_inverse_matches_resolvent(case):
    d, x, y, _ = case
    expected = np.linalg.solve(np.eye(d.r) - x.payload @ y.payload, x.payload)
    assert np.allclose(quasi_inverse(x, y).payload, expected, atol=1e-9)
    assert pair_determinant(x, y) == pytest.approx(np.linalg.det(np.eye(d.r) - x.payload @ y.payload))


@settings(max_examples=60, deadline=None)
@given(quasi_invertible_points())
def test_det_bergman_power_property(case):
    d, x, y, _ = case
    assert bergman(x, y).det() == pytest.approx(pair_determinant(x, y) ** d.p, rel=1e-8)


@settings(max_examples=60, deadline=None)
@given(quasi_invertible_points())
def test_delta_symmetries(case):
    d, x, _, rng = case
    v = random_element(d, rng)
    w = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    assert pair_determinant(x, involution(v)) == pytest.approx(np.conj(pair_determinant(v, involution(x))), abs=1e-10)
    assert pair_determinant(x, quadratic_map(y, w)) == pytest.approx(pair_determinant(w, quadratic_map(y, x)), abs=1e-9)
