import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmrepair.galois import tower_new

F4 = tower_new(2, 1, 2)
F8 = tower_new(2, 1, 3)
F16 = tower_new(2, 1, 4)
F16_4 = tower_new(2, 2, 2)
F27 = tower_new(3, 1, 3)

TOWERS = [F4, F8, F16, F16_4, F27]


# ---------------------------------------------------------------- construction

def test_modulus_selection_is_deterministic():
    assert F4.ext_modulus == (1, 1, 1)
    assert F8.ext_modulus == (1, 0, 1, 1)
    assert F27.ext_modulus == (1, 0, 2, 1)
    assert F16_4.base_modulus == (1, 1, 1)


def test_degree_one_tower_is_the_prime_field():
    t = tower_new(2, 1, 1)
    assert t.order == 2
    assert t.ext_modulus == (0, 1)
    for x in t.symbols():
        assert t.trace(x).index == x.index


def test_same_parameters_same_tower():
    assert tower_new(2, 1, 2) is F4
    assert tower_new(2, 1, 2) == F4


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        tower_new(4, 1, 2)
    with pytest.raises(ValueError):
        tower_new(2, 0, 2)
    with pytest.raises(ValueError):
        tower_new(2, 1, 40)  # over the element cap


def test_json_round_trip():
    data = F27.to_json()
    assert data == {"p": 3, "a": 1, "t": 3,
                    "base_modulus": [0, 1], "ext_modulus": [1, 0, 2, 1]}
    assert type(F27).from_json(data) is F27
    data["ext_modulus"] = [1, 1, 1, 1]
    with pytest.raises(ValueError):
        type(F27).from_json(data)


# ---------------------------------------------------------------- arithmetic

def test_f4_multiplication_and_inverse():
    v = F4.symbol(2)
    assert v * v == F4.symbol(3)
    assert v.inv() == F4.symbol(3)
    assert v * v.inv() == F4.one


def test_additive_identity():
    for tower in TOWERS:
        for x in tower.symbols():
            assert x + tower.zero == x


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        F4.one / F4.zero
    with pytest.raises(ZeroDivisionError):
        F4.zero.inv()


def test_cross_tower_operations_rejected():
    with pytest.raises(ValueError):
        F4.one + F8.one


@settings(max_examples=60)
@given(st.sampled_from(TOWERS), st.data())
def test_field_axioms(tower, data):
    order = tower.order
    idx = st.integers(0, order - 1)
    x = tower.symbol(data.draw(idx))
    y = tower.symbol(data.draw(idx))
    z = tower.symbol(data.draw(idx))
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + (-x) == tower.zero
    if y:
        assert (x / y) * y == x


@settings(max_examples=40)
@given(st.sampled_from(TOWERS), st.data())
def test_pow_order_is_identity(tower, data):
    x = tower.symbol(data.draw(st.integers(0, tower.order - 1)))
    assert x ** tower.order == x
    with pytest.raises(ValueError):
        x ** -1


# ---------------------------------------------------------------- frobenius

def test_frobenius_examples():
    v = F4.symbol(2)
    assert F4.frobenius(v, 1) == F4.symbol(3)
    assert F4.frobenius(v, 0) == v
    assert F4.frobenius(v, 2) == v


def test_frobenius_fixes_base_field_elements():
    for tower in TOWERS:
        for c in range(tower.q):
            x = tower.symbol(c)  # indices below q are the embedded base field
            assert tower.frobenius(x, 1) == x


def test_frobenius_fixed_points_are_exactly_base():
    for tower in TOWERS:
        fixed = [x for x in tower.symbols() if tower.frobenius(x) == x]
        assert len(fixed) == tower.q


@settings(max_examples=40)
@given(st.sampled_from(TOWERS), st.data())
def test_frobenius_is_a_homomorphism(tower, data):
    idx = st.integers(0, tower.order - 1)
    x = tower.symbol(data.draw(idx))
    y = tower.symbol(data.draw(idx))
    assert tower.frobenius(x + y) == tower.frobenius(x) + tower.frobenius(y)
    assert tower.frobenius(x * y) == tower.frobenius(x) * tower.frobenius(y)


# ---------------------------------------------------------------- trace

def test_f4_trace_table():
    assert {x.index: x.trace().index for x in F4.symbols()} == {0: 0, 1: 0, 2: 1, 3: 1}


def test_trace_additive_exhaustive():
    for tower in TOWERS:
        for x in tower.symbols():
            for y in tower.symbols():
                assert (x + y).trace() == x.trace() + y.trace()


def test_trace_base_linear_exhaustive():
    for tower in TOWERS:
        for c in tower.subsymbols():
            for x in tower.symbols():
                assert (c.embed() * x).trace() == c * x.trace()


def test_trace_surjective_with_small_kernel():
    for tower in TOWERS:
        images = {x.trace().index for x in tower.symbols()}
        kernel = [x for x in tower.symbols() if not x.trace()]
        assert images == set(range(tower.q))
        assert len(kernel) == tower.q ** (tower.t - 1)


# ---------------------------------------------------------------- dual bases

def test_dual_basis_examples():
    v, v1 = F4.symbol(2), F4.symbol(3)
    assert F4.dual_basis([v, v1]) == (v, v1)  # self dual
    assert F4.dual_basis([F4.one, v]) == (v1, F4.one)
    t = tower_new(3, 1, 1)
    assert t.dual_basis([t.one]) == (t.one,)


def test_dual_basis_pairing_exhaustive():
    for tower in TOWERS:
        basis = tower.basis
        dual = tower.dual_basis(basis)
        for i, zi in enumerate(basis):
            for j, zj in enumerate(dual):
                expected = 1 if i == j else 0
                assert (zi * zj).trace().index == expected


def test_dual_basis_rejects_dependent_input():
    v = F4.symbol(2)
    with pytest.raises(ValueError):
        F4.dual_basis([v, v])


def test_expand_in_dual_example():
    v = F4.symbol(2)
    basis = (F4.one, v)
    dual = F4.dual_basis(basis)
    assert F4.expand_in_dual(v, basis, dual) == v
    assert F4.expand_in_dual(F4.zero, basis, dual) == F4.zero


def test_expand_in_dual_round_trips_every_element():
    for tower in TOWERS:
        basis = tower.basis
        dual = tower.dual_basis(basis)
        for x in tower.symbols():
            assert tower.expand_in_dual(x, basis, dual) == x


def test_expand_in_dual_with_non_power_basis():
    basis = (F8.symbol(3), F8.symbol(5), F8.symbol(1))
    dual = F8.dual_basis(basis)
    for x in F8.symbols():
        assert F8.expand_in_dual(x, basis, dual) == x


# ---------------------------------------------------------------- trace kernel

def test_kernel_basis_examples():
    assert [z.index for z in F4.kernel_trace_basis()] == [1]
    assert len(F8.kernel_trace_basis()) == 2
    with pytest.raises(ValueError):
        tower_new(2, 1, 1).kernel_trace_basis()


def test_kernel_basis_spans_the_kernel():
    for tower in TOWERS:
        kernel = tower.kernel_trace_basis()
        assert len(kernel) == tower.t - 1
        for z in kernel:
            assert not z.trace()
        # spans: all q^(t-1) combinations are distinct and trace to zero
        span = {tower.zero.index}
        for z in kernel:
            span = {
                (tower.symbol(s) + c.embed() * z).index
                for s in span for c in tower.subsymbols()
            }
        assert len(span) == tower.q ** (tower.t - 1)


# ---------------------------------------------------------------- base embedding

def test_is_in_base_and_embedding():
    v = F4.symbol(2)
    assert F4.is_in_base(F4.one)
    assert not F4.is_in_base(v)
    c = F4.subsymbol(1)
    assert F4.extract_base(c.embed()) == c
    with pytest.raises(ValueError):
        F4.extract_base(v)
    for tower in TOWERS:
        for x in tower.symbols():
            if tower.is_in_base(x):
                assert tower.embed_base(tower.extract_base(x)) == x


def test_subsymbol_arithmetic_stays_in_base():
    a, b = F27.subsymbol(1), F27.subsymbol(2)
    assert (a + b).index == 0  # 1 + 2 in F_3
    assert (a - b).index == 2
    assert (b * b).index == 1
    assert (a / b) * b == a
    assert isinstance(a + b, type(a))


def test_mixed_symbol_subsymbol_operations():
    c = F4.subsymbol(1)
    v = F4.symbol(2)
    assert c * v == v
    assert c + v == F4.symbol(3)
    assert (v * c).tower is F4
