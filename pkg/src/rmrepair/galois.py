"""Two-level finite field towers with trace, dual bases, and trace-kernel bases.

The tower F_p < F_q < F_{q^t} (q = p^a) is realized by explicit quotients:
F_q = F_p[u]/(base_modulus) and F_{q^t} = F_q[v]/(ext_modulus).  Both moduli
are the lexicographically smallest monic irreducible of the required degree,
comparing coefficient sequences constant term first (F_p coefficients as
integers, F_q coefficients by their base-p coordinate tuples), so the same
(p, a, t) always produces the identical tower.

Every element carries a canonical integer index.  An F_q element with F_p
coordinates (c_0, ..., c_{a-1}) has index sum(c_k * p^k); an F_{q^t} element
with F_q coordinates (e_0, ..., e_{t-1}) has index sum(idx(e_k) * q^k).
Index 0 is zero and index 1 is one at both levels, addition is digitwise,
and serialization uses plain indices.

Fields are desk scale by design (default cap 2**20 elements), which keeps
exhaustive irreducibility and independence checks cheap at construction.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

__all__ = [
    "DEFAULT_MAX_ELEMENTS",
    "FieldTower",
    "SubSymbol",
    "Symbol",
    "tower_new",
]

DEFAULT_MAX_ELEMENTS = 1 << 20

# Full add/mul/inv tables are built for levels up to this order.
_TABLE_LIMIT = 512


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


class _PrimeOps:
    """Index arithmetic for F_p: elements are the integers 0..p-1."""

    __slots__ = ("order",)

    def __init__(self, p: int):
        self.order = p

    def vec(self, x):
        return (x,)

    def add(self, x, y):
        return (x + y) % self.order

    def sub(self, x, y):
        return (x - y) % self.order

    def neg(self, x):
        return -x % self.order

    def mul(self, x, y):
        return (x * y) % self.order

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, self.order - 2, self.order)

    def pow(self, x, e):
        return pow(x, e, self.order)


class _QuotientOps:
    """Index arithmetic for F_c[x]/(modulus) over a coefficient engine.

    Indices are mixed radix over the coefficient indices with the constant
    coefficient as the least significant digit.  The modulus is monic with
    its coefficients given constant term first.
    """

    __slots__ = ("coeff", "modulus", "degree", "order",
                 "_add_table", "_neg_table", "_mul_table", "_inv_table")

    def __init__(self, coeff, modulus):
        self.coeff = coeff
        self.modulus = tuple(modulus)
        self.degree = len(self.modulus) - 1
        self.order = coeff.order ** self.degree
        self._add_table = None
        self._neg_table = None
        self._mul_table = None
        self._inv_table = None
        if self.order <= _TABLE_LIMIT:
            self._build_tables()

    def vec(self, x):
        base = self.coeff.order
        out = []
        for _ in range(self.degree):
            x, r = divmod(x, base)
            out.append(r)
        return tuple(out)

    def idx(self, v):
        base = self.coeff.order
        x = 0
        for c in reversed(tuple(v)):
            x = x * base + c
        return x

    def _add_raw(self, x, y):
        c = self.coeff
        return self.idx([c.add(i, j) for i, j in zip(self.vec(x), self.vec(y))])

    def _neg_raw(self, x):
        c = self.coeff
        return self.idx([c.neg(i) for i in self.vec(x)])

    def _mul_raw(self, x, y):
        c = self.coeff
        d = self.degree
        a, b = self.vec(x), self.vec(y)
        prod = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj == 0:
                    continue
                prod[i + j] = c.add(prod[i + j], c.mul(ai, bj))
        # synthetic division by the monic modulus
        for k in range(2 * d - 2, d - 1, -1):
            ck = prod[k]
            if ck == 0:
                continue
            prod[k] = 0
            for off in range(d):
                m = self.modulus[off]
                if m:
                    prod[k - d + off] = c.sub(prod[k - d + off], c.mul(ck, m))
        return self.idx(prod[:d])

    def _build_tables(self):
        n = self.order
        self._add_table = [[self._add_raw(x, y) for y in range(n)] for x in range(n)]
        self._neg_table = [self._neg_raw(x) for x in range(n)]
        self._mul_table = [[self._mul_raw(x, y) for y in range(n)] for x in range(n)]
        inv = [0] * n
        for x in range(1, n):
            row = self._mul_table[x]
            inv[x] = row.index(1)
        self._inv_table = inv

    def add(self, x, y):
        t = self._add_table
        return t[x][y] if t is not None else self._add_raw(x, y)

    def neg(self, x):
        t = self._neg_table
        return t[x] if t is not None else self._neg_raw(x)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        t = self._mul_table
        return t[x][y] if t is not None else self._mul_raw(x, y)

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        t = self._inv_table
        return t[x] if t is not None else self.pow(x, self.order - 2)

    def pow(self, x, e):
        if e < 0:
            raise ValueError("negative exponent")
        result = 1
        base = x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result


def _poly_eval(ops, poly, x):
    acc = 0
    for c in reversed(poly):
        acc = ops.add(ops.mul(acc, x), c)
    return acc


def _poly_rem(ops, num, div):
    """Remainder of num modulo a monic divisor (coefficient index lists)."""
    rem = list(num)
    dd = len(div) - 1
    for k in range(len(rem) - 1, dd - 1, -1):
        c = rem[k]
        if c == 0:
            continue
        rem[k] = 0
        for i in range(dd):
            if div[i]:
                rem[k - dd + i] = ops.sub(rem[k - dd + i], ops.mul(c, div[i]))
    return rem[:dd]


def _is_irreducible(ops, poly):
    deg = len(poly) - 1
    if deg == 1:
        return True
    for x in range(ops.order):
        if _poly_eval(ops, poly, x) == 0:
            return False
    if deg <= 3:
        return True
    for e in range(2, deg // 2 + 1):
        for tail in itertools.product(range(ops.order), repeat=e):
            divisor = (*tail, 1)
            if not any(_poly_rem(ops, poly, divisor)):
                return False
    return True


def _smallest_irreducible(ops, degree, element_order):
    """First monic irreducible of ``degree`` in constant-term-first lex order."""
    for tail in itertools.product(element_order, repeat=degree):
        poly = (*tail, 1)
        if _is_irreducible(ops, poly):
            return poly
    raise RuntimeError(
        f"exhaustive search found no irreducible of degree {degree} "
        f"over a field of order {ops.order}"
    )


class SubSymbol:
    """An element of the intermediate field F_q, the unit of download cost."""

    __slots__ = ("tower", "index")

    def __init__(self, tower: "FieldTower", index: int):
        if not 0 <= index < tower.q:
            raise ValueError(f"subsymbol index {index} out of range for q={tower.q}")
        self.tower = tower
        self.index = index

    def embed(self) -> "Symbol":
        """The same element viewed inside F_{q^t} (constant coordinate)."""
        return Symbol(self.tower, self.index)

    def inv(self) -> "SubSymbol":
        return SubSymbol(self.tower, self.tower._base.inv(self.index))

    def _coerce(self, other):
        if isinstance(other, SubSymbol):
            if other.tower != self.tower:
                raise ValueError("subsymbols from different towers")
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is not None:
            return SubSymbol(self.tower, self.tower._base.add(self.index, o.index))
        if isinstance(other, Symbol):
            return self.embed() + other
        return NotImplemented

    def __sub__(self, other):
        o = self._coerce(other)
        if o is not None:
            return SubSymbol(self.tower, self.tower._base.sub(self.index, o.index))
        if isinstance(other, Symbol):
            return self.embed() - other
        return NotImplemented

    def __mul__(self, other):
        o = self._coerce(other)
        if o is not None:
            return SubSymbol(self.tower, self.tower._base.mul(self.index, o.index))
        if isinstance(other, Symbol):
            return self.embed() * other
        return NotImplemented

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is not None:
            return self * o.inv()
        if isinstance(other, Symbol):
            return self.embed() / other
        return NotImplemented

    def __neg__(self):
        return SubSymbol(self.tower, self.tower._base.neg(self.index))

    def __eq__(self, other):
        if not isinstance(other, SubSymbol):
            return NotImplemented
        return self.tower == other.tower and self.index == other.index

    def __hash__(self):
        return hash((self.tower, "sub", self.index))

    def __bool__(self):
        return self.index != 0

    def __repr__(self):
        return f"SubSymbol({self.index})"

    def pretty(self) -> str:
        return self.tower._render(self.tower._base.vec(self.index), "u", str)


class Symbol:
    """An element of the extension field F_{q^t}, the unit of node storage."""

    __slots__ = ("tower", "index")

    def __init__(self, tower: "FieldTower", index: int):
        if not 0 <= index < tower.order:
            raise ValueError(f"symbol index {index} out of range for order {tower.order}")
        self.tower = tower
        self.index = index

    @property
    def coords(self) -> tuple:
        """F_q coordinates with respect to the power basis of the extension."""
        return tuple(SubSymbol(self.tower, c) for c in self.tower._ext.vec(self.index))

    def inv(self) -> "Symbol":
        return Symbol(self.tower, self.tower._ext.inv(self.index))

    def trace(self) -> "SubSymbol":
        return self.tower.trace(self)

    def frobenius(self, i: int = 1) -> "Symbol":
        return self.tower.frobenius(self, i)

    def _coerce(self, other):
        if isinstance(other, Symbol):
            if other.tower != self.tower:
                raise ValueError("symbols from different towers")
            return other
        if isinstance(other, SubSymbol):
            if other.tower != self.tower:
                raise ValueError("symbols from different towers")
            return other.embed()
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Symbol(self.tower, self.tower._ext.add(self.index, o.index))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Symbol(self.tower, self.tower._ext.sub(self.index, o.index))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Symbol(self.tower, self.tower._ext.mul(self.index, o.index))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inv()

    def __neg__(self):
        return Symbol(self.tower, self.tower._ext.neg(self.index))

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            raise ValueError("negative exponent; use inv() first")
        return Symbol(self.tower, self.tower._ext.pow(self.index, e))

    def __eq__(self, other):
        if not isinstance(other, Symbol):
            return NotImplemented
        return self.tower == other.tower and self.index == other.index

    def __hash__(self):
        return hash((self.tower, "sym", self.index))

    def __bool__(self):
        return self.index != 0

    def __repr__(self):
        return f"Symbol({self.index})"

    def pretty(self) -> str:
        tower = self.tower
        if tower.a == 1:
            return tower._render(tower._ext.vec(self.index), "v", str)
        coeff = lambda c: "(" + tower._render(tower._base.vec(c), "u", str) + ")"
        return tower._render(tower._ext.vec(self.index), "v", coeff)


class FieldTower:
    """The extension pair F_q over F_p and F_{q^t} over F_q.

    Immutable after construction; all operations are pure, so towers and
    their elements are safe to share across threads.
    """

    def __init__(self, p: int, a: int, t: int, *, max_elements: int = DEFAULT_MAX_ELEMENTS):
        if not _is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if a < 1 or t < 1:
            raise ValueError("extension exponents must be at least 1")
        if p ** (a * t) > max_elements:
            raise ValueError(
                f"field would have {p ** (a * t)} elements, above the cap {max_elements}"
            )
        self.p = p
        self.a = a
        self.t = t
        self.q = p ** a
        self.order = self.q ** t

        prime = _PrimeOps(p)
        self.base_modulus = _smallest_irreducible(prime, a, range(p))
        self._base = _QuotientOps(prime, self.base_modulus)
        base_order = sorted(range(self.q), key=self._base.vec)
        self.ext_modulus = _smallest_irreducible(self._base, t, base_order)
        self._ext = _QuotientOps(self._base, self.ext_modulus)

        # default basis: powers of the extension generator v
        self.basis = tuple(Symbol(self, self.q ** k) for k in range(t))
        self._basis_traces = None
        self._kernel_basis = None

    # -- element constructors -------------------------------------------------

    def symbol(self, index: int) -> Symbol:
        return Symbol(self, index)

    def subsymbol(self, index: int) -> SubSymbol:
        return SubSymbol(self, index)

    @property
    def zero(self) -> Symbol:
        return Symbol(self, 0)

    @property
    def one(self) -> Symbol:
        return Symbol(self, 1)

    def symbols(self):
        """All field elements in index order."""
        return (Symbol(self, i) for i in range(self.order))

    def subsymbols(self):
        return (SubSymbol(self, i) for i in range(self.q))

    # -- tower maps ------------------------------------------------------------

    def frobenius(self, x: Symbol, i: int = 1) -> Symbol:
        """The i-th power of x -> x^q.  frobenius(x, t) == x for every x."""
        if i < 0:
            raise ValueError("iteration count must be nonnegative")
        self._check(x)
        return Symbol(self, self._ext.pow(x.index, self.q ** (i % self.t)))

    def _trace_of_power_basis(self):
        # traces of v^0 .. v^{t-1}; computed once, each checked to land in F_q
        if self._basis_traces is None:
            traces = []
            for k in range(self.t):
                acc = y = self.q ** k
                for _ in range(self.t - 1):
                    y = self._ext.pow(y, self.q)
                    acc = self._ext.add(acc, y)
                vec = self._ext.vec(acc)
                if any(vec[1:]):
                    raise RuntimeError("trace sum left the base field; arithmetic is broken")
                traces.append(vec[0])
            self._basis_traces = tuple(traces)
        return self._basis_traces

    def _trace_idx(self, xi: int) -> int:
        tv = self._trace_of_power_basis()
        base = self._base
        acc = 0
        for c, tk in zip(self._ext.vec(xi), tv):
            if c and tk:
                acc = base.add(acc, base.mul(c, tk))
        return acc

    def trace(self, x: Symbol) -> SubSymbol:
        """Trace of F_{q^t} onto F_q: the sum of the t Frobenius iterates."""
        self._check(x)
        return SubSymbol(self, self._trace_idx(x.index))

    def is_in_base(self, x: Symbol) -> bool:
        self._check(x)
        return not any(self._ext.vec(x.index)[1:])

    def embed_base(self, c: SubSymbol) -> Symbol:
        if c.tower != self:
            raise ValueError("subsymbol from a different tower")
        return Symbol(self, c.index)

    def extract_base(self, x: Symbol) -> SubSymbol:
        if not self.is_in_base(x):
            raise ValueError(f"{x!r} is not an element of the base field")
        return SubSymbol(self, self._ext.vec(x.index)[0])

    # -- bases -----------------------------------------------------------------

    def dual_basis(self, basis) -> tuple:
        """The basis paired with ``basis`` under the trace form.

        Tr(z_i * z'_j) is 1 when i == j and 0 otherwise; solved as a t x t
        linear system over F_q against the power basis coordinates.
        """
        from . import linalg

        basis = tuple(basis)
        if len(basis) != self.t:
            raise ValueError(f"basis must have {self.t} elements")
        for z in basis:
            self._check(z)
        pairing = [
            [self._trace_idx(self._ext.mul(z.index, self.q ** k)) for k in range(self.t)]
            for z in basis
        ]
        try:
            coords = linalg.invert(self._base, pairing)
        except linalg.SingularMatrixError:
            raise ValueError("basis is linearly dependent over F_q") from None
        return tuple(
            Symbol(self, self._ext.idx([coords[k][j] for k in range(self.t)]))
            for j in range(self.t)
        )

    def expand_in_dual(self, x: Symbol, basis, dual) -> Symbol:
        """Reconstruct x from its t trace pairings against ``basis``."""
        self._check(x)
        acc = self.zero
        for z, zd in zip(basis, dual):
            acc = acc + self.trace(x * z) * zd
        return acc

    def kernel_trace_basis(self) -> tuple:
        """An F_q-basis of the trace kernel, of size t-1."""
        from . import linalg

        if self.t == 1:
            raise ValueError("trace is the identity for t=1; the kernel is trivial")
        if self._kernel_basis is None:
            row = list(self._trace_of_power_basis())
            vectors = linalg.nullspace(self._base, [row])
            if len(vectors) != self.t - 1:
                raise RuntimeError("trace kernel has unexpected dimension")
            self._kernel_basis = tuple(Symbol(self, self._ext.idx(v)) for v in vectors)
        return self._kernel_basis

    # -- plumbing ----------------------------------------------------------------

    def _check(self, x):
        if x.tower != self:
            raise ValueError("element belongs to a different tower")

    @staticmethod
    def _render(vec, var, coeff) -> str:
        parts = []
        for k, c in enumerate(vec):
            if c == 0:
                continue
            if k == 0:
                parts.append(coeff(c))
            else:
                head = "" if c == 1 else coeff(c) + "*"
                parts.append(head + (var if k == 1 else f"{var}^{k}"))
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "a": self.a,
            "t": self.t,
            "base_modulus": list(self.base_modulus),
            "ext_modulus": list(self.ext_modulus),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FieldTower":
        tower = tower_new(data["p"], data["a"], data["t"])
        if "base_modulus" in data and tuple(data["base_modulus"]) != tower.base_modulus:
            raise ValueError("serialized base modulus does not match the canonical tower")
        if "ext_modulus" in data and tuple(data["ext_modulus"]) != tower.ext_modulus:
            raise ValueError("serialized extension modulus does not match the canonical tower")
        return tower

    def __eq__(self, other):
        if not isinstance(other, FieldTower):
            return NotImplemented
        return (self.p, self.a, self.t) == (other.p, other.a, other.t)

    def __hash__(self):
        return hash((self.p, self.a, self.t))

    def __repr__(self):
        return f"FieldTower(p={self.p}, a={self.a}, t={self.t})"


@lru_cache(maxsize=None)
def tower_new(p: int, a: int, t: int, max_elements: int = DEFAULT_MAX_ELEMENTS) -> FieldTower:
    """Construct (or fetch) the canonical tower for (p, a, t)."""
    return FieldTower(p, a, t, max_elements=max_elements)
