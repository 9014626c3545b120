"""Reed-Muller evaluation codes over the extension field of a tower.

A code is the set of evaluation vectors of all m-variate polynomials of
total degree at most d at every point of F_{q^t}^m.  Points are ordered by
mixed-radix index with the first coordinate most significant; monomials are
restricted to per-variable exponents below q^t (higher powers duplicate the
same function) and ordered by graded lexicographic order.

``oracle_erasure_decode`` is a deliberately brute-force reference decoder:
it solves for consistent messages by Gaussian elimination and reports
ambiguity instead of guessing, so it can serve as ground truth for any
repair path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import linalg
from .galois import FieldTower, Symbol

__all__ = [
    "AmbiguousErasureError",
    "Codeword",
    "InconsistentCodewordError",
    "MultiPoly",
    "RMCode",
    "code_new",
    "eval_poly",
]

DEFAULT_MAX_POINTS = 1 << 20


class AmbiguousErasureError(ValueError):
    """The erased entries are not determined by the surviving ones."""


class InconsistentCodewordError(ValueError):
    """The surviving entries are not the restriction of any codeword."""


def _reduce_exponent(e: int, order: int) -> int:
    # x**order == x as a function on the field, including at zero
    if e < order:
        return e
    return (e - 1) % (order - 1) + 1


class MultiPoly:
    """Sparse multivariate polynomial, normalized by x**(q^t) == x termwise."""

    def __init__(self, tower: FieldTower, m: int, terms):
        self.tower = tower
        self.m = m
        reduced: dict = {}
        for exps, coeff in dict(terms).items():
            if len(exps) != m:
                raise ValueError("exponent vector length does not match variable count")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            if coeff.tower != tower:
                raise ValueError("coefficient from a different tower")
            key = tuple(_reduce_exponent(e, tower.order) for e in exps)
            prev = reduced.get(key)
            reduced[key] = coeff if prev is None else prev + coeff
        self.terms = {e: c for e, c in reduced.items() if c}

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def evaluate(self, point) -> Symbol:
        point = tuple(point)
        if len(point) != self.m:
            raise ValueError("point arity does not match variable count")
        acc = self.tower.zero
        for exps, coeff in self.terms.items():
            term = coeff
            for x, e in zip(point, exps):
                if e:
                    term = term * x ** e
            acc = acc + term
        return acc

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.tower, self.m, self.terms) == (other.tower, other.m, other.terms)

    def __repr__(self):
        return f"MultiPoly({len(self.terms)} terms, m={self.m})"


def eval_poly(code: "RMCode", f: MultiPoly, point) -> Symbol:
    """Evaluate ``f`` at one evaluation point of ``code``."""
    return f.evaluate(point)


@dataclass(frozen=True)
class Codeword:
    """An evaluation vector with an erasure mask; erased entries hold None."""

    code: "RMCode"
    values: tuple
    erased: frozenset

    def __post_init__(self):
        if len(self.values) != self.code.n:
            raise ValueError("value count does not match code length")
        for i, v in enumerate(self.values):
            if i in self.erased:
                if v is not None:
                    raise ValueError(f"erased position {i} still carries a value")
            else:
                if not isinstance(v, Symbol) or v.tower != self.code.tower:
                    raise ValueError(f"position {i} does not hold a symbol of the code's tower")
        bad = [i for i in self.erased if not 0 <= i < self.code.n]
        if bad:
            raise ValueError(f"erased indices out of range: {bad}")

    def with_erasures(self, indices) -> "Codeword":
        erased = self.erased | frozenset(indices)
        values = tuple(None if i in erased else v for i, v in enumerate(self.values))
        return Codeword(self.code, values, erased)

    def to_json(self) -> dict:
        return {
            "code": self.code.params_json(),
            "values": [None if v is None else v.index for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Codeword":
        code = RMCode.from_params_json(data["code"])
        tower = code.tower
        values = tuple(
            None if v is None else tower.symbol(v) for v in data["values"]
        )
        erased = frozenset(i for i, v in enumerate(values) if v is None)
        return cls(code, values, erased)


class RMCode:
    """Evaluations of degree-bounded m-variate polynomials at all points."""

    def __init__(self, tower: FieldTower, m: int, d: int, *,
                 max_points: int = DEFAULT_MAX_POINTS):
        if m < 1:
            raise ValueError("m must be at least 1")
        order = tower.order
        if not 0 <= d <= m * (order - 1):
            raise ValueError(f"degree must lie in [0, {m * (order - 1)}]")
        if order ** m > max_points:
            raise ValueError(f"code length {order ** m} exceeds the cap {max_points}")
        self.tower = tower
        self.m = m
        self.d = d
        self.n = order ** m

        self.points = tuple(
            tuple(tower.symbol(c) for c in self._point_coords(i))
            for i in range(self.n)
        )
        self.monomials = tuple(sorted(
            (e for e in itertools.product(range(order), repeat=m) if sum(e) <= d),
            key=lambda e: (sum(e), e),
        ))
        self.k = len(self.monomials)

        ext = tower._ext
        pts = [tuple(s.index for s in P) for P in self.points]
        self._gen = [
            [self._eval_monomial(ext, e, pt) for pt in pts]
            for e in self.monomials
        ]
        self._generator_symbols = None

    @staticmethod
    def _eval_monomial(ext, exps, pt):
        val = 1
        for e, c in zip(exps, pt):
            if e:
                val = ext.mul(val, ext.pow(c, e))
                if val == 0:
                    return 0
        return val

    def _point_coords(self, index: int):
        order = self.tower.order
        coords = []
        for _ in range(self.m):
            index, r = divmod(index, order)
            coords.append(r)
        return tuple(reversed(coords))  # first coordinate most significant

    def point_index(self, point) -> int:
        idx = 0
        for s in point:
            idx = idx * self.tower.order + s.index
        return idx

    @property
    def generator(self):
        """The k x n generator matrix as symbols (rows follow self.monomials)."""
        if self._generator_symbols is None:
            tower = self.tower
            self._generator_symbols = tuple(
                tuple(tower.symbol(v) for v in row) for row in self._gen
            )
        return self._generator_symbols

    def message_poly(self, message) -> MultiPoly:
        message = tuple(message)
        if len(message) != self.k:
            raise ValueError(f"message must have {self.k} symbols")
        return MultiPoly(self.tower, self.m, dict(zip(self.monomials, message)))

    def encode(self, message) -> Codeword:
        message = tuple(message)
        if len(message) != self.k:
            raise ValueError(f"message must have {self.k} symbols")
        for s in message:
            if not isinstance(s, Symbol) or s.tower != self.tower:
                raise ValueError("message entries must be symbols of the code's tower")
        ext = self.tower._ext
        msg = [s.index for s in message]
        values = []
        for j in range(self.n):
            acc = 0
            for r in range(self.k):
                mr = msg[r]
                if mr:
                    g = self._gen[r][j]
                    if g:
                        acc = ext.add(acc, ext.mul(mr, g))
            values.append(self.tower.symbol(acc))
        return Codeword(self, tuple(values), frozenset())

    def dual_degree(self) -> int:
        """Degree parameter of the dual code; negative means the dual is zero."""
        return self.m * (self.tower.order - 1) - self.d - 1

    def is_dual_member(self, vec) -> bool:
        """True iff ``vec`` is orthogonal to every generator row."""
        vec = tuple(vec)
        if len(vec) != self.n:
            raise ValueError("vector length does not match code length")
        ext = self.tower._ext
        idxs = [v.index for v in vec]
        return all(x == 0 for x in linalg.matvec(ext, self._gen, idxs))

    def oracle_erasure_decode(self, cw: Codeword) -> Codeword:
        """Complete a punctured codeword by brute-force linear algebra.

        Solves for every message consistent with the surviving entries.  If
        all solutions agree on the erased positions the unique completion is
        returned; otherwise AmbiguousErasureError is raised.  Surviving
        entries that fit no codeword raise InconsistentCodewordError.
        """
        if cw.code is not self and cw.code != self:
            raise ValueError("codeword belongs to a different code")
        if not cw.erased:
            return cw
        ext = self.tower._ext
        erased = sorted(cw.erased)
        survivors = [i for i in range(self.n) if i not in cw.erased]
        rows = [
            [self._gen[r][i] for r in range(self.k)] + [cw.values[i].index]
            for i in survivors
        ]
        red, pivots = linalg.rref(ext, rows) if rows else ([], [])
        if self.k in pivots:
            raise InconsistentCodewordError(
                "surviving entries are not the restriction of any codeword")
        message = [0] * self.k
        for r, pc in enumerate(pivots):
            message[pc] = red[r][self.k]
        free = [c for c in range(self.k) if c not in pivots]
        for fc in free:
            direction = [0] * self.k
            direction[fc] = 1
            for r, pc in enumerate(pivots):
                direction[pc] = ext.neg(red[r][fc])
            for e in erased:
                acc = 0
                for r in range(self.k):
                    if direction[r]:
                        g = self._gen[r][e]
                        if g:
                            acc = ext.add(acc, ext.mul(direction[r], g))
                if acc:
                    raise AmbiguousErasureError(
                        f"erased position {e} is not determined by the survivors")
        values = []
        for i in range(self.n):
            acc = 0
            for r in range(self.k):
                if message[r]:
                    g = self._gen[r][i]
                    if g:
                        acc = ext.add(acc, ext.mul(message[r], g))
            values.append(self.tower.symbol(acc))
        return Codeword(self, tuple(values), frozenset())

    def params_json(self) -> dict:
        return {"p": self.tower.p, "a": self.tower.a, "t": self.tower.t,
                "m": self.m, "d": self.d}

    @classmethod
    def from_params_json(cls, data: dict) -> "RMCode":
        from .galois import tower_new
        return code_new(tower_new(data["p"], data["a"], data["t"]), data["m"], data["d"])

    def __eq__(self, other):
        if not isinstance(other, RMCode):
            return NotImplemented
        return (self.tower, self.m, self.d) == (other.tower, other.m, other.d)

    def __hash__(self):
        return hash((self.tower, self.m, self.d))

    def __repr__(self):
        return f"RMCode(order={self.tower.order}, m={self.m}, d={self.d}, n={self.n}, k={self.k})"


@lru_cache(maxsize=None)
def code_new(tower: FieldTower, m: int, d: int,
             max_points: int = DEFAULT_MAX_POINTS) -> RMCode:
    """Construct (or fetch) the code for the given tower and parameters."""
    return RMCode(tower, m, d, max_points=max_points)
