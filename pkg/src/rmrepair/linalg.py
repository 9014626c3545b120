"""Dense Gaussian elimination over finite field index engines.

Matrices are lists of row lists holding integer element indices; the engine
supplies add/sub/mul/inv, with 0 and 1 always being the zero and one indices.
Pivoting is deterministic (first nonzero entry in column order), so every
routine returns the same result for the same input.
"""

from __future__ import annotations

__all__ = [
    "InconsistentSystemError",
    "SingularMatrixError",
    "invert",
    "matvec",
    "nullspace",
    "rank",
    "rref",
    "solve",
]


class SingularMatrixError(ValueError):
    pass


class InconsistentSystemError(ValueError):
    pass


def rref(ops, rows):
    """Reduced row echelon form; returns (matrix, pivot column list)."""
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    nrows, ncols = len(mat), len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if mat[i][c] != 0), None)
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv_p = ops.inv(mat[r][c])
        if inv_p != 1:
            mat[r] = [ops.mul(inv_p, v) for v in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                row_i, row_r = mat[i], mat[r]
                mat[i] = [ops.sub(row_i[j], ops.mul(f, row_r[j])) for j in range(ncols)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return mat, pivots


def rank(ops, rows) -> int:
    return len(rref(ops, rows)[1])


def matvec(ops, rows, vec):
    out = []
    for row in rows:
        acc = 0
        for a, x in zip(row, vec):
            if a and x:
                acc = ops.add(acc, ops.mul(a, x))
        out.append(acc)
    return out


def invert(ops, rows):
    n = len(rows)
    aug = [list(r) + [1 if j == i else 0 for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = rref(ops, aug)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in red]


def nullspace(ops, rows):
    """Basis vectors of {x : rows . x = 0}, one per free column, ascending."""
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(ops, rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for r, pc in enumerate(pivots):
            vec[pc] = ops.neg(red[r][fc])
        basis.append(vec)
    return basis


def solve(ops, rows, rhs, *, require_unique: bool = False):
    """One solution of rows . x = rhs (free variables set to zero).

    Raises InconsistentSystemError when no solution exists and, with
    require_unique, SingularMatrixError when the solution is not unique.
    """
    if not rows:
        raise ValueError("empty system")
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(ops, aug)
    if ncols in pivots:
        raise InconsistentSystemError("system has no solution")
    if require_unique and len(pivots) < ncols:
        raise SingularMatrixError("solution is not unique")
    x = [0] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x
