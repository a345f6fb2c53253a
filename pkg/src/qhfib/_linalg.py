"""Exact linear algebra over Fraction.

Tiny systems only (matrix sides stay below ~20 in practice), so plain
Gaussian elimination is fine. Pivoting is deterministic: first row with a
nonzero entry wins, so repeated runs give identical reduced forms and the
"first/minimal" tie-breaking rules elsewhere in the package are stable.
"""

from fractions import Fraction

Matrix = list[list[Fraction]]
Vector = list[Fraction]


def mat(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def zeros(n: int, m: int) -> Matrix:
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def mat_vec(a: Matrix, v: Vector) -> Vector:
    return [sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k = len(a), len(b[0])
    return [
        [sum((a[i][t] * b[t][j] for t in range(len(b))), Fraction(0)) for j in range(k)]
        for i in range(n)
    ]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form plus the pivot column indices."""
    m = [row[:] for row in a]
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [m[i][j] - f * m[r][j] for j in range(cols)]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def solve(a: Matrix, b: Vector) -> Vector | None:
    """One solution of a x = b with free variables set to 0, or None."""
    if not a:
        return [] if all(x == 0 for x in b) else None
    aug = [row[:] + [b[i]] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    cols = len(a[0])
    if cols in pivots:  # pivot in the constants column: inconsistent
        return None
    x = [Fraction(0)] * cols
    for r, c in enumerate(pivots):
        x[c] = red[r][cols]
    return x


def solve_unique(a: Matrix, b: Vector) -> Vector:
    from .errors import Inconsistent

    x = solve(a, b)
    if x is None:
        raise Inconsistent("linear system has no solution")
    return x


def nullspace(a: Matrix) -> list[Vector]:
    """Basis of the kernel, one vector per free column."""
    if not a:
        return []
    red, pivots = rref(a)
    cols = len(a[0])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def invert(a: Matrix) -> Matrix | None:
    n = len(a)
    aug = [a[i][:] + identity(n)[i] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in red]
