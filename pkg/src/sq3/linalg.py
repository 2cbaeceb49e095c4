"""Small dense linear algebra over a scalar backend (exact or float)."""

from __future__ import annotations

from .quaternion import Backend


def row_reduce(rows: list[list], backend: Backend) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns.

    Float pivots use the largest entry in the column; exact pivots take the
    first nonzero one.
    """
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= len(m):
            break
        if backend.exact:
            p = next((i for i in range(r, len(m)) if not backend.is_zero(m[i][c])), None)
        else:
            best = max(range(r, len(m)), key=lambda i: abs(m[i][c]))
            p = best if backend.sign(abs(m[best][c])) else None
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not backend.is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def nullspace(rows: list[list], backend: Backend) -> list[list]:
    """Basis of {x : rows @ x = 0}."""
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = row_reduce(rows, backend)
    zero, one = backend.const(0), backend.const(1)
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [zero] * ncols
        v[free] = one
        for row, pc in zip(red, pivots):
            v[pc] = -row[free]
        basis.append(v)
    return basis


def rank(rows: list[list], backend: Backend) -> int:
    return len(row_reduce(rows, backend)[1])


def det3(m) -> object:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def cross4(u, v, w) -> list:
    """Vector orthogonal to u, v, w in R^4 (generalized cross product)."""
    out = []
    for i in range(4):
        cols = [c for c in range(4) if c != i]
        minor = [[vec[c] for c in cols] for vec in (u, v, w)]
        d = det3(minor)
        out.append(d if i % 2 == 0 else -d)
    return out
