"""
Linear algebra over the residue field k = F_p on plain integer lists
"""

from typing import List, Optional, Sequence, Tuple

from data.exceptions import SingularFormError, SizeMismatchError

IntMatrix = List[List[int]]


def mod_matrix(rows: Sequence[Sequence[int]], p: int) -> IntMatrix:
    return [[x % p for x in row] for row in rows]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(rows: IntMatrix) -> IntMatrix:
    if not rows:
        return []
    return [list(col) for col in zip(*rows)]


def matmul(a: IntMatrix, b: IntMatrix, p: int) -> IntMatrix:
    if a and len(a[0]) != len(b):
        raise SizeMismatchError("incompatible shapes over k")
    cols = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) % p for col in cols] for row in a]


def row_reduce(rows: Sequence[Sequence[int]], p: int) -> Tuple[IntMatrix, List[int]]:
    """Reduced row echelon form and pivot columns"""
    m = mod_matrix(rows, p)
    pivots = []
    if not m:
        return m, pivots
    n_rows, n_cols = len(m), len(m[0])
    piv_r = 0
    for piv_c in range(n_cols):
        found = next((i for i in range(piv_r, n_rows) if m[i][piv_c]), None)
        if found is None:
            continue
        m[piv_r], m[found] = m[found], m[piv_r]
        inv = pow(m[piv_r][piv_c], -1, p)
        m[piv_r] = [(x * inv) % p for x in m[piv_r]]
        for r in range(n_rows):
            if r != piv_r and m[r][piv_c]:
                f = m[r][piv_c]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[piv_r])]
        pivots.append(piv_c)
        piv_r += 1
        if piv_r == n_rows:
            break
    return m, pivots


def rank(rows: Sequence[Sequence[int]], p: int) -> int:
    return len(row_reduce(rows, p)[1])


def nullspace(rows: Sequence[Sequence[int]], n_cols: int, p: int) -> IntMatrix:
    """Basis of {x in k^n : rows * x = 0}"""
    if not rows:
        return identity(n_cols)
    rref, pivots = row_reduce(rows, p)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [0] * n_cols
        vec[f] = 1
        for r, pc in enumerate(pivots):
            vec[pc] = (-rref[r][f]) % p
        basis.append(vec)
    return basis


def inverse(rows: Sequence[Sequence[int]], p: int) -> IntMatrix:
    n = len(rows)
    augmented = [list(row) + identity(n)[i] for i, row in enumerate(rows)]
    rref, pivots = row_reduce(augmented, p)
    if pivots[:n] != list(range(n)):
        raise SingularFormError("matrix is singular over the residue field")
    return [row[n:] for row in rref]


def determinant_nonzero(rows: Sequence[Sequence[int]], p: int) -> bool:
    return rank(rows, p) == len(rows)


def extend_to_basis(vectors: Sequence[Sequence[int]], n: int, p: int) -> IntMatrix:
    """Standard basis vectors completing independent vectors to a basis of k^n"""
    chosen = [list(v) for v in vectors]
    extra = []
    for i in range(n):
        candidate = [int(i == j) for j in range(n)]
        if rank(chosen + extra + [candidate], p) > len(chosen) + len(extra):
            extra.append(candidate)
    return extra


def solve(rows: Sequence[Sequence[int]], rhs: Sequence[int], p: int) -> Optional[List[int]]:
    """One solution of rows * x = rhs, or None"""
    n_cols = len(rows[0])
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    rref, pivots = row_reduce(augmented, p)
    if n_cols in pivots:
        return None
    x = [0] * n_cols
    for r, pc in enumerate(pivots):
        x[pc] = rref[r][n_cols]
    return x
