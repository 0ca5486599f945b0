"""
Smith normal form of integer matrices

Presents the cokernel Z^m / (column span of A) for an m x n matrix A:
left @ A @ right == diagonal with unimodular left/right and a divisibility
chain d_1 | d_2 | ... on the nonzero diagonal entries.

The decomposition itself is sympy's, over the DomainMatrix ring ZZ.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from loopk.errors import InputError


Matrix = Tuple[Tuple[int, ...], ...]


def _identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _to_domain(rows: Sequence[Sequence[int]], shape: Tuple[int, int]) -> DomainMatrix:
    return DomainMatrix([[ZZ(x) for x in row] for row in rows], shape, ZZ)


def _from_domain(m: DomainMatrix) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in m.to_list())


@dataclass(frozen=True)
class SmithForm:
    """Smith normal form with its transforms"""
    matrix: Matrix
    left: Matrix
    right: Matrix
    diagonal: Matrix
    invariant_factors: Tuple[int, ...]
    rows: int
    cols: int

    @property
    def rank(self) -> int:
        """Rank of the input matrix"""
        return len(self.invariant_factors)

    @property
    def free_rank(self) -> int:
        """Free rank of the cokernel Z^rows / image"""
        return self.rows - self.rank

    @property
    def torsion(self) -> Tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)

    @property
    def cokernel_is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def cokernel_coordinates(self, vector: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        """
        Image of a vector in the cokernel Z/d_1 + ... + Z^free

        Returns:
            (torsion residues, free coordinates); the vector lies in the image
            exactly when both are zero
        """
        if len(vector) != self.rows:
            raise InputError(f"vector has length {len(vector)}, expected {self.rows}")
        y = [sum(self.left[i][k] * vector[k] for k in range(self.rows)) for i in range(self.rows)]
        residues = tuple(y[i] % d for i, d in enumerate(self.invariant_factors) if d > 1)
        return residues, tuple(y[self.rank:])

    def to_dict(self) -> dict:
        return {
            "invariant_factors": list(self.invariant_factors),
            "rank": self.rank,
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
        }


def smith_normal_form(matrix: Sequence[Sequence[int]], rows: Optional[int] = None) -> SmithForm:
    """
    Smith normal form with unimodular transforms

    Args:
        matrix: integer rows, all of one length
        rows: row count, needed only when the matrix has no columns

    Raises:
        InputError: ragged matrix or a row count that disagrees with `rows`
    """
    a = [[int(x) for x in row] for row in matrix]
    if rows is not None and len(a) not in (0, rows):
        raise InputError(f"matrix has {len(a)} rows, expected {rows}")
    m = len(a) if rows is None else rows
    n = len(a[0]) if a else 0
    if any(len(row) != n for row in a):
        raise InputError("ragged matrix")
    if not a:
        a = [[] for _ in range(m)]
    original = tuple(tuple(row) for row in a)

    if m == 0 or n == 0:
        return SmithForm(
            matrix=original,
            left=_identity(m),
            right=_identity(n),
            diagonal=original,
            invariant_factors=(),
            rows=m,
            cols=n,
        )

    diagonal, left, right = smith_normal_decomp(_to_domain(a, (m, n)))
    diagonal, left = _from_domain(diagonal), _from_domain(left)
    # unit normalization: every nonzero diagonal entry positive
    signs = [-1 if i < n and diagonal[i][i] < 0 else 1 for i in range(m)]
    left = tuple(tuple(signs[i] * x for x in row) for i, row in enumerate(left))
    diagonal = tuple(tuple(signs[i] * x for x in row) for i, row in enumerate(diagonal))
    factors = tuple(diagonal[i][i] for i in range(min(m, n)) if diagonal[i][i] != 0)

    return SmithForm(
        matrix=original,
        left=left,
        right=_from_domain(right),
        diagonal=diagonal,
        invariant_factors=factors,
        rows=m,
        cols=n,
    )


def lattice_membership(form: SmithForm, vector: Sequence[int]) -> bool:
    """True iff the vector lies in the column span of the presented matrix"""
    residues, free = form.cokernel_coordinates(vector)
    return all(r == 0 for r in residues) and all(f == 0 for f in free)
