"""
Affine Weyl Service - Root Data, Alcove Geometry and Folding

Combinatorial skeleton of the affine Tits building:
- Builds root data from Cartan matrices (finite type, rank <= 4)
- Locates alcove faces and their parabolic index sets
- Folds rational points into the fundamental alcove with a reflection word
- Enumerates parabolic Weyl groups W_I and the parabolic poset

Conventions:
- a_ij = <alpha_i^vee, alpha_j>; weights live in fundamental-weight coordinates
- points h live in coweight coordinates h_i = alpha_i(h)
- wall i >= 1 is alpha_i(h) = 0, wall 0 is theta(h) = 1
"""

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from loopk.config import get_settings
from loopk.core.coefficients import render_decimal, to_coefficient
from loopk.errors import (
    ComputationError,
    FoldingError,
    ImproperIndexError,
    InputError,
    InvalidCartanError,
    UnsupportedTypeError,
)


logger = logging.getLogger(__name__)

MAX_RANK = 4

Vector = Tuple[int, ...]
Matrix = Tuple[Tuple[int, ...], ...]


# ============================================================================
# NAMED CARTAN MATRICES
# ============================================================================

GROUP_ALIASES = {
    "su2": "A1", "su3": "A2", "su4": "A3", "su5": "A4",
    "spin5": "B2", "spin7": "B3", "spin9": "B4",
    "sp2": "C2", "sp3": "C3", "sp4": "C4",
    "spin8": "D4", "g2": "G2", "f4": "F4",
}


def cartan_matrix(name: str) -> Matrix:
    """Cartan matrix for a type label ("A2", "B3", ...) or group alias ("su3", "g2", ...)"""
    label = GROUP_ALIASES.get(name.lower(), name.upper())
    if len(label) < 2 or not label[1:].isdigit():
        raise UnsupportedTypeError(f"unknown group or type {name!r}")
    family, n = label[0], int(label[1:])
    if n < 1 or n > MAX_RANK:
        raise UnsupportedTypeError(f"rank {n} outside the supported range 1..{MAX_RANK}")
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    if family in "ABCD":
        for i in range(n - 1):
            a[i][i + 1] = a[i + 1][i] = -1
        if family == "B" and n >= 2:
            a[n - 1][n - 2] = -2
        elif family == "C" and n >= 2:
            a[n - 2][n - 1] = -2
        elif family == "D":
            if n != 4:
                raise UnsupportedTypeError(f"type D{n} is not supported (only D4 within rank {MAX_RANK})")
            a = [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]]
        if family in "BC" and n < 2:
            raise UnsupportedTypeError(f"type {label} needs rank >= 2")
    elif label == "G2":
        a = [[2, -1], [-3, 2]]
    elif label == "F4":
        a = [[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]]
    else:
        raise UnsupportedTypeError(f"unknown type {label!r}")
    return tuple(tuple(row) for row in a)


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True)
class RootDatum:
    """Finite root system data for an untwisted affine Weyl group"""
    cartan: Matrix
    positive_roots: Tuple[Vector, ...]
    marks: Vector
    comarks: Vector
    symmetrizer: Tuple[Fraction, ...]
    name: Optional[str] = None

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @property
    def dual_coxeter(self) -> int:
        return 1 + sum(self.comarks)

    @property
    def highest_root(self) -> Vector:
        """alpha_0 expanded in simple roots"""
        return self.marks

    @property
    def simple_roots(self) -> Tuple[Vector, ...]:
        """Simple roots in fundamental-weight coordinates (columns of the Cartan matrix)"""
        return tuple(self.root_to_weight(e) for e in self.unit_vectors)

    @property
    def fundamental_weights(self) -> Tuple[Vector, ...]:
        return self.unit_vectors

    @property
    def weyl_vector(self) -> Vector:
        return (1,) * self.rank

    @property
    def unit_vectors(self) -> Tuple[Vector, ...]:
        n = self.rank
        return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))

    def root_to_weight(self, root: Sequence[int]) -> Vector:
        """Simple-root coordinates -> fundamental-weight coordinates"""
        n = self.rank
        return tuple(sum(self.cartan[i][j] * root[j] for j in range(n)) for i in range(n))

    @property
    def highest_root_weight(self) -> Vector:
        return self.root_to_weight(self.marks)

    @property
    def theta_coweight(self) -> Vector:
        """theta^vee in coweight coordinates: (theta^vee)_j = sum_i comark_i a_ij"""
        n = self.rank
        return tuple(sum(self.comarks[i] * self.cartan[i][j] for i in range(n)) for j in range(n))

    def theta_pairing(self, weight: Sequence[int]) -> int:
        """<lambda, theta^vee> for lambda in fundamental-weight coordinates"""
        return sum(c * w for c, w in zip(self.comarks, weight))

    @property
    def root_weights(self) -> Dict[Vector, Vector]:
        """Every root (positive and negative) keyed by its weight vector, valued in root coordinates"""
        table = {}
        for root in self.positive_roots:
            table[self.root_to_weight(root)] = root
            table[self.root_to_weight(tuple(-x for x in root))] = tuple(-x for x in root)
        return table

    def is_positive_weight(self, weight: Sequence[int]) -> bool:
        root = self.root_weights.get(tuple(weight))
        if root is None:
            raise InputError(f"{tuple(weight)} is not a root")
        return sum(root) > 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "rank": self.rank,
            "cartan": [list(row) for row in self.cartan],
            "highest_root": list(self.marks),
            "comarks": list(self.comarks),
            "dual_coxeter": self.dual_coxeter,
            "positive_roots": len(self.positive_roots),
        }


@dataclass(frozen=True)
class ParabolicIndex:
    """A proper subset I of the affine simple reflections {0, ..., n}"""
    indices: FrozenSet[int]
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "indices", frozenset(int(i) for i in self.indices))
        bad = [i for i in self.indices if i < 0 or i > self.rank]
        if bad:
            raise ImproperIndexError(f"indices {sorted(bad)} outside 0..{self.rank}")
        if len(self.indices) == self.rank + 1:
            raise ImproperIndexError(f"I = {{0..{self.rank}}} is not a proper subset (W_I would be infinite)")

    @classmethod
    def parse(cls, text: str, rank: int) -> "ParabolicIndex":
        """"0", "0,1", "{1,2}", "" / "none" / "empty" for the empty set"""
        cleaned = text.strip().strip("{}").strip()
        if cleaned.lower() in ("", "none", "empty", "∅"):
            return cls(frozenset(), rank)
        try:
            values = [int(part) for part in cleaned.split(",") if part.strip()]
        except ValueError:
            raise InputError(f"cannot parse parabolic index {text!r}")
        return cls(frozenset(values), rank)

    def __iter__(self):
        return iter(sorted(self.indices))

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in self.indices

    def __le__(self, other: "ParabolicIndex") -> bool:
        return self.indices <= other.indices

    def __lt__(self, other: "ParabolicIndex") -> bool:
        return self.indices < other.indices

    def render(self) -> str:
        if not self.indices:
            return "∅"
        return "{" + ",".join(str(i) for i in sorted(self.indices)) + "}"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class PosetC:
    """Proper subsets of {0..n} ordered by inclusion"""
    elements: Tuple[ParabolicIndex, ...]
    covers: Tuple[Tuple[ParabolicIndex, ParabolicIndex], ...]
    relations: Tuple[Tuple[ParabolicIndex, ParabolicIndex], ...]

    def meet(self, a: ParabolicIndex, b: ParabolicIndex) -> ParabolicIndex:
        return ParabolicIndex(a.indices & b.indices, a.rank)

    def to_dict(self) -> dict:
        return {
            "elements": [e.render() for e in self.elements],
            "covers": [[a.render(), b.render()] for a, b in self.covers],
            "relations": len(self.relations),
        }


@dataclass(frozen=True)
class AlcovePoint:
    """Point h + d with exact coweight coordinates h_i = alpha_i(h)"""
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @classmethod
    def from_values(cls, values: Iterable) -> "AlcovePoint":
        return cls(tuple(Fraction(to_coefficient(v)) for v in values))

    @classmethod
    def parse(cls, text: str) -> "AlcovePoint":
        """"1.7", "1/2,1/3" """
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if not parts:
            raise InputError("empty point")
        return cls.from_values(parts)

    @property
    def rank(self) -> int:
        return len(self.coords)

    def render(self):
        values = [render_decimal(c) for c in self.coords]
        return values[0] if len(values) == 1 else values


@dataclass(frozen=True)
class WeylElement:
    """Affine map (lambda, b) -> (matrix @ lambda + b * shift, b) on weights"""
    matrix: Matrix
    shift: Vector
    word: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def sign(self) -> int:
        return -1 if self.length % 2 else 1

    def linear(self, weight: Sequence[int]) -> Vector:
        return tuple(sum(row[j] * weight[j] for j in range(len(weight))) for row in self.matrix)

    def act(self, weight: Sequence[int], level: int) -> Vector:
        moved = self.linear(weight)
        return tuple(m + level * s for m, s in zip(moved, self.shift))

    def word_names(self) -> List[str]:
        return [f"s{i}" for i in self.word]


# ============================================================================
# ROOT DATUM CONSTRUCTION
# ============================================================================

def _validate_cartan(a: Sequence[Sequence[int]]) -> Matrix:
    n = len(a)
    if n == 0:
        raise InvalidCartanError("empty Cartan matrix")
    if n > MAX_RANK:
        raise UnsupportedTypeError(f"rank {n} exceeds the supported maximum {MAX_RANK}")
    if any(len(row) != n for row in a):
        raise InvalidCartanError("Cartan matrix must be square")
    try:
        matrix = tuple(tuple(int(x) for x in row) for row in a)
    except (TypeError, ValueError):
        raise InvalidCartanError("Cartan matrix entries must be integers")
    for i in range(n):
        if matrix[i][i] != 2:
            raise InvalidCartanError(f"diagonal entry a[{i}][{i}] = {matrix[i][i]}, expected 2")
        for j in range(n):
            if i != j:
                if matrix[i][j] > 0:
                    raise InvalidCartanError(f"off-diagonal entry a[{i}][{j}] = {matrix[i][j]} is positive")
                if (matrix[i][j] == 0) != (matrix[j][i] == 0):
                    raise InvalidCartanError(f"a[{i}][{j}] and a[{j}][{i}] must vanish together")
    return matrix


def _symmetrizer(a: Matrix) -> Tuple[Fraction, ...]:
    """d with d_i a_ij = d_j a_ji, normalized so the largest d_i is 1"""
    n = len(a)
    d: List[Optional[Fraction]] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in range(n):
                if i != j and a[i][j] != 0:
                    value = d[i] * a[i][j] / a[j][i]
                    if d[j] is None:
                        d[j] = value
                        queue.append(j)
                    elif d[j] != value:
                        raise InvalidCartanError("Cartan matrix is not symmetrizable")
    top = max(d)
    return tuple(x / top for x in d)


def _determinant(m: List[List[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col] / m[col][col]
            m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return det


def _check_finite_type(a: Matrix, d: Sequence[Fraction]) -> None:
    n = len(a)
    b = [[d[i] * a[i][j] for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        minor = _determinant([row[:k] for row in b[:k]])
        if minor <= 0:
            raise InvalidCartanError(
                f"Cartan matrix is not of finite type (leading minor {k} of the symmetrized form is {minor})"
            )


def _positive_roots(a: Matrix) -> Tuple[Vector, ...]:
    """Positive roots in simple-root coordinates via root strings"""
    n = len(a)
    simple = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        following = []
        for beta in layer:
            for i in range(n):
                # p - q = <beta, alpha_i^vee>; p counts how far the string extends downward
                pairing = sum(beta[j] * a[i][j] for j in range(n))
                p = 0
                lowered = list(beta)
                while True:
                    lowered[i] -= 1
                    if tuple(lowered) in roots:
                        p += 1
                    else:
                        break
                if p - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        following.append(up)
        layer = following
        if len(roots) > 1000:
            raise InvalidCartanError("root system does not close (not of finite type)")
    return tuple(sorted(roots, key=lambda r: (sum(r), r)))


def build_root_datum(cartan: Sequence[Sequence[int]], name: Optional[str] = None) -> RootDatum:
    """
    Build and verify a root datum from a Cartan matrix

    Args:
        cartan: n x n integer matrix, a_ij = <alpha_i^vee, alpha_j>
        name: optional label (type or group alias)

    Returns:
        RootDatum with positive roots, highest root, comarks and symmetrizer

    Raises:
        InvalidCartanError: not a Cartan matrix of finite type
        UnsupportedTypeError: rank above MAX_RANK
    """
    a = _validate_cartan(cartan)
    d = _symmetrizer(a)
    _check_finite_type(a, d)
    n = len(a)

    # connected components must each be finite type; the affine extension needs irreducibility
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if a[i][j] != 0 and j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != n:
        raise UnsupportedTypeError("Cartan matrix is decomposable; only simple groups are supported")

    roots = _positive_roots(a)
    top_height = max(sum(r) for r in roots)
    tops = [r for r in roots if sum(r) == top_height]
    if len(tops) != 1:
        raise InvalidCartanError("highest root is not unique")
    marks = tops[0]
    if any(m <= 0 for m in marks):
        raise InvalidCartanError("highest root has a non-positive coefficient")

    # (theta, theta) / 2 in the normalization (alpha_i, alpha_j) = d_i a_ij
    theta_norm = sum(marks[i] * marks[j] * d[i] * a[i][j] for i in range(n) for j in range(n)) / 2
    comarks = []
    for i in range(n):
        value = Fraction(marks[i]) * d[i] / theta_norm
        if value.denominator != 1:
            raise InvalidCartanError(f"comark {i + 1} is not integral ({value})")
        comarks.append(int(value))

    datum = RootDatum(
        cartan=a,
        positive_roots=roots,
        marks=tuple(marks),
        comarks=tuple(comarks),
        symmetrizer=d,
        name=name,
    )
    logger.debug(f"✅ Root datum {name or ''} built: rank {n}, {len(roots)} positive roots, h = {datum.dual_coxeter}")
    return datum


def root_datum_for(group: str) -> RootDatum:
    return build_root_datum(cartan_matrix(group), name=group.lower())


# ============================================================================
# AFFINE WEYL SERVICE
# ============================================================================

class AffineWeylService:
    """
    Alcove geometry and affine Weyl combinatorics for one root datum

    Point reflections (coweight coordinates):
    - s_i(h)_j = h_j - h_i a_ij                  (i >= 1)
    - s_0(h) = h - (theta(h) - 1) theta^vee
    Weight reflections (fundamental-weight coordinates, level b):
    - s_i(lambda, b) = (lambda - lambda_i alpha_i, b)
    - s_0(lambda, b) = (s_theta(lambda) - b theta, b)
    """

    def __init__(self, datum: RootDatum, max_iter: Optional[int] = None):
        self.datum = datum
        self.max_iter = max_iter or get_settings().max_iter
        self._groups: Dict[FrozenSet[int], Tuple[WeylElement, ...]] = {}

    @property
    def rank(self) -> int:
        return self.datum.rank

    # ------------------------------------------------------------------
    # Alcove
    # ------------------------------------------------------------------

    def theta_value(self, p: AlcovePoint) -> Fraction:
        return sum((m * h for m, h in zip(self.datum.marks, p.coords)), Fraction(0))

    def _check_point(self, p: AlcovePoint) -> None:
        if p.rank != self.rank:
            raise InputError(f"point has {p.rank} coordinates, root datum has rank {self.rank}")

    def contains(self, p: AlcovePoint) -> bool:
        self._check_point(p)
        return all(h >= 0 for h in p.coords) and self.theta_value(p) <= 1

    def alcove_face(self, p: AlcovePoint) -> Optional[ParabolicIndex]:
        """
        Face index set of a point of the closed alcove

        Returns:
            I(p) = {i >= 1 : alpha_i(h) = 0} + {0 if theta(h) = 1}, or None
            when p lies outside the closed alcove
        """
        if not self.contains(p):
            return None
        walls = {i + 1 for i, h in enumerate(p.coords) if h == 0}
        if self.theta_value(p) == 1:
            walls.add(0)
        return ParabolicIndex(frozenset(walls), self.rank)

    def reflect_point(self, i: int, p: AlcovePoint) -> AlcovePoint:
        self._check_point(p)
        n = self.rank
        h = p.coords
        if i == 0:
            excess = self.theta_value(p) - 1
            coroot = self.datum.theta_coweight
            return AlcovePoint(tuple(h[j] - excess * coroot[j] for j in range(n)))
        if not 1 <= i <= n:
            raise InputError(f"no affine simple reflection s{i} in rank {n}")
        row = self.datum.cartan[i - 1]
        return AlcovePoint(tuple(h[j] - h[i - 1] * row[j] for j in range(n)))

    def apply_word(self, word: Sequence[int], p: AlcovePoint) -> AlcovePoint:
        """r_1(r_2(...r_k(p))) for word [r_1, ..., r_k]"""
        for i in reversed(list(word)):
            p = self.reflect_point(i, p)
        return p

    def affine_fold(self, p: AlcovePoint) -> Tuple[AlcovePoint, Tuple[int, ...]]:
        """
        Fold a point into the closed alcove

        Each step reflects across a wall separating the point from the alcove,
        which lowers the number of separating hyperplanes by one.

        Returns:
            (folded point, word) with apply_word(word, folded) == p

        Raises:
            FoldingError: more than max_iter reflections
        """
        self._check_point(p)
        word: List[int] = []
        current = p
        for _ in range(self.max_iter + 1):
            negative = next((i for i, h in enumerate(current.coords) if h < 0), None)
            if negative is not None:
                reflection = negative + 1
            elif self.theta_value(current) > 1:
                reflection = 0
            else:
                return current, tuple(word)
            current = self.reflect_point(reflection, current)
            word.append(reflection)
        raise FoldingError(f"folding did not finish within {self.max_iter} reflections (LOOPK_MAX_ITER)")

    # ------------------------------------------------------------------
    # Weyl groups on weights
    # ------------------------------------------------------------------

    def generator(self, i: int) -> WeylElement:
        n = self.rank
        ident = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        if i == 0:
            theta = self.datum.highest_root_weight
            matrix = [[ident[r][c] - theta[r] * self.datum.comarks[c] for c in range(n)] for r in range(n)]
            shift = tuple(-t for t in theta)
        elif 1 <= i <= n:
            alpha = self.datum.simple_roots[i - 1]
            matrix = [[ident[r][c] - (alpha[r] if c == i - 1 else 0) for c in range(n)] for r in range(n)]
            shift = (0,) * n
        else:
            raise InputError(f"no affine simple reflection s{i} in rank {n}")
        return WeylElement(tuple(tuple(row) for row in matrix), shift, (i,))

    def reflect_weight(self, i: int, weight: Sequence[int], level: int) -> Vector:
        return self.generator(i).act(weight, level)

    @staticmethod
    def compose(g: WeylElement, h: WeylElement) -> WeylElement:
        """g after h"""
        n = len(g.matrix)
        matrix = tuple(
            tuple(sum(g.matrix[r][k] * h.matrix[k][c] for k in range(n)) for c in range(n))
            for r in range(n)
        )
        shift = tuple(s + t for s, t in zip(g.linear(h.shift), g.shift))
        return WeylElement(matrix, shift, g.word + h.word)

    def weyl_group(self, index: ParabolicIndex) -> Tuple[WeylElement, ...]:
        """
        All elements of W_I by breadth-first search, each with a reduced word

        Raises:
            ImproperIndexError: index from another rank
            ComputationError: |W_I| above LOOPK_MAX_WEYL_ORDER
        """
        if index.rank != self.rank:
            raise ImproperIndexError(f"index set of rank {index.rank} used with rank {self.rank}")
        key = index.indices
        if key in self._groups:
            return self._groups[key]
        limit = get_settings().max_weyl_order
        n = self.rank
        identity = WeylElement(
            tuple(tuple(1 if r == c else 0 for c in range(n)) for r in range(n)), (0,) * n, ()
        )
        generators = [self.generator(i) for i in sorted(key)]
        seen = {(identity.matrix, identity.shift): identity}
        queue = deque([identity])
        while queue:
            element = queue.popleft()
            for gen in generators:
                product = self.compose(element, gen)
                signature = (product.matrix, product.shift)
                if signature not in seen:
                    seen[signature] = product
                    queue.append(product)
                    if len(seen) > limit:
                        raise ComputationError(
                            f"W_{index.render()} has more than {limit} elements (LOOPK_MAX_WEYL_ORDER)"
                        )
        group = tuple(seen.values())
        self._groups[key] = group
        logger.debug(f"W_{index.render()} enumerated: order {len(group)}")
        return group

    def parabolic_poset(self) -> PosetC:
        n = self.rank
        elements = [
            ParabolicIndex(frozenset(c), n)
            for size in range(n + 1)
            for c in combinations(range(n + 1), size)
        ]
        covers = tuple(
            (a, b) for a in elements for b in elements
            if a < b and len(b) == len(a) + 1
        )
        relations = tuple((a, b) for a in elements for b in elements if a < b)
        return PosetC(tuple(elements), covers, relations)


# ============================================================================
# CONVENIENCE FUNCTIONS
# ============================================================================

def create_weyl_service(group: Optional[str] = None, cartan: Optional[Sequence[Sequence[int]]] = None) -> AffineWeylService:
    """
    Create AffineWeylService from a group alias or an explicit Cartan matrix

    Args:
        group: "su2", "su3", "g2", or a type label such as "B3"
        cartan: explicit Cartan matrix (takes precedence)
    """
    if cartan is not None:
        datum = build_root_datum(cartan)
    else:
        datum = root_datum_for(group or "su2")
    return AffineWeylService(datum)


def alcove_face(p: AlcovePoint, datum: RootDatum) -> Optional[ParabolicIndex]:
    return AffineWeylService(datum).alcove_face(p)


def affine_fold(p: AlcovePoint, datum: RootDatum) -> Tuple[AlcovePoint, Tuple[int, ...]]:
    return AffineWeylService(datum).affine_fold(p)


def weyl_group(index: ParabolicIndex, datum: RootDatum) -> Tuple[WeylElement, ...]:
    return AffineWeylService(datum).weyl_group(index)


def parabolic_poset(datum: RootDatum) -> PosetC:
    return AffineWeylService(datum).parabolic_poset()
