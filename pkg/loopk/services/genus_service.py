"""
Genus Service - Chern Numbers, Sigma Genera and Tate Localization

Genera computed from Chern data through the density of an orientation:
- density_from_orientation: x / sigma(e^x, q) or x / (2 sinh(x/2))
- characteristic_number: prod_i d(x_i) expanded in Chern classes and paired
- witten_genus / tft_invariant: pi_dagger eps_T(TM)^g, g = 0 the Witten genus
- khat_orbit / tate_base_change / localize_space: base change to Z((q))

Densities are polynomials in (q, x) truncated at (q_order, x_order).
"""

import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from loopk.core.coefficients import render_coefficient, to_coefficient
from loopk.core.laurent import LaurentPoly
from loopk.core.parsing import render_poly, render_series
from loopk.core.qseries import QLaurentSeries
from loopk.errors import ComputationError, InputError, MissingChernNumberError
from loopk.services.fgl_service import FGLService, LineVariable, create_fgl_service


logger = logging.getLogger(__name__)

Partition = Tuple[int, ...]

DENSITY_KINDS = ("sigma", "abs")

_CHERN_FACTOR = re.compile(r"^c(\d+)(?:\^(\d+))?$")


# ============================================================================
# CHERN DATA
# ============================================================================

def partitions(n: int, largest: Optional[int] = None) -> List[Partition]:
    """Partitions of n as non-increasing tuples; partitions(0) = [()]"""
    if n == 0:
        return [()]
    largest = n if largest is None else largest
    result = []
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            result.append((first,) + rest)
    return result


def parse_partition(key: str) -> Partition:
    """ "c1^2*c2" -> (2, 1, 1); "1" or "" is the empty partition"""
    text = key.replace(" ", "")
    if text in ("", "1"):
        return ()
    parts: List[int] = []
    for factor in re.split(r"[*·]", text):
        match = _CHERN_FACTOR.match(factor)
        if not match or int(match.group(1)) < 1:
            raise InputError(f"malformed Chern monomial {key!r}; expected e.g. 'c1^2' or 'c1*c2'")
        parts.extend([int(match.group(1))] * int(match.group(2) or 1))
    return tuple(sorted(parts, reverse=True))


def render_partition(partition: Partition) -> str:
    if not partition:
        return "1"
    factors = []
    for index in sorted(set(partition)):
        count = partition.count(index)
        factors.append(f"c{index}" if count == 1 else f"c{index}^{count}")
    return "*".join(factors)


@dataclass(frozen=True)
class ChernData:
    """Complex dimension and Chern numbers indexed by partitions of the dimension"""
    dim: int
    numbers: Mapping[Partition, int] = field(hash=False)

    def __post_init__(self):
        if self.dim < 0:
            raise InputError(f"dimension must be >= 0, got {self.dim}")
        for partition in self.numbers:
            if sum(partition) != self.dim:
                raise InputError(
                    f"Chern monomial {render_partition(partition)} has degree {sum(partition)}, not {self.dim}"
                )

    @classmethod
    def from_payload(cls, dim: int, chern: Mapping[str, object]) -> "ChernData":
        numbers = {parse_partition(key): int(to_coefficient(value)) for key, value in chern.items()}
        if dim == 0 and not numbers:
            numbers = {(): 1}
        return cls(dim, numbers)

    @classmethod
    def point(cls) -> "ChernData":
        return cls(0, {(): 1})

    def missing(self) -> List[Partition]:
        return [p for p in partitions(self.dim) if p not in self.numbers]

    def require_complete(self) -> None:
        absent = self.missing()
        if absent:
            raise MissingChernNumberError(
                f"missing Chern numbers: {', '.join(render_partition(p) for p in absent)}"
            )

    def number(self, partition: Partition) -> int:
        if partition not in self.numbers:
            raise MissingChernNumberError(f"missing Chern number {render_partition(partition)}")
        return self.numbers[partition]

    def __add__(self, other: "ChernData") -> "ChernData":
        """Disjoint union"""
        if other.dim != self.dim:
            raise InputError(f"disjoint union needs equal dimensions, got {self.dim} and {other.dim}")
        keys = set(self.numbers) | set(other.numbers)
        return ChernData(self.dim, {k: self.numbers.get(k, 0) + other.numbers.get(k, 0) for k in keys})

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "chern": {render_partition(p): n for p, n in sorted(self.numbers.items())},
        }


def chern_product(first: ChernData, second: ChernData) -> ChernData:
    """Chern numbers of a product manifold from c(M x N) = c(M) c(N)"""
    first.require_complete()
    second.require_complete()
    n, m = first.dim, second.dim
    variables = tuple(f"a{i}" for i in range(1, n + 1)) + tuple(f"b{j}" for j in range(1, m + 1))

    def chern_class(k: int) -> LaurentPoly:
        total = LaurentPoly.zero(variables)
        for i in range(max(0, k - m), min(n, k) + 1):
            a = LaurentPoly.one(variables) if i == 0 else LaurentPoly.variable(variables, f"a{i}")
            b = LaurentPoly.one(variables) if k - i == 0 else LaurentPoly.variable(variables, f"b{k - i}")
            total = total + a * b
        return total

    numbers: Dict[Partition, int] = {}
    for partition in partitions(n + m):
        monomial = LaurentPoly.one(variables)
        for k in partition:
            monomial = monomial * chern_class(k)
        value = 0
        for exps, c in monomial.terms.items():
            left = tuple(sorted((i + 1 for i in range(n) for _ in range(exps[i])), reverse=True))
            right = tuple(sorted((j + 1 for j in range(m) for _ in range(exps[n + j])), reverse=True))
            if sum(left) == n and sum(right) == m:
                value += c * first.number(left) * second.number(right)
        numbers[partition] = int(value)
    return ChernData(n + m, numbers)


# ============================================================================
# DENSITIES
# ============================================================================

def _abs_density_coefficients(x_order: int) -> List[Fraction]:
    """x / (2 sinh(x/2)) = 1 / sum_j x^(2j) / (4^j (2j+1)!)"""
    series = [Fraction(0)] * (x_order + 1)
    for j in range(0, x_order // 2 + 1):
        series[2 * j] = Fraction(1, 4 ** j * math.factorial(2 * j + 1))
    inverse = [Fraction(1)] + [Fraction(0)] * x_order
    for n in range(1, x_order + 1):
        inverse[n] = -sum(series[i] * inverse[n - i] for i in range(1, n + 1))
    return inverse


@dataclass(frozen=True)
class DensitySeries:
    """Normalized orientation density as a polynomial in (q, x)"""
    kind: str
    x_order: int
    q_order: int
    poly: LaurentPoly

    def x_coefficient(self, j: int) -> QLaurentSeries:
        """Coefficient of x^j as a rational q-series"""
        terms = {exps[0]: c for exps, c in self.poly.terms.items() if exps[1] == j}
        return QLaurentSeries((), terms, self.q_order)

    @property
    def constant_term(self) -> QLaurentSeries:
        return self.x_coefficient(0)

    @property
    def is_even(self) -> bool:
        return all(exps[1] % 2 == 0 for exps in self.poly.terms)

    def q_slice(self, degree: int) -> List[Fraction]:
        """x-coefficients of the q^degree slice"""
        return [
            Fraction(self.poly.coefficient((degree, j)))
            for j in range(self.x_order + 1)
        ]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "x_order": self.x_order,
            "q_order": self.q_order,
            "coefficients": {str(j): render_series(self.x_coefficient(j)) for j in range(self.x_order + 1)},
        }


# ============================================================================
# TATE MODULES
# ============================================================================

@dataclass(frozen=True)
class TateModule:
    """Finitely presented Z[q^±]-module and its base change to Z((q))"""
    generators: Tuple[str, ...]
    relations: Tuple[Tuple[LaurentPoly, ...], ...]
    verdict: str
    rank: Optional[int] = None
    certificate: Mapping[str, object] = field(default_factory=dict, hash=False)
    diagnostic: Optional[str] = None

    @property
    def is_zero(self) -> bool:
        return self.verdict == "zero"

    @property
    def decided(self) -> bool:
        return self.verdict != "undecided"

    def to_dict(self) -> dict:
        payload = {
            "generators": list(self.generators),
            "relations": [[render_poly(p, compact=True) for p in column] for column in self.relations],
            "verdict": self.verdict,
            "rank": self.rank,
            "certificate": dict(self.certificate),
        }
        if self.diagnostic:
            payload["diagnostic"] = self.diagnostic
        return payload


def _is_tate_unit(p: LaurentPoly) -> bool:
    """Units of Z((q)) among Laurent polynomials: lowest coefficient ±1"""
    if p.is_zero:
        return False
    low = p.min_exponent("q")
    return abs(p.coefficient((low,))) == 1


def series_coefficients(series: QLaurentSeries, start: int = 0) -> List[str]:
    """Rendered rational coefficients of a scalar series from q^start through its order"""
    top = series.order if series.order is not None else (series.highest_degree or 0)
    values = []
    for d in range(start, top + 1):
        coeff = series.coefficient(d)
        values.append(render_coefficient(coeff.constant_value) if not coeff.is_zero else "0")
    return values


# ============================================================================
# GENUS SERVICE
# ============================================================================

class GenusService:
    """
    Characteristic numbers of sigma-type orientations and Tate base change

    The density x / sigma(e^x, q) equals A(x) eps_T(e^x)^-1 with
    A(x) = x / (2 sinh(x/2)); s = L^(1/2) specializes to e^(x/2).
    """

    def __init__(self, fgl: FGLService):
        self.fgl = fgl
        self.line = LineVariable()

    # ========================================================================
    # DENSITIES
    # ========================================================================

    @staticmethod
    def _truncate(poly: LaurentPoly, q_order: int, x_order: int) -> LaurentPoly:
        return poly.filter_terms(lambda e: e[0] <= q_order and e[1] <= x_order)

    def _exponential(self, poly: LaurentPoly, x_order: int) -> LaurentPoly:
        """sum c_n s^n -> sum c_n e^(nx/2), as a polynomial in x"""
        terms: Dict[Tuple[int, ...], Fraction] = {}
        for (n,), c in poly.terms.items():
            for j in range(x_order + 1):
                terms[(j,)] = terms.get((j,), 0) + Fraction(c) * Fraction(n, 2) ** j / math.factorial(j)
        return LaurentPoly(("x",), terms)

    def _epsilon_power(self, power: int, q_order: int, x_order: int) -> LaurentPoly:
        """eps_T(e^x)^power as a polynomial in (q, x)"""
        if q_order == 0 or power == 0:
            return LaurentPoly.one(("q", "x"))
        series = self.fgl.epsilon_unit(self.line, q_order) ** power
        terms: Dict[Tuple[int, int], Fraction] = {}
        for degree, coeff in series.items():
            for (j,), c in self._exponential(coeff, x_order).terms.items():
                terms[(degree, j)] = c
        return LaurentPoly(("q", "x"), terms)

    def _abs_poly(self, x_order: int) -> LaurentPoly:
        coefficients = _abs_density_coefficients(x_order)
        return LaurentPoly(("q", "x"), {(0, j): c for j, c in enumerate(coefficients)})

    def density_from_orientation(self, kind: str, x_order: int, q_order: int, genus: int = 0) -> DensitySeries:
        """
        Orientation density

        Args:
            kind: "sigma" for x / sigma(e^x, q), "abs" for x / (2 sinh(x/2))
            x_order: truncation in x
            q_order: truncation in q
            genus: g for the TFT density A(x) eps_T(e^x)^(g-1); 0 gives the sigma density

        Returns:
            DensitySeries with constant term 1
        """
        if kind not in DENSITY_KINDS:
            raise InputError(f"density kind must be one of {', '.join(DENSITY_KINDS)}, got {kind!r}")
        if x_order < 1 or q_order < 0:
            raise InputError(f"orders must satisfy x_order >= 1 and q_order >= 0, got {x_order}, {q_order}")
        if genus < 0:
            raise InputError(f"genus must be >= 0, got {genus}")
        poly = self._abs_poly(x_order)
        if kind == "sigma":
            poly = self._truncate(poly * self._epsilon_power(genus - 1, q_order, x_order), q_order, x_order)
        return DensitySeries(kind=kind, x_order=x_order, q_order=q_order, poly=poly)

    # ========================================================================
    # CHARACTERISTIC NUMBERS
    # ========================================================================

    def characteristic_number(self, density: DensitySeries, manifold: ChernData) -> QLaurentSeries:
        """
        Pair prod_i d(x_i) with the Chern numbers of the manifold

        log d(x) = sum_j a_j x^j turns the product into exp(sum_j a_j p_j);
        the power sums p_j become Chern classes through Newton's identities.

        Raises:
            InputError: x_order below the dimension
            MissingChernNumberError: incomplete Chern data
        """
        n = manifold.dim
        manifold.require_complete()
        if density.x_order < n:
            raise InputError(f"density known through x^{density.x_order}, dimension {n} needs more")
        order = density.q_order
        if n == 0:
            return QLaurentSeries.constant((), manifold.number(()), order)

        # log of the density, through x^n
        f = self._truncate(density.poly - 1, order, n)
        log = LaurentPoly.zero(("q", "x"))
        power = LaurentPoly.one(("q", "x"))
        for k in range(1, n + 1):
            power = self._truncate(power * f, order, n)
            log = log + power.scale(Fraction((-1) ** (k + 1), k))

        variables = ("q",) + tuple(f"c{i}" for i in range(1, n + 1))
        weights = (0,) + tuple(range(1, n + 1))

        def weight(exps: Sequence[int]) -> int:
            return sum(w * e for w, e in zip(weights, exps))

        def keep(poly: LaurentPoly) -> LaurentPoly:
            return poly.filter_terms(lambda e: e[0] <= order and weight(e) <= n)

        chern = [None] + [LaurentPoly.variable(variables, f"c{i}") for i in range(1, n + 1)]
        power_sums: List[Optional[LaurentPoly]] = [None]
        for j in range(1, n + 1):
            p = LaurentPoly.zero(variables)
            for i in range(1, j):
                p = p + (chern[i] * power_sums[j - i]).scale((-1) ** (i - 1))
            p = p + chern[j].scale((-1) ** (j - 1) * j)
            power_sums.append(keep(p))

        exponent = LaurentPoly.zero(variables)
        for j in range(1, n + 1):
            a_j = LaurentPoly(
                variables,
                {(exps[0],) + (0,) * n: c for exps, c in log.terms.items() if exps[1] == j},
            )
            exponent = exponent + keep(a_j * power_sums[j])

        total = LaurentPoly.one(variables)
        term = LaurentPoly.one(variables)
        for k in range(1, n + 1):
            term = keep(term * exponent).scale(Fraction(1, k))
            total = total + term

        values: Dict[int, Fraction] = {}
        for exps, c in total.terms.items():
            if weight(exps) != n:
                continue
            partition = tuple(sorted((i for i in range(1, n + 1) for _ in range(exps[i])), reverse=True))
            values[exps[0]] = values.get(exps[0], 0) + Fraction(c) * manifold.number(partition)
        return QLaurentSeries((), values, order)

    def witten_genus(self, manifold: ChernData, q_order: int) -> QLaurentSeries:
        """Characteristic number of the sigma density; q^0 is the A-hat genus"""
        density = self.density_from_orientation("sigma", max(manifold.dim, 1), q_order)
        return self.characteristic_number(density, manifold)

    def a_hat_genus(self, manifold: ChernData) -> Fraction:
        density = self.density_from_orientation("abs", max(manifold.dim, 1), 0)
        return Fraction(self.characteristic_number(density, manifold).coefficient(0).constant_value)

    def tft_invariant(self, manifold: ChernData, genus: int, q_order: int) -> QLaurentSeries:
        """pi_dagger eps_T(TM)^g: density A(x) eps_T(e^x)^(g-1); g = 0 is the Witten genus"""
        density = self.density_from_orientation("sigma", max(manifold.dim, 1), q_order, genus=genus)
        return self.characteristic_number(density, manifold)

    @staticmethod
    def euler_characteristic(manifold: ChernData) -> int:
        """Top Chern number c_n[M]"""
        if manifold.dim == 0:
            return manifold.numbers.get((), 1)
        return manifold.number((manifold.dim,))

    def tft_report(self, manifold: ChernData, genus: int, q_order: int) -> dict:
        """TFT value alongside the Euler characteristic (compared, never asserted equal)"""
        value = self.tft_invariant(manifold, genus, q_order)
        report = {
            "genus": genus,
            "q_order": q_order,
            "series": render_series(value),
            "coefficients": series_coefficients(value),
        }
        if genus == 1:
            report["euler_characteristic"] = self.euler_characteristic(manifold)
        return report

    # ========================================================================
    # TATE BASE CHANGE
    # ========================================================================

    @staticmethod
    def khat_orbit(n: int, q_order: int) -> TateModule:
        """
        K of the orbit T/C after base change to Z((q)): always zero

        C = Z/n (n >= 1) gives Z[q]/(q^n - 1), annihilated by the unit
        q^n - 1 of Z((q)); (q^n - 1) * sum_k q^(nk) = -1. n = 0 is the free
        orbit, Z[q^±]/(q - 1).
        """
        if n < 0:
            raise InputError(f"orbit order must be >= 0, got {n}")
        if q_order < 0:
            raise InputError(f"q-order must be >= 0, got {q_order}")
        step = 1 if n == 0 else n
        annihilator = LaurentPoly.variable(("q",), "q", step) - 1
        witness = QLaurentSeries((), {step * k: 1 for k in range(q_order // step + 1)}, q_order)
        product = QLaurentSeries.from_q_polynomial(annihilator, q="q") * witness
        check = (product + 1).truncate(q_order)
        if not check.is_zero:
            raise ComputationError(f"certificate for n={n} failed: {check}")
        logger.debug(f"✅ (q^{step} - 1) * sum q^({step}k) = -1 through q^{q_order}")
        return TateModule(
            generators=("g0",),
            relations=((annihilator,),),
            verdict="zero",
            rank=0,
            certificate={
                "annihilator": render_poly(annihilator),
                "witness": render_series(witness),
                "inverse": render_series(-witness),
                "verified_through": q_order,
            },
        )

    @staticmethod
    def tate_base_change(matrix: Sequence[Sequence[LaurentPoly]], q_order: int = 10,
                         generators: Optional[Sequence[str]] = None) -> TateModule:
        """
        Decide M (x) Z((q)) for M = Z[q^±]^rows / (columns of matrix)

        Unit entries (lowest coefficient ±1) are pivoted away with
        fraction-free column operations; each pivot kills one generator.

        Returns:
            TateModule with verdict "zero", "free" (rank r) or "undecided"
        """
        rows = [list(r) for r in matrix]
        n = len(rows)
        labels = list(generators) if generators is not None else [f"g{i}" for i in range(n)]
        if len(labels) != n:
            raise InputError(f"{len(labels)} generator labels for {n} rows")
        cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise InputError("presentation matrix rows must have equal length")
            for entry in r:
                if entry.variables != ("q",):
                    raise InputError(f"entries must be Laurent polynomials in q, got {entry.variables}")
        relations = tuple(tuple(rows[i][j] for i in range(n)) for j in range(cols))

        live = list(range(n))
        columns = list(range(cols))
        pivots: List[str] = []
        while True:
            pivot = next(
                ((i, j) for j in columns for i in live if _is_tate_unit(rows[i][j])),
                None,
            )
            if pivot is None:
                break
            i, j = pivot
            p = rows[i][j]
            pivots.append(f"{labels[i]}: {render_poly(p, compact=True)}")
            for c in columns:
                if c == j:
                    continue
                factor = rows[i][c]
                for r in live:
                    rows[r][c] = p * rows[r][c] - rows[r][j] * factor
            live.remove(i)
            columns.remove(j)

        remaining = [labels[i] for i in live]
        if not live:
            verdict, rank = "zero", 0
        elif all(rows[i][j].is_zero for i in live for j in columns):
            verdict, rank = "free", len(live)
        else:
            leftover = [[render_poly(rows[i][j], compact=True) for j in columns] for i in live]
            return TateModule(
                generators=tuple(labels),
                relations=relations,
                verdict="undecided",
                certificate={"pivots": pivots, "remaining": remaining},
                diagnostic=f"no unit entry left in the reduced relations {leftover}",
            )
        logger.debug(f"✅ Tate base change: {verdict} ({len(pivots)} pivots)")
        return TateModule(
            generators=tuple(labels),
            relations=relations,
            verdict=verdict,
            rank=rank,
            certificate={"pivots": pivots, "basis": remaining, "q_order": q_order},
        )

    def localize_space(self, cells: Iterable[Union[str, int]], q_order: int = 10) -> TateModule:
        """
        A disjoint union of T-orbits after base change: only fixed points survive

        Cells are "fixed", "free" or an integer n for the orbit T/Z_n.
        """
        labels: List[str] = []
        annihilators: List[Optional[LaurentPoly]] = []
        for index, cell in enumerate(cells):
            text = str(cell).strip().lower()
            if text in ("fixed", "point", "pt"):
                labels.append(f"fixed{index}")
                annihilators.append(None)
                continue
            if text == "free":
                step = 1
            else:
                try:
                    step = int(text.removeprefix("z/"))
                except ValueError:
                    raise InputError(f"cell must be 'fixed', 'free' or an orbit order n >= 1, got {cell!r}")
                if step < 1:
                    raise InputError(f"orbit order must be >= 1, got {cell!r}")
            labels.append(f"orbit{index}")
            annihilators.append(LaurentPoly.variable(("q",), "q", step) - 1)

        zero = LaurentPoly.zero(("q",))
        relation_columns = [i for i, a in enumerate(annihilators) if a is not None]
        matrix = [
            [annihilators[i] if i == j else zero for j in relation_columns]
            for i in range(len(labels))
        ]
        module = self.tate_base_change(matrix, q_order, labels)
        fixed = sum(1 for a in annihilators if a is None)
        logger.info(f"✅ {len(labels)} cells localize to {module.rank} fixed points")
        certificate = dict(module.certificate)
        certificate["fixed_points"] = fixed
        return TateModule(
            generators=module.generators,
            relations=module.relations,
            verdict=module.verdict,
            rank=module.rank,
            certificate=certificate,
        )


# ============================================================================
# CONVENIENCE FUNCTIONS
# ============================================================================

def create_genus_service() -> GenusService:
    """Create GenusService backed by the default FGLService"""
    return GenusService(create_fgl_service())
