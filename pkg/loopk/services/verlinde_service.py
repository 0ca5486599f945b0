"""
Verlinde Service - Graded Colimits, Fusion Rings and Directed Colimits

The z-degree-m slice of the colimit of representation rings over the
parabolic poset, presented as an integer cokernel:
- colimit_cokernel: SU(2) slice of coker(phi_1 + phi_0) in a u-window
- stabilize: grows the window until two successive cokernels agree
- poset_colimit: any rank, K_T window modulo the kernels of the phi_{i}
- fusion_ring_su2 / fusion_quotient_product: the level-k fusion oracle
- conjecture_check: per-degree rank bookkeeping against dim V_(|m|-2)
- directed_colimit_mult: colim(M -> M -> ...) under multiplication by f

Windows: J bounds the monomial-symmetric coordinates j = 0..J of the
codomain slices; the domain is every u^a z^m whose images fit.
"""

import asyncio
import logging
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from loopk.core.laurent import LaurentPoly
from loopk.core.parsing import parse_poly, render_poly
from loopk.core.smith import SmithForm, lattice_membership, smith_normal_form
from loopk.errors import (
    ComputationError,
    InputError,
    StabilizationError,
    UnsupportedTypeError,
    WindowError,
)
from loopk.services.rep_ring_service import RepRingService, create_rep_ring_service


logger = logging.getLogger(__name__)


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True)
class GradedPresentation:
    """Integer presentation of one z-graded piece: Z^codomain / (columns of matrix)"""
    degree: int
    u_bound: int
    domain_labels: Tuple[str, ...]
    codomain_labels: Tuple[str, ...]
    matrix: Tuple[Tuple[int, ...], ...]
    smith: SmithForm
    stabilized: bool = False

    @property
    def rank(self) -> int:
        return self.smith.free_rank

    @property
    def torsion(self) -> Tuple[int, ...]:
        return self.smith.torsion

    def contains(self, vector: Sequence[int]) -> bool:
        """Whether a codomain vector lies in the image (is zero in the cokernel)"""
        return lattice_membership(self.smith, vector)

    def isomorphic_to(self, other: "GradedPresentation") -> bool:
        return self.rank == other.rank and self.torsion == other.torsion

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "rank": self.rank,
            "torsion": list(self.torsion),
            "stabilized": self.stabilized,
            "u_bound": self.u_bound,
        }


@dataclass(frozen=True)
class FusionRing:
    """SU(2) level-k fusion ring with basis V_0..V_k"""
    level: int
    coefficients: Dict[Tuple[int, int, int], int] = field(compare=False)

    @property
    def rank(self) -> int:
        return self.level + 1

    def coefficient(self, i: int, j: int, l: int) -> int:
        return self.coefficients.get((i, j, l), 0)

    def multiply(self, i: int, j: int) -> Dict[int, int]:
        """V_i * V_j as {l: N_ij^l}"""
        for x in (i, j):
            if not 0 <= x <= self.level:
                raise InputError(f"V_{x} is not a basis element at level {self.level}")
        return {l: n for l in range(self.rank) if (n := self.coefficient(i, j, l))}

    def is_commutative(self) -> bool:
        return all(
            self.coefficient(i, j, l) == self.coefficient(j, i, l)
            for i in range(self.rank) for j in range(self.rank) for l in range(self.rank)
        )

    def is_associative(self) -> bool:
        r = range(self.rank)
        for a, b, c, d in product(r, r, r, r):
            left = sum(self.coefficient(a, b, x) * self.coefficient(x, c, d) for x in r)
            right = sum(self.coefficient(b, c, x) * self.coefficient(a, x, d) for x in r)
            if left != right:
                return False
        return True

    def unit_is_v0(self) -> bool:
        return all(self.multiply(0, j) == {j: 1} for j in range(self.rank))

    @staticmethod
    def render_product(terms: Dict[int, int]) -> str:
        if not terms:
            return "0"
        parts = []
        for l in sorted(terms):
            n = terms[l]
            parts.append(f"V{l}" if n == 1 else f"{n}*V{l}")
        return " + ".join(parts)

    def table(self) -> Dict[str, str]:
        return {
            f"V{i}*V{j}": self.render_product(self.multiply(i, j))
            for i in range(self.rank) for j in range(i, self.rank)
        }

    def to_dict(self) -> dict:
        return {"level": self.level, "rank": self.rank, "fusion": self.table()}


@dataclass(frozen=True)
class LocalizedPolyModule:
    """Z[t][f^-1] presented as colim(Z[t] -f-> Z[t] -f-> ...)"""
    multiplier: LaurentPoly
    variable: str = "t"


@dataclass(frozen=True)
class DirectedColimitResult:
    member: bool
    stage: Optional[int]
    representative: Optional[LaurentPoly]

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "stage": self.stage,
            "representative": None if self.representative is None else render_poly(self.representative),
        }


# ============================================================================
# VERLINDE SERVICE
# ============================================================================

class VerlindeService:
    """
    Colimit presentations and the Verlinde oracle

    colimit_cokernel and stabilize need an SU(2) datum; poset_colimit works
    for any supported rank.
    """

    def __init__(self, rep: RepRingService):
        self.rep = rep
        self.datum = rep.datum

    def _require_rank_one(self) -> None:
        if self.datum.rank != 1:
            raise UnsupportedTypeError("colimit_cokernel is defined for SU(2); use poset_colimit for higher rank")

    # ========================================================================
    # SU(2) COKERNEL
    # ========================================================================

    def slice_coordinates(self, element: LaurentPoly, degree: int, twisted: bool, bound: int) -> Optional[List[int]]:
        """
        Monomial-symmetric coordinates j = 0..bound of a K_{H_I} element in z-degree `degree`

        The element is untwisted by z^-m (H_1) or (u/z)^m (H_0); None when an
        exponent falls outside the window.
        """
        shift = (degree, -degree) if twisted else (0, -degree)
        flat = element * LaurentPoly.monomial(self.rep.variables, shift)
        coords = [0] * (bound + 1)
        for (a, b), c in flat.terms.items():
            if b != 0:
                raise ComputationError(f"{element} is not homogeneous of z-degree {degree}")
            if abs(a) > bound:
                return None
            if a >= 0:
                coords[a] = c
            elif flat.coefficient((-a, 0)) != c:
                raise ComputationError(f"{element} is not symmetric after untwisting")
        return coords

    def colimit_cokernel(self, degree: int, u_bound: int, sign: int = 1) -> GradedPresentation:
        """
        Degree-m slice of coker(phi_1 + phi_0)

        Args:
            degree: z-degree m != 0
            u_bound: window J >= |m| + 2
            sign: +1, or -1 to present x -> (phi_1(x), -phi_0(x))

        Raises:
            InputError: m = 0
            WindowError: J < |m| + 2
        """
        self._require_rank_one()
        if degree == 0:
            raise InputError("z-degree 0 is excluded")
        if u_bound < abs(degree) + 2:
            raise WindowError(f"u-bound {u_bound} is below |m| + 2 = {abs(degree) + 2}")
        if sign not in (1, -1):
            raise InputError("sign must be +1 or -1")
        h1 = self.rep.index({1})
        h0 = self.rep.index({0})
        reach = u_bound + abs(degree) + 4
        labels: List[str] = []
        columns: List[List[int]] = []
        for a in range(-reach, reach + 1):
            x = LaurentPoly.monomial(self.rep.variables, (a, degree))
            first = self.slice_coordinates(self.rep.induction(h1, x), degree, False, u_bound)
            if first is None:
                continue
            second = self.slice_coordinates(self.rep.induction(h0, x), degree, True, u_bound)
            if second is None:
                continue
            labels.append(render_poly(x))
            columns.append(first + [sign * v for v in second])
        codomain = tuple(f"H1:{j}" for j in range(u_bound + 1)) + tuple(f"H0:{j}" for j in range(u_bound + 1))
        matrix = tuple(tuple(col[r] for col in columns) for r in range(len(codomain)))
        smith = smith_normal_form(matrix, rows=len(codomain))
        logger.debug(f"Cokernel at z^{degree}, J={u_bound}: {len(columns)} generators, rank {smith.free_rank}")
        return GradedPresentation(
            degree=degree,
            u_bound=u_bound,
            domain_labels=tuple(labels),
            codomain_labels=codomain,
            matrix=matrix,
            smith=smith,
        )

    def stabilize(self, degree: int, u_bound_max: int, sign: int = 1) -> GradedPresentation:
        """
        Grow J from |m| + 2 until the cokernels at J and J + 1 agree

        Raises:
            WindowError: J_max < |m| + 4
            StabilizationError: no agreement up to J_max
        """
        self._require_rank_one()
        if u_bound_max < abs(degree) + 4:
            raise WindowError(f"J_max {u_bound_max} is below |m| + 4 = {abs(degree) + 4}")
        bound = abs(degree) + 2
        previous = self.colimit_cokernel(degree, bound, sign)
        while bound + 1 <= u_bound_max:
            current = self.colimit_cokernel(degree, bound + 1, sign)
            if current.isomorphic_to(previous):
                logger.info(f"✅ z^{degree}: stabilized at J={bound + 1}, rank {current.rank}")
                return replace(current, stabilized=True)
            previous = current
            bound += 1
        raise StabilizationError(f"z^{degree}: cokernel did not stabilize by J={u_bound_max}")

    def module_relation_holds(self, degree: int, sign: int = 1) -> bool:
        """
        Sym^(|m|-1)(u + u^-1) annihilates the cokernel at z^m

        Checks that Sym^(|m|-1)(s) times each H_0 generator (u^j + u^-j,
        j <= |m| - 2) lies in the image, in a window wide enough to hold it.
        """
        self._require_rank_one()
        k = abs(degree) - 1
        if k < 1:
            return True
        bound = 2 * abs(degree) + 2
        presentation = self.colimit_cokernel(degree, bound, sign)
        relation = self.rep.standard_sym(k)
        for j in range(k):
            generator = self.rep.parse(f"u^{j} + u^-{j}" if j else "1")
            moved = generator * relation
            twisted = moved * LaurentPoly.monomial(self.rep.variables, (-degree, degree))
            coords = self.slice_coordinates(twisted, degree, True, bound)
            if coords is None:
                raise WindowError(f"Sym^{k} relation escapes the window J={bound}")
            vector = [0] * (bound + 1) + coords
            if not presentation.contains(vector):
                return False
        return True

    # ========================================================================
    # GENERAL POSET COLIMIT
    # ========================================================================

    def _dot(self, i: int, weight: Tuple[int, ...], degree: int) -> Tuple[int, ...]:
        """s_i . mu = s_i(mu) - alpha, the partner with phi_i(e^mu) = -phi_i(e^(s_i . mu))"""
        n = self.datum.rank
        if i == 0:
            theta = self.datum.highest_root_weight
            c = self.datum.theta_pairing(weight) + degree + 1
            return tuple(weight[j] - c * theta[j] for j in range(n))
        alpha = self.datum.simple_roots[i - 1]
        c = weight[i - 1] + 1
        return tuple(weight[j] - c * alpha[j] for j in range(n))

    def dot_fold(self, weight: Tuple[int, ...], degree: int) -> List[Tuple[int, ...]]:
        """
        Dot-action folding path of a level-m weight into the fundamental domain

        With nu = mu + rho and L = m + 2 - h the dot action is the affine
        action at level L; the domain is nu_i >= 0, <nu, theta^vee> <= -L
        for L < 0 and the mirror image for L > 0.
        """
        level = degree + 2 - self.datum.dual_coxeter
        if level == 0:
            raise InputError(f"z-degree {degree} is degenerate for this group (finite dot orbits)")
        # mirror the L > 0 case onto the L < 0 chamber
        flip = 1 if level < 0 else -1
        path = [tuple(weight)]
        current = tuple(weight)
        for _ in range(10000):
            nu = [flip * (x + 1) for x in current]
            negative = next((i for i, v in enumerate(nu) if v < 0), None)
            if negative is not None:
                current = self._dot(negative + 1, current, degree)
            elif self.datum.theta_pairing(nu) > abs(level):
                current = self._dot(0, current, degree)
            else:
                return path
            path.append(current)
        raise ComputationError("dot folding did not terminate")

    def poset_colimit(self, degree: int, u_bound: int) -> GradedPresentation:
        """
        Colimit over the whole parabolic poset in z-degree m

        K_T window modulo sum over i of ker phi_{i}: zero images kill a
        monomial, equal images up to sign identify two monomials. The window
        keeps the weights with |mu|_inf <= J whose dot-folding path stays
        inside the box, so every orbit meets it in a connected piece.
        """
        if degree == 0:
            raise InputError("z-degree 0 is excluded")
        n = self.datum.rank
        box = [w for w in product(range(-u_bound, u_bound + 1), repeat=n)]
        window = [
            w for w in box
            if all(max(abs(x) for x in step) <= u_bound for step in self.dot_fold(w, degree))
        ]
        position = {w: i for i, w in enumerate(window)}
        columns: List[List[int]] = []
        labels: List[str] = []
        for w in window:
            x = self.rep.monomial(w, degree)
            for i in range(n + 1):
                image = self.rep.induction({i}, x)
                if image.is_zero:
                    col = [0] * len(window)
                    col[position[w]] = 1
                    columns.append(col)
                    labels.append(f"ker phi_{i}: {render_poly(x)}")
                    continue
                partner = self._dot(i, w, degree)
                if partner not in position or partner <= w:
                    continue
                if self.rep.induction({i}, self.rep.monomial(partner, degree)) != -image:
                    raise ComputationError(f"phi_{i} does not identify {w} with {partner}")
                col = [0] * len(window)
                col[position[w]] = 1
                col[position[partner]] = 1
                columns.append(col)
                labels.append(f"ker phi_{i}: {render_poly(x)} + {render_poly(self.rep.monomial(partner, degree))}")
        matrix = tuple(tuple(col[r] for col in columns) for r in range(len(window)))
        smith = smith_normal_form(matrix, rows=len(window))
        return GradedPresentation(
            degree=degree,
            u_bound=u_bound,
            domain_labels=tuple(labels),
            codomain_labels=tuple(render_poly(self.rep.monomial(w, degree)) for w in window),
            matrix=matrix,
            smith=smith,
        )

    def stabilize_poset(self, degree: int, u_bound_max: int) -> GradedPresentation:
        bound = max(abs(degree) + 2, 2)
        previous = self.poset_colimit(degree, bound)
        while bound + 1 <= u_bound_max:
            current = self.poset_colimit(degree, bound + 1)
            if current.isomorphic_to(previous):
                return replace(current, stabilized=True)
            previous = current
            bound += 1
        raise StabilizationError(f"poset colimit at z^{degree} did not stabilize by J={u_bound_max}")

    # ========================================================================
    # FUSION RINGS
    # ========================================================================

    @staticmethod
    def fusion_ring_su2(level: int) -> FusionRing:
        """N_ij^l = 1 iff |i-j| <= l <= min(i+j, 2k-i-j) and l = i+j mod 2"""
        if level < 0:
            raise InputError(f"level must be >= 0, got {level}")
        coefficients = {}
        for i in range(level + 1):
            for j in range(level + 1):
                for l in range(abs(i - j), min(i + j, 2 * level - i - j) + 1):
                    if (l - i - j) % 2 == 0:
                        coefficients[(i, j, l)] = 1
        return FusionRing(level=level, coefficients=coefficients)

    @staticmethod
    def fusion_quotient_product(level: int, i: int, j: int) -> Dict[int, int]:
        """
        Sym^i * Sym^j in Z[s] / <Sym^(k+1)(s)>, reduced to the basis Sym^0..Sym^k

        Clebsch-Gordan expands products; Sym^L with L > k is reduced by the
        ideal element Sym^(k+1) Sym^(L-k-1), whose top term is Sym^L.
        """
        if level < 0:
            raise InputError(f"level must be >= 0, got {level}")

        def clebsch_gordan(a: int, b: int) -> Dict[int, int]:
            return {l: 1 for l in range(abs(a - b), a + b + 1, 2)}

        terms = clebsch_gordan(i, j)
        while True:
            top = max((l for l, c in terms.items() if c and l > level), default=None)
            if top is None:
                break
            c = terms[top]
            for l, n in clebsch_gordan(level + 1, top - level - 1).items():
                terms[l] = terms.get(l, 0) - c * n
        return {l: c for l, c in terms.items() if c}

    # ========================================================================
    # CONJECTURE CHECK
    # ========================================================================

    def degree_entry(self, degree: int, window_slack: int = 8) -> dict:
        """One degree of the rank check: computed rank vs dim V_(|m|-2)"""
        presentation = self.stabilize(degree, abs(degree) + window_slack)
        expected = abs(degree) - 1 if abs(degree) >= 2 else 0
        fusion_rank = self.fusion_ring_su2(abs(degree) - 2).rank if abs(degree) >= 2 else 0
        relation = self.module_relation_holds(degree) if abs(degree) >= 2 else True
        entry = presentation.to_dict()
        entry.update({
            "expected": expected,
            "fusion_rank": fusion_rank,
            "sym_relation": relation,
            "pass": presentation.rank == expected == fusion_rank and not presentation.torsion and relation,
        })
        return entry

    @staticmethod
    def check_degrees(k_max: int) -> List[int]:
        if k_max < 0:
            raise InputError(f"k_max must be >= 0, got {k_max}")
        top = k_max + 2
        return [m for d in range(1, top + 1) for m in (d, -d)]

    @staticmethod
    def _report(k_max: int, entries: List[dict]) -> dict:
        entries = sorted(entries, key=lambda e: (abs(e["degree"]), -e["degree"]))
        return {"k_max": k_max, "degrees": entries, "all_pass": all(e["pass"] for e in entries)}

    def conjecture_check(self, k_max: int) -> dict:
        """
        Rank at z^n equals dim V_(|n|-2) = |n| - 1 for 2 <= |n| <= k_max + 2, and 0 at |n| = 1

        Returns:
            {"k_max", "degrees": [per-degree entries], "all_pass"}
        """
        self._require_rank_one()
        entries = [self.degree_entry(m) for m in self.check_degrees(k_max)]
        return self._report(k_max, entries)

    async def conjecture_check_async(self, k_max: int) -> dict:
        """Same report with the per-degree computations run concurrently"""
        self._require_rank_one()
        degrees = self.check_degrees(k_max)
        entries = await asyncio.gather(*(asyncio.to_thread(self.degree_entry, m) for m in degrees))
        return self._report(k_max, list(entries))

    # ========================================================================
    # DIRECTED COLIMIT
    # ========================================================================

    @staticmethod
    def directed_colimit_mult(module: LocalizedPolyModule, element: LaurentPoly, max_stage: int = 64) -> DirectedColimitResult:
        """
        Membership of an element in Z[t][f^-1] and its stage representative

        The element is a member at stage s when element * f^s lies in Z[t]; the
        smallest such s is returned with representative element * f^s.
        """
        f = module.multiplier
        if not f.is_monomial:
            raise InputError(f"multiplier must be a monomial times a constant, got {f}")
        (exps, _), = f.terms.items()
        var = f.index(module.variable)
        if element.variables != f.variables:
            raise InputError(f"element variables {element.variables} differ from {f.variables}")
        if element.is_zero:
            return DirectedColimitResult(True, 0, element)
        d = exps[var]
        if d < 0:
            raise InputError("multiplier must be a polynomial (non-negative exponent)")
        low = element.min_exponent(module.variable)
        start = max(0, -(low // d)) if d > 0 else 0
        for stage in range(start, start + max_stage + 1):
            candidate = element * f ** stage
            if candidate.min_exponent(module.variable) >= 0 and candidate.is_integral:
                return DirectedColimitResult(True, stage, candidate)
        return DirectedColimitResult(False, None, None)


# ============================================================================
# CONVENIENCE FUNCTIONS
# ============================================================================

def create_verlinde_service(group: Optional[str] = None, cartan=None) -> VerlindeService:
    """
    Create VerlindeService

    Args:
        group: group alias, "su2" by default
        cartan: explicit Cartan matrix
    """
    return VerlindeService(create_rep_ring_service(group=group, cartan=cartan))


def localized_module(multiplier: str, variable: str = "t") -> LocalizedPolyModule:
    return LocalizedPolyModule(parse_poly(multiplier, (variable,)), variable)
