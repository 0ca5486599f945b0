"""
Representation Ring Service - Characters, Symmetric Powers and Induction

Torus characters are LaurentPoly values in (u, z) for rank 1 and
(u1, ..., un, z) otherwise; q is specialized to 1 here. The affine Weyl
group acts monomial-wise on exponent vectors (lambda, b):

    s_i(lambda, b) = (lambda - lambda_i alpha_i, b)        i >= 1
    s_0(lambda, b) = (s_theta(lambda) - b theta, b)

For SU(2) this reads s_1: u^a z^b -> u^-a z^b and s_0: u^a z^b -> u^(-a-2b) z^b,
so z/u is s_0-invariant and K_{H_0} = Z[u + u^-1, (z/u)^±1].

Induction phi_I(c) = sum over W_I of w(c / prod_{alpha in Phi_I^+}(1 - e^-alpha)),
computed with one exact division by the Weyl denominator.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from loopk.core.laurent import LaurentPoly, lp_exact_divide
from loopk.core.parsing import parse_poly, render_poly
from loopk.errors import ImproperIndexError, InputError, NonExactDivisionError, NotInvariantError
from loopk.services.weyl_service import (
    AffineWeylService,
    ParabolicIndex,
    RootDatum,
    WeylElement,
    create_weyl_service,
)


logger = logging.getLogger(__name__)


def torus_variables(rank: int) -> Tuple[str, ...]:
    if rank == 1:
        return ("u", "z")
    return tuple(f"u{i}" for i in range(1, rank + 1)) + ("z",)


@dataclass(frozen=True)
class ParabolicRing:
    """W_I-invariant subring of the torus characters with distinguished generators"""
    index: ParabolicIndex
    generators: Tuple[LaurentPoly, ...]
    invertible: Tuple[bool, ...]
    membership: Callable[[LaurentPoly], bool] = field(compare=False, repr=False)

    def contains(self, c: LaurentPoly) -> bool:
        return self.membership(c)

    def render(self) -> List[str]:
        return [
            f"({render_poly(g, compact=True)})^±1" if inv else render_poly(g, compact=True)
            for g, inv in zip(self.generators, self.invertible)
        ]


class RepRingService:
    """
    Representation rings of the torus and the parabolic subgroups H_I

    Preserves the exact conventions of the pushforward tables:
    - phi_1(z^k) = z^k, phi_1(z^k u^-1) = 0
    - phi_0(z^k) = (z/u)^k Sym^k(u + u^-1)
    - phi_0(z^-k) = -(u/z)^k Sym^(k-2)(u + u^-1)
    """

    def __init__(self, weyl: AffineWeylService):
        self.weyl = weyl
        self.datum: RootDatum = weyl.datum
        self.variables = torus_variables(self.datum.rank)
        self._subsystems: Dict[frozenset, Tuple[Tuple[int, ...], ...]] = {}

    # ========================================================================
    # ELEMENTS
    # ========================================================================

    def parse(self, text: str) -> LaurentPoly:
        return parse_poly(text, self.variables)

    def index(self, indices) -> ParabolicIndex:
        if isinstance(indices, ParabolicIndex):
            if indices.rank != self.datum.rank:
                raise ImproperIndexError(f"index set of rank {indices.rank} used with rank {self.datum.rank}")
            return indices
        if isinstance(indices, str):
            return ParabolicIndex.parse(indices, self.datum.rank)
        return ParabolicIndex(frozenset(indices), self.datum.rank)

    def _check(self, c: LaurentPoly) -> None:
        if c.variables != self.variables:
            raise InputError(f"character must use variables {self.variables}, got {c.variables}")

    def monomial(self, weight: Sequence[int], level: int, coeff: int = 1) -> LaurentPoly:
        return LaurentPoly.monomial(self.variables, tuple(weight) + (level,), coeff)

    # ========================================================================
    # WEYL ACTION
    # ========================================================================

    def act(self, element: WeylElement, c: LaurentPoly) -> LaurentPoly:
        self._check(c)
        return c.map_exponents(lambda exps: element.act(exps[:-1], exps[-1]) + (exps[-1],))

    def weyl_act(self, word: Sequence[int], c: LaurentPoly) -> LaurentPoly:
        """Apply the word s_{w1} s_{w2} ... s_{wk} (rightmost letter first)"""
        for i in reversed(list(word)):
            c = self.act(self.weyl.generator(i), c)
        return c

    def invariance_check(self, indices, c: LaurentPoly) -> bool:
        """True iff every s_i, i in I, fixes c (hence all of W_I does)"""
        index = self.index(indices)
        return all(self.act(self.weyl.generator(i), c) == c for i in index)

    def restrict(self, indices, c: LaurentPoly) -> LaurentPoly:
        """Inclusion K_{H_I} -> K_T"""
        index = self.index(indices)
        if not self.invariance_check(index, c):
            raise NotInvariantError(f"{c} is not W_{index.render()}-invariant")
        return c

    # ========================================================================
    # SYMMETRIC POWERS
    # ========================================================================

    def sym_power(self, c: LaurentPoly, k: int) -> LaurentPoly:
        """
        Character of Sym^k via Newton's identities k h_k = sum_i psi^i(c) h_(k-i)

        Sym^k = 0 for k < 0 and Sym^0 = 1.
        """
        if k < 0:
            return LaurentPoly.zero(c.variables)
        h = [LaurentPoly.one(c.variables)]
        adams = [None] + [c.adams(i) for i in range(1, k + 1)]
        for j in range(1, k + 1):
            acc = LaurentPoly.zero(c.variables)
            for i in range(1, j + 1):
                acc = acc + adams[i] * h[j - i]
            h.append(acc.exact_scalar_divide(j))
        return h[k]

    def standard_sym(self, k: int) -> LaurentPoly:
        """Sym^k(u + u^-1) = u^k + u^(k-2) + ... + u^-k for rank 1"""
        if self.datum.rank != 1:
            raise InputError("standard_sym is defined for rank 1")
        s = self.parse("u + u^-1")
        return self.sym_power(s, k)

    # ========================================================================
    # INDUCTION
    # ========================================================================

    def positive_subsystem(self, indices) -> Tuple[Tuple[int, ...], ...]:
        """Phi_I^+: roots spanned by the finite parts of alpha_i (i in I), positive in Phi^+"""
        index = self.index(indices)
        key = index.indices
        if key not in self._subsystems:
            seeds = [
                self.datum.highest_root_weight if i == 0 else self.datum.simple_roots[i - 1]
                for i in index
            ]
            roots = {g.linear(s) for g in self.weyl.weyl_group(index) for s in seeds}
            self._subsystems[key] = tuple(sorted(r for r in roots if self.datum.is_positive_weight(r)))
        return self._subsystems[key]

    def weyl_denominator(self, indices) -> LaurentPoly:
        result = LaurentPoly.one(self.variables)
        for alpha in self.positive_subsystem(indices):
            result = result * (1 - self.monomial(tuple(-x for x in alpha), 0))
        return result

    def induction(self, indices, c: LaurentPoly) -> LaurentPoly:
        """
        Holomorphic induction phi_I: K_T -> K_{H_I}

        Args:
            indices: parabolic index set I (proper)
            c: torus character

        Returns:
            W_I-invariant character

        Raises:
            NonExactDivisionError: the antisymmetrized numerator is not divisible
                by the Weyl denominator (a convention bug; never expected)
        """
        index = self.index(indices)
        self._check(c)
        if not index.indices:
            return c
        positives = self.positive_subsystem(index)
        positive_set = set(positives)
        numerator = LaurentPoly.zero(self.variables)
        for element in self.weyl.weyl_group(index):
            sign = 1
            shift = [0] * self.datum.rank
            for alpha in positives:
                image = element.linear(alpha)
                if image not in positive_set:
                    sign = -sign
                    shift = [s - x for s, x in zip(shift, image)]
            twist = self.monomial(tuple(-s for s in shift), 0, sign)
            numerator = numerator + twist * self.act(element, c)
        denominator = self.weyl_denominator(index)
        try:
            return lp_exact_divide(numerator, denominator)
        except NonExactDivisionError:
            logger.error(f"❌ Induction phi_{index.render()}({c}) left a remainder")
            raise

    # ========================================================================
    # PARABOLIC RINGS
    # ========================================================================

    def _orbit_sum(self, index: ParabolicIndex, weight: Sequence[int], level: int) -> Tuple[LaurentPoly, int]:
        seen = {}
        for element in self.weyl.weyl_group(index):
            seen[element.act(weight, level)] = True
        total = LaurentPoly.zero(self.variables)
        for image in seen:
            total = total + self.monomial(image, level)
        return total, len(seen)

    def parabolic_ring(self, indices) -> ParabolicRing:
        """
        Distinguished generators of K_{H_I}

        Level-0 generators are W_I-orbit sums of the fundamental monomials
        e^(±omega_i); a level-1 invariant monomial, when one exists, is an
        invertible generator (z for I without 0, z/u for SU(2) and I = {0}).
        """
        index = self.index(indices)
        n = self.datum.rank
        generators: List[LaurentPoly] = []
        invertible: List[bool] = []
        for i in range(n):
            omega = tuple(1 if j == i else 0 for j in range(n))
            total, size = self._orbit_sum(index, omega, 0)
            if size == 1:
                generators.append(total)
                invertible.append(True)
                continue
            negative, _ = self._orbit_sum(index, tuple(-x for x in omega), 0)
            for candidate in (total, negative):
                if candidate not in generators:
                    generators.append(candidate)
                    invertible.append(False)

        bound = 2 * max(self.datum.comarks) + 1
        fixed = [
            weight for weight in product(range(-bound, bound + 1), repeat=n)
            if all(self.weyl.generator(i).act(weight, 1) == weight for i in index)
        ]
        if fixed:
            best = min(fixed, key=lambda w: (sum(abs(x) for x in w), w))
            generators.append(self.monomial(best, 1))
            invertible.append(True)

        return ParabolicRing(
            index=index,
            generators=tuple(generators),
            invertible=tuple(invertible),
            membership=lambda c: self.invariance_check(index, c),
        )

    # ========================================================================
    # RENDERING
    # ========================================================================

    def render_parabolic(self, indices, c: LaurentPoly) -> str:
        """
        Factored form for rank 1 z-homogeneous elements, e.g. "(z/u)^3·(u^3+u+u^-1+u^-3)"

        Anything else is rendered compactly in expanded form.
        """
        index = self.index(indices)
        if self.datum.rank != 1 or c.is_zero:
            return render_poly(c, compact=True)
        degrees = {exps[1] for exps in c.terms}
        if len(degrees) != 1:
            return render_poly(c, compact=True)
        k = degrees.pop()
        if k == 0:
            return render_poly(c, compact=True)
        if 0 in index:
            base = "(z/u)" if k > 0 else "(u/z)"
            twist = base if abs(k) == 1 else f"{base}^{abs(k)}"
            remainder = c * LaurentPoly.monomial(self.variables, (k, -k))
        else:
            twist = "z" if k == 1 else f"z^{k}"
            remainder = c * LaurentPoly.monomial(self.variables, (0, -k))
        if remainder == 1:
            return twist
        if remainder == -1:
            return f"-{twist}"
        return f"{twist}·({render_poly(remainder, compact=True)})"


# ============================================================================
# CONVENIENCE FUNCTIONS
# ============================================================================

def create_rep_ring_service(group: Optional[str] = None, cartan=None) -> RepRingService:
    """
    Create RepRingService for a group alias or explicit Cartan matrix

    Args:
        group: "su2" (default), "su3", ...
        cartan: explicit Cartan matrix
    """
    return RepRingService(create_weyl_service(group=group, cartan=cartan))
