#!/usr/bin/env python3
"""
Acceptance Sweep for loopk

Runs every acceptance check against the services directly and prints a
summary. Independent oracles (closed forms, sympy series expansions, brute-force
orbit search) are used wherever one exists.

Usage:
    python3 scripts/run_acceptance.py

Exit Codes:
    0 - All checks passed
    1 - At least one check failed
"""

import random
import sys
import time
from collections import deque
from fractions import Fraction
from pathlib import Path
from typing import List

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from sympy import Rational, exp, expand, prod, series, sinh, symbols
from tqdm import tqdm

from loopk.core.laurent import LaurentPoly
from loopk.core.parsing import parse_poly
from loopk.core.qseries import QLaurentSeries
from loopk.services.fgl_service import LineVariable, create_fgl_service
from loopk.services.genus_service import ChernData, create_genus_service
from loopk.services.rep_ring_service import create_rep_ring_service
from loopk.services.verlinde_service import VerlindeService, create_verlinde_service, localized_module
from loopk.services.weyl_service import AlcovePoint, create_weyl_service


MANIFOLDS = {
    "CP1": ChernData.from_payload(1, {"c1": 2}),
    "CP2": ChernData.from_payload(2, {"c1^2": 9, "c2": 3}),
    "K3": ChernData.from_payload(2, {"c1^2": 0, "c2": 24}),
}


def progress(items, desc: str):
    return tqdm(items, desc=f"  {desc}", unit="case", leave=False)


# ============================================================================
# CHECKS
# ============================================================================

def check_pushforward_tables() -> bool:
    """Closed forms of phi_1 and phi_0 on z^k and z^k u^-1, 1 <= k <= 8"""
    print("🔍 Pushforward tables...")
    rep = create_rep_ring_service("su2")
    start = time.perf_counter()
    failures = []
    for k in progress(range(1, 9), "k"):
        z_over_u = rep.monomial((-k,), k)
        u_over_z = rep.monomial((k,), -k)
        expected = {
            ("1", (0,), k): rep.monomial((0,), k),
            ("1", (-1,), k): LaurentPoly.zero(rep.variables),
            ("0", (0,), k): z_over_u * rep.standard_sym(k),
            ("0", (-1,), k): z_over_u * rep.standard_sym(k - 1),
            ("0", (0,), -k): -(u_over_z * rep.standard_sym(k - 2)),
            ("0", (-1,), -k): -(u_over_z * rep.standard_sym(k - 1)),
        }
        for (indices, weight, level), value in expected.items():
            if rep.induction(indices, rep.monomial(weight, level)) != value:
                failures.append((indices, weight, level))
    elapsed = time.perf_counter() - start
    if failures:
        print(f"  ❌ {len(failures)} table entries differ, first: {failures[0]}")
        return False
    print(f"  ✅ 48 table entries in {elapsed:.2f}s")
    return True


def check_colimit_ranks() -> bool:
    """Stabilized graded pieces are free of rank |m| - 1 with the Sym relation"""
    print("🔍 Colimit pieces...")
    verlinde = create_verlinde_service("su2")
    degrees = [m for m in range(-8, 9) if abs(m) >= 2]
    for m in progress(degrees, "degree"):
        presentation = verlinde.stabilize(m, abs(m) + 8)
        if presentation.rank != abs(m) - 1 or presentation.torsion:
            print(f"  ❌ degree {m}: rank {presentation.rank}, torsion {presentation.torsion}")
            return False
        if not verlinde.module_relation_holds(m):
            print(f"  ❌ degree {m}: Sym^{abs(m) - 1} relation fails")
            return False
    print(f"  ✅ {len(degrees)} degrees free of rank |m| - 1")
    return True


def check_level_ranks() -> bool:
    print("🔍 Rank against dim V_(|n|-2)...")
    report = create_verlinde_service("su2").conjecture_check(6)
    if not report["all_pass"]:
        bad = [e for e in report["degrees"] if not e["pass"]]
        print(f"  ❌ failing degrees: {bad}")
        return False
    print(f"  ✅ {len(report['degrees'])} degrees agree")
    return True


def check_sigma_identity() -> bool:
    """sigma = (s - s^-1) eps, and the ABS product gives the same series"""
    print("🔍 Sigma identity...")
    fgl = create_fgl_service()
    line = LineVariable()
    sigma = fgl.sigma_class(line, 20)
    factor = parse_poly("s - s^-1", line.variables)
    if sigma != fgl.epsilon_unit(line, 20) * factor:
        print("  ❌ sigma differs from (s - s^-1) eps")
        return False
    if sigma != fgl.abs_renormalized_sigma(line, 20):
        print("  ❌ ABS product differs from sigma")
        return False
    print("  ✅ agree through q^20")
    return True


def check_todd_identity() -> bool:
    print("🔍 Todd identity...")
    fgl = create_fgl_service()
    law = fgl.law("mult")
    variables = ("L", "q")
    e = parse_poly("1 - L", variables)
    for k in progress(range(1, 11), "k"):
        q_class = parse_poly(f"1 - q^{k}", variables)
        if fgl.fgl_sum(law, e, q_class) != parse_poly(f"1 - q^{k}*L", variables):
            print(f"  ❌ k = {k}")
            return False
    print("  ✅ 1 <= k <= 10")
    return True


def check_localization() -> bool:
    print("🔍 Localization certificates...")
    genus = create_genus_service()
    for n in progress(range(0, 11), "orbit"):
        module = genus.khat_orbit(n, 100)
        if not module.is_zero:
            print(f"  ❌ orbit {n}: {module.verdict}")
            return False
    print("  ✅ free orbit and 1 <= n <= 10 vanish through q^100")
    return True


def witten_x2_coefficient(q_order: int) -> List[Fraction]:
    """
    q-coefficients of [x^2] (x/2)/sinh(x/2) prod_{n >= 1} (1 - q^n)^2 / ((1 - q^n e^x)(1 - q^n e^-x))

    Expanded with sympy straight from the product: each factor through x^2, then in q.
    """
    x, q = symbols("x q")
    factors = [(x / 2) / sinh(x / 2)]
    for n in range(1, q_order + 1):
        factors.append((1 - q**n) ** 2 / ((1 - q**n * exp(x)) * (1 - q**n * exp(-x))))
    x2 = expand(prod(series(f, x, 0, 3).removeO() for f in factors)).coeff(x, 2)
    expansion = expand(series(x2, q, 0, q_order + 1).removeO())
    coefficients = []
    for n in range(q_order + 1):
        value = Rational(expansion.coeff(q, n))
        coefficients.append(Fraction(int(value.p), int(value.q)))
    return coefficients


def witten_oracle(manifold: ChernData, q_order: int) -> QLaurentSeries:
    """p1 times the x^2 coefficient in complex dimension 2, zero in dimension 1 (the series is even)"""
    if manifold.dim == 1:
        return QLaurentSeries.zero((), q_order)
    p1 = manifold.number((1, 1)) - 2 * manifold.number((2,))
    terms = {n: p1 * c for n, c in enumerate(witten_x2_coefficient(q_order))}
    return QLaurentSeries((), terms, q_order)


def check_genera() -> bool:
    print("🔍 Genus cross-checks...")
    genus = create_genus_service()
    for name, manifold in progress(MANIFOLDS.items(), "manifold"):
        genus_series = genus.witten_genus(manifold, 4)
        oracle = witten_oracle(manifold, 4)
        if genus_series != oracle:
            print(f"  ❌ {name}: {genus_series} vs {oracle}")
            return False
        if genus_series.coefficient(0).constant_value != genus.a_hat_genus(manifold):
            print(f"  ❌ {name}: q^0 is not the A-hat genus")
            return False
    print("  ✅ CP1, CP2, K3 match the expanded product through q^4")
    return True


def check_tft() -> bool:
    print("🔍 TFT invariants...")
    genus = create_genus_service()
    for name, manifold in progress(MANIFOLDS.items(), "manifold"):
        if genus.tft_invariant(manifold, 0, 6) != genus.witten_genus(manifold, 6):
            print(f"  ❌ {name}: g = 0 differs from the Witten genus")
            return False
        torus = genus.tft_invariant(manifold, 1, 10)
        if any(d > 0 for d, _ in torus.items()):
            print(f"  ❌ {name}: g = 1 depends on q")
            return False
        report = genus.tft_report(manifold, 1, 10)
        print(f"  ℹ️  {name}: g = 1 gives {report['coefficients'][0]}, Euler characteristic {report['euler_characteristic']}")
    print("  ✅ g = 0 is the Witten genus, g = 1 is q-independent")
    return True


def brute_force_fold(weyl, point: AlcovePoint, depth: int = 12):
    """Breadth-first search over reflections for the orbit point in the closed alcove"""
    seen = {point}
    queue = deque([(point, 0)])
    while queue:
        current, length = queue.popleft()
        if weyl.contains(current):
            return current
        if length == depth:
            continue
        for i in range(weyl.rank + 1):
            image = weyl.reflect_point(i, current)
            if image not in seen:
                seen.add(image)
                queue.append((image, length + 1))
    return None


def check_folding() -> bool:
    print("🔍 Folding...")
    rng = random.Random(2024)
    services = [create_weyl_service("su2"), create_weyl_service("su3")]
    brute_checked = 0
    for trial in progress(range(1000), "point"):
        weyl = services[trial % 2]
        point = AlcovePoint(tuple(Fraction(rng.randint(-30, 30), rng.randint(1, 9)) for _ in range(weyl.rank)))
        folded, word = weyl.affine_fold(point)
        if not weyl.contains(folded) or weyl.apply_word(word, folded) != point:
            print(f"  ❌ {point.render()} folds to {folded.render()} with a bad word")
            return False
        if weyl.affine_fold(folded) != (folded, ()):
            print(f"  ❌ folding {folded.render()} is not idempotent")
            return False
        if len(word) <= 12:
            found = brute_force_fold(weyl, point)
            if found != folded or weyl.alcove_face(found) != weyl.alcove_face(folded):
                print(f"  ❌ brute force disagrees at {point.render()}")
                return False
            brute_checked += 1
    print(f"  ✅ 1000 points folded, {brute_checked} confirmed by orbit search")
    return True


def check_directed_colimit() -> bool:
    print("🔍 Directed colimit...")
    module = localized_module("t")
    for k in range(0, 6):
        result = VerlindeService.directed_colimit_mult(module, parse_poly(f"t^-{k}", ("t",)))
        if not result.member or result.stage != k:
            print(f"  ❌ t^-{k}: {result.to_dict()}")
            return False
    print("  ✅ t^-k enters at stage k for k <= 5")
    return True


# ============================================================================
# MAIN
# ============================================================================

def main() -> int:
    print("=" * 70)
    print("🧪 loopk Acceptance Sweep")
    print("=" * 70)

    checks = [
        ("Pushforward tables", check_pushforward_tables),
        ("Colimit pieces", check_colimit_ranks),
        ("Level ranks", check_level_ranks),
        ("Sigma identity", check_sigma_identity),
        ("Todd identity", check_todd_identity),
        ("Localization", check_localization),
        ("Genus cross-checks", check_genera),
        ("TFT", check_tft),
        ("Folding", check_folding),
        ("Directed colimit", check_directed_colimit),
    ]

    passed = 0
    failed = 0
    for name, check in checks:
        try:
            if check():
                passed += 1
            else:
                failed += 1
                print(f"\n❌ {name} failed")
        except Exception as e:
            failed += 1
            print(f"\n❌ {name} raised {type(e).__name__}: {e}")

    print("\n" + "=" * 70)
    print(f"📊 Results: {passed}/{len(checks)} checks passed")
    if failed == 0:
        print("✅ All acceptance checks passed!")
        return 0
    print(f"❌ {failed} check(s) failed")
    return 1


if __name__ == "__main__":
    sys.exit(main())
