"""
loopk - Command Line Entry Point

Subcommands route to exactly one service operation and print one JSON
document on stdout (sorted keys, byte-deterministic). Logging goes to stderr.

Exit codes:
- 0: success
- 2: input error (malformed payload, violated precondition)
- 3: computation error or undecided verdict

Usage:
    python -m loopk.cli.main pushforward --group su2 --parabolic 0 --element "z^3"
    python -m loopk.cli.main fold --point 1.7
    python -m loopk.cli.main witten-genus --manifold k3.json --q-order 4
"""

import argparse
import asyncio
import json
import logging
import sys
from typing import Any, Awaitable, Callable, Dict, List, Optional, Union

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from loopk.cli.dependencies import (
    build_request,
    get_fgl_service,
    get_genus_service,
    get_rep_ring_service,
    get_verlinde_service,
    get_weyl_service,
    manifold_data,
    q_matrix,
    require,
)
from loopk.cli.models import CommandRequest, Report
from loopk.config import get_settings
from loopk.core.laurent import LaurentPoly
from loopk.core.coefficients import render_decimal
from loopk.core.parsing import GRAMMAR_VERSION, parse_poly, parse_series, render_poly, render_series
from loopk.errors import InputError, LoopKError, describe
from loopk.services.fgl_service import LineVariable, LoopNormalModel, SymmetricLoopRep
from loopk.services.genus_service import series_coefficients
from loopk.services.verlinde_service import localized_module
from loopk.services.weyl_service import AlcovePoint, ParabolicIndex


logger = logging.getLogger("loopk")

Result = Union[Dict[str, Any], Report]


# ============================================================================
# LOGGING SETUP
# ============================================================================

def setup_logging(verbose: bool = False) -> logging.Logger:
    """Console handler on stderr; stdout stays reserved for the report"""
    level = logging.DEBUG if verbose else get_settings().logging_level
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s - %(levelname)s - %(message)s"))
    root = logging.getLogger("loopk")
    root.handlers = [handler]
    root.setLevel(level)
    root.propagate = False
    return root


# ============================================================================
# HANDLERS
# ============================================================================

def _q_order(request: CommandRequest) -> int:
    return request.q_order if request.q_order is not None else get_settings().default_q_order


def handle_pushforward(request: CommandRequest) -> Result:
    require(request, "element")
    rep = get_rep_ring_service(request)
    element = rep.parse(request.element)
    image = rep.induction(request.parabolic, element)
    return {
        "group": rep.datum.name,
        "parabolic": rep.index(request.parabolic).render(),
        "element": render_poly(element, compact=True),
        "result": rep.render_parabolic(request.parabolic, image),
        "expanded": render_poly(image, compact=True),
    }


def handle_colimit(request: CommandRequest) -> Result:
    require(request, "degree")
    verlinde = get_verlinde_service(request)
    if request.u_bound is not None:
        presentation = verlinde.colimit_cokernel(request.degree, request.u_bound)
    else:
        presentation = verlinde.stabilize(request.degree, abs(request.degree) + 8)
    return presentation.to_dict()


def handle_verlinde(request: CommandRequest) -> Result:
    require(request, "level")
    verlinde = get_verlinde_service(request)
    return verlinde.fusion_ring_su2(request.level).to_dict()


async def handle_conjecture_check(request: CommandRequest) -> Result:
    verlinde = get_verlinde_service(request)
    report = await verlinde.conjecture_check_async(request.k_max)
    return Report(command=request.command, result=report, exit_code=0 if report["all_pass"] else 3)


def _json_coordinate(value) -> Union[int, float, str]:
    """Integers and terminating decimals as JSON numbers when the float round-trips exactly, else "p/q" """
    text = render_decimal(value)
    if "/" in text:
        return text
    if "." not in text:
        return int(text)
    number = float(text)
    return number if repr(number) == text else text


def _json_point(point: AlcovePoint):
    values = [_json_coordinate(c) for c in point.coords]
    return values[0] if len(values) == 1 else values


def handle_fold(request: CommandRequest) -> Result:
    require(request, "point")
    weyl = get_weyl_service(request)
    folded, word = weyl.affine_fold(AlcovePoint.parse(request.point))
    return {"point": _json_point(folded), "word": [f"s{i}" for i in word]}


def handle_face(request: CommandRequest) -> Result:
    require(request, "point")
    weyl = get_weyl_service(request)
    point = AlcovePoint.parse(request.point)
    face = weyl.alcove_face(point)
    return {
        "point": _json_point(point),
        "inside": face is not None,
        "face": face.render() if face is not None else None,
    }


def handle_sigma(request: CommandRequest) -> Result:
    fgl = get_fgl_service(request)
    line = LineVariable()
    order = _q_order(request)
    sigma = fgl.sigma_class(line, order)
    return {
        "q_order": order,
        "variable": "s = L^(1/2)",
        "series": render_series(sigma),
        "abs_renormalized_agrees": sigma == fgl.abs_renormalized_sigma(line, order),
    }


def handle_epsilon(request: CommandRequest) -> Result:
    fgl = get_fgl_service(request)
    line = LineVariable()
    order = _q_order(request)
    return {"q_order": order, "series": render_series(line.series_in_l(fgl.epsilon_unit(line, order)))}


def handle_euler_class(request: CommandRequest) -> Result:
    fgl = get_fgl_service(request)
    law = fgl.law(request.fgl)
    model = LoopNormalModel(tuple(request.roots), request.fourier, request.q_order)
    if request.renormalized:
        series = fgl.renormalized_euler_product(model)
    else:
        series = fgl.euler_normal_product(model, law)
    result = {
        "fgl": law.kind,
        "fourier": model.fourier,
        "roots": list(model.roots),
        "renormalized": request.renormalized,
        "series": render_series(series),
    }
    if law.kind == "additive" and not request.renormalized:
        result["polynomial"] = render_poly(series.coefficient(0))
    return result


def handle_fgl(request: CommandRequest) -> Result:
    require(request, "a")
    fgl = get_fgl_service(request)
    law = fgl.law(request.fgl)
    variables = request.variables or ["L", "q"]

    def parse(text: str):
        if law.kind == "custom":
            rest = [v for v in variables if v != "q"]
            return parse_series(text, rest, _q_order(request))
        return parse_poly(text, variables)

    a = parse(request.a)
    if request.k is not None:
        value = fgl.fgl_k_series(law, a, request.k)
        operation = f"[{request.k}](a)"
    else:
        require(request, "b")
        value = fgl.fgl_sum(law, a, parse(request.b))
        operation = "F(a, b)"
    rendered = render_poly(value) if isinstance(value, LaurentPoly) else render_series(value)
    return {"law": law.to_dict(), "operation": operation, "result": rendered}


def handle_witten_genus(request: CommandRequest) -> Result:
    genus = get_genus_service(request)
    manifold = manifold_data(request)
    order = _q_order(request)
    series = genus.witten_genus(manifold, order)
    return {
        "manifold": manifold.to_dict(),
        "q_order": order,
        "series": render_series(series),
        "coefficients": series_coefficients(series),
        "a_hat": render_series(series.truncate(0)),
    }


def handle_tft(request: CommandRequest) -> Result:
    genus = get_genus_service(request)
    manifold = manifold_data(request)
    report = genus.tft_report(manifold, request.genus, _q_order(request))
    report["manifold"] = manifold.to_dict()
    return report


def handle_localize(request: CommandRequest) -> Result:
    require(request, "orbit")
    genus = get_genus_service(request)
    return genus.khat_orbit(request.orbit, _q_order(request)).to_dict()


def handle_tate(request: CommandRequest) -> Result:
    genus = get_genus_service(request)
    module = genus.tate_base_change(q_matrix(request), _q_order(request))
    return Report(command=request.command, result=module.to_dict(), exit_code=0 if module.decided else 3)


def handle_weyl_group(request: CommandRequest) -> Result:
    weyl = get_weyl_service(request)
    index = ParabolicIndex.parse(request.parabolic, weyl.rank)
    group = weyl.weyl_group(index)
    return {
        "parabolic": index.render(),
        "order": len(group),
        "elements": ["·".join(g.word_names()) or "e" for g in group],
    }


def handle_poset(request: CommandRequest) -> Result:
    weyl = get_weyl_service(request)
    return weyl.parabolic_poset().to_dict()


def handle_poset_colimit(request: CommandRequest) -> Result:
    require(request, "degree")
    verlinde = get_verlinde_service(request)
    if request.u_bound is not None:
        return verlinde.poset_colimit(request.degree, request.u_bound).to_dict()
    return verlinde.stabilize_poset(request.degree, abs(request.degree) + 8).to_dict()


def handle_localize_space(request: CommandRequest) -> Result:
    require(request, "cells")
    genus = get_genus_service(request)
    module = genus.localize_space(request.cells, _q_order(request))
    return Report(command=request.command, result=module.to_dict(), exit_code=0 if module.decided else 3)


def handle_spin_pair(request: CommandRequest) -> Result:
    require(request, "k")
    fgl = get_fgl_service(request)
    certificate = fgl.spin_pairable(request.weights, request.k, request.variables or ["u"])
    return certificate.to_dict()


def handle_loop_truncate(request: CommandRequest) -> Result:
    fgl = get_fgl_service(request)
    rep = SymmetricLoopRep(invariant=tuple(request.invariant), default_mode=tuple(request.mode))
    weights = fgl.loop_truncate(rep, request.m)
    return {
        "m": request.m,
        "size": len(weights),
        "weights": [[w, d] for w, d in weights],
    }


def handle_directed_colimit(request: CommandRequest) -> Result:
    require(request, "element")
    verlinde = get_verlinde_service(request)
    module = localized_module(request.multiplier)
    element = parse_poly(request.element, (module.variable,))
    return verlinde.directed_colimit_mult(module, element).to_dict()


Handler = Callable[[CommandRequest], Union[Result, Awaitable[Result]]]

HANDLERS: Dict[str, Handler] = {
    "pushforward": handle_pushforward,
    "colimit": handle_colimit,
    "verlinde": handle_verlinde,
    "conjecture-check": handle_conjecture_check,
    "fold": handle_fold,
    "face": handle_face,
    "sigma": handle_sigma,
    "epsilon": handle_epsilon,
    "euler-class": handle_euler_class,
    "fgl": handle_fgl,
    "witten-genus": handle_witten_genus,
    "tft": handle_tft,
    "localize": handle_localize,
    "tate": handle_tate,
    "weyl-group": handle_weyl_group,
    "poset": handle_poset,
    "poset-colimit": handle_poset_colimit,
    "localize-space": handle_localize_space,
    "spin-pair": handle_spin_pair,
    "loop-truncate": handle_loop_truncate,
    "directed-colimit": handle_directed_colimit,
}


async def dispatch(request: CommandRequest) -> Report:
    """
    Route a validated request to its handler

    Raises:
        InputError: unknown subcommand or violated precondition
        ComputationError: failure inside the computation
    """
    handler = HANDLERS.get(request.command)
    if handler is None:
        raise InputError(f"unknown subcommand {request.command!r}")
    outcome = handler(request)
    if asyncio.iscoroutine(outcome):
        outcome = await outcome
    if isinstance(outcome, Report):
        return outcome
    return Report(command=request.command, result=outcome)


# ============================================================================
# OUTPUT
# ============================================================================

def to_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False)


def render_pretty(report: Report, console: Optional[Console] = None) -> None:
    """Key/value table of a report, as the migration summaries are printed"""
    console = console or Console()
    table = Table(
        title=f"🔢 loopk {report.command}",
        show_header=True,
        header_style="bold cyan",
        border_style="cyan",
    )
    table.add_column("Field", style="cyan")
    table.add_column("Value")
    for key in sorted(report.result):
        value = report.result[key]
        table.add_row(key, value if isinstance(value, str) else to_json(value) if value is not None else "-")
    console.print(table)
    status = "✅ OK" if report.exit_code == 0 else "⚠️ UNDECIDED / FAILED CHECK"
    console.print(Panel(f"[bold]{status}[/bold]", border_style="green" if report.exit_code == 0 else "yellow"))


# ============================================================================
# CLI INTERFACE
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", help="Group alias: su2 (default), su3, g2, spin5, ... or a type like B3")
    common.add_argument("--cartan", help="Cartan matrix as JSON (file path or inline), e.g. [[2,-1],[-1,2]]")
    common.add_argument("--q-order", type=int, dest="q_order", help="q-truncation order (default LOOPK_DEFAULT_Q_ORDER)")
    common.add_argument("--pretty", action="store_true", help="Render a rich table instead of JSON")
    common.add_argument("--verbose", action="store_true", help="Enable debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="loopk",
        description=f"Exact computations for loop-group K-theory (expression grammar v{GRAMMAR_VERSION})",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Holomorphic induction for SU(2)
  loopk pushforward --group su2 --parabolic 0 --element "z^3"

  # Fold a point into the fundamental alcove
  loopk fold --point 1.7

  # Witten genus of K3 through q^4
  loopk witten-genus --manifold '{"dim": 2, "chern": {"c1^2": 0, "c2": 24}}' --q-order 4
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("pushforward", "Holomorphic induction phi_I of a torus character")
    p.add_argument("--parabolic", default="0", help="Index set I, e.g. 0, 1, {0,1} (default: 0)")
    p.add_argument("--element", required=True, help='Character in u, z, e.g. "z^3" or "z^-2*u^-1"')

    p = add("colimit", "Graded piece of the colimit of representation rings (SU(2))")
    p.add_argument("--degree", type=int, required=True, help="z-degree m (nonzero)")
    p.add_argument("--u-bound", type=int, dest="u_bound", help="u-window J (default: stabilize)")

    p = add("verlinde", "SU(2) level-k fusion ring")
    p.add_argument("--level", type=int, required=True, help="Level k >= 0")

    p = add("conjecture-check", "Rank check of the graded colimit against dim V_(|n|-2)")
    p.add_argument("--k-max", type=int, dest="k_max", default=6, help="Largest level checked (default: 6)")

    p = add("fold", "Fold a point into the closed fundamental alcove (coordinates print as numbers when exact, else \"p/q\")")
    p.add_argument("--point", required=True, help='Coordinates, e.g. "1.7" or "1/2,1/3"')

    p = add("face", "Face index set of a point of the closed alcove")
    p.add_argument("--point", required=True, help='Coordinates, e.g. "0" or "1/2,1/2"')

    add("sigma", "sigma(L, q) through the q-order, in s = L^(1/2)")
    add("epsilon", "The unit eps_T(L) through the q-order")

    p = add("euler-class", "Euler class of the loop normal bundle, truncated at a Fourier cutoff")
    p.add_argument("--fgl", default="mult", help="add | mult (default: mult)")
    p.add_argument("--fourier", type=int, default=1, help="Fourier cutoff m >= 1 (default: 1)")
    p.add_argument("--roots", default="L", help="Comma-separated Chern root names (default: L)")
    p.add_argument("--renormalized", action="store_true", help="Divide by the leading unit")

    p = add("fgl", "Formal sum F(a, b) or k-series [k](a)")
    p.add_argument("--fgl", default="mult", help='add | mult | expression in x, y such as "x + y + x*y"')
    p.add_argument("--a", required=True, help="First argument")
    p.add_argument("--b", help="Second argument (formal sum)")
    p.add_argument("--k", type=int, help="k for the k-series of --a")
    p.add_argument("--variables", help="Comma-separated variables (default: L,q)")

    p = add("witten-genus", "Witten genus from Chern data")
    p.add_argument("--manifold", required=True, help='Manifold JSON (file or inline): {"dim": n, "chern": {...}}')

    p = add("tft", "TFT invariant pi_dagger eps_T(TM)^g")
    p.add_argument("--manifold", required=True, help="Manifold JSON (file or inline)")
    p.add_argument("--genus", type=int, default=0, help="Surface genus g >= 0 (default: 0)")

    p = add("localize", "Base change of K of the orbit T/(Z/n) to Z((q))")
    p.add_argument("--orbit", type=int, required=True, help="n >= 1 for T/(Z/n), 0 for the free orbit")

    p = add("tate", "Base change of a presented Z[q^±]-module to Z((q))")
    p.add_argument("--matrix", required=True, help='Relations as JSON rows of q-polynomials, e.g. [["q^2 - 1"]]')

    p = add("weyl-group", "Enumerate the finite group W_I")
    p.add_argument("--parabolic", default="0", help="Proper index set I (default: 0)")

    add("poset", "The poset of proper subsets of {0..n}")

    p = add("poset-colimit", "Colimit over the whole parabolic poset, any rank")
    p.add_argument("--degree", type=int, required=True, help="Level m (nonzero)")
    p.add_argument("--u-bound", type=int, dest="u_bound", help="Weight window J (default: stabilize)")

    p = add("localize-space", "Tate base change of a disjoint union of T-orbits")
    p.add_argument("--cells", required=True, help='Comma-separated cells: fixed, free or n, e.g. "fixed,2,free"')

    p = add("spin-pair", "Determinant-square certificate for W (q^k + q^-k)")
    p.add_argument("--weights", default="", help='Comma-separated weight monomials, e.g. "u,u^-1"')
    p.add_argument("--k", type=int, required=True, help="Rotation weight k != 0")
    p.add_argument("--variables", help="Weight variables (default: u)")

    p = add("loop-truncate", "Weights of V(m) for a symmetric loop representation")
    p.add_argument("--invariant", default="", help="Comma-separated weights of V^T")
    p.add_argument("--mode", default="", help="Comma-separated weights of every V_k")
    p.add_argument("--m", type=int, default=0, help="Fourier cutoff m >= 0 (default: 0)")

    p = add("directed-colimit", "Membership in colim(Z[t] -> Z[t] -> ...) under multiplication")
    p.add_argument("--multiplier", default="t", help="Multiplier f, a monomial in t (default: t)")
    p.add_argument("--element", required=True, help='Element of Z[t, t^-1], e.g. "t^-3"')

    return parser


async def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    fields = vars(args)
    verbose = fields.pop("verbose", False)
    setup_logging(verbose)

    try:
        request = build_request(fields)
        report = await dispatch(request)
    except LoopKError as e:
        code = 2 if isinstance(e, InputError) else 3
        logger.error(f"❌ {e.kind}: {e}")
        print(to_json(describe(e)))
        return code
    except Exception as e:
        logger.exception("❌ Unexpected failure")
        print(to_json(describe(e)))
        return 3

    if request.pretty:
        render_pretty(report)
    else:
        print(to_json(report.result))
    return report.exit_code


def run(argv: Optional[List[str]] = None) -> int:
    return asyncio.run(main(argv))


if __name__ == "__main__":
    sys.exit(run())
