"""
CLI Dependencies - Request Validation, Payload Loading and Service Factories

Turns parsed argparse namespaces into validated CommandRequest models and
provides the service objects each subcommand needs.
"""

import json
import os
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from loopk.cli.models import CommandRequest, ManifoldPayload, RootDatumPayload
from loopk.core.laurent import LaurentPoly
from loopk.core.parsing import parse_poly
from loopk.errors import InputError
from loopk.services.fgl_service import FGLService, create_fgl_service
from loopk.services.genus_service import ChernData, GenusService, create_genus_service
from loopk.services.rep_ring_service import RepRingService, create_rep_ring_service
from loopk.services.verlinde_service import VerlindeService, create_verlinde_service
from loopk.services.weyl_service import AffineWeylService, create_weyl_service

# Load environment variables
load_dotenv()


# ============================================================================
# JSON PAYLOADS
# ============================================================================

def load_json_payload(value: str) -> Any:
    """
    Load JSON from a file path or an inline JSON string

    Raises:
        InputError: unreadable file or malformed JSON
    """
    text = value
    if os.path.isfile(value):
        try:
            with open(value, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as e:
            raise InputError(f"cannot read {value}: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON in {value!r}: {e.msg} at line {e.lineno}")


def _first_error(error: ValidationError) -> str:
    issue = error.errors()[0]
    where = ".".join(str(part) for part in issue.get("loc", ())) or "request"
    return f"{where}: {issue.get('msg', 'invalid value')}"


def load_cartan(value: Optional[str]) -> Optional[RootDatumPayload]:
    if value is None:
        return None
    payload = load_json_payload(value)
    if isinstance(payload, list):
        payload = {"cartan": payload}
    try:
        return RootDatumPayload.model_validate(payload)
    except ValidationError as e:
        raise InputError(f"invalid root datum: {_first_error(e)}")


def load_manifold(value: Optional[str]) -> Optional[ManifoldPayload]:
    if value is None:
        return None
    try:
        return ManifoldPayload.model_validate(load_json_payload(value))
    except ValidationError as e:
        raise InputError(f"invalid manifold: {_first_error(e)}")


def build_request(fields: Dict[str, Any]) -> CommandRequest:
    """
    Validate raw CLI fields into a CommandRequest

    File-backed fields (--cartan, --manifold, --matrix) are loaded here.

    Raises:
        InputError: any precondition the request models reject
    """
    fields = {key: value for key, value in fields.items() if value is not None}
    if "cartan" in fields:
        fields["cartan"] = load_cartan(fields["cartan"])
    if "manifold" in fields:
        fields["manifold"] = load_manifold(fields["manifold"])
    if "matrix" in fields:
        fields["matrix"] = load_json_payload(fields["matrix"])
    try:
        return CommandRequest.model_validate(fields)
    except ValidationError as e:
        raise InputError(f"invalid request: {_first_error(e)}")


# ============================================================================
# SERVICE FACTORIES
# ============================================================================

def _cartan(request: CommandRequest) -> Optional[List[List[int]]]:
    return request.cartan.cartan if request.cartan is not None else None


def get_weyl_service(request: CommandRequest) -> AffineWeylService:
    return create_weyl_service(group=request.group, cartan=_cartan(request))


def get_rep_ring_service(request: CommandRequest) -> RepRingService:
    return create_rep_ring_service(group=request.group, cartan=_cartan(request))


def get_verlinde_service(request: CommandRequest) -> VerlindeService:
    return create_verlinde_service(group=request.group, cartan=_cartan(request))


def get_fgl_service(request: CommandRequest) -> FGLService:
    return create_fgl_service()


def get_genus_service(request: CommandRequest) -> GenusService:
    return create_genus_service()


def require(request: CommandRequest, *names: str) -> None:
    """Raise InputError naming the first missing flag"""
    for name in names:
        if getattr(request, name) in (None, [], ""):
            raise InputError(f"{request.command} needs --{name.replace('_', '-')}")


def manifold_data(request: CommandRequest) -> ChernData:
    require(request, "manifold")
    return ChernData.from_payload(request.manifold.dim, request.manifold.chern)


def q_matrix(request: CommandRequest) -> List[List[LaurentPoly]]:
    """--matrix as Laurent polynomials in q (rows are generators)"""
    require(request, "matrix")
    return [[parse_poly(str(entry), ("q",)) for entry in row] for row in request.matrix]
