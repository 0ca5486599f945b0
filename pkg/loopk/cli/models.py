"""
Pydantic Request/Response Models for the loopk CLI

Defines the payload schemas (root data, manifolds), the validated command
request and the report written to stdout.
"""

from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, field_validator


# ============================================================================
# Payload Models
# ============================================================================

class RootDatumPayload(BaseModel):
    """Explicit Cartan matrix for --cartan"""
    cartan: List[List[int]]

    @field_validator("cartan")
    @classmethod
    def square(cls, value: List[List[int]]) -> List[List[int]]:
        if not value or any(len(row) != len(value) for row in value):
            raise ValueError("Cartan matrix must be a non-empty square matrix")
        return value

    class Config:
        json_schema_extra = {
            "example": {
                "cartan": [[2, -1], [-1, 2]]
            }
        }


class ManifoldPayload(BaseModel):
    """Chern data of a stably almost complex manifold"""
    dim: int = Field(ge=0)
    chern: Dict[str, int] = Field(default_factory=dict)

    class Config:
        json_schema_extra = {
            "example": {
                "dim": 2,
                "chern": {"c1^2": 0, "c2": 24}
            }
        }


# ============================================================================
# Request Model
# ============================================================================

class CommandRequest(BaseModel):
    """One parsed and validated subcommand invocation"""
    command: str
    group: Optional[str] = None
    cartan: Optional[RootDatumPayload] = None
    parabolic: str = "0"
    element: Optional[str] = None
    point: Optional[str] = None
    degree: Optional[int] = None
    u_bound: Optional[int] = Field(default=None, ge=1)
    level: Optional[int] = Field(default=None, ge=0)
    k_max: int = Field(default=6, ge=0)
    q_order: Optional[int] = Field(default=None, ge=0)
    fourier: int = Field(default=1, ge=1)
    fgl: str = "mult"
    roots: List[str] = Field(default_factory=lambda: ["L"])
    renormalized: bool = False
    a: Optional[str] = None
    b: Optional[str] = None
    k: Optional[int] = None
    variables: Optional[List[str]] = None
    genus: int = Field(default=0, ge=0)
    manifold: Optional[ManifoldPayload] = None
    orbit: Optional[int] = Field(default=None, ge=0)
    matrix: Optional[List[List[Union[str, int]]]] = None
    cells: List[str] = Field(default_factory=list)
    weights: List[str] = Field(default_factory=list)
    invariant: List[str] = Field(default_factory=list)
    mode: List[str] = Field(default_factory=list)
    m: int = Field(default=0, ge=0)
    multiplier: str = "t"
    pretty: bool = False

    @field_validator("degree")
    @classmethod
    def nonzero_degree(cls, value: Optional[int]) -> Optional[int]:
        if value == 0:
            raise ValueError("z-degree must be nonzero")
        return value

    @field_validator("roots", "variables", "cells", "weights", "invariant", "mode", mode="before")
    @classmethod
    def split_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value

    class Config:
        json_schema_extra = {
            "example": {
                "command": "pushforward",
                "group": "su2",
                "parabolic": "0",
                "element": "z^3"
            }
        }


# ============================================================================
# Response Model
# ============================================================================

class Report(BaseModel):
    """Machine-readable result plus the exit code of the run"""
    command: str
    result: Dict[str, Any]
    exit_code: int = 0

    class Config:
        json_schema_extra = {
            "example": {
                "command": "fold",
                "result": {"point": "0.3", "word": ["s0"]},
                "exit_code": 0
            }
        }
