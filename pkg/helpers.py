"""
HELPERS FILE

PURPOSE: Input parsing and validation for the hypertoric certification CLI
"""

import json
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from sympy import isprime

from hypertoric_toolbox.core import (
    DEFAULT_RADIUS,
    INPUT_SCHEMA_VERSION,
    InputError,
    canonical_json,
    sha256_canonical_json,
)
from hypertoric_toolbox.lattice import Character, TorusAction, build_action


class ProblemOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    strategy: Literal["direct", "chain"] = "chain"
    radius: int = Field(DEFAULT_RADIUS, ge=1)
    guard_points: Optional[int] = Field(None, gt=0)
    lam: Optional[list[int]] = Field(None, alias="lambda")
    p_range: Optional[tuple[int, int]] = None
    a_max: Optional[int] = Field(None, ge=1)
    q: int = Field(2, ge=2)
    m: int = 0
    samples: int = Field(3, ge=0)

    @field_validator("p_range")
    @classmethod
    def _ordered_range(cls, value):
        if value is not None and value[0] > value[1]:
            raise ValueError(f"empty prime range {value[0]}..{value[1]}")
        return value


class ProblemInput(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_: str = Field(INPUT_SCHEMA_VERSION, alias="schema")
    n: int
    d: int
    A: list[list[int]]
    delta: Optional[list[int]] = None
    p: Optional[int] = None
    options: ProblemOptions = Field(default_factory=ProblemOptions)

    @field_validator("schema_")
    @classmethod
    def _known_schema(cls, value):
        if value != INPUT_SCHEMA_VERSION:
            raise ValueError(f"unsupported schema {value!r}, expected {INPUT_SCHEMA_VERSION!r}")
        return value

    @field_validator("p")
    @classmethod
    def _prime(cls, value):
        if value is not None and not isprime(value):
            raise ValueError(f"p must be prime, got {value}")
        return value

    @model_validator(mode="after")
    def _dimensions(self):
        if not 0 < self.d < self.n:
            raise ValueError(f"d must satisfy 0 < d < n, got d={self.d}, n={self.n}")
        if len(self.A) != self.n:
            raise ValueError(f"A has {len(self.A)} rows, expected n={self.n}")
        for i, row in enumerate(self.A, start=1):
            if len(row) != self.d:
                raise ValueError(f"A row {i} has {len(row)} entries, expected d={self.d}")
        if self.delta is not None and len(self.delta) != self.d:
            raise ValueError(f"delta has {len(self.delta)} entries, expected d={self.d}")
        if self.options.lam is not None and len(self.options.lam) != self.d:
            raise ValueError(f"lambda has {len(self.options.lam)} entries, expected d={self.d}")
        return self

    def action(self) -> TorusAction:
        return build_action(self.A)

    def character(self) -> Character:
        if self.delta is None:
            raise InputError("this command needs delta")
        return Character(tuple(self.delta))

    def prime(self) -> int:
        if self.p is None:
            raise InputError("this command needs a prime p")
        return self.p

    def normalized(self) -> dict:
        return self.model_dump(by_alias=True, mode="json")


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    where = ".".join(str(part) for part in first["loc"]) or "input"
    message = first["msg"].removeprefix("Value error, ")
    return f"{where}: {message}"


def parse_input(text: str, overrides: Optional[dict] = None) -> ProblemInput:
    """
    Parse and validate a ProblemInput document.

    `overrides` are merged into the document before validation: top-level keys
    replace fields, an "options" dict is merged into the options.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed input at line {e.lineno}, column {e.colno}: {e.msg}")
    if not isinstance(data, dict):
        raise InputError("input must be a JSON object")

    for key, value in (overrides or {}).items():
        if key == "options":
            data["options"] = {**data.get("options", {}), **value}
        else:
            data[key] = value

    try:
        return ProblemInput.model_validate(data)
    except ValidationError as e:
        raise InputError(_describe(e))


def dump_input(problem: ProblemInput) -> str:
    return canonical_json(problem.normalized())


def input_hash(problem: ProblemInput) -> str:
    return "sha256:" + sha256_canonical_json(problem.normalized())


def parse_p_range(text: str) -> tuple[int, int]:
    """'LO..HI' -> (LO, HI)."""
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        return int(lo), int(hi)
    except ValueError:
        raise InputError(f"--p-range must look like LO..HI, got {text!r}")


def parse_weight(text: str) -> list[int]:
    """'1,-2' -> [1, -2]."""
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise InputError(f"--lambda must be comma-separated integers, got {text!r}")
