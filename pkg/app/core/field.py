import re
from fractions import Fraction
from functools import lru_cache
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator
from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.domains.domain import Domain

from app.core.exceptions import FieldMismatchError, InvalidCoefficientError, InvalidFieldError

_COEFFICIENT = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


def _modulus_of(value: Any) -> Optional[int]:
    """Modulus of a prime field element, for sympy's python and flint ground types alike."""
    mod = getattr(value, "mod", None)
    if mod is not None and not callable(mod):
        return int(mod)
    for owner in (value, getattr(value, "ctx", None)):
        modulus = getattr(owner, "modulus", None)
        if callable(modulus):
            return int(modulus())
    return None


@lru_cache(maxsize=None)
def _ground_domain(kind: str, characteristic: int) -> Domain:
    if kind == "rational":
        return QQ
    return GF(characteristic)


class FieldSpec(BaseModel):
    """
    The coefficient field: the rationals or a prime field F_p.

    Serialises as ``{"type": "rational"}`` or ``{"type": "prime", "p": 5}``.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kind: Literal["rational", "prime"] = Field("rational", alias="type")
    characteristic: int = Field(0, alias="p")

    @model_validator(mode="after")
    def _characteristic_matches_kind(self) -> "FieldSpec":
        if self.kind == "rational" and self.characteristic != 0:
            raise ValueError("the rationals have characteristic 0")
        if self.kind == "prime" and not isprime(self.characteristic):
            raise ValueError(f"characteristic {self.characteristic} is not prime")
        return self

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(kind="rational")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        if not isinstance(p, int) or not isprime(p):
            raise InvalidFieldError(f"characteristic {p} is not prime")
        return cls(kind="prime", characteristic=p)

    @property
    def domain(self) -> Domain:
        return _ground_domain(self.kind, self.characteristic)

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    @property
    def zero(self) -> Any:
        return self.domain.zero

    @property
    def one(self) -> Any:
        return self.domain.one

    @property
    def label(self) -> str:
        return "QQ" if self.is_rational else f"GF({self.characteristic})"

    def parse(self, text: str) -> Any:
        """Parse an exact coefficient written as ``"-3"``, ``"2/7"`` or ``"5"``."""
        match = _COEFFICIENT.match(str(text))
        if not match:
            raise InvalidCoefficientError(f"cannot parse coefficient {text!r}")
        numerator = int(match.group(1))
        denominator = int(match.group(2)) if match.group(2) is not None else 1
        return self.fraction(numerator, denominator, text=str(text))

    def fraction(self, numerator: int, denominator: int = 1, *, text: str = "") -> Any:
        K = self.domain
        if denominator == 0 or (not self.is_rational and denominator % self.characteristic == 0):
            raise InvalidCoefficientError(
                f"coefficient {text or f'{numerator}/{denominator}'} is not defined over {self.label}"
            )
        if self.is_rational:
            return K(numerator, denominator)
        return K(numerator) / K(denominator)

    def coerce(self, value: Any) -> Any:
        K = self.domain
        if isinstance(value, bool):
            return K.one if value else K.zero
        if isinstance(value, int):
            return K(value)
        if isinstance(value, Fraction):
            return self.fraction(value.numerator, value.denominator)
        if isinstance(value, str):
            return self.parse(value)
        if K.of_type(value):
            modulus = _modulus_of(value) if not self.is_rational else None
            if modulus is None or modulus == self.characteristic:
                return value
        raise FieldMismatchError(f"value {value!r} is not an element of {self.label}")

    def render(self, value: Any) -> str:
        return str(self.domain.to_sympy(value))


def require_same_field(*fields: FieldSpec) -> FieldSpec:
    first = fields[0]
    for other in fields[1:]:
        if other != first:
            raise FieldMismatchError(f"cannot combine {first.label} with {other.label}")
    return first
