from pydantic import model_validator
from sqlmodel import SQLModel, Field

from Models.OpCounter import OpCounter


class ShamirShare(SQLModel):
    x: int
    y: int
    field_prime: int

    @model_validator(mode="after")
    def _point_in_field(self):
        if not 0 < self.x < self.field_prime:
            raise ValueError(f"evaluation point {self.x} outside (0, {self.field_prime})")
        if not 0 <= self.y < self.field_prime:
            raise ValueError(f"share at x={self.x}: value outside [0, {self.field_prime})")
        return self


class PolyDealing(SQLModel):
    degree: int
    field_prime: int
    shares: tuple[ShamirShare, ...] = Field(default=())
    op_counter: OpCounter = Field(default_factory=OpCounter)

    @property
    def threshold(self) -> int:
        return self.degree + 1
