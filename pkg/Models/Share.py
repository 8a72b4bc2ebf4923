from pydantic import model_validator
from sqlmodel import SQLModel, Field

from Models.ABParams import ABParams
from Models.SplitMode import SplitMode


class Share(SQLModel):
    index: int
    value: int
    modulus: int

    @model_validator(mode="after")
    def _value_in_range(self):
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"share {self.index}: value outside [0, {self.modulus})")
        return self


class Commitment(SQLModel):
    index: int
    p: int
    g: int
    z: int

    @model_validator(mode="after")
    def _z_in_range(self):
        if not 1 <= self.z < self.p:
            raise ValueError(f"commitment {self.index}: z outside [1, p)")
        return self


class MaskedSecret(SQLModel):
    secret: int
    mask: int
    lifted: int


class Dealing(SQLModel):
    params: ABParams
    shares: tuple[Share, ...] = Field(default=())
    commitments: tuple[Commitment, ...] = Field(default=())
    mode: SplitMode
    # Exclusive upper bound on the shared integer, declared by the dealer.
    bound: int

    def share(self, index: int) -> Share:
        return self.shares[index - 1]

    def commitment(self, index: int) -> Commitment:
        return self.commitments[index - 1]
