from sqlmodel import SQLModel, Field

from Models.ABParams import ABParams
from Models.CoalitionContext import CoalitionContext
from Models.CurvePoint import CurvePoint, CurveParams, DssSignature
from Models.Share import Share, Dealing, MaskedSecret


class SigningKeyMaterial(SQLModel):
    params: ABParams
    # effective private scalar S + A*m0
    d: int
    public_key: CurvePoint
    dealing: Dealing
    masked: MaskedSecret


class MemberShares(SQLModel):
    index: int
    d_share: Share
    k_share: Share | None = None
    a_share: Share | None = None


class Round1Msg(SQLModel):
    index: int
    v: int
    w: CurvePoint


class Round2Msg(SQLModel):
    index: int
    sig_candidates: list[int] = Field(default_factory=list)


class SigningSession(SQLModel):
    coalition: CoalitionContext
    curve: CurveParams
    digest: int
    bound: int
    round1: list[Round1Msg] = Field(default_factory=list)
    candidates: list[int] = Field(default_factory=list)
    round2: list[Round2Msg] = Field(default_factory=list)
    signature: DssSignature | None = None
    kappa: int | None = None
    attempts: int = 0


class SignatureRecord(SQLModel):
    r: str
    s: str
    kappa: int
    curve: str
