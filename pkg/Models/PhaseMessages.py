from typing import Any

from sqlmodel import SQLModel, Field


class Announce(SQLModel):
    """AUTH broadcast of a dealer or requestor: AIK signature over its id."""
    sender: str
    aik_signature: str


class Agree(SQLModel):
    sender: str
    receiver: str


class SealedShare(SQLModel):
    sender: str
    receiver: str
    index: int
    sealed: str
    # public commitments travelling with nonce sub-shares
    commitments: list[dict[str, Any]] = Field(default_factory=list)


class Bulletin(SQLModel):
    params_digest: str
    commitments: list[dict[str, Any]] = Field(default_factory=list)
    aik_signature: str


class Request(SQLModel):
    sender: str
    receiver: str
    purpose: str
    digest: str | None = None
