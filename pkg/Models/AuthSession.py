from enum import Enum

from sqlmodel import SQLModel, Field


class AuthRole(str, Enum):
    INITIATOR = "initiator"
    RESPONDER = "responder"


class AuthState(str, Enum):
    INIT_SENT = "INIT_SENT"
    CHALLENGED = "CHALLENGED"
    ATTESTED = "ATTESTED"
    KEYED = "KEYED"
    DONE = "DONE"
    FAILED = "FAILED"


class AuthSession(SQLModel):
    role: AuthRole
    peer: str
    n1: int | None = None
    n2: int | None = None
    state: AuthState
    key: str | None = None
    # DH public values on the wire, hex
    own_public: str | None = None
    peer_public: str | None = None
    history: list[AuthState] = Field(default_factory=list)

    def move_to(self, state: AuthState):
        self.state = state
        self.history.append(state)
