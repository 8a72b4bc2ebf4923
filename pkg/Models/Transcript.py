import json
from enum import Enum
from typing import Any

from sqlmodel import SQLModel, Field


class Verdict(str, Enum):
    PASS = "PASS"
    ATTACK_FAILED = "ATTACK_FAILED"
    ATTACK_SUCCEEDED = "ATTACK_SUCCEEDED"
    CHEAT_BLOCKED = "CHEAT_BLOCKED"
    RECONSTRUCTION_IMPOSSIBLE = "RECONSTRUCTION_IMPOSSIBLE"
    FAULT_DETECTED = "FAULT_DETECTED"


class TranscriptEvent(SQLModel):
    step: int
    # send, inject, deliver, block, drop, fail, state, note
    kind: str
    sender: str | None = None
    receiver: str | None = None
    term: str | None = None
    numeric_view: dict[str, Any] | None = None
    detail: str | None = None


class Transcript(SQLModel):
    scenario: str
    seed: int
    events: list[TranscriptEvent] = Field(default_factory=list)
    verdicts: list[Verdict] = Field(default_factory=list)
    public_terms: list[str] = Field(default_factory=list)

    @property
    def verdict(self) -> Verdict | None:
        return self.verdicts[-1] if self.verdicts else None

    def wire_dict(self) -> dict:
        """JSON form with events keyed by from/to."""
        data = self.model_dump(mode="json")
        for event in data["events"]:
            event["from"] = event.pop("sender")
            event["to"] = event.pop("receiver")
        return data

    def to_json(self, pretty: bool = False) -> str:
        return json.dumps(self.wire_dict(), indent=2 if pretty else None, sort_keys=True)
