import logging
from collections import defaultdict, deque
from dataclasses import dataclass, replace
from typing import Any, Callable

from sqlmodel import SQLModel

from Models.Transcript import Transcript, TranscriptEvent, Verdict
from NetSim.Intruder import Intruder
from NetSim.Terms import Term, encode

MAX_STEPS = 10_000


@dataclass
class Envelope:
    sender: str
    receiver: str
    kind: str
    payload: Term
    # numeric message handed to the receiving node, None for purely symbolic traffic
    body: Any = None
    channel: str = "trans"
    forged: bool = False

    def numeric_view(self) -> dict | None:
        if isinstance(self.body, SQLModel):
            return self.body.model_dump(mode="json", exclude_none=True)
        if isinstance(self.body, dict):
            return self.body
        return None

    def redirect(self, sender: str | None = None, receiver: str | None = None) -> "Envelope":
        return replace(self, sender=sender or self.sender, receiver=receiver or self.receiver, forged=True)


Handler = Callable[[Envelope], list]


class Simulator:
    """
    Deterministic FIFO event loop. Every envelope goes through the intruder
    before delivery; nodes answer through their handler or, without one,
    collect envelopes in an inbox the scenario reads.
    """
    logger = logging.getLogger(__package__)

    def __init__(self, scenario: str, seed: int, intruder: Intruder | None = None):
        self.intruder = intruder or Intruder()
        self.transcript = Transcript(scenario=scenario, seed=seed,
                                     public_terms=sorted(encode(t) for t in self.intruder.knowledge))
        self.handlers: dict[tuple[str, str], Handler] = {}
        self.inboxes: dict[str, list[Envelope]] = defaultdict(list)
        self.queue: deque[Envelope] = deque()
        self.step = 0

    def register(self, node_id: str, kind: str, handler: Handler):
        self.handlers[(node_id, kind)] = handler

    def _record(self, kind: str, envelope: Envelope | None = None, detail: str | None = None,
                sender: str | None = None, receiver: str | None = None):
        self.step += 1
        event = TranscriptEvent(step=self.step, kind=kind, detail=detail, sender=sender, receiver=receiver)
        if envelope is not None:
            event.sender, event.receiver = envelope.sender, envelope.receiver
            event.term = encode(envelope.payload)
            event.numeric_view = envelope.numeric_view()
            event.detail = detail or envelope.kind
        self.transcript.events.append(event)

    def note(self, kind: str, node: str | None = None, detail: str | None = None, peer: str | None = None):
        """State transitions and other node-local facts."""
        self._record(kind, detail=detail, sender=node, receiver=peer)

    def add_public(self, *terms: Term):
        self.intruder.learn(*terms)
        self.transcript.public_terms = sorted(set(self.transcript.public_terms) | {encode(t) for t in terms})

    def send(self, envelope: Envelope):
        self.queue.append(envelope)

    def inject(self, envelope: Envelope):
        """Intruder-made envelope, delivered without another interception."""
        envelope.forged = True
        self._record("inject", envelope)
        self._deliver(envelope)

    def _deliver(self, envelope: Envelope):
        self._record("deliver", envelope)
        handler = self.handlers.get((envelope.receiver, envelope.kind))
        if handler is None:
            self.inboxes[envelope.receiver].append(envelope)
            return
        for reply in handler(envelope):
            self.send(reply)

    def run(self, max_steps: int = MAX_STEPS) -> int:
        delivered = 0
        while self.queue and delivered < max_steps:
            envelope = self.queue.popleft()
            self._record("send", envelope)

            forwarded = self.intruder.intercept(envelope)
            if not forwarded:
                self._record("block", envelope)
            for out in forwarded:
                if out is not envelope:
                    self._record("inject", out)
                self._deliver(out)
                delivered += 1

        if self.queue:
            self.logger.warning(f"Stopped after {max_steps} deliveries with {len(self.queue)} envelopes queued")
        return delivered

    def collect(self, node_id: str, kind: str | None = None) -> list[Envelope]:
        inbox = self.inboxes[node_id]
        taken = [e for e in inbox if kind is None or e.kind == kind]
        self.inboxes[node_id] = [e for e in inbox if not (kind is None or e.kind == kind)]
        return taken

    def verdict(self, verdict: Verdict, reason: str | None = None) -> Transcript:
        self.transcript.verdicts.append(verdict)
        self.note("verdict", detail=f"{verdict.value}: {reason}" if reason else verdict.value)
        self.logger.info(f"{self.transcript.scenario}: {verdict.value}")
        return self.transcript
