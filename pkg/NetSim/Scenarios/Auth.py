import logging

from Models.AuthSession import AuthRole, AuthState
from Models.ScenarioConfig import ScenarioConfig
from Models.Transcript import Transcript, Verdict
from Models.TrustLists import TRUSTED, DISTRUSTED
from Attest.AuthNode import KEY_CONFIRM
from NetSim.Intruder import rank_check
from NetSim.World import NetWorld

logger = logging.getLogger(__name__)


def sent_steps(world: NetWorld, sender: str) -> list[int]:
    return [event.numeric_view["step"] for event in world.sim.transcript.events
            if event.kind == "send" and event.sender == sender and event.numeric_view]


def auth_honest(config: ScenarioConfig) -> Transcript:
    world = NetWorld(config, ["A", "B"])
    done = world.handshake("A", "B")

    a, b = world.nodes["A"], world.nodes["B"]
    keys_agree = done and a.lists.key_of("B") is not None and a.lists.key_of("B") == b.lists.key_of("A")
    marks = a.lists.trust_of("B") == TRUSTED and b.lists.trust_of("A") == TRUSTED
    secret = rank_check(world.sim.transcript, depth_budget=config.closure_depth)

    if keys_agree and marks and secret:
        return world.sim.verdict(Verdict.PASS, "both sides DONE with equal keys")
    return world.sim.verdict(Verdict.FAULT_DETECTED,
                             f"done={done} keys_agree={keys_agree} marks={marks} rank_check={secret}")


def auth_unknown_neighbor(config: ScenarioConfig) -> Transcript:
    """B does not list A, so the request goes unanswered."""
    world = NetWorld(config, ["A", "B"], neighbors={"A": ["B"], "B": []})
    world.handshake("A", "B")

    session = world.nodes["A"].session("B", AuthRole.INITIATOR)
    if not sent_steps(world, "B") and session.state == AuthState.INIT_SENT:
        return world.sim.verdict(Verdict.CHEAT_BLOCKED, "request from a non-neighbor dropped without reply")
    return world.sim.verdict(Verdict.ATTACK_SUCCEEDED, "B answered a node outside its neighbor list")


def auth_compromised_initiator(config: ScenarioConfig) -> Transcript:
    world = NetWorld(config, ["A", "B"])
    world.nodes["A"].tpm.compromised = True
    world.handshake("A", "B")

    refused = world.nodes["B"].lists.trust_of("A") == DISTRUSTED and KEY_CONFIRM not in sent_steps(world, "B")
    if refused:
        return world.sim.verdict(Verdict.CHEAT_BLOCKED, "B marked A -1 and sent no message 4")
    return world.sim.verdict(Verdict.ATTACK_SUCCEEDED, "compromised initiator was accepted")
