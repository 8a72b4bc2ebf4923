import logging
import random

from Models.Attestation import AuthMessage
from Models.AuthSession import AuthRole, AuthState
from Models.ScenarioConfig import ScenarioConfig
from Attest.AuthNode import AuthNode
from Attest.Errors import AuthFailed, DropSilently
from Attest.KeyAgreement import default_group
from Attest.TpmSimulator import TpmState, DaaIssuer, pcr_extend
from NetSim.AuthTerms import AuthTerms, TermNamer
from NetSim.Intruder import Intruder, Policy
from NetSim.Simulator import Simulator, Envelope
from NetSim.Terms import Term

AUTH = "auth"
INTRUDER = "I"


class NetWorld:
    """
    All state of one scenario run: TPMs, authentication nodes, the simulator
    and the intruder sitting on the network. Everything random is drawn from
    one generator seeded with the run's seed.
    """
    logger = logging.getLogger(__package__)

    def __init__(self, config: ScenarioConfig, node_ids: list[str], neighbors: dict[str, list[str]] | None = None,
                 config_values: dict[str, str] | None = None, policy: Policy | None = None,
                 policy_name: str = "passive"):
        self.config = config
        self.rng = random.Random(config.seed)
        self.group = default_group(config.dh_group_bits)
        self.issuer = DaaIssuer(self.rng)
        self.config_set = [value.encode() for value in config.config_set]

        config_values = config_values or {}
        tpms = {}
        for node_id in node_ids:
            value = config_values.get(node_id, config.config_set[0]).encode()
            tpm = TpmState.create(node_id, self.rng, value)
            pcr_extend(tpm, 0, b"boot")
            pcr_extend(tpm, 1, value)
            self.issuer.issue(tpm)
            tpms[node_id] = tpm

        directory = {node_id: tpm.aik_public() for node_id, tpm in tpms.items()}
        self.nodes: dict[str, AuthNode] = {}
        for node_id in node_ids:
            peers = neighbors[node_id] if neighbors is not None else [p for p in node_ids if p != node_id]
            self.nodes[node_id] = AuthNode(node_id, tpms[node_id], self.issuer, directory, self.config_set,
                                           self.group, self.rng, config.hash_name, neighbors=peers)

        self.terms = AuthTerms(self.nodes, TermNamer())
        intruder = Intruder(self.terms.public_terms(), policy, policy_name, config.closure_depth,
                            config.max_closure_terms)
        self.sim = Simulator(config.scenario, config.seed, intruder)
        for node_id in node_ids:
            self.sim.register(node_id, AUTH, self._auth_handler(self.nodes[node_id]))

    @property
    def intruder(self) -> Intruder:
        return self.sim.intruder

    def envelope(self, message: AuthMessage) -> Envelope:
        return Envelope(message.sender, message.receiver, AUTH, self.terms.term(message), message)

    def _auth_handler(self, node: AuthNode):
        def handle(envelope: Envelope) -> list[Envelope]:
            before = {key: session.state for key, session in node.sessions.items()}
            try:
                replies = node.auth_step(envelope.body)
            except DropSilently as e:
                self.sim.note("drop", node.node_id, str(e), envelope.sender)
                replies = []
            except AuthFailed as e:
                self.sim.note("fail", node.node_id, str(e), envelope.sender)
                replies = []

            for (peer, role), session in sorted(node.sessions.items()):
                if before.get((peer, role)) != session.state:
                    self.sim.note("state", node.node_id, f"{role.value} {session.state.value}", peer)
            return [self.envelope(reply) for reply in replies]

        return handle

    def start_auth(self, initiator: str, responder: str) -> bool:
        try:
            message = self.nodes[initiator].start(responder)
        except DropSilently as e:
            self.sim.note("drop", initiator, str(e), responder)
            return False
        self.sim.note("state", initiator, f"{AuthRole.INITIATOR.value} {AuthState.INIT_SENT.value}", responder)
        self.sim.send(self.envelope(message))
        return True

    def handshake(self, initiator: str, responder: str) -> bool:
        """One authentication exchange over the simulated network."""
        if self.start_auth(initiator, responder):
            self.sim.run()
        return self.authenticated(initiator, responder)

    def authenticated(self, initiator: str, responder: str) -> bool:
        mine = self.nodes[initiator].session(responder, AuthRole.INITIATOR)
        theirs = self.nodes[responder].session(initiator, AuthRole.RESPONDER)
        return (mine is not None and mine.state == AuthState.DONE
                and theirs is not None and theirs.state == AuthState.DONE)

    def mutual(self, a: str, b: str) -> bool:
        """Both directions, so each side has attested to the other."""
        return self.handshake(a, b) and self.handshake(b, a)

    def session_key(self, a: str, b: str) -> bytes | None:
        key = self.nodes[a].lists.key_of(b)
        return bytes.fromhex(key) if key else None

    def key_term(self, a: str, b: str) -> Term:
        """Symbolic key a uses with b, preferring the DH form g^{xy} over a stored key."""
        node = self.nodes[a]
        done = [s for role in AuthRole if (s := node.session(b, role)) is not None and s.state == AuthState.DONE]
        if not done:
            raise KeyError(f"{a} has no finished session with {b}")
        with_dh = [s for s in done if s.own_public and s.peer_public]
        return self.terms.session_key((with_dh or done)[0], a)
