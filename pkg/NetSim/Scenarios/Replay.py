import logging

from Models.Attestation import AuthMessage
from Models.AuthSession import AuthRole, AuthState
from Models.ScenarioConfig import ScenarioConfig
from Models.Transcript import Transcript, Verdict
import Attest.AuthNode as steps
from Attest.AuthNode import confirmation
from Attest.KeyAgreement import session_key, seal, unseal
from ModMath.ModMath import from_hex
from NetSim.AuthTerms import INIT_LABEL
from NetSim.Intruder import rank_check
from NetSim.Simulator import Envelope
from NetSim.Terms import Atom, Enc, Sig, ident, tuple_term
from NetSim.World import NetWorld, AUTH

logger = logging.getLogger(__name__)


def capture_all(envelope: Envelope, intruder) -> list:
    return []


class ReplayRun:
    """
    Intruder I impersonates initiator A towards responder B (run alpha),
    borrowing what it needs from a parallel run beta that A starts with B.
    Every envelope is captured; I decides what reaches whom.
    """

    def __init__(self, config: ScenarioConfig):
        self.world = NetWorld(config, ["A", "B"], policy=capture_all, policy_name="replay-script")
        self.sim = self.world.sim
        self.intruder = self.world.intruder

    def captured(self, sender: str, step: int) -> Envelope | None:
        for envelope in reversed(self.intruder.seen):
            if envelope.sender == sender and envelope.body is not None and envelope.body.step == step:
                return envelope
        return None

    def forge(self, envelope: Envelope, what: str) -> bool:
        """Injects an envelope the intruder can derive, notes the attempt either way."""
        if not self.intruder.can_derive(envelope.payload):
            self.sim.note("note", "I", f"cannot form {what}")
            return False
        self.sim.inject(envelope.redirect())
        self.sim.run()
        return True

    def alpha_start(self) -> Envelope:
        message = AuthMessage(step=steps.INIT, sender="A", receiver="B")
        self.forge(Envelope("A", "B", AUTH, tuple_term(ident("A"), ident("B"), INIT_LABEL), message), "alpha.1")
        return self.captured("B", steps.CHALLENGE)

    def beta_until_attest(self, challenge: Envelope) -> Envelope:
        """A starts beta; I answers with B's alpha challenge so A's im fits alpha."""
        self.world.start_auth("A", "B")
        self.sim.run()
        self.forge(challenge, "beta.2")
        return self.captured("A", steps.ATTEST)

    def responder(self):
        return self.world.nodes["B"].session("A", AuthRole.RESPONDER)

    def finish_target(self):
        session = self.responder()
        key = self.world.terms.session_key(session, "B")
        return tuple_term(ident("A"), ident("B"), Enc(tuple_term(ident("A"), self.world.terms.n2(session.n2)), key))

    def alpha_finish_from_leak(self) -> bool:
        """Forges alpha.5 by key derivation; only possible once B's exponent leaked."""
        target = self.finish_target()
        if not self.intruder.can_derive(target):
            self.sim.note("note", "I", "cannot form alpha.5")
            return False

        session = self.responder()
        b = self.world.nodes["B"]
        exponent = b.leak_exponent("A", AuthRole.RESPONDER)
        p = self.world.group.p
        key = session_key(pow(from_hex(session.peer_public), exponent, p), p)
        key_confirm = self.captured("B", steps.KEY_CONFIRM)
        _, n2_hex = unseal(key, bytes.fromhex(key_confirm.body.sealed)).decode().split("|")
        sealed = seal(key, confirmation("A", from_hex(n2_hex)), self.world.rng)

        message = AuthMessage(step=steps.FINISH, sender="A", receiver="B", sealed=sealed.hex())
        self.sim.inject(Envelope("A", "B", AUTH, target, message))
        self.sim.run()
        return True

    def leak_responder_exponent(self):
        session = self.responder()
        atom = self.world.terms.exponent("B", session.own_public)
        self.sim.note("note", "I", "fault injection: B's DH exponent leaked")
        self.sim.add_public(atom)

    def verdict(self) -> Transcript:
        responder = self.responder()
        initiator = self.world.nodes["A"].session("B", AuthRole.INITIATOR)
        b_done = responder is not None and responder.state == AuthState.DONE
        a_matches = (b_done and initiator is not None and initiator.state == AuthState.DONE
                     and initiator.key == responder.key)
        secret = rank_check(self.sim.transcript, depth_budget=self.world.config.closure_depth)
        self.sim.note("note", "I", f"rank_check={secret}")

        if b_done and not a_matches:
            return self.sim.verdict(Verdict.ATTACK_SUCCEEDED, "B accepted A without A taking part")
        if b_done:
            return self.sim.verdict(Verdict.ATTACK_FAILED, "I only relayed a genuine A-B session")
        state = responder.state.value if responder is not None else "none"
        return self.sim.verdict(Verdict.ATTACK_FAILED, f"B stopped in {state}")


def replay_alpha_beta(config: ScenarioConfig) -> Transcript:
    run = ReplayRun(config)
    challenge = run.alpha_start()
    attest = run.beta_until_attest(challenge)
    run.forge(attest, "alpha.3")
    run.alpha_finish_from_leak()
    return run.verdict()


def replay_alpha_only(config: ScenarioConfig) -> Transcript:
    run = ReplayRun(config)
    challenge = run.alpha_start()

    # DS_A over the alpha challenge would need A's DAA key
    a = run.world.nodes["A"]
    im = run.world.terms.im("A", from_hex(challenge.body.n1), a.tpm.pcr_composite().hex())
    if not run.intruder.can_derive(Sig(im, Atom("key", "sk:daa:A"))):
        run.sim.note("note", "I", "cannot form alpha.3")
    return run.verdict()


def replay_alpha_beta_relay(config: ScenarioConfig) -> Transcript:
    run = ReplayRun(config)
    challenge = run.alpha_start()
    attest = run.beta_until_attest(challenge)
    run.forge(attest, "alpha.3")

    if not run.alpha_finish_from_leak():
        run.forge(run.captured("B", steps.KEY_CONFIRM), "beta.4")
        run.forge(run.captured("A", steps.FINISH), "alpha.5")
    return run.verdict()


def replay_alpha_beta_leaked_exponent(config: ScenarioConfig) -> Transcript:
    run = ReplayRun(config)
    challenge = run.alpha_start()
    attest = run.beta_until_attest(challenge)
    run.forge(attest, "alpha.3")
    run.leak_responder_exponent()
    run.alpha_finish_from_leak()
    return run.verdict()
