import json
import logging
from typing import Callable

from cryptography.exceptions import InvalidSignature

from Models.ABParams import ABParams
from Models.PhaseMessages import Announce, Agree, SealedShare, Bulletin
from Models.ScenarioConfig import ScenarioConfig
from Models.Share import Share, Dealing
from Models.Transcript import Transcript, Verdict
from Models.TrustLists import TRUSTED
from CrtVss.CrtVss import split_masked, verify_share, mask_limit
from CrtVss.Errors import ValueExceedsCapacity
from Attest.Errors import DecryptionFailed
from Attest.KeyAgreement import seal, unseal
from ModMath.ModMath import to_hex, from_hex
from NetSim.AuthTerms import aik_secret
from NetSim.Simulator import Envelope
from NetSim.Terms import Atom, Enc, Sig, ident, label, tuple_term
from NetSim.World import NetWorld
from Storage.ConfigFiles import load_params
from Storage.FileFormats import bulletin_to_dict, bulletin_commitment, dump_json

DEALER = "D"
REQUESTOR = "R"
AGREE = label("AGREE")


def participant(index: int) -> str:
    return f"P{index}"


class DistributionRun:
    """
    Dealer D hands CRT-VSS shares to P1..Pn over the simulated network:
    AUTH broadcast, attestation both ways, AGREE, sealed shares, signed
    bulletin of commitments, share checks at every participant.
    """
    logger = logging.getLogger(__package__)

    def __init__(self, config: ScenarioConfig, params: ABParams | None = None, extra_nodes: tuple[str, ...] = ()):
        self.config = config
        self.params = params or load_params()
        self.participants = [participant(i) for i in self.params.indices]
        self.index_of = {participant(i): i for i in self.params.indices}

        self.world = NetWorld(config, [DEALER, *self.participants, *extra_nodes])
        self.sim = self.world.sim
        self.dealer = self.world.nodes[DEALER]

        self.dealing: Dealing | None = None
        self.masked = None
        self.bulletin: dict | None = None
        self.accepted: dict[int, Share] = {}
        self.rejected: list[int] = []

    def announce(self):
        signature = self.dealer.tpm.aik.sign(DEALER.encode()).hex()
        for p in self.participants:
            self.sim.send(Envelope(DEALER, p, "announce", Sig(ident(DEALER), aik_secret(DEALER)),
                                   Announce(sender=DEALER, aik_signature=signature)))
        self.sim.run()

    def attest(self):
        for p in self.participants:
            for envelope in self.sim.collect(p, "announce"):
                try:
                    self.world.nodes[p].directory[DEALER].verify(bytes.fromhex(envelope.body.aik_signature),
                                                                 DEALER.encode())
                except InvalidSignature:
                    self.sim.note("fail", p, "AUTH broadcast signature does not verify", DEALER)
            self.world.handshake(DEALER, p)
            self.world.handshake(p, DEALER)

    def agree(self) -> list[str]:
        for p in self.participants:
            if self.world.nodes[p].lists.trust_of(DEALER) == TRUSTED:
                self.sim.send(Envelope(p, DEALER, "agree", tuple_term(ident(p), ident(DEALER), AGREE),
                                       Agree(sender=p, receiver=DEALER)))
            else:
                self.sim.note("note", p, "dealer not attested, no AGREE", DEALER)
        self.sim.run()
        return sorted(envelope.sender for envelope in self.sim.collect(DEALER, "agree"))

    def deal(self, make_dealing: Callable[[], tuple[Dealing, object]]) -> bool:
        try:
            self.dealing, self.masked = make_dealing()
        except ValueExceedsCapacity as e:
            self.sim.note("fail", DEALER, f"dealing refused: {e}")
            return False
        return True

    def send_sealed(self, sender: str, receiver: str, share: Share, name: str, kind: str = "share",
                    commitments: list[dict] | None = None):
        key = self.world.session_key(sender, receiver)
        plaintext = dump_json({"index": share.index, "value": to_hex(share.value), "modulus": to_hex(share.modulus)})
        body = SealedShare(sender=sender, receiver=receiver, index=share.index,
                           sealed=seal(key, plaintext.encode(), self.world.rng).hex(), commitments=commitments or [])
        term = Enc(Atom("int", name), self.world.key_term(sender, receiver))
        self.sim.send(Envelope(sender, receiver, kind, term, body))

    def open_sealed(self, receiver: str, envelope: Envelope) -> Share | None:
        key = self.world.session_key(receiver, envelope.sender)
        try:
            data = json.loads(unseal(key, bytes.fromhex(envelope.body.sealed)))
        except DecryptionFailed:
            self.sim.note("fail", receiver, "share does not open under the session key", envelope.sender)
            return None
        return Share(index=data["index"], value=from_hex(data["value"]), modulus=from_hex(data["modulus"]))

    def distribute(self, tamper: dict[int, int] | None = None, receivers: tuple[str, ...] = ()):
        tamper = tamper or {}
        for p in self.participants:
            i = self.index_of[p]
            share = self.dealing.share(i)
            if i in tamper:
                share = Share(index=i, value=(share.value + tamper[i]) % share.modulus, modulus=share.modulus)
            self.send_sealed(DEALER, p, share, f"share:{i}")

        data = bulletin_to_dict(self.params, self.dealing.commitments)
        signature = self.dealer.tpm.aik.sign(dump_json(data).encode()).hex()
        term = Sig(label(f"bulletin:{data['params_digest'][:16]}"), aik_secret(DEALER))
        for receiver in [*self.participants, *receivers]:
            self.sim.send(Envelope(DEALER, receiver, "bulletin", term, Bulletin(aik_signature=signature, **data)))
        self.sim.run()

    def read_bulletin(self, node_id: str) -> dict | None:
        for envelope in self.sim.collect(node_id, "bulletin"):
            body = envelope.body
            data = {"params_digest": body.params_digest, "commitments": body.commitments}
            try:
                self.world.nodes[DEALER].tpm.aik_public().verify(bytes.fromhex(body.aik_signature),
                                                                 dump_json(data).encode())
            except InvalidSignature:
                self.sim.note("fail", node_id, "bulletin signature does not verify", DEALER)
                continue
            return data
        return None

    def check_shares(self):
        for p in self.participants:
            bulletin = self.read_bulletin(p)
            for envelope in self.sim.collect(p, "share"):
                share = self.open_sealed(p, envelope)
                i = self.index_of[p]
                if share is not None and bulletin is not None and verify_share(share, bulletin_commitment(bulletin, i)):
                    self.accepted[i] = share
                    continue
                self.rejected.append(i)
                self.sim.note("fail", p, f"commitment mismatch on share {i}", DEALER)
            self.bulletin = self.bulletin or bulletin

    def run(self, make_dealing: Callable[[], tuple[Dealing, object]], tamper: dict[int, int] | None = None,
            compromise_after_agree: bool = False, receivers: tuple[str, ...] = ()) -> bool:
        """Whole distribution phase; False when it stopped before any share was sent."""
        self.announce()
        self.attest()
        agreed = self.agree()
        if len(agreed) < self.params.n:
            self.sim.note("note", DEALER, f"AGREE from {agreed}, distribution stopped")
            return False

        if compromise_after_agree:
            self.dealer.tpm.compromised = True
            self.sim.note("state", DEALER, "compromised after attestation")
        if not self.deal(make_dealing):
            return False
        self.distribute(tamper, receivers)
        self.check_shares()
        return True


def masked_dealing(run: DistributionRun, secret: int, mask: int | None = None):
    return lambda: split_masked(secret, run.params, run.world.rng, mask=mask)


def fixture_secret(run: DistributionRun) -> int:
    return run.world.rng.randrange(run.params.m0)


def distribution_honest(config: ScenarioConfig) -> Transcript:
    run = DistributionRun(config)
    run.run(masked_dealing(run, fixture_secret(run)))
    if len(run.accepted) == run.params.n:
        return run.sim.verdict(Verdict.PASS, "every participant accepted its share")
    return run.sim.verdict(Verdict.FAULT_DETECTED, f"rejected shares {run.rejected}")


def cheating_distributor_unattested(config: ScenarioConfig) -> Transcript:
    run = DistributionRun(config)
    run.dealer.tpm.compromised = True
    sent = run.run(masked_dealing(run, fixture_secret(run)))
    if not sent and not run.accepted:
        return run.sim.verdict(Verdict.CHEAT_BLOCKED, "no participant agreed to an unattested dealer")
    return run.sim.verdict(Verdict.ATTACK_SUCCEEDED, "shares from an unattested dealer were accepted")


def cheating_distributor_bad_share(config: ScenarioConfig) -> Transcript:
    run = DistributionRun(config)
    run.run(masked_dealing(run, fixture_secret(run)), tamper={2: 1}, compromise_after_agree=True)
    if 2 in run.rejected and 2 not in run.accepted:
        return run.sim.verdict(Verdict.CHEAT_BLOCKED, "participant 2 rejected a share failing its commitment")
    return run.sim.verdict(Verdict.ATTACK_SUCCEEDED, "a corrupted share was accepted")


def cheating_distributor_oversized_y(config: ScenarioConfig) -> Transcript:
    run = DistributionRun(config)
    secret = fixture_secret(run)
    oversized = mask_limit(secret, run.params) + 1
    sent = run.run(masked_dealing(run, secret, mask=oversized))
    if not sent and not run.accepted:
        return run.sim.verdict(Verdict.CHEAT_BLOCKED, "dealing with y >= M refused")
    return run.sim.verdict(Verdict.ATTACK_SUCCEEDED, "shares of an oversized lifted value went out")
