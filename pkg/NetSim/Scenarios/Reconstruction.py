import logging

from Models.ABParams import ABParams
from Models.PhaseMessages import Request
from Models.ScenarioConfig import ScenarioConfig
from Models.Share import Share
from Models.SplitMode import SplitMode
from Models.Transcript import Transcript, Verdict
from Models.TrustLists import DISTRUSTED
from Attest.AuthNode import AuthNode
from CrtVss.CrtVss import verify_share, reconstruct
from ModMath.ModMath import coalition_context
from NetSim.Simulator import Envelope
from NetSim.Scenarios.Distribution import DistributionRun, REQUESTOR, masked_dealing, fixture_secret
from NetSim.Terms import ident, label, tuple_term
from Storage.FileFormats import bulletin_commitment
from ThresholdDss.Errors import InsufficientTrustedNodes
from ThresholdDss.TrustedChoice import trusted_choice

logger = logging.getLogger(__name__)

REQUEST = label("REQUEST")


class ReconstructionRun(DistributionRun):
    """
    Requestor R gathers t shares after an honest distribution. Members are
    admitted by trust mark: 1 with a key goes ahead, 0 runs the handshake,
    -1 is left out. A share failing its commitment gets its sender marked -1
    and the coalition is rebuilt without it.
    """

    def __init__(self, config: ScenarioConfig, params: ABParams | None = None):
        super().__init__(config, params, extra_nodes=(REQUESTOR,))
        self.requestor = self.world.nodes[REQUESTOR]
        self.secret = fixture_secret(self)
        self.detected: list[int] = []

    def distribute_shares(self) -> bool:
        return self.run(masked_dealing(self, self.secret), receivers=(REQUESTOR,))

    def _handshake(self, initiator: AuthNode, responder: AuthNode) -> bool:
        return self.world.handshake(initiator.node_id, responder.node_id)

    def choose(self, min_responders: int | None = None) -> list[int] | None:
        """Coalition of attested members still holding a valid share, None when too few are left."""
        candidates = [self.world.nodes[p] for p in self.participants
                      if self.index_of[p] in self.accepted and self.index_of[p] not in self.detected]
        try:
            coalition = trusted_choice(self.requestor, candidates, self.params.t, min_responders or self.params.t,
                                       self.index_of, self.params, handshake=self._handshake)
        except InsufficientTrustedNodes as e:
            self.sim.note("note", REQUESTOR, str(e))
            return None
        return coalition.indices

    def request_shares(self, coalition: list[int], cheaters: set[int]) -> tuple[dict[int, Share], list[int]]:
        for i in coalition:
            p = self.participants[i - 1]
            self.sim.send(Envelope(REQUESTOR, p, "request", tuple_term(ident(REQUESTOR), ident(p), REQUEST),
                                   Request(sender=REQUESTOR, receiver=p, purpose="reconstruct")))
        self.sim.run()

        for i in coalition:
            p = self.participants[i - 1]
            if not self.sim.collect(p, "request"):
                continue
            share = self.accepted[i]
            if i in cheaters:
                self.world.nodes[p].tpm.compromised = True
                self.sim.note("state", p, "compromised after attestation")
                share = Share(index=i, value=(share.value + 1) % share.modulus, modulus=share.modulus)
            self.send_sealed(p, REQUESTOR, share, f"share:{i}")
        self.sim.run()

        good, bad = {}, []
        for envelope in self.sim.collect(REQUESTOR, "share"):
            i = self.index_of[envelope.sender]
            share = self.open_sealed(REQUESTOR, envelope)
            if share is not None and share.index == i and verify_share(share, bulletin_commitment(self.bulletin, i)):
                good[i] = share
            else:
                bad.append(i)
        return good, sorted(bad)

    def reconstruct_secret(self, cheaters: set[int]) -> int | None:
        self.bulletin = self.read_bulletin(REQUESTOR) or self.bulletin
        while (coalition := self.choose()) is not None:
            good, bad = self.request_shares(coalition, cheaters)
            if not bad and len(good) == len(coalition):
                _, secret = reconstruct(list(good.values()), coalition_context(self.params, coalition),
                                        self.params.m0, SplitMode.MASKED)
                self.sim.note("note", REQUESTOR, f"reconstructed with coalition {coalition}")
                return secret
            for i in bad:
                self.requestor.lists.mark(self.participants[i - 1], DISTRUSTED)
                self.detected.append(i)
                self.sim.note("fail", REQUESTOR, f"share {i} fails its commitment, member excluded",
                              self.participants[i - 1])
        return None


def _reconstruction(config: ScenarioConfig, cheater_count: int | None = 0) -> Transcript:
    """Cheaters are the lowest indices; None means n - t + 1 of them."""
    run = ReconstructionRun(config)
    if cheater_count is None:
        cheater_count = run.params.n - run.params.t + 1
    cheaters = set(range(1, cheater_count + 1))
    if not run.distribute_shares():
        return run.sim.verdict(Verdict.FAULT_DETECTED, "distribution did not complete")

    secret = run.reconstruct_secret(cheaters)
    if secret is None:
        return run.sim.verdict(Verdict.RECONSTRUCTION_IMPOSSIBLE, f"cheaters {run.detected} leave too few shares")
    if secret != run.secret:
        return run.sim.verdict(Verdict.ATTACK_SUCCEEDED, "a wrong secret was reconstructed")
    if run.detected:
        return run.sim.verdict(Verdict.CHEAT_BLOCKED, f"cheaters {run.detected} excluded, secret recovered")
    return run.sim.verdict(Verdict.PASS, "secret recovered")


def reconstruction_honest(config: ScenarioConfig) -> Transcript:
    return _reconstruction(config, 0)


def cheating_participant(config: ScenarioConfig) -> Transcript:
    return _reconstruction(config, 1)


def cheating_participant_overwhelmed(config: ScenarioConfig) -> Transcript:
    return _reconstruction(config, None)
