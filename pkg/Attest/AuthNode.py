import hashlib
import logging
import random
from collections import deque

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PublicKey

from Models.Attestation import AttestationBundle, AuthMessage, KeyInfo
from Models.AuthSession import AuthRole, AuthState, AuthSession
from Models.TrustLists import TrustLists, TRUSTED, UNKNOWN, DISTRUSTED
from Attest.Errors import AuthFailed, DecryptionFailed, DropSilently
from Attest.KeyAgreement import DhGroup, session_key, seal, unseal
from Attest.TpmSimulator import TpmState, DaaIssuer, daa_sign, daa_verify, pba_sign, pba_verify
from ModMath.ModMath import to_hex, from_hex

INIT, CHALLENGE, ATTEST, KEY_CONFIRM, FINISH = 1, 2, 3, 4, 5

NONCE_BITS = 64


def key_info_bytes(key_info: KeyInfo | None) -> bytes:
    if key_info is None:
        return b""
    return f"{key_info.g}|{key_info.p}|{key_info.public}".encode()


def bundle_digest(node_id: str, bundle: AttestationBundle, hash_name: str = "sha1") -> str:
    """Integrity digest of message 3: id || K_INFO || im || DS || PS, K_INFO only when present."""
    h = hashlib.new(hash_name)
    h.update(node_id.encode())
    h.update(key_info_bytes(bundle.key_info))
    h.update(bytes.fromhex(bundle.im))
    h.update(bundle.ds.credential.encode() + bytes.fromhex(bundle.ds.tag))
    h.update(bytes.fromhex(bundle.ps.binding) + bundle.ps.set_digest.encode())
    return h.hexdigest()


def integrity_measurement(node_id: str, n1: int, pcr: bytes, hash_name: str = "sha1") -> bytes:
    return hashlib.new(hash_name, node_id.encode() + n1.to_bytes(NONCE_BITS // 8, "big") + pcr).digest()


def confirmation(node_id: str, n2: int) -> bytes:
    return f"{node_id}|{to_hex(n2)}".encode()


class AuthNode:
    """
    One participant of the five-message authentication exchange.

    Holds the node's TPM, its N/T/K lists and one session per (peer, role).
    Every incoming message goes through `auth_step`, which returns the replies
    to send. The node only ever runs the honest state machine.
    """
    logger = logging.getLogger(__package__)

    def __init__(self, node_id: str, tpm: TpmState, issuer: DaaIssuer, directory: dict[str, Ed25519PublicKey],
                 config_set: list[bytes], group: DhGroup, rng: random.Random, hash_name: str = "sha1",
                 neighbors=()):
        self.node_id = node_id
        self.tpm = tpm
        self.issuer = issuer
        self.directory = directory
        self.config_set = config_set
        self.group = group
        self.rng = rng
        self.hash_name = hash_name

        self.lists = TrustLists()
        for neighbor in neighbors:
            self.lists.add_neighbor(neighbor)

        self.sessions: dict[tuple[str, AuthRole], AuthSession] = {}
        self._exponents: dict[tuple[str, AuthRole], int] = {}

    def session(self, peer: str, role: AuthRole) -> AuthSession | None:
        return self.sessions.get((peer, role))

    def _expect(self, message: AuthMessage, role: AuthRole, state: AuthState) -> AuthSession:
        session = self.sessions.get((message.sender, role))
        if session is None or session.state != state:
            raise DropSilently(f"{self.node_id}: message {message.step} from {message.sender} out of order")
        return session

    def leak_exponent(self, peer: str, role: AuthRole) -> int | None:
        """Fault injection only: hands out the DH exponent of one session."""
        return self._exponents.get((peer, role))

    def _fail(self, session: AuthSession, reason: str):
        session.move_to(AuthState.FAILED)
        self.lists.mark(session.peer, DISTRUSTED)
        self.logger.warning(f"{self.node_id}: authentication with {session.peer} failed: {reason}")
        raise AuthFailed(reason)

    def start(self, peer: str) -> AuthMessage:
        if peer not in self.lists.neighbors:
            raise DropSilently(f"{self.node_id}: {peer} is not a neighbor")
        session = AuthSession(role=AuthRole.INITIATOR, peer=peer, state=AuthState.INIT_SENT)
        session.history.append(AuthState.INIT_SENT)
        self.sessions[(peer, AuthRole.INITIATOR)] = session
        return AuthMessage(step=INIT, sender=self.node_id, receiver=peer)

    def auth_step(self, message: AuthMessage) -> list[AuthMessage]:
        handlers = {
            INIT: self._on_init,
            CHALLENGE: self._on_challenge,
            ATTEST: self._on_attest,
            KEY_CONFIRM: self._on_key_confirm,
            FINISH: self._on_finish,
        }
        handler = handlers.get(message.step)
        if handler is None or message.receiver != self.node_id:
            raise DropSilently(f"{self.node_id}: not a message for this node")
        return handler(message)

    def _on_init(self, message: AuthMessage) -> list[AuthMessage]:
        if message.sender not in self.lists.neighbors:
            raise DropSilently(f"{self.node_id}: request from unknown node {message.sender}")

        session = AuthSession(role=AuthRole.RESPONDER, peer=message.sender, n1=self.rng.getrandbits(NONCE_BITS),
                              state=AuthState.CHALLENGED)
        session.history.append(AuthState.CHALLENGED)
        self.sessions[(message.sender, AuthRole.RESPONDER)] = session
        return [AuthMessage(step=CHALLENGE, sender=self.node_id, receiver=message.sender, n1=to_hex(session.n1))]

    def _on_challenge(self, message: AuthMessage) -> list[AuthMessage]:
        session = self._expect(message, AuthRole.INITIATOR, AuthState.INIT_SENT)
        session.n1 = from_hex(message.n1)

        pcr = self.tpm.pcr_composite()
        im = integrity_measurement(self.node_id, session.n1, pcr, self.hash_name)

        key_info = None
        if self.lists.key_of(session.peer) is None:
            exponent = self.rng.randrange(2, self.group.p - 1)
            self._exponents[(session.peer, AuthRole.INITIATOR)] = exponent
            key_info = self.group.key_info(pow(self.group.g, exponent, self.group.p))
            session.own_public = key_info.public

        bundle = AttestationBundle(im=im.hex(), pcr=pcr.hex(), ds=daa_sign(self.tpm, im),
                                   ps=pba_sign(self.tpm, im, self.config_set), key_info=key_info)
        session.move_to(AuthState.ATTESTED)
        return [AuthMessage(step=ATTEST, sender=self.node_id, receiver=session.peer, bundle=bundle,
                            digest=bundle_digest(self.node_id, bundle, self.hash_name))]

    def _on_attest(self, message: AuthMessage) -> list[AuthMessage]:
        session = self._expect(message, AuthRole.RESPONDER, AuthState.CHALLENGED)
        bundle = message.bundle
        if bundle is None or message.digest != bundle_digest(message.sender, bundle, self.hash_name):
            raise DropSilently(f"{self.node_id}: digest mismatch on message 3 from {message.sender}")

        im = bytes.fromhex(bundle.im)
        if im != integrity_measurement(message.sender, session.n1, bytes.fromhex(bundle.pcr), self.hash_name):
            raise DropSilently(f"{self.node_id}: stale integrity measurement from {message.sender}")

        if not daa_verify(bundle.ds, im, self.issuer):
            self._fail(session, "DAA verification failed")
        if not pba_verify(bundle.ps, im, self.config_set):
            self._fail(session, "PBA verification failed")

        own_info = None
        if bundle.key_info is not None:
            key, own_info = self._agree(session, bundle.key_info)
            session.peer_public, session.own_public = bundle.key_info.public, own_info.public
        elif self.lists.key_of(session.peer) is not None:
            key = bytes.fromhex(self.lists.key_of(session.peer))
        else:
            self._fail(session, "no key info and no stored key")

        self.lists.mark(session.peer, TRUSTED)
        self.lists.set_key(session.peer, key.hex())
        session.key = key.hex()
        session.n2 = self.rng.getrandbits(NONCE_BITS)

        signed = key_info_bytes(own_info) + self.node_id.encode()
        session.move_to(AuthState.KEYED)
        return [AuthMessage(step=KEY_CONFIRM, sender=self.node_id, receiver=session.peer, key_info=own_info,
                            aik_signature=self.tpm.aik.sign(signed).hex(),
                            sealed=seal(key, confirmation(self.node_id, session.n2), self.rng).hex())]

    def _agree(self, session: AuthSession, peer_info: KeyInfo) -> tuple[bytes, KeyInfo]:
        p, g = from_hex(peer_info.p), from_hex(peer_info.g)
        if (p, g) != (self.group.p, self.group.g):
            self._fail(session, "peer proposed a different DH group")
        peer_public = from_hex(peer_info.public)
        if not 1 < peer_public < p - 1:
            self._fail(session, "degenerate DH public value")
        if pow(peer_public, (p - 1) // 2, p) != 1:
            self._fail(session, "DH public value outside the prime-order subgroup")

        exponent = self.rng.randrange(2, p - 1)
        self._exponents[(session.peer, session.role)] = exponent
        return session_key(pow(peer_public, exponent, p), p), self.group.key_info(pow(g, exponent, p))

    def _on_key_confirm(self, message: AuthMessage) -> list[AuthMessage]:
        session = self._expect(message, AuthRole.INITIATOR, AuthState.ATTESTED)

        public = self.directory.get(session.peer)
        signed = key_info_bytes(message.key_info) + session.peer.encode()
        try:
            if public is None:
                raise InvalidSignature()
            public.verify(bytes.fromhex(message.aik_signature or ""), signed)
        except (InvalidSignature, ValueError):
            self._fail(session, "AIK signature on message 4 does not verify")

        if message.key_info is not None:
            exponent = self._exponents.get((session.peer, AuthRole.INITIATOR))
            if exponent is None:
                self._fail(session, "responder sent key info for a stored-key session")
            p = self.group.p
            session.peer_public = message.key_info.public
            key = session_key(pow(from_hex(message.key_info.public), exponent, p), p)
        elif self.lists.key_of(session.peer) is not None:
            key = bytes.fromhex(self.lists.key_of(session.peer))
        else:
            self._fail(session, "no key available for message 4")

        try:
            peer_id, n2_hex = unseal(key, bytes.fromhex(message.sealed or "")).decode().split("|")
        except (DecryptionFailed, ValueError):
            self._fail(session, "message 4 does not open under the session key")
        if peer_id != session.peer:
            self._fail(session, f"message 4 names {peer_id}, expected {session.peer}")

        session.n2 = from_hex(n2_hex)
        session.key = key.hex()
        # the initiator only checked the AIK signature; a -1 from an earlier attestation stays
        if self.lists.trust_of(session.peer) == UNKNOWN:
            self.lists.mark(session.peer, TRUSTED)
        self.lists.set_key(session.peer, key.hex())
        session.move_to(AuthState.KEYED)
        session.move_to(AuthState.DONE)
        return [AuthMessage(step=FINISH, sender=self.node_id, receiver=session.peer,
                            sealed=seal(key, confirmation(self.node_id, session.n2), self.rng).hex())]

    def _on_finish(self, message: AuthMessage) -> list[AuthMessage]:
        session = self._expect(message, AuthRole.RESPONDER, AuthState.KEYED)
        try:
            opened = unseal(bytes.fromhex(session.key), bytes.fromhex(message.sealed or ""))
        except (DecryptionFailed, ValueError):
            self._fail(session, "message 5 does not open under the session key")
        if opened != confirmation(session.peer, session.n2):
            self._fail(session, "message 5 does not return n2")

        session.move_to(AuthState.DONE)
        self.logger.info(f"{self.node_id}: authenticated {session.peer}")
        return []


def neighbor_update(lists: TrustLists, add: str | None = None, remove: str | None = None,
                    reset_epoch: bool = False) -> TrustLists:
    if add is not None:
        lists.add_neighbor(add)
    if remove is not None:
        lists.remove_neighbor(remove)
    if reset_epoch:
        lists.reset_epoch()
    return lists


def run_handshake(initiator: AuthNode, responder: AuthNode) -> bool:
    """
    Runs one exchange by handing messages straight to the addressee.

    Returns:
        True when both sides reached DONE
    """
    nodes = {initiator.node_id: initiator, responder.node_id: responder}
    try:
        pending = deque([initiator.start(responder.node_id)])
    except DropSilently:
        return False

    while pending:
        message = pending.popleft()
        try:
            pending.extend(nodes[message.receiver].auth_step(message))
        except DropSilently as e:
            AuthNode.logger.info(f"Dropped: {e}")
        except AuthFailed:
            pass

    mine = initiator.session(responder.node_id, AuthRole.INITIATOR)
    theirs = responder.session(initiator.node_id, AuthRole.RESPONDER)
    return (mine is not None and mine.state == AuthState.DONE
            and theirs is not None and theirs.state == AuthState.DONE)
