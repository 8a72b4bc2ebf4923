import hashlib
import hmac
import logging
import random
from dataclasses import dataclass

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey

from Models.Attestation import DaaSignature, PbaSignature
from Attest.Errors import BadSlot, NoCredential, EmptyConfigSet

logger = logging.getLogger(__name__)

PCR_COUNT = 16
PCR_SIZE = 20


@dataclass(frozen=True)
class DaaCredential:
    credential_id: str
    member_key: bytes


class TpmState:
    """
    Software stand-in for a node's trusted platform module.

    `compromised` is a simulation switch: setting it models a platform whose
    measured code no longer runs, which the DAA revocation check exposes.
    """

    def __init__(self, node_id: str, aik: Ed25519PrivateKey, config_value: bytes):
        self.node_id = node_id
        self.pcrs: list[bytes] = [bytes(PCR_SIZE)] * PCR_COUNT
        self.aik = aik
        self.daa_credential: DaaCredential | None = None
        self.config_value = config_value
        self.compromised = False

    @classmethod
    def create(cls, node_id: str, rng: random.Random, config_value: bytes) -> "TpmState":
        return cls(node_id, Ed25519PrivateKey.from_private_bytes(rng.randbytes(32)), config_value)

    def aik_public(self) -> Ed25519PublicKey:
        return self.aik.public_key()

    def pcr_composite(self) -> bytes:
        return hashlib.sha1(b"".join(self.pcrs)).digest()

    def __repr__(self):
        return f"TpmState({self.node_id!r}, compromised={self.compromised})"


def pcr_extend(tpm: TpmState, slot: int, measurement: bytes) -> bytes:
    if not 0 <= slot < PCR_COUNT:
        raise BadSlot(f"PCR slot {slot} outside [0, {PCR_COUNT})")
    tpm.pcrs[slot] = hashlib.sha1(tpm.pcrs[slot] + measurement).digest()
    return tpm.pcrs[slot]


class DaaIssuer:
    """Issues group credentials and answers revocation queries for them."""
    logger = logging.getLogger(__package__)

    def __init__(self, rng: random.Random):
        self._secret = rng.randbytes(32)
        self._rng = rng
        self._members: dict[str, TpmState] = {}

    def _member_key(self, credential_id: str) -> bytes:
        return hmac.new(self._secret, credential_id.encode(), hashlib.sha256).digest()

    def issue(self, tpm: TpmState) -> DaaCredential:
        credential_id = self._rng.randbytes(8).hex()
        credential = DaaCredential(credential_id=credential_id, member_key=self._member_key(credential_id))
        tpm.daa_credential = credential
        self._members[credential_id] = tpm
        self.logger.debug(f"Issued DAA credential to {tpm.node_id}")
        return credential

    def is_revoked(self, credential_id: str) -> bool:
        tpm = self._members.get(credential_id)
        return tpm is None or tpm.compromised

    def check_tag(self, credential_id: str, im: bytes, tag: bytes) -> bool:
        expected = hmac.new(self._member_key(credential_id), b"daa" + im, hashlib.sha1).digest()
        return hmac.compare_digest(expected, tag)


def daa_sign(tpm: TpmState, im: bytes) -> DaaSignature:
    credential = tpm.daa_credential
    if credential is None:
        raise NoCredential(f"{tpm.node_id} holds no DAA credential")
    tag = hmac.new(credential.member_key, b"daa" + im, hashlib.sha1).digest()
    return DaaSignature(credential=credential.credential_id, tag=tag.hex())


def daa_verify(ds: DaaSignature, im: bytes, issuer: DaaIssuer) -> bool:
    if not issuer.check_tag(ds.credential, im, bytes.fromhex(ds.tag)):
        return False
    if issuer.is_revoked(ds.credential):
        logger.warning("DAA signature from a revoked platform")
        return False
    return True


def config_set_digest(config_set: list[bytes]) -> str:
    return hashlib.sha1(b"\x00".join(sorted(config_set))).hexdigest()


def _binding(im: bytes, config_value: bytes) -> str:
    return hashlib.sha1(im + config_value).hexdigest()


def pba_sign(tpm: TpmState, im: bytes, config_set: list[bytes]) -> PbaSignature:
    if not config_set:
        raise EmptyConfigSet("property-based attestation needs a nonempty config set")
    return PbaSignature(binding=_binding(im, tpm.config_value), set_digest=config_set_digest(config_set))


def pba_verify(ps: PbaSignature, im: bytes, config_set: list[bytes]) -> bool:
    if not config_set or ps.set_digest != config_set_digest(config_set):
        return False
    return any(hmac.compare_digest(_binding(im, value), ps.binding) for value in config_set)
