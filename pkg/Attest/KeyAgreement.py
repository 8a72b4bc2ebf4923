import random
from dataclasses import dataclass
from functools import lru_cache

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from Models.Attestation import KeyInfo
from Attest.Errors import DecryptionFailed
from ModMath.ModMath import to_hex
from ModMath.ParamsGenerator import find_safe_prime

DEFAULT_GROUP_BITS = 64
DEFAULT_GROUP_SEED = 1117

NONCE_SIZE = 12


@dataclass(frozen=True)
class DhGroup:
    p: int
    g: int

    @classmethod
    def generate(cls, bits: int, rng: random.Random) -> "DhGroup":
        # 4 is a nontrivial square, so it generates the subgroup of prime order (p-1)/2
        _, p = find_safe_prime(bits, rng)
        return cls(p=p, g=4)

    def key_info(self, public: int) -> KeyInfo:
        return KeyInfo(g=to_hex(self.g), p=to_hex(self.p), public=to_hex(public))


@lru_cache(maxsize=8)
def default_group(bits: int = DEFAULT_GROUP_BITS) -> DhGroup:
    return DhGroup.generate(bits, random.Random(DEFAULT_GROUP_SEED))


def session_key(shared: int, p: int) -> bytes:
    """AES-128 key derived from the Diffie-Hellman value g^xy."""
    material = shared.to_bytes((p.bit_length() + 7) // 8, "big")
    return HKDF(algorithm=hashes.SHA256(), length=16, salt=None, info=b"crtauth session key").derive(material)


def seal(key: bytes, plaintext: bytes, rng: random.Random) -> bytes:
    nonce = rng.randbytes(NONCE_SIZE)
    return nonce + AESGCM(key).encrypt(nonce, plaintext, None)


def unseal(key: bytes, blob: bytes) -> bytes:
    try:
        return AESGCM(key).decrypt(blob[:NONCE_SIZE], blob[NONCE_SIZE:], None)
    except InvalidTag:
        raise DecryptionFailed("ciphertext does not open under this key") from None
