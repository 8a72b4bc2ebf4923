from sqlmodel import SQLModel


class KeyInfo(SQLModel):
    """Diffie-Hellman public tuple (g, p, g^x), hex encoded."""
    g: str
    p: str
    public: str


class DaaSignature(SQLModel):
    credential: str
    tag: str


class PbaSignature(SQLModel):
    # digest of im and the signer's configuration; the configuration itself is never sent
    binding: str
    set_digest: str


class AttestationBundle(SQLModel):
    im: str
    pcr: str
    ds: DaaSignature
    ps: PbaSignature
    key_info: KeyInfo | None = None


class AuthMessage(SQLModel):
    step: int
    sender: str
    receiver: str
    n1: str | None = None
    bundle: AttestationBundle | None = None
    digest: str | None = None
    key_info: KeyInfo | None = None
    aik_signature: str | None = None
    sealed: str | None = None
