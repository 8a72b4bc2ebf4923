from collections import Counter

from Models.Attestation import AuthMessage, KeyInfo
from Models.AuthSession import AuthRole, AuthSession
import Attest.AuthNode as steps
from Attest.AuthNode import AuthNode
from NetSim.Terms import Term, Atom, Enc, Sig, Hash, exp, ident, label, tuple_term

G = label("g")
INIT_LABEL = label("INIT")


def aik_secret(node_id: str) -> Atom:
    return Atom("key", f"sk:aik:{node_id}")


def aik_public(node_id: str) -> Atom:
    return Atom("key", f"pk:aik:{node_id}")


class TermNamer:
    """Symbolic names for wire values; a value keeps its name for the whole run."""

    def __init__(self):
        self._names: dict[tuple[str, object], str] = {}
        self._counters: Counter = Counter()

    def name(self, prefix: str, value) -> str:
        key = (prefix, value)
        if key not in self._names:
            self._counters[prefix] += 1
            self._names[key] = f"{prefix}#{self._counters[prefix]}"
        return self._names[key]

    def atom(self, kind: str, prefix: str, value) -> Atom:
        return Atom(kind, self.name(prefix, value))


class AuthTerms:
    """
    Symbolic view of the authentication messages.

    Secret values (n2, DH exponents, session keys) only ever appear as
    counter-named atoms; the numbers stay with the nodes.
    """

    def __init__(self, nodes: dict[str, AuthNode], namer: TermNamer | None = None):
        self.nodes = nodes
        self.namer = namer or TermNamer()

    def public_terms(self) -> list[Term]:
        terms = [G, INIT_LABEL]
        for node_id in self.nodes:
            terms += [ident(node_id), aik_public(node_id)]
        return terms

    def exponent(self, owner: str, public_hex: str) -> Atom:
        return self.namer.atom("exponent", f"x:{owner}", public_hex)

    def dh_public(self, owner: str, key_info: KeyInfo) -> Term:
        return exp(G, self.exponent(owner, key_info.public))

    def session_key(self, session: AuthSession, owner: str) -> Term:
        """k_ij as g^{xy} when both DH values are known, else an opaque stored key."""
        if session.own_public and session.peer_public:
            return exp(G, self.exponent(owner, session.own_public), self.exponent(session.peer, session.peer_public))
        return self.namer.atom("key", "k:stored", session.key)

    def im(self, sender: str, n1: int, pcr_hex: str) -> Term:
        return Hash(tuple_term(ident(sender), self.namer.atom("nonce", "n1", n1), self.namer.atom("label", "pcr", pcr_hex)))

    def n2(self, value: int) -> Atom:
        return self.namer.atom("nonce", "n2", value)

    def term(self, message: AuthMessage) -> Term:
        sender, receiver = ident(message.sender), ident(message.receiver)
        node = self.nodes[message.sender]

        match message.step:
            case steps.INIT:
                return tuple_term(sender, receiver, INIT_LABEL)

            case steps.CHALLENGE:
                return tuple_term(sender, receiver, self.namer.atom("nonce", "n1", int(message.n1, 16)))

            case steps.ATTEST:
                session = node.session(message.receiver, AuthRole.INITIATOR)
                bundle = message.bundle
                im = self.im(message.sender, session.n1, bundle.pcr)
                ds = Sig(im, Atom("key", f"sk:daa:{message.sender}"))
                ps = Sig(im, Atom("key", f"sk:pba:{message.sender}"))
                parts = [im, ds, ps]
                if bundle.key_info is not None:
                    parts.insert(0, self.dh_public(message.sender, bundle.key_info))
                digest = Hash(tuple_term(sender, *parts))
                return tuple_term(sender, receiver, *parts, digest)

            case steps.KEY_CONFIRM:
                session = node.session(message.receiver, AuthRole.RESPONDER)
                signed_parts = [sender]
                parts = [sender, receiver]
                if message.key_info is not None:
                    public = self.dh_public(message.sender, message.key_info)
                    signed_parts.insert(0, public)
                    parts.append(public)
                confirm = Enc(tuple_term(sender, self.n2(session.n2)), self.session_key(session, message.sender))
                return tuple_term(*parts, Sig(tuple_term(*signed_parts), aik_secret(message.sender)), confirm)

            case steps.FINISH:
                session = node.session(message.receiver, AuthRole.INITIATOR)
                confirm = Enc(tuple_term(sender, self.n2(session.n2)), self.session_key(session, message.sender))
                return tuple_term(sender, receiver, confirm)

        raise ValueError(f"no term for step {message.step}")
