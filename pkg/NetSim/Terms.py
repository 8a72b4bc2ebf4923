from dataclasses import dataclass

from NetSim.Errors import TermDecodeError


@dataclass(frozen=True)
class Atom:
    # id, nonce, key, int, point, label, exponent
    kind: str
    name: str


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Enc:
    body: "Term"
    key: "Term"


@dataclass(frozen=True)
class Sig:
    body: "Term"
    key: "Term"


@dataclass(frozen=True)
class Hash:
    body: "Term"


@dataclass(frozen=True)
class Exp:
    """base raised to the product of `exponents`; exp(exp(g, E1), E2) is exp(g, E1 | E2)."""
    base: "Term"
    exponents: frozenset


Term = Atom | Pair | Enc | Sig | Hash | Exp


def ident(node_id: str) -> Atom:
    return Atom("id", node_id)


def label(name: str) -> Atom:
    return Atom("label", name)


def exp(base: Term, *exponents: Term) -> Exp:
    if isinstance(base, Exp):
        return Exp(base.base, base.exponents | frozenset(exponents))
    return Exp(base, frozenset(exponents))


def tuple_term(*parts: Term) -> Term:
    """Right-nested pairing, so a.b.c is pair(a, pair(b, c))."""
    if not parts:
        raise ValueError("empty tuple")
    term = parts[-1]
    for part in reversed(parts[:-1]):
        term = Pair(part, term)
    return term


def inverse_key(key: Term) -> Term:
    """sk:/pk: atoms are inverse pairs, every other key is symmetric."""
    if isinstance(key, Atom) and key.kind == "key":
        if key.name.startswith("sk:"):
            return Atom("key", "pk:" + key.name[3:])
        if key.name.startswith("pk:"):
            return Atom("key", "sk:" + key.name[3:])
    return key


def children(term: Term) -> tuple:
    match term:
        case Pair(left, right):
            return left, right
        case Enc(body, key) | Sig(body, key):
            return body, key
        case Hash(body):
            return (body,)
        case Exp(base, exponents):
            return (base, *sorted(exponents, key=encode))
    return ()


def subterms(term: Term) -> set:
    found = set()
    stack = [term]
    while stack:
        current = stack.pop()
        if current in found:
            continue
        found.add(current)
        stack.extend(children(current))
    return found


def depth(term: Term) -> int:
    parts = children(term)
    return 1 + max(map(depth, parts)) if parts else 1


def encode(term: Term) -> str:
    """
    Canonical text form. Atom names are length-prefixed and Exp exponents are
    sorted, so two terms encode equally iff they are equal.
    """
    match term:
        case Atom(kind, name):
            return f"a({kind},{len(name)}:{name})"
        case Pair(left, right):
            return f"p({encode(left)},{encode(right)})"
        case Enc(body, key):
            return f"e({encode(body)},{encode(key)})"
        case Sig(body, key):
            return f"s({encode(body)},{encode(key)})"
        case Hash(body):
            return f"h({encode(body)})"
        case Exp(base, exponents):
            return "x(" + ",".join([encode(base), *sorted(encode(e) for e in exponents)]) + ")"
    raise TypeError(f"not a term: {term!r}")


class _Parser:

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def expect(self, token: str):
        if not self.text.startswith(token, self.pos):
            raise TermDecodeError(f"expected {token!r} at offset {self.pos}")
        self.pos += len(token)

    def until(self, stop: str) -> str:
        end = self.text.find(stop, self.pos)
        if end < 0:
            raise TermDecodeError(f"missing {stop!r} after offset {self.pos}")
        value = self.text[self.pos:end]
        self.pos = end + 1
        return value

    def term(self) -> Term:
        if self.pos + 1 >= len(self.text):
            raise TermDecodeError("truncated term")
        tag = self.text[self.pos]
        self.pos += 1
        self.expect("(")

        if tag == "a":
            kind = self.until(",")
            size = self.until(":")
            if not size.isdigit():
                raise TermDecodeError(f"bad atom length {size!r}")
            name = self.text[self.pos:self.pos + int(size)]
            if len(name) != int(size):
                raise TermDecodeError("atom name runs past the end")
            self.pos += int(size)
            self.expect(")")
            return Atom(kind, name)

        if tag == "h":
            body = self.term()
            self.expect(")")
            return Hash(body)

        if tag in "pes":
            first = self.term()
            self.expect(",")
            second = self.term()
            self.expect(")")
            return {"p": Pair, "e": Enc, "s": Sig}[tag](first, second)

        if tag == "x":
            base = self.term()
            exponents = []
            while self.text.startswith(",", self.pos):
                self.pos += 1
                exponents.append(self.term())
            self.expect(")")
            if not exponents:
                raise TermDecodeError("exp without exponents")
            return Exp(base, frozenset(exponents))

        raise TermDecodeError(f"unknown tag {tag!r}")


def decode(text: str) -> Term:
    parser = _Parser(text)
    term = parser.term()
    if parser.pos != len(text):
        raise TermDecodeError(f"trailing data at offset {parser.pos}")
    return term
