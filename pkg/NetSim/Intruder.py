import json
import logging
from itertools import combinations
from typing import Callable, Iterable

from NetSim.Errors import BudgetExceeded
from NetSim.Terms import Term, Atom, Pair, Enc, Sig, Hash, Exp, decode, depth, inverse_key, subterms

logger = logging.getLogger(__name__)

DEFAULT_DEPTH_BUDGET = 4
DEFAULT_MAX_TERMS = 50_000

# largest exponent set whose partial products join the search space
_MAX_SPLIT_EXPONENTS = 4


def _analyse(term: Term, known: set) -> list:
    match term:
        case Pair(left, right):
            return [left, right]
        case Sig(body, _):
            return [body]
        case Enc(body, key) if inverse_key(key) in known:
            return [body]
    return []


def _synthesizable(term: Term, known: set) -> bool:
    match term:
        case Pair(left, right):
            return left in known and right in known
        case Enc(body, key) | Sig(body, key):
            return body in known and key in known
        case Hash(body):
            return body in known
        case Exp(base, exponents):
            for e in exponents:
                if e not in known:
                    continue
                rest = exponents - {e}
                if (Exp(base, rest) if rest else base) in known:
                    return True
    return False


def _universe(knowledge: set, targets: Iterable[Term], depth_budget: int) -> set:
    """Terms the intruder may build: observed subterms within the depth budget, and anything a target needs."""
    universe = {t for k in knowledge for t in subterms(k) if depth(t) <= depth_budget}
    for target in targets:
        universe |= subterms(target)

    for term in list(universe):
        if isinstance(term, Exp) and 1 < len(term.exponents) <= _MAX_SPLIT_EXPONENTS:
            for size in range(1, len(term.exponents)):
                for part in combinations(term.exponents, size):
                    universe.add(Exp(term.base, frozenset(part)))
    return universe


def deduction_closure(knowledge: Iterable[Term], depth_budget: int = DEFAULT_DEPTH_BUDGET,
                      targets: Iterable[Term] = (), max_terms: int = DEFAULT_MAX_TERMS) -> frozenset:
    """
    Everything derivable from `knowledge`.

    Analysis: projection, signature opening, decryption with the inverse key.
    Synthesis: pairing, encryption, signing, hashing and exponentiation, only
    toward terms of the bounded search space, so the fixed point is finite.

    Raises:
        BudgetExceeded: More than max_terms terms were derived
    """
    known = set(knowledge)
    targets = list(targets)
    universe = _universe(known, targets, depth_budget)

    changed = True
    while changed:
        changed = False

        pending = list(known)
        while pending:
            for part in _analyse(pending.pop(), known):
                if part not in known:
                    known.add(part)
                    pending.append(part)
                    changed = True

        for term in universe - known:
            if _synthesizable(term, known):
                known.add(term)
                changed = True

        if len(known) > max_terms:
            raise BudgetExceeded(frozenset(known), max_terms)

    return frozenset(known)


def derivable(term: Term, knowledge: Iterable[Term], depth_budget: int = DEFAULT_DEPTH_BUDGET) -> bool:
    return term in deduction_closure(knowledge, depth_budget, targets=[term])


RANK_ZERO_PREFIXES = ("n2", "x:", "sk:", "k:", "share:", "nonce-share:")


class RankAssignment:
    """
    Secrecy ranks for protocol terms: 0 must stay secret, 1 may be public.

    Atoms rank by name prefix. Signatures and DH values rank 0, ciphertexts
    take the rank of their key, pairs the lower rank of their parts and
    hashes rank 1.
    """

    def __init__(self, zero_prefixes: tuple[str, ...] = RANK_ZERO_PREFIXES):
        self.zero_prefixes = zero_prefixes

    def rank(self, term: Term) -> int:
        match term:
            case Atom(_, name):
                return 0 if name.startswith(self.zero_prefixes) else 1
            case Sig() | Exp():
                return 0
            case Enc(_, key):
                return self.rank(key)
            case Pair(left, right):
                return min(self.rank(left), self.rank(right))
            case Hash():
                return 1
        raise TypeError(f"not a term: {term!r}")

    def is_secret(self, term: Term) -> bool:
        """Rank-0 values that are never sent in the clear: atoms and shared DH keys."""
        if isinstance(term, Exp):
            return len(term.exponents) >= 2
        return isinstance(term, Atom) and self.rank(term) == 0


def transcript_observations(transcript) -> list:
    """Public terms plus every term that crossed the network, from a Transcript or its JSON text."""
    if isinstance(transcript, str):
        transcript = json.loads(transcript)
    if not isinstance(transcript, dict):
        transcript = transcript.model_dump(mode="json")

    observed = [decode(text) for text in transcript.get("public_terms", [])]
    for event in transcript.get("events", []):
        if event.get("kind") in ("send", "inject") and event.get("term"):
            observed.append(decode(event["term"]))
    return observed


def rank_violations(transcript, rank: RankAssignment | None = None,
                    depth_budget: int = DEFAULT_DEPTH_BUDGET) -> list:
    rank = rank or RankAssignment()
    closure = deduction_closure(transcript_observations(transcript), depth_budget)
    return sorted((t for t in closure if rank.is_secret(t)), key=repr)


def rank_check(transcript, rank: RankAssignment | None = None, depth_budget: int = DEFAULT_DEPTH_BUDGET) -> bool:
    violations = rank_violations(transcript, rank, depth_budget)
    for term in violations:
        logger.warning(f"Intruder derives rank-0 term {term}")
    return not violations


Policy = Callable[["Envelope", "Intruder"], list]


class Intruder:
    """
    Network owner. Observes every envelope; a policy callback may block,
    redirect or answer instead of delivering.
    """
    logger = logging.getLogger(__package__)

    def __init__(self, public_terms: Iterable[Term] = (), policy: Policy | None = None, policy_name: str = "passive",
                 depth_budget: int = DEFAULT_DEPTH_BUDGET, max_terms: int = DEFAULT_MAX_TERMS):
        self.knowledge: set = set(public_terms)
        self.policy = policy
        self.policy_name = policy_name
        self.depth_budget = depth_budget
        self.max_terms = max_terms
        # numeric bodies of observed envelopes, for replay
        self.seen: list = []

    def observe(self, envelope):
        self.knowledge.add(envelope.payload)
        self.seen.append(envelope)

    def learn(self, *terms: Term):
        self.knowledge.update(terms)

    def intercept(self, envelope) -> list:
        self.observe(envelope)
        if self.policy is None:
            return [envelope]
        return self.policy(envelope, self)

    def closure(self, targets: Iterable[Term] = ()) -> frozenset:
        return deduction_closure(self.knowledge, self.depth_budget, targets, self.max_terms)

    def can_derive(self, term: Term) -> bool:
        return term in self.closure([term])
