import json
import random

import pytest

from Models.AuthSession import AuthRole
from Models.Transcript import Transcript, Verdict
from Models.TrustLists import DISTRUSTED
from Curve.Dss import dss_verify
from ModMath.ModMath import to_hex
from Attest.Errors import DecryptionFailed
from NetSim.Errors import BudgetExceeded, TermDecodeError, UnknownScenario
from NetSim.Intruder import (Intruder, RankAssignment, deduction_closure, derivable, rank_check, rank_violations,
                             transcript_observations)
from NetSim.Registry import SCENARIOS, build_config, get_scenario, run_scenario, scenario_names
from NetSim.ScenarioQueue import ScenarioQueue
from NetSim.Scenarios import Distribution, Signing
from NetSim.Scenarios.Signing import SigningRun, run_signing
from NetSim.Simulator import Envelope, Simulator
from NetSim.Terms import Atom, Enc, Exp, Hash, Pair, Sig, decode, depth, encode, exp, ident, label, subterms, tuple_term
from ThresholdDss.Errors import MissingShares

SEED = 7

a, b = ident("A"), ident("B")
g = label("g")
x, y = Atom("exponent", "x:A#1"), Atom("exponent", "x:B#1")
n2 = Atom("nonce", "n2#1")
k = Atom("key", "k:stored#1")


def test_tuple_term_nests_to_the_right():
    assert tuple_term(a, b, n2) == Pair(a, Pair(b, n2))
    assert tuple_term(a) == a
    assert depth(tuple_term(a, b, n2)) == 3


def test_exp_flattens():
    assert exp(exp(g, x), y) == Exp(g, frozenset({x, y}))
    assert exp(exp(g, x), y) == exp(exp(g, y), x)


def test_encode_decode():
    terms = [
        a,
        Atom("label", "odd,name:(x)"),
        tuple_term(a, b, Enc(tuple_term(a, n2), exp(g, x, y))),
        Sig(Hash(tuple_term(a, n2)), Atom("key", "sk:aik:A")),
    ]
    for term in terms:
        assert decode(encode(term)) == term
    assert encode(exp(g, x, y)) == encode(exp(g, y, x))


@pytest.mark.parametrize("text", ["", "a(id,5:A)", "q(a(id,1:A))", "x(a(label,1:g))", "a(id,1:A)x", "p(a(id,1:A))"])
def test_decode_rejects_malformed_text(text):
    with pytest.raises(TermDecodeError):
        decode(text)


def test_analysis_rules():
    closure = deduction_closure({tuple_term(a, Sig(n2, Atom("key", "sk:aik:B")))})
    assert n2 in closure and a in closure

    assert n2 not in deduction_closure({Enc(n2, k)})
    assert n2 in deduction_closure({Enc(n2, k), k})

    public = Atom("key", "pk:B")
    assert n2 not in deduction_closure({Enc(n2, public), public})
    assert n2 in deduction_closure({Enc(n2, public), Atom("key", "sk:B")})


def test_synthesis_rules():
    assert derivable(Pair(a, b), {a, b})
    assert derivable(Hash(tuple_term(a, b)), {a, b})
    assert derivable(Enc(a, k), {a, k})
    assert not derivable(Enc(a, k), {a})
    assert not derivable(Sig(a, Atom("key", "sk:aik:A")), {a, Atom("key", "pk:aik:A")})


def test_diffie_hellman_rules():
    assert derivable(exp(g, x), {g, x})
    assert derivable(exp(g, x, y), {exp(g, x), y})
    assert not derivable(exp(g, x, y), {g, exp(g, x), exp(g, y)})


def test_closure_is_idempotent_and_monotone():
    knowledge = {tuple_term(a, exp(g, x)), Enc(tuple_term(b, n2), k), y, g}
    closure = deduction_closure(knowledge)
    assert deduction_closure(closure) == closure
    assert closure <= deduction_closure(knowledge | {k})
    assert n2 in deduction_closure(knowledge | {k})


def test_closure_budget():
    knowledge = {tuple_term(*[Atom("nonce", f"n{i}") for i in range(8)])}
    with pytest.raises(BudgetExceeded) as info:
        deduction_closure(knowledge, max_terms=3)
    assert info.value.limit == 3
    assert len(info.value.partial) > 3


def test_rank_assignment():
    rank = RankAssignment()
    assert rank.rank(n2) == 0 and rank.rank(a) == 1
    assert rank.rank(Enc(a, k)) == 0
    assert rank.rank(Enc(n2, Atom("key", "pk:B"))) == 1
    assert rank.rank(Pair(a, n2)) == 0
    assert rank.rank(Hash(n2)) == 1
    assert rank.rank(Sig(a, Atom("key", "sk:aik:A"))) == 0

    assert rank.is_secret(n2) and rank.is_secret(exp(g, x, y))
    assert not rank.is_secret(exp(g, x)) and not rank.is_secret(Enc(n2, k))


def test_rank_check_spots_leaks():
    transcript = Transcript(scenario="unit", seed=0, public_terms=[encode(Enc(n2, k)), encode(k)])
    assert not rank_check(transcript)
    assert n2 in rank_violations(transcript)
    assert rank_check(Transcript(scenario="unit", seed=0, public_terms=[encode(Enc(n2, k))]))


def test_simulator_delivers_in_order_through_the_intruder():
    sim = Simulator("unit", 0, Intruder([g]))
    received = []
    sim.register("B", "ping", lambda envelope: received.append(envelope.payload) or [])
    for i in range(3):
        sim.send(Envelope("A", "B", "ping", Atom("int", f"v{i}")))
    sim.send(Envelope("A", "C", "ping", a))
    assert sim.run() == 4

    assert received == [Atom("int", "v0"), Atom("int", "v1"), Atom("int", "v2")]
    assert [e.payload for e in sim.collect("C")] == [a]
    assert sim.collect("C") == []
    assert Atom("int", "v1") in sim.intruder.knowledge
    assert [e.kind for e in sim.transcript.events[:2]] == ["send", "deliver"]


def test_blocking_policy():
    sim = Simulator("unit", 0, Intruder(policy=lambda envelope, intruder: []))
    sim.send(Envelope("A", "B", "ping", a))
    sim.run()
    assert sim.collect("B") == []
    assert [e.kind for e in sim.transcript.events] == ["send", "block"]


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        get_scenario("replay-gamma")
    with pytest.raises(KeyError):
        build_config("replay-gamma", SEED)


def test_scenario_names():
    attacks = scenario_names(attacks_only=True)
    assert "replay-alpha-beta" in attacks and "auth-honest" not in attacks
    assert set(scenario_names()) == set(SCENARIOS)


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_verdicts(name):
    transcript = run_scenario(build_config(name, SEED))
    assert transcript.verdict == SCENARIOS[name].expected
    assert transcript.scenario == name and transcript.seed == SEED


def test_honest_auth_keeps_secrets():
    transcript = run_scenario(build_config("auth-honest", SEED))
    assert rank_check(transcript)
    # the saved JSON is enough to repeat the check
    text = transcript.to_json()
    assert rank_check(text)
    assert len(transcript_observations(text)) == len(transcript_observations(transcript))


def test_replay_alpha_beta_transcript():
    transcript = run_scenario(build_config("replay-alpha-beta", SEED))
    details = [event.detail for event in transcript.events if event.detail]
    assert "cannot form alpha.5" in details
    assert "responder KEYED" in details
    assert "responder DONE" not in [e.detail for e in transcript.events if e.sender == "B"]
    assert rank_check(transcript)


def test_leaked_exponent_exposes_the_session_key():
    transcript = run_scenario(build_config("replay-alpha-beta-leaked-exponent", SEED))
    assert transcript.verdict == Verdict.ATTACK_SUCCEEDED
    assert not rank_check(transcript)


def test_distribution_keeps_shares_secret():
    transcript = run_scenario(build_config("distribution-honest", SEED))
    assert transcript.verdict == Verdict.PASS
    assert rank_check(transcript)


def test_transcripts_are_deterministic():
    first = run_scenario(build_config("replay-alpha-beta", SEED)).to_json()
    second = run_scenario(build_config("replay-alpha-beta", SEED)).to_json()
    other = run_scenario(build_config("replay-alpha-beta", SEED + 1)).to_json()
    assert first == second
    assert first != other


def test_transcript_wire_format():
    data = json.loads(run_scenario(build_config("auth-honest", SEED)).to_json(pretty=True))
    assert data["verdicts"] == ["PASS"]
    sends = [event for event in data["events"] if event["kind"] == "send"]
    assert sends and all({"from", "to", "term"} <= set(event) for event in sends)
    assert sends[0]["from"] == "A" and sends[0]["to"] == "B"
    assert decode(sends[0]["term"]) == tuple_term(a, b, label("INIT"))


def test_scenario_queue_keeps_order():
    names = ["cheating-participant", "replay-alpha-only", "auth-unknown-neighbor"]
    transcripts = ScenarioQueue.run([build_config(name, SEED) for name in names], workers=2)
    assert [t.scenario for t in transcripts] == names
    assert [t.verdict for t in transcripts] == [SCENARIOS[name].expected for name in names]


def test_subterms():
    term = tuple_term(a, Enc(n2, k))
    assert {a, n2, k, Enc(n2, k), term} <= subterms(term)


def test_closure_properties_over_random_knowledge():
    k2 = Atom("key", "sk:aik:B")
    pool = [a, b, g, x, y, n2, k, k2,
            tuple_term(a, exp(g, x)), Enc(tuple_term(b, n2), k), Sig(Hash(tuple_term(a, n2)), k2),
            exp(g, y), Pair(n2, k), Enc(x, exp(g, x, y)), Hash(k), tuple_term(b, Enc(y, k2))]
    rng = random.Random(SEED)

    for _ in range(200):
        smaller = set(rng.sample(pool, rng.randint(0, len(pool))))
        larger = smaller | set(rng.sample(pool, rng.randint(0, len(pool))))
        closure = deduction_closure(smaller)
        assert smaller <= closure
        assert deduction_closure(closure) == closure
        assert closure <= deduction_closure(larger)


def test_tampered_wire_commitment_stops_signing(monkeypatch):
    original = Signing.commitment_to_dict

    def shifted(commitment):
        data = original(commitment)
        z = commitment.z + 1 if commitment.z + 1 < commitment.p else 1
        return {**data, "z": to_hex(z)}

    monkeypatch.setattr(Signing, "commitment_to_dict", shifted)
    transcript, session, _ = run_signing(build_config("sign-honest", SEED))

    assert session is None
    assert transcript.verdict == Verdict.FAULT_DETECTED
    failures = [e.detail for e in transcript.events if e.kind == "fail"]
    assert any("does not match its commitment" in detail for detail in failures)


def test_signing_coalition_skips_distrusted_member():
    run = SigningRun(build_config("sign-honest", SEED))
    assert run.distribute_key()
    run.requestor.lists.mark("P1", DISTRUSTED)
    assert run.requestor.lists.trust_of("P1") == DISTRUSTED
    before = run.world.nodes["P1"].session("R", AuthRole.INITIATOR)

    session = run.sign(b"skip the distrusted member")

    assert session.coalition.indices == [2, 3]
    # no new handshake was started toward the requestor
    assert run.world.nodes["P1"].session("R", AuthRole.INITIATOR) is before
    assert dss_verify(run.key.public_key, session.digest, session.signature, run.curve)


def test_unreadable_nonce_sub_share_is_missing(monkeypatch):
    run = SigningRun(build_config("sign-honest", SEED))
    assert run.distribute_key()

    def broken(key, blob):
        raise DecryptionFailed("wrong key")

    monkeypatch.setattr(Distribution, "unseal", broken)
    with pytest.raises(MissingShares):
        run.sign(b"nothing opens")
    details = [e.detail for e in run.sim.transcript.events if e.kind == "fail"]
    assert "share does not open under the session key" in details
