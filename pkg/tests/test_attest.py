import hashlib
import random

import pytest

from Models.AuthSession import AuthRole, AuthState
from Models.TrustLists import DISTRUSTED, TRUSTED, UNKNOWN, TrustLists
from Attest.AuthNode import ATTEST, INIT, bundle_digest, integrity_measurement, neighbor_update, run_handshake
from Attest.Errors import AuthFailed, BadSlot, DecryptionFailed, DropSilently, EmptyConfigSet, NoCredential
from Attest.KeyAgreement import DhGroup, default_group, seal, session_key, unseal
from Attest.TpmSimulator import (DaaIssuer, TpmState, daa_sign, daa_verify, pba_sign, pba_verify, pcr_extend,
                                 PCR_SIZE)
from conftest import CONFIG_SET


@pytest.fixture
def tpm(rng):
    return TpmState.create("A", rng, CONFIG_SET[0])


def test_pcr_extend_chains(tpm):
    first = pcr_extend(tpm, 0, b"boot")
    assert first == hashlib.sha1(bytes(PCR_SIZE) + b"boot").digest()
    assert pcr_extend(tpm, 0, b"kernel") == hashlib.sha1(first + b"kernel").digest()
    assert tpm.pcrs[1] == bytes(PCR_SIZE)
    with pytest.raises(BadSlot):
        pcr_extend(tpm, 16, b"x")


def test_daa_round_trip_and_revocation(tpm, rng):
    issuer = DaaIssuer(rng)
    with pytest.raises(NoCredential):
        daa_sign(tpm, b"im")
    issuer.issue(tpm)

    signature = daa_sign(tpm, b"im")
    assert daa_verify(signature, b"im", issuer)
    assert not daa_verify(signature, b"other", issuer)

    tpm.compromised = True
    assert not daa_verify(signature, b"im", issuer)


def test_daa_needs_the_issuing_authority(tpm, rng):
    DaaIssuer(rng).issue(tpm)
    assert not daa_verify(daa_sign(tpm, b"im"), b"im", DaaIssuer(rng))


def test_pba(rng):
    good = TpmState.create("A", rng, CONFIG_SET[1])
    bad = TpmState.create("B", rng, b"rootkit-2.0")
    assert pba_verify(pba_sign(good, b"im", CONFIG_SET), b"im", CONFIG_SET)
    assert not pba_verify(pba_sign(good, b"im", CONFIG_SET), b"other", CONFIG_SET)
    assert not pba_verify(pba_sign(bad, b"im", CONFIG_SET), b"im", CONFIG_SET)
    assert not pba_verify(pba_sign(good, b"im", CONFIG_SET), b"im", [CONFIG_SET[1]])
    with pytest.raises(EmptyConfigSet):
        pba_sign(good, b"im", [])


def test_sealing(rng):
    group = default_group()
    x, y = rng.randrange(2, group.p - 1), rng.randrange(2, group.p - 1)
    key = session_key(pow(pow(group.g, x, group.p), y, group.p), group.p)
    assert key == session_key(pow(pow(group.g, y, group.p), x, group.p), group.p)
    assert len(key) == 16

    blob = seal(key, b"B|1f", rng)
    assert unseal(key, blob) == b"B|1f"
    with pytest.raises(DecryptionFailed):
        unseal(bytes(16), blob)


def test_default_group_is_a_safe_prime_group():
    group = default_group()
    assert group.p.bit_length() == 64 and group.g == 4
    assert pow(group.g, (group.p - 1) // 2, group.p) == 1
    assert default_group() is group
    assert DhGroup.generate(32, random.Random(1)).p.bit_length() == 32


def test_honest_handshake(make_nodes):
    nodes = make_nodes(["A", "B"])
    a, b = nodes["A"], nodes["B"]
    assert run_handshake(a, b)

    assert a.lists.key_of("B") is not None
    assert a.lists.key_of("B") == b.lists.key_of("A")
    assert a.lists.trust_of("B") == TRUSTED and b.lists.trust_of("A") == TRUSTED

    mine = a.session("B", AuthRole.INITIATOR)
    theirs = b.session("A", AuthRole.RESPONDER)
    assert mine.history == [AuthState.INIT_SENT, AuthState.ATTESTED, AuthState.KEYED, AuthState.DONE]
    assert theirs.history == [AuthState.CHALLENGED, AuthState.KEYED, AuthState.DONE]
    assert mine.n2 == theirs.n2


def test_second_handshake_reuses_the_stored_key(make_nodes):
    nodes = make_nodes(["A", "B"])
    a, b = nodes["A"], nodes["B"]
    assert run_handshake(a, b)
    key = a.lists.key_of("B")

    assert run_handshake(a, b)
    session = a.session("B", AuthRole.INITIATOR)
    assert session.own_public is None and session.key == key
    assert b.lists.key_of("A") == key


def test_compromised_initiator_is_marked_and_gets_no_key(make_nodes):
    nodes = make_nodes(["A", "B"])
    a, b = nodes["A"], nodes["B"]
    a.tpm.compromised = True

    assert not run_handshake(a, b)
    assert b.lists.trust_of("A") == DISTRUSTED
    assert b.lists.key_of("A") is None
    assert b.session("A", AuthRole.RESPONDER).state == AuthState.FAILED
    # message 4 never came back
    assert a.session("B", AuthRole.INITIATOR).state == AuthState.ATTESTED


def test_unapproved_configuration_fails_pba(make_nodes):
    nodes = make_nodes(["A", "B"], config_values={"A": b"rootkit-2.0"})
    assert not run_handshake(nodes["A"], nodes["B"])
    assert nodes["B"].lists.trust_of("A") == DISTRUSTED


def test_unknown_neighbor_is_dropped_silently(make_nodes):
    nodes = make_nodes(["A", "B"], neighbors={"A": ["B"], "B": []})
    a, b = nodes["A"], nodes["B"]
    assert not run_handshake(a, b)
    assert b.session("A", AuthRole.RESPONDER) is None
    assert b.lists.trust_of("A") == UNKNOWN
    assert a.session("B", AuthRole.INITIATOR).state == AuthState.INIT_SENT

    with pytest.raises(DropSilently):
        b.start("A")


def test_out_of_order_message_is_dropped(make_nodes):
    nodes = make_nodes(["A", "B"])
    message = nodes["A"].start("B")
    with pytest.raises(DropSilently):
        nodes["B"].auth_step(message.model_copy(update={"step": ATTEST}))
    with pytest.raises(DropSilently):
        nodes["A"].auth_step(message.model_copy(update={"step": INIT, "receiver": "C"}))


def test_initiator_keeps_an_earlier_distrust_mark(make_nodes):
    nodes = make_nodes(["A", "B"])
    a, b = nodes["A"], nodes["B"]
    b.tpm.compromised = True
    assert not run_handshake(b, a)
    assert a.lists.trust_of("B") == DISTRUSTED

    # B still answers as responder with a valid AIK signature
    assert run_handshake(a, b)
    assert a.lists.trust_of("B") == DISTRUSTED


def test_integrity_measurement_binds_the_nonce():
    pcr = bytes(20)
    assert integrity_measurement("A", 1, pcr) != integrity_measurement("A", 2, pcr)
    assert integrity_measurement("A", 1, pcr) != integrity_measurement("B", 1, pcr)


def test_neighbor_update():
    lists = TrustLists()
    neighbor_update(lists, add="B")
    neighbor_update(lists, add="C")
    lists.mark("B", TRUSTED)
    lists.set_key("B", "00")
    lists.mark("Z", TRUSTED)
    assert "Z" not in lists.trust

    neighbor_update(lists, reset_epoch=True)
    assert lists.trust == {"B": UNKNOWN, "C": UNKNOWN} and lists.keys == {}

    neighbor_update(lists, remove="C")
    assert lists.neighbors == {"B"} and "C" not in lists.trust


def test_public_value_outside_the_subgroup_is_rejected(make_nodes):
    nodes = make_nodes(["A", "B"])
    a, b = nodes["A"], nodes["B"]
    [challenge] = b.auth_step(a.start("B"))
    [attest] = a.auth_step(challenge)

    # p is a safe prime, so -4 is a quadratic non-residue
    p = b.group.p
    bundle = attest.bundle
    forged = bundle.model_copy(update={"key_info": b.group.key_info(p - 4)})
    message = attest.model_copy(update={"bundle": forged, "digest": bundle_digest("A", forged, a.hash_name)})

    with pytest.raises(AuthFailed):
        b.auth_step(message)
    assert b.session("A", AuthRole.RESPONDER).state == AuthState.FAILED
    assert b.lists.key_of("A") is None


def test_neighbor_lists_stay_consistent_under_random_updates():
    rng = random.Random(7)
    names = [f"N{i}" for i in range(12)]
    lists = TrustLists()
    expected_neighbors, expected_trust, expected_keys = set(), {}, {}

    for _ in range(10_000):
        node = rng.choice(names)
        op = rng.randrange(5)
        if op == 0:
            neighbor_update(lists, add=node)
            expected_neighbors.add(node)
            expected_trust.setdefault(node, UNKNOWN)
        elif op == 1:
            neighbor_update(lists, remove=node)
            expected_neighbors.discard(node)
            expected_trust.pop(node, None)
            expected_keys.pop(node, None)
        elif op == 2:
            value = rng.choice([TRUSTED, UNKNOWN, DISTRUSTED])
            lists.mark(node, value)
            if node in expected_neighbors:
                expected_trust[node] = value
        elif op == 3:
            lists.set_key(node, f"{rng.getrandbits(32):08x}")
            if node in expected_neighbors:
                expected_keys[node] = lists.key_of(node)
        elif rng.random() < 0.05:
            neighbor_update(lists, reset_epoch=True)
            expected_trust = {n: UNKNOWN for n in expected_neighbors}
            expected_keys = {}

        assert lists.neighbors == expected_neighbors
        assert set(lists.trust) == lists.neighbors
        assert set(lists.keys) <= lists.neighbors
        assert lists.trust == expected_trust and lists.keys == expected_keys
