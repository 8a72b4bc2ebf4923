import random

import pytest

from Models.ABParams import ABParams
from Models.AuthSession import AuthRole
from Models.Share import Share
from Models.Signing import MemberShares, Round1Msg, SigningSession
from Models.TrustLists import DISTRUSTED, TRUSTED
from Curve.Curve import O, TOY_CURVE, scalar_mul
from Curve.Dss import dss_sign_central, dss_verify
from ModMath.ModMath import coalition_context, crt_reconstruct
from ModMath.ParamsGenerator import random_sophie_germain
from Storage.ConfigFiles import load_curve
from ThresholdDss.Errors import (BoundTooLarge, InsufficientTrustedNodes, MissingShares, NonInvertibleKA,
                                 NoValidCandidate, ShareVerificationFailed)
from ThresholdDss.KeySetup import create_signing_key, plan_signing_params, signing_key_bound
from ThresholdDss.ThresholdDss import (ThresholdSigner, accumulate, assemble_and_select, check_sizing,
                                       combine_round1, joint_nonce_gen, nonce_contribution, round1, round2)
from ThresholdDss.TrustedChoice import trusted_choice

TOY_BOUND = 64
BIG_BOUND = 1 << 16


@pytest.fixture(scope="module")
def toy_params():
    return plan_signing_params(2, 3, 7, TOY_CURVE, TOY_BOUND, random.Random(1))


@pytest.fixture(scope="module")
def big_curve():
    return load_curve("secp256k1")


@pytest.fixture(scope="module")
def big_key(big_curve):
    rng = random.Random(2)
    params = plan_signing_params(2, 3, 7, big_curve, BIG_BOUND, rng)
    return create_signing_key(3, params, big_curve, BIG_BOUND, rng)


def nonce_of(signer: ThresholdSigner, coalition) -> int:
    shares = [signer.members[i].k_share for i in coalition.indices]
    return crt_reconstruct([(share.value, share.modulus) for share in shares], coalition)


def test_key_setup_respects_sizing(toy_params):
    rng = random.Random(3)
    key = create_signing_key(4, toy_params, TOY_CURVE, TOY_BOUND, rng)
    assert key.d % 7 == 4
    assert key.d % TOY_CURVE.q != 0
    assert key.d < signing_key_bound(toy_params, TOY_CURVE, TOY_BOUND)
    assert 2 * TOY_BOUND * TOY_CURVE.q * (1 + key.d) < toy_params.capacity
    assert key.public_key == scalar_mul(key.d, TOY_CURVE.generator, TOY_CURVE)


def test_key_setup_rejects_oversized_bound(fixture_params):
    with pytest.raises(BoundTooLarge):
        create_signing_key(4, fixture_params, TOY_CURVE, TOY_BOUND, random.Random(0))


def test_check_sizing(toy_params):
    key = create_signing_key(1, toy_params, TOY_CURVE, TOY_BOUND, random.Random(4))
    coalition = coalition_context(toy_params, [1, 2])
    check_sizing(coalition, key, TOY_CURVE, TOY_BOUND)
    with pytest.raises(BoundTooLarge):
        check_sizing(coalition, key, TOY_CURVE, toy_params.capacity)


def test_joint_nonce_is_sum_of_contributions(toy_params):
    rng = random.Random(5)
    key = create_signing_key(2, toy_params, TOY_CURVE, TOY_BOUND, rng)
    coalition = coalition_context(toy_params, [1, 3])
    k_shares, a_shares = joint_nonce_gen(coalition, key, TOY_CURVE, TOY_BOUND, rng, forced_rho=[3, 4],
                                         forced_sigma=[2, 5])
    k = crt_reconstruct([(k_shares[i].value, k_shares[i].modulus) for i in coalition.indices], coalition)
    a = crt_reconstruct([(a_shares[i].value, a_shares[i].modulus) for i in coalition.indices], coalition)
    assert (k, a) == (7, 7)


def test_accumulate_rejects_bad_sub_share(toy_params):
    rng = random.Random(6)
    key = create_signing_key(2, toy_params, TOY_CURVE, TOY_BOUND, rng)
    rho, _ = nonce_contribution(key, TOY_BOUND, rng)
    good = rho.share(1)
    bad = Share(index=1, value=(good.value + 1) % good.modulus, modulus=good.modulus)
    assert accumulate(1, {2: (good, rho.commitment(1))}) == good
    with pytest.raises(ShareVerificationFailed):
        accumulate(1, {2: (bad, rho.commitment(1))})


def test_manual_rounds_match_central_signer(toy_params):
    rng = random.Random(7)
    key = create_signing_key(5, toy_params, TOY_CURVE, TOY_BOUND, rng)
    coalition = coalition_context(toy_params, [2, 3])
    signer = ThresholdSigner(key, TOY_CURVE, TOY_BOUND, rng)
    session = signer.sign(b"manual", coalition)

    # replay both rounds on the stored member shares
    replay = SigningSession(coalition=coalition, curve=TOY_CURVE, digest=session.digest, bound=TOY_BOUND)
    members = list(signer.members.values())
    candidates = combine_round1([round1(member, replay) for member in members], replay)
    second = [round2(member, candidates, session.digest, replay) for member in members]
    signature, kappa = assemble_and_select(second, candidates, key.public_key, session.digest, replay)
    assert (signature, kappa) == (session.signature, session.kappa)


def test_toy_sessions_match_central_signer(toy_params):
    for seed in range(100):
        rng = random.Random(seed)
        key = create_signing_key(rng.randrange(7), toy_params, TOY_CURVE, TOY_BOUND, rng)
        coalition = coalition_context(toy_params, sorted(rng.sample([1, 2, 3], 2)))
        signer = ThresholdSigner(key, TOY_CURVE, TOY_BOUND, rng)
        session = signer.sign(f"message {seed}".encode(), coalition)

        assert 0 <= session.kappa < 2
        assert dss_verify(key.public_key, session.digest, session.signature, TOY_CURVE)
        expected = dss_sign_central(key.d, nonce_of(signer, coalition), session.digest, TOY_CURVE)
        assert session.signature == expected


def test_large_curve_sessions(big_key, big_curve):
    rng = random.Random(8)
    for i in range(20):
        coalition = coalition_context(big_key.params, sorted(rng.sample([1, 2, 3], 2)))
        signer = ThresholdSigner(big_key, big_curve, BIG_BOUND, rng)
        session = signer.sign(f"large {i}".encode(), coalition)
        assert session.kappa < 2
        assert dss_verify(big_key.public_key, session.digest, session.signature, big_curve)
        assert session.signature == dss_sign_central(big_key.d, nonce_of(signer, coalition), session.digest,
                                                     big_curve)


def _bump_v(messages, coalition):
    first = messages[0]
    return [first.model_copy(update={"v": (first.v + 1) % coalition.moduli[first.index]}), *messages[1:]]


def _bump_sig(messages, coalition):
    first = messages[0]
    modulus = coalition.moduli[first.index]
    tampered = [(c + 1) % modulus for c in first.sig_candidates]
    return [first.model_copy(update={"sig_candidates": tampered}), *messages[1:]]


@pytest.mark.parametrize("stage", ["round1", "round2"])
def test_tampered_share_yields_no_valid_candidate(big_key, big_curve, stage):
    coalition = coalition_context(big_key.params, [1, 2])
    signer = ThresholdSigner(big_key, big_curve, BIG_BOUND, random.Random(9), max_attempts=4)
    tamper = {"round1_filter": lambda msgs: _bump_v(msgs, coalition)} if stage == "round1" else \
        {"round2_filter": lambda msgs: _bump_sig(msgs, coalition)}
    with pytest.raises(NoValidCandidate):
        signer.sign(b"tampered", coalition, **tamper)


def test_trusted_choice_all_honest(make_nodes, fixture_params):
    nodes = make_nodes(["R", "P1", "P2", "P3"])
    index_of = {"P1": 1, "P2": 2, "P3": 3}
    neighbors = [nodes[p] for p in ("P1", "P2", "P3")]
    coalition = trusted_choice(nodes["R"], neighbors, 2, 3, index_of, fixture_params)
    assert coalition.indices == [1, 2]
    assert nodes["R"].lists.trust_of("P1") == TRUSTED


def test_trusted_choice_skips_compromised_node(make_nodes, fixture_params):
    nodes = make_nodes(["R", "P1", "P2", "P3"])
    nodes["P1"].tpm.compromised = True
    index_of = {"P1": 1, "P2": 2, "P3": 3}
    coalition = trusted_choice(nodes["R"], [nodes[p] for p in ("P1", "P2", "P3")], 2, 3, index_of, fixture_params)
    assert coalition.indices == [2, 3]
    assert nodes["R"].lists.trust_of("P1") == DISTRUSTED


def test_trusted_choice_runs_out_of_nodes(make_nodes, fixture_params):
    nodes = make_nodes(["R", "P1", "P2", "P3"])
    nodes["P1"].tpm.compromised = True
    nodes["P2"].tpm.compromised = True
    index_of = {"P1": 1, "P2": 2, "P3": 3}
    with pytest.raises(InsufficientTrustedNodes):
        trusted_choice(nodes["R"], [nodes[p] for p in ("P1", "P2", "P3")], 2, 3, index_of, fixture_params)


def test_trusted_choice_needs_n_responders(make_nodes, fixture_params):
    nodes = make_nodes(["R", "P1", "P2", "P3"])
    with pytest.raises(InsufficientTrustedNodes):
        trusted_choice(nodes["R"], [nodes["P1"], nodes["P2"]], 2, 3, {"P1": 1, "P2": 2}, fixture_params)


@pytest.fixture
def fixture_session(fixture_params):
    coalition = coalition_context(fixture_params, [1, 2])
    return SigningSession(coalition=coalition, curve=TOY_CURVE, digest=11, bound=TOY_BOUND)


def member(index: int, modulus: int, d: int, k: int | None, a: int | None) -> MemberShares:
    return MemberShares(index=index, d_share=Share(index=index, value=d, modulus=modulus),
                        k_share=None if k is None else Share(index=index, value=k, modulus=modulus),
                        a_share=None if a is None else Share(index=index, value=a, modulus=modulus))


def test_round1_small_example(fixture_session):
    coalition = fixture_session.coalition
    message = round1(member(1, 53, 16, 5, 3), fixture_session)
    assert message.v == 15
    assert message.w == scalar_mul(coalition.lambdas[1] * 3 % coalition.m_c, TOY_CURVE.generator, TOY_CURVE)

    assert round1(member(1, 53, 16, 5, 0), fixture_session).w == O


def test_round2_small_example(fixture_session):
    message = round2(member(1, 53, 16, 5, 3), [4], 11, fixture_session)
    assert message.sig_candidates == [4]


def test_combine_round1_rejects_ka_multiple_of_q(fixture_session):
    # 38 = 2 * 19 in both residues
    messages = [Round1Msg(index=1, v=38, w=O), Round1Msg(index=2, v=38, w=O)]
    with pytest.raises(NonInvertibleKA):
        combine_round1(messages, fixture_session)


def test_missing_nonce_material(fixture_session, toy_params):
    with pytest.raises(MissingShares):
        combine_round1([Round1Msg(index=1, v=15, w=O)], fixture_session)
    with pytest.raises(MissingShares):
        round1(member(1, 53, 16, None, 3), fixture_session)

    rng = random.Random(12)
    key = create_signing_key(2, toy_params, TOY_CURVE, TOY_BOUND, rng)
    rho, _ = nonce_contribution(key, TOY_BOUND, rng)
    with pytest.raises(MissingShares):
        accumulate(1, {1: (rho.share(1), rho.commitment(1)), 2: (None, rho.commitment(1))})
    with pytest.raises(MissingShares):
        accumulate(1, {2: (rho.share(1), None)})
    with pytest.raises(MissingShares):
        accumulate(1, {})


def test_single_member_coalition_never_wraps():
    rng = random.Random(13)
    m = random_sophie_germain(20, rng)
    params = ABParams(m0=7, moduli=[m], verif_primes=[2 * m + 1], t=1, n=1, capacity=m)
    key = create_signing_key(3, params, TOY_CURVE, 16, rng)
    coalition = coalition_context(params, [1])
    assert coalition.lambdas == {1: 1}

    for i in range(10):
        signer = ThresholdSigner(key, TOY_CURVE, 16, rng)
        session = signer.sign(f"alone {i}".encode(), coalition)
        assert session.kappa == 0
        assert dss_verify(key.public_key, session.digest, session.signature, TOY_CURVE)


def test_trusted_choice_skips_cached_distrust_without_handshake(make_nodes, fixture_params):
    nodes = make_nodes(["R", "P1", "P2", "P3"])
    nodes["R"].lists.mark("P1", DISTRUSTED)
    index_of = {"P1": 1, "P2": 2, "P3": 3}
    coalition = trusted_choice(nodes["R"], [nodes[p] for p in ("P1", "P2", "P3")], 2, 3, index_of, fixture_params)

    assert coalition.indices == [2, 3]
    assert nodes["P1"].session("R", AuthRole.INITIATOR) is None
    assert nodes["R"].session("P1", AuthRole.RESPONDER) is None
    assert nodes["R"].lists.trust_of("P1") == DISTRUSTED
