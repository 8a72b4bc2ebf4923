import random

import pytest

from Models.ABParams import ABParams
from Curve.Curve import TOY_CURVE


@pytest.fixture
def fixture_params() -> ABParams:
    return ABParams(m0=7, moduli=[53, 83, 89], verif_primes=[107, 167, 179], t=2, n=3, capacity=53 * 83)


@pytest.fixture
def toy_curve():
    return TOY_CURVE


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


CONFIG_SET = [b"trusted-os-1.0", b"trusted-os-1.1"]


def build_nodes(node_ids: list[str], seed: int = 7, config_values: dict[str, bytes] | None = None,
                neighbors: dict[str, list[str]] | None = None) -> dict:
    """Authentication nodes wired to one DAA issuer, everyone a neighbor of everyone unless told otherwise."""
    from Attest.AuthNode import AuthNode
    from Attest.KeyAgreement import default_group
    from Attest.TpmSimulator import DaaIssuer, TpmState, pcr_extend

    rng = random.Random(seed)
    issuer = DaaIssuer(rng)
    config_values = config_values or {}
    tpms = {}
    for node_id in node_ids:
        value = config_values.get(node_id, CONFIG_SET[0])
        tpm = TpmState.create(node_id, rng, value)
        pcr_extend(tpm, 0, b"boot")
        issuer.issue(tpm)
        tpms[node_id] = tpm

    directory = {node_id: tpm.aik_public() for node_id, tpm in tpms.items()}
    nodes = {}
    for node_id in node_ids:
        peers = neighbors[node_id] if neighbors is not None else [p for p in node_ids if p != node_id]
        nodes[node_id] = AuthNode(node_id, tpms[node_id], issuer, directory, CONFIG_SET, default_group(), rng,
                                  neighbors=peers)
    return nodes


@pytest.fixture
def make_nodes():
    return build_nodes
