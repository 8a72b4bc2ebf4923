import logging
from typing import Callable

from Models.ABParams import ABParams
from Models.CoalitionContext import CoalitionContext
from Models.TrustLists import TRUSTED, DISTRUSTED
from Attest.AuthNode import AuthNode, run_handshake
from ModMath.ModMath import coalition_context
from ThresholdDss.Errors import InsufficientTrustedNodes

logger = logging.getLogger(__name__)

# (initiator, responder); the simulator passes one that goes over the network
Handshake = Callable[[AuthNode, AuthNode], object]


def attested(requestor: AuthNode, neighbor: AuthNode, handshake: Handshake = run_handshake) -> bool:
    """Trust check run by the requestor before it admits a neighbor."""
    node_id = neighbor.node_id
    mark = requestor.lists.trust_of(node_id)
    if mark == DISTRUSTED:
        logger.debug(f"{node_id} is marked -1, skipped")
        return False
    if mark == TRUSTED and requestor.lists.key_of(node_id) is not None:
        return True

    # the neighbor attests itself to the requestor
    handshake(neighbor, requestor)
    return requestor.lists.trust_of(node_id) == TRUSTED


def trusted_choice(requestor: AuthNode, neighbors: list[AuthNode], t: int, n: int, index_of: dict[str, int],
                   params: ABParams, handshake: Handshake = run_handshake) -> CoalitionContext:
    """
    Picks t attested neighbors as the signing or reconstruction coalition.

    Args:
        requestor: Node asking for the coalition, it verifies the others
        neighbors: Candidate nodes
        t: Coalition size
        n: Minimum number of neighbors that have to answer
        index_of: Share index held by each node id
        params: Parameters the coalition context is built from
        handshake: Runs one authentication exchange, in memory by default

    Returns:
        Coalition of the t lowest share indices among the attested neighbors
    """
    responding = [node for node in neighbors if node.node_id in requestor.lists.neighbors]
    if len(responding) < n:
        raise InsufficientTrustedNodes(f"{len(responding)} of the required {n} neighbors responded")

    trusted = [node for node in responding if attested(requestor, node, handshake)]
    if len(trusted) < t:
        raise InsufficientTrustedNodes(f"{len(trusted)} neighbors passed attestation, {t} needed")

    chosen = sorted(index_of[node.node_id] for node in trusted)[:t]
    logger.info(f"{requestor.node_id} chose coalition {chosen}")
    return coalition_context(params, chosen)
