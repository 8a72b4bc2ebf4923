import logging

from Models.CoalitionContext import CoalitionContext
from Models.Share import Share, Dealing
from Models.SplitMode import SplitMode
from CrtVss.Errors import ModulusMismatch, ModeMismatch, CapacityExceeded
from ModMath.ModMath import crt_reconstruct

logger = logging.getLogger(__name__)


def _check_pair(a: Share, b: Share):
    if a.index != b.index or a.modulus != b.modulus:
        raise ModulusMismatch(f"share {a.index} mod {a.modulus} cannot combine with share {b.index} mod {b.modulus}")


def add_shares(a: Share, b: Share) -> Share:
    _check_pair(a, b)
    return Share(index=a.index, value=(a.value + b.value) % a.modulus, modulus=a.modulus)


def mul_shares(a: Share, b: Share) -> Share:
    _check_pair(a, b)
    return Share(index=a.index, value=a.value * b.value % a.modulus, modulus=a.modulus)


def shares_product_protocol(deal_a: Dealing, deal_b: Dealing, ctx: CoalitionContext) -> int:
    """
    Coalition computes a*b from direct-mode dealings of a and b.

    Each member multiplies its two residues locally; one CRT recombination of
    the products yields a*b. The dealers' declared bounds must guarantee that the
    product fits below M_C, otherwise the recombination would silently wrap.
    """
    if deal_a.mode != SplitMode.DIRECT or deal_b.mode != SplitMode.DIRECT:
        raise ModeMismatch("shares product needs two direct-mode dealings")
    if deal_a.params != deal_b.params:
        raise ModulusMismatch("dealings use different parameter sets")

    worst_case = (deal_a.bound - 1) * (deal_b.bound - 1)
    if worst_case >= ctx.m_c:
        raise CapacityExceeded(f"declared product bound {worst_case} does not fit below M_C = {ctx.m_c}")

    products = [mul_shares(deal_a.share(i), deal_b.share(i)) for i in ctx.indices]
    logger.debug(f"Coalition {ctx.indices} recombining local products")
    return crt_reconstruct([(v.value, v.modulus) for v in products], ctx)
