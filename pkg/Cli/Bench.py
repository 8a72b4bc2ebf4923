import csv
import logging
import random
from typing import IO

from Models.BenchRow import BenchRow
from Models.OpCounter import OpCounter
from Models.SplitMode import SplitMode
from CrtVss.CrtVss import reconstruct, split_masked
from ModMath.ModMath import coalition_context
from ModMath.ParamsGenerator import gen_ab_params, next_prime
from ShamirRef.ShamirRef import shamir_reconstruct, shamir_split
from Cli.Errors import BenchMismatch

logger = logging.getLogger(__name__)

BENCH_M0 = 7
CSV_FIELDS = ["scheme", "t", "mult_count"]


def bench_pair(t: int, rng: random.Random) -> tuple[BenchRow, BenchRow]:
    """
    Reconstruction cost of one t-of-t secret under both schemes.

    The Shamir field is the first prime above the CRT capacity, so both
    schemes recover the same lifted value from numbers of the same size.
    """
    params = gen_ab_params(t, t, BENCH_M0, 0, rng)
    secret = rng.randrange(BENCH_M0)
    dealing, masked = split_masked(secret, params, rng)

    crt = OpCounter()
    ctx = coalition_context(params, params.indices, crt)
    y, recovered = reconstruct(list(dealing.shares), ctx, params.m0, SplitMode.MASKED, crt)
    if recovered != secret:
        raise BenchMismatch(f"CRT reconstruction failed at t={t}")

    prime = next_prime(params.capacity + 1)
    poly = shamir_split(masked.lifted, t, t, prime, rng)
    shamir = OpCounter()
    if shamir_reconstruct(list(poly.shares), prime, shamir) != y:
        raise BenchMismatch(f"Shamir reconstruction failed at t={t}")

    logger.debug(f"t={t}: crt={crt.multiplications} shamir={shamir.multiplications} ({prime.bit_length()} bit field)")
    return (BenchRow(scheme="crt", t=t, mult_count=crt.multiplications),
            BenchRow(scheme="shamir", t=t, mult_count=shamir.multiplications))


def run_bench(t_values: list[int], seed: int | None) -> list[BenchRow]:
    rng = random.Random(seed)
    rows = []
    for t in t_values:
        rows.extend(bench_pair(t, rng))
    return rows


def fit_through_origin(rows: list[BenchRow], scheme: str) -> tuple[float, float]:
    """Least-squares slope c of count = c*t and the worst relative deviation from it."""
    points = [(row.t, row.mult_count) for row in rows if row.scheme == scheme]
    if not points:
        return 0.0, 0.0
    slope = sum(t * count for t, count in points) / sum(t * t for t, _ in points)
    deviation = max(abs(count - slope * t) / (slope * t) for t, count in points)
    return slope, deviation


def write_csv(rows: list[BenchRow], file: IO[str]):
    writer = csv.DictWriter(file, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.model_dump())
