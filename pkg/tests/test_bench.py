import io

from Cli.Bench import bench_pair, fit_through_origin, run_bench, write_csv

T_VALUES = [2, 4, 8, 16, 32]


def test_operation_counts_follow_the_complexity_claims():
    rows = run_bench(T_VALUES, seed=3)
    crt = {row.t: row.mult_count for row in rows if row.scheme == "crt"}
    shamir = {row.t: row.mult_count for row in rows if row.scheme == "shamir"}

    assert crt == {t: 3 * t - 1 for t in T_VALUES}
    assert shamir == {t: 2 * t * t for t in T_VALUES}

    _, deviation = fit_through_origin(rows, "crt")
    assert deviation <= 0.2
    for t in T_VALUES[:-1]:
        assert shamir[2 * t] / shamir[t] >= 3


def test_smallest_threshold(rng):
    crt, shamir = bench_pair(2, rng)
    assert crt.mult_count > 0 and shamir.mult_count > 0
    assert (crt.scheme, shamir.scheme) == ("crt", "shamir")


def test_empty_threshold_list_gives_header_only():
    out = io.StringIO()
    write_csv(run_bench([], seed=0), out)
    assert out.getvalue() == "scheme,t,mult_count\n"


def test_csv_rows():
    out = io.StringIO()
    write_csv(run_bench([2], seed=0), out)
    assert out.getvalue().splitlines() == ["scheme,t,mult_count", "crt,2,5", "shamir,2,8"]


def test_fit_through_origin():
    rows = run_bench([2, 4], seed=1)
    slope, _ = fit_through_origin(rows, "shamir")
    assert slope > 0
    assert fit_through_origin([], "crt") == (0.0, 0.0)
