import argparse
import logging
import sys

from Cli.Commands import EXIT_USAGE, dispatch, run_config
from Cli.Errors import UsageError


def _int(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser("crtauth", description="CRT verifiable secret sharing and protocol simulator.")

    parser.add_argument(
        '--debug',
        help="Even more verbose logging.",
        action="store_const", dest="loglevel", const=logging.DEBUG,
        default=logging.WARNING,
    )

    parser.add_argument(
        '-v', '--verbose',
        help="More verbose logging.",
        action="store_const", dest="loglevel", const=logging.INFO,
    )

    parser.add_argument("--config", help="JSON file with command settings, flags take precedence.")
    parser.add_argument("--seed", type=_int, help="Random seed, defaults to $CRTAUTH_SEED.")
    parser.add_argument("--pretty", action="store_true", default=None, help="Indent JSON output.")

    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen-params", help="Generate an Asmuth-Bloom parameter file.")
    gen.add_argument("--t", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--m0", type=_int)
    gen.add_argument("--bits", type=int, help="Minimum capacity in bits.")
    gen.add_argument("--out")

    split = commands.add_parser("split", help="Split a secret into share files and a bulletin.")
    split.add_argument("secret", type=_int)
    split.add_argument("--params", help="Parameter file or fixture name.")
    split.add_argument("--mask", type=_int, help="Force the mask instead of drawing it.")
    split.add_argument("--out", help="Folder for the share and bulletin files.")

    verify = commands.add_parser("verify", help="Check one share file against the bulletin.")
    verify.add_argument("shares", nargs=1, metavar="share")
    verify.add_argument("--bulletin")
    verify.add_argument("--params")

    combine = commands.add_parser("combine", help="Recover the secret from t share files.")
    combine.add_argument("shares", nargs="+", metavar="share")
    combine.add_argument("--params")

    auth = commands.add_parser("demo-auth", help="Run the honest authentication handshake.")
    auth.add_argument("--transcript", help="Write the JSON transcript here.")

    sign = commands.add_parser("demo-sign", help="Run the three-phase threshold signature.")
    sign.add_argument("--curve")
    sign.add_argument("--message")
    sign.add_argument("--t", type=int)
    sign.add_argument("--n", type=int)
    sign.add_argument("--m0", type=_int)
    sign.add_argument("--inject", help="Fault to inject: tamper-sig-share.")
    sign.add_argument("--transcript")

    attack = commands.add_parser("attack", help="Run an attack scenario.")
    attack.add_argument("scenario", nargs="?")
    attack.add_argument("--all", dest="all_scenarios", action="store_true", default=None)
    attack.add_argument("--workers", type=int)
    attack.add_argument("--transcript", help="Transcript file, or folder with --all.")

    bench = commands.add_parser("bench-compare", help="Count reconstruction multiplications, CRT against Shamir.")
    bench.add_argument("t_values", nargs="*", type=int, metavar="t")
    bench.add_argument("--out", help="CSV file, stdout if omitted.")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    logging.basicConfig(level=args.loglevel, format="%(asctime)s %(name)-20s - %(levelname)-8s - %(message)s", force=True)

    values = vars(args)
    command = values.pop("command")
    config_path = values.pop("config")
    values.pop("loglevel")

    try:
        config = run_config(command, values, config_path)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return dispatch(config)


if __name__ == '__main__':
    sys.exit(main())
