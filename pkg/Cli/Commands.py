import logging
import random
import sys
from pathlib import Path

from pydantic import ValidationError

from Models.RunConfig import RunConfig
from Models.ABParams import ABParams
from Models.Transcript import Transcript, Verdict
from Cli.Bench import fit_through_origin, run_bench, write_csv
from Cli.Errors import CliError, ShareRejected, UsageError
from CrtVss.CrtVss import reconstruct, split_masked, verify_share
from CrtVss.Errors import CrtVssError
from Curve.Errors import CurveError
from ModMath.Errors import InvalidParams, ModMathError
from ModMath.ModMath import coalition_context, to_hex
from ModMath.ParamsGenerator import check_ab_params, gen_ab_params
from NetSim.Errors import NetSimError, UnknownScenario
from NetSim.Registry import build_config, get_scenario, run_scenario, scenario_names
from NetSim.ScenarioQueue import ScenarioQueue
from NetSim.Scenarios.Signing import run_signing
from ShamirRef.Errors import ShamirError
from Storage.ConfigFiles import default_seed, load_params
from Storage.FileFormats import (FileFormatError, bulletin_commitment, bulletin_to_dict, dump_json, params_digest,
                                 params_from_dict, params_to_dict, read_json, share_from_dict, share_to_dict,
                                 signature_record, write_json)
from ThresholdDss.Errors import NoValidCandidate, ThresholdDssError
from Attest.Errors import AttestError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_SIGNATURE = 4

INJECTIONS = ("tamper-sig-share",)


def run_config(command: str, values: dict, config_path: str | None = None) -> RunConfig:
    """Values from the --config file, overridden by every flag that was given; the seed falls back to CRTAUTH_SEED."""
    merged = {}
    if config_path is not None:
        try:
            merged.update(read_json(config_path))
        except FileNotFoundError:
            raise UsageError(f"config file {config_path} not found") from None
        except ValueError as e:
            raise UsageError(f"config file {config_path} is not valid JSON: {e}") from None
    merged.update({key: value for key, value in values.items() if value is not None})
    if merged.get("seed") is None:
        merged["seed"] = default_seed()
    merged["command"] = command
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        raise UsageError(str(e)) from None


def _emit(data, config: RunConfig):
    print(dump_json(data, config.pretty))


def _require_seed(config: RunConfig) -> int:
    if config.seed is None:
        raise UsageError(f"{config.command} needs --seed or CRTAUTH_SEED")
    return config.seed


def _load_params(config: RunConfig) -> ABParams:
    if config.params is None:
        raise UsageError(f"{config.command} needs --params")
    if Path(config.params).is_file():
        return check_ab_params(params_from_dict(read_json(config.params)))
    try:
        return load_params(config.params)
    except FileNotFoundError:
        raise UsageError(f"no parameter file or fixture named {config.params!r}") from None


def _write_transcript(transcript: Transcript, path: str | Path, pretty: bool):
    with open(path, "w") as file:
        file.write(transcript.to_json(pretty) + "\n")


def cmd_gen_params(config: RunConfig) -> int:
    if config.t is None or config.n is None or config.m0 is None:
        raise UsageError("gen-params needs --t, --n and --m0")
    if config.t > config.n:
        raise UsageError(f"threshold t={config.t} exceeds n={config.n}")

    params = gen_ab_params(config.t, config.n, config.m0, config.bits, random.Random(config.seed))
    logger.info(f"Generated moduli {params.moduli} with capacity of {params.capacity.bit_length()} bits")
    data = params_to_dict(params)
    if config.out:
        write_json(config.out, data, config.pretty)
    else:
        _emit(data, config)
    return EXIT_OK


def cmd_split(config: RunConfig) -> int:
    if config.secret is None:
        raise UsageError("split needs a secret")
    params = _load_params(config)
    dealing, _ = split_masked(config.secret, params, random.Random(config.seed), mask=config.mask)

    folder = Path(config.out or ".")
    folder.mkdir(parents=True, exist_ok=True)
    paths = []
    for share, commitment in zip(dealing.shares, dealing.commitments):
        path = folder / f"share-{share.index}.json"
        write_json(path, share_to_dict(share, commitment, dealing.mode), config.pretty)
        paths.append(str(path))
    bulletin = folder / "bulletin.json"
    write_json(bulletin, bulletin_to_dict(params, dealing.commitments), config.pretty)

    _emit({"shares": paths, "bulletin": str(bulletin)}, config)
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    if len(config.shares) != 1 or config.bulletin is None:
        raise UsageError("verify needs exactly one share file and --bulletin")
    share, carried, _ = share_from_dict(read_json(config.shares[0]))
    bulletin = read_json(config.bulletin)
    if config.params is not None and bulletin.get("params_digest") != params_digest(_load_params(config)):
        raise ShareRejected(share.index, "bulletin was published for other parameters")

    published = bulletin_commitment(bulletin, share.index)
    if carried != published:
        raise ShareRejected(share.index, "carried commitment differs from the bulletin")
    if not verify_share(share, published):
        raise ShareRejected(share.index, "value does not match its commitment")

    _emit({"index": share.index, "valid": True}, config)
    return EXIT_OK


def cmd_combine(config: RunConfig) -> int:
    params = _load_params(config)
    loaded = [share_from_dict(read_json(path)) for path in config.shares]
    modes = {mode for _, _, mode in loaded}
    if len(modes) != 1:
        raise UsageError("share files mix split modes")

    shares = [share for share, _, _ in loaded]
    ctx = coalition_context(params, [share.index for share in shares])
    _, secret = reconstruct(shares, ctx, params.m0, modes.pop())
    _emit({"secret": to_hex(secret), "coalition": ctx.indices}, config)
    return EXIT_OK


def cmd_demo_auth(config: RunConfig) -> int:
    transcript = run_scenario(build_config("auth-honest", _require_seed(config)))
    if config.transcript:
        _write_transcript(transcript, config.transcript, config.pretty)
    _emit({"scenario": transcript.scenario, "verdict": transcript.verdict.value}, config)
    return EXIT_OK if transcript.verdict == Verdict.PASS else EXIT_FAILURE


def cmd_demo_sign(config: RunConfig) -> int:
    if config.inject is not None and config.inject not in INJECTIONS:
        raise UsageError(f"unknown injection {config.inject!r}, choose from {', '.join(INJECTIONS)}")
    tamper = config.inject == "tamper-sig-share"
    scenario = "sign-tamper-sig-share" if tamper else "sign-honest"
    scenario_config = build_config(scenario, _require_seed(config), curve=config.curve, message=config.message,
                                   t=config.t, n=config.n, m0=config.m0)

    transcript, session, run = run_signing(scenario_config, tamper)
    if config.transcript:
        _write_transcript(transcript, config.transcript, config.pretty)

    output = {"verdict": transcript.verdict.value, "curve": run.curve.name}
    if session is not None and session.signature is not None:
        output["signature"] = signature_record(session.signature, session.kappa, run.curve).model_dump()
    _emit(output, config)

    if transcript.verdict == Verdict.FAULT_DETECTED:
        return EXIT_SIGNATURE
    return EXIT_OK if transcript.verdict == Verdict.PASS else EXIT_FAILURE


def cmd_attack(config: RunConfig) -> int:
    seed = _require_seed(config)
    if config.all_scenarios:
        names = scenario_names(attacks_only=True)
    elif config.scenario:
        get_scenario(config.scenario)
        names = [config.scenario]
    else:
        raise UsageError("attack needs a scenario name or --all")

    configs = [build_config(name, seed) for name in names]
    if len(configs) == 1:
        transcripts = [run_scenario(configs[0])]
    else:
        transcripts = ScenarioQueue.run(configs, config.workers)

    results = []
    for name, transcript in zip(names, transcripts):
        expected = get_scenario(name).expected
        verdict = transcript.verdict if transcript is not None else None
        if verdict != expected:
            logger.warning(f"{name}: expected {expected.value}, got {verdict.value if verdict else 'a crash'}")
        results.append({"scenario": name, "verdict": verdict.value if verdict else None,
                        "expected": expected.value})
        if config.transcript and transcript is not None:
            target = Path(config.transcript)
            if config.all_scenarios:
                target.mkdir(parents=True, exist_ok=True)
                target = target / f"{name}.json"
            _write_transcript(transcript, target, config.pretty)

    _emit(results if config.all_scenarios else results[0], config)
    return EXIT_OK if all(result["verdict"] == result["expected"] for result in results) else EXIT_FAILURE


def cmd_bench_compare(config: RunConfig) -> int:
    rows = run_bench(config.t_values, config.seed)
    for scheme in ("crt", "shamir"):
        slope, deviation = fit_through_origin(rows, scheme)
        logger.info(f"{scheme}: {slope:.2f} multiplications per share, worst deviation {deviation:.0%}")

    if config.out:
        with open(config.out, "w", newline="") as file:
            write_csv(rows, file)
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


COMMANDS = {
    "gen-params": cmd_gen_params,
    "split": cmd_split,
    "verify": cmd_verify,
    "combine": cmd_combine,
    "demo-auth": cmd_demo_auth,
    "demo-sign": cmd_demo_sign,
    "attack": cmd_attack,
    "bench-compare": cmd_bench_compare,
}


def dispatch(config: RunConfig) -> int:
    """Runs one command and maps what it raises to an exit code, diagnostics on stderr."""
    try:
        return COMMANDS[config.command](config)
    except ShareRejected as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except NoValidCandidate as e:
        print(f"error: no valid signature candidate: {e}", file=sys.stderr)
        return EXIT_SIGNATURE
    except (UsageError, UnknownScenario, InvalidParams, FileFormatError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CliError, ModMathError, CrtVssError, ShamirError, CurveError, ThresholdDssError, AttestError,
            NetSimError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
