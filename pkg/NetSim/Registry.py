import logging
from dataclasses import dataclass, field
from typing import Callable

from Models.ScenarioConfig import ScenarioConfig
from Models.Transcript import Transcript, Verdict
from NetSim.Errors import UnknownScenario
from NetSim.Scenarios import Auth, Distribution, Reconstruction, Replay, Signing
from Storage.ConfigFiles import scenario_config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScenarioEntry:
    run: Callable[[ScenarioConfig], Transcript]
    expected: Verdict
    attack: bool = True
    # config values the scenario needs unless the caller set them
    defaults: dict = field(default_factory=dict)


SCENARIOS: dict[str, ScenarioEntry] = {
    "auth-honest": ScenarioEntry(Auth.auth_honest, Verdict.PASS, attack=False),
    "auth-unknown-neighbor": ScenarioEntry(Auth.auth_unknown_neighbor, Verdict.CHEAT_BLOCKED),
    "auth-compromised-initiator": ScenarioEntry(Auth.auth_compromised_initiator, Verdict.CHEAT_BLOCKED),
    "replay-alpha-beta": ScenarioEntry(Replay.replay_alpha_beta, Verdict.ATTACK_FAILED),
    "replay-alpha-only": ScenarioEntry(Replay.replay_alpha_only, Verdict.ATTACK_FAILED),
    "replay-alpha-beta-relay": ScenarioEntry(Replay.replay_alpha_beta_relay, Verdict.ATTACK_FAILED),
    "replay-alpha-beta-leaked-exponent": ScenarioEntry(Replay.replay_alpha_beta_leaked_exponent,
                                                       Verdict.ATTACK_SUCCEEDED),
    "distribution-honest": ScenarioEntry(Distribution.distribution_honest, Verdict.PASS, attack=False),
    "cheating-distributor-unattested": ScenarioEntry(Distribution.cheating_distributor_unattested,
                                                     Verdict.CHEAT_BLOCKED),
    "cheating-distributor-bad-share": ScenarioEntry(Distribution.cheating_distributor_bad_share,
                                                    Verdict.CHEAT_BLOCKED),
    "cheating-distributor-oversized-y": ScenarioEntry(Distribution.cheating_distributor_oversized_y,
                                                      Verdict.CHEAT_BLOCKED),
    "reconstruction-honest": ScenarioEntry(Reconstruction.reconstruction_honest, Verdict.PASS, attack=False),
    "cheating-participant": ScenarioEntry(Reconstruction.cheating_participant, Verdict.CHEAT_BLOCKED),
    "cheating-participant-overwhelmed": ScenarioEntry(Reconstruction.cheating_participant_overwhelmed,
                                                      Verdict.RECONSTRUCTION_IMPOSSIBLE),
    "sign-honest": ScenarioEntry(Signing.sign_honest, Verdict.PASS, attack=False),
    # a one-in-q false accept is only negligible on a full-size curve
    "sign-tamper-sig-share": ScenarioEntry(Signing.sign_tamper_sig_share, Verdict.FAULT_DETECTED,
                                           defaults={"curve": "secp256k1"}),
}


def scenario_names(attacks_only: bool = False) -> list[str]:
    return sorted(name for name, entry in SCENARIOS.items() if entry.attack or not attacks_only)


def get_scenario(name: str) -> ScenarioEntry:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}") from None


def run_scenario(config: ScenarioConfig) -> Transcript:
    entry = get_scenario(config.scenario)
    logger.info(f"Running {config.scenario} with seed {config.seed}")
    return entry.run(config)


def build_config(scenario: str, seed: int, **overrides) -> ScenarioConfig:
    """Config file defaults, then the scenario's own defaults, then explicit overrides."""
    entry = get_scenario(scenario)
    values = dict(entry.defaults)
    values.update({key: value for key, value in overrides.items() if value is not None})
    return scenario_config(scenario, seed, **values)
