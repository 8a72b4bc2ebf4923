from sqlmodel import SQLModel, Field


class ScenarioConfig(SQLModel):
    scenario: str
    seed: int
    config_set: list[str] = Field(default_factory=lambda: ["trusted-os-1.0", "trusted-os-1.1"])
    dh_group_bits: int = 64
    hash_name: str = "sha1"
    closure_depth: int = 4
    max_closure_terms: int = 50_000
    curve: str = "toy-f17"
    message: str = "crtauth demo message"
    # threshold signing sizing; None picks the preset of the curve
    t: int | None = None
    n: int | None = None
    m0: int | None = None
    bound: int | None = None
