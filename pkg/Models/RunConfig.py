from sqlmodel import SQLModel, Field


class RunConfig(SQLModel):
    """Everything a CLI command needs; an optional --config file overridden by flags."""
    command: str
    seed: int | None = None
    pretty: bool = False
    out: str | None = None
    # gen-params
    t: int | None = None
    n: int | None = None
    m0: int | None = None
    bits: int = 0
    # split / verify / combine
    params: str | None = None
    secret: int | None = None
    mask: int | None = None
    shares: list[str] = Field(default_factory=list)
    bulletin: str | None = None
    # scenario commands
    scenario: str | None = None
    all_scenarios: bool = False
    workers: int = 4
    curve: str | None = None
    message: str | None = None
    inject: str | None = None
    transcript: str | None = None
    # bench-compare
    t_values: list[int] = Field(default_factory=list)
