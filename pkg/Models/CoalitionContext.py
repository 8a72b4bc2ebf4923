from sqlmodel import SQLModel, Field


class CoalitionContext(SQLModel):
    indices: list[int] = Field(default_factory=list)
    moduli: dict[int, int] = Field(default_factory=dict)
    m_c: int
    lambdas: dict[int, int] = Field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.indices)
