from sqlmodel import SQLModel


class BenchRow(SQLModel):
    scheme: str
    t: int
    mult_count: int
