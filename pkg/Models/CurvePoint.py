from sqlmodel import SQLModel


class CurvePoint(SQLModel):
    """Affine point; both coordinates None is the point at infinity O."""
    x: int | None = None
    y: int | None = None

    @classmethod
    def identity(cls) -> "CurvePoint":
        return cls()

    @property
    def is_identity(self) -> bool:
        return self.x is None


class CurveParams(SQLModel):
    name: str = ""
    p: int
    a: int
    b: int
    generator: CurvePoint
    q: int


class DssSignature(SQLModel):
    r: int
    s: int
