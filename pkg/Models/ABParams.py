from sqlmodel import SQLModel, Field


class ABParams(SQLModel):
    """Asmuth-Bloom modulus system.

    `moduli` are sorted ascending and `capacity` is the product of the t smallest
    of them. Use `ModMath.ParamsGenerator.check_ab_params` to validate a set
    loaded from disk.
    """
    m0: int
    moduli: list[int] = Field(default_factory=list)
    verif_primes: list[int] = Field(default_factory=list)
    t: int
    n: int
    capacity: int

    def modulus(self, index: int) -> int:
        return self.moduli[index - 1]

    def verif_prime(self, index: int) -> int:
        return self.verif_primes[index - 1]

    @property
    def indices(self) -> list[int]:
        return list(range(1, self.n + 1))
