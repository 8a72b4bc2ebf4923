from sqlmodel import SQLModel


class OpCounter(SQLModel):
    multiplications: int = 0

    def tally(self, count: int = 1):
        self.multiplications += count

    def reset(self):
        self.multiplications = 0
