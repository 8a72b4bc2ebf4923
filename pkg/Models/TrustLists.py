from sqlmodel import SQLModel, Field

TRUSTED = 1
UNKNOWN = 0
DISTRUSTED = -1


class TrustLists(SQLModel):
    """Per-node neighbor list N, trust marks T and session keys K."""
    neighbors: set[str] = Field(default_factory=set)
    trust: dict[str, int] = Field(default_factory=dict)
    keys: dict[str, str] = Field(default_factory=dict)

    def add_neighbor(self, node_id: str):
        self.neighbors.add(node_id)
        self.trust.setdefault(node_id, UNKNOWN)

    def remove_neighbor(self, node_id: str):
        self.neighbors.discard(node_id)
        self.trust.pop(node_id, None)
        self.keys.pop(node_id, None)

    def reset_epoch(self):
        self.trust = {node_id: UNKNOWN for node_id in self.neighbors}
        self.keys = {}

    def trust_of(self, node_id: str) -> int:
        return self.trust.get(node_id, UNKNOWN)

    def mark(self, node_id: str, value: int):
        # marks only exist for current neighbors
        if node_id in self.neighbors:
            self.trust[node_id] = value

    def set_key(self, node_id: str, key: str):
        if node_id in self.neighbors:
            self.keys[node_id] = key

    def key_of(self, node_id: str) -> str | None:
        return self.keys.get(node_id)
