from enum import Enum

class SplitMode(str, Enum):
    MASKED = "masked"
    DIRECT = "direct"
