import asyncio
import logging

from Models.ScenarioConfig import ScenarioConfig
from Models.Transcript import Transcript
from NetSim.Registry import run_scenario


class ScenarioQueue:
    """
    Runs independent scenarios side by side. Each run builds its own world,
    so the only shared thing is the semaphore bounding how many run at once.
    """

    def __init__(self, workers: int = 4):
        self.logger = logging.getLogger(__package__)
        self.sem = asyncio.Semaphore(workers)

    async def _task_wrapper(self, config: ScenarioConfig) -> Transcript | None:
        async with self.sem:
            try:
                return await asyncio.to_thread(run_scenario, config)
            except Exception as e:
                self.logger.exception(f"Scenario {config.scenario} crashed: {e}")
                return None

    async def run_all(self, configs: list[ScenarioConfig]) -> list[Transcript | None]:
        return await asyncio.gather(*(self._task_wrapper(config) for config in configs))

    @classmethod
    def run(cls, configs: list[ScenarioConfig], workers: int = 4) -> list[Transcript | None]:
        """Blocking entry point; results keep the order of `configs`."""

        async def main():
            return await cls(workers).run_all(configs)

        return asyncio.run(main())
