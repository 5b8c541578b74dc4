"""ScenarioRunner Class."""
from asyncio import gather, get_running_loop
from typing import Any, List, Optional, Tuple

from src.config import ScenarioConfig
from src.exceptions import ProblemException, ScenarioConfigException
from src.helpers import Cell, format_number, linear_grid
from src.logger import init_logger
from src.output import ResultTable, Row
from src.scenarios import SCENARIOS, Parameters, Scenario

logger = init_logger()

SweepPoint = Tuple[Any, float, Parameters]


def _series_cell(value: Any) -> Cell:
    if isinstance(value, list):
        return ";".join(format_number(item) for item in value)
    return value


class ScenarioRunner:
    """A class for running a validated scenario config, either once or as a sweep."""

    def __init__(self, config: ScenarioConfig):
        """
        Initialize the ScenarioRunner instance and validate the config.

        Parameters are checked against the model preconditions here, so nothing is
        computed for an invalid config.

        :param config: The scenario config.
        :type config: ScenarioConfig
        :raises ScenarioConfigException: If the config or a model precondition is invalid.
        """
        config.validate()
        self.config = config
        self.parameters: Parameters = config.resolved_parameters()
        self.scenario: Scenario = SCENARIOS[config.scenario](self.parameters)
        try:
            self._points = self._validate_models()
        except ProblemException as error:
            logger.error("Invalid %s parameters: %s", config.scenario, error)
            raise ScenarioConfigException(str(error)) from error

    def _validate_models(self) -> Optional[List[SweepPoint]]:
        if self.config.sweep is None:
            self.scenario.validate(self.parameters)
            return None
        points = self.sweep_points()
        series = {}
        for series_value, x, parameters in points:
            series.setdefault(repr(series_value), []).append((x, parameters))
        for values in series.values():
            for _, parameters in (values[0], values[-1]):
                self.scenario.validate_point(parameters)
        return points

    def sweep_points(self) -> List[SweepPoint]:
        """
        Parameter maps of every sweep point, series by series.

        :return: (series value or None, swept value, parameters) in emission order.
        :rtype: List[SweepPoint]
        """
        sweep = self.config.sweep
        series_values = sweep.series_values if sweep.series_parameter else [None]
        points: List[SweepPoint] = []
        for series_value in series_values:
            base = dict(self.parameters)
            if sweep.series_parameter:
                base[sweep.series_parameter] = series_value
            start, stop = self.scenario.sweep_range(sweep.parameter, sweep.start, sweep.stop, base)
            for x in linear_grid(start, stop, sweep.steps):
                parameters = {**base, sweep.parameter: float(x)}
                points.append((series_value, float(x), parameters))
        return points

    def columns(self) -> List[str]:
        """Header of the emitted table."""
        sweep = self.config.sweep
        if sweep is None:
            return self.scenario.columns()
        prefix = [sweep.series_parameter] if sweep.series_parameter else []
        return [*prefix, sweep.parameter, *self.scenario.sweep_outputs]

    async def run_scenario(self) -> ResultTable:
        """
        Run the scenario or its sweep.

        :return: The table, rows in input order.
        :rtype: ResultTable
        """
        if self._points is None:
            logger.info("Running %s scenario...", self.config.scenario)
            rows = self.scenario.run_rows()
        else:
            logger.info(
                "Sweeping %s over %d points in %s scenario...",
                self.config.sweep.parameter,
                len(self._points),
                self.config.scenario,
            )
            rows = await self._run_sweep(self._points)
        logger.info("Finished %s scenario with %d rows", self.config.scenario, len(rows))
        return ResultTable(columns=self.columns(), rows=rows)

    async def _run_sweep(self, points: List[SweepPoint]) -> List[Row]:
        loop = get_running_loop()
        tasks = [loop.run_in_executor(None, self._sweep_row, *point) for point in points]
        return list(await gather(*tasks))

    def _sweep_row(self, series_value: Any, x: float, parameters: Parameters) -> Row:
        prefix = [_series_cell(series_value)] if self.config.sweep.series_parameter else []
        return [*prefix, x, *self.scenario.sweep_point(parameters)]
