from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, Iterable, List, TypeVar

import pandas as pd

from robust_beam.rblib.experiment_config import ExperimentConfig
from robust_beam.rblib.util import get_config

config = get_config()

ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")


class Experiment(ABC):
    """Base class for the experiments run on an ExperimentConfig.

    Subclasses run their computation when constructed and keep the outcome,
    which is then available in two shapes: a dictionary for JSON output and a
    pandas DataFrame for CSV output.

    Attributes:
        _config (ExperimentConfig): The validated experiment configuration.

    Methods:
        map_items(func, items) -> List:
            Apply a function to independent work items with the configured
            number of threads, keeping the input order.

        write(out_dir) -> List[Path]:
            Abstract method that writes the experiment's output files.

        to_dict() -> Dict:
            Abstract method that reformats the outcome to a dictionary.

        to_df() -> pd.DataFrame:
            Abstract method that reformats the outcome to a pandas DataFrame.
    """

    def __init__(self, experiment_config: ExperimentConfig) -> None:
        """Initialize the Experiment with its configuration.

        Args:
            experiment_config (ExperimentConfig): The validated configuration.
        """
        self._config = experiment_config

    def map_items(
        self, func: Callable[[ItemT], ResultT], items: Iterable[ItemT]
    ) -> List[ResultT]:
        """Apply func to every item, in order, on the configured worker count.

        Args:
            func: Function applied to one item.
            items: Independent work items.

        Returns:
            List[ResultT]: Results in the order of items.
        """
        items = list(items)
        if self._config.threads <= 1 or len(items) <= 1:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=self._config.threads) as executor:
            return list(executor.map(func, items))

    def output_path(self, key: str, out_dir: Path) -> Path:
        """Path of the output file registered under key in the packaged config."""
        return Path(out_dir) / config["output"][key]

    @abstractmethod
    def write(self, out_dir: Path) -> List[Path]:
        """Write the output files of the experiment.

        Args:
            out_dir (Path): Directory receiving the files.

        Returns:
            List[Path]: The written files.
        """
        pass

    @abstractmethod
    def to_dict(self) -> Dict:
        """Reformat the outcome to a dictionary.

        Returns:
            Dict: The outcome with rates in Gbit/s and angles in microradians.
        """
        pass

    @abstractmethod
    def to_df(self) -> pd.DataFrame:
        """Reformat the outcome to a pandas DataFrame.

        Returns:
            pd.DataFrame: One row per record, columns as written to CSV.
        """
        pass
