import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import (
    Any,
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np

from ergokit.exceptions import ConfigError, DimensionMismatch
from ergokit.logging import logger
from ergokit.types import FORMAT_TYPE


@dataclass
class TimeSeries:
    """Ordered samples of named real quantities

    Args:
        times:
            Sample coordinates, usually times but any
            ordered parameter (a population, a squeezing
            magnitude, a step index) is allowed
        columns:
            Mapping from quantity name to its samples,
            each of the same length as `times`
        time_name:
            Column name used for `times` on export
    """

    times: np.ndarray
    columns: Dict[str, np.ndarray] = field(default_factory=dict)
    time_name: str = "t"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        columns = {}
        for name, values in self.columns.items():
            values = np.asarray(values)
            if len(values) != len(self.times):
                raise DimensionMismatch(len(self.times), len(values))
            columns[name] = values
        self.columns = columns

    @classmethod
    def from_records(
        cls,
        times: Iterable[float],
        records: List[Mapping[str, float]],
        time_name: str = "t",
    ) -> "TimeSeries":
        names = list(records[0]) if records else []
        columns = {k: np.array([r[k] for r in records]) for k in names}
        return cls(np.asarray(list(times)), columns, time_name)

    @classmethod
    def stack(
        cls, parts: Sequence[Tuple[Mapping[str, float], "TimeSeries"]]
    ) -> "TimeSeries":
        """Concatenate series in long format

        Each part is a series together with a mapping of
        constant labels, which become leading columns so
        that rows from different parts stay distinguishable.
        """

        if len(parts) == 0:
            raise DimensionMismatch("at least one series", 0)

        time_name = parts[0][1].time_name
        times, columns = [], {}
        for labels, series in parts:
            times.append(series.times)
            tagged = {
                k: np.full(len(series), v, dtype=float)
                for k, v in labels.items()
            }
            tagged.update(series.columns)
            for name, values in tagged.items():
                columns.setdefault(name, []).append(values)

        columns = {k: np.concatenate(v) for k, v in columns.items()}
        return cls(np.concatenate(times), columns, time_name)

    def __len__(self):
        return len(self.times)

    def __getitem__(self, name: str) -> np.ndarray:
        if name == self.time_name:
            return self.times
        return self.columns[name]

    def as_columns(self) -> Dict[str, np.ndarray]:
        return {self.time_name: self.times, **self.columns}

    def to_dataset(
        self,
        scenario: str,
        parameters: Mapping[str, Any],
        notes: Optional[Mapping[str, Any]] = None,
    ) -> "Dataset":
        return Dataset.create(scenario, parameters, self.as_columns(), notes)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    elif isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    elif isinstance(value, np.generic):
        return value.item()
    elif isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


@dataclass
class Dataset:
    """Equal-length real columns plus provenance metadata

    Complex columns are split into `<name>_re` and
    `<name>_im` at construction time.
    """

    columns: Dict[str, np.ndarray]
    metadata: Dict[str, Any]

    def __post_init__(self):
        columns, length = {}, None
        for name, values in self.columns.items():
            values = np.asarray(values)
            if length is None:
                length = len(values)
            elif len(values) != length:
                raise DimensionMismatch(length, len(values))

            if np.iscomplexobj(values):
                columns[name + "_re"] = values.real.astype(float)
                columns[name + "_im"] = values.imag.astype(float)
            else:
                columns[name] = values.astype(float)
        self.columns = columns
        self.metadata = _jsonable(self.metadata)

    @classmethod
    def create(
        cls,
        scenario: str,
        parameters: Mapping[str, Any],
        columns: Mapping[str, np.ndarray],
        notes: Optional[Mapping[str, Any]] = None,
    ) -> "Dataset":
        from ergokit import __version__

        metadata = {
            "scenario": scenario,
            "parameters": dict(parameters),
            "version": __version__,
            "notes": dict(notes or {}),
        }
        return cls(dict(columns), metadata)

    @property
    def scenario(self) -> str:
        return self.metadata["scenario"]

    def __len__(self):
        for values in self.columns.values():
            return len(values)
        return 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def to_csv(self) -> str:
        stream = io.StringIO()
        stream.write(
            "# ergokit {} scenario={}\n".format(
                self.metadata["version"], self.scenario
            )
        )
        stream.write(",".join(self.columns) + "\n")
        for row in zip(*self.columns.values()):
            stream.write(",".join(f"{x:.17g}" for x in row) + "\n")
        return stream.getvalue()

    def to_json(self) -> str:
        payload = {
            "metadata": self.metadata,
            "columns": {k: v.tolist() for k, v in self.columns.items()},
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Dataset":
        payload = json.loads(text)
        columns = {k: np.array(v) for k, v in payload["columns"].items()}
        return cls(columns, payload["metadata"])

    def render(self, format: FORMAT_TYPE = "csv") -> str:
        if format == "csv":
            return self.to_csv()
        elif format == "json":
            return self.to_json()
        raise ConfigError(f"Unknown output format '{format}'")

    def write(self, path: str, format: FORMAT_TYPE = "csv") -> None:
        """Write atomically so that failures never leave partial files"""

        text = self.render(format)
        dirname = os.path.dirname(os.path.abspath(path))
        os.makedirs(dirname, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            "w", dir=dirname, delete=False, suffix=".tmp"
        ) as f:
            f.write(text)
        os.replace(f.name, path)
        logger.debug(f"Wrote {len(self)} rows of {self.scenario} to {path}")

    def emit(
        self, output: Optional[str] = None, format: FORMAT_TYPE = "csv"
    ) -> None:
        if output is None:
            sys.stdout.write(self.render(format))
        else:
            self.write(output, format)
