"""Box plot summary statistics."""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from robust_beam.rblib.exceptions import PreconditionError

IQR_FACTOR = 1.5


@dataclass(frozen=True)
class BoxStats:
    """Quartiles, 1.5-IQR whiskers and outliers of a sample.

    Whiskers sit at the most extreme observations inside the fences
    Q1 - 1.5 IQR and Q3 + 1.5 IQR; everything beyond them is an outlier.
    """

    count: int
    mean: float
    median: float
    q1: float
    q3: float
    lower_whisker: float
    upper_whisker: float
    outliers: Tuple[float, ...]
    minimum: float
    maximum: float

    def to_dict(self) -> Dict[str, Any]:
        """Plain dict with the outliers as a list."""
        data = asdict(self)
        data["outliers"] = list(self.outliers)
        return data


def box_stats(values: Sequence[float]) -> BoxStats:
    """Summarize a sample for a box plot.

    Args:
        values: the sample, at least one value.

    Returns:
        The summary; quartiles use linear interpolation.

    Raises:
        PreconditionError: If values is empty.
    """
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise PreconditionError("box statistics need at least one value")
    q1, median, q3 = (float(q) for q in np.percentile(data, [25.0, 50.0, 75.0]))
    spread = IQR_FACTOR * (q3 - q1)
    low_fence, high_fence = q1 - spread, q3 + spread
    inside = data[(data >= low_fence) & (data <= high_fence)]
    outliers = np.sort(data[(data < low_fence) | (data > high_fence)])
    return BoxStats(
        count=int(data.size),
        mean=float(data.mean()),
        median=median,
        q1=q1,
        q3=q3,
        lower_whisker=float(min(inside.min(), q1)),
        upper_whisker=float(max(inside.max(), q3)),
        outliers=tuple(float(x) for x in outliers),
        minimum=float(data.min()),
        maximum=float(data.max()),
    )
