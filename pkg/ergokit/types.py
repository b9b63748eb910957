from typing import Literal, Union

import numpy as np

ARRAY_TYPE = np.ndarray
NUMBER_TYPE = Union[int, float, complex]
ORDER_TYPE = Literal["ascending", "descending"]
KEEP_TYPE = Literal["first", "second"]
ENTROPY_TYPE = Literal["von_neumann", "renyi2"]
FORMAT_TYPE = Literal["csv", "json"]
BATTERY_TYPE = Literal["tls", "gaussian"]
