from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError
from .periodic import LineSamples, PeriodicSamples


@dataclass(frozen=True, eq=False)
class Potential:
    """The mKdV field q = 4U together with the spectral parameter.

    lam = -1 is the value at which the linear problem coincides with the
    one built from a surface of revolution.
    """

    q: PeriodicSamples
    lam: float = -1.0

    def __post_init__(self):
        if self.q.is_complex:
            if np.max(np.abs(self.q.values.imag)) > 0:
                raise GridError("potential must be real")
            object.__setattr__(self, "q", self.q.with_values(self.q.values.real))

    @property
    def values(self) -> np.ndarray:
        return self.q.values

    @property
    def period(self) -> float:
        return self.q.period

    @property
    def n(self) -> int:
        return self.q.n

    @property
    def on_line(self) -> bool:
        return isinstance(self.q, LineSamples)

    @property
    def U(self) -> np.ndarray:
        return self.q.values / 4.0

    @classmethod
    def from_values(cls, q, period: float, origin: float = 0.0, lam: float = -1.0) -> Potential:
        return cls(PeriodicSamples(np.asarray(q, dtype=float), period, origin), lam)
