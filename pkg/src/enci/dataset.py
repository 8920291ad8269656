"""Grouped observational data: N groups sharing p named variables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np


class DataError(ValueError):
    """Raised when input data violates a structural precondition."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine cannot produce a valid result."""


@dataclass(frozen=True)
class GroupedDataset:
    """Aligned observations of ``variables`` split into groups.

    Each entry of ``groups`` is an ``n_i x p`` float array. Every group is
    assumed to come from one fixed instantiation of the causal model, with
    distributions allowed to change between groups.
    """

    variables: tuple[str, ...]
    groups: tuple[np.ndarray, ...]
    provenance: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        variables = tuple(str(v) for v in self.variables)
        if len(set(variables)) != len(variables):
            raise DataError("duplicate variable names")
        groups = []
        for i, g in enumerate(self.groups):
            arr = np.array(g, dtype=float)
            if arr.ndim == 1:
                arr = arr[:, None]
            if arr.ndim != 2 or arr.shape[1] != len(variables):
                raise DataError(
                    f"group {i} has shape {arr.shape}, expected (n, {len(variables)})"
                )
            if not np.all(np.isfinite(arr)):
                raise DataError(f"group {i} contains non-finite input")
            arr.setflags(write=False)
            groups.append(arr)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "groups", tuple(groups))

    @classmethod
    def from_arrays(cls, groups: Sequence[np.ndarray], variables=None, **provenance):
        groups = [np.atleast_2d(np.asarray(g, dtype=float).T).T for g in groups]
        if variables is None:
            p = groups[0].shape[1] if groups else 0
            variables = [f"x{j + 1}" for j in range(p)]
        return cls(tuple(variables), tuple(groups), dict(provenance))

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def group_sizes(self) -> list[int]:
        return [g.shape[0] for g in self.groups]

    def index(self, variable: str | int) -> int:
        if isinstance(variable, (int, np.integer)):
            if not 0 <= variable < self.n_vars:
                raise DataError(f"variable index {variable} out of range")
            return int(variable)
        try:
            return self.variables.index(variable)
        except ValueError:
            raise DataError(f"unknown variable {variable!r}") from None

    def column(self, variable: str | int) -> list[np.ndarray]:
        """Per-group samples of one variable."""
        j = self.index(variable)
        return [g[:, j] for g in self.groups]

    def select(self, variables: Sequence[str | int]) -> "GroupedDataset":
        """Dataset restricted to (and reordered by) ``variables``."""
        idx = [self.index(v) for v in variables]
        return GroupedDataset(
            tuple(self.variables[j] for j in idx),
            tuple(g[:, idx] for g in self.groups),
            dict(self.provenance),
        )

    def validate(self, min_groups: int = 2, min_size: int = 2) -> None:
        """Check the size preconditions shared by the inference routines."""
        if self.n_groups < min_groups:
            raise DataError(f"need at least {min_groups} groups, got {self.n_groups}")
        for i, n in enumerate(self.group_sizes):
            if n < min_size:
                raise DataError(f"group too small: group {i} has {n} rows")
