"""Frequency tables for combined unilateral and bilateral binary outcomes.

A study contributes, per treatment group, a trinomial column of bilateral
subjects (0, 1 or 2 responding organs) and a binomial column of unilateral
subjects (0 or 1 responding organ).  Group totals are always derived from
the cells, never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["FrequencyTable", "TableError"]


class TableError(ValueError):
    """Raised for counts that do not form a valid frequency table."""


def _as_count_array(values, name: str, length: int) -> np.ndarray:
    arr = np.asarray(values)
    if arr.shape != (length,):
        raise TableError(f"{name} must have {length} entries, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.number):
        raise TableError(f"{name} must be numeric, got dtype {arr.dtype}")
    if np.any(arr < 0):
        raise TableError(f"{name} contains negative counts: {arr.tolist()}")
    rounded = np.rint(arr)
    if not np.all(np.asarray(arr, dtype=float) == rounded):
        raise TableError(f"{name} contains non-integer counts: {arr.tolist()}")
    return rounded.astype(np.int64)


@dataclass(frozen=True)
class FrequencyTable:
    """Counts for two groups of paired-organ binary data.

    ``bilateral[g]`` holds ``(x0, x1, x2)``: subjects in group ``g`` with
    0, 1, 2 responding organs.  ``unilateral[g]`` holds ``(y0, y1)``:
    single-organ subjects with 0 or 1 responses.  Groups are indexed 0, 1.
    """

    bilateral: np.ndarray  # shape (2, 3), int64
    unilateral: np.ndarray  # shape (2, 2), int64
    labels: tuple[str, str] = field(default=("group1", "group2"))

    def __post_init__(self):
        bi = np.stack([_as_count_array(self.bilateral[g], f"bilateral[{g}]", 3)
                       for g in (0, 1)])
        un = np.stack([_as_count_array(self.unilateral[g], f"unilateral[{g}]", 2)
                       for g in (0, 1)])
        bi.setflags(write=False)
        un.setflags(write=False)
        object.__setattr__(self, "bilateral", bi)
        object.__setattr__(self, "unilateral", un)
        if len(self.labels) != 2:
            raise TableError("labels must name exactly two groups")
        object.__setattr__(self, "labels", (str(self.labels[0]), str(self.labels[1])))

    @classmethod
    def from_counts(cls, group1, group2, labels=("group1", "group2")) -> "FrequencyTable":
        """Build from two ``(x0, x1, x2, y0, y1)`` count tuples."""
        g1 = list(group1)
        g2 = list(group2)
        if len(g1) != 5 or len(g2) != 5:
            raise TableError("each group needs 5 counts: x0, x1, x2, y0, y1")
        return cls(bilateral=np.array([g1[:3], g2[:3]]),
                   unilateral=np.array([g1[3:], g2[3:]]),
                   labels=labels)

    @property
    def bilateral_totals(self) -> np.ndarray:
        """Subjects with both organs observed, per group."""
        return self.bilateral.sum(axis=1)

    @property
    def unilateral_totals(self) -> np.ndarray:
        """Subjects with one organ observed, per group."""
        return self.unilateral.sum(axis=1)

    @property
    def organ_totals(self) -> np.ndarray:
        """Observed organs per group: two per bilateral subject plus one per unilateral."""
        return 2 * self.bilateral_totals + self.unilateral_totals

    @property
    def success_totals(self) -> np.ndarray:
        """Responding organs per group."""
        return (self.bilateral[:, 1] + 2 * self.bilateral[:, 2]
                + self.unilateral[:, 1])

    def group_counts(self, g: int) -> tuple[int, int, int, int, int]:
        """Counts ``(x0, x1, x2, y0, y1)`` for group ``g``."""
        return (*map(int, self.bilateral[g]), *map(int, self.unilateral[g]))

    def swapped(self) -> "FrequencyTable":
        """The same data with group columns exchanged."""
        return FrequencyTable(bilateral=self.bilateral[::-1].copy(),
                              unilateral=self.unilateral[::-1].copy(),
                              labels=(self.labels[1], self.labels[0]))

    def require_data_in_both_groups(self):
        """Reject tables where a group contributes no observed organs."""
        organs = self.organ_totals
        for g in (0, 1):
            if organs[g] == 0:
                raise TableError(f"group {self.labels[g]!r} has no observed organs")

    def __str__(self):
        lines = [f"{'organs':>8} {self.labels[0]:>10} {self.labels[1]:>10}"]
        for r in range(3):
            lines.append(f"{r:>8} {self.bilateral[0, r]:>10} {self.bilateral[1, r]:>10}")
        lines.append(f"{'total':>8} {self.bilateral_totals[0]:>10} {self.bilateral_totals[1]:>10}")
        for r in range(2):
            lines.append(f"{r:>8} {self.unilateral[0, r]:>10} {self.unilateral[1, r]:>10}")
        lines.append(f"{'total':>8} {self.unilateral_totals[0]:>10} {self.unilateral_totals[1]:>10}")
        return "\n".join(lines)
