"""Doubly periodic positive scalar fields sampled on a uniform grid.

The grid covers the fundamental domain of a unit-covolume lattice in
fractional coordinates: ``samples[i, j]`` is the field value at
(j/M) * b1 + (i/N) * b2.  All integrals use the periodic trapezoid rule,
which on this parametrization is the plain sample average and is
spectrally accurate for smooth periodic integrands.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .lattice import FD_TOL, Lattice

MIN_GRID = 4
MIN_SAMPLE = 1e-9

_UNIT_COVOL_TOL = 1e-9


def is_unit_square(lattice: Lattice) -> bool:
    """True when the basis is {(+-1, 0), (0, +-1)} up to order and tolerance."""
    a = np.abs(lattice.basis)
    eye = np.eye(2)
    return bool(
        np.all(np.abs(a - eye) <= FD_TOL) or np.all(np.abs(a - eye[::-1]) <= FD_TOL)
    )


@dataclass(frozen=True, eq=False)
class PeriodicField:
    """Positive doubly periodic scalar on an N x M grid (row = y, column = x)."""

    samples: np.ndarray
    lattice: Lattice = dc_field(default_factory=Lattice.square)

    def __post_init__(self) -> None:
        s = np.array(self.samples, dtype=float)
        if s.ndim != 2:
            raise ValueError("samples must be a 2-d grid")
        if s.shape[0] < MIN_GRID or s.shape[1] < MIN_GRID:
            raise ValueError(f"grid must be at least {MIN_GRID}x{MIN_GRID}")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        if s.min() <= MIN_SAMPLE:
            raise ValueError("conformal factor must be positive (min sample <= 1e-9)")
        if abs(self.lattice.covolume - 1.0) > _UNIT_COVOL_TOL:
            raise ValueError("field domain must be a unit-covolume lattice")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape


def mean(field: PeriodicField) -> float:
    """Quadrature of f over the unit-area fundamental domain."""
    return float(field.samples.mean())


def variance(field: PeriodicField) -> float:
    """Quadrature of (f - mean)^2; zero iff the field is constant."""
    s = field.samples
    return float(((s - s.mean()) ** 2).mean())


def second_moment(field: PeriodicField) -> float:
    """Quadrature of f^2; equals mean^2 + variance up to rounding."""
    return float((field.samples ** 2).mean())


def l1_norm(values) -> float:
    """Quadrature of |values| over the unit-area domain (signed input allowed)."""
    if isinstance(values, PeriodicField):
        values = values.samples
    return float(np.abs(np.asarray(values, dtype=float)).mean())


@dataclass(frozen=True, eq=False)
class BiaxialParts:
    """Split f = mean + g(x) + h(y) + k(x, y) on the unit square torus.

    g and h have zero mean; k has zero mean along every grid row and column.
    In Fourier terms g + h collects the (m, n) coefficients with mn = 0 and
    (m, n) != (0, 0), while k holds everything with mn != 0.
    """

    mean: float
    g_part: np.ndarray  # length M, function of x
    h_part: np.ndarray  # length N, function of y
    k_part: np.ndarray  # (N, M)

    def reconstruct(self) -> np.ndarray:
        return self.mean + self.g_part[None, :] + self.h_part[:, None] + self.k_part


def _require_unit_square(lattice: Lattice) -> None:
    if not is_unit_square(lattice):
        raise ValueError("biaxial decomposition requires the unit square torus")


def biaxial_decompose(field: PeriodicField) -> BiaxialParts:
    """Axis decomposition of a field on the unit square torus."""
    _require_unit_square(field.lattice)
    s = field.samples
    m = s.mean()
    g = s.mean(axis=0) - m
    h = s.mean(axis=1) - m
    k = s - m - g[None, :] - h[:, None]
    return BiaxialParts(mean=float(m), g_part=g, h_part=h, k_part=k)


def biaxial_project(field: PeriodicField) -> np.ndarray:
    """The axis projection g(x) + h(y) as a zero-mean (N, M) grid."""
    parts = biaxial_decompose(field)
    return parts.g_part[None, :] + parts.h_part[:, None]


# ---------------------------------------------------------------------------
# Grid construction


@dataclass(frozen=True)
class TrigTerm:
    """One plane wave amp * sin(2 pi (mx*x + my*y) + phase)."""

    mx: int
    my: int
    amp: float
    phase: float = 0.0


def trig_samples(
    terms: list[TrigTerm], offset: float, n: int, m: int
) -> np.ndarray:
    """Sample a trigonometric family on the n x m fractional grid.

    Rejects terms whose frequency aliases on the requested grid (the
    sampled grid would not determine the stated function).
    """
    for t in terms:
        if 2 * abs(t.mx) >= m or 2 * abs(t.my) >= n:
            raise ValueError(
                f"term (mx={t.mx}, my={t.my}) aliases on a {n}x{m} grid"
            )
    x = np.arange(m) / m
    y = np.arange(n) / n
    xx, yy = np.meshgrid(x, y)
    s = np.full((n, m), float(offset))
    for t in terms:
        s += t.amp * np.sin(2.0 * np.pi * (t.mx * xx + t.my * yy) + t.phase)
    return s


def field_spec_to_samples(obj: dict, n: int, m: int) -> np.ndarray:
    """Evaluate the JSON parametric family {"family": "trig", ...}."""
    if obj.get("family") != "trig":
        raise ValueError("unknown field family (expected 'trig')")
    terms = [
        TrigTerm(
            mx=int(t["mx"]),
            my=int(t["my"]),
            amp=float(t["amp"]),
            phase=float(t.get("phase", 0.0)),
        )
        for t in obj.get("terms", [])
    ]
    return trig_samples(terms, float(obj.get("offset", 0.0)), n, m)


def samples_from_csv(path) -> np.ndarray:
    """Load an N x M grid from CSV (rows = y, columns = x)."""
    try:
        s = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise ValueError(f"malformed grid CSV {path}: {exc}") from exc
    return s
