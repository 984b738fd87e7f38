"""Conformal torus metrics f^2 ds^2 over a unit-covolume lattice."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fields
from .fields import PeriodicField, field_spec_to_samples, samples_from_csv
from .lattice import Lattice, ReducedModulus, lattice_from_json, reduce

_UNIT_COVOL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TorusMetric:
    """A lattice (unit covolume) plus conformal factor, with cached statistics."""

    lattice: Lattice
    factor: PeriodicField
    reduced: ReducedModulus
    area: float      # quadrature of f^2
    mean: float      # quadrature of f
    variance: float  # quadrature of (f - mean)^2

    @property
    def sigma_sq(self) -> float:
        return self.reduced.sigma_sq

    @property
    def grid(self) -> tuple[int, int]:
        return self.factor.shape


def build_metric(lattice: Lattice, factor, *, rescale: bool = True) -> TorusMetric:
    """Assemble a metric, normalizing the lattice to unit covolume.

    ``factor`` is a sample grid or a PeriodicField.  The normalization maps
    (L, f) to (L / sqrt(covol), sqrt(covol) * f), an isometry, so area and
    systole are preserved.  With rescale=False a non-unit lattice is rejected.
    """
    samples = factor.samples if isinstance(factor, PeriodicField) else np.asarray(factor, dtype=float)
    covol = lattice.covolume
    if abs(covol - 1.0) > _UNIT_COVOL_TOL:
        if not rescale:
            raise ValueError("lattice covolume must be 1 when rescale is forbidden")
        root = math.sqrt(covol)
        lattice = lattice.unit_covolume()
        samples = samples * root
    field = PeriodicField(samples, lattice)
    return TorusMetric(
        lattice=lattice,
        factor=field,
        reduced=reduce(lattice),
        area=fields.second_moment(field),
        mean=fields.mean(field),
        variance=fields.variance(field),
    )


def area(metric: TorusMetric) -> float:
    return metric.area


def scale(metric: TorusMetric, c: float) -> TorusMetric:
    """Homothety: multiply the factor by c > 0."""
    if not c > 0:
        raise ValueError("scale factor must be positive")
    return build_metric(metric.lattice, metric.factor.samples * c, rescale=False)


def metric_from_json(obj: dict, n: int, m: int, base_dir=None) -> TorusMetric:
    """Parse {"lattice": ..., "factor": ...} into a metric.

    The factor is either an inline trig family (sampled at n x m) or
    {"grid_csv": path} with the grid dimensions taken from the file.
    """
    if not isinstance(obj, dict) or "lattice" not in obj or "factor" not in obj:
        raise ValueError("metric spec needs 'lattice' and 'factor' entries")
    lattice = lattice_from_json(obj["lattice"])
    fspec = obj["factor"]
    if not isinstance(fspec, dict):
        raise ValueError("factor spec must be a JSON object")
    if "grid_csv" in fspec:
        path = fspec["grid_csv"]
        if base_dir is not None:
            import os

            if not os.path.isabs(path):
                path = os.path.join(base_dir, path)
        samples = samples_from_csv(path)
    else:
        samples = field_spec_to_samples(fspec, n, m)
    if samples.min() <= fields.MIN_SAMPLE:
        raise ValueError("conformal factor must be positive everywhere")
    return build_metric(lattice, samples)
