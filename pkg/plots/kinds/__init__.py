"""Figure-kind registry: one script per kind, keyed by CSV schema tag."""

from dataclasses import dataclass
from typing import Callable, FrozenSet

from . import convergence, dispersion_curve, gauge_sweep, interference_scan, packet_gallery


@dataclass(frozen=True)
class Kind:
    fn: Callable
    schemas: FrozenSet[str]


REGISTRY = {
    "dispersion_curve": Kind(dispersion_curve.render,
                             frozenset({"dispersion-curve v1"})),
    "interference_scan": Kind(interference_scan.render,
                              frozenset({"interference-scan v1", "linear-field v1"})),
    "convergence": Kind(convergence.render,
                        frozenset({"dichotomy v1", "toy-tan v1", "gauge-sweep v1"})),
    "gauge_sweep": Kind(gauge_sweep.render, frozenset({"gauge-sweep v1"})),
    "packet_gallery": Kind(packet_gallery.render, frozenset({"packets v1"})),
}
