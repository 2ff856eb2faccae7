"""
Deterministic sample points over a case domain.

Points come from a scrambled Halton sequence over the domain box and are filtered by the
domain margin, so the same seed always yields the same points.
"""

import logging

import numpy as np
from scipy.stats import qmc

from projlie.dynamics import PhasePoint
from projlie.exceptions import DomainError

logger = logging.getLogger(__name__)

MAX_BATCHES = 20
MIN_BATCH = 64

# Streams keep point sets independent of each other for one seed.
POINT_STREAM = 0
START_STREAM = 1
MOMENTUM_STREAM = 2


def _halton(dimension, seed, stream):
    return qmc.Halton(d=dimension, scramble=True, seed=np.random.default_rng([seed, stream]))


def _draw(domain, count, seed, stream, extra_bounds=()):
    lower = [domain.x_range[0], domain.y_range[0], *(b[0] for b in extra_bounds)]
    upper = [domain.x_range[1], domain.y_range[1], *(b[1] for b in extra_bounds)]
    sequence = _halton(len(lower), seed, stream)
    accepted, drawn = [], 0
    batch = max(4 * count, MIN_BATCH)
    for _ in range(MAX_BATCHES):
        for row in qmc.scale(sequence.random(batch), lower, upper):
            drawn += 1
            if domain.contains(row[0], row[1]):
                accepted.append(row)
                if len(accepted) == count:
                    logger.debug("Sampled %d points from %d draws (%s)", count, drawn, domain.description)
                    return np.array(accepted)
    raise DomainError(
        f"Only {len(accepted)} of {count} points found after {drawn} draws; the domain predicate "
        f"'{domain.description}' leaves too little of the box"
    )


def sample_points(domain, count, seed=0, stream=POINT_STREAM):
    """count points (x, y) of the domain."""
    return [tuple(float(c) for c in row) for row in _draw(domain, count, seed, stream)]


def sample_starts(domain, count, seed=0, speed=1.0):
    """Geodesic starts: a domain point with a unit coordinate direction at a sampled angle."""
    rows = _draw(domain, count, seed, START_STREAM, extra_bounds=[(0.0, 2.0 * np.pi)])
    return [PhasePoint.from_angle((row[0], row[1]), row[2], speed) for row in rows]


def sample_momenta(count, seed=0):
    """Unit covectors at Halton angles."""
    angles = 2.0 * np.pi * _halton(1, seed, MOMENTUM_STREAM).random(count)[:, 0]
    return [(float(np.cos(a)), float(np.sin(a))) for a in angles]
