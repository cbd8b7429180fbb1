"""
Shared fixtures for node model tests.
"""

import pytest

from smartem.em import LinkBudgetTerms, fspl_db
from smartem.geometry import Point3, Propagator
from smartem.nodes import FeedLink


def make_feed(
    source: Point3,
    node: Point3,
    eirp_dbm: float = 65.0,
    rx_gain_dbi: float = 0.0,
    backhaul_capacity_bps: float = 0.0,
) -> FeedLink:
    """Line-of-sight feed from ``source`` to ``node`` at 28 GHz."""
    distance = source.distance_to(node)
    return FeedLink(
        source_id="gnb0",
        source_position=source,
        terms=LinkBudgetTerms(
            eirp_dbm=eirp_dbm,
            path_loss_db=fspl_db(distance, 28e9),
            rx_gain_dbi=rx_gain_dbi,
        ),
        distance_m=distance,
        los=True,
        backhaul_capacity_bps=backhaul_capacity_bps,
    )


@pytest.fixture
def feed_factory():
    return make_feed


@pytest.fixture
def free_space():
    """Propagator without buildings."""
    return Propagator([], 28e9)
