import math

import pytest

from fswsim import ThermophysicalTable, ToolGeometry


@pytest.fixture
def reference_tool() -> ToolGeometry:
    """The 9 mm / 3 mm / 4 mm, 10 degree conical-shoulder tool."""
    return ToolGeometry(
        shoulder_radius=9e-3,
        probe_radius=3e-3,
        probe_height=4e-3,
        cone_angle=math.radians(10.0),
    )


@pytest.fixture
def constant_material() -> ThermophysicalTable:
    """Temperature-independent properties: kappa = 160/(2700*900) m^2/s."""
    return ThermophysicalTable(
        density=2700.0,
        emissivity=0.0,
        conductivity_table=((200.0, 160.0), (2000.0, 160.0)),
        specific_heat_table=((200.0, 900.0), (2000.0, 900.0)),
        yield_strength_table=((200.0, 1e8), (2000.0, 1e8)),
        name="constant",
    )


@pytest.fixture
def aluminum_like() -> ThermophysicalTable:
    """Illustrative aluminum-alloy tables (same values as the example config)."""
    return ThermophysicalTable(
        density=2700.0,
        emissivity=0.3,
        conductivity_table=(
            (293.0, 167.0), (473.0, 177.0), (673.0, 189.0), (855.0, 193.0),
        ),
        specific_heat_table=(
            (293.0, 896.0), (473.0, 978.0), (673.0, 1052.0), (855.0, 1130.0),
        ),
        yield_strength_table=(
            (293.0, 276e6), (373.0, 250e6), (473.0, 190e6),
            (573.0, 110e6), (673.0, 40e6), (773.0, 15e6), (855.0, 3e6),
        ),
        name="illustrative-aluminum",
    )
