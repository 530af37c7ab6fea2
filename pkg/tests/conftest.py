import pytest

from am2atlas import presets
from am2atlas.equilibria import Label, Status
from am2atlas.regions import Region


@pytest.fixture(scope="session")
def case_a():
    return presets.case_a()


@pytest.fixture(scope="session")
def case_b():
    return presets.case_b()


@pytest.fixture(scope="session")
def case_c():
    return presets.case_c()


# Expected per-region status rows (existence and stability of every steady
# state); the single stable state of a region is globally stable.
REGION_TABLE = {
    Region.I0: {Label.E10: Status.GAS},
    Region.I1: {Label.E10: Status.UNSTABLE, Label.E11: Status.GAS},
    Region.I2: {
        Label.E10: Status.STABLE,
        Label.E11: Status.STABLE,
        Label.E12: Status.UNSTABLE,
    },
    Region.I3: {Label.E10: Status.UNSTABLE, Label.E20: Status.GAS},
    Region.I4: {
        Label.E10: Status.UNSTABLE,
        Label.E20: Status.UNSTABLE,
        Label.E21: Status.GAS,
    },
    Region.I5: {
        Label.E10: Status.UNSTABLE,
        Label.E20: Status.STABLE,
        Label.E21: Status.STABLE,
        Label.E22: Status.UNSTABLE,
    },
    Region.I6: {
        Label.E10: Status.UNSTABLE,
        Label.E11: Status.UNSTABLE,
        Label.E20: Status.UNSTABLE,
        Label.E21: Status.GAS,
    },
    Region.I7: {
        Label.E10: Status.UNSTABLE,
        Label.E11: Status.UNSTABLE,
        Label.E20: Status.STABLE,
        Label.E21: Status.STABLE,
        Label.E22: Status.UNSTABLE,
    },
    Region.I8: {
        Label.E10: Status.UNSTABLE,
        Label.E11: Status.UNSTABLE,
        Label.E12: Status.UNSTABLE,
        Label.E20: Status.STABLE,
        Label.E21: Status.STABLE,
        Label.E22: Status.UNSTABLE,
    },
}

#: regions where the single stable state attracts everything
GAS_REGIONS = {
    Region.I0: Label.E10,
    Region.I1: Label.E11,
    Region.I3: Label.E20,
    Region.I4: Label.E21,
    Region.I6: Label.E21,
}

#: bistable regions and their two attractors
PINK_REGIONS = (Region.I5, Region.I7, Region.I8)
