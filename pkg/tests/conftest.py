import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def planar_study():
    """Shared annulus-condenser refinement ladder (the expensive grid study)."""
    from varcap.sequences import planar_condenser_study

    h_list = (0.1, 0.05, 0.025, 0.0125)
    caps, errors, order = planar_condenser_study(h_list, rim_radius=4.0)
    return {"h": h_list, "caps": caps, "errors": errors, "order": order}
