import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cusped_spectra import hyperbolic


@pytest.fixture(scope="session")
def sphere_spectrum_bound12():
    return hyperbolic.enumerate_length_spectrum("thrice_punctured_sphere", 8.0, 12)


@pytest.fixture(scope="session")
def sphere_spectra_bound8():
    """Spectra at cutoffs 8 and 10, both enumerated to word length 8."""
    sp8 = hyperbolic.enumerate_length_spectrum("thrice_punctured_sphere", 8.0, 8)
    sp10 = hyperbolic.enumerate_length_spectrum("thrice_punctured_sphere", 10.0, 8)
    return sp8, sp10

@pytest.fixture(scope="session")
def sphere_spectrum_deep():
    return hyperbolic.enumerate_length_spectrum("thrice_punctured_sphere", 12.0, 8)
