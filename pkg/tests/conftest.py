from pathlib import Path

import numpy as np
import pytest

from mrbp.codes import ParityCheckCode, load_alist

CODES_DIR = Path(__file__).resolve().parent.parent / "codes"

TOY_ALIST = """3 2
2 2
1 2 1
2 2
1
1 2
2
1 2
2 3
"""


@pytest.fixture(scope="session")
def hamming():
    return load_alist(CODES_DIR / "hamming_7_4.alist")


@pytest.fixture(scope="session")
def qc96():
    return load_alist(CODES_DIR / "qc_96_48.alist")


@pytest.fixture(scope="session")
def toy():
    # H = [[1,1,0],[0,1,1]]
    return ParityCheckCode.from_matrix(np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8))
