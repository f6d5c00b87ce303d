import numpy as np
import pytest

from ldpclab import AddressTable, Code, CodeDescriptor, build_code, load_builtin

# 16-bit toy: two groups of 4 info bits, 8 checks, expansion stride 2
TOY16_TABLE = "16 8 4\n0 3\n1 4\n"

# desk-scale code used by the simulation tests: 144 bits, rate 1/3
TOYSIM_TABLE = (
    "144 48 12\n"
    "0 13 29 57\n"
    "5 22 41 70\n"
    "9 31 64\n"
    "2 47 83\n"
)


@pytest.fixture(scope="session")
def toy16():
    return build_code(AddressTable.parse(TOY16_TABLE), family_tag="toy16")


@pytest.fixture(scope="session")
def toysim():
    return build_code(AddressTable.parse(TOYSIM_TABLE), family_tag="toysim")


@pytest.fixture(scope="session")
def short_r12():
    return load_builtin("dvbt2-short-r12")
