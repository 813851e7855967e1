from importlib.resources import files

import pytest

import etskit as ek

CORPUS = [f"t{i}" for i in range(1, 9)]


@pytest.fixture(scope="session")
def data_root():
    return files("etskit") / "data"


@pytest.fixture(scope="session")
def systems(data_root):
    return {
        name: ek.load_system((data_root / f"{name}.ets").read_text(),
                             f"{name}.ets")
        for name in CORPUS
    }


@pytest.fixture(scope="session")
def claims_map(data_root):
    return {
        name: ek.parse_claims((data_root / f"{name}.claims").read_text(),
                              f"{name}.claims")
        for name in CORPUS
    }
