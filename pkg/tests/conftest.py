import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tlace.model import MixedTransitionSystem


@pytest.fixture
def two_state_chain():
    """s0 --a--> s1 with p holding only at s1."""
    return MixedTransitionSystem(
        state_vars=["p", "q"],
        action_vars=["u"],
        states={"s0": {"p": False, "q": False}, "s1": {"p": True, "q": False}},
        initial=["s0"],
        actions={"a": {"u": True}},
        transitions=[("s0", "a", "s1")],
    )


@pytest.fixture
def loop_state():
    """A single p-state with a self-loop."""
    return MixedTransitionSystem(
        state_vars=["p"],
        action_vars=["u"],
        states={"s0": {"p": True}},
        initial=["s0"],
        actions={"a": {"u": True}},
        transitions=[("s0", "a", "s0")],
    )


@pytest.fixture(scope="session")
def crypto_mas():
    from tlace.epistemic import build_crypto_model

    return build_crypto_model()


@pytest.fixture(scope="session")
def crypto_reduction(crypto_mas):
    from tlace.epistemic import reduce_mas

    return reduce_mas(crypto_mas)
