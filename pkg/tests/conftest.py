import pytest

from seedcmd.engine import GroundingEngine
from seedcmd.environments import BlocksWorld, Page
from seedcmd.marking import load_spec
from seedcmd.specfile import data_path


@pytest.fixture(scope="session")
def blocks_spec():
    return load_spec(data_path("blocksworld.yaml"))


@pytest.fixture(scope="session")
def webpage_spec():
    return load_spec(data_path("webpage.yaml"))


@pytest.fixture(scope="session")
def blocks_engine(blocks_spec):
    return GroundingEngine(blocks_spec, backend="vsm")


@pytest.fixture(scope="session")
def blocks_engine_jaccard(blocks_spec):
    return GroundingEngine(blocks_spec, backend="jaccard")


@pytest.fixture(scope="session")
def webpage_engine(webpage_spec):
    return GroundingEngine(webpage_spec, backend="vsm")


@pytest.fixture(scope="session")
def webpage_engine_jaccard(webpage_spec):
    return GroundingEngine(webpage_spec, backend="jaccard")


@pytest.fixture
def figure_world():
    """Blue block and block D, as in the worked Blocks-World example."""
    world = BlocksWorld()
    world.add_block((2, 2), color="blue", shape="square")
    world.add_block((5, 4), color="red", shape="cube", name="D")
    return world


@pytest.fixture
def standard_world():
    world = BlocksWorld()
    world.add_block((2, 2), color="blue", shape="square")
    world.add_block((5, 4), color="green", shape="cube")
    world.add_block((4, 5), color="red", shape="triangular", name="A")
    world.add_block((7, 7), color="yellow", shape="circular", name="B")
    world.add_block((8, 2), color="orange", shape="rectangular", name="D")
    return world


@pytest.fixture
def standard_page():
    page = Page()
    page.add_element("title", (10, 5))
    page.add_element("image", (30, 40), filename="photo.png")
    page.add_element("paragraph", (10, 60), color="red")
    page.add_element("image", (60, 20))
    page.add_element("title", (50, 50), font_size="large", text="welcome!")
    page.add_element("button", (80, 80), color="blue", height=15, width=25)
    return page
