import pytest

from templex import (analyze_corpus, collapse, load_bg_lexicon,
                     load_collapse_map, load_fg_lexicon, load_ontology,
                     read_corpus)
from helpers import fixture_text


@pytest.fixture(scope="session")
def onto():
    return load_ontology(fixture_text("succession.onto"))


@pytest.fixture(scope="session")
def cmap():
    return load_collapse_map(fixture_text("succession.collapse"))


@pytest.fixture(scope="session")
def bg_raw():
    return load_bg_lexicon(fixture_text("succession.bglex"))


@pytest.fixture(scope="session")
def bg(bg_raw, cmap, onto):
    return collapse(bg_raw, cmap, onto)


@pytest.fixture(scope="session")
def fg():
    return load_fg_lexicon(fixture_text("succession.fglex"))


@pytest.fixture(scope="session")
def corpus():
    return read_corpus(fixture_text("succession.vrt"))


@pytest.fixture(scope="session")
def analyses(corpus):
    return analyze_corpus(corpus)


@pytest.fixture(scope="session")
def banking_bg(cmap, onto):
    return collapse(load_bg_lexicon(fixture_text("banking.bglex")), cmap, onto)


@pytest.fixture(scope="session")
def banking_corpus():
    return read_corpus(fixture_text("banking.vrt"))
