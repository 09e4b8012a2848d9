from pathlib import Path

import pytest

from cdbaf.parser import parse_document

CORPUS = Path(__file__).resolve().parent.parent / "src" / "cdbaf" / "corpus"


def load_corpus(name: str):
    return parse_document((CORPUS / name).read_text())


@pytest.fixture
def corpus():
    return load_corpus
