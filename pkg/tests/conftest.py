import pytest

from nbestlang.grammar.core import default_grammar
from nbestlang.lexicon import default_lexicon
from nbestlang.pipeline import Config, core, load_corpus


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def grammar():
    return default_grammar()


@pytest.fixture(scope="session")
def treebank(grammar, lexicon):
    return core.read_treebank(grammar, lexicon)


@pytest.fixture(scope="session")
def heldout():
    return [l.split() for l in core.shipped_text("heldout.txt").splitlines() if l.strip()]


@pytest.fixture(scope="session")
def bundle(grammar, lexicon, treebank):
    return core.build_bundle(grammar, lexicon, treebank)


@pytest.fixture(scope="session")
def config():
    return Config()


@pytest.fixture(scope="session")
def train_corpus():
    return load_corpus(core.shipped_path("train.nbest"), core.shipped_path("train.ref"))


@pytest.fixture(scope="session")
def eval_corpus():
    return load_corpus(core.shipped_path("eval.nbest"), core.shipped_path("eval.ref"))


@pytest.fixture(scope="session")
def trained_model(train_corpus, bundle, config):
    return core.train_pipeline(train_corpus, bundle, config)


# -- acceptance summary ---------------------------------------------------------

ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the end-of-run summary.

    Tests call ``criterion(n, detail)`` before asserting; a test that then
    fails (or an expected-failure marker) turns the line into FAIL.
    """
    def record(number, detail):
        ACCEPTANCE.setdefault(number, []).append([request.node.nodeid, detail, None])
    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        for rows in ACCEPTANCE.values():
            for row in rows:
                if row[0] == item.nodeid:
                    row[2] = rep.passed and not hasattr(rep, "wasxfail")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[number]
        ok = all(r[2] for r in rows)
        details = "; ".join(r[1] for r in rows if r[1])
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {details}")
