from importlib import resources


def corpus_files():
    return sorted(p.name for p in resources.files("sepcheck").joinpath("corpus").iterdir() if p.name.endswith(".sl"))


def corpus_text(name):
    return resources.files("sepcheck").joinpath("corpus", name).read_text(encoding="utf-8")


def corpus_path(name):
    return str(resources.files("sepcheck").joinpath("corpus", name))


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
