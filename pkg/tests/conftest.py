import itertools

import numpy as np
import pytest

from ldpc_fa.code_model import TannerGraph

TOY_H = np.array([[1, 1, 0, 1, 0, 0],
                  [0, 1, 1, 0, 1, 0],
                  [1, 0, 1, 0, 0, 1]], dtype=np.uint8)


def brute_codebook(H):
    """Every word c with H c = 0 (mod 2), by enumeration."""
    n = H.shape[1]
    words = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)
    ok = ~((words @ H.T) % 2).any(axis=1)
    return words[ok]


@pytest.fixture(scope="session")
def toy_graph():
    return TannerGraph.from_dense(TOY_H)


@pytest.fixture(scope="session")
def peg_3_6_small():
    from ldpc_fa.code_model import build_peg_regular
    return build_peg_regular(96, 3, 6, seed=1)


ACCEPTANCE_LOG: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, text in sorted(ACCEPTANCE_LOG, key=lambda r: _order(r[0])):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {cid}: {text}")


def _order(cid):
    num = "".join(ch for ch in cid if ch.isdigit())
    return (int(num) if num else 0, cid)
