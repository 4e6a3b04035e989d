import numpy as np

from csirec import similarity, verify
from csirec.similarity import Kind, SimilarityMatrix


def test_all_checks_pass():
    checks = verify.run_checks(graphs=100, seed=0)
    failed = [c for c in checks if not c.passed]
    assert not failed, failed


def test_detects_missing_square_root(monkeypatch):
    original = similarity.csi_similarity

    def broken(fsp, bsp):
        s = original(fsp, bsp)
        m = s.matrix.copy()
        m.data = m.data ** 2
        return SimilarityMatrix(Kind.CSI, m)

    monkeypatch.setattr(similarity, "csi_similarity", broken)
    graphs = list(verify.random_graphs(10, seed=1))
    assert not verify.check_csi_closed_form(graphs).passed
    assert not verify.check_csi_oracle(graphs).passed
