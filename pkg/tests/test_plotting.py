import pytest

from tonguetwist.metrics import score_text
from tonguetwist.plotting import plot_reports


def test_writes_png(tmp_path, lex):
    reports = [score_text(t, str(i), lex) for i, t in enumerate(["she sells sea shells", "cat"], 1)]
    plot_reports(reports, tmp_path / "fig.png", title="demo")
    data = (tmp_path / "fig.png").read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n" and len(data) > 1000


def test_empty_rejected(tmp_path):
    with pytest.raises(ValueError):
        plot_reports([], tmp_path / "x.png")
