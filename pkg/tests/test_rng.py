"""Named substream discipline."""

import numpy as np

from nsgvd.rng import substream


def test_same_path_same_stream():
    a = substream(7, "video", "real", 3).standard_normal(16)
    b = substream(7, "video", "real", 3).standard_normal(16)
    assert (a == b).all()


def test_distinct_paths_decorrelate():
    draws = {
        name: substream(7, *path).standard_normal(10_000)
        for name, path in {
            "video0": ("video", "real", 0),
            "video1": ("video", "real", 1),
            "fake0": ("video", "fake", 0),
            "train": ("kernel-train",),
        }.items()
    }
    names = list(draws)
    for i, x in enumerate(names):
        for y in names[i + 1 :]:
            corr = np.corrcoef(draws[x], draws[y])[0, 1]
            assert abs(corr) < 0.05, (x, y, corr)


def test_seed_changes_stream():
    a = substream(1, "x").standard_normal(8)
    b = substream(2, "x").standard_normal(8)
    assert not (a == b).all()


def test_string_and_int_parts_are_distinct_dimensions():
    assert not (
        substream(0, "a", 1).standard_normal(4) == substream(0, "a", 2).standard_normal(4)
    ).all()
