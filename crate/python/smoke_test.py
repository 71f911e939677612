"""Builds a cube and an L-shaped prism and checks the decomposition."""

import convexcut


def cube(x0=0.0, y0=0.0, z0=0.0, sx=1.0, sy=1.0, sz=1.0):
    v = [[x0 + sx * (i & 1), y0 + sy * (i >> 1 & 1), z0 + sz * (i >> 2 & 1)] for i in range(8)]
    quads = [(0, 2, 3, 1), (4, 5, 7, 6), (0, 1, 5, 4), (2, 6, 7, 3), (0, 4, 6, 2), (1, 3, 7, 5)]
    t = [tri for a, b, c, d in quads for tri in ([a, b, c], [a, c, d])]
    return v, t


def volume(v, t):
    total = 0.0
    for a, b, c in t:
        (ax, ay, az), (bx, by, bz), (cx, cy, cz) = v[a], v[b], v[c]
        total += ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) + az * (bx * cy - by * cx)
    return total / 6.0


def l_prism():
    # Outline (0,0) (2,0) (2,1) (1,1) (1,2) (0,2), extruded over z in [0, 1].
    outline = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    n = len(outline)
    v = [[x, y, 0.0] for x, y in outline] + [[x, y, 1.0] for x, y in outline]
    bottom = [[0, 5, 4], [0, 4, 3], [0, 3, 1], [1, 3, 2]]
    t = bottom + [[c + n, b + n, a + n] for a, b, c in bottom]
    for i in range(n):
        j = (i + 1) % n
        t += [[i, j, j + n], [i, j + n, i + n]]
    return v, t


def main():
    assert isinstance(convexcut.__version__, str)

    v, t = cube()
    hulls = convexcut.decompose(v, t, threshold=0.05, seed=1)
    assert len(hulls) == 1, len(hulls)
    assert abs(volume(*hulls[0]) - 1.0) < 1e-9

    v, t = l_prism()
    assert abs(volume(v, t) - 3.0) < 1e-12
    hulls = convexcut.decompose(v, t)
    assert len(hulls) == 2, len(hulls)
    assert abs(sum(volume(*h) for h in hulls) - 3.0) < 1e-6

    try:
        convexcut.decompose(v, t[:-1])
    except convexcut.ValidationError as e:
        assert "open boundary" in str(e)
    else:
        raise AssertionError("open mesh accepted")

    try:
        convexcut.decompose(v, [[0, 1, 99]])
    except ValueError as e:
        assert not isinstance(e, convexcut.ValidationError)
    else:
        raise AssertionError("bad index accepted")

    print(f"convexcut {convexcut.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
