import xml.etree.ElementTree as ET

import numpy as np
import pytest

from mobpomp.classifier import RegionCode, Triangle
from mobpomp.exceptions import AntipodalPoints, InputError, IoFailure
from mobpomp.render import (
    GridSpec,
    RegionImage,
    circumcircle,
    contour_fidelity,
    factor_field,
    figure_overlays,
    great_circle_image,
    ppm_bytes,
    render_sign_map,
    svg_document,
    write_image,
    zero_contour,
)

from conftest import PICTURE3_VERTICES, unit_equilateral


@pytest.mark.parametrize(
    "args",
    [(0, 0, 0, 1, 10, 10), (1, 0, 0, 1, 10, 10), (0, 1, 0, 1, 1, 10), (0, np.inf, 0, 1, 10, 10)],
)
def test_grid_validation(args):
    with pytest.raises(InputError):
        GridSpec(*args)


def test_grid_pixel_centers():
    g = GridSpec(0, 4, 0, 2, 4, 2)
    C = g.centers()
    assert C.shape == (2, 4, 2)
    assert C[0, 0].tolist() == [0.5, 1.5]
    assert C[1, 3].tolist() == [3.5, 0.5]
    np.testing.assert_allclose(g.to_pixel(C[1, 3]), [3, 1])
    np.testing.assert_allclose(g.from_index([1, 3]), C[1, 3])


def test_picture1_regions(picture1):
    g = GridSpec.around(picture1, 120, 120)
    counts = render_sign_map(picture1, g).counts()
    assert counts.get(1, 0) == 0
    assert counts.get(2, 0) > 0 and counts.get(3, 0) > 0


def test_picture3_chordal_region2_empty():
    t = Triangle.from_vertices(PICTURE3_VERTICES, "chordal")
    g = GridSpec(-4, 5, -4, 5, 150, 150)
    counts = render_sign_map(t, g).counts()
    assert counts.get(2, 0) == 0
    assert counts.get(0, 0) > 0


def test_equilateral_band_hugs_circumcircle():
    # the factors touch zero tangentially on the circumcircle, so the band width scales like sqrt(tol)
    t = Triangle.from_vertices(unit_equilateral())
    g = GridSpec(-2, 2, -2, 2, 200, 200)
    widths = []
    for tol in (0.02, 0.0005):
        img = render_sign_map(t, g, tol=tol)
        flagged = img.pixels != RegionCode.MP_PROPERTY
        assert flagged.any()
        assert not np.isin(img.pixels, [1, 2, 3]).any()
        widths.append(np.max(np.abs(np.linalg.norm(g.centers()[flagged], axis=1) - 1.0)))
    assert widths[0] < 0.25
    assert widths[1] < widths[0] / 3


def test_zero_contour_unit_circle():
    g = GridSpec(-2, 2, -2, 2, 101, 101)
    lines = zero_contour(lambda P: np.sum(P * P, axis=1) - 1.0, g)
    assert len(lines) == 1
    r = np.linalg.norm(lines[0], axis=1)
    assert np.max(np.abs(r - 1)) <= 2 * g.dx
    assert np.allclose(lines[0][0], lines[0][-1])


def test_zero_contour_constant_field():
    g = GridSpec(-1, 1, -1, 1, 20, 20)
    assert zero_contour(lambda P: np.ones(len(P)), g) == []
    with pytest.raises(InputError):
        zero_contour(np.zeros((3, 3)), g)


def test_equilateral_factor_has_no_sign_change():
    t = Triangle.from_vertices(unit_equilateral())
    g = GridSpec(-1.5, 1.5, -1.5, 1.5, 150, 150)
    assert zero_contour(factor_field(t, 1), g) == []


def test_picture1_factor_contours(picture1):
    g = GridSpec.around(picture1, 200, 200)
    for which in (2, 3):
        fld = factor_field(picture1, which)
        lines = zero_contour(fld, g)
        assert lines
        assert contour_fidelity(fld, lines, g) <= 1e-3
    assert zero_contour(factor_field(picture1, 1), g) == []


def test_small_level_contour_on_arc_bc():
    V = unit_equilateral()
    t = Triangle.from_vertices(V)
    g = GridSpec(-1.5, 1.5, -1.5, 1.5, 300, 300)
    pts = np.vstack(zero_contour(factor_field(t, 1), g, level=1e-3))
    assert np.max(np.abs(np.linalg.norm(pts, axis=1) - 1)) < 0.1
    # the arc not containing A
    assert np.all(pts @ V[0] < -0.4)


def test_great_circle_equator():
    P = great_circle_image([1, 0, 0], [0, 1, 0])
    np.testing.assert_allclose(np.linalg.norm(P, axis=1), 1.0, atol=1e-12)


def test_great_circle_through_pole_is_line():
    P = great_circle_image([1, 0, 0], [0, 0, -1])
    np.testing.assert_allclose(P[:, 1], 0.0, atol=1e-12)
    assert np.all(np.isfinite(P))


def test_great_circle_errors():
    with pytest.raises(AntipodalPoints):
        great_circle_image([1, 0, 0], [-1, 0, 0])
    with pytest.raises(InputError):
        great_circle_image([1, 0, 0], [1, 0, 0])
    with pytest.raises(InputError):
        great_circle_image([2, 0, 0], [0, 1, 0])


def test_circumcircle():
    center, radius = circumcircle(Triangle.from_vertices(unit_equilateral()))
    assert center == pytest.approx((0, 0), abs=1e-12)
    assert radius == pytest.approx(1.0)


def test_ppm_header_and_payload():
    rgb = np.arange(12, dtype=np.uint8).reshape(2, 2, 3)
    data = ppm_bytes(rgb)
    header = b"P6\n2 2\n255\n"
    assert data.startswith(header)
    assert data[len(header):] == bytes(range(12))


@pytest.mark.parametrize("fmt", ["ppm", "svg"])
def test_write_is_deterministic(tmp_path, picture1, fmt):
    g = GridSpec.around(picture1, 60, 50)
    paths = []
    for k in range(2):
        img = render_sign_map(picture1, g)
        ov = figure_overlays(picture1, g, great_circles=True, circumcircle_overlay=True)
        paths.append(write_image(img, tmp_path / f"out{k}.{fmt}", fmt, ov))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_ppm_size(tmp_path, picture1):
    g = GridSpec.around(picture1, 30, 20)
    path = write_image(render_sign_map(picture1, g), tmp_path / "x.ppm")
    assert len(path.read_bytes()) == len(b"P6\n30 20\n255\n") + 30 * 20 * 3


def test_svg_well_formed(picture1):
    g = GridSpec.around(picture1, 40, 40)
    doc = svg_document(render_sign_map(picture1, g), figure_overlays(picture1, g))
    root = ET.fromstring(doc.encode("utf-8"))
    ns = "{http://www.w3.org/2000/svg}"
    assert root.tag == f"{ns}svg"
    assert root.find(f"{ns}image") is not None
    assert len(root.findall(f".//{ns}circle")) == 3
    assert len(root.findall(f".//{ns}path")) >= 1


def test_write_errors(tmp_path):
    img = RegionImage(np.zeros((2, 2), dtype=np.uint8), GridSpec(0, 1, 0, 1, 2, 2))
    with pytest.raises(IoFailure):
        write_image(img, tmp_path / "missing" / "x.ppm")
    with pytest.raises(InputError):
        write_image(img, tmp_path / "x.gif", "gif")


def test_antipodal_great_circles_noted():
    t = Triangle.from_vertices([[-1, 0], [1, 0], [0, 2]])
    g = GridSpec(-3, 3, -3, 3, 20, 20)
    ov = figure_overlays(t, g, contours=False, great_circles=True)
    assert len(ov.notes) == 1 and len(ov.polylines) == 2
