"""Rasterised sign maps of the three factor functions, zero contours, and
deterministic PPM / SVG output.

Pixel ``(row, col)`` of a ``width x height`` grid samples the world point at
the center of its cell::

    x = x_min + (col + 0.5) * (x_max - x_min) / width
    y = y_max - (row + 0.5) * (y_max - y_min) / height

so row 0 is the top of the image.
"""

import base64
import io
import json
from xml.sax.saxutils import escape
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, ImageDraw
from skimage import measure

from ._validation import check_point_array
from .classifier import REGION_LEGEND, RegionCode, distance_triples, factor_values, region_codes_from_triples
from .exceptions import AntipodalPoints, InputError, IoFailure
from .metrics import NORTH_POLE, inverse_stereographic

PALETTE = {
    RegionCode.MP_PROPERTY: (255, 255, 255),
    RegionCode.FAILS_1: (230, 97, 1),
    RegionCode.FAILS_2: (94, 60, 153),
    RegionCode.FAILS_3: (0, 158, 115),
    RegionCode.BOUNDARY: (0, 0, 0),
}
VERTEX_COLOR = (31, 119, 180)
CONTOUR_COLOR = (0, 0, 0)
GREAT_CIRCLE_COLOR = (204, 0, 102)
CIRCUMCIRCLE_COLOR = (120, 120, 120)


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    width: int
    height: int

    def __post_init__(self):
        vals = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(np.isfinite(v) for v in vals):
            raise InputError("grid window must be finite")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise InputError("grid window needs x_min < x_max and y_min < y_max")
        if int(self.width) < 2 or int(self.height) < 2:
            raise InputError("grid needs width >= 2 and height >= 2")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.width

    @property
    def dy(self):
        return (self.y_max - self.y_min) / self.height

    def centers(self):
        """World coordinates of all pixel centers, shape ``(height, width, 2)``."""
        xs = self.x_min + (np.arange(self.width) + 0.5) * self.dx
        ys = self.y_max - (np.arange(self.height) + 0.5) * self.dy
        X, Y = np.meshgrid(xs, ys)
        return np.stack([X, Y], axis=-1)

    def to_pixel(self, P):
        """Continuous ``(col, row)`` image coordinates of world points."""
        P = np.asarray(P, dtype=float)
        col = (P[..., 0] - self.x_min) / self.dx - 0.5
        row = (self.y_max - P[..., 1]) / self.dy - 0.5
        return np.stack([col, row], axis=-1)

    def from_index(self, rc):
        """World coordinates of fractional ``(row, col)`` indices."""
        rc = np.asarray(rc, dtype=float)
        x = self.x_min + (rc[..., 1] + 0.5) * self.dx
        y = self.y_max - (rc[..., 0] + 0.5) * self.dy
        return np.stack([x, y], axis=-1)

    @classmethod
    def around(cls, t, width=400, height=400, margin=0.75):
        from .classifier import default_window

        return cls(*default_window(t, margin), width, height)


@dataclass
class RegionImage:
    pixels: np.ndarray
    grid: GridSpec
    legend: dict = field(default_factory=lambda: {int(k): v for k, v in REGION_LEGEND.items()})

    def counts(self):
        return {int(c): int(n) for c, n in zip(*np.unique(self.pixels, return_counts=True))}

    def rgb(self):
        lut = np.zeros((256, 3), dtype=np.uint8)
        for code, color in PALETTE.items():
            lut[int(code)] = color
        return lut[self.pixels]


def render_sign_map(t, g, tol=None):
    """Classify every pixel center of ``g`` with the direct route.

    Codes: 0 MP-property, 1/2/3 the failing factor, 4 boundary band
    (``|factor| <= tol`` with no factor below ``-tol``).
    """
    P = g.centers().reshape(-1, 2)
    codes = region_codes_from_triples(distance_triples(t, P), tol)
    return RegionImage(codes.reshape(g.height, g.width), g)


def factor_field(t, which):
    """``M -> factor_which(M)`` as a vectorised callable on ``(n, 2)`` points."""
    return lambda P: factor_values(distance_triples(t, P))[:, which - 1]


def sample_field(field_fn, g):
    P = g.centers().reshape(-1, 2)
    return np.asarray(field_fn(P), dtype=float).reshape(g.height, g.width)


def zero_contour(field_fn, g, level=0.0):
    """Marching-squares level set of ``field_fn`` sampled at the pixel centers.

    ``field_fn`` is either a callable on ``(n, 2)`` world points or an array
    already sampled on ``g``. Returns a list of ``(n, 2)`` world-coordinate
    polylines; closed curves repeat their first vertex at the end.
    """
    values = field_fn if isinstance(field_fn, np.ndarray) else sample_field(field_fn, g)
    if values.shape != (g.height, g.width):
        raise InputError(f"field shape {values.shape} does not match grid {(g.height, g.width)}")
    if not np.all(np.isfinite(values)):
        raise InputError("field has non-finite samples")
    return [g.from_index(c) for c in measure.find_contours(values, level)]


def contour_fidelity(field_fn, polylines, g):
    """Largest ``|field(vertex)|`` over all contour vertices divided by the
    largest ``|field|`` over the grid."""
    scale = float(np.max(np.abs(sample_field(field_fn, g))))
    if not polylines:
        return 0.0
    pts = np.vstack(polylines)
    worst = float(np.max(np.abs(field_fn(pts))))
    return worst / scale if scale > 0 else worst


def great_circle_image(p, q, samples=720):
    """Planar image of the great circle through sphere points ``p`` and ``q``.

    Samples within 1e-9 of the north pole are skipped, since they have no
    finite image.

    Raises
    ------
    AntipodalPoints
        If ``|p + q| < 1e-9`` (the great circle is not unique).
    """
    p = check_point_array(p, dim=3, name="p")
    q = check_point_array(q, dim=3, name="q")
    for s in (p, q):
        if abs(float(s @ s) - 1.0) > 1e-9:
            raise InputError("great-circle endpoints must lie on the unit sphere")
    if np.linalg.norm(p + q) < 1e-9:
        raise AntipodalPoints("antipodal points lie on infinitely many great circles")
    normal = np.cross(p, q)
    nn = np.linalg.norm(normal)
    if nn < 1e-12:
        raise InputError("coincident points do not determine a great circle")
    normal = normal / nn
    u = p / np.linalg.norm(p)
    v = np.cross(normal, u)
    theta = 2 * np.pi * np.arange(samples) / samples
    S = np.cos(theta)[:, None] * u + np.sin(theta)[:, None] * v
    S = S / np.linalg.norm(S, axis=1, keepdims=True)
    keep = np.linalg.norm(S - np.array(NORTH_POLE), axis=1) >= 1e-9
    # 1e-9 from the pole still means z within 1e-12 of 1 is possible; drop those too
    keep &= S[:, 2] < 1.0 - 1e-12
    return inverse_stereographic(S[keep])


def circumcircle(t):
    """Euclidean circumcenter and radius of the plane triangle ``t``."""
    (ax, ay), (bx, by), (cx, cy) = t.vertices
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        raise InputError("collinear vertices have no circumcircle")
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    return (ux, uy), float(np.hypot(ax - ux, ay - uy))


def circle_polyline(center, radius, samples=720):
    theta = 2 * np.pi * np.arange(samples + 1) / samples
    return np.column_stack([center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)])


@dataclass
class Overlays:
    """Polylines ``(points, rgb)`` and marked points ``(x, y)`` drawn on top of
    the region image."""

    polylines: list = field(default_factory=list)
    points: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add_polyline(self, pts, color=CONTOUR_COLOR):
        self.polylines.append((np.asarray(pts, dtype=float), tuple(color)))


def figure_overlays(t, g, contours=True, great_circles=False, circumcircle_overlay=False):
    """Standard overlays: zero contours of the three factors, vertex markers,
    optional great-circle images through each vertex pair."""
    from .metrics import forward_stereographic

    ov = Overlays(points=[tuple(map(float, v)) for v in t.vertices])
    if contours:
        for which in (1, 2, 3):
            for line in zero_contour(factor_field(t, which), g):
                ov.add_polyline(line, CONTOUR_COLOR)
    if great_circles:
        lifts = forward_stereographic(t.vertices)
        for i, j in ((0, 1), (1, 2), (2, 0)):
            try:
                ov.add_polyline(great_circle_image(lifts[i], lifts[j]), GREAT_CIRCLE_COLOR)
            except AntipodalPoints:
                ov.notes.append(f"great circle through vertices {'ABC'[i]}{'ABC'[j]} skipped: antipodal lifts")
    if circumcircle_overlay:
        center, radius = circumcircle(t)
        ov.add_polyline(circle_polyline(center, radius), CIRCUMCIRCLE_COLOR)
    return ov


def _visible_runs(pix, limit):
    """Split a pixel-space polyline wherever it leaves a generous clip box."""
    inside = np.all(np.abs(pix) < limit, axis=1)
    runs, current = [], []
    for ok, pt in zip(inside, pix):
        if ok:
            current.append((float(pt[0]), float(pt[1])))
        elif current:
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    return [r for r in runs if len(r) >= 2]


def _draw_overlays(rgb, g, overlays):
    if overlays is None:
        return rgb
    im = Image.fromarray(rgb, mode="RGB")
    draw = ImageDraw.Draw(im)
    limit = 4 * max(g.width, g.height)
    for pts, color in overlays.polylines:
        pix = g.to_pixel(pts)
        # large jumps come from points near the projection pole; do not connect them
        for run in _visible_runs(pix, limit):
            draw.line(run, fill=color, width=1)
    for x, y in overlays.points:
        c, r = g.to_pixel([x, y])
        draw.ellipse([c - 3, r - 3, c + 3, r + 3], fill=VERTEX_COLOR)
    return np.asarray(im)


def ppm_bytes(rgb):
    """Binary P6 encoding: ``P6\\n<w> <h>\\n255\\n`` then row-major RGB triplets."""
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    h, w, _ = rgb.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.tobytes()


def _rgb(color):
    return "rgb({},{},{})".format(*color)


def _num(v):
    return format(float(v), ".10g")


def svg_document(img, overlays=None):
    """Standalone SVG 1.1 text: the region raster as an embedded PNG, one
    ``path`` per polyline and one ``circle`` per marked point. World
    coordinates are used throughout; the y axis is flipped by a group transform."""
    g = img.grid
    buf = io.BytesIO()
    Image.fromarray(img.rgb(), mode="RGB").save(buf, format="PNG", optimize=False)
    png = base64.b64encode(buf.getvalue()).decode("ascii")
    wx, wy = g.x_max - g.x_min, g.y_max - g.y_min
    legend = {
        "codes": {str(int(k)): {"meaning": REGION_LEGEND[k], "rgb": list(PALETTE[k])} for k in RegionCode},
        "vertex_marker_rgb": list(VERTEX_COLOR),
        "window": [g.x_min, g.x_max, g.y_min, g.y_max],
    }
    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" version="1.1" '
        f'width="{g.width}" height="{g.height}" viewBox="{_num(g.x_min)} {_num(-g.y_max)} {_num(wx)} {_num(wy)}">',
        f"<metadata>{escape(json.dumps(legend, sort_keys=True))}</metadata>",
        f'<image x="{_num(g.x_min)}" y="{_num(-g.y_max)}" width="{_num(wx)}" height="{_num(wy)}" '
        f'preserveAspectRatio="none" style="image-rendering:pixelated" xlink:href="data:image/png;base64,{png}"/>',
        '<g transform="scale(1,-1)">',
    ]
    if overlays is not None:
        limit = 4 * max(wx, wy) + max(abs(g.x_min), abs(g.x_max), abs(g.y_min), abs(g.y_max))
        for pts, color in overlays.polylines:
            for run in _visible_runs(np.asarray(pts, dtype=float), limit):
                d = "M " + " L ".join(f"{_num(x)} {_num(y)}" for x, y in run)
                lines.append(
                    f'<path d="{d}" fill="none" stroke="{_rgb(color)}" stroke-width="1.5" '
                    'vector-effect="non-scaling-stroke"/>'
                )
        r = 3 * max(g.dx, g.dy)
        for x, y in overlays.points:
            lines.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{_num(r)}" fill="{_rgb(VERTEX_COLOR)}"/>')
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)


def write_image(img, path, fmt="ppm", overlays=None):
    """Write ``img`` (plus overlays) as binary PPM or SVG.

    Raises
    ------
    IoFailure
        If the file cannot be written.
    """
    fmt = fmt.lower()
    if fmt in ("ppm", "raster"):
        data = ppm_bytes(_draw_overlays(img.rgb(), img.grid, overlays))
    elif fmt in ("svg", "vector"):
        data = svg_document(img, overlays).encode("utf-8")
    else:
        raise InputError(f"unknown image format {fmt!r}")
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
