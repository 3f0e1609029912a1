import json
import math
from pathlib import Path

import numpy as np

CAP_ANGLES = (0.5 * math.pi, 2 * math.pi / 3, 3 * math.pi / 4, 5 * math.pi / 6)

# (alpha, theta) pairs with theta > pi/2 + alpha, so the bridge clears the edge
BRIDGE_GRID = tuple(
    (alpha, 0.5 * math.pi + alpha + f * (0.5 * math.pi - alpha))
    for alpha in (0.2, 0.4, 0.6, 0.8, 1.0)
    for f in (0.1, 0.3, 0.5, 0.7, 0.9)
)

example_cap_config = {
    "command": "cap-stability",
    "surface": {"kind": "cap_halfspace", "R": 1, "theta": 1.5707963},
}

example_cube_config = {
    "command": "convex-check",
    "body": {"kind": "cube", "side": 1},
}

example_sweep_config = {
    "command": "sweep",
    "surface": {
        "kind": "bridge_wedge",
        "R": 1,
        "alpha": 0.5236,
        "theta": [2.1, 3.0],
        "steps": 10,
    },
}


def write_config(directory: Path, data: dict, name: str = "config.json") -> Path:
    """Write a config dict as JSON and return its path"""
    path = directory / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def rotation(seed: int, dim: int = 3) -> np.ndarray:
    """Random orthogonal matrix from the QR factors of a Gaussian matrix"""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


def shoelace(points: np.ndarray) -> float:
    """Area of a polygon given by its vertices in order"""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
