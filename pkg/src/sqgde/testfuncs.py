"""Box-bounded synthetic test functions for fixed-budget benchmarking.

Ten zero-normalized base landscapes (each evaluates to 0 at its canonical
optimum) are turned into concrete instances by shifting the optimum,
applying a random orthogonal rotation, adding a bias, and optionally
multiplying the zero-normalized value by Gaussian noise. Weighted Gaussian
mixtures of several transformed bases give multimodal hybrid compositions.
All instance data is generated from an explicit seed, so a descriptor plus
a seed fully reproduces the function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .core import RngStream, SearchSpace, derive_seed, make_rng

__all__ = [
    "BaseFunction",
    "BASE_FUNCTIONS",
    "base_eval",
    "random_rotation",
    "Transform",
    "SingleBody",
    "CompositionComponent",
    "Composition",
    "composition_weights",
    "compose_eval",
    "TestFunction",
    "custom_function",
    "NOISE_MULT_GAUSSIAN",
    "ComponentDescriptor",
    "FunctionDescriptor",
    "make_test_function",
    "default_suite",
    "suite_by_label",
    "save_suite",
    "load_suite",
]

NOISE_MULT_GAUSSIAN = "multiplicative_gaussian"


def _sphere(z: np.ndarray) -> float:
    return float(np.sum(z * z))


def _schwefel12(z: np.ndarray) -> float:
    c = np.cumsum(z)
    return float(np.sum(c * c))


def _elliptic(z: np.ndarray) -> float:
    d = z.size
    if d == 1:
        return float(z[0] * z[0])
    weights = np.power(1e6, np.arange(d) / (d - 1))
    return float(np.sum(weights * z * z))


def _rosenbrock(z: np.ndarray) -> float:
    return float(np.sum(100.0 * (z[:-1] ** 2 - z[1:]) ** 2 + (z[:-1] - 1.0) ** 2))


def _rastrigin(z: np.ndarray) -> float:
    return float(10.0 * z.size + np.sum(z * z - 10.0 * np.cos(2.0 * np.pi * z)))


def _ackley(z: np.ndarray) -> float:
    d = z.size
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(np.sum(z * z) / d))
        - np.exp(np.sum(np.cos(2.0 * np.pi * z)) / d)
        + 20.0
        + np.e
    )


def _griewank(z: np.ndarray) -> float:
    i = np.arange(1, z.size + 1, dtype=float)
    return float(np.sum(z * z) / 4000.0 - np.prod(np.cos(z / np.sqrt(i))) + 1.0)


_W_A = 0.5
_W_B = 3.0
_W_KMAX = 20


def _weierstrass(z: np.ndarray) -> float:
    k = np.arange(_W_KMAX + 1)
    ak = _W_A ** k
    bk = _W_B ** k
    total = float(np.sum(ak * np.cos(2.0 * np.pi * np.outer(z + 0.5, bk))))
    # Constant term places the global minimum value exactly at 0.
    floor = float(z.size * np.sum(ak * np.cos(np.pi * bk)))
    return total - floor


def _rosenbrock2(u: float, v: float) -> float:
    return 100.0 * (u * u - v) ** 2 + (u - 1.0) ** 2


def _griewank1(u: float) -> float:
    return u * u / 4000.0 - np.cos(u) + 1.0


def _griewank_rosenbrock(z: np.ndarray) -> float:
    # Cyclic pairwise expansion, including the wrap-around pair (z_D, z_1).
    total = 0.0
    for i in range(z.size):
        total += _griewank1(_rosenbrock2(z[i], z[(i + 1) % z.size]))
    return float(total)


def _schaffer_f6_pair(u: float, v: float) -> float:
    s = u * u + v * v
    return 0.5 + (np.sin(np.sqrt(s)) ** 2 - 0.5) / (1.0 + 0.001 * s) ** 2


def _schaffer_f6(z: np.ndarray) -> float:
    total = 0.0
    for i in range(z.size):
        total += _schaffer_f6_pair(z[i], z[(i + 1) % z.size])
    return float(total)


@dataclass(frozen=True)
class BaseFunction:
    """A zero-normalized base landscape.

    ``optimum_offset`` gives the canonical optimum position as offset * ones
    (0 for most bases, 1 for the Rosenbrock family). ``half_range`` is the
    conventional domain half-width used for default bounds and for scaling
    the base inside compositions.
    """

    name: str
    fn: Callable[[np.ndarray], float]
    half_range: float
    optimum_offset: float = 0.0
    min_dim: int = 1


BASE_FUNCTIONS: dict[str, BaseFunction] = {
    "sphere": BaseFunction("sphere", _sphere, 100.0),
    "schwefel12": BaseFunction("schwefel12", _schwefel12, 100.0),
    "elliptic": BaseFunction("elliptic", _elliptic, 100.0),
    "rosenbrock": BaseFunction("rosenbrock", _rosenbrock, 100.0, optimum_offset=1.0, min_dim=2),
    "rastrigin": BaseFunction("rastrigin", _rastrigin, 5.0),
    "ackley": BaseFunction("ackley", _ackley, 32.0),
    "griewank": BaseFunction("griewank", _griewank, 600.0),
    "weierstrass": BaseFunction("weierstrass", _weierstrass, 0.5),
    "griewank_rosenbrock": BaseFunction(
        "griewank_rosenbrock", _griewank_rosenbrock, 5.0, optimum_offset=1.0, min_dim=2
    ),
    "schaffer_f6": BaseFunction("schaffer_f6", _schaffer_f6, 100.0, min_dim=2),
}


def base_eval(kind: str, z) -> float:
    """Evaluate a base landscape at canonical coordinates."""
    if kind not in BASE_FUNCTIONS:
        raise ValueError(f"unknown base function kind: {kind!r}")
    base = BASE_FUNCTIONS[kind]
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size < base.min_dim:
        raise ValueError(f"{kind} needs a 1-d point with at least {base.min_dim} components")
    return base.fn(z)


def random_rotation(dim: int, rng: RngStream) -> np.ndarray:
    """Random orthogonal matrix, uniform over the orthogonal group.

    QR of a standard normal matrix with the sign of R's diagonal folded into
    Q. Columns are orthonormal to machine precision.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    a = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


@dataclass(frozen=True)
class Transform:
    """Shift and optional rotation mapping a point to canonical coordinates."""

    shift: np.ndarray
    rotation: np.ndarray | None = None
    bias: float = 0.0

    def apply(self, x: np.ndarray) -> np.ndarray:
        z = x - self.shift
        if self.rotation is not None:
            z = self.rotation @ z
        return z


@dataclass(frozen=True)
class SingleBody:
    kind: str
    transform: Transform

    def value(self, x: np.ndarray) -> float:
        base = BASE_FUNCTIONS[self.kind]
        z = self.transform.apply(x)
        if base.optimum_offset != 0.0:
            z = z + base.optimum_offset
        return base.fn(z)


@dataclass(frozen=True)
class CompositionComponent:
    kind: str
    transform: Transform
    sigma: float = 1.0
    lam: float = 1.0

    def value(self, x: np.ndarray) -> float:
        base = BASE_FUNCTIONS[self.kind]
        z = (x - self.transform.shift) / self.lam
        if self.transform.rotation is not None:
            z = self.transform.rotation @ z
        if base.optimum_offset != 0.0:
            z = z + base.optimum_offset
        return base.fn(z)


@dataclass(frozen=True)
class Composition:
    """Gaussian-weighted mixture of transformed base landscapes."""

    components: tuple[CompositionComponent, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) < 2:
            raise ValueError("a composition needs at least 2 components")
        for c in self.components:
            if c.sigma <= 0 or c.lam <= 0:
                raise ValueError("component sigma and lambda must be positive")


def composition_weights(comp: Composition, x: np.ndarray) -> np.ndarray:
    """Normalized Gaussian mixture weights based on distance to each shift.

    If every unnormalized weight underflows to zero, the nearest component
    takes weight 1.
    """
    x = np.asarray(x, dtype=float)
    d = x.size
    sq_dists = np.array([float(np.sum((x - c.transform.shift) ** 2)) for c in comp.components])
    sigmas = np.array([c.sigma for c in comp.components])
    w = np.exp(-sq_dists / (2.0 * d * sigmas ** 2))
    total = w.sum()
    if total <= 0.0:
        w = np.zeros(len(comp.components))
        w[int(np.argmin(sq_dists))] = 1.0
        return w
    return w / total


def compose_eval(comp: Composition, x: np.ndarray) -> float:
    """Mixture value: sum_i w_i(x) * (component_i value + component_i bias)."""
    w = composition_weights(comp, x)
    vals = np.array([c.value(x) + c.transform.bias for c in comp.components])
    return float(np.dot(w, vals))


@dataclass(frozen=True)
class TestFunction:
    """A concrete box-bounded objective, evaluated as ``fn(x, rng)``.

    ``noise`` multiplies the zero-normalized value by (1 + 0.4 |N(0, 1)|)
    before the bias is added, so noisy values never fall below the noiseless
    ones and the optimum value is preserved in the noise-free limit.
    """

    label: str
    space: SearchSpace
    body: SingleBody | Composition | Callable[[np.ndarray], float]
    noise: str | None = None

    def __call__(self, x, rng: RngStream | None = None) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.space.dim,):
            raise ValueError(f"expected a point of dimension {self.space.dim}")
        bias = 0.0
        if isinstance(self.body, SingleBody):
            raw = self.body.value(x)
            bias = self.body.transform.bias
        elif isinstance(self.body, Composition):
            raw = compose_eval(self.body, x)
        else:
            raw = float(self.body(x))
        if self.noise is not None:
            if self.noise != NOISE_MULT_GAUSSIAN:
                raise ValueError(f"unknown noise model: {self.noise!r}")
            if rng is None:
                raise ValueError("a noisy function needs an rng stream")
            raw *= 1.0 + 0.4 * abs(rng.standard_normal())
        return raw + bias


def custom_function(label: str, space: SearchSpace, fn: Callable[[np.ndarray], float]) -> TestFunction:
    """Wrap an arbitrary callable so it can be used wherever a TestFunction is."""
    return TestFunction(label=label, space=space, body=fn)


@dataclass
class ComponentDescriptor:
    """One composition entry; lam defaults to box half-range / base half-range."""

    kind: str
    sigma: float = 1.0
    lam: float | None = None
    bias: float = 0.0

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "sigma": self.sigma, "bias": self.bias}
        if self.lam is not None:
            d["lambda"] = self.lam
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ComponentDescriptor":
        return cls(
            kind=d["kind"],
            sigma=float(d.get("sigma", 1.0)),
            lam=float(d["lambda"]) if "lambda" in d and d["lambda"] is not None else None,
            bias=float(d.get("bias", 0.0)),
        )


@dataclass
class FunctionDescriptor:
    """JSON-compatible recipe for a reproducible function instance.

    Exactly one of ``kind`` (single base) or ``composition`` must be given.
    ``dim`` and ``seed`` may be left unset and supplied at build time.
    """

    label: str
    kind: str | None = None
    composition: list[ComponentDescriptor] | None = None
    dim: int | None = None
    bounds: tuple[float, float] | None = None
    shifted: bool = True
    rotated: bool = False
    noisy: bool = False
    optimum_on_bounds: bool = False
    bias: float = 0.0
    category: str = "uncategorized"
    seed: int | None = None

    def to_dict(self) -> dict:
        d: dict = {"label": self.label}
        if self.kind is not None:
            d["kind"] = self.kind
        if self.composition is not None:
            d["composition"] = [c.to_dict() for c in self.composition]
        if self.dim is not None:
            d["dim"] = self.dim
        if self.bounds is not None:
            d["bounds"] = [self.bounds[0], self.bounds[1]]
        d.update(
            shifted=self.shifted,
            rotated=self.rotated,
            noisy=self.noisy,
            optimum_on_bounds=self.optimum_on_bounds,
            bias=self.bias,
            category=self.category,
        )
        if self.seed is not None:
            d["seed"] = self.seed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionDescriptor":
        comp = d.get("composition")
        return cls(
            label=d["label"],
            kind=d.get("kind"),
            composition=[ComponentDescriptor.from_dict(c) for c in comp] if comp else None,
            dim=int(d["dim"]) if d.get("dim") is not None else None,
            bounds=tuple(float(b) for b in d["bounds"]) if d.get("bounds") else None,
            shifted=bool(d.get("shifted", True)),
            rotated=bool(d.get("rotated", False)),
            noisy=bool(d.get("noisy", False)),
            optimum_on_bounds=bool(d.get("optimum_on_bounds", False)),
            bias=float(d.get("bias", 0.0)),
            category=str(d.get("category", "uncategorized")),
            seed=int(d["seed"]) if d.get("seed") is not None else None,
        )


def _sample_shift(space: SearchSpace, rng: RngStream, shifted: bool, on_bounds: bool) -> np.ndarray:
    if not shifted:
        return np.zeros(space.dim)
    o = space.sample_uniform(rng)
    if on_bounds:
        # Pin alternating components to a bound so part of the optimum sits
        # exactly on the box edge; the rest stays interior.
        idx = np.arange(1, space.dim, 2) if space.dim > 1 else np.array([0])
        for i in idx:
            o[i] = space.lower[i] if rng.random() < 0.5 else space.upper[i]
    return o


def make_test_function(
    desc: FunctionDescriptor, seed: int | None = None, dim: int | None = None
) -> TestFunction:
    """Build the concrete function instance a descriptor describes.

    The same (descriptor, seed, dim) always produces the same shifts and
    rotations. ``seed`` and ``dim`` fall back to the descriptor's fields.
    """
    if seed is None:
        seed = desc.seed
    if seed is None:
        raise ValueError(f"{desc.label}: no seed in descriptor and none supplied")
    if dim is None:
        dim = desc.dim
    if dim is None or dim < 1:
        raise ValueError(f"{desc.label}: a positive dimension is required")

    single = desc.kind is not None
    if single == (desc.composition is not None):
        raise ValueError(f"{desc.label}: exactly one of kind or composition must be set")

    if single:
        if desc.kind not in BASE_FUNCTIONS:
            raise ValueError(f"{desc.label}: unknown base function kind {desc.kind!r}")
        base = BASE_FUNCTIONS[desc.kind]
        if dim < base.min_dim:
            raise ValueError(f"{desc.label}: {desc.kind} needs dim >= {base.min_dim}")
        lo, hi = desc.bounds if desc.bounds is not None else (-base.half_range, base.half_range)
    else:
        for c in desc.composition:
            if c.kind not in BASE_FUNCTIONS:
                raise ValueError(f"{desc.label}: unknown base function kind {c.kind!r}")
        lo, hi = desc.bounds if desc.bounds is not None else (-5.0, 5.0)
    space = SearchSpace(dim, np.full(dim, float(lo)), np.full(dim, float(hi)))
    half_width = float(hi - lo) / 2.0

    rng = make_rng(seed)
    if single:
        shift = _sample_shift(space, rng, desc.shifted, desc.optimum_on_bounds)
        rotation = random_rotation(dim, rng) if desc.rotated else None
        body: SingleBody | Composition = SingleBody(desc.kind, Transform(shift, rotation, desc.bias))
    else:
        comps = []
        for c in desc.composition:
            base = BASE_FUNCTIONS[c.kind]
            if dim < base.min_dim:
                raise ValueError(f"{desc.label}: {c.kind} needs dim >= {base.min_dim}")
            lam = c.lam if c.lam is not None else half_width / base.half_range
            shift = _sample_shift(space, rng, desc.shifted, False)
            rotation = random_rotation(dim, rng) if desc.rotated else None
            comps.append(CompositionComponent(c.kind, Transform(shift, rotation, c.bias), c.sigma, lam))
        body = Composition(tuple(comps))

    return TestFunction(
        label=desc.label,
        space=space,
        body=body,
        noise=NOISE_MULT_GAUSSIAN if desc.noisy else None,
    )


_SUITE_SEED = 101

_STANDARD_MIX = ("rastrigin", "weierstrass", "griewank", "ackley", "sphere")
_EXPANDED_MIX = ("griewank_rosenbrock", "schaffer_f6", "ackley", "rastrigin", "sphere")


def _mix(kinds, sigmas=None) -> list[ComponentDescriptor]:
    sigmas = sigmas or [1.0] * len(kinds)
    return [ComponentDescriptor(kind=k, sigma=s) for k, s in zip(kinds, sigmas)]


def default_suite() -> list[FunctionDescriptor]:
    """Benchmark suite spanning four difficulty categories.

    Unimodal, basic multimodal, expanded multimodal, and hybrid composition
    functions, with shift/rotation/noise/boundary-optimum variations. Seeds
    are fixed per label so instances are stable across runs.
    """
    entries: list[tuple[str, dict]] = [
        ("shifted_sphere", dict(kind="sphere", category="unimodal")),
        ("shifted_schwefel12", dict(kind="schwefel12", category="unimodal")),
        ("shifted_rotated_elliptic", dict(kind="elliptic", rotated=True, category="unimodal")),
        ("shifted_schwefel12_noisy", dict(kind="schwefel12", noisy=True, category="unimodal")),
        ("shifted_rosenbrock", dict(kind="rosenbrock", category="multimodal_basic")),
        ("shifted_rotated_griewank", dict(kind="griewank", rotated=True, category="multimodal_basic")),
        (
            "shifted_rotated_ackley_bounds",
            dict(kind="ackley", rotated=True, optimum_on_bounds=True, category="multimodal_basic"),
        ),
        ("shifted_rastrigin", dict(kind="rastrigin", category="multimodal_basic")),
        ("shifted_rotated_rastrigin", dict(kind="rastrigin", rotated=True, category="multimodal_basic")),
        ("shifted_rotated_weierstrass", dict(kind="weierstrass", rotated=True, category="multimodal_basic")),
        (
            "shifted_griewank_rosenbrock",
            dict(kind="griewank_rosenbrock", category="multimodal_expanded"),
        ),
        (
            "shifted_rotated_schaffer_f6",
            dict(kind="schaffer_f6", rotated=True, category="multimodal_expanded"),
        ),
        ("hybrid_basic", dict(composition=_mix(_STANDARD_MIX), category="multimodal_hybrid")),
        (
            "hybrid_rotated",
            dict(composition=_mix(_STANDARD_MIX), rotated=True, category="multimodal_hybrid"),
        ),
        (
            "hybrid_rotated_noisy",
            dict(composition=_mix(_STANDARD_MIX), rotated=True, noisy=True, category="multimodal_hybrid"),
        ),
        (
            "hybrid_rotated_narrow",
            dict(
                composition=_mix(_STANDARD_MIX, sigmas=[0.1, 1.0, 1.0, 1.0, 2.0]),
                rotated=True,
                category="multimodal_hybrid",
            ),
        ),
        (
            "hybrid_rotated_mixed",
            dict(composition=_mix(_EXPANDED_MIX), rotated=True, category="multimodal_hybrid"),
        ),
    ]
    suite = []
    for label, kwargs in entries:
        suite.append(FunctionDescriptor(label=label, seed=derive_seed(_SUITE_SEED, label), **kwargs))
    return suite


def suite_by_label(suite: list[FunctionDescriptor] | None = None) -> dict[str, FunctionDescriptor]:
    suite = suite if suite is not None else default_suite()
    return {d.label: d for d in suite}


def save_suite(path: str | Path, suite: list[FunctionDescriptor]) -> None:
    payload = {"functions": [d.to_dict() for d in suite]}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_suite(path: str | Path) -> list[FunctionDescriptor]:
    payload = json.loads(Path(path).read_text())
    return [FunctionDescriptor.from_dict(d) for d in payload["functions"]]
