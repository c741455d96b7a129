"""Real potentials on the line: an integrable density plus finitely many Dirac atoms."""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError, ValidationError

DEFAULT_X_MIN = -40.0
DEFAULT_X_MAX = 40.0
DEFAULT_N_POINTS = 4096


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform truncation of the real line."""

    x_min: float = DEFAULT_X_MIN
    x_max: float = DEFAULT_X_MAX
    n_points: int = DEFAULT_N_POINTS

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise ValidationError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise ValidationError(f"x_min={self.x_min} must be < x_max={self.x_max}")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise ValidationError(f"n_points must be an integer >= 16, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def weights(self) -> np.ndarray:
        """Composite trapezoid weights."""
        w = np.full(self.n_points, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    def contains(self, x) -> bool:
        return bool(self.x_min <= x <= self.x_max)

    def integrate(self, values) -> complex:
        return np.dot(self.weights, values)


def default_grid() -> SpatialGrid:
    return SpatialGrid()


@dataclass(frozen=True)
class Potential:
    """``V = density(x) dx + sum_a mass_a * delta(x - loc_a)``.

    ``density`` is a vectorised real callable or ``None`` for a purely atomic
    (or zero) potential.  ``breakpoints`` lists jump discontinuities of the
    density; solvers align their steps with them.
    """

    density: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    atoms: tuple = ()
    label: str = "V"
    breakpoints: tuple = ()
    params: tuple = ()

    def __post_init__(self):
        atoms = tuple((float(a), float(m)) for a, m in self.atoms)
        for a, m in atoms:
            if not (np.isfinite(a) and np.isfinite(m)):
                raise ValidationError(f"atom ({a}, {m}) is not finite")
        object.__setattr__(self, "atoms", tuple(sorted(atoms)))
        object.__setattr__(self, "breakpoints", tuple(sorted(float(b) for b in self.breakpoints)))

    def density_values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.density is None:
            return np.zeros_like(x)
        v = np.asarray(self.density(x), dtype=float)
        if np.iscomplexobj(v):
            raise ValidationError("potential density must be real-valued")
        return np.broadcast_to(v, x.shape).astype(float)

    __call__ = density_values

    @property
    def has_density(self) -> bool:
        return self.density is not None

    @property
    def atom_locations(self) -> np.ndarray:
        return np.array([a for a, _ in self.atoms], dtype=float)

    @property
    def atom_masses(self) -> np.ndarray:
        return np.array([m for _, m in self.atoms], dtype=float)

    @property
    def is_zero(self) -> bool:
        return self.density is None and not self.atoms

    def scaled(self, c: float) -> "Potential":
        dens = None if self.density is None else (lambda x, f=self.density: c * f(x))
        return Potential(
            density=dens,
            atoms=tuple((a, c * m) for a, m in self.atoms),
            label=f"{c:g}*{self.label}",
            breakpoints=self.breakpoints,
        )

    def support_indices(self, grid: SpatialGrid, threshold: float = 1e-12):
        """Index range ``[lo, hi]`` of grid points where ``|density| > threshold``.

        Returns ``None`` when the density vanishes on the grid.
        """
        if self.density is None:
            return None
        v = np.abs(self.density_values(grid.x))
        idx = np.nonzero(v > threshold)[0]
        if idx.size == 0:
            return None
        return int(idx[0]), int(idx[-1])

    def edge_magnitude(self, grid: SpatialGrid) -> float:
        v = self.density_values(np.array([grid.x_min, grid.x_max]))
        return float(np.max(np.abs(v)))


@dataclass(frozen=True)
class PotentialNorms:
    l1: float
    l2: float
    l1_weighted2: float
    in_L1capL2: bool
    in_M2: bool
    l2_applicable: bool = True


def norms(V: Potential, grid: Optional[SpatialGrid] = None, *, tail_tol: float = 1e-8) -> PotentialNorms:
    """Trapezoid estimates of the L1, L2 (density only) and weighted-L1 norms.

    The class flags additionally require the density to have decayed below
    ``tail_tol`` (weighted by ``1 + x^2`` for the weighted class) at both
    ends of the truncation, so a slowly decaying density is not certified
    from a window that cuts off its tail.
    """
    grid = grid or default_grid()
    for a, _ in V.atoms:
        if not grid.contains(a):
            raise ValidationError(f"atom at {a} lies outside [{grid.x_min}, {grid.x_max}]")
    x = grid.x
    v = np.abs(V.density_values(x))
    masses = np.abs(V.atom_masses)
    locs = V.atom_locations
    l1 = float(grid.integrate(v) + masses.sum())
    l2 = float(np.sqrt(grid.integrate(v * v)))
    l1w = float(grid.integrate((1.0 + x * x) * v) + np.sum((1.0 + locs**2) * masses))
    edge = V.edge_magnitude(grid)
    edge_w = edge * (1.0 + max(grid.x_min**2, grid.x_max**2))
    finite = all(np.isfinite([l1, l2, l1w]))
    return PotentialNorms(
        l1=l1,
        l2=l2,
        l1_weighted2=l1w,
        in_L1capL2=bool(finite and not V.atoms and edge <= tail_tol),
        in_M2=bool(finite and edge_w <= tail_tol),
        l2_applicable=not V.atoms,
    )


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------


def _check_params(name, params, n_min, n_max):
    params = tuple(float(p) for p in params)
    if not (n_min <= len(params) <= n_max):
        raise ValidationError(f"{name} takes {n_min}..{n_max} parameters, got {len(params)}")
    if not all(np.isfinite(params)):
        raise ValidationError(f"{name} parameters must be finite: {params}")
    return params


def poschl_teller(strength: float = 6.0) -> Potential:
    """``-strength * sech^2(x)``."""
    s = float(strength)

    def density(x):
        # sech^2 = 4 e^{-2|x|} / (1 + e^{-2|x|})^2 avoids cosh overflow
        e = np.exp(-2.0 * np.abs(x))
        return -4.0 * s * e / (1.0 + e) ** 2

    return Potential(
        density=density,
        label=f"poschl_teller({s:g})",
        params=(s,),
    )


def dirac(b: float = 1.0, location: float = 0.0) -> Potential:
    """``2 b delta(x - location)``."""
    return Potential(atoms=((location, 2.0 * b),), label=f"dirac({b:g})", params=(b, location))


def gaussian_bump(amplitude: float = 1.0, width: float = 1.0, center: float = 0.0) -> Potential:
    if width <= 0:
        raise ValidationError("gaussian_bump width must be positive")
    a, w, c = float(amplitude), float(width), float(center)
    return Potential(
        density=lambda x: a * np.exp(-0.5 * ((x - c) / w) ** 2),
        label=f"gaussian_bump({a:g},{w:g},{c:g})",
        params=(a, w, c),
    )


def square_well(depth: float = 1.0, half_width: float = 1.0) -> Potential:
    """``-depth`` on ``|x| < half_width``, zero outside."""
    if half_width <= 0:
        raise ValidationError("square_well half_width must be positive")
    d, a = float(depth), float(half_width)
    return Potential(
        density=lambda x: np.where(np.abs(x) < a, -d, 0.0),
        label=f"square_well({d:g},{a:g})",
        breakpoints=(-a, a),
        params=(d, a),
    )


def zero() -> Potential:
    return Potential(label="zero")


_BUILTINS = {
    "poschl_teller": (poschl_teller, 0, 1),
    "dirac": (dirac, 0, 2),
    "gaussian_bump": (gaussian_bump, 0, 3),
    "square_well": (square_well, 0, 2),
    "zero": (zero, 0, 0),
}

BUILTIN_NAMES = tuple(_BUILTINS)


def make_builtin(name: str, params: Sequence[float] = (), grid: Optional[SpatialGrid] = None) -> Potential:
    """Construct a named closed-form potential.

    ``grid`` is only used to check that atoms fall inside the truncation.
    """
    try:
        factory, n_min, n_max = _BUILTINS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown potential {name!r}; expected one of {', '.join(BUILTIN_NAMES)}"
        ) from None
    params = _check_params(name, params, n_min, n_max)
    V = factory(*params)
    if grid is not None:
        for a, _ in V.atoms:
            if not grid.contains(a):
                raise ValidationError(f"atom at {a} outside the grid")
    return V


def from_samples(x, v, *, atoms=(), label="samples") -> Potential:
    """Density from a sample table, cubic-spline interpolated, zero outside the table."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.shape != v.shape or x.size < 2:
        raise ValidationError("samples need matching 1-D x and v arrays with >= 2 entries")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
        raise ValidationError("samples must be finite")
    if np.any(np.diff(x) <= 0):
        raise ValidationError("sample abscissae must be strictly increasing")
    spline = CubicSpline(x, v)
    lo, hi = x[0], x[-1]

    def density(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        inside = (t >= lo) & (t <= hi)
        out[inside] = spline(t[inside])
        return out

    return Potential(density=density, atoms=tuple(atoms), label=label)


def random_bumps(seed: int, n_bumps: Optional[int] = None) -> Potential:
    """Sum of 1-3 gaussian bumps with seeded random amplitude, width and center."""
    rng = np.random.default_rng(seed)
    n = int(n_bumps or rng.integers(1, 4))
    amp = rng.uniform(-3.0, 3.0, n)
    width = rng.uniform(0.5, 2.0, n)
    center = rng.uniform(-4.0, 4.0, n)

    def density(x):
        x = np.asarray(x, dtype=float)[..., None]
        return np.sum(amp * np.exp(-0.5 * ((x - center) / width) ** 2), axis=-1)

    return Potential(density=density, label=f"random_bumps(seed={seed})", params=(seed,))


def from_spec(spec: dict, grid: Optional[SpatialGrid] = None) -> Potential:
    """Build a potential from the key/value schema used by the CLI.

    Accepted keys: ``name`` + ``params``; or ``samples`` = ``{"x": [...], "v": [...]}``;
    optional ``atoms`` = ``[[loc, mass], ...]`` added to either.
    """
    if not isinstance(spec, dict):
        raise ConfigurationError("potential spec must be a mapping")
    unknown = set(spec) - {"name", "params", "samples", "atoms", "label"}
    if unknown:
        raise ConfigurationError(f"unknown potential keys: {sorted(unknown)}")
    atoms = spec.get("atoms", [])
    try:
        atoms = tuple((float(a), float(m)) for a, m in atoms)
    except (TypeError, ValueError):
        raise ConfigurationError("atoms must be a list of [location, mass] pairs") from None
    if "samples" in spec:
        if "name" in spec:
            raise ConfigurationError("give either 'name' or 'samples', not both")
        s = spec["samples"]
        if not isinstance(s, dict) or "x" not in s or "v" not in s:
            raise ConfigurationError("samples must be {'x': [...], 'v': [...]}")
        V = from_samples(s["x"], s["v"], atoms=atoms, label=spec.get("label", "samples"))
    elif "name" in spec:
        V = make_builtin(spec["name"], spec.get("params", []), grid)
        if atoms:
            V = Potential(
                density=V.density,
                atoms=V.atoms + atoms,
                label=spec.get("label", V.label),
                breakpoints=V.breakpoints,
                params=V.params,
            )
    else:
        raise ConfigurationError("potential spec needs 'name' or 'samples'")
    if grid is not None:
        for a, _ in V.atoms:
            if not grid.contains(a):
                raise ValidationError(f"atom at {a} outside the grid")
    return V
