"""Run configuration: a single strict JSON document.

Unknown keys are rejected everywhere (fail-fast reproducibility).  See
README.md for the schema; ``load_config`` returns a validated
:class:`RunConfig` ready for the experiment drivers.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import preset, validate_unitary
from .errors import ConfigError, UlapError
from .manifold import build_manifold

EXPERIMENTS = ("solve", "converge", "condition", "stability", "symmetry")

_TOP_KEYS = {
    "experiment",
    "manifold",
    "boundary",
    "resolution",
    "eigenpairs",
    "oracle",
    "stability",
    "symmetry",
    "output",
    "tolerances",
}
_MANIFOLD_KEYS = {"intervals", "metric"}
_BOUNDARY_KEYS = {"preset", "beta", "pairing", "alpha", "theta", "matrix_re", "matrix_im", "n"}
_ORACLE_KEYS = {"family", "epsilon", "c", "theta"}
_STABILITY_KEYS = {"direction_re", "direction_im", "epsilons"}
_SYMMETRY_KEYS = {"generators"}
_OUTPUT_KEYS = {"prefix", "eigenfunctions"}
_TOLERANCE_KEYS = {"eig"}


def _require_keys(mapping, allowed, where):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _as_matrix(re_part, im_part, where):
    try:
        re = np.asarray(re_part, dtype=np.float64)
        im = np.asarray(im_part if im_part is not None else np.zeros_like(re), dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: not a numeric matrix ({exc})")
    if re.ndim != 2 or re.shape != im.shape:
        raise ConfigError(f"{where}: real/imaginary parts must be equal-shape 2-d arrays")
    return re + 1j * im


@dataclass
class RunConfig:
    """Validated experiment description."""

    experiment: str
    manifold: object
    boundary: object
    resolutions: tuple
    eigenpairs: int
    oracle: dict | None
    stability: dict | None
    symmetry: tuple | None
    prefix: str
    eigenfunctions: tuple = ()
    tol_eig: float = 1e-9
    boundary_spec: dict = field(default_factory=dict)


def _build_boundary(spec):
    _require_keys(spec, _BOUNDARY_KEYS, "boundary")
    if "matrix_re" in spec or "matrix_im" in spec:
        extra = set(spec) - {"matrix_re", "matrix_im"}
        if extra:
            raise ConfigError(f"explicit boundary matrix takes no other keys, got {sorted(extra)}")
        return validate_unitary(_as_matrix(spec.get("matrix_re"), spec.get("matrix_im"), "boundary"))
    if "preset" not in spec:
        raise ConfigError("boundary needs either a preset or an explicit matrix")
    name = spec["preset"]
    kwargs = {}
    if "n" in spec:
        kwargs["n"] = int(spec["n"])
    if "beta" in spec:
        kwargs["beta"] = [float(x) for x in spec["beta"]]
    if "pairing" in spec:
        kwargs["pairing"] = [tuple(int(x) for x in pair) for pair in spec["pairing"]]
    if "alpha" in spec:
        kwargs["alpha"] = float(spec["alpha"])
    if "theta" in spec:
        kwargs["theta"] = float(spec["theta"])
    return preset(name, **kwargs)


def _derive_oracle(cfg_oracle, boundary_spec):
    """Resolve the oracle family, deriving parameters from the boundary
    preset when they are not given explicitly."""
    oracle = dict(cfg_oracle or {})
    _require_keys(oracle, _ORACLE_KEYS, "oracle")
    family = oracle.get("family")
    if family is None:
        name = boundary_spec.get("preset")
        if name in ("dirichlet", "neumann", "periodic"):
            family = name
        elif name == "quasi_periodic":
            family = "quasi_periodic"
        elif name == "robin_local":
            family = "robin_interval"
        else:
            raise ConfigError("oracle family cannot be derived; set oracle.family")
        oracle["family"] = family
    if family == "quasi_periodic" and "epsilon" not in oracle:
        if "alpha" not in boundary_spec:
            raise ConfigError("quasi_periodic oracle needs epsilon (or boundary.alpha)")
        oracle["epsilon"] = float(boundary_spec["alpha"]) / (2.0 * math.pi)
    if family == "robin_interval" and "c" not in oracle:
        if "theta" in oracle:
            oracle["c"] = math.tan(0.5 * float(oracle["theta"]))
        elif "theta" in boundary_spec:
            oracle["c"] = math.tan(0.5 * float(boundary_spec["theta"]))
        else:
            raise ConfigError("robin_interval oracle needs c (or a theta angle)")
    return oracle


def parse_config(doc):
    """Validate a parsed JSON document into a :class:`RunConfig`."""
    _require_keys(doc, _TOP_KEYS, "config")
    experiment = doc.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")

    man_spec = doc.get("manifold")
    _require_keys(man_spec if man_spec is not None else {}, _MANIFOLD_KEYS, "manifold")
    if man_spec is None or "intervals" not in man_spec or "metric" not in man_spec:
        raise ConfigError("manifold needs 'intervals' and 'metric'")
    try:
        manifold = build_manifold(man_spec["intervals"], man_spec["metric"])
    except (UlapError, TypeError, ValueError) as exc:
        raise ConfigError(f"manifold: {exc}")

    bnd_spec = doc.get("boundary")
    if bnd_spec is None:
        raise ConfigError("config needs a boundary section")
    boundary = _build_boundary(bnd_spec)
    if boundary.dim != manifold.n_boundary:
        raise ConfigError(
            f"boundary dimension {boundary.dim} does not match 2n = {manifold.n_boundary}"
        )

    res = doc.get("resolution")
    if res is None:
        raise ConfigError("config needs a resolution (N or list of N)")
    if isinstance(res, (int, float)):
        res = [res]
    try:
        resolutions = tuple(int(x) for x in res)
    except (TypeError, ValueError):
        raise ConfigError(f"resolution must be an integer or list, got {res!r}")
    if any(x != float(y) for x, y in zip(res if isinstance(res, list) else [res], resolutions)):
        raise ConfigError("resolutions must be integers")
    if experiment == "converge" and len(resolutions) < 2:
        raise ConfigError("converge needs a ladder of at least two resolutions")

    eigenpairs = doc.get("eigenpairs", 10)
    if not isinstance(eigenpairs, int) or eigenpairs < 1:
        raise ConfigError(f"eigenpairs must be a positive integer, got {eigenpairs!r}")

    oracle = None
    if experiment == "converge":
        oracle = _derive_oracle(doc.get("oracle"), bnd_spec)

    stability = None
    if experiment == "stability":
        stab = doc.get("stability") or {}
        _require_keys(stab, _STABILITY_KEYS, "stability")
        direction = _as_matrix(
            stab.get("direction_re", [[0.0, 1.0], [-1.0, 0.0]]),
            stab.get("direction_im"),
            "stability.direction",
        )
        if direction.shape != (boundary.dim, boundary.dim):
            raise ConfigError("stability direction must match the boundary dimension")
        epsilons = tuple(float(x) for x in stab.get("epsilons", (1e-4, 1e-3, 1e-2, 1e-1)))
        if any(e < 0 for e in epsilons):
            raise ConfigError("stability epsilons must be nonnegative")
        stability = {"direction": direction, "epsilons": epsilons}

    symmetry = None
    if experiment == "symmetry":
        sym = doc.get("symmetry")
        _require_keys(sym if sym is not None else {}, _SYMMETRY_KEYS, "symmetry")
        if not sym or not sym.get("generators"):
            raise ConfigError("symmetry needs a list of generators")
        gens = []
        for i, g in enumerate(sym["generators"]):
            _require_keys(g, {"re", "im"}, f"symmetry.generators[{i}]")
            gens.append(_as_matrix(g.get("re"), g.get("im"), f"symmetry.generators[{i}]"))
        symmetry = tuple(gens)

    out = doc.get("output") or {}
    _require_keys(out, _OUTPUT_KEYS, "output")
    prefix = out.get("prefix", "ulap_out/run_")
    if not isinstance(prefix, str):
        raise ConfigError("output.prefix must be a string")
    eigenfunctions = tuple(int(i) for i in out.get("eigenfunctions", ()))

    tols = doc.get("tolerances") or {}
    _require_keys(tols, _TOLERANCE_KEYS, "tolerances")
    tol_eig = float(tols.get("eig", 1e-9))

    return RunConfig(
        experiment=experiment,
        manifold=manifold,
        boundary=boundary,
        resolutions=resolutions,
        eigenpairs=eigenpairs,
        oracle=oracle,
        stability=stability,
        symmetry=symmetry,
        prefix=prefix,
        eigenfunctions=eigenfunctions,
        tol_eig=tol_eig,
        boundary_spec=dict(bnd_spec),
    )


def load_config(path):
    """Read and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    return parse_config(doc)
