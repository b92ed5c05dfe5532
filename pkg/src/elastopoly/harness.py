"""Manufactured solutions, reciprocity/representation checks, degree studies.

The study driver sweeps basis degrees against fixed boundary data and records
weighted-L2 and uniform-norm residuals, rank diagnostics, compatibility
defects against the tangential rigid rotations, and interior probe errors
when an exact solution is available.  Kelvin point-source fields with the
pole outside the body are the stock manufactured solutions: they satisfy the
equilibrium equations inside, so their traces are always compatible and the
residual columns exhibit the completeness (or incompleteness) the geometry
dictates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import Material, elastic_basis
from .geometry import (
    SurfaceQuadrature,
    SurfaceSpec,
    Sphere,
    Ellipsoid,
    classify_symmetry,
    make_quadrature,
    radial_function,
    tangential_rotation_fields,
)
from .ioutil import fmt17
from .operators import (
    KelvinField,
    KelvinParams,
    RigidDisplacement,
    kelvin_matrix,
    kelvin_traction,
    traction,
)
from .polyalg import VecPoly3
from .solver import (
    PROBLEM_III,
    PROBLEM_IV,
    BoundaryDataIII,
    BoundaryDataIV,
    compatibility_defect,
    evaluate_solution,
    fit,
    max_misfit,
    pointwise_misfit,
)

PROBE_SEED = 715
N_PROBES = 20
PROBE_DEPTH = 0.5


# -- manufactured data ------------------------------------------------------------


def kelvin_data(
    material: Material,
    quad: SurfaceQuadrature,
    y0,
    row: int,
    problem: str,
) -> tuple[BoundaryDataIII | BoundaryDataIV, KelvinField]:
    """Boundary data of the Kelvin row field with pole y0 outside the surface.

    Returns the data pair for the requested problem together with the field
    itself, which doubles as the closed-form interior evaluator.
    """
    y0 = np.asarray(y0, dtype=float)
    center = np.asarray(quad.spec.center, dtype=float)
    rel = y0 - center
    dist = float(np.linalg.norm(rel))
    if dist == 0.0:
        raise ValueError("Kelvin pole coincides with the surface center (inside the body)")
    r_surface = float(radial_function(quad.spec, rel / dist)[0])
    if dist <= r_surface:
        raise ValueError(
            f"Kelvin pole must lie strictly outside the surface: |y0 - center| = {dist:.6g} "
            f"<= surface radius {r_surface:.6g} in that direction"
        )
    fld = KelvinField(KelvinParams(material), tuple(y0), row)
    u = fld.eval(quad.points)
    t = fld.traction(quad.points, quad.normals)
    nu = quad.normals
    u_n = np.einsum("ni,ni->n", u, nu)
    t_n = np.einsum("ni,ni->n", t, nu)
    if problem == PROBLEM_III:
        return BoundaryDataIII(phi=u_n, Phi=t - t_n[:, None] * nu), fld
    if problem == PROBLEM_IV:
        return BoundaryDataIV(Psi=u - u_n[:, None] * nu, psi=t_n), fld
    raise ValueError(f"problem must be 'III' or 'IV', got {problem!r}")


# -- identity checks --------------------------------------------------------------


def _field_samples(material: Material, obj, quad: SurfaceQuadrature) -> tuple[np.ndarray, np.ndarray]:
    """Displacement and traction samples of a polynomial, rigid or Kelvin field."""
    if isinstance(obj, VecPoly3):
        return obj.eval(quad.points), traction(material, obj, quad.points, quad.normals)
    if isinstance(obj, RigidDisplacement):
        v = obj.as_vecpoly()
        return v.eval(quad.points), traction(material, v, quad.points, quad.normals)
    if isinstance(obj, KelvinField):
        if obj.params.material != material:
            raise ValueError("Kelvin field material differs from the check material")
        return obj.eval(quad.points), obj.traction(quad.points, quad.normals)
    raise TypeError(f"unsupported field type {type(obj).__name__}")


def betti_check(material: Material, u, v, quad: SurfaceQuadrature) -> float:
    """|oint (u . Tv - v . Tu) dsigma| for two equilibrium fields.

    Both volume terms of the reciprocity identity vanish for equilibrium
    fields, so the result is pure quadrature error.
    """
    uu, tu = _field_samples(material, u, quad)
    vv, tv = _field_samples(material, v, quad)
    return float(
        abs(quad.weights @ (np.einsum("ni,ni->n", uu, tv) - np.einsum("ni,ni->n", vv, tu)))
    )


def somigliana_check(
    material: Material, w, quad: SurfaceQuadrature, x, expect: str
) -> np.ndarray:
    """Deviation of the boundary representation integral from its exact value.

    Evaluates oint [w . T_y K_i(x - y) - K_i(x - y) . Tw] dsigma_y and
    subtracts w(x) for expect="interior" or 0 for expect="exterior".  Points
    closer to the surface than three quadrature spacings are rejected; the
    near-singular regime is out of scope.
    """
    if expect not in ("interior", "exterior"):
        raise ValueError(f"expect must be 'interior' or 'exterior', got {expect!r}")
    x = np.asarray(x, dtype=float)
    spacing = np.sqrt(quad.area / quad.n_samples)
    min_dist = float(np.min(np.linalg.norm(quad.points - x, axis=1)))
    if min_dist < 3.0 * spacing:
        raise ValueError(
            f"evaluation point is {min_dist:.3g} from the surface samples, closer than "
            f"3 quadrature spacings ({3.0 * spacing:.3g}); near-singular quadrature unsupported"
        )
    params = KelvinParams(material)
    uu, tu = _field_samples(material, w, quad)
    kernel = kelvin_traction(params, x, quad.points, quad.normals)     # (N, i, j)
    gamma = kelvin_matrix(params, x[None, :] - quad.points)            # (N, i, j)
    integral = np.einsum("n,nij,nj->i", quad.weights, kernel, uu) - np.einsum(
        "n,nij,nj->i", quad.weights, gamma, tu
    )
    target = np.asarray(w.eval(x), dtype=float) if expect == "interior" else np.zeros(3)
    return integral - target


# -- studies ----------------------------------------------------------------------


@dataclass(frozen=True)
class KelvinSource:
    y0: tuple[float, float, float]
    row: int = 1


@dataclass(frozen=True)
class BasisElementSource:
    index: int


@dataclass(frozen=True)
class RotationSource:
    """Pure tangential-rotation data: the incompleteness probe for problem III."""

    index: int = 0


@dataclass(frozen=True)
class CsvSource:
    path: str


DataSource = KelvinSource | BasisElementSource | RotationSource | CsvSource


@dataclass(frozen=True)
class StudyConfig:
    material: Material
    surface: SurfaceSpec
    problem: str
    degrees: tuple[int, ...]
    source: DataSource
    n_theta: int = 32
    n_phi: int = 64
    svd_tol: float = 1e-12
    scalar_weight: float = 1.0

    def __post_init__(self):
        if self.problem not in (PROBLEM_III, PROBLEM_IV):
            raise ValueError(f"problem must be 'III' or 'IV', got {self.problem!r}")
        if not self.degrees:
            raise ValueError("at least one degree is required")


@dataclass(frozen=True)
class StudyRow:
    degree: int
    residual_l2: float
    residual_max: float
    data_norm: float
    kept_rank: int
    defects: tuple[float, float, float]
    probe_err_max: float


@dataclass(frozen=True)
class StudyReport:
    config: StudyConfig
    rows: tuple[StudyRow, ...]
    metadata: dict = field(repr=False)

    def to_csv(self) -> str:
        lines = ["K,residual_l2,residual_max,data_norm,kept_rank,defect_1,defect_2,defect_3,probe_err_max"]
        for r in self.rows:
            lines.append(
                ",".join(
                    [str(r.degree)]
                    + [fmt17(v) for v in (r.residual_l2, r.residual_max, r.data_norm)]
                    + [str(r.kept_rank)]
                    + [fmt17(v) for v in (*r.defects, r.probe_err_max)]
                )
            )
        return "\n".join(lines) + "\n"

    def metadata_json(self) -> str:
        from .ioutil import json_dumps

        return json_dumps(self.metadata) + "\n"


def _surface_dict(spec: SurfaceSpec) -> dict:
    if isinstance(spec, Sphere):
        return {"kind": "sphere", "center": list(spec.center), "radius": spec.radius}
    if isinstance(spec, Ellipsoid):
        return {"kind": "ellipsoid", "center": list(spec.center), "semi_axes": list(spec.semi_axes)}
    return {
        "kind": "star",
        "center": list(spec.center),
        "coeffs": [[k, s, c] for k, s, c in spec.coeffs],
        "axis": list(spec.axis) if spec.axis is not None else None,
    }


def _source_dict(source: DataSource) -> dict:
    if isinstance(source, KelvinSource):
        return {"source": "kelvin", "y0": list(source.y0), "row": source.row}
    if isinstance(source, BasisElementSource):
        return {"source": "basis_element", "index": source.index}
    if isinstance(source, RotationSource):
        return {"source": "rotation", "index": source.index}
    return {"source": "csv", "path": source.path}


def config_metadata(config: StudyConfig) -> dict:
    return {
        "material": {"lambda": config.material.lam, "mu": config.material.mu},
        "surface": _surface_dict(config.surface),
        "problem": config.problem,
        "degrees": list(config.degrees),
        "quadrature": {"n_theta": config.n_theta, "n_phi": config.n_phi},
        "data": _source_dict(config.source),
        "svd_tol": config.svd_tol,
        "scalar_weight": config.scalar_weight,
        "probes": {"count": N_PROBES, "depth": PROBE_DEPTH, "seed": PROBE_SEED},
    }


def probe_points(spec: SurfaceSpec) -> np.ndarray:
    """Fixed interior probes at 50% radial depth (deterministic seed)."""
    rng = np.random.default_rng(PROBE_SEED)
    dirs = rng.normal(size=(N_PROBES, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    r = radial_function(spec, dirs)
    return np.asarray(spec.center, dtype=float) + PROBE_DEPTH * r[:, None] * dirs


def _read_csv_source(path: str, problem: str, n_samples: int):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line[0].isalpha():
                continue
            rows.append([float(v) for v in line.replace(",", " ").split()])
    table = np.asarray(rows, dtype=float)
    if table.shape != (n_samples, 4):
        raise ValueError(
            f"data CSV must have {n_samples} rows of 4 columns "
            f"({'phi Phi_x Phi_y Phi_z' if problem == PROBLEM_III else 'Psi_x Psi_y Psi_z psi'}), "
            f"got shape {table.shape}"
        )
    if problem == PROBLEM_III:
        return BoundaryDataIII(phi=table[:, 0], Phi=table[:, 1:4])
    return BoundaryDataIV(Psi=table[:, 0:3], psi=table[:, 3])


def build_data(config: StudyConfig, quad: SurfaceQuadrature):
    """Boundary data for the study, plus an exact evaluator when one exists."""
    source, problem = config.source, config.problem
    if isinstance(source, KelvinSource):
        return kelvin_data(config.material, quad, source.y0, source.row, problem)
    if isinstance(source, BasisElementSource):
        basis = elastic_basis(config.material, max(config.degrees))
        if not (0 <= source.index < len(basis)):
            raise ValueError(f"basis element index {source.index} out of range 0..{len(basis) - 1}")
        fld = basis.elements[source.index].field
        u = fld.eval(quad.points)
        t = traction(config.material, fld, quad.points, quad.normals)
        nu = quad.normals
        u_n = np.einsum("ni,ni->n", u, nu)
        t_n = np.einsum("ni,ni->n", t, nu)
        if problem == PROBLEM_III:
            return BoundaryDataIII(phi=u_n, Phi=t - t_n[:, None] * nu), fld
        return BoundaryDataIV(Psi=u - u_n[:, None] * nu, psi=t_n), fld
    if isinstance(source, RotationSource):
        gammas = tangential_rotation_fields(classify_symmetry(quad.spec), quad)
        if not gammas:
            raise ValueError("rotation data source requires a sphere or axisymmetric surface")
        if not (0 <= source.index < len(gammas)):
            raise ValueError(f"rotation index {source.index} out of range 0..{len(gammas) - 1}")
        g = gammas[source.index]
        zeros = np.zeros(quad.n_samples)
        if problem == PROBLEM_III:
            return BoundaryDataIII(phi=zeros, Phi=g), None
        return BoundaryDataIV(Psi=g, psi=zeros), None
    if isinstance(source, CsvSource):
        return _read_csv_source(source.path, problem, quad.n_samples), None
    raise TypeError(f"unsupported data source {type(source).__name__}")


def run_study(config: StudyConfig) -> StudyReport:
    """Sweep basis degrees against fixed data; one report row per degree."""
    quad = make_quadrature(config.surface, config.n_theta, config.n_phi)
    data, exact = build_data(config, quad)
    gammas = (
        tangential_rotation_fields(classify_symmetry(config.surface), quad)
        if config.problem == PROBLEM_III
        else []
    )
    probes = probe_points(config.surface)
    exact_at_probes = exact.eval(probes) if exact is not None else None

    rows: list[StudyRow] = []
    for degree in config.degrees:
        basis = elastic_basis(config.material, degree)
        result = fit(
            config.problem,
            data,
            basis,
            quad,
            svd_tol=config.svd_tol,
            scalar_weight=config.scalar_weight,
            rotation_fields=gammas or None,
        )
        ds, dv = pointwise_misfit(config.problem, data, result, basis, quad)
        residual_max = max_misfit(ds, dv, config.scalar_weight)

        defects = [float("nan")] * 3
        if gammas and isinstance(data, BoundaryDataIII):
            for idx, val in enumerate(compatibility_defect(data, gammas, quad)):
                defects[idx] = val

        probe_err = float("nan")
        if exact_at_probes is not None:
            fitted, _ = evaluate_solution(result, basis, probes)
            num = float(np.max(np.linalg.norm(fitted - exact_at_probes, axis=1)))
            den = float(np.max(np.linalg.norm(exact_at_probes, axis=1)))
            probe_err = num / den if den > 0.0 else num

        rows.append(
            StudyRow(
                degree=degree,
                residual_l2=result.residual_norm,
                residual_max=residual_max,
                data_norm=result.data_norm,
                kept_rank=result.kept_rank,
                defects=tuple(defects),
                probe_err_max=probe_err,
            )
        )
    return StudyReport(config=config, rows=tuple(rows), metadata=config_metadata(config))
