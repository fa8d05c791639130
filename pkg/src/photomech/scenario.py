"""Scenario configuration: validated YAML tree -> mesh, model, problem, solver settings."""
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .energy import LoadData, MaterialParams
from .errors import ConfigError
from .femcore import Loads, Model, box_mesh
from .femcore.mesh import FACE_NAMES, face_axis_side
from .solvers import Problem, SolverConfig

Vec3 = Tuple[float, float, float]
Pair3 = Tuple[Vec3, Vec3]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ProfileSpec(_Strict):
    kind: Literal["constant", "ramp", "step"] = "constant"
    t_ramp: float = Field(1.0, gt=0)
    t_step: float = Field(0.0, ge=0)

    def __call__(self, t):
        if self.kind == "ramp":
            return min(t / self.t_ramp, 1.0)
        if self.kind == "step":
            return 1.0 if t >= self.t_step else 0.0
        return 1.0


class GeometrySpec(_Strict):
    extent: Vec3
    cells: Tuple[int, int, int]
    shell: Vec3 = (0.0, 0.0, 0.0)
    shell_cells: Tuple[int, int, int] = (1, 1, 1)

    @field_validator("extent")
    @classmethod
    def _positive(cls, v):
        if min(v) <= 0:
            raise ValueError("matter extents must be positive")
        return v

    @field_validator("cells")
    @classmethod
    def _cells(cls, v):
        if min(v) < 1:
            raise ValueError("cell counts must be at least 1")
        return v

    @field_validator("shell")
    @classmethod
    def _shell(cls, v):
        if min(v) < 0:
            raise ValueError("shell thickness must be nonnegative")
        return v


class MaterialSpec(_Strict):
    eps0: float = 1.0
    omega0: Tuple[float, float] = (1.0, 1.0)
    gamma0: float = 0.0
    rho_tron: float = 0.0
    rho_mech: float = 1.0
    mu: float = 1.0
    lam: float = 1.0
    a: Tuple[float, float] = (1.0, 1.0)
    beta: Tuple[float, float] = (0.0, 0.0)
    kappa: Tuple[float, float] = (0.0, 0.0)
    eta: float = 1e-6

    @model_validator(mode="after")
    def _check(self):
        MaterialParams(**self.model_dump())
        return self


class BulkSpec(_Strict):
    q_f: float = 0.0
    b_tron: Pair3 = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    b_mech: Vec3 = (0.0, 0.0, 0.0)


class SurfaceSpec(_Strict):
    q_hat: float = 0.0
    t_tron: Pair3 = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    t_mech: Vec3 = (0.0, 0.0, 0.0)


class LightSpec(_Strict):
    """Depth attenuation of the electronic body force below the upper face of `axis`."""

    axis: int = Field(2, ge=0, le=2)
    depth: float = Field(1.0, gt=0)


class LoadSpec(_Strict):
    bulk: BulkSpec = BulkSpec()
    surface: Dict[str, SurfaceSpec] = {}
    light: Optional[LightSpec] = None
    profile: ProfileSpec = ProfileSpec()

    @field_validator("surface")
    @classmethod
    def _faces(cls, v):
        for name in v:
            if name not in FACE_NAMES:
                raise ValueError(f"unknown face {name!r}; expected one of {list(FACE_NAMES)}")
        return v


class RegionSpec(_Strict):
    """Nodes on a matter-box face plane, or inside a coordinate box."""

    face: Optional[str] = None
    lo: Optional[Vec3] = None
    hi: Optional[Vec3] = None

    @model_validator(mode="after")
    def _one(self):
        if self.face is None and self.lo is None and self.hi is None:
            raise ValueError("region needs a face or lo/hi bounds")
        if self.face is not None and self.face not in FACE_NAMES:
            raise ValueError(f"unknown face {self.face!r}")
        return self


class BCSpec(_Strict):
    field: Literal["potential", "deformation", "electronic"]
    region: RegionSpec
    matter_only: bool = False
    value: Union[float, List[float], List[List[float]]] = 0.0
    uniform_field: Optional[Vec3] = None
    stretch: Optional[Tuple[Vec3, Vec3, Vec3]] = None
    components: Optional[List[int]] = None
    profile: ProfileSpec = ProfileSpec()

    @model_validator(mode="after")
    def _consistent(self):
        v = np.asarray(self.value, dtype=float)
        if self.field == "potential":
            if v.ndim != 0:
                raise ValueError("potential value must be a scalar")
            if self.stretch is not None or self.components is not None:
                raise ValueError("stretch/components do not apply to the potential")
        else:
            if self.uniform_field is not None:
                raise ValueError("uniform_field applies to the potential only")
        if self.field == "deformation" and v.ndim not in (0, 1):
            raise ValueError("deformation value must be a scalar or a 3-vector")
        if self.field == "electronic":
            if self.stretch is not None:
                raise ValueError("stretch applies to the deformation only")
            if v.ndim not in (0, 2):
                raise ValueError("electronic value must be a scalar or a 2x3 array")
        if self.components is not None and any(c not in (0, 1, 2) for c in self.components):
            raise ValueError("components must be in {0, 1, 2}")
        return self


class InitialSpec(_Strict):
    ys: Pair3 = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    vs: Pair3 = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))


class SolverSpec(_Strict):
    newton_tol: float = Field(1e-10, gt=0)
    max_iter: int = Field(25, ge=1)
    dt: float = Field(0.1, gt=0)
    t_end: float = Field(1.0, ge=0)
    integrator: Optional[Literal["midpoint", "backward-euler"]] = None
    formulation: Literal["dirichlet", "hamilton-principle", "hamilton-equations"] = "dirichlet"
    dissipative: bool = False


class OutputSpec(_Strict):
    directory: str = "output"
    snapshot_stride: int = Field(1, ge=1)


class ScenarioConfig(_Strict):
    name: str
    units: str = "nondimensional"
    description: str = ""
    geometry: GeometrySpec
    material: MaterialSpec = MaterialSpec()
    loads: LoadSpec = LoadSpec()
    bcs: List[BCSpec] = []
    initial: InitialSpec = InitialSpec()
    solver: SolverSpec = SolverSpec()
    outputs: OutputSpec = OutputSpec()
    seed: int = 0


def _field_path(loc):
    return ".".join(str(p) for p in loc)


def parse_config(data):
    """Validate a mapping; errors become ConfigError naming the offending field."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping", field="<root>")
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        path = _field_path(err["loc"]) or "<root>"
        kind = "missing required field" if err["type"] == "missing" else err["msg"]
        raise ConfigError(f"{path}: {kind}", field=path) from None


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", field="<file>") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"{path}: YAML syntax error{where}", field="<file>") from None
    return parse_config(data)


def config_to_dict(cfg):
    return cfg.model_dump(mode="json")


def bundled_scenarios():
    here = Path(__file__).parent / "scenarios"
    return sorted(here.glob("*.yaml"))


# -- construction -----------------------------------------------------------------
def build_mesh(cfg):
    g = cfg.geometry
    return box_mesh(g.extent, g.cells, shell=g.shell, shell_cells=g.shell_cells)


def build_model(cfg, mesh=None):
    mesh = build_mesh(cfg) if mesh is None else mesh
    params = MaterialParams(**cfg.material.model_dump())
    ls = cfg.loads
    bulk = LoadData(q_f=ls.bulk.q_f, b_tron=np.array(ls.bulk.b_tron), b_mech=np.array(ls.bulk.b_mech))
    surface = {name: LoadData(q_hat=s.q_hat, t_tron=np.array(s.t_tron), t_mech=np.array(s.t_mech))
               for name, s in ls.surface.items()}
    loads = Loads(bulk=bulk, surface=surface, profile=ls.profile)
    if ls.light is not None:
        loads.attenuation_axis = ls.light.axis
        loads.attenuation_depth = ls.light.depth
    return Model(mesh, params, loads)


def _region_nodes(mesh, region, matter_only):
    if region.face is not None:
        axis, side = face_axis_side(region.face)
        plane = mesh.matter_extent[axis] if side > 0 else 0.0
        nodes = np.flatnonzero(np.abs(mesh.X[:, axis] - plane) < 1e-9)
    else:
        nodes = mesh.nodes_in_box(region.lo, region.hi)
    if matter_only:
        nodes = np.intersect1d(nodes, mesh.matter_nodes())
    return nodes


def solver_config(cfg):
    return SolverConfig(**cfg.solver.model_dump())


def build_problem(cfg, model=None):
    """Model plus prescribed dofs: outer shell faces fixed (y = 0, x = X), then user BCs."""
    model = build_model(cfg) if model is None else model
    mesh, lay = model.mesh, model.layout
    problem = Problem(model)
    if len(mesh.outer_nodes):
        outer = np.asarray(mesh.outer_nodes)
        problem.fix(lay.y_dofs(outer), 0.0)
        problem.fix(lay.x_dofs(outer), mesh.X[outer])
    for i, bc in enumerate(cfg.bcs):
        nodes = _region_nodes(mesh, bc.region, bc.matter_only or bc.field == "electronic")
        if nodes.size == 0:
            raise ConfigError(f"bcs.{i}.region selects no nodes", field=f"bcs.{i}.region")
        X = mesh.X[nodes]
        if bc.field == "potential":
            amp = np.full(len(nodes), float(bc.value))
            if bc.uniform_field is not None:
                amp = amp - X @ np.asarray(bc.uniform_field)
            problem.add_dirichlet(lay.y_dofs(nodes), np.zeros(len(nodes)), amp, bc.profile)
        elif bc.field == "deformation":
            comps = bc.components or [0, 1, 2]
            amp = np.broadcast_to(np.asarray(bc.value, float), (len(nodes), 3)).copy()
            if bc.stretch is not None:
                amp = amp + X @ (np.asarray(bc.stretch) - np.eye(3)).T
            dofs = lay.x_dofs(nodes)[:, comps]
            problem.add_dirichlet(dofs, X[:, comps], amp[:, comps], bc.profile)
        else:
            comps = bc.components or [0, 1, 2]
            amp = np.broadcast_to(np.asarray(bc.value, float), (len(nodes), 2, 3)).copy()
            dofs = lay.e_dofs(nodes)[..., comps]
            problem.add_dirichlet(dofs, np.zeros(dofs.shape), amp[..., comps], bc.profile)
    u0 = lay.reference()
    ys0 = np.asarray(cfg.initial.ys)
    u0[lay.e_slice] = np.tile(ys0.ravel(), lay.n_matter_nodes)
    v0 = np.zeros(lay.ndof)
    v0[lay.e_slice] = np.tile(np.asarray(cfg.initial.vs).ravel(), lay.n_matter_nodes)
    problem.u0 = problem.apply(u0, 0.0)
    problem.v0 = v0
    return problem


def execute(cfg):
    """Build and solve a scenario; returns (problem, trajectory)."""
    from .solvers import solve_dynamic_hamiltonian, solve_dynamic_lagrangian, solve_quasistatic

    problem = build_problem(cfg)
    scfg = solver_config(cfg)
    solver = {"dirichlet": solve_quasistatic,
              "hamilton-principle": solve_dynamic_lagrangian,
              "hamilton-equations": solve_dynamic_hamiltonian}[scfg.formulation]
    return problem, solver(problem, scfg)
