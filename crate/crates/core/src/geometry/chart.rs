use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::expr::Expr;

/// Parameter domain of a chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
}

impl Domain {
    pub fn unit_interval() -> Self {
        Domain::Interval { a: 0.0, b: 1.0 }
    }

    pub fn unit_square() -> Self {
        Domain::Rectangle {
            lo: [0.0, 0.0],
            hi: [1.0, 1.0],
        }
    }

    pub fn unit_disk() -> Self {
        Domain::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } | Domain::Disk { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Domain::Interval { a, b } => a.is_finite() && b.is_finite() && a < b,
            Domain::Rectangle { lo, hi } => (0..2).all(|i| lo[i].is_finite() && hi[i].is_finite() && lo[i] < hi[i]),
            Domain::Disk { center, radius } => {
                center.iter().all(|c| c.is_finite()) && radius.is_finite() && *radius > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SpectraError::Parameter(format!("degenerate domain {self:?}")))
        }
    }

    pub fn contains(&self, xi: &[f64], tol: f64) -> bool {
        if xi.len() != self.dim() {
            return false;
        }
        match self {
            Domain::Interval { a, b } => xi[0] >= a - tol && xi[0] <= b + tol,
            Domain::Rectangle { lo, hi } => (0..2).all(|i| xi[i] >= lo[i] - tol && xi[i] <= hi[i] + tol),
            Domain::Disk { center, radius } => {
                let r = ((xi[0] - center[0]).powi(2) + (xi[1] - center[1]).powi(2)).sqrt();
                r <= radius + tol
            }
        }
    }

    /// Largest side length (or the diameter for disks), in chart units.
    pub fn extent(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Rectangle { lo, hi } => (hi[0] - lo[0]).max(hi[1] - lo[1]),
            Domain::Disk { radius, .. } => 2.0 * radius,
        }
    }

    /// Length or area in chart coordinates.
    pub fn chart_measure(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Rectangle { lo, hi } => (hi[0] - lo[0]) * (hi[1] - lo[1]),
            Domain::Disk { radius, .. } => PI * radius * radius,
        }
    }

    /// Sample points used for suprema: a tensor grid for intervals and
    /// rectangles, a polar grid for disks. Both include boundary points and
    /// the grid at resolution `r` is contained in the grid at `2r`.
    pub fn sample_grid(&self, resolution: usize) -> Vec<Vec<f64>> {
        let lerp = |lo: f64, hi: f64, i: usize| {
            if i == resolution {
                hi
            } else {
                lo + (hi - lo) * i as f64 / resolution as f64
            }
        };
        match self {
            Domain::Interval { a, b } => (0..=resolution).map(|i| vec![lerp(*a, *b, i)]).collect(),
            Domain::Rectangle { lo, hi } => {
                let mut pts = Vec::with_capacity((resolution + 1) * (resolution + 1));
                for j in 0..=resolution {
                    for i in 0..=resolution {
                        pts.push(vec![lerp(lo[0], hi[0], i), lerp(lo[1], hi[1], j)]);
                    }
                }
                pts
            }
            Domain::Disk { center, radius } => {
                let mut pts = vec![center.to_vec()];
                let n_angles = 4 * resolution;
                for j in 1..=resolution {
                    let r = radius * j as f64 / resolution as f64;
                    for l in 0..n_angles {
                        let phi = 2.0 * PI * l as f64 / n_angles as f64;
                        pts.push(vec![center[0] + r * phi.cos(), center[1] + r * phi.sin()]);
                    }
                }
                pts
            }
        }
    }
}

/// Position and derivatives of an immersion at one chart point.
#[derive(Debug, Clone)]
pub struct ImmersionJet {
    pub position: DVector<f64>,
    /// m x n, column i is the partial derivative along chart coordinate i.
    pub tangent: DMatrix<f64>,
    /// Second partials, `hessian[i * n + j]` is the mixed derivative along i and j.
    pub hessian: Vec<DVector<f64>>,
}

impl ImmersionJet {
    pub fn second(&self, i: usize, j: usize) -> &DVector<f64> {
        let n = self.tangent.ncols();
        &self.hessian[i * n + j]
    }
}

/// Builtin isometric immersions x: chart domain -> R^m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Immersion {
    FlatInterval,
    FlatRectangle,
    /// Inverse stereographic projection onto the sphere of the given radius;
    /// the unit chart disk maps onto the upper hemisphere.
    StereographicSphere {
        radius: f64,
    },
    /// Cylinder parameterized by arc length around the axis and height.
    Cylinder {
        radius: f64,
    },
    /// cos(theta) * catenoid + sin(theta) * helicoid, chart coordinates (u, v).
    AssociateFamily {
        theta: f64,
    },
    /// `inner` composed with the affine chart change xi -> offset + scale * xi.
    Affine {
        inner: Box<Immersion>,
        scale: Vec<f64>,
        offset: Vec<f64>,
    },
}

impl Immersion {
    pub fn id(&self) -> &'static str {
        match self {
            Immersion::FlatInterval => "flat_interval",
            Immersion::FlatRectangle => "flat_rectangle",
            Immersion::StereographicSphere { .. } => "stereographic_sphere",
            Immersion::Cylinder { .. } => "cylinder",
            Immersion::AssociateFamily { .. } => "associate_family",
            Immersion::Affine { .. } => "affine",
        }
    }

    pub fn dim_n(&self) -> usize {
        match self {
            Immersion::FlatInterval => 1,
            Immersion::Affine { inner, .. } => inner.dim_n(),
            _ => 2,
        }
    }

    pub fn dim_m(&self) -> usize {
        match self {
            Immersion::FlatInterval => 1,
            Immersion::FlatRectangle => 2,
            Immersion::StereographicSphere { .. } | Immersion::Cylinder { .. } | Immersion::AssociateFamily { .. } => 3,
            Immersion::Affine { inner, .. } => inner.dim_m(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Immersion::StereographicSphere { radius } | Immersion::Cylinder { radius }
                if !(radius.is_finite() && *radius > 0.0) =>
            {
                Err(SpectraError::Parameter(format!(
                    "radius must be positive, got {radius}"
                )))
            }
            Immersion::AssociateFamily { theta } if !theta.is_finite() => {
                Err(SpectraError::Parameter("theta must be finite".into()))
            }
            Immersion::Affine { inner, scale, offset } => {
                inner.validate()?;
                let n = inner.dim_n();
                if scale.len() != n || offset.len() != n || scale.iter().any(|s| *s == 0.0 || !s.is_finite()) {
                    return Err(SpectraError::Parameter(
                        "affine chart change needs n nonzero scales and n offsets".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn jet(&self, xi: &[f64]) -> ImmersionJet {
        match self {
            Immersion::FlatInterval => ImmersionJet {
                position: DVector::from_vec(vec![xi[0]]),
                tangent: DMatrix::from_element(1, 1, 1.0),
                hessian: vec![DVector::zeros(1)],
            },
            Immersion::FlatRectangle => ImmersionJet {
                position: DVector::from_vec(vec![xi[0], xi[1]]),
                tangent: DMatrix::identity(2, 2),
                hessian: vec![DVector::zeros(2); 4],
            },
            Immersion::StereographicSphere { radius } => stereographic_jet(*radius, xi),
            Immersion::Cylinder { radius } => cylinder_jet(*radius, xi),
            Immersion::AssociateFamily { theta } => associate_jet(*theta, xi),
            Immersion::Affine { inner, scale, offset } => {
                let n = scale.len();
                let mapped: Vec<f64> = (0..n).map(|i| offset[i] + scale[i] * xi[i]).collect();
                let mut jet = inner.jet(&mapped);
                for (i, s) in scale.iter().enumerate() {
                    let mut col = jet.tangent.column_mut(i);
                    col *= *s;
                }
                for i in 0..n {
                    for j in 0..n {
                        jet.hessian[i * n + j] *= scale[i] * scale[j];
                    }
                }
                jet
            }
        }
    }
}

fn stereographic_jet(r: f64, xi: &[f64]) -> ImmersionJet {
    let (a, b) = (xi[0], xi[1]);
    let rho = a * a + b * b;
    let s = 1.0 + rho;
    let s2 = s * s;
    let s3 = s2 * s;
    let p = [a, b];
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };

    let position = DVector::from_vec(vec![2.0 * r * a / s, 2.0 * r * b / s, r * (1.0 - rho) / s]);
    let mut tangent = DMatrix::zeros(3, 2);
    for i in 0..2 {
        for c in 0..2 {
            tangent[(c, i)] = 2.0 * r * (delta(c, i) / s - 2.0 * p[c] * p[i] / s2);
        }
        tangent[(2, i)] = -4.0 * r * p[i] / s2;
    }
    let mut hessian = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            let mut v = DVector::zeros(3);
            for c in 0..2 {
                v[c] = 2.0
                    * r
                    * (-2.0 * (delta(c, i) * p[j] + delta(c, j) * p[i] + p[c] * delta(i, j)) / s2
                        + 8.0 * p[c] * p[i] * p[j] / s3);
            }
            v[2] = -4.0 * r * (delta(i, j) / s2 - 4.0 * p[i] * p[j] / s3);
            hessian.push(v);
        }
    }
    ImmersionJet {
        position,
        tangent,
        hessian,
    }
}

fn cylinder_jet(r: f64, xi: &[f64]) -> ImmersionJet {
    let phi = xi[0] / r;
    let (sin, cos) = phi.sin_cos();
    let position = DVector::from_vec(vec![r * cos, r * sin, xi[1]]);
    let tangent = DMatrix::from_column_slice(3, 2, &[-sin, cos, 0.0, 0.0, 0.0, 1.0]);
    let hessian = vec![
        DVector::from_vec(vec![-cos / r, -sin / r, 0.0]),
        DVector::zeros(3),
        DVector::zeros(3),
        DVector::zeros(3),
    ];
    ImmersionJet {
        position,
        tangent,
        hessian,
    }
}

fn associate_jet(theta: f64, xi: &[f64]) -> ImmersionJet {
    let (u, v) = (xi[0], xi[1]);
    let (su, cu) = u.sin_cos();
    let (ch, sh) = (v.cosh(), v.sinh());
    let (st, ct) = theta.sin_cos();
    let mix = |cat: [f64; 3], hel: [f64; 3]| DVector::from_vec((0..3).map(|i| ct * cat[i] + st * hel[i]).collect());

    let position = mix([ch * cu, ch * su, v], [sh * su, -sh * cu, u]);
    let x_u = mix([-ch * su, ch * cu, 0.0], [sh * cu, sh * su, 1.0]);
    let x_v = mix([sh * cu, sh * su, 1.0], [ch * su, -ch * cu, 0.0]);
    let x_uu = mix([-ch * cu, -ch * su, 0.0], [-sh * su, sh * cu, 0.0]);
    let x_uv = mix([-sh * su, sh * cu, 0.0], [ch * cu, ch * su, 0.0]);
    let x_vv = mix([ch * cu, ch * su, 0.0], [sh * su, -sh * cu, 0.0]);

    let mut tangent = DMatrix::zeros(3, 2);
    tangent.set_column(0, &x_u);
    tangent.set_column(1, &x_v);
    ImmersionJet {
        position,
        tangent,
        hessian: vec![x_uu, x_uv.clone(), x_uv, x_vv],
    }
}

/// Value, chart gradient and chart Hessian of a scalar field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl ScalarJet {
    pub fn zero(n: usize) -> Self {
        ScalarJet {
            value: 0.0,
            grad: DVector::zeros(n),
            hess: DMatrix::zeros(n, n),
        }
    }

    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|v| v.is_finite()) && self.hess.iter().all(|v| v.is_finite())
    }
}

/// Scalar fields on a chart, used for the weight and for test functions.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    Constant(f64),
    /// Sum of coeffs[i] * xi_i.
    Linear(Vec<f64>),
    /// coeff * |xi|^2.
    RadialQuadratic(f64),
    /// The l-th ambient coordinate of the immersion, x_l restricted to the chart.
    Ambient(usize),
    Expr(Expr),
}

impl ScalarField {
    pub fn zero() -> Self {
        ScalarField::Constant(0.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ScalarField::Constant(c) if *c == 0.0)
            || matches!(self, ScalarField::Linear(c) if c.iter().all(|v| *v == 0.0))
            || matches!(self, ScalarField::RadialQuadratic(c) if *c == 0.0)
    }

    pub fn describe(&self) -> String {
        match self {
            ScalarField::Constant(c) => format!("constant({c})"),
            ScalarField::Linear(c) => format!("linear({c:?})"),
            ScalarField::RadialQuadratic(c) => format!("radial_quadratic({c})"),
            ScalarField::Ambient(l) => format!("ambient({l})"),
            ScalarField::Expr(e) => format!("expr({e})"),
        }
    }
}

/// Symmetric (0,2) tensor fields in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorField {
    /// T equal to the induced metric (the identity endomorphism).
    Metric,
    /// Constant diagonal components T_aa in chart coordinates.
    Diagonal(Vec<f64>),
    /// Upper-triangle components in row order: `[T11]` for n = 1,
    /// `[T11, T12, T22]` for n = 2.
    Expr(Vec<Expr>),
    Scaled {
        factor: f64,
        inner: Box<TensorField>,
    },
}

impl TensorField {
    pub fn scaled(self, factor: f64) -> Self {
        TensorField::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    /// True when the covariant derivative of T vanishes identically.
    pub fn is_parallel_to_metric(&self) -> bool {
        match self {
            TensorField::Metric => true,
            TensorField::Scaled { inner, .. } => inner.is_parallel_to_metric(),
            _ => false,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            TensorField::Metric => "metric".into(),
            TensorField::Diagonal(d) => format!("diagonal({d:?})"),
            TensorField::Expr(e) => {
                let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                format!("expr({})", parts.join("; "))
            }
            TensorField::Scaled { factor, inner } => format!("{factor} * {}", inner.describe()),
        }
    }
}

/// T_ab and its chart derivatives at a point.
#[derive(Debug, Clone)]
pub struct TensorJet {
    pub value: DMatrix<f64>,
    /// `deriv[c]` is the partial derivative of T_ab along chart coordinate c.
    pub deriv: Vec<DMatrix<f64>>,
}

/// Finite-difference step factor: h_fd = extent / (8 * resolution).
pub const DEFAULT_FD_RESOLUTION: usize = 64;

/// A parameterized immersion together with the weight eta and tensor T.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub immersion: Immersion,
    pub domain: Domain,
    pub eta: ScalarField,
    pub tensor: TensorField,
    fd_step: f64,
}

impl Chart {
    pub fn new(immersion: Immersion, domain: Domain, eta: ScalarField, tensor: TensorField) -> Result<Self> {
        immersion.validate()?;
        domain.validate()?;
        let n = immersion.dim_n();
        if domain.dim() != n {
            return Err(SpectraError::Parameter(format!(
                "{} has intrinsic dimension {n} but the domain has dimension {}",
                immersion.id(),
                domain.dim()
            )));
        }
        let m = immersion.dim_m();
        if !(n <= m && m <= 4) {
            return Err(SpectraError::Parameter(format!("unsupported dimensions n={n}, m={m}")));
        }
        let fd_step = domain.extent() / (8.0 * DEFAULT_FD_RESOLUTION as f64);
        let chart = Chart {
            immersion,
            domain,
            eta,
            tensor,
            fd_step,
        };
        chart.validate_scalar(&chart.eta)?;
        chart.validate_tensor(&chart.tensor)?;
        Ok(chart)
    }

    pub fn flat_interval(a: f64, b: f64) -> Result<Self> {
        Chart::new(
            Immersion::FlatInterval,
            Domain::Interval { a, b },
            ScalarField::zero(),
            TensorField::Metric,
        )
    }

    pub fn flat_rectangle(lo: [f64; 2], hi: [f64; 2]) -> Result<Self> {
        Chart::new(
            Immersion::FlatRectangle,
            Domain::Rectangle { lo, hi },
            ScalarField::zero(),
            TensorField::Metric,
        )
    }

    /// Upper hemisphere of the sphere of radius `radius`, as the unit chart disk.
    pub fn hemisphere(radius: f64) -> Result<Self> {
        Chart::new(
            Immersion::StereographicSphere { radius },
            Domain::unit_disk(),
            ScalarField::zero(),
            TensorField::Metric,
        )
    }

    pub fn with_eta(mut self, eta: ScalarField) -> Result<Self> {
        self.validate_scalar(&eta)?;
        self.eta = eta;
        Ok(self)
    }

    pub fn with_tensor(mut self, tensor: TensorField) -> Result<Self> {
        self.validate_tensor(&tensor)?;
        self.tensor = tensor;
        Ok(self)
    }

    /// Sets the finite-difference step to extent / (8 * resolution).
    pub fn with_fd_resolution(mut self, resolution: usize) -> Self {
        self.fd_step = self.domain.extent() / (8.0 * resolution.max(1) as f64);
        self
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn dim_n(&self) -> usize {
        self.immersion.dim_n()
    }

    pub fn dim_m(&self) -> usize {
        self.immersion.dim_m()
    }

    pub fn validate_scalar(&self, field: &ScalarField) -> Result<()> {
        let n = self.dim_n();
        match field {
            ScalarField::Linear(c) if c.len() != n => Err(SpectraError::Parameter(format!(
                "linear field needs {n} coefficients, got {}",
                c.len()
            ))),
            ScalarField::Ambient(l) if *l >= self.dim_m() => Err(SpectraError::Parameter(format!(
                "ambient coordinate {l} out of range for m = {}",
                self.dim_m()
            ))),
            ScalarField::Expr(e) if e.arity() > n => Err(SpectraError::Parameter(format!(
                "expression '{e}' uses more than {n} chart coordinates"
            ))),
            _ => Ok(()),
        }
    }

    fn validate_tensor(&self, tensor: &TensorField) -> Result<()> {
        let n = self.dim_n();
        match tensor {
            TensorField::Diagonal(d) if d.len() != n => Err(SpectraError::Parameter(format!(
                "diagonal tensor needs {n} entries, got {}",
                d.len()
            ))),
            TensorField::Expr(e) if e.len() != n * (n + 1) / 2 => Err(SpectraError::Parameter(format!(
                "tensor expression needs {} components, got {}",
                n * (n + 1) / 2,
                e.len()
            ))),
            TensorField::Expr(e) if e.iter().any(|x| x.arity() > n) => Err(SpectraError::Parameter(
                "tensor expression uses an unknown chart coordinate".into(),
            )),
            TensorField::Scaled { factor, inner } => {
                if !(factor.is_finite() && *factor > 0.0) {
                    return Err(SpectraError::Parameter(format!(
                        "tensor scale must be positive, got {factor}"
                    )));
                }
                self.validate_tensor(inner)
            }
            _ => Ok(()),
        }
    }

    pub fn scalar_jet(&self, field: &ScalarField, xi: &[f64], jet: &ImmersionJet) -> Result<ScalarJet> {
        let n = self.dim_n();
        let out = match field {
            ScalarField::Constant(c) => ScalarJet {
                value: *c,
                ..ScalarJet::zero(n)
            },
            ScalarField::Linear(c) => ScalarJet {
                value: (0..n).map(|i| c[i] * xi[i]).sum(),
                grad: DVector::from_column_slice(c),
                hess: DMatrix::zeros(n, n),
            },
            ScalarField::RadialQuadratic(c) => ScalarJet {
                value: c * xi.iter().map(|v| v * v).sum::<f64>(),
                grad: DVector::from_iterator(n, xi.iter().map(|v| 2.0 * c * v)),
                hess: DMatrix::identity(n, n) * (2.0 * c),
            },
            ScalarField::Ambient(l) => ScalarJet {
                value: jet.position[*l],
                grad: jet.tangent.row(*l).transpose(),
                hess: DMatrix::from_fn(n, n, |i, j| jet.second(i, j)[*l]),
            },
            ScalarField::Expr(e) => self.fd_scalar(|p| e.eval(p), xi),
        };
        if !out.is_finite() {
            return Err(SpectraError::Evaluation(format!(
                "{} is not finite at {xi:?}",
                field.describe()
            )));
        }
        Ok(out)
    }

    fn fd_scalar(&self, f: impl Fn(&[f64]) -> f64, xi: &[f64]) -> ScalarJet {
        let n = xi.len();
        let h = self.fd_step;
        let shifted = |offsets: &[(usize, f64)]| {
            let mut p = xi.to_vec();
            for &(i, d) in offsets {
                p[i] += d;
            }
            f(&p)
        };
        let value = f(xi);
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n {
            let fp = shifted(&[(i, h)]);
            let fm = shifted(&[(i, -h)]);
            grad[i] = (fp - fm) / (2.0 * h);
            hess[(i, i)] = (fp - 2.0 * value + fm) / (h * h);
            for j in 0..i {
                let v = (shifted(&[(i, h), (j, h)]) - shifted(&[(i, h), (j, -h)]) - shifted(&[(i, -h), (j, h)])
                    + shifted(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        ScalarJet { value, grad, hess }
    }

    pub fn tensor_jet(&self, xi: &[f64], jet: &ImmersionJet) -> Result<TensorJet> {
        let out = self.tensor_jet_of(&self.tensor, xi, jet);
        if out
            .value
            .iter()
            .chain(out.deriv.iter().flat_map(|d| d.iter()))
            .any(|v| !v.is_finite())
        {
            return Err(SpectraError::Evaluation(format!(
                "tensor {} is not finite at {xi:?}",
                self.tensor.describe()
            )));
        }
        Ok(out)
    }

    fn tensor_jet_of(&self, tensor: &TensorField, xi: &[f64], jet: &ImmersionJet) -> TensorJet {
        let n = self.dim_n();
        match tensor {
            TensorField::Metric => {
                let value = jet.tangent.transpose() * &jet.tangent;
                let deriv = (0..n)
                    .map(|c| {
                        DMatrix::from_fn(n, n, |a, b| {
                            jet.second(c, a).dot(&jet.tangent.column(b)) + jet.tangent.column(a).dot(jet.second(c, b))
                        })
                    })
                    .collect();
                TensorJet { value, deriv }
            }
            TensorField::Diagonal(d) => TensorJet {
                value: DMatrix::from_diagonal(&DVector::from_column_slice(d)),
                deriv: vec![DMatrix::zeros(n, n); n],
            },
            TensorField::Expr(entries) => {
                let eval = |p: &[f64]| -> DMatrix<f64> {
                    let mut t = DMatrix::zeros(n, n);
                    let mut idx = 0;
                    for a in 0..n {
                        for b in a..n {
                            let v = entries[idx].eval(p);
                            t[(a, b)] = v;
                            t[(b, a)] = v;
                            idx += 1;
                        }
                    }
                    t
                };
                let h = self.fd_step;
                let deriv = (0..n)
                    .map(|c| {
                        let mut p = xi.to_vec();
                        let mut q = xi.to_vec();
                        p[c] += h;
                        q[c] -= h;
                        (eval(&p) - eval(&q)) / (2.0 * h)
                    })
                    .collect();
                TensorJet { value: eval(xi), deriv }
            }
            TensorField::Scaled { factor, inner } => {
                let mut t = self.tensor_jet_of(inner, xi, jet);
                t.value *= *factor;
                for d in &mut t.deriv {
                    *d *= *factor;
                }
                t
            }
        }
    }

    pub fn check_in_domain(&self, xi: &[f64]) -> Result<()> {
        if self.domain.contains(xi, 1e-12) {
            Ok(())
        } else {
            Err(SpectraError::Domain { point: xi.to_vec() })
        }
    }
}
