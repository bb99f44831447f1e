use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slack on closed endpoints: `λ ∈ [a, b]` when `a - 1e-12 <= λ <= b + 1e-12`.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Required clearance from an open endpoint.
pub const DEFAULT_OPEN_MARGIN: f64 = 1e-6;

/// Real interval with independently open or closed endpoints; `hi` may be `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub open_margin: f64,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
            open_margin: DEFAULT_OPEN_MARGIN,
        }
    }

    /// `[lo, ∞)`.
    pub fn closed_ray(lo: f64) -> Self {
        Self {
            hi_closed: false,
            ..Self::closed(lo, f64::INFINITY)
        }
    }

    /// `(lo, ∞)`.
    pub fn open_ray(lo: f64) -> Self {
        Self {
            lo_closed: false,
            ..Self::closed_ray(lo)
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        if x.is_nan() {
            return false;
        }
        let lo_ok = if self.lo_closed {
            x >= self.lo - BOUNDARY_TOL
        } else {
            x >= self.lo + self.open_margin
        };
        let hi_ok = if self.hi.is_infinite() {
            x.is_finite()
        } else if self.hi_closed {
            x <= self.hi + BOUNDARY_TOL
        } else {
            x <= self.hi - self.open_margin
        };
        lo_ok && hi_ok
    }

    /// Moves a point accepted by [`contains`](Self::contains) onto the interval itself.
    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed && self.hi.is_finite() {
            ']'
        } else {
            ')'
        };
        if self.hi.is_infinite() {
            write!(f, "{l}{}, inf{r}", self.lo)
        } else {
            write!(f, "{l}{}, {}{r}", self.lo, self.hi)
        }
    }
}

/// Classification a function is documented to have.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClaimedClass {
    OperatorSuperquadratic,
    OperatorSubquadratic,
    OperatorQuadratic,
    Neither,
    Unknown,
}

impl ClaimedClass {
    fn negated(self) -> Self {
        match self {
            ClaimedClass::OperatorSuperquadratic => ClaimedClass::OperatorSubquadratic,
            ClaimedClass::OperatorSubquadratic => ClaimedClass::OperatorSuperquadratic,
            c => c,
        }
    }
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function `f` with its domain, optional derivative (the
/// support-line constant `C_x = f'(x)`) and documented classification.
#[derive(Clone)]
pub struct ScalarFunctionSpec {
    id: String,
    name: String,
    eval: RealFn,
    derivative: Option<RealFn>,
    domain: Interval,
    claimed_class: ClaimedClass,
    sampling_range: (f64, f64),
}

impl fmt::Debug for ScalarFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunctionSpec")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("claimed_class", &self.claimed_class)
            .finish()
    }
}

impl ScalarFunctionSpec {
    pub fn new(
        name: impl Into<String>,
        domain: Interval,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let name = name.into();
        let lo = if domain.lo_closed {
            domain.lo
        } else {
            domain.lo + 0.05
        };
        let hi = if domain.hi.is_finite() {
            domain.hi
        } else {
            lo + 4.0
        };
        Self {
            id: name.clone(),
            name,
            eval: Arc::new(eval),
            derivative: None,
            domain,
            claimed_class: ClaimedClass::Unknown,
            sampling_range: (lo, hi),
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_claimed_class(mut self, c: ClaimedClass) -> Self {
        self.claimed_class = c;
        self
    }

    /// Spectrum interval random instances are drawn from; must sit inside the domain.
    pub fn with_sampling_range(mut self, lo: f64, hi: f64) -> Self {
        self.sampling_range = (lo, hi);
        self
    }

    fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn claimed_class(&self) -> ClaimedClass {
        self.claimed_class
    }

    pub fn sampling_range(&self) -> (f64, f64) {
        self.sampling_range
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(x))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// `-f`, with the claimed class mirrored.
    pub fn negated(&self) -> Self {
        let eval = self.eval.clone();
        let mut out = Self {
            id: format!("neg:{}", self.id),
            name: format!("-({})", self.name),
            eval: Arc::new(move |x| -eval(x)),
            derivative: None,
            domain: self.domain,
            claimed_class: self.claimed_class.negated(),
            sampling_range: self.sampling_range,
        };
        if let Some(d) = self.derivative.clone() {
            out.derivative = Some(Arc::new(move |x| -d(x)));
        }
        out
    }

    /// Checks that `f` is finite on a 1000-point grid over `[lo, hi]` and,
    /// when a derivative rule exists, that it agrees with central differences
    /// to `1e-6` relative at the interior grid points.
    pub fn validate(&self, lo: f64, hi: f64) -> Result<()> {
        if !(self.domain.contains(lo) && self.domain.contains(hi) && lo <= hi) {
            return Err(Error::InvalidParameter(format!(
                "[{lo}, {hi}] is not a subinterval of {}",
                self.domain
            )));
        }
        const N: usize = 1000;
        for k in 0..N {
            let x = lo + (hi - lo) * k as f64 / (N - 1) as f64;
            let x = self.domain.clamp(x);
            let v = self.eval(x);
            if !v.is_finite() {
                return Err(Error::DomainViolation {
                    function: self.name.clone(),
                    domain: self.domain.to_string(),
                    offending: vec![x],
                });
            }
            if k == 0 || k == N - 1 {
                continue;
            }
            if let Some(d) = self.derivative(x) {
                let room = (x - self.domain.lo).min(self.domain.hi - x);
                let h = (1e-6 * x.abs().max(1.0)).min(0.5 * room);
                let fd = (self.eval(x + h) - self.eval(x - h)) / (2.0 * h);
                if (d - fd).abs() > 1e-6 * d.abs().max(1.0) {
                    return Err(Error::VerificationFailed(format!(
                        "{}: derivative {d} disagrees with central difference {fd} at {x}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Resolves a built-in by id: `square`, `cube`, `recip`, `power:r`,
    /// `tlogt`, `affine:a:b`, or `neg:<id>` for the negation of any of them.
    pub fn builtin(id: &str) -> Result<Self> {
        let unknown = || Error::UnknownFunction(id.to_string());
        if let Some(rest) = id.strip_prefix("neg:") {
            return Ok(Self::builtin(rest)?.negated());
        }
        let mut parts = id.split(':');
        let head = parts.next().ok_or_else(unknown)?;
        let params: Vec<f64> = parts
            .map(|p| p.parse::<f64>().map_err(|_| unknown()))
            .collect::<Result<_>>()?;
        if params.iter().any(|p| !p.is_finite()) {
            return Err(unknown());
        }
        let spec = match (head, params.as_slice()) {
            ("square", []) => square(),
            ("cube", []) => cube(),
            ("recip", []) => recip(),
            ("tlogt", []) => tlogt(),
            ("power", &[r]) => power(r),
            ("affine", &[a, b]) => affine(a, b),
            _ => return Err(unknown()),
        };
        Ok(spec.with_id(id))
    }
}

pub const BUILTIN_IDS: &[&str] = &["square", "cube", "recip", "power:r", "tlogt", "affine:a:b"];

/// `t²` on `[0, ∞)`. Its two-operator deficit vanishes identically, so it is
/// claimed quadratic (equality in the defining inequality).
pub fn square() -> ScalarFunctionSpec {
    ScalarFunctionSpec::new("t^2", Interval::closed_ray(0.0), |t| t * t)
        .with_derivative(|t| 2.0 * t)
        .with_claimed_class(ClaimedClass::OperatorQuadratic)
        .with_sampling_range(0.0, 4.0)
        .with_id("square")
}

/// `t³` on `[0, ∞)`: superquadratic as a scalar function, neither super- nor
/// subquadratic in the operator sense.
pub fn cube() -> ScalarFunctionSpec {
    ScalarFunctionSpec::new("t^3", Interval::closed_ray(0.0), |t| t * t * t)
        .with_derivative(|t| 3.0 * t * t)
        .with_claimed_class(ClaimedClass::Neither)
        .with_sampling_range(0.0, 4.0)
        .with_id("cube")
}

/// `t⁻¹` on `(0, ∞)`.
pub fn recip() -> ScalarFunctionSpec {
    ScalarFunctionSpec::new("t^-1", Interval::open_ray(0.0), |t| 1.0 / t)
        .with_derivative(|t| -1.0 / (t * t))
        .with_claimed_class(ClaimedClass::Neither)
        .with_sampling_range(0.05, 4.0)
        .with_id("recip")
}

/// `t·log t` restricted to `[0, 1]`, extended by `0` at `t = 0`.
pub fn tlogt() -> ScalarFunctionSpec {
    ScalarFunctionSpec::new("t*log(t)", Interval::closed(0.0, 1.0), |t| {
        if t == 0.0 {
            0.0
        } else {
            t * t.ln()
        }
    })
    .with_derivative(|t| 1.0 + t.ln())
    .with_claimed_class(ClaimedClass::OperatorSuperquadratic)
    .with_sampling_range(0.01, 0.99)
    .with_id("tlogt")
}

/// `t^r`. For `r ∈ [0, 1]` it is operator concave and non-negative, hence
/// claimed subquadratic; `r = 2` is the quadratic case; other exponents are
/// left unclassified. Negative exponents live on `(0, ∞)`.
pub fn power(r: f64) -> ScalarFunctionSpec {
    let domain = if r < 0.0 {
        Interval::open_ray(0.0)
    } else {
        Interval::closed_ray(0.0)
    };
    let class = if (0.0..=1.0).contains(&r) {
        ClaimedClass::OperatorSubquadratic
    } else if r == 2.0 {
        ClaimedClass::OperatorQuadratic
    } else {
        ClaimedClass::Unknown
    };
    let lo = if r < 0.0 { 0.05 } else { 0.0 };
    ScalarFunctionSpec::new(format!("t^{r}"), domain, move |t| t.powf(r))
        .with_derivative(move |t| if r == 0.0 { 0.0 } else { r * t.powf(r - 1.0) })
        .with_claimed_class(class)
        .with_sampling_range(lo, 4.0)
        .with_id(format!("power:{r}"))
}

/// `a·t + b` on `[0, ∞)`; subquadratic when `a, b >= 0`.
pub fn affine(a: f64, b: f64) -> ScalarFunctionSpec {
    let class = if a == 0.0 && b == 0.0 {
        ClaimedClass::OperatorQuadratic
    } else if a >= 0.0 && b >= 0.0 {
        ClaimedClass::OperatorSubquadratic
    } else if a <= 0.0 && b <= 0.0 {
        ClaimedClass::OperatorSuperquadratic
    } else {
        ClaimedClass::Unknown
    };
    ScalarFunctionSpec::new(format!("{a}*t+{b}"), Interval::closed_ray(0.0), move |t| {
        a * t + b
    })
    .with_derivative(move |_| a)
    .with_claimed_class(class)
    .with_sampling_range(0.0, 4.0)
    .with_id(format!("affine:{a}:{b}"))
}
