//! The Lagrangian `L_G(x) = Σ_E Π_{i∈E} x_i` on the standard simplex.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{binomial, bits, full_mask, RGraph};
use crate::morphism::{canonical_form, enumerate_levels, EnumOptions, FamilySpec};
use crate::stability::is_krl_colorable;

pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexPoint {
    weights: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParameter("simplex weights must be finite and nonnegative".into()));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidParameter(format!("simplex weights sum to {s}, not 1")));
        }
        Ok(SimplexPoint { weights })
    }

    /// Rescales nonnegative weights with positive sum onto the simplex.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if !(s > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidParameter("weights must be nonnegative with positive sum".into()));
        }
        Ok(SimplexPoint { weights: weights.into_iter().map(|w| w / s).collect() })
    }

    pub fn uniform(m: usize) -> Self {
        SimplexPoint { weights: vec![1.0 / m as f64; m] }
    }

    /// Uniform weight on the vertices of `support`.
    pub fn uniform_on(m: usize, support: u64) -> Self {
        let k = support.count_ones() as f64;
        SimplexPoint { weights: (0..m).map(|i| if support & (1u64 << i) != 0 { 1.0 / k } else { 0.0 }).collect() }
    }

    pub fn vertex(m: usize, i: usize) -> Self {
        let mut w = vec![0.0; m];
        w[i] = 1.0;
        SimplexPoint { weights: w }
    }

    /// A Dirichlet(1, …, 1) sample.
    pub fn random(m: usize, rng: &mut impl Rng) -> Self {
        let w: Vec<f64> = (0..m).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        SimplexPoint::normalized(w).expect("positive exponential samples")
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> u64 {
        self.weights.iter().enumerate().filter(|(_, w)| **w > 0.0).fold(0, |m, (i, _)| m | (1u64 << i))
    }
}

fn check_dim(g: &RGraph, x: &SimplexPoint) -> Result<()> {
    if g.n() != x.dimension() {
        return Err(Error::InvalidParameter(format!(
            "point of dimension {} for a graph on {} vertices",
            x.dimension(),
            g.n()
        )));
    }
    Ok(())
}

/// `L_G(y)` at an arbitrary real vector.
pub fn polynomial(g: &RGraph, y: &[f64]) -> f64 {
    g.edges().iter().map(|&e| bits(e).map(|i| y[i]).product::<f64>()).sum()
}

/// `L_G(y)` in exact arithmetic.
pub fn polynomial_exact(g: &RGraph, y: &[BigRational]) -> BigRational {
    g.edges().iter().fold(BigRational::zero(), |acc, &e| {
        acc + bits(e).fold(BigRational::one(), |p, i| p * &y[i])
    })
}

pub fn evaluate(g: &RGraph, x: &SimplexPoint) -> Result<f64> {
    check_dim(g, x)?;
    Ok(polynomial(g, x.weights()))
}

fn grad_raw(g: &RGraph, y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; g.n()];
    for &e in g.edges() {
        for i in bits(e) {
            out[i] += bits(e & !(1u64 << i)).map(|j| y[j]).product::<f64>();
        }
    }
    out
}

/// `∂L_G/∂x_i`, which is the link polynomial `L_{L_G(i)}(x)`.
pub fn gradient(g: &RGraph, x: &SimplexPoint) -> Result<Vec<f64>> {
    check_dim(g, x)?;
    Ok(grad_raw(g, x.weights()))
}

/// Euclidean projection of `y` restricted to `support` onto the simplex over `support`.
fn project(y: &[f64], support: u64) -> Vec<f64> {
    let mut v: Vec<f64> = bits(support).map(|i| y[i]).collect();
    v.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in v.iter().enumerate() {
        cum += u;
        let t = (cum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut out = vec![0.0; y.len()];
    for i in bits(support) {
        out[i] = (y[i] - theta).max(0.0);
    }
    let s: f64 = out.iter().sum();
    for w in &mut out {
        *w /= s;
    }
    out
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SupportEnumeration,
    MultistartAscent,
}

#[derive(Clone, Debug)]
pub struct LagrangianOptions {
    /// Enumerate all supports when `m` is at most this.
    pub support_threshold: usize,
    /// Force or forbid support enumeration regardless of `m`.
    pub supports: Option<bool>,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LagrangianOptions {
    fn default() -> Self {
        LagrangianOptions { support_threshold: 12, supports: None, restarts: 64, max_iters: 10_000, tol: 1e-10, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LagrangianResult {
    pub value: f64,
    pub maximizer: SimplexPoint,
    pub method: Method,
    /// Zero when every support was searched and every inner ascent converged;
    /// otherwise `C(m, r)/m^r` minus the value.
    pub gap: f64,
    pub starts: usize,
    pub all_converged: bool,
}

struct Ascent {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

fn ascend(g: &RGraph, start: Vec<f64>, support: u64, opts: &LagrangianOptions) -> Ascent {
    let mut x = start;
    let mut fx = polynomial(g, &x);
    let mut step = 1.0f64;
    for _ in 0..opts.max_iters {
        let grad = grad_raw(g, &x);
        let unit: Vec<f64> = x.iter().zip(&grad).map(|(a, b)| a + b).collect();
        let p = project(&unit, support);
        let gm = p.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if gm <= opts.tol {
            return Ascent { x, value: fx, converged: true };
        }
        let mut t = (step * 2.0).min(1e6);
        let mut moved = false;
        for _ in 0..80 {
            let y: Vec<f64> = x.iter().zip(&grad).map(|(a, b)| a + t * b).collect();
            let cand = project(&y, support);
            let fc = polynomial(g, &cand);
            let dir: f64 = cand.iter().zip(&x).zip(&grad).map(|((c, a), d)| (c - a) * d).sum();
            if fc >= fx + 1e-4 * dir && fc >= fx {
                moved = fc > fx || cand != x;
                x = cand;
                fx = fc;
                break;
            }
            t *= 0.5;
        }
        step = t;
        if !moved {
            // no ascent possible at machine precision
            return Ascent { x, value: fx, converged: gm <= opts.tol.sqrt() };
        }
    }
    Ascent { x, value: fx, converged: false }
}

pub fn maximize(g: &RGraph, opts: &LagrangianOptions) -> Result<LagrangianResult> {
    let m = g.n();
    if m == 0 {
        return Err(Error::InvalidParameter("Lagrangian needs at least one vertex".into()));
    }
    let enumerate = opts.supports.unwrap_or(m <= opts.support_threshold);
    if enumerate && m > 20 {
        return Err(Error::Budget(format!("support enumeration over 2^{m} supports refused")));
    }
    let full = full_mask(m);
    let mut starts: Vec<(Vec<f64>, u64)> = Vec::new();
    // the uniform point and the vertices are always evaluated
    starts.push((SimplexPoint::uniform(m).weights, full));
    for i in 0..m {
        starts.push((SimplexPoint::vertex(m, i).weights, 1u64 << i));
    }
    let method = if enumerate {
        let mut supports: Vec<u64> = (1..=full).filter(|s| s.count_ones() >= 2).collect();
        supports.sort_by_key(|s| (s.count_ones(), *s));
        for s in supports {
            starts.push((SimplexPoint::uniform_on(m, s).weights, s));
        }
        Method::SupportEnumeration
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.restarts {
            starts.push((SimplexPoint::random(m, &mut rng).weights, full));
        }
        Method::MultistartAscent
    };
    let runs: Vec<Ascent> = starts
        .par_iter()
        .map(|(x, s)| {
            if s.count_ones() == 1 || g.is_empty() {
                let value = polynomial(g, x);
                Ascent { x: x.clone(), value, converged: true }
            } else {
                ascend(g, x.clone(), *s, opts)
            }
        })
        .collect();
    let best_value = runs.iter().map(|a| a.value).fold(f64::NEG_INFINITY, f64::max);
    // earliest start within tolerance, so small supports win ties
    let best = runs
        .iter()
        .skip(1 + m)
        .chain(runs.iter().take(1 + m))
        .find(|a| a.value >= best_value - SIMPLEX_TOL)
        .expect("at least one start");
    let all_converged = runs.iter().all(|a| a.converged);
    let maximizer = SimplexPoint { weights: best.x.clone() };
    let value = polynomial(g, maximizer.weights());
    let bound = binomial(m, g.r()) as f64 / (m as f64).powi(g.r() as i32);
    let gap = if enumerate && all_converged { 0.0 } else { (bound - value).max(0.0) };
    Ok(LagrangianResult { value, maximizer, method, gap, starts: runs.len(), all_converged })
}

/// `λ(K^r_m) = C(m, r)/m^r`.
pub fn lambda_complete(m: usize, r: usize) -> Result<BigRational> {
    if r < 2 || m < r {
        return Err(Error::InvalidParameter(format!("λ(K^r_m) needs m ≥ r ≥ 2, got m = {m}, r = {r}")));
    }
    Ok(BigRational::new(binomial(m, r).into(), num_traits::pow(num_bigint::BigInt::from(m), r)))
}

/// Elementary symmetric polynomial `e_r(x)`, i.e. `L_{K^r_m}(x)`.
pub fn elementary_symmetric(x: &[f64], r: usize) -> f64 {
    let mut e = vec![0.0; r + 1];
    e[0] = 1.0;
    for &xi in x {
        for k in (1..=r).rev() {
            e[k] += e[k - 1] * xi;
        }
    }
    e[r]
}

/// `C(m,r)/m^r − L_{K^r_m}(x) − C(m,r)/(m^{r−1}(m−1)) · Σ(x_i − 1/m)²`, nonnegative on the simplex.
pub fn maclaurin_residual(m: usize, r: usize, x: &SimplexPoint) -> Result<f64> {
    if x.dimension() != m || r < 2 || m < r {
        return Err(Error::InvalidParameter(format!("need m ≥ r ≥ 2 and a point of dimension m = {m}")));
    }
    let c = binomial(m, r) as f64;
    let mf = m as f64;
    let sq: f64 = x.weights().iter().map(|w| (w - 1.0 / mf).powi(2)).sum();
    Ok(c / mf.powi(r as i32) - elementary_symmetric(x.weights(), r) - c / (mf.powi(r as i32 - 1) * (mf - 1.0)) * sq)
}

/// `(1/r!)(1−1/r)^{r−1} − x(1−x)^{r−1}/(r−1)! − (1/r!)(1−1/r)^{r−3}(x−1/r)²`.
pub fn semibipartite_residual(r: usize, x: f64) -> Result<f64> {
    if r < 2 || !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter("need r ≥ 2 and x in [0, 1]".into()));
    }
    let rf = r as f64;
    let fact_r1: f64 = (1..r).map(|i| i as f64).product();
    let fact_r = fact_r1 * rf;
    let q = 1.0 - 1.0 / rf;
    let lhs = x * (1.0 - x).powi(r as i32 - 1) / fact_r1 + q.powi(r as i32 - 3) * (x - 1.0 / rf).powi(2) / fact_r;
    Ok(q.powi(r as i32 - 1) / fact_r - lhs)
}

/// [`semibipartite_residual`] in exact arithmetic.
pub fn semibipartite_residual_exact(r: usize, x: &BigRational) -> Result<BigRational> {
    if r < 2 {
        return Err(Error::InvalidParameter("need r ≥ 2".into()));
    }
    let one = BigRational::one();
    let rq = BigRational::from_integer(r.into());
    let fact_r1 = BigRational::from_integer(crate::rational::factorial(r - 1));
    let fact_r = &fact_r1 * &rq;
    let q = &one - &one / &rq;
    let powq = |k: i32| if k >= 0 { num_traits::pow(q.clone(), k as usize) } else { num_traits::pow(q.recip(), (-k) as usize) };
    let lhs = x * num_traits::pow(&one - x, r - 1) / &fact_r1
        + powq(r as i32 - 3) * num_traits::pow(x - &one / &rq, 2) / &fact_r;
    Ok(powq(r as i32 - 1) / &fact_r - lhs)
}

#[derive(Clone, Debug, Serialize)]
pub struct PiLambdaEstimate {
    /// A lower bound for the supremum: the best Lagrangian among the patterns examined.
    pub value: f64,
    pub p_max: usize,
    /// The best pattern on `p_max` vertices, canonically labelled.
    pub pattern: Vec<Vec<usize>>,
    /// The pattern induced on the support of the maximizer.
    pub witness: Vec<Vec<usize>>,
    pub witness_vertices: usize,
    pub patterns_examined: usize,
}

/// Best Lagrangian over edge-maximal free r-graphs on `p_max` vertices,
/// optionally only those that are not `K^r_ℓ`-colorable.
///
/// Padding by isolated vertices and adding edges preserve both filters and
/// never lower the Lagrangian, so maximal graphs on `p_max` vertices suffice.
pub fn pi_lambda_estimate(
    fam: &FamilySpec,
    p_max: usize,
    not_colorable: Option<usize>,
    opts: &LagrangianOptions,
    enum_opts: &EnumOptions,
) -> Result<PiLambdaEstimate> {
    let r = fam.r();
    let levels = enumerate_levels(r, p_max, |g| fam.is_free(g), enum_opts)?;
    let slots = crate::graph::subsets_of(full_mask(p_max), r);
    let candidates: Vec<&RGraph> = levels
        .iter()
        .flatten()
        .filter(|g| slots.iter().all(|&s| g.has_edge(s) || !fam.is_free(&g.with_edge(s))))
        .filter(|g| not_colorable.is_none_or(|l| is_krl_colorable(g, l).map_or(true, |c| c.is_none())))
        .collect();
    let results: Vec<LagrangianResult> = candidates
        .par_iter()
        .map(|g| maximize(g, opts))
        .collect::<Result<_>>()?;
    let best = results
        .iter()
        .zip(&candidates)
        .fold(None::<(&LagrangianResult, &RGraph)>, |acc, (res, g)| match acc {
            Some((b, _)) if b.value >= res.value - SIMPLEX_TOL => acc,
            _ => Some((res, *g)),
        });
    let Some((res, g)) = best else {
        return Ok(PiLambdaEstimate {
            value: 0.0,
            p_max,
            pattern: Vec::new(),
            witness: Vec::new(),
            witness_vertices: 0,
            patterns_examined: 0,
        });
    };
    let sub = g.induced_mask(res.maximizer.support());
    let witness = canonical_form(&sub.graph).graph();
    Ok(PiLambdaEstimate {
        value: res.value,
        p_max,
        pattern: g.edge_lists(),
        witness: witness.edge_lists(),
        witness_vertices: witness.n(),
        patterns_examined: candidates.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{complete, matching};
    use crate::rational::ratio;

    #[test]
    fn evaluation_and_gradient() {
        let k3 = complete(3, 2).unwrap();
        assert!((evaluate(&k3, &SimplexPoint::uniform(3)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        for r in 2..6 {
            let e = complete(r, r).unwrap();
            let v = evaluate(&e, &SimplexPoint::uniform(r)).unwrap();
            assert!((v - (1.0 / r as f64).powi(r as i32)).abs() < 1e-15);
        }
        let x = SimplexPoint::new(vec![0.5, 0.5, 0.0]).unwrap();
        assert_eq!(gradient(&k3, &x).unwrap(), vec![0.5, 0.5, 1.0]);
        assert!(evaluate(&k3, &SimplexPoint::uniform(4)).is_err());
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn projection_lands_on_simplex() {
        let p = project(&[0.9, 0.8, -3.0, 2.0], 0b1111);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(p.iter().all(|w| *w >= 0.0));
        assert_eq!(project(&[5.0, 1.0], 0b10), vec![0.0, 1.0]);
    }

    #[test]
    fn benchmarks() {
        let opts = LagrangianOptions::default();
        let k3 = maximize(&complete(3, 2).unwrap(), &opts).unwrap();
        assert!((k3.value - 1.0 / 3.0).abs() < 1e-9);
        assert_eq!(k3.method, Method::SupportEnumeration);
        assert_eq!(k3.gap, 0.0);
        let k34 = maximize(&complete(4, 3).unwrap(), &opts).unwrap();
        assert!((k34.value - 1.0 / 16.0).abs() < 1e-9);
        let m2 = maximize(&matching(3, 2).unwrap(), &opts).unwrap();
        assert!((m2.value - 1.0 / 27.0).abs() < 1e-9);
        let none = maximize(&RGraph::empty(3, 4).unwrap(), &opts).unwrap();
        assert_eq!(none.value, 0.0);
        let multi = LagrangianOptions { supports: Some(false), ..opts };
        let ms = maximize(&complete(5, 3).unwrap(), &multi).unwrap();
        assert_eq!(ms.method, Method::MultistartAscent);
        assert!((ms.value - 10.0 / 125.0).abs() < 1e-9);
    }

    #[test]
    fn exact_complete_lagrangians() {
        assert_eq!(lambda_complete(3, 2).unwrap(), ratio(1, 3));
        assert_eq!(lambda_complete(4, 3).unwrap(), ratio(1, 16));
        assert_eq!(lambda_complete(2, 2).unwrap(), ratio(1, 4));
        assert!(lambda_complete(2, 3).is_err());
    }

    #[test]
    fn inequality_equality_cases() {
        for (m, r) in [(3, 2), (4, 3), (5, 3), (6, 4)] {
            assert!(maclaurin_residual(m, r, &SimplexPoint::uniform(m)).unwrap().abs() < 1e-15);
            assert!(maclaurin_residual(m, r, &SimplexPoint::vertex(m, 1)).unwrap().abs() < 1e-15);
        }
        assert!(semibipartite_residual(4, 0.25).unwrap().abs() < 1e-15);
        assert_eq!(semibipartite_residual_exact(4, &ratio(1, 4)).unwrap(), ratio(0, 1));
        for r in 2..=8 {
            assert_eq!(semibipartite_residual_exact(r, &ratio(1, r as i64)).unwrap(), ratio(0, 1));
            assert_eq!(semibipartite_residual_exact(r, &ratio(1, 1)).unwrap(), ratio(0, 1));
        }
        // both sides equal 9/512 at r = 4, x = 1/4
        let q = ratio(3, 4);
        assert_eq!(num_traits::pow(q, 3) / ratio(24, 1), ratio(9, 512));
    }

    #[test]
    fn pi_lambda() {
        let opts = LagrangianOptions::default();
        let eo = EnumOptions::default();
        let k3 = FamilySpec::Single(complete(3, 2).unwrap());
        let est = pi_lambda_estimate(&k3, 5, None, &opts, &eo).unwrap();
        assert!((est.value - 0.25).abs() < 1e-9);
        assert_eq!(est.witness, vec![vec![0, 1]]);
        let s3 = pi_lambda_estimate(&FamilySpec::Sigma(3), 5, None, &opts, &eo).unwrap();
        assert!(s3.value >= 1.0 / 27.0 - 1e-12);
        let pat = RGraph::new(3, 5, s3.pattern.clone()).unwrap();
        assert!(FamilySpec::Sigma(3).is_free(&pat));
        let nothing = FamilySpec::List { r: 3, members: Vec::new() };
        let all = pi_lambda_estimate(&nothing, 5, None, &opts, &eo).unwrap();
        assert!((all.value - 10.0 / 125.0).abs() < 1e-9);
    }
}
