//! Floating-point shadow of the exact analyzer. It finds roots numerically,
//! matches them across `f − a` and `g − a`, and reports where it disagrees
//! with the exact verdict. It never decides anything on its own.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::poly::Poly;
use crate::sharing::{DomainSpec, Mode, PairKind, SharingVerdict};
use crate::ratfun::RationalFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    /// Durand–Kerner stops once every correction is below this (relative).
    pub stop_tol: f64,
    /// Roots closer than this (relative) are the same point.
    pub match_tol: f64,
    /// Distances within this factor of `match_tol` make a case borderline.
    pub borderline_factor: f64,
    pub max_iterations: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { stop_tol: 1e-13, match_tol: 1e-8, borderline_factor: 10.0, max_iterations: 1000 }
    }
}

impl OracleConfig {
    pub fn with_match_tol(tol: f64) -> Self {
        OracleConfig { match_tol: tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxRoot {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub cluster_id: usize,
}

impl ApproxRoot {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// A root with its multiplicity (all members of one cluster).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxPoint {
    pub re: f64,
    pub im: f64,
    pub mult: usize,
}

impl ApproxPoint {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

pub fn complex_coeffs(p: &Poly) -> Vec<Complex64> {
    p.to_complex_coeffs().into_iter().map(|(re, im)| Complex64::new(re, im)).collect()
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * z + k)
}

fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    c.iter().enumerate().skip(1).map(|(i, &k)| k * i as f64).collect()
}

fn residual_bound(c: &[Complex64], tol: f64) -> f64 {
    let max = c.iter().map(|k| k.norm()).fold(0.0, f64::max);
    tol * (1.0 + max) * (c.len() - 1) as f64
}

/// All `deg p` roots of `p` by Durand–Kerner, grouped into clusters that stand
/// for one multiple root. Cluster members report the refined cluster centre.
pub fn find_roots(p: &Poly, cfg: &OracleConfig) -> Result<Vec<ApproxRoot>> {
    let deg = p.degree().filter(|&d| d >= 1).ok_or(Error::ConstantFunction)?;
    let raw = complex_coeffs(p);
    let lc = raw[deg];
    let c: Vec<Complex64> = raw.iter().map(|&k| k / lc).collect();
    // perturbed circle around the root centroid, Fujiwara radius
    let centre = -c[deg - 1] / deg as f64;
    let radius = (1..=deg).map(|k| 2.0 * c[deg - k].norm().powf(1.0 / k as f64)).fold(0.0, f64::max).max(1.0);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / deg as f64 + 0.4;
            centre + Complex64::from_polar(radius * (1.0 + 0.1 * k as f64 / deg as f64), angle)
        })
        .collect();
    let bound = residual_bound(&c, cfg.stop_tol.max(1e-15) * 1e3);
    // residual scaled by max(1, |z|)^deg: rounding in Horner grows like that for large roots
    let worst_of = |z: &[Complex64]| {
        z.iter().map(|&r| horner(&c, r).norm() / r.norm().max(1.0).powi(deg as i32)).fold(0.0, f64::max)
    };
    // near a multiple root the iterates wander in rounding noise, so keep the best set seen
    let mut best = (f64::INFINITY, z.clone());
    for _ in 0..cfg.max_iterations {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(f64::EPSILON, f64::EPSILON);
            }
            let step = horner(&c, z[i]) / den;
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        let worst = worst_of(&z);
        if worst < best.0 {
            best = (worst, z.clone());
        }
        if max_step < cfg.stop_tol {
            break;
        }
    }
    let (worst, z) = best;
    if worst.is_nan() || worst > bound {
        return Err(Error::NonConvergence { iterations: cfg.max_iterations, residual: format!("{worst:e}") });
    }
    Ok(cluster(&c, z))
}

/// Spread a genuine `m`-fold root shows after double-precision iteration.
fn spread_bound(m: usize, centre: Complex64) -> f64 {
    50.0 * 1e-15f64.powf(1.0 / m as f64) * (1.0 + centre.norm())
}

fn components(z: &[Complex64], idx: &[usize], radius: f64) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..idx.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            let (za, zb) = (z[idx[a]], z[idx[b]]);
            if (za - zb).norm() < radius * (1.0 + za.norm().max(zb.norm())) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; idx.len()];
    for a in 0..idx.len() {
        let r = find(&mut parent, a);
        match root_of[r] {
            Some(g) => groups[g].push(idx[a]),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![idx[a]]);
            }
        }
    }
    groups
}

/// Newton on the `(m−1)`-th derivative, where an `m`-fold root is simple.
fn refine(c: &[Complex64], start: Complex64, m: usize) -> Complex64 {
    let mut d = c.to_vec();
    for _ in 1..m {
        d = derivative(&d);
    }
    let dd = derivative(&d);
    let mut z = start;
    for _ in 0..8 {
        let den = horner(&dd, z);
        if den.norm() == 0.0 {
            break;
        }
        let step = horner(&d, z) / den;
        if !step.is_finite() || step.norm() > 1e-2 * (1.0 + z.norm()) {
            break;
        }
        z -= step;
        if step.norm() < 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

fn cluster(c: &[Complex64], z: Vec<Complex64>) -> Vec<ApproxRoot> {
    let mut pending: Vec<usize> = (0..z.len()).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut radius = 1e-1;
    while !pending.is_empty() && radius > 1e-9 {
        let mut rest = Vec::new();
        for g in components(&z, &pending, radius) {
            let centre = g.iter().map(|&i| z[i]).sum::<Complex64>() / g.len() as f64;
            let spread = g.iter().map(|&i| (z[i] - centre).norm()).fold(0.0, f64::max);
            if g.len() == 1 || spread <= spread_bound(g.len(), centre) {
                groups.push(g);
            } else {
                rest.extend(g);
            }
        }
        pending = rest;
        radius /= 10.0;
    }
    groups.extend(pending.into_iter().map(|i| vec![i]));
    groups.sort_by_key(|g| g[0]);
    let mut out = vec![ApproxRoot { re: 0.0, im: 0.0, residual: 0.0, cluster_id: 0 }; z.len()];
    for (id, g) in groups.iter().enumerate() {
        let centre = g.iter().map(|&i| z[i]).sum::<Complex64>() / g.len() as f64;
        let centre = refine(c, centre, g.len());
        let residual = horner(c, centre).norm();
        for &i in g {
            out[i] = ApproxRoot { re: centre.re, im: centre.im, residual, cluster_id: id };
        }
    }
    out
}

/// Distinct points with multiplicities.
pub fn root_points(roots: &[ApproxRoot]) -> Vec<ApproxPoint> {
    let mut pts: Vec<ApproxPoint> = Vec::new();
    for r in roots {
        if r.cluster_id >= pts.len() {
            pts.resize(r.cluster_id + 1, ApproxPoint { re: 0.0, im: 0.0, mult: 0 });
        }
        let p = &mut pts[r.cluster_id];
        p.re = r.re;
        p.im = r.im;
        p.mult += 1;
    }
    pts
}

fn points_of(p: &Poly, cfg: &OracleConfig) -> Result<Vec<ApproxPoint>> {
    if p.is_constant() {
        return Ok(Vec::new());
    }
    Ok(root_points(&find_roots(p, cfg)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericPair {
    pub point: String,
    pub mult_f: usize,
    pub mult_g: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericVerdict {
    pub shared: bool,
    pub mode: Mode,
    pub omitted: bool,
    pub pairs: Vec<NumericPair>,
    pub f_points: Vec<ApproxPoint>,
    pub g_points: Vec<ApproxPoint>,
    pub borderline: bool,
    /// Smallest distance between an `f` point and a `g` point that were not matched.
    pub min_unmatched_distance: Option<f64>,
}

fn fmt_point(z: Complex64) -> String {
    format!("{:.10}{:+.10}i", z.re, z.im)
}

/// Numeric verdict for the same query as `shares_value`.
pub fn numeric_verdict(
    f: &RationalFunction,
    pair: &PairKind,
    a: &FieldElem,
    domain: DomainSpec,
    cfg: &OracleConfig,
) -> Result<NumericVerdict> {
    f.require_nonconstant()?;
    let g = pair.apply(f)?;
    let na = f.value_numerator(a);
    let nb = g.value_numerator(a);
    if nb.is_zero() {
        return Ok(NumericVerdict {
            shared: false,
            mode: Mode::NotShared,
            omitted: false,
            pairs: Vec::new(),
            f_points: Vec::new(),
            g_points: Vec::new(),
            borderline: false,
            min_unmatched_distance: None,
        });
    }
    let tol = cfg.match_tol;
    let mut fp = points_of(&na, cfg)?;
    let mut gp = points_of(&nb, cfg)?;
    let near_zero = |p: &ApproxPoint| p.z().norm() < tol;
    let euler_sphere = domain == DomainSpec::Sphere && matches!(pair, PairKind::Euler(_));
    let mut boundary: Vec<(String, usize, usize)> = Vec::new();
    let mut boundary_mismatch = false;
    if domain == DomainSpec::Punctured || euler_sphere {
        let zf: usize = fp.iter().filter(|p| near_zero(p)).map(|p| p.mult).sum();
        let zg: usize = gp.iter().filter(|p| near_zero(p)).map(|p| p.mult).sum();
        fp.retain(|p| !near_zero(p));
        gp.retain(|p| !near_zero(p));
        if euler_sphere {
            match (zf > 0, zg > 0) {
                (true, true) => boundary.push(("0".into(), zf, zg)),
                (false, false) => {}
                _ => boundary_mismatch = true,
            }
        }
    }
    if domain == DomainSpec::Sphere {
        // a missing root of the value numerator sits at infinity
        let inf_f = f.degree() - na.deg0();
        let inf_g = g.degree() - nb.deg0();
        match (inf_f > 0, inf_g > 0) {
            (true, true) => boundary.push(("inf".into(), inf_f, inf_g)),
            (false, false) => {}
            _ => boundary_mismatch = true,
        }
    }
    let mut used = vec![false; gp.len()];
    let mut pairs = Vec::new();
    let mut unmatched_f = 0;
    let mut borderline = false;
    let mut min_unmatched: Option<f64> = None;
    for p in &fp {
        let mut hit = None;
        for (j, q) in gp.iter().enumerate() {
            let dist = (p.z() - q.z()).norm() / (1.0 + p.z().norm());
            if dist < tol && !used[j] && hit.is_none() {
                hit = Some(j);
            }
            if dist > tol / cfg.borderline_factor && dist < tol * cfg.borderline_factor {
                borderline = true;
            }
        }
        match hit {
            Some(j) => {
                used[j] = true;
                pairs.push(NumericPair { point: fmt_point(p.z()), mult_f: p.mult, mult_g: gp[j].mult });
            }
            None => unmatched_f += 1,
        }
    }
    for (j, q) in gp.iter().enumerate() {
        if used[j] {
            continue;
        }
        for p in &fp {
            let d = (p.z() - q.z()).norm();
            min_unmatched = Some(min_unmatched.map_or(d, |m: f64| m.min(d)));
        }
    }
    let unmatched_g = used.iter().filter(|u| !**u).count();
    for (name, i, j) in &boundary {
        pairs.push(NumericPair { point: name.clone(), mult_f: *i, mult_g: *j });
    }
    let shared = unmatched_f == 0 && unmatched_g == 0 && !boundary_mismatch;
    let (mode, omitted) = if !shared {
        (Mode::NotShared, false)
    } else if pairs.is_empty() {
        (Mode::Cm, true)
    } else if pairs.iter().all(|p| p.mult_f == p.mult_g) {
        (Mode::Cm, false)
    } else if pairs.iter().all(|p| p.mult_f != p.mult_g) {
        (Mode::Dm, false)
    } else {
        (Mode::MixedIm, false)
    };
    Ok(NumericVerdict {
        shared,
        mode,
        omitted,
        pairs,
        f_points: fp,
        g_points: gp,
        borderline,
        min_unmatched_distance: min_unmatched,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub agree: bool,
    pub borderline: bool,
    /// Disagreement on a case that is not borderline.
    pub failure: bool,
    pub detail: String,
}

/// Multiplicity pairs of the exact verdict, one entry per shared point.
fn exact_pair_multiset(v: &SharingVerdict, a: &FieldElem) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in &v.shared_factors {
        for _ in 0..s.factor.deg0() {
            out.push((s.mult_f, s.mult_g));
        }
    }
    // boundary pairs follow the factor pairs
    out.extend(v.multiplicity_pairs(a).into_iter().skip(v.shared_factors.len()));
    out.sort();
    out
}

/// Structural comparison of the exact and numeric verdicts for value `a`.
pub fn cross_check(exact: &SharingVerdict, approx: &NumericVerdict, a: &FieldElem) -> Agreement {
    let mut problems = Vec::new();
    if exact.shared != approx.shared {
        problems.push(format!("shared: exact {} numeric {}", exact.shared, approx.shared));
    }
    if exact.shared && approx.shared {
        if exact.mode != approx.mode || exact.omitted != approx.omitted {
            problems.push(format!("mode: exact {} numeric {}", exact.mode, approx.mode));
        }
        let mut np: Vec<(usize, usize)> = approx.pairs.iter().map(|p| (p.mult_f, p.mult_g)).collect();
        np.sort();
        let ep = exact_pair_multiset(exact, a);
        if np != ep {
            problems.push(format!("pairs: exact {ep:?} numeric {np:?}"));
        }
    }
    let agree = problems.is_empty();
    let detail = if agree {
        "agree".to_string()
    } else {
        let fp: Vec<String> = approx.f_points.iter().map(|p| format!("{}^{}", fmt_point(p.z()), p.mult)).collect();
        let gp: Vec<String> = approx.g_points.iter().map(|p| format!("{}^{}", fmt_point(p.z()), p.mult)).collect();
        format!("{}; f roots [{}]; g roots [{}]", problems.join("; "), fp.join(", "), gp.join(", "))
    };
    Agreement { agree, borderline: approx.borderline, failure: !agree && !approx.borderline, detail }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sharing::shares_value;

    fn close(z: Complex64, re: f64, im: f64, tol: f64) -> bool {
        (z - Complex64::new(re, im)).norm() < tol
    }

    #[test]
    fn simple_roots() {
        let cfg = OracleConfig::default();
        let r = find_roots(&Poly::from_ints(&[1, 0, 1]), &cfg).unwrap();
        assert!(r.iter().any(|x| close(x.z(), 0.0, 1.0, 1e-12)));
        assert!(r.iter().any(|x| close(x.z(), 0.0, -1.0, 1e-12)));
        let r = find_roots(&Poly::from_ints(&[3, 16, 16]), &cfg).unwrap();
        assert!(r.iter().any(|x| close(x.z(), -0.25, 0.0, 1e-12)));
        assert!(r.iter().any(|x| close(x.z(), -0.75, 0.0, 1e-12)));
    }

    #[test]
    fn multiple_roots_cluster() {
        let cfg = OracleConfig::default();
        let p = &Poly::from_ints(&[-1, 1]).pow(4) * &Poly::from_ints(&[2, 1]);
        let pts = root_points(&find_roots(&p, &cfg).unwrap());
        assert_eq!(pts.len(), 2);
        let one = pts.iter().find(|q| q.mult == 4).unwrap();
        assert!(close(one.z(), 1.0, 0.0, 1e-9));
        assert_eq!(pts.iter().map(|q| q.mult).sum::<usize>(), 5);
    }

    #[test]
    fn ex53_numeric() {
        let f = crate::families::ex53_function();
        let pair = PairKind::Euler(FieldElem::one());
        let one = FieldElem::one();
        let nv = numeric_verdict(&f, &pair, &one, DomainSpec::Sphere, &OracleConfig::default()).unwrap();
        assert!(nv.shared);
        assert_eq!(nv.mode, Mode::MixedIm);
        let ev = shares_value(&f, &pair, &one, DomainSpec::Sphere).unwrap();
        assert!(cross_check(&ev, &nv, &one).agree);
    }

    #[test]
    fn square_at_zero() {
        let f = RationalFunction::from_poly(Poly::from_ints(&[0, 0, 1]));
        let z = FieldElem::zero();
        let nv = numeric_verdict(&f, &PairKind::Derivative, &z, DomainSpec::Plane, &OracleConfig::default()).unwrap();
        assert!(nv.shared);
        assert_eq!(nv.pairs.len(), 1);
        assert_eq!((nv.pairs[0].mult_f, nv.pairs[0].mult_g), (2, 1));
    }

    #[test]
    fn policy_cases() {
        let f = RationalFunction::from_poly(Poly::from_ints(&[0, 0, 1]));
        let z = FieldElem::zero();
        let ev = shares_value(&f, &PairKind::Derivative, &z, DomainSpec::Plane).unwrap();
        let mut nv = numeric_verdict(&f, &PairKind::Derivative, &z, DomainSpec::Plane, &OracleConfig::default()).unwrap();
        assert!(cross_check(&ev, &nv, &z).agree);
        nv.shared = false;
        nv.borderline = true;
        let ag = cross_check(&ev, &nv, &z);
        assert!(!ag.agree && !ag.failure);
        nv.borderline = false;
        assert!(cross_check(&ev, &nv, &z).failure);
    }
}
